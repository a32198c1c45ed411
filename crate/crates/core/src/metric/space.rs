use std::collections::HashMap;

use crate::error::MetricError;

/// Relative slack for the metric-axiom checks on load.
const AXIOM_TOLERANCE: f64 = 1e-9;

/// A finite metric space given by labels and a symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validates the metric axioms and builds the space.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let n = dist.len();
        if labels.len() != n {
            return Err(MetricError::LabelMismatch { labels: labels.len(), size: n });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(MetricError::DuplicateLabel(l.clone()));
            }
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::NotSquare { row: i, len: row.len(), expected: n });
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(MetricError::InvalidDistance(labels[i].clone(), labels[j].clone(), d));
                }
            }
        }
        let space = FiniteMetricSpace { labels, index, dist };
        space.check_axioms()?;
        Ok(space)
    }

    /// Builds the Euclidean distance matrix of a point cloud, labelled `0..n`.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self, MetricError> {
        let labels = (0..points.len()).map(|i| i.to_string()).collect();
        let dist = points
            .iter()
            .map(|a| points.iter().map(|b| euclid(a, b)).collect())
            .collect();
        Self::new(labels, dist)
    }

    fn check_axioms(&self) -> Result<(), MetricError> {
        let n = self.len();
        for i in 0..n {
            if self.dist[i][i] != 0.0 {
                return Err(MetricError::NonzeroDiagonal(self.labels[i].clone(), self.dist[i][i]));
            }
            for j in (i + 1)..n {
                let (a, b) = (self.dist[i][j], self.dist[j][i]);
                if (a - b).abs() > AXIOM_TOLERANCE * a.max(b).max(1.0) {
                    return Err(MetricError::Asymmetric(self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = self.dist[x][z];
                    let rhs = self.dist[x][y] + self.dist[y][z];
                    if lhs > rhs + AXIOM_TOLERANCE * lhs.max(1.0) {
                        return Err(MetricError::Triangle {
                            x: self.labels[x].clone(),
                            y: self.labels[y].clone(),
                            z: self.labels[z].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn index_of(&self, label: &str) -> Result<usize, MetricError> {
        self.index.get(label).copied().ok_or_else(|| MetricError::UnknownPoint(label.to_string()))
    }

    pub fn check_index(&self, i: usize) -> Result<(), MetricError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(MetricError::IndexOutOfRange(i))
        }
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    /// Same space with every distance multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self, MetricError> {
        let dist = self.dist.iter().map(|r| r.iter().map(|d| d * t).collect()).collect();
        Self::new(self.labels.clone(), dist)
    }

    /// Same space with points reordered: point `i` of the result is point
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, MetricError> {
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let dist = perm.iter().map(|&a| perm.iter().map(|&b| self.dist[a][b]).collect()).collect();
        Self::new(labels, dist)
    }

    /// Distance from point `p` to the nearest point of `set` (`∞` for an empty set).
    pub fn point_to_set(&self, p: usize, set: impl IntoIterator<Item = usize>) -> f64 {
        set.into_iter().map(|q| self.dist[p][q]).fold(f64::INFINITY, f64::min)
    }

    /// Hausdorff distance between two nonempty point sets.
    pub fn hausdorff(&self, a: &[usize], b: &[usize]) -> f64 {
        let one_sided = |from: &[usize], to: &[usize]| {
            from.iter().map(|&p| self.point_to_set(p, to.iter().copied())).fold(0.0, f64::max)
        };
        one_sided(a, b).max(one_sided(b, a))
    }

    pub fn diameter(&self, set: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (k, &a) in set.iter().enumerate() {
            for &b in &set[k + 1..] {
                best = best.max(self.dist[a][b]);
            }
        }
        best
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
