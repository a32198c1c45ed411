use std::collections::BTreeMap;

use crate::error::MetricError;
use crate::metric::space::FiniteMetricSpace;

/// A family of discrete paths `η(x, y)`, one per unordered pair of points.
///
/// Paths are point-index sequences from `x` to `y`. The path for `(y, x)` is
/// the reverse of the one stored for `(x, y)`, and `η(x, x)` defaults to the
/// single point `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSystem {
    n: usize,
    // dense table, paths[x][y] runs from x to y
    paths: Vec<Vec<Vec<usize>>>,
}

impl PathSystem {
    /// Builds a system from paths keyed by ordered index pairs. Exactly one
    /// orientation of each unordered pair `x ≠ y` must be present.
    pub fn from_index_paths(
        space: &FiniteMetricSpace,
        given: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self, MetricError> {
        let n = space.len();
        let mut table: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
        for (&(x, y), path) in &given {
            space.check_index(x)?;
            space.check_index(y)?;
            if path.is_empty() {
                return Err(MetricError::EmptyPath);
            }
            for &p in path {
                space.check_index(p)?;
            }
            let (first, last) = (path[0], path[path.len() - 1]);
            if first != x || last != y {
                return Err(MetricError::EndpointMismatch {
                    key_from: space.label(x).into(),
                    key_to: space.label(y).into(),
                    from: space.label(first).into(),
                    to: space.label(last).into(),
                });
            }
            if table[x][y].is_some() || (x != y && table[y][x].is_some()) {
                return Err(MetricError::DuplicatePath(space.label(x).into(), space.label(y).into()));
            }
            table[x][y] = Some(path.clone());
            if x != y {
                table[y][x] = Some(path.iter().rev().copied().collect());
            }
        }
        let mut paths = Vec::with_capacity(n);
        for (x, row) in table.into_iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (y, cell) in row.into_iter().enumerate() {
                match cell {
                    Some(p) => out.push(p),
                    None if x == y => out.push(vec![x]),
                    None => {
                        return Err(MetricError::MissingPath(space.label(x).into(), space.label(y).into()))
                    }
                }
            }
            paths.push(out);
        }
        Ok(PathSystem { n, paths })
    }

    /// The system that joins every pair by the two-point path `(x, y)`.
    pub fn direct(space: &FiniteMetricSpace) -> Self {
        let n = space.len();
        let paths = (0..n)
            .map(|x| (0..n).map(|y| if x == y { vec![x] } else { vec![x, y] }).collect())
            .collect();
        PathSystem { n, paths }
    }

    /// Builds a system from a function producing the path for each pair
    /// `x < y`.
    pub fn from_fn(
        space: &FiniteMetricSpace,
        mut f: impl FnMut(usize, usize) -> Vec<usize>,
    ) -> Result<Self, MetricError> {
        let mut given = BTreeMap::new();
        for x in 0..space.len() {
            for y in (x + 1)..space.len() {
                given.insert((x, y), f(x, y));
            }
        }
        Self::from_index_paths(space, given)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn path(&self, x: usize, y: usize) -> &[usize] {
        &self.paths[x][y]
    }

    /// Iterates over `(x, y, path)` for `x < y`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &[usize])> + '_ {
        (0..self.n).flat_map(move |x| ((x + 1)..self.n).map(move |y| (x, y, self.path(x, y))))
    }

    /// Same system under the relabelling used by [`FiniteMetricSpace::permuted`].
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inverse = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let paths = perm
            .iter()
            .map(|&a| perm.iter().map(|&b| self.paths[a][b].iter().map(|&p| inverse[p]).collect()).collect())
            .collect();
        PathSystem { n: self.n, paths }
    }
}
