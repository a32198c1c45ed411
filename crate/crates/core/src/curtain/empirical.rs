//! Sampled four-point defects from lower/upper distance bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curtain::backend::{Point, SpaceBackend, TreePoint};
use crate::curtain::model::{candidates_for, curtain_distance_bounds, CandidateConfig, CurtainModelConfig};
use crate::error::CurtainError;

type Result<T> = std::result::Result<T, CurtainError>;

/// Lower and upper distance matrices.
pub type BoundMatrices = (Vec<Vec<f64>>, Vec<Vec<f64>>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleRegion {
    /// The cube `[min, max]^dim` of a Euclidean backend.
    Cube { min: f64, max: f64 },
    /// Uniform by length over the edges of a tree backend.
    WholeTree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub region: SampleRegion,
}

/// Draws `n_samples` points, reproducibly from the seed.
pub fn sample_points(backend: &SpaceBackend, cfg: &SamplerConfig) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match (backend, &cfg.region) {
        (SpaceBackend::Euclidean { dim }, SampleRegion::Cube { min, max }) => {
            if !(min.is_finite() && max.is_finite() && min < max) {
                return Err(CurtainError::InvalidConfig(format!("empty sampling cube [{min}, {max}]")));
            }
            Ok((0..cfg.n_samples)
                .map(|_| Point::Euclidean((0..*dim).map(|_| rng.gen_range(*min..*max)).collect()))
                .collect())
        }
        (SpaceBackend::Tree(tree), SampleRegion::WholeTree) => {
            let edges = tree.edges();
            if edges.is_empty() {
                return Ok(vec![Point::Tree(TreePoint::Vertex(0)); cfg.n_samples]);
            }
            let total: f64 = edges.iter().map(|e| e.2).sum();
            Ok((0..cfg.n_samples)
                .map(|_| {
                    let mut u = rng.gen_range(0.0..total);
                    let mut edge = edges.len() - 1;
                    for (k, e) in edges.iter().enumerate() {
                        if u < e.2 {
                            edge = k;
                            break;
                        }
                        u -= e.2;
                    }
                    Point::Tree(TreePoint::Edge { edge, offset: u.min(edges[edge].2) })
                })
                .collect())
        }
        _ => Err(CurtainError::InvalidConfig("sampling region does not match backend".into())),
    }
}

/// Source of lower and upper bounds on a distance between two points.
pub trait PairOracle: Sync {
    fn bounds(&self, backend: &SpaceBackend, a: &Point, b: &Point) -> Result<(f64, f64)>;
}

/// The backend's own metric, with coinciding bounds.
pub struct ExactMetric;

impl PairOracle for ExactMetric {
    fn bounds(&self, backend: &SpaceBackend, a: &Point, b: &Point) -> Result<(f64, f64)> {
        let d = backend.distance(a, b)?;
        Ok((d, d))
    }
}

/// Curtain-model bounds with a per-pair candidate family.
pub struct CurtainMetric {
    pub model: CurtainModelConfig,
    pub candidates: CandidateConfig,
}

impl PairOracle for CurtainMetric {
    fn bounds(&self, backend: &SpaceBackend, a: &Point, b: &Point) -> Result<(f64, f64)> {
        if a == b {
            return Ok((0.0, 0.0));
        }
        let cands = candidates_for(backend, a, b, &self.candidates)?;
        let db = curtain_distance_bounds(backend, a, b, &self.model, &cands)?;
        Ok((db.lower, db.upper))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDelta {
    /// Certified lower bound for the largest four-point defect among the
    /// sampled quadruples.
    pub value: f64,
    pub n_samples: usize,
    pub quadruples: u64,
}

/// Lower and upper distance matrices for `points`.
pub fn bound_matrices(
    backend: &SpaceBackend,
    oracle: &dyn PairOracle,
    points: &[Point],
) -> Result<BoundMatrices> {
    let n = points.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let values: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| oracle.bounds(backend, &points[i], &points[j]))
        .collect::<Result<_>>()?;
    let mut lower = vec![vec![0.0; n]; n];
    let mut upper = vec![vec![0.0; n]; n];
    for (&(i, j), &(lo, hi)) in pairs.iter().zip(&values) {
        lower[i][j] = lo;
        lower[j][i] = lo;
        upper[i][j] = hi;
        upper[j][i] = hi;
    }
    Ok((lower, upper))
}

/// Largest certified four-point defect over all quadruples of the bound
/// matrices: for each pairing taken as the largest, its lower bound minus
/// the upper bounds of the other two, clamped at zero.
pub fn four_point_from_bounds(lower: &[Vec<f64>], upper: &[Vec<f64>]) -> f64 {
    let n = lower.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in (k + 1)..n {
                        let lo = [
                            lower[i][j] + lower[k][l],
                            lower[i][k] + lower[j][l],
                            lower[i][l] + lower[j][k],
                        ];
                        let hi = [
                            upper[i][j] + upper[k][l],
                            upper[i][k] + upper[j][l],
                            upper[i][l] + upper[j][k],
                        ];
                        for a in 0..3 {
                            let rival = hi[(a + 1) % 3].max(hi[(a + 2) % 3]);
                            worst = worst.max(lo[a] - rival);
                        }
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

pub fn empirical_four_point_delta(
    backend: &SpaceBackend,
    oracle: &dyn PairOracle,
    cfg: &SamplerConfig,
) -> Result<EmpiricalDelta> {
    if cfg.n_samples < 4 {
        return Err(CurtainError::InvalidConfig("at least four samples are needed".into()));
    }
    let points = sample_points(backend, cfg)?;
    let (lower, upper) = bound_matrices(backend, oracle, &points)?;
    let n = cfg.n_samples as u64;
    Ok(EmpiricalDelta {
        value: four_point_from_bounds(&lower, &upper),
        n_samples: cfg.n_samples,
        quadruples: n * (n - 1) * (n - 2) * (n - 3) / 24,
    })
}
