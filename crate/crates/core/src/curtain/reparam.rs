use serde::{Deserialize, Serialize};

use crate::error::CurtainError;
use crate::metric::verify::rough_defect_by;

/// A greedy selection `Q(0), Q(1), …` of samples along a geodesic together
/// with its integer parametrisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughParametrization {
    /// Sample indices; `indices[t]` realises `Q(t)`.
    pub indices: Vec<usize>,
    pub params: Vec<f64>,
    pub defect: f64,
    pub q: f64,
    /// `defect ≤ q`.
    pub within: bool,
}

/// Picks, for every integer `t ≥ 1` up to the largest reachable distance,
/// the first sample `s` with `dist(0, s) ∈ [t, t + 1]`, and parametrises the
/// selection by `t`.
///
/// `positions` are the sample parameters along the base geodesic (ascending,
/// sample 0 is `Q(0)`); `dist` gives curtain-model distances between samples.
pub fn reparametrize_to_rough_geodesic(
    positions: &[f64],
    dist: impl Fn(usize, usize) -> f64,
    q: f64,
) -> Result<RoughParametrization, CurtainError> {
    if positions.is_empty() {
        return Err(CurtainError::InvalidConfig("no samples".into()));
    }
    if positions.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(CurtainError::InvalidConfig("sample positions must be strictly increasing".into()));
    }
    if !(q.is_finite() && q > 0.0) {
        return Err(CurtainError::InvalidConfig(format!("q = {q} must be positive")));
    }
    let from_origin: Vec<f64> = (0..positions.len()).map(|i| if i == 0 { 0.0 } else { dist(0, i) }).collect();
    let reach = from_origin.iter().copied().fold(0.0, f64::max).floor() as usize;
    let mut indices = vec![0];
    for t in 1..=reach {
        let tf = t as f64;
        let hit = from_origin.iter().position(|&v| v >= tf && v <= tf + 1.0);
        match hit {
            Some(i) => indices.push(i),
            None => return Err(CurtainError::DensityFailure { t }),
        }
    }
    let params: Vec<f64> = (0..indices.len()).map(|t| t as f64).collect();
    let defect = rough_defect_by(indices.len(), |a, b| dist(indices[a], indices[b]), &params)
        .expect("integer parameters are increasing");
    Ok(RoughParametrization { indices, params, defect, q, within: defect <= q })
}
