//! Minimal constants for the guessing-geodesics hypotheses and the
//! thinness/four-point quantities of a finite path system.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{self, HyperbolicityBounds, QuasiParams, Route};
use crate::error::MetricError;
use crate::metric::paths::PathSystem;
use crate::metric::space::FiniteMetricSpace;

/// Largest gap between consecutive points of `path`; 0 for a single point.
pub fn min_coarse_connectivity(path: &[usize], space: &FiniteMetricSpace) -> Result<f64, MetricError> {
    if path.is_empty() {
        return Err(MetricError::EmptyPath);
    }
    for &p in path {
        space.check_index(p)?;
    }
    Ok(path.windows(2).map(|w| space.d(w[0], w[1])).fold(0.0, f64::max))
}

/// Smallest `D` with `diam η(x, y) ≤ D·d(x, y)/2` for every pair at positive
/// distance.
pub fn g1_constant(system: &PathSystem, space: &FiniteMetricSpace) -> f64 {
    system
        .pairs()
        .filter(|&(x, y, _)| space.d(x, y) > 0.0)
        .map(|(x, y, path)| 2.0 * space.diameter(path) / space.d(x, y))
        .fold(0.0, f64::max)
}

/// Smallest `D` such that every contiguous subpath `η(x,y)[s..=t]` is within
/// Hausdorff distance `D` of the re-guessed path `η(η(x,y)[s], η(x,y)[t])`.
pub fn g2_constant(system: &PathSystem, space: &FiniteMetricSpace) -> f64 {
    let pairs: Vec<(usize, usize)> = system.pairs().map(|(x, y, _)| (x, y)).collect();
    pairs
        .par_iter()
        .map(|&(x, y)| {
            let path = system.path(x, y);
            let mut worst = 0.0f64;
            for s in 0..path.len() {
                for t in (s + 1)..path.len() {
                    let guessed = system.path(path[s], path[t]);
                    worst = worst.max(space.hausdorff(&path[s..=t], guessed));
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

fn side_excess(space: &FiniteMetricSpace, side: &[usize], others: &[&[usize]]) -> f64 {
    side.iter()
        .map(|&p| others.iter().map(|o| space.point_to_set(p, o.iter().copied())).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Smallest `D` with `η(x, y) ⊂ N_D(η(x, z) ∪ η(z, y))` over all ordered
/// triples.
pub fn g3_constant(system: &PathSystem, space: &FiniteMetricSpace) -> f64 {
    let n = system.len();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let mut worst = 0.0f64;
            for y in 0..n {
                for z in 0..n {
                    let others = [system.path(x, z), system.path(z, y)];
                    worst = worst.max(side_excess(space, system.path(x, y), &others));
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Smallest `δ′` for which every triangle of system paths has each side in
/// the `δ′`-neighbourhood of the other two.
pub fn thin_triangle_constant(system: &PathSystem, space: &FiniteMetricSpace) -> f64 {
    let n = system.len();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut worst = 0.0f64;
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let sides = [system.path(a, b), system.path(b, c), system.path(c, a)];
                    for i in 0..3 {
                        let others = [sides[(i + 1) % 3], sides[(i + 2) % 3]];
                        worst = worst.max(side_excess(space, sides[i], &others));
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Smallest `ε` for which every quadrilateral of system paths, over all
/// ordered vertex 4-tuples, has each side in the `ε`-neighbourhood of the
/// other three.
pub fn thin_quadrilateral_constant(system: &PathSystem, space: &FiniteMetricSpace) -> f64 {
    let n = system.len();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut worst = 0.0f64;
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let sides =
                            [system.path(a, b), system.path(b, c), system.path(c, d), system.path(d, a)];
                        for i in 0..4 {
                            let others = [sides[(i + 1) % 4], sides[(i + 2) % 4], sides[(i + 3) % 4]];
                            worst = worst.max(side_excess(space, sides[i], &others));
                        }
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Largest pairing sum minus the runner-up for one quadruple.
#[inline]
pub fn quadruple_defect(space: &FiniteMetricSpace, x: usize, y: usize, z: usize, w: usize) -> f64 {
    let mut s = [
        space.d(x, y) + space.d(z, w),
        space.d(x, z) + space.d(y, w),
        space.d(x, w) + space.d(y, z),
    ];
    s.sort_by(f64::total_cmp);
    s[2] - s[1]
}

/// Exact four-point constant: the minimal `δ` with
/// `d(x,z) + d(y,w) ≤ max{d(x,w) + d(y,z), d(x,y) + d(z,w)} + δ` for all
/// quadruples. Zero below four points.
pub fn four_point_delta_exact(space: &FiniteMetricSpace) -> f64 {
    let n = space.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in (k + 1)..n {
                        worst = worst.max(quadruple_defect(space, i, j, k, l));
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// The least `q` for which `path` with parameters `params` is a
/// `(1, q)`-quasi-geodesic: `max |d(pᵢ, pⱼ) − |tᵢ − tⱼ||`.
pub fn rough_geodesic_defect(
    path: &[usize],
    space: &FiniteMetricSpace,
    params: &[f64],
) -> Result<f64, MetricError> {
    for &p in path {
        space.check_index(p)?;
    }
    rough_defect_by(path.len(), |i, j| space.d(path[i], path[j]), params)
}

/// Rough-geodesic defect of `len` points whose pairwise distances come from
/// `dist`; the distances need not satisfy the metric axioms.
pub fn rough_defect_by(len: usize, dist: impl Fn(usize, usize) -> f64, params: &[f64]) -> Result<f64, MetricError> {
    if len != params.len() {
        return Err(MetricError::LengthMismatch { path: len, params: params.len() });
    }
    if params.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(MetricError::NotIncreasing);
    }
    let mut worst = 0.0f64;
    for i in 0..len {
        for j in (i + 1)..len {
            worst = worst.max((dist(i, j) - (params[j] - params[i]).abs()).abs());
        }
    }
    Ok(worst)
}

/// Arc-length parameters along a path: cumulative sums of consecutive gaps.
///
/// Zero-length steps are nudged by `1e-12` to keep the sequence strictly
/// increasing.
pub fn arc_length_params(path: &[usize], space: &FiniteMetricSpace) -> Vec<f64> {
    let mut out = Vec::with_capacity(path.len());
    let mut t = 0.0;
    for (k, &p) in path.iter().enumerate() {
        if k > 0 {
            t += space.d(path[k - 1], p).max(1e-12);
        }
        out.push(t);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierReport {
    pub coarse_c: f64,
    #[serde(rename = "D_g1")]
    pub d_g1: f64,
    #[serde(rename = "D_g2")]
    pub d_g2: f64,
    #[serde(rename = "D_g3")]
    pub d_g3: f64,
    #[serde(rename = "D_combined")]
    pub d_combined: f64,
    pub delta_four_exact: f64,
    pub thin_triangle: f64,
    pub thin_quad: f64,
    pub certified: HyperbolicityBounds,
    /// `delta_four_exact ≤ certified.delta`.
    pub within_bound: bool,
}

/// Measures every hypothesis constant, feeds `D_combined` with the rough
/// constant `q` to the fixed-point route, and compares the exact four-point
/// constant with the certified one.
pub fn certify(system: &PathSystem, space: &FiniteMetricSpace, q: f64) -> Result<VerifierReport, MetricError> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(crate::error::ConstantsError::Domain(format!("q = {q} must be ≥ 1")).into());
    }
    if system.len() != space.len() {
        return Err(MetricError::LabelMismatch { labels: system.len(), size: space.len() });
    }
    if system.pairs().next().is_none() {
        return Err(MetricError::EmptySystem);
    }
    let mut coarse_c = 0.0f64;
    for (_, _, path) in system.pairs() {
        coarse_c = coarse_c.max(min_coarse_connectivity(path, space)?);
    }
    let d_g1 = g1_constant(system, space);
    let d_g2 = g2_constant(system, space);
    let d_g3 = g3_constant(system, space);
    let d_combined = coarse_c.max(d_g1).max(d_g2).max(d_g3);
    if d_combined <= 0.0 {
        // every pair coincides; D must still be positive
        return Err(MetricError::EmptySystem);
    }
    let params = QuasiParams::rough(q, d_combined)?;
    let kappa = constants::solve_kappa(&params, constants::DEFAULT_TOLERANCE)?;
    let certified = HyperbolicityBounds::from_kappa(&params, kappa, Route::FixedPoint)?;
    let delta_four_exact = four_point_delta_exact(space);
    let within_bound = certified.delta.is_some_and(|d| delta_four_exact <= d);
    Ok(VerifierReport {
        coarse_c,
        d_g1,
        d_g2,
        d_g3,
        d_combined,
        delta_four_exact,
        thin_triangle: thin_triangle_constant(system, space),
        thin_quad: thin_quadrilateral_constant(system, space),
        certified,
        within_bound,
    })
}
