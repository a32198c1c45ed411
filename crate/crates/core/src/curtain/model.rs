//! The `L`-metrics and their weighted sum, the curtain model distance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curtain::backend::{Point, SpaceBackend};
use crate::curtain::chains::ChainSearch;
use crate::curtain::dual::{curtain_dual, Curtain};
use crate::error::CurtainError;

type Result<T> = std::result::Result<T, CurtainError>;

pub const DEFAULT_L_MAX: usize = 20;
pub const DEFAULT_GRID_STEP: f64 = 0.25;

/// `λ_L = 2^{−L}/6`, so that `Σλ = 1/6`, `ΣLλ = 1/3` and `ΣL²λ = 1`.
pub fn default_lambda(l: usize) -> f64 {
    0.5f64.powi(l as i32) / 6.0
}

/// The weights `λ_L` of the curtain model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSequence {
    /// [`default_lambda`], with `Λ = 1`.
    HalfPowers,
    /// `weights[L − 1] = λ_L` for the listed levels; `tail` bounds
    /// `Σ_{L > len} λ_L` and `normalization` is the full `Λ = ΣL²λ_L`.
    Explicit { weights: Vec<f64>, tail: f64, normalization: f64 },
}

impl WeightSequence {
    pub fn lambda(&self, l: usize) -> f64 {
        match self {
            WeightSequence::HalfPowers => default_lambda(l),
            WeightSequence::Explicit { weights, .. } => weights.get(l.wrapping_sub(1)).copied().unwrap_or(0.0),
        }
    }

    /// `Σ_{L > l_max} λ_L` (an upper bound for explicit sequences).
    pub fn tail(&self, l_max: usize) -> f64 {
        match self {
            WeightSequence::HalfPowers => 0.5f64.powi(l_max as i32) / 6.0,
            WeightSequence::Explicit { weights, tail, .. } => {
                weights.iter().skip(l_max).sum::<f64>() + tail
            }
        }
    }

    /// `Λ = Σ L²λ_L`.
    pub fn normalization(&self) -> f64 {
        match self {
            WeightSequence::HalfPowers => 1.0,
            WeightSequence::Explicit { normalization, .. } => *normalization,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let WeightSequence::Explicit { weights, tail, normalization } = self else {
            return Ok(());
        };
        if weights.is_empty() {
            return Err(CurtainError::InvalidWeights("no weights given".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0 && *w < 1.0)) {
            return Err(CurtainError::InvalidWeights("every λ_L must lie in (0, 1)".into()));
        }
        if !(tail.is_finite() && *tail >= 0.0) {
            return Err(CurtainError::InvalidWeights(format!("tail {tail} must be nonnegative")));
        }
        let (s0, s1, s2) = moments(weights);
        if !(s0 < s1 && s1 < s2) {
            return Err(CurtainError::InvalidWeights(format!(
                "need Σλ < ΣLλ < ΣL²λ, got {s0} / {s1} / {s2}"
            )));
        }
        if !(normalization.is_finite() && *normalization >= s2) {
            return Err(CurtainError::InvalidWeights(format!(
                "Λ = {normalization} is below the partial sum {s2}"
            )));
        }
        Ok(())
    }
}

/// `(Σλ, ΣLλ, ΣL²λ)` over the listed weights.
pub fn moments(weights: &[f64]) -> (f64, f64, f64) {
    weights.iter().enumerate().fold((0.0, 0.0, 0.0), |(a, b, c), (k, w)| {
        let l = (k + 1) as f64;
        (a + w, b + l * w, c + l * l * w)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurtainModelConfig {
    pub weights: WeightSequence,
    pub l_max: usize,
}

impl Default for CurtainModelConfig {
    fn default() -> Self {
        CurtainModelConfig { weights: WeightSequence::HalfPowers, l_max: DEFAULT_L_MAX }
    }
}

impl CurtainModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l_max == 0 {
            return Err(CurtainError::InvalidConfig("L_max must be at least 1".into()));
        }
        self.weights.validate()
    }

    #[allow(non_snake_case)]
    pub fn Lambda(&self) -> f64 {
        self.weights.normalization()
    }
}

/// How the candidate curtains for a pair of points are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateConfig {
    /// Pole spacing for curtains dual to the geodesic `[x, y]`.
    pub grid_step: f64,
    /// Extra seeded curtains with random directions (Euclidean, dim ≥ 2).
    pub random_curtains: usize,
    pub seed: u64,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        CandidateConfig { grid_step: DEFAULT_GRID_STEP, random_curtains: 0, seed: 0 }
    }
}

/// Curtains dual to `[x, y]` at poles `r = k·step` with the pole interior to
/// the segment.
pub fn grid_candidates(backend: &SpaceBackend, x: &Point, y: &Point, step: f64) -> Result<Vec<Curtain>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(CurtainError::InvalidConfig(format!("grid step {step} must be positive")));
    }
    let seg = backend.geodesic(x, y)?;
    let mut out = Vec::new();
    let mut k = 1usize;
    loop {
        let r = k as f64 * step;
        if r + 0.5 >= seg.length() {
            break;
        }
        if r - 0.5 > 0.0 {
            out.push(curtain_dual(&seg, r)?);
        }
        k += 1;
    }
    Ok(out)
}

/// Curtains dual to `[x, y]` with poles centred at the midpoints of the tree
/// edges the geodesic crosses, where admissible.
pub fn edge_midpoint_candidates(backend: &SpaceBackend, x: &Point, y: &Point) -> Result<Vec<Curtain>> {
    let SpaceBackend::Tree(tree) = backend else {
        return Err(CurtainError::InvalidBackend("edge midpoints need a tree backend".into()));
    };
    let seg = backend.geodesic(x, y)?;
    let mut out = Vec::new();
    for &(u, v, len) in tree.edges() {
        let pu = Point::Tree(crate::curtain::backend::TreePoint::Vertex(u));
        let pv = Point::Tree(crate::curtain::backend::TreePoint::Vertex(v));
        let (tu, tv) = (backend.project_unchecked(&seg, &pu), backend.project_unchecked(&seg, &pv));
        // the edge lies on the geodesic iff its endpoints project a full edge apart
        if ((tu - tv).abs() - len).abs() <= 1e-9 {
            if let Ok(h) = curtain_dual(&seg, 0.5 * (tu + tv)) {
                out.push(h);
            }
        }
    }
    out.sort_by(|a, b| a.r().total_cmp(&b.r()));
    Ok(out)
}

/// Seeded curtains with uniformly random directions, centred on random points
/// of the box spanned by `x` and `y` (padded by 1).
pub fn random_candidates(
    backend: &SpaceBackend,
    x: &Point,
    y: &Point,
    count: usize,
    seed: u64,
) -> Result<Vec<Curtain>> {
    let (SpaceBackend::Euclidean { dim }, Point::Euclidean(a), Point::Euclidean(b)) = (backend, x, y) else {
        return Err(CurtainError::InvalidBackend("random curtains need a Euclidean backend".into()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.5 * backend.distance(x, y)? + 2.0;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let centre: Vec<f64> =
            a.iter().zip(b).map(|(p, q)| rng.gen_range(p.min(*q) - 1.0..=p.max(*q) + 1.0)).collect();
        let dir: Vec<f64> = (0..*dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let start = Point::Euclidean(centre.iter().zip(&dir).map(|(c, d)| c - half * d / norm).collect());
        let end = Point::Euclidean(centre.iter().zip(&dir).map(|(c, d)| c + half * d / norm).collect());
        let seg = backend.geodesic(&start, &end)?;
        out.push(curtain_dual(&seg, half)?);
    }
    Ok(out)
}

/// Candidate family for the pair `(x, y)` under `cfg`.
pub fn candidates_for(backend: &SpaceBackend, x: &Point, y: &Point, cfg: &CandidateConfig) -> Result<Vec<Curtain>> {
    let mut out = grid_candidates(backend, x, y, cfg.grid_step)?;
    if cfg.random_curtains > 0 {
        out.extend(random_candidates(backend, x, y, cfg.random_curtains, cfg.seed)?);
    }
    Ok(out)
}

/// Bounds on `d_L(x, y)` relative to a candidate family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DLBounds {
    pub l: usize,
    pub lower: f64,
    pub upper: f64,
    pub chain_len: usize,
    /// No candidate separates the points; `lower` is reported as 0.
    pub no_witness: bool,
}

impl DLBounds {
    /// `d_L` is an integer, so a lower bound equal to `⌊upper⌋` pins it.
    pub fn exact(&self) -> Option<u64> {
        (self.lower == self.upper.floor()).then_some(self.lower as u64)
    }
}

fn bounds_from_search(search: &ChainSearch, l: usize, d: f64) -> DLBounds {
    let chain_len = search.longest(l).len();
    let no_witness = chain_len == 0;
    let lower = if no_witness { 0.0 } else { (chain_len + 1) as f64 };
    let upper = (1.0 + d).min((search.separating_count() + 1) as f64);
    DLBounds { l, lower, upper, chain_len, no_witness }
}

/// Lower bound from the longest candidate `L`-chain, upper bound
/// `min(1 + d(x, y), #separating candidates + 1)`.
pub fn d_l_bounds(
    backend: &SpaceBackend,
    x: &Point,
    y: &Point,
    l: usize,
    candidates: &[Curtain],
) -> Result<DLBounds> {
    if x == y {
        backend.check_point(x)?;
        return Ok(DLBounds { l, lower: 0.0, upper: 0.0, chain_len: 0, no_witness: false });
    }
    let d = backend.distance(x, y)?;
    let search = ChainSearch::new(backend, x, y, candidates)?;
    Ok(bounds_from_search(&search, l, d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBounds {
    pub lower: f64,
    pub upper: f64,
    pub per_l: Vec<DLBounds>,
}

/// Brackets the curtain-model distance `Σ λ_L d_L(x, y)` using levels up to
/// `L_max` and the analytic weight tail.
pub fn curtain_distance_bounds(
    backend: &SpaceBackend,
    x: &Point,
    y: &Point,
    config: &CurtainModelConfig,
    candidates: &[Curtain],
) -> Result<DistanceBounds> {
    config.validate()?;
    if x == y {
        backend.check_point(x)?;
        return Ok(DistanceBounds { lower: 0.0, upper: 0.0, per_l: Vec::new() });
    }
    let d = backend.distance(x, y)?;
    let search = ChainSearch::new(backend, x, y, candidates)?;
    let saturation = search.saturation_level().max(1);
    let mut per_l = Vec::with_capacity(config.l_max);
    for l in 1..=config.l_max {
        let b = match per_l.last() {
            Some(&prev) if l > saturation => DLBounds { l, ..prev },
            _ => bounds_from_search(&search, l, d),
        };
        per_l.push(b);
    }
    let lower = per_l.iter().map(|b| config.weights.lambda(b.l) * b.lower).sum();
    let upper = per_l.iter().map(|b| config.weights.lambda(b.l) * b.upper).sum::<f64>()
        + config.weights.tail(config.l_max) * (1.0 + d);
    Ok(DistanceBounds { lower, upper, per_l })
}
