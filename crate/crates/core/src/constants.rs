//! Closed-form hyperbolicity constants.
//!
//! Everything here is a pure function of a [`QuasiParams`] triple: the control
//! function `f`, the fixed point `κ` where `f` is overtaken by the identity,
//! the explicit estimates `κₙ`, and the resulting thin-triangle constant `δ′`
//! and four-point constant `δ = 56δ′ + 6q`.

use serde::{Deserialize, Serialize};

use crate::error::ConstantsError;

/// Default relative tolerance for [`solve_kappa`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Bisection iteration cap for [`solve_kappa`].
pub const MAX_ITERATIONS: usize = 200;

const MAX_DOUBLINGS: usize = 200;

type Result<T> = std::result::Result<T, ConstantsError>;

/// Quasi-geodesic constants `(q₁, q₂)` together with the guessing-geodesics
/// constant `D`.
///
/// A `(1, q)`-quasi-geodesic is a `q`-rough geodesic; such spaces are built
/// with [`QuasiParams::rough`] and report `is_rough() == true`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiParams {
    pub q1: f64,
    pub q2: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

impl QuasiParams {
    pub fn new(q1: f64, q2: f64, d: f64) -> Result<Self> {
        let p = QuasiParams { q1, q2, d };
        p.validate()?;
        Ok(p)
    }

    /// `(1, q, D)`.
    pub fn rough(q: f64, d: f64) -> Result<Self> {
        Self::new(1.0, q, d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q1.is_finite() && self.q1 >= 1.0) {
            return Err(ConstantsError::InvalidParams(format!("q1 = {} must be ≥ 1", self.q1)));
        }
        if !(self.q2.is_finite() && self.q2 >= 0.0) {
            return Err(ConstantsError::InvalidParams(format!("q2 = {} must be ≥ 0", self.q2)));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(ConstantsError::InvalidParams(format!("D = {} must be > 0", self.d)));
        }
        Ok(())
    }

    pub fn is_rough(&self) -> bool {
        self.q1 == 1.0
    }

    /// `max{q₁, q₂}`, the single constant used by the `κₙ` estimates.
    pub fn q_max(&self) -> f64 {
        self.q1.max(self.q2)
    }
}

/// The control function `f`, without argument checks.
fn control(p: &QuasiParams, x: f64) -> f64 {
    let q1_cubed = p.q1 * p.q1 * p.q1;
    let arg = 8.0 * x * q1_cubed + 7.0 * q1_cubed * p.q2 + 2.0 * p.d * p.q1;
    p.d * arg.log2() + 0.5 * (p.q1 + p.q2) * p.d + p.d
}

/// `f(x) = D·log₂(8xq₁³ + 7q₁³q₂ + 2Dq₁) + ½(q₁+q₂)D + D`.
///
/// With `q₁ = 1, q₂ = 0` this is `D·log₂(8x + 2D) + 3D/2`.
pub fn eval_f(params: &QuasiParams, x: f64) -> Result<f64> {
    params.validate()?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(ConstantsError::Domain(format!("x = {x} must be a finite nonnegative number")));
    }
    Ok(control(params, x))
}

/// How a `κ` value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum KappaMethod {
    /// Bisection on `f(x) − x`.
    FixedPoint,
    /// The explicit estimate `κₙ = Kₙ·q·D^{1+εₙ}`.
    KappaN { n: u32 },
    /// `f(x) ≤ x` already holds on all of `[0, ∞)`, so `κ` is `f(0)` (clamped at 0).
    DirectBound,
}

/// A sampled point with the recorded value of `f(x) − x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub excess: f64,
}

/// A `κ` value together with numerical evidence that `f` stays below the
/// identity beyond it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaCertificate {
    pub kappa: f64,
    pub method: KappaMethod,
    /// `|f(κ) − κ|` for the fixed-point route, zero otherwise.
    pub residual: f64,
    pub witness_grid: Vec<Witness>,
}

impl KappaCertificate {
    /// Re-evaluates `f` on the recorded grid and at `κ` itself.
    pub fn verify(&self, params: &QuasiParams) -> bool {
        if control(params, self.kappa) > self.kappa + self.residual {
            return false;
        }
        self.witness_grid.iter().all(|w| {
            let excess = control(params, w.x) - w.x;
            (excess - w.excess).abs() <= 1e-9 * w.x.abs().max(1.0) && (w.x < self.kappa || excess < 0.0)
        })
    }

    /// A value `f(z)` with `f(x) < x` for every `x ≥ z`, taking `z` just past
    /// the recorded crossing.
    pub fn strict_member(&self, params: &QuasiParams, tolerance: f64) -> f64 {
        let z = self.kappa + tolerance * self.kappa.max(1.0);
        control(params, z)
    }
}

fn witness(params: &QuasiParams, x: f64) -> Witness {
    Witness { x, excess: control(params, x) - x }
}

fn grid_beyond(params: &QuasiParams, kappa: f64, below: &[f64]) -> Vec<Witness> {
    let mut xs: Vec<f64> = below.iter().copied().filter(|x| *x >= 0.0 && *x < kappa).collect();
    for t in [1.0, 10.0, 100.0, 1000.0] {
        xs.push(kappa + t);
    }
    xs.push(2.0 * kappa.max(1.0));
    xs.push(10.0 * kappa.max(1.0));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.into_iter().map(|x| witness(params, x)).collect()
}

/// Finds the crossing of `f` with the identity.
///
/// `tolerance` is relative: on success `|f(κ) − κ| ≤ tolerance·max(1, κ)` and
/// `f(κ) ≤ κ`, so the returned value sits on the safe side of the crossing.
pub fn solve_kappa(params: &QuasiParams, tolerance: f64) -> Result<KappaCertificate> {
    params.validate()?;
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(ConstantsError::Domain(format!("tolerance = {tolerance} must be positive")));
    }
    let g = |x: f64| control(params, x) - x;

    let mut lo = 0.0;
    if g(lo) <= 0.0 {
        // f is concave, so f(x) − x peaks where f′(x) = 1.
        let q1_cubed = params.q1.powi(3);
        let c = 7.0 * q1_cubed * params.q2 + 2.0 * params.d * params.q1;
        let peak = params.d / std::f64::consts::LN_2 - c / (8.0 * q1_cubed);
        if peak > 0.0 && g(peak) > 0.0 {
            lo = peak;
        } else {
            let kappa = control(params, 0.0).max(0.0);
            return Ok(KappaCertificate {
                kappa,
                method: KappaMethod::DirectBound,
                residual: 0.0,
                witness_grid: grid_beyond(params, kappa, &[]),
            });
        }
    }

    let mut hi = f64::NAN;
    if params.q_max() >= 1.0 && params.d >= 1.0 {
        let k8 = explicit_kappa(params.q_max(), params.d, 8);
        if k8 > lo && g(k8) <= 0.0 {
            hi = k8;
        }
    }
    if hi.is_nan() {
        hi = (2.0 * lo).max(1.0);
        let mut doublings = 0;
        while g(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS || !hi.is_finite() {
                return Err(ConstantsError::NoConvergence { iterations: doublings, lo, hi });
            }
        }
    }

    let below = [0.5 * lo, lo];
    let mut iterations = 0;
    while hi - lo > tolerance * hi.max(1.0) {
        if iterations == MAX_ITERATIONS {
            return Err(ConstantsError::NoConvergence { iterations, lo, hi });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(ConstantsError::NoConvergence { iterations, lo, hi });
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    Ok(KappaCertificate {
        kappa: hi,
        method: KappaMethod::FixedPoint,
        residual: g(hi).abs(),
        witness_grid: grid_beyond(params, hi, &below),
    })
}

/// `Kₙ` and `εₙ` of the explicit `κₙ` estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaTerms {
    pub n: u32,
    pub k: f64,
    pub eps: f64,
}

pub fn kappa_terms(n: u32) -> KappaTerms {
    let l = (f64::from(n) + 8.0).log2();
    let k = l + 9.0 + (1.0 + (l + 9.0).log2()).ceil();
    KappaTerms { n, k, eps: 1.0 / l }
}

fn explicit_kappa(q: f64, d: f64, n: u32) -> f64 {
    let t = kappa_terms(n);
    t.k * q * d.powf(1.0 + t.eps)
}

fn check_kappa_hypothesis(q: f64, d: f64) -> Result<()> {
    if q >= 1.0 && d >= 1.0 {
        Ok(())
    } else {
        Err(ConstantsError::KappaHypothesis { q, d })
    }
}

/// `κₙ = Kₙ·q·D^{1+εₙ}` with `q = max{q₁, q₂}`; requires `q, D ≥ 1`.
pub fn kappa_n(params: &QuasiParams, n: u32) -> Result<KappaCertificate> {
    params.validate()?;
    if n == 0 {
        return Err(ConstantsError::Domain("n must be a positive integer".into()));
    }
    let q = params.q_max();
    check_kappa_hypothesis(q, params.d)?;
    let kappa = explicit_kappa(q, params.d, n);
    let value = control(params, kappa);
    if value > kappa {
        return Err(ConstantsError::CertificateFailed { kappa, value });
    }
    let mut grid = vec![witness(params, kappa)];
    grid.extend([1.0, 10.0, 100.0].iter().map(|t| witness(params, kappa + t)));
    Ok(KappaCertificate { kappa, method: KappaMethod::KappaN { n }, residual: 0.0, witness_grid: grid })
}

/// `δ′ = 2(q₁²/2·(2κ + D + q₂) + q₂ + κ) + D`; for `q₁ = 1` this is
/// `4κ + 2D + 3q₂`.
pub fn delta_prime(params: &QuasiParams, kappa: f64) -> Result<f64> {
    params.validate()?;
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(ConstantsError::Domain(format!("κ = {kappa} must be nonnegative")));
    }
    let QuasiParams { q1, q2, d } = *params;
    Ok(2.0 * (0.5 * q1 * q1 * (2.0 * kappa + d + q2) + q2 + kappa) + d)
}

/// Four-point constant of a `q`-rough geodesic space whose rough-geodesic
/// triangles are `δ′`-thin.
pub fn delta_from_delta_prime(q: f64, delta_prime: f64) -> f64 {
    56.0 * delta_prime + 6.0 * q
}

/// Which formula produced a [`HyperbolicityBounds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    FixedPoint,
    KappaN,
    TheoremB,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub params: QuasiParams,
    pub kappa: KappaCertificate,
    pub route: Route,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityBounds {
    pub delta_prime: f64,
    /// Only available for rough parameters (`q₁ = 1`); the four-point
    /// conversion is not established otherwise.
    pub delta: Option<f64>,
    pub provenance: Provenance,
}

impl HyperbolicityBounds {
    /// Composes `δ′` from a `κ` certificate and, for rough params, `δ`.
    pub fn from_kappa(params: &QuasiParams, kappa: KappaCertificate, route: Route) -> Result<Self> {
        let dp = delta_prime(params, kappa.kappa)?;
        let delta = params.is_rough().then(|| delta_from_delta_prime(params.q2, dp));
        Ok(HyperbolicityBounds {
            delta_prime: dp,
            delta,
            provenance: Provenance { params: *params, kappa, route },
        })
    }
}

/// `δ′ = 72qD^{5/4} + 2D + 3q` and `δ = 56δ′ + 6q`; requires `q, D ≥ 1`.
pub fn theorem_b_bounds(q: f64, d: f64) -> Result<HyperbolicityBounds> {
    let params = QuasiParams::rough(q, d)?;
    check_kappa_hypothesis(q, d)?;
    let kappa = kappa_n(&params, 8)?;
    let delta_prime = 72.0 * q * d.powf(1.25) + 2.0 * d + 3.0 * q;
    Ok(HyperbolicityBounds {
        delta_prime,
        delta: Some(delta_from_delta_prime(q, delta_prime)),
        provenance: Provenance { params, kappa, route: Route::TheoremB },
    })
}

/// Parameters of the curtain model with normalisation `Λ`:
/// `(1, max{6Λ, 1} + 1, 125Λ)`.
pub fn curtain_model_params(lambda: f64) -> Result<QuasiParams> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(ConstantsError::Domain(format!("Λ = {lambda} must be positive")));
    }
    QuasiParams::rough((6.0 * lambda).max(1.0) + 1.0, 125.0 * lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaRow {
    pub n: u32,
    pub k: f64,
    pub eps: f64,
    pub kappa: f64,
    pub running_min: f64,
    pub argmin: u32,
}

/// `κₙ` for `n = 1..=n_max` with the running minimum.
pub fn kappa_table(q: f64, d: f64, n_max: u32) -> Result<Vec<KappaRow>> {
    check_kappa_hypothesis(q, d)?;
    if n_max == 0 {
        return Err(ConstantsError::Domain("n_max must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(n_max as usize);
    let (mut best, mut argmin) = (f64::INFINITY, 0);
    for n in 1..=n_max {
        let t = kappa_terms(n);
        let kappa = t.k * q * d.powf(1.0 + t.eps);
        if kappa < best {
            best = kappa;
            argmin = n;
        }
        rows.push(KappaRow { n, k: t.k, eps: t.eps, kappa, running_min: best, argmin });
    }
    Ok(rows)
}

/// Three significant figures in scientific notation, e.g. `5.27e4`.
pub fn sci3(x: f64) -> String {
    format!("{x:.2e}")
}
