use serde::{Deserialize, Serialize};

use crate::curtain::backend::{GeodesicSegment, Point, SpaceBackend};
use crate::error::CurtainError;

type Result<T> = std::result::Result<T, CurtainError>;

/// Cosine threshold above which two Euclidean directions count as parallel.
const PARALLEL_COS: f64 = 1.0 - 1e-12;
// relative slack under which interval endpoints count as touching
const TOUCH: f64 = 1e-9;

fn strictly_before(hi: f64, lo: f64) -> bool {
    hi < lo - TOUCH * (1.0 + hi.abs().max(lo.abs()))
}

/// The curtain dual to a geodesic at `r`: all points whose closest-point
/// projection onto the base lands in the pole `[r − ½, r + ½]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curtain {
    base: GeodesicSegment,
    r: f64,
}

/// Reproducible description of a curtain: base endpoints and pole centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurtainSpec {
    pub a: Point,
    pub b: Point,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Minus,
    On,
    Plus,
}

/// Builds the curtain dual to `geodesic` at `r`; the pole must lie in the
/// interior of the parameter interval.
pub fn curtain_dual(geodesic: &GeodesicSegment, r: f64) -> Result<Curtain> {
    let (lo, hi, len) = (r - 0.5, r + 0.5, geodesic.length());
    if !(r.is_finite() && lo > 0.0 && hi < len) {
        return Err(CurtainError::PoleOutsideInterior { lo, hi, len });
    }
    Ok(Curtain { base: geodesic.clone(), r })
}

impl Curtain {
    pub fn base(&self) -> &GeodesicSegment {
        &self.base
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn pole(&self) -> (f64, f64) {
        (self.r - 0.5, self.r + 0.5)
    }

    pub fn spec(&self) -> CurtainSpec {
        CurtainSpec { a: self.base.start().clone(), b: self.base.end().clone(), r: self.r }
    }

    pub fn from_spec(backend: &SpaceBackend, spec: &CurtainSpec) -> Result<Self> {
        let base = backend.geodesic(&spec.a, &spec.b)?;
        curtain_dual(&base, spec.r)
    }

    pub fn contains(&self, backend: &SpaceBackend, p: &Point) -> Result<bool> {
        Ok(side_of(backend, self, p)? == Side::On)
    }
}

/// Which of `h⁻`, `h`, `h⁺` contains `p`.
pub fn side_of(backend: &SpaceBackend, curtain: &Curtain, p: &Point) -> Result<Side> {
    let t = backend.project(&curtain.base, p)?;
    Ok(classify(curtain, t))
}

pub(crate) fn classify(curtain: &Curtain, t: f64) -> Side {
    let (lo, hi) = curtain.pole();
    if t < lo {
        Side::Minus
    } else if t > hi {
        Side::Plus
    } else {
        Side::On
    }
}

/// `true` iff `x` and `y` lie in opposite open halfspaces of the curtain.
pub fn separates_points(backend: &SpaceBackend, curtain: &Curtain, x: &Point, y: &Point) -> Result<bool> {
    let sx = side_of(backend, curtain, x)?;
    let sy = side_of(backend, curtain, y)?;
    Ok(matches!((sx, sy), (Side::Minus, Side::Plus) | (Side::Plus, Side::Minus)))
}

/// Where a curtain sits relative to a family-wide axis.
///
/// Curtains in the same class are slabs over a common line, so set-level
/// questions reduce to comparing their intervals. Curtains in different
/// classes are transverse: they always meet and never separate each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub class: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Footprint {
    pub fn meets(&self, other: &Footprint) -> bool {
        self.class != other.class || !(strictly_before(self.hi, other.lo) || strictly_before(other.hi, self.lo))
    }

    /// Strictly before `other` along their shared axis.
    pub fn precedes(&self, other: &Footprint) -> bool {
        self.class == other.class && strictly_before(self.hi, other.lo)
    }

    pub fn disjoint(&self, other: &Footprint) -> bool {
        !self.meets(other)
    }

    /// `self` separates `a` from `b` (in either order).
    pub fn separates(&self, a: &Footprint, b: &Footprint) -> bool {
        (a.precedes(self) && self.precedes(b)) || (b.precedes(self) && self.precedes(a))
    }
}

enum Axis {
    Line(Vec<f64>),
    TreeBase(Point, Point),
}

/// Assigns axis classes and intervals to a list of curtains.
pub fn footprints(backend: &SpaceBackend, curtains: &[Curtain]) -> Result<Vec<Footprint>> {
    let mut axes: Vec<Axis> = Vec::new();
    let mut out = Vec::with_capacity(curtains.len());
    for h in curtains {
        let (lo, hi) = h.pole();
        match backend {
            SpaceBackend::Euclidean { .. } => {
                let u = h.base.direction().ok_or_else(|| CurtainError::InvalidBackend("degenerate base".into()))?;
                let canon = canonical_direction(u);
                let sign: f64 = u.iter().zip(&canon).map(|(a, b)| a * b).sum();
                let a = h.base.start().coords().expect("euclidean point");
                let offset: f64 = a.iter().zip(&canon).map(|(x, c)| x * c).sum();
                let (c_lo, c_hi) = if sign > 0.0 { (offset + lo, offset + hi) } else { (offset - hi, offset - lo) };
                let class = axes
                    .iter()
                    .position(|ax| match ax {
                        Axis::Line(v) => v.iter().zip(&canon).map(|(x, y)| x * y).sum::<f64>() >= PARALLEL_COS,
                        Axis::TreeBase(..) => false,
                    })
                    .unwrap_or_else(|| {
                        axes.push(Axis::Line(canon));
                        axes.len() - 1
                    });
                out.push(Footprint { class, lo: c_lo, hi: c_hi });
            }
            SpaceBackend::Tree(_) => {
                let (a, b, len) = (h.base.start(), h.base.end(), h.base.length());
                let mut found = None;
                for (k, ax) in axes.iter().enumerate() {
                    if let Axis::TreeBase(pa, pb) = ax {
                        if pa == a && pb == b {
                            found = Some((k, lo, hi));
                        } else if pa == b && pb == a {
                            found = Some((k, len - hi, len - lo));
                        }
                    }
                }
                let (class, lo, hi) = match found {
                    Some(f) => f,
                    None if axes.is_empty() => {
                        axes.push(Axis::TreeBase(a.clone(), b.clone()));
                        (0, lo, hi)
                    }
                    None => return Err(CurtainError::IncomparableBases),
                };
                out.push(Footprint { class, lo, hi });
            }
        }
    }
    Ok(out)
}

fn canonical_direction(u: &[f64]) -> Vec<f64> {
    let lead = u.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if lead < 0.0 {
        u.iter().map(|x| -x).collect()
    } else {
        u.to_vec()
    }
}

/// `true` iff the two curtains have a common point.
pub fn curtains_meet(backend: &SpaceBackend, a: &Curtain, b: &Curtain) -> Result<bool> {
    let f = footprints(backend, &[a.clone(), b.clone()])?;
    Ok(f[0].meets(&f[1]))
}

/// `true` iff every interior curtain separates its neighbours and adjacent
/// curtains are disjoint.
pub fn is_chain(backend: &SpaceBackend, curtains: &[Curtain]) -> Result<bool> {
    let f = footprints(backend, curtains)?;
    Ok(footprints_form_chain(&f))
}

pub(crate) fn footprints_form_chain(f: &[Footprint]) -> bool {
    f.windows(2).all(|w| w[0].disjoint(&w[1])) && f.windows(3).all(|w| w[1].separates(&w[0], &w[2]))
}

/// An ordered sequence of curtains, each separating its neighbours.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Chain {
    curtains: Vec<Curtain>,
}

impl Chain {
    pub fn new(backend: &SpaceBackend, curtains: Vec<Curtain>) -> Result<Self> {
        if !is_chain(backend, &curtains)? {
            return Err(CurtainError::NotDisjoint);
        }
        Ok(Chain { curtains })
    }

    pub(crate) fn from_trusted(curtains: Vec<Curtain>) -> Self {
        Chain { curtains }
    }

    pub fn empty() -> Self {
        Chain::default()
    }

    pub fn len(&self) -> usize {
        self.curtains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curtains.is_empty()
    }

    pub fn curtains(&self) -> &[Curtain] {
        &self.curtains
    }
}
