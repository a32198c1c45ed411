//! Chain searches over a finite candidate family of curtains.
//!
//! Separation among curtains is a strict partial order along each axis class,
//! so the longest chain with a given property is a longest path in the DAG
//! whose edges join curtains that come strictly one after the other.

use crate::curtain::backend::{Point, SpaceBackend};
use crate::curtain::dual::{footprints, Chain, Curtain, Footprint, Side};
use crate::error::CurtainError;

type Result<T> = std::result::Result<T, CurtainError>;

/// Longest chain among `members`, walking only edges `j → i` for which
/// `allowed(j, i)` holds. Returns member indices in chain order.
pub(crate) fn longest_chain(
    fps: &[Footprint],
    members: &[usize],
    mut allowed: impl FnMut(usize, usize) -> bool,
) -> Vec<usize> {
    if members.is_empty() {
        return Vec::new();
    }
    let mut order = members.to_vec();
    order.sort_by(|&a, &b| fps[a].class.cmp(&fps[b].class).then(fps[a].lo.total_cmp(&fps[b].lo)));
    let mut best = vec![1usize; order.len()];
    let mut prev = vec![usize::MAX; order.len()];
    for i in 0..order.len() {
        for j in 0..i {
            let (a, b) = (order[j], order[i]);
            if best[j] + 1 > best[i] && fps[a].precedes(&fps[b]) && allowed(a, b) {
                best[i] = best[j] + 1;
                prev[i] = j;
            }
        }
    }
    let mut end = 0;
    for i in 1..order.len() {
        if best[i] > best[end] {
            end = i;
        }
    }
    let mut chain = vec![order[end]];
    while prev[end] != usize::MAX {
        end = prev[end];
        chain.push(order[end]);
    }
    chain.reverse();
    chain
}

/// Length of the longest chain drawn from `candidates` whose every member
/// meets both `h1` and `h2`. This is a lower bound for the supremum over all
/// curtains of the space.
pub fn max_chain_meeting_both(
    backend: &SpaceBackend,
    h1: &Curtain,
    h2: &Curtain,
    candidates: &[Curtain],
) -> Result<usize> {
    let mut all = Vec::with_capacity(candidates.len() + 2);
    all.push(h1.clone());
    all.push(h2.clone());
    all.extend_from_slice(candidates);
    let fps = footprints(backend, &all)?;
    if fps[0].meets(&fps[1]) {
        return Err(CurtainError::NotDisjoint);
    }
    let members: Vec<usize> = (2..fps.len()).filter(|&k| fps[k].meets(&fps[0]) && fps[k].meets(&fps[1])).collect();
    Ok(longest_chain(&fps, &members, |_, _| true).len())
}

/// `true` iff no candidate chain of length above `l` meets both curtains.
/// A `true` answer holds relative to the candidate family; `false` is
/// unconditional.
pub fn is_l_separated(
    backend: &SpaceBackend,
    h1: &Curtain,
    h2: &Curtain,
    l: usize,
    candidates: &[Curtain],
) -> Result<bool> {
    Ok(max_chain_meeting_both(backend, h1, h2, candidates)? <= l)
}

/// Fixed-width bitset over the candidate family.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and_members(&self, other: &Bits) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (a, b)) in self.0.iter().zip(&other.0).enumerate() {
            let mut word = a & b;
            while word != 0 {
                let bit = word.trailing_zeros() as usize;
                out.push(w * 64 + bit);
                word &= word - 1;
            }
        }
        out
    }
}

/// Precomputed state for the `L`-chain searches between two points.
///
/// Holds the candidates separating `x` from `y` and, for every ordered pair
/// of them, the longest family chain meeting both. The `L`-chains for any
/// `L` then come from one longest-path pass.
pub struct ChainSearch {
    fps: Vec<Footprint>,
    separating: Vec<usize>,
    // (j, i) -> longest chain meeting both, for j strictly before i
    meeting: std::collections::HashMap<(usize, usize), usize>,
    max_meeting: usize,
}

impl ChainSearch {
    pub fn new(backend: &SpaceBackend, x: &Point, y: &Point, candidates: &[Curtain]) -> Result<Self> {
        backend.check_point(x)?;
        backend.check_point(y)?;
        let fps = footprints(backend, candidates)?;
        let mut separating = Vec::new();
        for (k, h) in candidates.iter().enumerate() {
            let tx = backend.project_unchecked(h.base(), x);
            let ty = backend.project_unchecked(h.base(), y);
            let sx = crate::curtain::dual::classify(h, tx);
            let sy = crate::curtain::dual::classify(h, ty);
            if matches!((sx, sy), (Side::Minus, Side::Plus) | (Side::Plus, Side::Minus)) {
                separating.push(k);
            }
        }
        let m = fps.len();
        let rows: Vec<Bits> = separating
            .iter()
            .map(|&s| {
                let mut b = Bits::new(m);
                for c in 0..m {
                    if fps[c].meets(&fps[s]) {
                        b.set(c);
                    }
                }
                b
            })
            .collect();
        let mut meeting = std::collections::HashMap::new();
        let mut max_meeting = 0;
        for (a, &j) in separating.iter().enumerate() {
            for (b, &i) in separating.iter().enumerate() {
                if !fps[j].precedes(&fps[i]) {
                    continue;
                }
                let both = rows[a].and_members(&rows[b]);
                let len = if both.len() <= 1 { both.len() } else { longest_chain(&fps, &both, |_, _| true).len() };
                max_meeting = max_meeting.max(len);
                meeting.insert((j, i), len);
            }
        }
        Ok(ChainSearch { fps, separating, meeting, max_meeting })
    }

    /// Number of candidates separating the two points.
    pub fn separating_count(&self) -> usize {
        self.separating.len()
    }

    /// Largest meeting-both chain length over adjacent pairs; for `L` at or
    /// above it the `L`-chain search no longer depends on `L`.
    pub fn saturation_level(&self) -> usize {
        self.max_meeting
    }

    /// Indices (into the candidate list) of a longest `L`-chain separating the
    /// two points.
    pub fn longest(&self, l: usize) -> Vec<usize> {
        longest_chain(&self.fps, &self.separating, |j, i| self.meeting.get(&(j, i)).is_some_and(|&v| v <= l))
    }
}

/// A longest chain from `candidates` separating `x` from `y` whose adjacent
/// curtains are `L`-separated relative to the family.
pub fn longest_l_chain_separating(
    backend: &SpaceBackend,
    x: &Point,
    y: &Point,
    l: usize,
    candidates: &[Curtain],
) -> Result<Chain> {
    if x == y {
        return Ok(Chain::empty());
    }
    let search = ChainSearch::new(backend, x, y, candidates)?;
    let idx = search.longest(l);
    Ok(Chain::from_trusted(idx.into_iter().map(|k| candidates[k].clone()).collect()))
}
