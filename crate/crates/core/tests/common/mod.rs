#![allow(dead_code)]

use hypconst::{FiniteMetricSpace, PathSystem};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

pub fn unit_square() -> FiniteMetricSpace {
    let s = 2f64.sqrt();
    FiniteMetricSpace::new(
        labels(4),
        vec![vec![0.0, 1.0, s, 1.0], vec![1.0, 0.0, 1.0, s], vec![s, 1.0, 0.0, 1.0], vec![1.0, s, 1.0, 0.0]],
    )
    .unwrap()
}

/// Random weighted tree on `n` vertices: parent list and edge weights.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Vec<(usize, usize, f64)> {
    (1..n).map(|v| (rng.gen_range(0..v), v, rng.gen_range(0.1..5.0))).collect()
}

/// Vertex distances and vertex paths of a tree, by depth-first search from
/// every vertex.
pub fn tree_metric(n: usize, edges: &[(usize, usize, f64)]) -> (Vec<Vec<f64>>, Vec<Vec<Vec<usize>>>) {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut dist = vec![vec![0.0; n]; n];
    let mut paths = vec![vec![Vec::new(); n]; n];
    for s in 0..n {
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &(v, w) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    dist[s][v] = dist[s][u] + w;
                    stack.push(v);
                }
            }
        }
        for (t, slot) in paths[s].iter_mut().enumerate() {
            let mut p = vec![t];
            while *p.last().unwrap() != s {
                p.push(parent[*p.last().unwrap()]);
            }
            p.reverse();
            *slot = p;
        }
    }
    (dist, paths)
}

pub fn tree_space(rng: &mut impl Rng, n: usize) -> (FiniteMetricSpace, PathSystem) {
    let edges = random_tree(rng, n);
    let (dist, paths) = tree_metric(n, &edges);
    let space = FiniteMetricSpace::new(labels(n), dist).unwrap();
    let system = PathSystem::from_fn(&space, |x, y| paths[x][y].clone()).unwrap();
    (space, system)
}

pub fn random_points(rng: &mut impl Rng, n: usize, dim: usize, side: f64) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0.0..side)).collect()).collect()
}

/// Paths through up to `extra` random intermediate points, in random order.
pub fn random_system(rng: &mut impl Rng, space: &FiniteMetricSpace, extra: usize) -> PathSystem {
    let n = space.len();
    PathSystem::from_fn(space, |x, y| {
        let mut mids: Vec<usize> = (0..n).filter(|&p| p != x && p != y).collect();
        mids.shuffle(rng);
        let k = rng.gen_range(0..=extra.min(mids.len()));
        let mut p = vec![x];
        p.extend_from_slice(&mids[..k]);
        p.push(y);
        p
    })
    .unwrap()
}

/// Four-point constant through Gromov products over all ordered quadruples:
/// `2 · max (min((x|z)_w, (z|y)_w) − (x|y)_w)`.
pub fn four_point_by_products(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let gp = |x: usize, y: usize, w: usize| 0.5 * (d[x][w] + d[y][w] - d[x][y]);
    let mut worst = 0.0f64;
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    worst = worst.max(gp(x, z, w).min(gp(z, y, w)) - gp(x, y, w));
                }
            }
        }
    }
    2.0 * worst
}

/// Real-line `L`-chain oracle in integer grid units.
///
/// Candidate poles sit at `x + k·step` with `k·step − 1/2 > 0` and
/// `k·step + 1/2 < len`; with `half = 1/(2·step)` a candidate is the integer
/// interval `[k − half, k + half]`. Chains are found by exhaustive search.
pub struct LinePacking {
    pub ks: Vec<i64>,
    pub half: i64,
}

impl LinePacking {
    pub fn new(len: f64, step_inv: i64) -> Self {
        assert!(step_inv % 2 == 0);
        let half = step_inv / 2;
        let ks = (1..)
            .take_while(|&k| ((k + half) as f64) / (step_inv as f64) < len)
            .filter(|&k| k > half)
            .collect();
        LinePacking { ks, half }
    }

    fn disjoint_before(&self, a: i64, b: i64) -> bool {
        b - a > 2 * self.half
    }

    fn meets(&self, a: i64, b: i64) -> bool {
        (a - b).abs() <= 2 * self.half
    }

    fn longest_from(&self, members: &[i64], last: Option<i64>, ok: &dyn Fn(i64, i64) -> bool) -> usize {
        let mut best = 0;
        for &c in members {
            let fits = match last {
                None => true,
                Some(p) => self.disjoint_before(p, c) && ok(p, c),
            };
            if fits {
                best = best.max(1 + self.longest_from(members, Some(c), ok));
            }
        }
        best
    }

    /// Longest chain in the family whose members all meet `a` and `b`.
    pub fn meeting_both(&self, a: i64, b: i64) -> usize {
        let members: Vec<i64> = self.ks.iter().copied().filter(|&c| self.meets(c, a) && self.meets(c, b)).collect();
        self.longest_from(&members, None, &|_, _| true)
    }

    /// Longest chain of candidates with every adjacent pair `L`-separated.
    pub fn longest_l_chain(&self, l: usize) -> usize {
        self.longest_from(&self.ks, None, &|a, b| self.meeting_both(a, b) <= l)
    }
}
