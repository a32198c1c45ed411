//! CAT(0) backends: Euclidean space and finite metric trees.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::CurtainError;
use crate::metric::space::euclid;

type Result<T> = std::result::Result<T, CurtainError>;

/// A point of a metric tree: a vertex, or a point on an edge at `offset`
/// from the edge's first endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreePoint {
    Vertex(usize),
    Edge { edge: usize, offset: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Euclidean(Vec<f64>),
    Tree(TreePoint),
}

impl Point {
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Euclidean(c) => Some(c),
            Point::Tree(_) => None,
        }
    }
}

/// A finite tree with positive edge lengths, viewed as a geodesic metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTree {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<(usize, usize)>>, // (neighbour, edge id)
    dist: Vec<Vec<f64>>,
    // next_hop[target][v]: neighbour of v on the way to target
    next_hop: Vec<Vec<usize>>,
}

impl MetricTree {
    pub fn new(labels: Vec<String>, edges: Vec<(String, String, f64)>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(CurtainError::InvalidBackend("tree has no vertices".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(CurtainError::InvalidBackend(format!("duplicate vertex {l:?}")));
            }
        }
        if edges.len() != n - 1 {
            return Err(CurtainError::InvalidBackend(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let lookup = |l: &str| {
            index.get(l).copied().ok_or_else(|| CurtainError::InvalidBackend(format!("unknown vertex {l:?}")))
        };
        let mut resolved = Vec::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); n];
        for (id, (u, v, len)) in edges.iter().enumerate() {
            let (a, b) = (lookup(u)?, lookup(v)?);
            if a == b {
                return Err(CurtainError::InvalidBackend(format!("self-loop at {u:?}")));
            }
            if !(len.is_finite() && *len > 0.0) {
                return Err(CurtainError::InvalidBackend(format!("edge {u:?}-{v:?} has length {len}")));
            }
            resolved.push((a, b, *len));
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        let mut dist = vec![vec![f64::INFINITY; n]; n];
        let mut next_hop = vec![vec![usize::MAX; n]; n];
        for target in 0..n {
            dist[target][target] = 0.0;
            next_hop[target][target] = target;
            let mut stack = vec![target];
            while let Some(v) = stack.pop() {
                for &(w, e) in &adj[v] {
                    if dist[target][w].is_infinite() {
                        dist[target][w] = dist[target][v] + resolved[e].2;
                        next_hop[target][w] = v;
                        stack.push(w);
                    }
                }
            }
        }
        if dist[0].iter().any(|d| d.is_infinite()) {
            return Err(CurtainError::InvalidBackend("tree is not connected".into()));
        }
        Ok(MetricTree { labels, index, edges: resolved, adj, dist, next_hop })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adj.get(u)?.iter().find(|(w, _)| *w == v).map(|&(_, e)| e)
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u][v]
    }

    fn check(&self, p: &TreePoint) -> Result<()> {
        match *p {
            TreePoint::Vertex(v) if v < self.labels.len() => Ok(()),
            TreePoint::Edge { edge, offset } if edge < self.edges.len() => {
                let len = self.edges[edge].2;
                if offset.is_finite() && (0.0..=len).contains(&offset) {
                    Ok(())
                } else {
                    Err(CurtainError::PointOutsideBackend(format!("offset {offset} outside edge of length {len}")))
                }
            }
            _ => Err(CurtainError::PointOutsideBackend(format!("{p:?}"))),
        }
    }

    /// Vertices through which the point can leave its edge, with distances.
    fn anchors(&self, p: &TreePoint) -> [(usize, f64); 2] {
        match *p {
            TreePoint::Vertex(v) => [(v, 0.0), (v, 0.0)],
            TreePoint::Edge { edge, offset } => {
                let (u, v, len) = self.edges[edge];
                [(u, offset), (v, len - offset)]
            }
        }
    }

    pub fn distance(&self, a: &TreePoint, b: &TreePoint) -> f64 {
        if let (TreePoint::Edge { edge: e1, offset: o1 }, TreePoint::Edge { edge: e2, offset: o2 }) = (a, b) {
            if e1 == e2 {
                return (o1 - o2).abs();
            }
        }
        self.best_route(a, b).0
    }

    /// `(length, exit anchor of a, entry anchor of b)` of the geodesic between
    /// points on different edges.
    fn best_route(&self, a: &TreePoint, b: &TreePoint) -> (f64, (usize, f64), (usize, f64)) {
        let mut best = (f64::INFINITY, (0, 0.0), (0, 0.0));
        for &(u, du) in &self.anchors(a) {
            for &(v, dv) in &self.anchors(b) {
                let total = du + self.dist[u][v] + dv;
                if total < best.0 {
                    best = (total, (u, du), (v, dv));
                }
            }
        }
        best
    }

    /// Point at distance `t` from vertex `u` towards its neighbour `w`.
    fn along_edge(&self, u: usize, w: usize, t: f64) -> TreePoint {
        let e = self.edge_between(u, w).expect("adjacent vertices");
        let (a, _, len) = self.edges[e];
        let t = t.clamp(0.0, len);
        let offset = if a == u { t } else { len - t };
        TreePoint::Edge { edge: e, offset }
    }

    /// Point at distance `s` from `a` along the geodesic to `b`.
    pub fn point_at(&self, a: &TreePoint, b: &TreePoint, s: f64) -> TreePoint {
        let total = self.distance(a, b);
        let s = s.clamp(0.0, total);
        if let (TreePoint::Edge { edge: e1, offset: o1 }, TreePoint::Edge { edge: e2, offset: o2 }) = (a, b) {
            if e1 == e2 {
                let dir = if o2 >= o1 { 1.0 } else { -1.0 };
                return TreePoint::Edge { edge: *e1, offset: o1 + dir * s };
            }
        }
        let (_, (ua, da), (ub, _)) = self.best_route(a, b);
        if s <= da {
            return match *a {
                TreePoint::Vertex(v) => TreePoint::Vertex(v),
                TreePoint::Edge { edge, offset } => {
                    let (first, _, _) = self.edges[edge];
                    let dir = if ua == first { -1.0 } else { 1.0 };
                    TreePoint::Edge { edge, offset: offset + dir * s }
                }
            };
        }
        let mut walked = da;
        let mut v = ua;
        while v != ub {
            let w = self.next_hop[ub][v];
            let len = self.dist[v][w];
            if s <= walked + len {
                return self.along_edge(v, w, s - walked);
            }
            walked += len;
            v = w;
        }
        // remaining distance lies on b's edge, walking from ub towards b
        match *b {
            TreePoint::Vertex(x) => TreePoint::Vertex(x),
            TreePoint::Edge { edge, .. } => {
                let (first, second, _) = self.edges[edge];
                let other = if ub == first { second } else { first };
                self.along_edge(ub, other, s - walked)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceBackend {
    Euclidean { dim: usize },
    Tree(MetricTree),
}

/// An arc-length parametrised geodesic `[0, length] → X` from `a` to `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    a: Point,
    b: Point,
    length: f64,
    direction: Option<Vec<f64>>,
}

impl GeodesicSegment {
    pub fn start(&self) -> &Point {
        &self.a
    }

    pub fn end(&self) -> &Point {
        &self.b
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Unit direction, Euclidean backends only.
    pub fn direction(&self) -> Option<&[f64]> {
        self.direction.as_deref()
    }
}

impl SpaceBackend {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CurtainError::InvalidBackend("dimension must be at least 1".into()));
        }
        Ok(SpaceBackend::Euclidean { dim })
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (SpaceBackend::Euclidean { dim }, Point::Euclidean(c)) => {
                if c.len() != *dim {
                    return Err(CurtainError::PointOutsideBackend(format!(
                        "point has {} coordinates, backend dimension is {dim}",
                        c.len()
                    )));
                }
                if c.iter().any(|x| !x.is_finite()) {
                    return Err(CurtainError::PointOutsideBackend("non-finite coordinate".into()));
                }
                Ok(())
            }
            (SpaceBackend::Tree(t), Point::Tree(tp)) => t.check(tp),
            _ => Err(CurtainError::PointOutsideBackend("point kind does not match backend".into())),
        }
    }

    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    pub(crate) fn distance_unchecked(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (SpaceBackend::Euclidean { .. }, Point::Euclidean(x), Point::Euclidean(y)) => euclid(x, y),
            (SpaceBackend::Tree(t), Point::Tree(x), Point::Tree(y)) => t.distance(x, y),
            _ => f64::NAN,
        }
    }

    pub fn geodesic(&self, a: &Point, b: &Point) -> Result<GeodesicSegment> {
        let length = self.distance(a, b)?;
        let direction = match (a, b) {
            (Point::Euclidean(x), Point::Euclidean(y)) if length > 0.0 => {
                Some(x.iter().zip(y).map(|(p, q)| (q - p) / length).collect())
            }
            _ => None,
        };
        Ok(GeodesicSegment { a: a.clone(), b: b.clone(), length, direction })
    }

    /// Parameter in `[0, length]` of the closest point of the segment to `p`.
    pub fn project(&self, seg: &GeodesicSegment, p: &Point) -> Result<f64> {
        self.check_point(p)?;
        Ok(self.project_unchecked(seg, p))
    }

    pub(crate) fn project_unchecked(&self, seg: &GeodesicSegment, p: &Point) -> f64 {
        if seg.length == 0.0 {
            return 0.0;
        }
        match (&seg.a, p, &seg.direction) {
            (Point::Euclidean(a), Point::Euclidean(x), Some(u)) => {
                let t: f64 = x.iter().zip(a).zip(u).map(|((xi, ai), ui)| (xi - ai) * ui).sum();
                t.clamp(0.0, seg.length)
            }
            _ => {
                // gate of p onto [a, b] in a tree
                let da = self.distance_unchecked(&seg.a, p);
                let db = self.distance_unchecked(&seg.b, p);
                (0.5 * (da + seg.length - db)).clamp(0.0, seg.length)
            }
        }
    }

    pub fn point_at(&self, seg: &GeodesicSegment, s: f64) -> Point {
        let s = s.clamp(0.0, seg.length);
        match (self, &seg.a, &seg.b) {
            (SpaceBackend::Tree(t), Point::Tree(a), Point::Tree(b)) => Point::Tree(t.point_at(a, b, s)),
            (_, Point::Euclidean(a), _) => match &seg.direction {
                Some(u) => Point::Euclidean(a.iter().zip(u).map(|(ai, ui)| ai + s * ui).collect()),
                None => seg.a.clone(),
            },
            _ => seg.a.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_tree() -> SpaceBackend {
        // a - b - c with unit edges, leaf d hanging off b
        let labels = ["a", "b", "c", "d"].map(String::from).to_vec();
        let edges = vec![
            ("a".into(), "b".into(), 1.0),
            ("b".into(), "c".into(), 1.0),
            ("b".into(), "d".into(), 2.0),
        ];
        SpaceBackend::Tree(MetricTree::new(labels, edges).unwrap())
    }

    fn e(c: &[f64]) -> Point {
        Point::Euclidean(c.to_vec())
    }

    #[test]
    fn euclidean_projection() {
        let b = SpaceBackend::euclidean(2).unwrap();
        let seg = b.geodesic(&e(&[-5.0, 0.0]), &e(&[5.0, 0.0])).unwrap();
        assert_eq!(b.project(&seg, &e(&[3.0, 4.0])).unwrap(), 8.0);
        assert_eq!(b.project(&seg, &e(&[9.0, 1.0])).unwrap(), 10.0);
        assert_eq!(b.point_at(&seg, 10.0), e(&[5.0, 0.0]));
        assert!(b.project(&seg, &e(&[1.0])).is_err());
    }

    #[test]
    fn tree_projection_gate() {
        let b = path_tree();
        let seg = b.geodesic(&Point::Tree(TreePoint::Vertex(0)), &Point::Tree(TreePoint::Vertex(2))).unwrap();
        assert_eq!(seg.length(), 2.0);
        assert_eq!(b.project(&seg, &Point::Tree(TreePoint::Vertex(3))).unwrap(), 1.0);
        let mid_leaf = Point::Tree(TreePoint::Edge { edge: 2, offset: 1.5 });
        assert_eq!(b.project(&seg, &mid_leaf).unwrap(), 1.0);
    }

    #[test]
    fn tree_distances() {
        let SpaceBackend::Tree(t) = path_tree() else { unreachable!() };
        let p = TreePoint::Edge { edge: 0, offset: 0.25 };
        let q = TreePoint::Edge { edge: 2, offset: 0.5 };
        assert_eq!(t.distance(&p, &q), 0.75 + 0.5);
        assert_eq!(t.distance(&p, &TreePoint::Edge { edge: 0, offset: 0.75 }), 0.5);
        assert_eq!(t.distance(&p, &TreePoint::Vertex(2)), 1.75);
    }

    #[test]
    fn tree_point_at_walks_route() {
        let SpaceBackend::Tree(t) = path_tree() else { unreachable!() };
        let a = TreePoint::Edge { edge: 0, offset: 0.5 };
        let b = TreePoint::Edge { edge: 2, offset: 1.0 };
        let total = t.distance(&a, &b);
        assert_eq!(total, 1.5);
        for k in 0..=6 {
            let s = total * k as f64 / 6.0;
            let p = t.point_at(&a, &b, s);
            assert!((t.distance(&a, &p) - s).abs() < 1e-12, "s = {s}");
            assert!((t.distance(&p, &b) - (total - s)).abs() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn invalid_trees() {
        let l = ["a", "b", "c"].map(String::from).to_vec();
        let cyc = vec![("a".into(), "b".into(), 1.0), ("b".into(), "a".into(), 1.0)];
        assert!(MetricTree::new(l.clone(), cyc).is_err());
        let neg = vec![("a".into(), "b".into(), 1.0), ("b".into(), "c".into(), -1.0)];
        assert!(MetricTree::new(l.clone(), neg).is_err());
        let unknown = vec![("a".into(), "b".into(), 1.0), ("b".into(), "z".into(), 1.0)];
        assert!(MetricTree::new(l, unknown).is_err());
        assert!(SpaceBackend::euclidean(0).is_err());
    }
}
