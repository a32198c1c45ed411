//! JSON input and output formats.
//!
//! ```text
//! space    {"labels": ["a", ...], "dist": [[0, 1, ...], ...]}
//! paths    {"paths": {"a|b": ["a", "c", "b"], ...}}
//! backend  {"type": "euclidean", "dim": 2}
//!          {"type": "tree", "vertices": ["a", ...], "edges": [["a", "b", 1.5], ...]}
//! pairs    {"pairs": [[P, P], ...]}
//! ```
//!
//! A pair point `P` is a coordinate array for Euclidean backends, and for
//! trees either a vertex label or `{"edge": ["u", "v"], "offset": s}` with `s`
//! measured from `u`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curtain::backend::{MetricTree, Point, SpaceBackend, TreePoint};
use crate::error::{CurtainError, MetricError, SchemaError};
use crate::metric::paths::PathSystem;
use crate::metric::space::FiniteMetricSpace;

type Result<T> = std::result::Result<T, SchemaError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsDoc {
    pub paths: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendDoc {
    Euclidean { dim: usize },
    Tree { vertices: Vec<String>, edges: Vec<(String, String, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointDoc {
    Coords(Vec<f64>),
    Vertex(String),
    Edge { edge: (String, String), offset: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairsDoc {
    pub pairs: Vec<(PointDoc, PointDoc)>,
}

pub fn parse_space(text: &str) -> Result<FiniteMetricSpace> {
    let doc: SpaceDoc = serde_json::from_str(text)?;
    Ok(FiniteMetricSpace::new(doc.labels, doc.dist)?)
}

pub fn space_to_json(space: &FiniteMetricSpace) -> String {
    let doc = SpaceDoc { labels: space.labels().to_vec(), dist: space.matrix().to_vec() };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

fn split_key(key: &str) -> Result<(&str, &str)> {
    let mut parts = key.split('|');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(x), Some(y), None) => Ok((x, y)),
        _ => Err(MetricError::BadKey(key.into()).into()),
    }
}

pub fn parse_paths(text: &str, space: &FiniteMetricSpace) -> Result<PathSystem> {
    let doc: PathsDoc = serde_json::from_str(text)?;
    let mut given = BTreeMap::new();
    for (key, labels) in &doc.paths {
        let (x, y) = split_key(key)?;
        let (x, y) = (space.index_of(x)?, space.index_of(y)?);
        let path = labels.iter().map(|l| space.index_of(l)).collect::<std::result::Result<Vec<_>, _>>()?;
        if given.contains_key(&(x, y)) {
            return Err(MetricError::DuplicatePath(space.label(x).into(), space.label(y).into()).into());
        }
        given.insert((x, y), path);
    }
    Ok(PathSystem::from_index_paths(space, given)?)
}

/// Serializes one orientation (`x < y`) of every pair.
pub fn paths_to_json(system: &PathSystem, space: &FiniteMetricSpace) -> String {
    let paths = system
        .pairs()
        .map(|(x, y, p)| {
            let key = format!("{}|{}", space.label(x), space.label(y));
            (key, p.iter().map(|&i| space.label(i).to_string()).collect())
        })
        .collect();
    serde_json::to_string_pretty(&PathsDoc { paths }).expect("plain data serializes")
}

pub fn parse_backend(text: &str) -> Result<SpaceBackend> {
    let doc: BackendDoc = serde_json::from_str(text)?;
    Ok(match doc {
        BackendDoc::Euclidean { dim } => SpaceBackend::euclidean(dim)?,
        BackendDoc::Tree { vertices, edges } => SpaceBackend::Tree(MetricTree::new(vertices, edges)?),
    })
}

pub fn backend_to_json(backend: &SpaceBackend) -> String {
    let doc = match backend {
        SpaceBackend::Euclidean { dim } => BackendDoc::Euclidean { dim: *dim },
        SpaceBackend::Tree(t) => BackendDoc::Tree {
            vertices: t.labels().to_vec(),
            edges: t.edges().iter().map(|&(u, v, len)| (t.labels()[u].clone(), t.labels()[v].clone(), len)).collect(),
        },
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

fn resolve_point(backend: &SpaceBackend, doc: &PointDoc) -> Result<Point> {
    let unknown = |l: &str| SchemaError::from(CurtainError::PointOutsideBackend(format!("unknown vertex {l:?}")));
    let point = match (backend, doc) {
        (SpaceBackend::Euclidean { .. }, PointDoc::Coords(c)) => Point::Euclidean(c.clone()),
        (SpaceBackend::Tree(t), PointDoc::Vertex(l)) => Point::Tree(TreePoint::Vertex(t.vertex(l).ok_or_else(|| unknown(l))?)),
        (SpaceBackend::Tree(t), PointDoc::Edge { edge: (u, v), offset }) => {
            let iu = t.vertex(u).ok_or_else(|| unknown(u))?;
            let iv = t.vertex(v).ok_or_else(|| unknown(v))?;
            let e = t.edge_between(iu, iv).ok_or_else(|| {
                SchemaError::from(CurtainError::PointOutsideBackend(format!("no edge between {u:?} and {v:?}")))
            })?;
            let (first, _, len) = t.edges()[e];
            let offset = if first == iu { *offset } else { len - offset };
            Point::Tree(TreePoint::Edge { edge: e, offset })
        }
        _ => return Err(SchemaError::Invalid("point does not match the backend type".into())),
    };
    backend.check_point(&point)?;
    Ok(point)
}

pub fn parse_pairs(text: &str, backend: &SpaceBackend) -> Result<Vec<(Point, Point)>> {
    let doc: PairsDoc = serde_json::from_str(text)?;
    doc.pairs.iter().map(|(a, b)| Ok((resolve_point(backend, a)?, resolve_point(backend, b)?))).collect()
}

/// Pair-file form of a backend point.
pub fn point_doc(backend: &SpaceBackend, p: &Point) -> PointDoc {
    match (backend, p) {
        (_, Point::Euclidean(c)) => PointDoc::Coords(c.clone()),
        (SpaceBackend::Tree(t), Point::Tree(TreePoint::Vertex(v))) => PointDoc::Vertex(t.labels()[*v].clone()),
        (SpaceBackend::Tree(t), Point::Tree(TreePoint::Edge { edge, offset })) => {
            let (u, v, _) = t.edges()[*edge];
            PointDoc::Edge { edge: (t.labels()[u].clone(), t.labels()[v].clone()), offset: *offset }
        }
        (SpaceBackend::Euclidean { .. }, Point::Tree(_)) => PointDoc::Coords(Vec::new()),
    }
}
