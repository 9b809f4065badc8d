//! Planar graph JSON: `{"vertices": [{"id", "x", "y"}], "edges": [[a, b]]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::model::{PlanarGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct VertexJson {
    id: u32,
    x: f64,
    y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<VertexJson>,
    edges: Vec<[u32; 2]>,
}

pub fn graph_to_json(g: &PlanarGraph) -> String {
    let file = GraphFile {
        vertices: g.vertices.iter().map(|v| VertexJson { id: v.id, x: v.pos.x, y: v.pos.y }).collect(),
        edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
    };
    let mut s = serde_json::to_string(&file).expect("graph serializes");
    s.push('\n');
    s
}

/// Parses a graph and checks the planar-graph invariants.
pub fn graph_from_json(s: &str) -> Result<PlanarGraph> {
    let f: GraphFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let g = PlanarGraph::new(
        f.vertices.into_iter().map(|v| Vertex { id: v.id, pos: Point2::new(v.x, v.y) }).collect(),
        f.edges.into_iter().map(|[a, b]| (a, b)).collect(),
    );
    g.validate()?;
    Ok(g)
}
