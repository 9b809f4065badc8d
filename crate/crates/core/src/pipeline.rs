//! Detections in, planar graph out.

use std::collections::BTreeSet;
use std::time::Duration;

use crate::error::Result;
use crate::ipbuild::{build, Assembly, BuildParams, VarRef};
use crate::model::{merge_colinear_corners, DetectionSet, FeatureConfig, PlanarGraph, Vertex};
use crate::solver::{solve, SolveResult, DEFAULT_TIME_LIMIT};

#[derive(Debug, Clone, PartialEq)]
pub struct AssembleOptions {
    pub features: FeatureConfig,
    pub params: BuildParams,
    pub time_limit: Duration,
    /// Merge near-straight degree-2 corners after solving.
    pub post_process: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            features: FeatureConfig::full(),
            params: BuildParams::default(),
            time_limit: DEFAULT_TIME_LIMIT,
            post_process: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssembleOutput {
    pub graph: PlanarGraph,
    pub assembly: Assembly,
    pub result: SolveResult,
}

/// Selected corners and edges as a graph. Corners left without edges are
/// dropped.
pub fn graph_from_solution(d: &DetectionSet, result: &SolveResult) -> PlanarGraph {
    let mut edges = Vec::new();
    let mut used = BTreeSet::new();
    for v in result.active() {
        if let VarRef::Edge(a, b) = v {
            edges.push((a, b));
            used.insert(a);
            used.insert(b);
        }
    }
    let mut vertices: Vec<Vertex> =
        d.corners.iter().filter(|c| used.contains(&c.id)).map(|c| Vertex { id: c.id, pos: c.position }).collect();
    vertices.sort_by_key(|v| v.id);
    PlanarGraph::new(vertices, edges)
}

/// Thresholds the detections, builds and solves the program, and extracts the
/// graph.
pub fn assemble(d: &DetectionSet, opts: &AssembleOptions) -> Result<AssembleOutput> {
    let d = d.clone().thresholded();
    let assembly = build(&d, &opts.features, &opts.params)?;
    let result = solve(&assembly.program, opts.time_limit)?;
    let mut graph = graph_from_solution(&d, &result);
    if opts.post_process {
        graph = merge_colinear_corners(&graph);
    }
    Ok(AssembleOutput { graph, assembly, result })
}
