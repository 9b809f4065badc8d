use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geom::{segments_properly_intersect, Point2, Segment2};

/// Degree-2 corners whose edges deviate from a straight line by less than
/// this many degrees are merged away.
pub const COLINEAR_TOLERANCE_DEG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub id: u32,
    pub pos: Point2,
}

/// Straight-line embedded graph. Edges are unordered vertex-id pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanarGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(u32, u32)>,
}

impl PlanarGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(u32, u32)>) -> Self {
        Self { vertices, edges }
    }

    /// Builds a graph from `(x, y)` positions (ids are indices) and edges.
    pub fn from_points(points: &[(f64, f64)], edges: &[(u32, u32)]) -> Self {
        let vertices =
            points.iter().enumerate().map(|(i, &(x, y))| Vertex { id: i as u32, pos: Point2::new(x, y) }).collect();
        Self { vertices, edges: edges.to_vec() }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn position(&self, id: u32) -> Option<Point2> {
        self.vertices.iter().find(|v| v.id == id).map(|v| v.pos)
    }

    fn positions(&self) -> BTreeMap<u32, Point2> {
        self.vertices.iter().map(|v| (v.id, v.pos)).collect()
    }

    pub fn segment(&self, e: (u32, u32)) -> Option<Segment2> {
        Some(Segment2::new(self.position(e.0)?, self.position(e.1)?))
    }

    pub fn degree(&self, id: u32) -> usize {
        self.edges.iter().filter(|e| e.0 == id || e.1 == id).count()
    }

    pub fn neighbors(&self, id: u32) -> Vec<u32> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == id {
                    Some(b)
                } else if b == id {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    fn has_edge(&self, a: u32, b: u32) -> bool {
        self.edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// Checks the structural invariants: unique ids, resolvable endpoints,
    /// no self-loops or duplicate edges, no crossing edges, minimum degree 2
    /// and no two vertices closer than 1 px.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        let pos = self.positions();
        if pos.len() != self.vertices.len() {
            return bad("duplicate vertex id".into());
        }
        for v in &self.vertices {
            if !v.pos.is_finite() {
                return bad(format!("vertex {} has a non-finite position", v.id));
            }
        }
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let (a, b) = (&self.vertices[i], &self.vertices[j]);
                if a.pos.dist(b.pos) < 1.0 {
                    return bad(format!("vertices {} and {} are closer than 1 px", a.id, b.id));
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut segs = Vec::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            if a == b {
                return bad(format!("self-loop at {a}"));
            }
            let (Some(pa), Some(pb)) = (pos.get(&a), pos.get(&b)) else {
                return bad(format!("edge ({a}, {b}) references an unknown vertex"));
            };
            if !seen.insert((a.min(b), a.max(b))) {
                return bad(format!("duplicate edge ({a}, {b})"));
            }
            segs.push(Segment2::new(*pa, *pb));
        }
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                if segments_properly_intersect(&segs[i], &segs[j]) {
                    let (e, f) = (self.edges[i], self.edges[j]);
                    return bad(format!("edges {e:?} and {f:?} intersect"));
                }
            }
        }
        let mut degree: BTreeMap<u32, usize> = pos.keys().map(|&k| (k, 0)).collect();
        for &(a, b) in &self.edges {
            *degree.get_mut(&a).unwrap() += 1;
            *degree.get_mut(&b).unwrap() += 1;
        }
        if let Some((id, d)) = degree.iter().find(|(_, d)| **d < 2) {
            return bad(format!("vertex {id} has degree {d}"));
        }
        Ok(())
    }
}

/// Angle in degrees at `v` between the rays towards `a` and `b`, in `[0, 180]`.
fn corner_angle(v: Point2, a: Point2, b: Point2) -> f64 {
    let (u, w) = (a - v, b - v);
    let c = u.dot(w) / (u.norm() * w.norm());
    c.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Removes every degree-2 corner whose two edges are colinear within the
/// tolerance, joining its neighbours directly, until no such corner remains.
///
/// A merge is skipped when the joining edge already exists or would cross
/// another edge, so the result keeps the planar-graph invariants.
pub fn merge_colinear_corners(g: &PlanarGraph) -> PlanarGraph {
    let mut g = g.clone();
    loop {
        let mut ids: Vec<u32> = g.vertices.iter().map(|v| v.id).collect();
        ids.sort_unstable();
        let mut merged = false;
        for id in ids {
            let nb = g.neighbors(id);
            if nb.len() != 2 || nb[0] == nb[1] {
                continue;
            }
            let (Some(pv), Some(pa), Some(pb)) = (g.position(id), g.position(nb[0]), g.position(nb[1])) else {
                continue;
            };
            if 180.0 - corner_angle(pv, pa, pb) >= COLINEAR_TOLERANCE_DEG {
                continue;
            }
            if g.has_edge(nb[0], nb[1]) {
                continue;
            }
            let joined = Segment2::new(pa, pb);
            let crosses = g
                .edges
                .iter()
                .filter(|e| e.0 != id && e.1 != id)
                .any(|&e| g.segment(e).is_some_and(|s| segments_properly_intersect(&s, &joined)));
            if crosses {
                continue;
            }
            g.edges.retain(|e| e.0 != id && e.1 != id);
            g.vertices.retain(|v| v.id != id);
            g.edges.push((nb[0].min(nb[1]), nb[0].max(nb[1])));
            merged = true;
            break;
        }
        if !merged {
            return g;
        }
    }
}
