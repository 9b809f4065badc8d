use std::collections::{BTreeMap, BTreeSet};

use super::PlanarGraph;
use crate::error::Result;
use crate::geom::{direction_deg, fill_polygon, screen_ccw_area, BitMask, Canvas, Point2};

/// A bounded face of the embedding.
#[derive(Debug, Clone)]
pub struct Face {
    /// Boundary vertex ids, counter-clockwise on screen.
    pub vertices: Vec<u32>,
    /// Indices into `PlanarGraph::edges`, parallel to `vertices`: entry `i`
    /// joins `vertices[i]` and `vertices[i + 1]`.
    pub edges: Vec<usize>,
    pub polygon: Vec<Point2>,
    pub area: f64,
    pub mask: BitMask,
}

/// Bounded faces of the straight-line embedding, found by walking half-edges
/// and always turning as far left as possible. Cycles with non-positive
/// orientation are outer boundaries and are skipped.
pub fn enumerate_faces(g: &PlanarGraph, canvas: Canvas) -> Result<Vec<Face>> {
    g.validate()?;
    let pos: BTreeMap<u32, Point2> = g.vertices.iter().map(|v| (v.id, v.pos)).collect();

    // Outgoing half-edges per vertex, sorted counter-clockwise.
    let mut around: BTreeMap<u32, Vec<(f64, usize, u32)>> = BTreeMap::new();
    for (eid, &(a, b)) in g.edges.iter().enumerate() {
        around.entry(a).or_default().push((direction_deg(pos[&a], pos[&b]), eid, b));
        around.entry(b).or_default().push((direction_deg(pos[&b], pos[&a]), eid, a));
    }
    for list in around.values_mut() {
        list.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    }

    // Half-edge key: (edge id, tail vertex).
    let mut visited: BTreeSet<(usize, u32)> = BTreeSet::new();
    let mut faces = Vec::new();
    for (eid, &(a, b)) in g.edges.iter().enumerate() {
        for (tail, head) in [(a, b), (b, a)] {
            if visited.contains(&(eid, tail)) {
                continue;
            }
            let mut verts = Vec::new();
            let mut edges = Vec::new();
            let (mut e, mut u, mut v) = (eid, tail, head);
            loop {
                visited.insert((e, u));
                verts.push(u);
                edges.push(e);
                let list = &around[&v];
                let k = list.iter().position(|x| x.1 == e && x.2 == u).expect("twin half-edge");
                // The next clockwise neighbour from the way back is the
                // sharpest left turn.
                let next = list[(k + list.len() - 1) % list.len()];
                e = next.1;
                u = v;
                v = next.2;
                if visited.contains(&(e, u)) {
                    break;
                }
            }
            let polygon: Vec<Point2> = verts.iter().map(|id| pos[id]).collect();
            let area = screen_ccw_area(&polygon);
            if area > 1e-9 {
                let mask = fill_polygon(&polygon, canvas);
                faces.push(Face { vertices: verts, edges, polygon, area, mask });
            }
        }
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn grid(n: usize, step: f64) -> PlanarGraph {
        let mut pts = Vec::new();
        for r in 0..n {
            for c in 0..n {
                pts.push((10.0 + c as f64 * step, 10.0 + r as f64 * step));
            }
        }
        let mut edges = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let i = (r * n + c) as u32;
                if c + 1 < n {
                    edges.push((i, i + 1));
                }
                if r + 1 < n {
                    edges.push((i, i + n as u32));
                }
            }
        }
        PlanarGraph::from_points(&pts, &edges)
    }

    #[test]
    fn unit_square_has_one_face() {
        let g = PlanarGraph::from_points(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let f = enumerate_faces(&g, Canvas::new(8, 8)).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0].area - 1.0).abs() < 1e-12);
        assert_eq!(f[0].mask.count(), 1);
    }

    #[test]
    fn two_squares_and_grid() {
        let g = PlanarGraph::from_points(
            &[(0., 0.), (10., 0.), (20., 0.), (20., 10.), (10., 10.), (0., 10.)],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)],
        );
        let f = enumerate_faces(&g, Canvas::new(32, 32)).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].mask.intersection_count(&f[1].mask), 0);
        assert_eq!(f[0].mask.count() + f[1].mask.count(), 200);

        let g = grid(3, 20.0);
        // Euler: V - E + F = 2 gives 5 faces including the outer one.
        let f = enumerate_faces(&g, Canvas::new(64, 64)).unwrap();
        assert_eq!(f.len(), g.edges.len() - g.vertices.len() + 1);
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn invalid_graph_is_rejected() {
        let g = PlanarGraph::from_points(&[(0., 0.), (1., 0.)], &[(0, 1)]);
        assert!(matches!(enumerate_faces(&g, Canvas::default()), Err(Error::InvalidGraph(_))));
    }
}
