use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{Canvas, Point2};
use crate::model::PlanarGraph;

/// Parameters of the random building generator.
///
/// Buildings are unions of cells of a small lattice. Every cell side is an
/// edge, so internal walls become ridge lines between faces. Lattice line
/// spacing is randomized per line and the whole footprint is rotated, which
/// keeps edges that share a lattice line exactly colinear.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingParams {
    pub grid: usize,
    pub max_cells: usize,
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub spacing: (f64, f64),
    pub max_rotation_deg: f64,
    pub margin: f64,
}

impl Default for BuildingParams {
    fn default() -> Self {
        Self {
            grid: 3,
            max_cells: 5,
            min_vertices: 4,
            max_vertices: 12,
            spacing: (32.0, 56.0),
            max_rotation_deg: 30.0,
            margin: 16.0,
        }
    }
}

type Lattice = (i32, i32);

fn grow_polyomino(rng: &mut ChaCha8Rng, grid: i32, cells: usize) -> BTreeSet<Lattice> {
    let mut set = BTreeSet::new();
    set.insert((rng.random_range(0..grid), rng.random_range(0..grid)));
    while set.len() < cells {
        let frontier: Vec<Lattice> = set
            .iter()
            .flat_map(|&(x, y)| [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)])
            .filter(|&(x, y)| x >= 0 && y >= 0 && x < grid && y < grid && !set.contains(&(x, y)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        match frontier.choose(rng) {
            Some(&c) => {
                set.insert(c);
            }
            None => break,
        }
    }
    set
}

/// Lattice graph of the cell sides with straight degree-2 points removed.
fn lattice_graph(cells: &BTreeSet<Lattice>) -> (Vec<Lattice>, Vec<(usize, usize)>) {
    let mut adj: BTreeMap<Lattice, BTreeSet<Lattice>> = BTreeMap::new();
    let mut link = |a: Lattice, b: Lattice| {
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    };
    for &(x, y) in cells {
        link((x, y), (x + 1, y));
        link((x + 1, y), (x + 1, y + 1));
        link((x, y + 1), (x + 1, y + 1));
        link((x, y), (x, y + 1));
    }
    let straight = |p: Lattice, nb: &BTreeSet<Lattice>| {
        let v: Vec<&Lattice> = nb.iter().collect();
        v.len() == 2 && (v[0].0 - p.0, v[0].1 - p.1) == (p.0 - v[1].0, p.1 - v[1].1)
    };
    // Straight points only sit on unit lattice steps here, so merging follows
    // each run to its far end.
    let keep: Vec<Lattice> = adj.iter().filter(|(p, nb)| !straight(**p, nb)).map(|(p, _)| *p).collect();
    let index: BTreeMap<Lattice, usize> = keep.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut edges = BTreeSet::new();
    for &p in &keep {
        for &q in &adj[&p] {
            let step = (q.0 - p.0, q.1 - p.1);
            let mut cur = q;
            while !index.contains_key(&cur) {
                cur = (cur.0 + step.0, cur.1 + step.1);
            }
            let (a, b) = (index[&p], index[&cur]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    (keep, edges.into_iter().collect())
}

/// Draws a random building footprint graph. Deterministic in `seed`.
///
/// Every result is a valid planar graph with minimum degree 2 whose vertex
/// count lies in `[min_vertices, max_vertices]` and which fits on `canvas`
/// with the configured margin.
pub fn random_building(seed: u64, params: &BuildingParams, canvas: Canvas) -> PlanarGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = params.grid.max(1) as i32;
    loop {
        let n_cells = rng.random_range(1..=params.max_cells.clamp(1, (grid * grid) as usize));
        let cells = grow_polyomino(&mut rng, grid, n_cells);
        let (points, edges) = lattice_graph(&cells);
        if points.len() < params.min_vertices || points.len() > params.max_vertices {
            continue;
        }

        let mut line_pos = |n: usize| {
            let mut acc = vec![0.0];
            for _ in 0..n {
                let step = if params.spacing.1 > params.spacing.0 {
                    rng.random_range(params.spacing.0..params.spacing.1)
                } else {
                    params.spacing.0
                };
                acc.push(acc.last().unwrap() + step);
            }
            acc
        };
        let xs = line_pos(grid as usize);
        let ys = line_pos(grid as usize);
        let theta = if params.max_rotation_deg > 0.0 {
            rng.random_range(-params.max_rotation_deg..params.max_rotation_deg).to_radians()
        } else {
            0.0
        };
        let (sin, cos) = theta.sin_cos();

        let raw: Vec<Point2> = points.iter().map(|&(i, j)| Point2::new(xs[i as usize], ys[j as usize])).collect();
        let n = raw.len() as f64;
        let cx = raw.iter().map(|p| p.x).sum::<f64>() / n;
        let cy = raw.iter().map(|p| p.y).sum::<f64>() / n;
        let (ox, oy) = (canvas.width as f64 / 2.0, canvas.height as f64 / 2.0);
        let placed: Vec<(f64, f64)> = raw
            .iter()
            .map(|p| {
                let (dx, dy) = (p.x - cx, p.y - cy);
                (ox + dx * cos - dy * sin, oy + dx * sin + dy * cos)
            })
            .collect();
        let fits = placed.iter().all(|&(x, y)| {
            x >= params.margin
                && y >= params.margin
                && x <= canvas.width as f64 - params.margin
                && y <= canvas.height as f64 - params.margin
        });
        if !fits {
            continue;
        }
        let edges: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (a as u32, b as u32)).collect();
        let g = PlanarGraph::from_points(&placed, &edges);
        if g.validate().is_ok() {
            return g;
        }
    }
}
