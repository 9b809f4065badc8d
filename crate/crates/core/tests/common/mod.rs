//! Generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roofgraph::geom::{Canvas, Point2};
use roofgraph::ipbuild::{BinaryProgram, Family, LinearConstraint, Relation, VarRef};
use roofgraph::model::PlanarGraph;
use roofgraph::simdet::{random_building, BuildingParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_var(i: u32, rng: &mut ChaCha8Rng) -> VarRef {
    match rng.random_range(0..4) {
        0 => VarRef::Corner(i),
        1 => VarRef::edge(i, i + 1000),
        2 => VarRef::Region(i),
        _ => VarRef::Dir { corner: i, bin: rng.random_range(0..15) },
    }
}

fn random_coef(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..6) {
        0 => 1.0,
        1 => -1.0,
        2 => 2.0,
        3 => -2.0,
        _ => (rng.random_range(-1.5..1.5f64) * 1000.0).round() / 1000.0,
    }
}

/// A random program with 1 to `max_binaries` binaries, constraints from every
/// family, about 40% of them softened.
pub fn random_program(seed: u64, max_binaries: usize) -> BinaryProgram {
    let mut rng = rng(seed);
    let n = rng.random_range(1..=max_binaries);
    let mut p = BinaryProgram::new();
    let vars: Vec<VarRef> = (0..n as u32).map(|i| random_var(i, &mut rng)).collect();
    for v in &vars {
        p.declare_binary(*v);
        let c = (rng.random_range(-1.0..1.0f64) * 1000.0).round() / 1000.0;
        p.set_objective(v, c).unwrap();
    }
    let m = rng.random_range(0..=2 * n);
    for _ in 0..m {
        let k = rng.random_range(1..=n.min(4));
        let mut pick = vars.clone();
        pick.shuffle(&mut rng);
        let terms: Vec<(f64, VarRef)> = pick[..k].iter().map(|v| (random_coef(&mut rng), *v)).collect();
        let relation = [Relation::Le, Relation::Eq, Relation::Ge][rng.random_range(0..3)];
        let rhs = [-1.0, 0.0, 0.0, 1.0, 1.0, 2.0][rng.random_range(0..6)];
        let family = Family::ALL[rng.random_range(0..Family::ALL.len())];
        let c = LinearConstraint::new(terms, relation, rhs, family);
        if rng.random_bool(0.4) {
            let lambda = (rng.random_range(0.1..2.0f64) * 1000.0).round() / 1000.0;
            let cap = [0.0, 0.5, 1.0, 2.0][rng.random_range(0..4)];
            p.add_soft(c, lambda, cap).unwrap();
        } else {
            p.add_constraint(c).unwrap();
        }
    }
    p
}

/// Random valid building graphs from the polyomino generator.
pub fn random_graph(seed: u64) -> PlanarGraph {
    random_building(seed, &BuildingParams::default(), Canvas::default())
}

/// Exact-enough orientation sign of `c` relative to the line `a -> b`.
pub fn orient(a: Point2, b: Point2, c: Point2) -> i8 {
    let v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if v.abs() < 1e-9 {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Distance from `p` to the closed segment `a b`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) };
    let (qx, qy) = (a.x + t * dx, a.y + t * dy);
    ((p.x - qx).powi(2) + (p.y - qy).powi(2)).sqrt()
}
