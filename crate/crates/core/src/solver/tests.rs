use super::*;
use crate::geom::Canvas;
use crate::ipbuild::{build, BuildParams, LinearConstraint, Relation, VarKind};
use crate::model::{FeatureConfig, PlanarGraph};
use crate::simdet::{simulate, NoiseConfig};

fn x(i: u32) -> VarRef {
    VarRef::Corner(i)
}

fn toy() -> BinaryProgram {
    let mut p = BinaryProgram::new();
    p.declare_binary(x(1));
    p.declare_binary(x(2));
    p.set_objective(&x(1), 0.5).unwrap();
    p.set_objective(&x(2), 0.3).unwrap();
    p.add_constraint(LinearConstraint::new(
        vec![(1.0, x(1)), (1.0, x(2))],
        Relation::Le,
        1.0,
        Family::TopologyPlanarity,
    ))
    .unwrap();
    p
}

const BUDGET: Duration = Duration::from_secs(30);

#[test]
fn toy_program() {
    for r in [brute_force(&toy()).unwrap(), solve(&toy(), BUDGET).unwrap()] {
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.value(&x(1)), 1.0);
        assert_eq!(r.value(&x(2)), 0.0);
        assert!((r.objective - 0.5).abs() < 1e-12);
    }
}

#[test]
fn empty_program() {
    let p = BinaryProgram::new();
    for r in [brute_force(&p).unwrap(), solve(&p, BUDGET).unwrap()] {
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.assignment.is_empty());
        assert_eq!(r.objective, 0.0);
    }
}

#[test]
fn slack_closed_form() {
    // maximize x1 + x2 - 2 s  s.t.  x1 + x2 + s >= 3, s in [0, 3]
    let mut p = BinaryProgram::new();
    p.declare_binary(x(1));
    p.declare_binary(x(2));
    p.declare(VarRef::SlackLo(0), VarKind::Slack { cap: 3.0 });
    p.set_objective(&x(1), 1.0).unwrap();
    p.set_objective(&x(2), 1.0).unwrap();
    p.set_objective(&VarRef::SlackLo(0), -2.0).unwrap();
    p.add_constraint(LinearConstraint::new(
        vec![(1.0, x(1)), (1.0, x(2)), (1.0, VarRef::SlackLo(0))],
        Relation::Ge,
        3.0,
        Family::RegionEnclose,
    ))
    .unwrap();
    for r in [brute_force(&p).unwrap(), solve(&p, BUDGET).unwrap()] {
        assert_eq!(r.value(&x(1)), 1.0);
        assert_eq!(r.value(&x(2)), 1.0);
        assert!((r.value(&VarRef::SlackLo(0)) - 1.0).abs() < 1e-9);
        assert!(r.objective.abs() < 1e-9);
    }
}

#[test]
fn softened_lower_bound_pays_full_slack() {
    // x forced to 0, x >= 1 softened with lambda 1, cap 1.
    let mut p = BinaryProgram::new();
    p.declare_binary(x(1));
    p.add_constraint(LinearConstraint::new(vec![(1.0, x(1))], Relation::Le, 0.0, Family::TopologyDegree)).unwrap();
    p.add_soft(LinearConstraint::new(vec![(1.0, x(1))], Relation::Ge, 1.0, Family::RegionEnclose), 1.0, 1.0).unwrap();
    let r = solve(&p, BUDGET).unwrap();
    assert_eq!(r.value(&VarRef::SlackLo(0)), 1.0);
    assert!((r.objective + 1.0).abs() < 1e-12);
    // With a zero cap the constraint is hard again.
    let mut p = BinaryProgram::new();
    p.declare_binary(x(1));
    p.add_constraint(LinearConstraint::new(vec![(1.0, x(1))], Relation::Le, 0.0, Family::TopologyDegree)).unwrap();
    p.add_soft(LinearConstraint::new(vec![(1.0, x(1))], Relation::Ge, 1.0, Family::RegionEnclose), 1.0, 0.0).unwrap();
    assert_eq!(solve(&p, BUDGET).unwrap().status, SolveStatus::Infeasible);
    assert_eq!(brute_force(&p).unwrap().status, SolveStatus::Infeasible);
}

#[test]
fn unconstrained_takes_positive_coefficients() {
    let mut p = BinaryProgram::new();
    for (i, c) in [0.4, -0.2, 0.0, 1.5, -3.0].into_iter().enumerate() {
        p.declare_binary(x(i as u32));
        p.set_objective(&x(i as u32), c).unwrap();
    }
    let r = solve(&p, BUDGET).unwrap();
    let on: Vec<VarRef> = r.active().collect();
    assert_eq!(on, vec![x(0), x(3)]);
}

#[test]
fn brute_force_refuses_large_programs() {
    let mut p = BinaryProgram::new();
    for i in 0..23 {
        p.declare_binary(x(i));
    }
    assert_eq!(brute_force(&p), Err(Error::TooLarge(23, 22)));
}

#[test]
fn infeasible_hard_rows() {
    let mut p = BinaryProgram::new();
    p.declare_binary(x(0));
    p.declare_binary(x(1));
    p.add_constraint(LinearConstraint::new(vec![(1.0, x(0)), (1.0, x(1))], Relation::Ge, 3.0, Family::TopologyDegree))
        .unwrap();
    assert_eq!(solve(&p, BUDGET).unwrap().status, SolveStatus::Infeasible);
    assert_eq!(brute_force(&p).unwrap().status, SolveStatus::Infeasible);
}

fn square_gt() -> PlanarGraph {
    PlanarGraph::from_points(&[(60., 60.), (140., 60.), (140., 140.), (60., 140.)], &[(0, 1), (1, 2), (2, 3), (0, 3)])
}

#[test]
fn zero_noise_square_is_recovered() {
    let d = simulate(&square_gt(), &NoiseConfig::zero(0), Canvas::default()).unwrap();
    let a = build(&d, &FeatureConfig::full(), &BuildParams::default()).unwrap();
    let r = solve(&a.program, BUDGET).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    let mut expected: Vec<VarRef> = (0..4).map(VarRef::Corner).collect();
    expected.extend([VarRef::edge(0, 1), VarRef::edge(0, 3), VarRef::edge(1, 2), VarRef::edge(2, 3)]);
    expected.push(VarRef::Region(0));
    let selected: Vec<VarRef> = r.active().filter(|v| !matches!(v, VarRef::Dir { .. })).collect();
    assert_eq!(selected, expected);
    assert!(r.assignment.iter().filter(|(v, _)| v.is_slack()).all(|(_, s)| *s == 0.0));
    assert!(check_feasible(&a.program, &r.assignment).unwrap().is_empty());
}

#[test]
fn check_feasible_reports_crossings_and_missing() {
    let d = simulate(&square_gt(), &NoiseConfig::zero(0), Canvas::default()).unwrap();
    let a = build(&d, &FeatureConfig::full(), &BuildParams::default()).unwrap();
    let r = solve(&a.program, BUDGET).unwrap();
    let mut bad = r.assignment.clone();
    bad.insert(VarRef::edge(0, 2), 1.0);
    bad.insert(VarRef::edge(1, 3), 1.0);
    let rep = check_feasible(&a.program, &bad).unwrap();
    assert_eq!(rep.count_family(Family::TopologyPlanarity), 1);

    // Flipping one edge off can only break rows that mention it.
    let mut flipped = r.assignment.clone();
    flipped.insert(VarRef::edge(0, 1), 0.0);
    let rep = check_feasible(&a.program, &flipped).unwrap();
    assert!(!rep.is_empty());
    for v in rep.violations.values().flatten() {
        assert!(a.program.constraints[v.index].terms.iter().any(|t| t.1 == VarRef::edge(0, 1)));
    }

    let mut missing = r.assignment.clone();
    missing.remove(&VarRef::Corner(0));
    assert!(matches!(check_feasible(&a.program, &missing), Err(Error::MissingVariable(_))));
}

#[test]
fn repeated_solves_are_identical() {
    let cfg = NoiseConfig { spurious_corner_rate: 2.0, seed: 3, ..NoiseConfig::default() };
    let d = simulate(&square_gt(), &cfg, Canvas::default()).unwrap();
    let a = build(&d, &FeatureConfig::full(), &BuildParams::default()).unwrap();
    let r1 = solve(&a.program, BUDGET).unwrap();
    let r2 = solve(&a.program, BUDGET).unwrap();
    assert_eq!(r1.assignment, r2.assignment);
    assert_eq!(r1.objective, r2.objective);
}

#[test]
fn zero_budget_reports_time_limit() {
    let cfg = NoiseConfig { spurious_corner_rate: 2.0, seed: 3, ..NoiseConfig::default() };
    let d = simulate(&square_gt(), &cfg, Canvas::default()).unwrap();
    let a = build(&d, &FeatureConfig::full(), &BuildParams::default()).unwrap();
    let r = solve(&a.program, Duration::ZERO).unwrap();
    assert_eq!(r.status, SolveStatus::TimeLimit);
    assert!(r.objective <= r.bound);
    assert!(check_feasible(&a.program, &r.assignment).unwrap().is_empty());
}
