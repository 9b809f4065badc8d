//! Exact optimization of binary programs.

mod compiled;
mod lp;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::time::{Duration, Instant};

use log::debug;

use crate::error::{Error, Result};
use crate::ipbuild::{BinaryProgram, Family, VarRef};
use compiled::Compiled;
use lp::{solve_relaxation, LpOutcome, RowPool};

/// Binary variable cap for exhaustive enumeration.
pub const BRUTE_FORCE_MAX_BINARIES: usize = 22;
/// Constraint violations above this are reported.
pub const FEASIBILITY_TOL: f64 = 1e-6;
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(300);
pub const MAX_TIME_LIMIT: Duration = Duration::from_secs(3600);

const INTEGRALITY_TOL: f64 = 1e-6;
const PRUNE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// Search stopped early; the assignment is the best incumbent found.
    TimeLimit,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub nodes: u64,
    pub lp_iterations: u64,
    pub active_rows: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub assignment: BTreeMap<VarRef, f64>,
    pub objective: f64,
    /// Upper bound on the optimum. Equals `objective` when optimal.
    pub bound: f64,
    pub stats: SolveStats,
}

impl SolveResult {
    fn infeasible(stats: SolveStats) -> Self {
        Self {
            status: SolveStatus::Infeasible,
            assignment: BTreeMap::new(),
            objective: f64::NEG_INFINITY,
            bound: f64::NEG_INFINITY,
            stats,
        }
    }

    fn from_values(c: &Compiled, status: SolveStatus, x: &[f64], bound: f64, stats: SolveStats) -> Self {
        let assignment = c.vars.iter().zip(x).map(|(v, val)| (*v, *val)).collect();
        let objective = c.objective(x);
        Self { status, assignment, objective, bound: bound.max(objective), stats }
    }

    pub fn value(&self, v: &VarRef) -> f64 {
        self.assignment.get(v).copied().unwrap_or(0.0)
    }

    /// Variables set to one.
    pub fn active(&self) -> impl Iterator<Item = VarRef> + '_ {
        self.assignment.iter().filter(|(v, x)| !v.is_slack() && **x > 0.5).map(|(v, _)| *v)
    }
}

/// Exhaustive search over every binary assignment, slacks in closed form.
///
/// Assignments are visited in lexicographic order with the first variable
/// most significant, and only strictly better ones replace the incumbent.
pub fn brute_force(p: &BinaryProgram) -> Result<SolveResult> {
    let start = Instant::now();
    let c = Compiled::new(p)?;
    let k = c.binaries.len();
    if k > BRUTE_FORCE_MAX_BINARIES {
        return Err(Error::TooLarge(k, BRUTE_FORCE_MAX_BINARIES));
    }
    let mut x = vec![0.0; c.n()];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0;
    for mask in 0u64..(1u64 << k) {
        nodes += 1;
        for (pos, &j) in c.binaries.iter().enumerate() {
            x[j] = ((mask >> (k - 1 - pos)) & 1) as f64;
        }
        if let Some(obj) = c.complete(&mut x) {
            if best.as_ref().is_none_or(|(b, _)| obj > *b) {
                best = Some((obj, x.clone()));
            }
        }
    }
    let stats = SolveStats { nodes, wall_time: start.elapsed(), ..SolveStats::default() };
    Ok(match best {
        Some((obj, x)) => SolveResult::from_values(&c, SolveStatus::Optimal, &x, obj, stats),
        None => SolveResult::infeasible(stats),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Position in `BinaryProgram::constraints`.
    pub index: usize,
    pub lhs: f64,
    pub amount: f64,
}

/// Constraint violations grouped by family.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeasibilityReport {
    pub violations: BTreeMap<Family, Vec<Violation>>,
}

impl FeasibilityReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self) -> usize {
        self.violations.values().map(Vec::len).sum()
    }

    pub fn count_family(&self, f: Family) -> usize {
        self.violations.get(&f).map_or(0, Vec::len)
    }

    pub fn topology_violations(&self) -> usize {
        self.violations.iter().filter(|(f, _)| f.is_topology()).map(|(_, v)| v.len()).sum()
    }
}

/// Lists every constraint of `p` violated by more than the tolerance.
pub fn check_feasible(p: &BinaryProgram, a: &BTreeMap<VarRef, f64>) -> Result<FeasibilityReport> {
    if let Some(v) = p.variables().iter().find(|v| !a.contains_key(&v.var)) {
        return Err(Error::MissingVariable(v.var.to_string()));
    }
    let mut report = FeasibilityReport::default();
    for (index, c) in p.constraints.iter().enumerate() {
        let lhs = c.lhs(|v| a.get(v).copied().unwrap_or(0.0));
        let amount = c.violation(lhs);
        if amount > FEASIBILITY_TOL {
            report.violations.entry(c.family).or_default().push(Violation { index, lhs, amount });
        }
    }
    Ok(report)
}

struct Node {
    bound: f64,
    seq: u64,
    fixes: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        self.bound.total_cmp(&o.bound).then(o.seq.cmp(&self.seq))
    }
}

struct Incumbent {
    objective: f64,
    x: Vec<f64>,
    edges: usize,
}

impl Incumbent {
    /// Higher objective wins; near-ties go to fewer active edges, then to the
    /// lexicographically smaller binary vector.
    fn offer(slot: &mut Option<Incumbent>, c: &Compiled, objective: f64, x: Vec<f64>) -> bool {
        let edges = c.active_edges(&x);
        let replace = match slot {
            None => true,
            Some(inc) => {
                if objective > inc.objective + PRUNE_TOL {
                    true
                } else if objective >= inc.objective - PRUNE_TOL {
                    let lex = c.binaries.iter().map(|&j| x[j]).partial_cmp(c.binaries.iter().map(|&j| inc.x[j]));
                    edges < inc.edges || (edges == inc.edges && lex == Some(Ordering::Less))
                } else {
                    false
                }
            }
        };
        if replace {
            *slot = Some(Incumbent { objective, x, edges });
        }
        replace
    }
}

/// Best-first branch and bound with LP relaxation bounds.
pub fn solve(p: &BinaryProgram, budget: Duration) -> Result<SolveResult> {
    let start = Instant::now();
    let deadline = start + budget.min(MAX_TIME_LIMIT);
    let c = Compiled::new(p)?;
    let mut stats = SolveStats::default();
    if c.trivially_infeasible {
        stats.wall_time = start.elapsed();
        return Ok(SolveResult::infeasible(stats));
    }
    let n = c.n();
    let mut pool = RowPool::new(c.rows.len());
    let mut incumbent: Option<Incumbent> = None;

    // Start from the empty selection when it is feasible.
    let mut zero = vec![0.0; n];
    if let Some(obj) = c.complete(&mut zero) {
        Incumbent::offer(&mut incumbent, &c, obj, zero);
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node { bound: f64::INFINITY, seq, fixes: Vec::new() });
    let mut timed_out = false;
    let mut open_bound = f64::NEG_INFINITY;
    let mut lo = vec![0.0; n];
    let mut hi = c.ub.clone();

    while let Some(node) = heap.pop() {
        let inc_obj = incumbent.as_ref().map_or(f64::NEG_INFINITY, |i| i.objective);
        if node.bound <= inc_obj + PRUNE_TOL {
            continue;
        }
        if Instant::now() >= deadline {
            open_bound = open_bound.max(node.bound);
            timed_out = true;
            break;
        }
        stats.nodes += 1;
        lo.iter_mut().for_each(|v| *v = 0.0);
        hi.copy_from_slice(&c.ub);
        for &(j, v) in &node.fixes {
            lo[j] = v;
            hi[j] = v;
        }
        let (lp_obj, x) = match solve_relaxation(&c, &lo, &hi, &mut pool, &mut stats.lp_iterations, Some(deadline)) {
            LpOutcome::Optimal { objective, x } => (objective, x),
            LpOutcome::Infeasible => continue,
            LpOutcome::Stopped => {
                open_bound = open_bound.max(node.bound);
                timed_out = true;
                break;
            }
        };
        if lp_obj <= inc_obj + PRUNE_TOL {
            continue;
        }

        // Most fractional binary, first in variable order on ties.
        let mut branch: Option<(usize, f64)> = None;
        for &j in &c.binaries {
            let f = (x[j] - x[j].round()).abs();
            if f > INTEGRALITY_TOL && branch.is_none_or(|(_, bf)| f > bf + 1e-12) {
                branch = Some((j, f));
            }
        }

        // Rounding heuristic, exact on integral points.
        let mut r = x.clone();
        for &j in &c.binaries {
            r[j] = r[j].round();
        }
        if let Some(obj) = c.complete(&mut r) {
            Incumbent::offer(&mut incumbent, &c, obj, r);
        }

        if let Some((j, _)) = branch {
            for v in [1.0, 0.0] {
                seq += 1;
                let mut fixes = node.fixes.clone();
                fixes.push((j, v));
                heap.push(Node { bound: lp_obj, seq, fixes });
            }
        }
    }
    if timed_out {
        for nd in heap.iter() {
            open_bound = open_bound.max(nd.bound);
        }
    }
    stats.active_rows = pool.active.len();
    stats.wall_time = start.elapsed();
    debug!(
        "solve: {} nodes, {} LP iterations, {} of {} rows active, {:?}",
        stats.nodes,
        stats.lp_iterations,
        stats.active_rows,
        c.rows.len(),
        stats.wall_time
    );
    Ok(match incumbent {
        None if timed_out => {
            let mut r = SolveResult::infeasible(stats);
            r.status = SolveStatus::TimeLimit;
            r.bound = open_bound;
            r
        }
        None => SolveResult::infeasible(stats),
        Some(inc) if timed_out => {
            SolveResult::from_values(&c, SolveStatus::TimeLimit, &inc.x, open_bound.max(inc.objective), stats)
        }
        Some(inc) => SolveResult::from_values(&c, SolveStatus::Optimal, &inc.x, inc.objective, stats),
    })
}

#[cfg(test)]
mod tests;
