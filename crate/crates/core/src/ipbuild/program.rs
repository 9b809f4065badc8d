use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Decision variable key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarRef {
    Corner(u32),
    /// Edge between two corner ids, smaller id first.
    Edge(u32, u32),
    Region(u32),
    Dir {
        corner: u32,
        bin: u8,
    },
    /// Slack pair index `k`; the two halves of a softened equality share it.
    SlackUp(u32),
    SlackLo(u32),
}

impl VarRef {
    pub fn edge(a: u32, b: u32) -> Self {
        VarRef::Edge(a.min(b), a.max(b))
    }

    pub fn is_slack(&self) -> bool {
        matches!(self, VarRef::SlackUp(_) | VarRef::SlackLo(_))
    }

    /// Parses the names produced by `Display`.
    pub fn parse(s: &str) -> Option<Self> {
        let num = |t: &str| t.parse::<u32>().ok();
        let parts: Vec<&str> = s.split('_').collect();
        match parts.as_slice() {
            ["c", a] => Some(VarRef::Corner(num(a)?)),
            ["e", a, b] => Some(VarRef::Edge(num(a)?, num(b)?)),
            ["r", a] => Some(VarRef::Region(num(a)?)),
            ["d", a, b] => Some(VarRef::Dir { corner: num(a)?, bin: b.strip_prefix('b')?.parse().ok()? }),
            ["su", k] => Some(VarRef::SlackUp(num(k)?)),
            ["sl", k] => Some(VarRef::SlackLo(num(k)?)),
            _ => None,
        }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRef::Corner(c) => write!(f, "c_{c}"),
            VarRef::Edge(a, b) => write!(f, "e_{a}_{b}"),
            VarRef::Region(r) => write!(f, "r_{r}"),
            VarRef::Dir { corner, bin } => write!(f, "d_{corner}_b{bin}"),
            VarRef::SlackUp(k) => write!(f, "su_{k}"),
            VarRef::SlackLo(k) => write!(f, "sl_{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarKind {
    Binary,
    /// Continuous in `[0, cap]`.
    Slack {
        cap: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    /// Activity interval `[lo, hi]` allowed by `lhs rel rhs`.
    pub fn bounds(self, rhs: f64) -> (f64, f64) {
        match self {
            Relation::Le => (f64::NEG_INFINITY, rhs),
            Relation::Eq => (rhs, rhs),
            Relation::Ge => (rhs, f64::INFINITY),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    TopologyEndpoint,
    TopologyDegree,
    TopologyPlanarity,
    RegionNoncross,
    RegionEnclose,
    RegionRegion,
    CeBin,
    CePrune,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::TopologyEndpoint,
        Family::TopologyDegree,
        Family::TopologyPlanarity,
        Family::RegionNoncross,
        Family::RegionEnclose,
        Family::RegionRegion,
        Family::CeBin,
        Family::CePrune,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::TopologyEndpoint => "topology_endpoint",
            Family::TopologyDegree => "topology_degree",
            Family::TopologyPlanarity => "topology_planarity",
            Family::RegionNoncross => "region_noncross",
            Family::RegionEnclose => "region_enclose",
            Family::RegionRegion => "region_region",
            Family::CeBin => "ce_bin",
            Family::CePrune => "ce_prune",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Family::ALL.into_iter().find(|f| f.tag() == s)
    }

    pub fn is_topology(self) -> bool {
        matches!(self, Family::TopologyEndpoint | Family::TopologyDegree | Family::TopologyPlanarity)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(f64, VarRef)>,
    pub relation: Relation,
    pub rhs: f64,
    pub family: Family,
    pub softened: bool,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(f64, VarRef)>, relation: Relation, rhs: f64, family: Family) -> Self {
        Self { terms, relation, rhs, family, softened: false }
    }

    pub fn lhs(&self, value: impl Fn(&VarRef) -> f64) -> f64 {
        self.terms.iter().map(|(c, v)| c * value(v)).sum()
    }

    /// Amount by which `lhs` misses the relation; zero when satisfied.
    pub fn violation(&self, lhs: f64) -> f64 {
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variable {
    pub var: VarRef,
    pub kind: VarKind,
}

/// A maximization program over binary indicators and bounded slacks.
#[derive(Debug, Clone, Default)]
pub struct BinaryProgram {
    variables: Vec<Variable>,
    index: HashMap<VarRef, usize>,
    objective: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
    next_slack: u32,
}

impl PartialEq for BinaryProgram {
    fn eq(&self, o: &Self) -> bool {
        self.variables == o.variables && self.objective == o.objective && self.constraints == o.constraints
    }
}

impl BinaryProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a variable, returning its position. Redeclaring returns the
    /// existing position unchanged.
    pub fn declare(&mut self, var: VarRef, kind: VarKind) -> usize {
        if let Some(&i) = self.index.get(&var) {
            return i;
        }
        let i = self.variables.len();
        self.variables.push(Variable { var, kind });
        self.index.insert(var, i);
        self.objective.push(0.0);
        if let VarRef::SlackUp(k) | VarRef::SlackLo(k) = var {
            self.next_slack = self.next_slack.max(k + 1);
        }
        i
    }

    pub fn declare_binary(&mut self, var: VarRef) -> usize {
        self.declare(var, VarKind::Binary)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn position(&self, var: &VarRef) -> Option<usize> {
        self.index.get(var).copied()
    }

    pub fn contains(&self, var: &VarRef) -> bool {
        self.index.contains_key(var)
    }

    /// Objective coefficients aligned with `variables()`.
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_of(&self, var: &VarRef) -> f64 {
        self.position(var).map_or(0.0, |i| self.objective[i])
    }

    pub fn set_objective(&mut self, var: &VarRef, coef: f64) -> Result<()> {
        let i = self.position(var).ok_or_else(|| Error::MissingVariable(var.to_string()))?;
        self.objective[i] = coef;
        Ok(())
    }

    pub fn add_objective(&mut self, var: &VarRef, delta: f64) -> Result<()> {
        let i = self.position(var).ok_or_else(|| Error::MissingVariable(var.to_string()))?;
        self.objective[i] += delta;
        Ok(())
    }

    pub fn binaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.variables.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(i, _)| i)
    }

    pub fn num_binaries(&self) -> usize {
        self.binaries().count()
    }

    /// Adds a hard constraint; all its variables must already be declared.
    pub fn add_constraint(&mut self, c: LinearConstraint) -> Result<()> {
        if let Some((_, v)) = c.terms.iter().find(|(_, v)| !self.contains(v)) {
            return Err(Error::MissingVariable(v.to_string()));
        }
        self.constraints.push(c);
        Ok(())
    }

    /// Adds `c` softened by fresh slack variables in `[0, cap]`, each costing
    /// `lambda` per unit. Equalities split into a `<=` and a `>=` half.
    pub fn add_soft(&mut self, c: LinearConstraint, lambda: f64, cap: f64) -> Result<()> {
        let k = self.next_slack;
        let (cons, deltas) = soften(&c, lambda, cap, k);
        self.next_slack += 1;
        for (var, kind, delta) in deltas {
            self.declare(var, kind);
            self.add_objective(&var, delta)?;
        }
        for c in cons {
            self.add_constraint(c)?;
        }
        Ok(())
    }

    /// Checks the declared-variable invariants and that every slack appears
    /// in at most one constraint.
    pub fn validate(&self) -> Result<()> {
        let mut uses = vec![0usize; self.variables.len()];
        for c in &self.constraints {
            let mut seen = std::collections::HashSet::new();
            for (coef, v) in &c.terms {
                let i = self.position(v).ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                if !seen.insert(i) {
                    return Err(Error::Unsupported(format!("{v} repeated in one constraint")));
                }
                if !coef.is_finite() {
                    return Err(Error::Unsupported(format!("non-finite coefficient on {v}")));
                }
                uses[i] += 1;
            }
        }
        for (i, v) in self.variables.iter().enumerate() {
            if let VarKind::Slack { cap } = v.kind {
                if uses[i] > 1 {
                    return Err(Error::Unsupported(format!("slack {} used by several constraints", v.var)));
                }
                if !(cap >= 0.0 && cap.is_finite()) {
                    return Err(Error::Unsupported(format!("slack {} has cap {cap}", v.var)));
                }
            }
        }
        Ok(())
    }
}

/// Softening of one constraint with slack index `k`.
///
/// Returns the replacement constraints and the slack variables to declare
/// with their objective contributions (`-lambda` each).
pub fn soften(
    c: &LinearConstraint,
    lambda: f64,
    cap: f64,
    k: u32,
) -> (Vec<LinearConstraint>, Vec<(VarRef, VarKind, f64)>) {
    let kind = VarKind::Slack { cap };
    let up = |c: &LinearConstraint| {
        let mut t = c.terms.clone();
        t.push((-1.0, VarRef::SlackUp(k)));
        LinearConstraint { terms: t, relation: Relation::Le, rhs: c.rhs, family: c.family, softened: true }
    };
    let lo = |c: &LinearConstraint| {
        let mut t = c.terms.clone();
        t.push((1.0, VarRef::SlackLo(k)));
        LinearConstraint { terms: t, relation: Relation::Ge, rhs: c.rhs, family: c.family, softened: true }
    };
    match c.relation {
        Relation::Le => (vec![up(c)], vec![(VarRef::SlackUp(k), kind, -lambda)]),
        Relation::Ge => (vec![lo(c)], vec![(VarRef::SlackLo(k), kind, -lambda)]),
        Relation::Eq => {
            (vec![up(c), lo(c)], vec![(VarRef::SlackUp(k), kind, -lambda), (VarRef::SlackLo(k), kind, -lambda)])
        }
    }
}
