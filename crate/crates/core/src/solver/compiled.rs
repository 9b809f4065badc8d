#![allow(clippy::needless_range_loop)]

use crate::error::Result;
use crate::ipbuild::{BinaryProgram, VarKind, VarRef};

/// Primal feasibility tolerance for exact evaluations.
pub(crate) const EVAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub terms: Vec<(usize, f64)>,
    pub lo: f64,
    pub hi: f64,
    /// The single continuous variable of the row, if any.
    pub slack: Option<(usize, f64)>,
}

/// Index-based view of a program.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub vars: Vec<VarRef>,
    pub obj: Vec<f64>,
    pub ub: Vec<f64>,
    pub is_bin: Vec<bool>,
    pub binaries: Vec<usize>,
    pub rows: Vec<Row>,
    /// Rows with no terms that already hold; dropped. Failing ones make the
    /// program infeasible.
    pub trivially_infeasible: bool,
    /// Which row each continuous variable appears in.
    pub cont_row: Vec<Option<usize>>,
    pub is_edge: Vec<bool>,
}

impl Compiled {
    pub fn new(p: &BinaryProgram) -> Result<Self> {
        p.validate()?;
        let n = p.num_vars();
        let mut vars = Vec::with_capacity(n);
        let mut ub = Vec::with_capacity(n);
        let mut is_bin = Vec::with_capacity(n);
        for v in p.variables() {
            vars.push(v.var);
            match v.kind {
                VarKind::Binary => {
                    ub.push(1.0);
                    is_bin.push(true);
                }
                VarKind::Slack { cap } => {
                    ub.push(cap);
                    is_bin.push(false);
                }
            }
        }
        let mut rows = Vec::new();
        let mut trivially_infeasible = false;
        let mut cont_row = vec![None; n];
        for c in &p.constraints {
            let (lo, hi) = c.relation.bounds(c.rhs);
            let terms: Vec<(usize, f64)> = c
                .terms
                .iter()
                .filter(|(coef, _)| *coef != 0.0)
                .map(|(coef, v)| (p.position(v).expect("validated"), *coef))
                .collect();
            if terms.is_empty() {
                if lo > EVAL_TOL || hi < -EVAL_TOL {
                    trivially_infeasible = true;
                }
                continue;
            }
            let slack = terms.iter().find(|(j, _)| !is_bin[*j]).copied();
            if let Some((j, _)) = slack {
                cont_row[j] = Some(rows.len());
            }
            rows.push(Row { terms, lo, hi, slack });
        }
        let binaries = (0..n).filter(|&j| is_bin[j]).collect();
        let is_edge = vars.iter().map(|v| matches!(v, VarRef::Edge(..))).collect();
        Ok(Self {
            vars,
            obj: p.objective().to_vec(),
            ub,
            is_bin,
            binaries,
            rows,
            trivially_infeasible,
            cont_row,
            is_edge,
        })
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// Completes a binary assignment with the best continuous values and
    /// returns the objective, or `None` if no completion is feasible.
    ///
    /// Each continuous variable lives in at most one row, so it is set in
    /// closed form from that row alone.
    pub fn complete(&self, x: &mut [f64]) -> Option<f64> {
        if self.trivially_infeasible {
            return None;
        }
        for j in 0..self.n() {
            if !self.is_bin[j] && self.cont_row[j].is_none() {
                x[j] = if self.obj[j] > 0.0 { self.ub[j] } else { 0.0 };
            }
        }
        for row in &self.rows {
            let act: f64 = row.terms.iter().filter(|(j, _)| self.is_bin[*j]).map(|(j, a)| a * x[*j]).sum();
            match row.slack {
                None => {
                    if act < row.lo - EVAL_TOL || act > row.hi + EVAL_TOL {
                        return None;
                    }
                }
                Some((j, a)) => {
                    // a * s must land in [lo - act, hi - act].
                    let (mut smin, mut smax) = ((row.lo - act) / a, (row.hi - act) / a);
                    if a < 0.0 {
                        std::mem::swap(&mut smin, &mut smax);
                    }
                    let smin = smin.max(0.0);
                    let smax = smax.min(self.ub[j]);
                    if smin > smax + EVAL_TOL / a.abs() {
                        return None;
                    }
                    let smax = smax.max(smin);
                    x[j] = if self.obj[j] > 0.0 { smax } else { smin.min(self.ub[j]) };
                }
            }
        }
        Some(self.objective(x))
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.obj.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn active_edges(&self, x: &[f64]) -> usize {
        (0..self.n()).filter(|&j| self.is_edge[j] && x[j] > 0.5).count()
    }
}
