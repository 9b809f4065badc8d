//! Dense bounded-variable primal simplex over a growing set of rows.
//!
//! Every active row `i` carries a logical variable `r_i = a_i . x` bounded by
//! the row's activity interval, so the equality system is `A x - r = 0` and
//! all inequalities become variable bounds. Rows are activated lazily: the LP
//! is solved over the active rows, then every violated pool row is added with
//! its logical basic and the loop resumes. Structurals that appear in no
//! active row have no tableau column and sit at their best bound.
#![allow(clippy::needless_range_loop)]

use std::time::Instant;

use super::compiled::Compiled;

const FEAS_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIV_TOL: f64 = 1e-9;
/// Violation above which an inactive row is activated.
const SEPARATION_TOL: f64 = 1e-7;
const DEGENERATE_LIMIT: usize = 50;
const REFRESH_EVERY: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Basic(usize),
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal {
        objective: f64,
        x: Vec<f64>,
    },
    Infeasible,
    /// Deadline or iteration cap reached.
    Stopped,
}

/// Rows activated so far, shared across branch-and-bound nodes.
#[derive(Debug, Clone)]
pub(crate) struct RowPool {
    pub active: Vec<usize>,
    is_active: Vec<bool>,
}

impl RowPool {
    pub fn new(rows: usize) -> Self {
        Self { active: Vec::new(), is_active: vec![false; rows] }
    }

    fn activate(&mut self, r: usize) -> bool {
        if self.is_active[r] {
            return false;
        }
        self.is_active[r] = true;
        self.active.push(r);
        true
    }
}

struct Simplex<'a> {
    prob: &'a Compiled,
    n: usize,
    /// Variable id of each tableau column; logicals have ids `n + i`.
    cols: Vec<usize>,
    col_of: Vec<usize>,
    tab: Vec<Vec<f64>>,
    basis: Vec<usize>,
    state: Vec<State>,
    x: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    bland: bool,
    degenerate_run: usize,
}

const NO_COL: usize = usize::MAX;

impl<'a> Simplex<'a> {
    fn new(prob: &'a Compiled, lo: &[f64], hi: &[f64]) -> Self {
        let n = prob.n();
        let mut x = Vec::with_capacity(n);
        let mut state = Vec::with_capacity(n);
        for j in 0..n {
            if prob.obj[j] > 0.0 {
                x.push(hi[j]);
                state.push(State::Upper);
            } else {
                x.push(lo[j]);
                state.push(State::Lower);
            }
        }
        Self {
            prob,
            n,
            cols: Vec::new(),
            col_of: vec![NO_COL; n],
            tab: Vec::new(),
            basis: Vec::new(),
            state,
            x,
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            cost: prob.obj.clone(),
            bland: false,
            degenerate_run: 0,
        }
    }

    fn add_column(&mut self, var: usize) -> usize {
        let c = self.cols.len();
        self.cols.push(var);
        if var >= self.col_of.len() {
            self.col_of.resize(var + 1, NO_COL);
        }
        self.col_of[var] = c;
        for row in &mut self.tab {
            row.push(0.0);
        }
        c
    }

    /// Appends compiled row `r` with a fresh basic logical.
    fn add_row(&mut self, r: usize) {
        let row = &self.prob.rows[r];
        for &(j, _) in &row.terms {
            if self.col_of[j] == NO_COL {
                self.add_column(j);
            }
        }
        let logical = self.n + self.tab.len();
        self.x.push(row.terms.iter().map(|&(j, a)| a * self.x[j]).sum());
        self.lo.push(row.lo);
        self.hi.push(row.hi);
        self.cost.push(0.0);
        self.state.push(State::Basic(self.tab.len()));
        let lc = self.add_column(logical);
        let mut new = vec![0.0; self.cols.len()];
        new[lc] = 1.0;
        for &(j, a) in &row.terms {
            new[self.col_of[j]] -= a;
        }
        // Express basic structurals through the nonbasics.
        for &(j, _) in &row.terms {
            if let State::Basic(i) = self.state[j] {
                let f = new[self.col_of[j]];
                if f != 0.0 {
                    for (v, t) in new.iter_mut().zip(&self.tab[i]) {
                        *v -= f * t;
                    }
                    new[self.col_of[j]] = 0.0;
                }
            }
        }
        self.tab.push(new);
        self.basis.push(logical);
    }

    fn refresh_basics(&mut self) {
        for (i, row) in self.tab.iter().enumerate() {
            let b = self.basis[i];
            let mut v = 0.0;
            for (c, &t) in row.iter().enumerate() {
                let var = self.cols[c];
                if var != b && t != 0.0 {
                    v -= t * self.x[var];
                }
            }
            self.x[b] = v;
        }
    }

    fn infeasibility(&self, v: usize) -> f64 {
        if self.x[v] < self.lo[v] - FEAS_TOL {
            self.lo[v] - self.x[v]
        } else if self.x[v] > self.hi[v] + FEAS_TOL {
            self.x[v] - self.hi[v]
        } else {
            0.0
        }
    }

    /// Runs simplex iterations until optimal over the active rows.
    fn run(&mut self, iters: &mut u64, cap: u64, deadline: Option<Instant>) -> LpOutcome {
        let m = self.tab.len();
        let mut cb = vec![0.0; m];
        let mut d = vec![0.0; self.cols.len()];
        let mut local = 0u64;
        loop {
            local += 1;
            *iters += 1;
            if local > cap {
                return LpOutcome::Stopped;
            }
            if local.is_multiple_of(REFRESH_EVERY) {
                self.refresh_basics();
                if deadline.is_some_and(|t| Instant::now() >= t) {
                    return LpOutcome::Stopped;
                }
            }

            let mut phase1 = false;
            for i in 0..m {
                let b = self.basis[i];
                cb[i] = if self.x[b] < self.lo[b] - FEAS_TOL {
                    phase1 = true;
                    1.0
                } else if self.x[b] > self.hi[b] + FEAS_TOL {
                    phase1 = true;
                    -1.0
                } else {
                    0.0
                };
            }
            if !phase1 {
                for i in 0..m {
                    cb[i] = self.cost[self.basis[i]];
                }
            }

            // Reduced costs d_c = c_c - sum_i cb_i tab[i][c].
            for (c, dc) in d.iter_mut().enumerate() {
                let var = self.cols[c];
                *dc = if phase1 { 0.0 } else { self.cost[var] };
            }
            for i in 0..m {
                if cb[i] != 0.0 {
                    let w = cb[i];
                    for (dc, &t) in d.iter_mut().zip(&self.tab[i]) {
                        *dc -= w * t;
                    }
                }
            }

            let mut enter: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for (c, &dc) in d.iter().enumerate() {
                let var = self.cols[c];
                let dir = match self.state[var] {
                    State::Basic(_) => continue,
                    _ if self.hi[var] - self.lo[var] <= 0.0 => continue,
                    State::Lower if dc > DUAL_TOL => 1.0,
                    State::Upper if dc < -DUAL_TOL => -1.0,
                    _ => continue,
                };
                if self.bland {
                    if enter.is_none_or(|(e, _)| var < self.cols[e]) {
                        enter = Some((c, dir));
                    }
                } else if dc.abs() > best {
                    best = dc.abs();
                    enter = Some((c, dir));
                }
            }

            let Some((ec, dir)) = enter else {
                self.refresh_basics();
                let still = (0..m).any(|i| self.infeasibility(self.basis[i]) > 0.0);
                if phase1 && still {
                    return LpOutcome::Infeasible;
                }
                if still {
                    // Drift after refresh; iterate again.
                    continue;
                }
                let objective = (0..self.n).map(|j| self.cost[j] * self.x[j]).sum();
                return LpOutcome::Optimal { objective, x: self.x[..self.n].to_vec() };
            };
            let ev = self.cols[ec];

            // Ratio test.
            let own = self.hi[ev] - self.lo[ev];
            let mut t_best = own;
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_g = 0.0;
            for i in 0..m {
                let g = -self.tab[i][ec] * dir;
                if g.abs() <= PIV_TOL {
                    continue;
                }
                let b = self.basis[i];
                let (v, l, u) = (self.x[b], self.lo[b], self.hi[b]);
                let (t, to_upper) = if v < l - FEAS_TOL {
                    if g > 0.0 {
                        ((l - v) / g, false)
                    } else {
                        continue;
                    }
                } else if v > u + FEAS_TOL {
                    if g < 0.0 {
                        ((u - v) / g, true)
                    } else {
                        continue;
                    }
                } else if g > 0.0 {
                    if u.is_infinite() {
                        continue;
                    }
                    ((u - v) / g, true)
                } else {
                    if l.is_infinite() {
                        continue;
                    }
                    ((l - v) / g, false)
                };
                let t = t.max(0.0);
                let better = match leave {
                    None => t < t_best,
                    Some((li, _)) => {
                        if t < t_best - 1e-12 {
                            true
                        } else if t <= t_best + 1e-12 {
                            if self.bland {
                                b < self.basis[li]
                            } else {
                                g.abs() > leave_g
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    t_best = t;
                    leave = Some((i, to_upper));
                    leave_g = g.abs();
                }
            }

            if t_best.is_infinite() {
                // Unbounded direction; cannot happen with bounded structurals.
                return LpOutcome::Stopped;
            }
            if t_best <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_LIMIT {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }

            // Move.
            if t_best > 0.0 {
                self.x[ev] += dir * t_best;
                for i in 0..m {
                    let g = -self.tab[i][ec] * dir;
                    if g != 0.0 {
                        let b = self.basis[i];
                        self.x[b] += g * t_best;
                    }
                }
            }

            match leave {
                None => {
                    // Bound flip.
                    if dir > 0.0 {
                        self.x[ev] = self.hi[ev];
                        self.state[ev] = State::Upper;
                    } else {
                        self.x[ev] = self.lo[ev];
                        self.state[ev] = State::Lower;
                    }
                }
                Some((r, to_upper)) => {
                    let lv = self.basis[r];
                    if to_upper {
                        self.x[lv] = self.hi[lv];
                        self.state[lv] = State::Upper;
                    } else {
                        self.x[lv] = self.lo[lv];
                        self.state[lv] = State::Lower;
                    }
                    self.pivot(r, ec);
                    self.basis[r] = ev;
                    self.state[ev] = State::Basic(r);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.tab[r][c];
        let inv = 1.0 / piv;
        for v in self.tab[r].iter_mut() {
            *v *= inv;
        }
        self.tab[r][c] = 1.0;
        let prow = std::mem::take(&mut self.tab[r]);
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
                row[c] = 0.0;
            }
        }
        self.tab[r] = prow;
    }
}

/// Maximizes the LP relaxation under the node bounds `lo`/`hi`, activating
/// violated rows from the pool as needed.
pub(crate) fn solve_relaxation(
    prob: &Compiled,
    lo: &[f64],
    hi: &[f64],
    pool: &mut RowPool,
    iters: &mut u64,
    deadline: Option<Instant>,
) -> LpOutcome {
    let mut s = Simplex::new(prob, lo, hi);
    for k in 0..pool.active.len() {
        s.add_row(pool.active[k]);
    }
    loop {
        let cap = 50 * (s.cols.len() as u64 + s.tab.len() as u64) + 1000;
        let out = s.run(iters, cap, deadline);
        let LpOutcome::Optimal { .. } = out else {
            return out;
        };
        let mut violated: Vec<(f64, usize)> = Vec::new();
        for (r, row) in prob.rows.iter().enumerate() {
            if pool.is_active[r] {
                continue;
            }
            let act: f64 = row.terms.iter().map(|&(j, a)| a * s.x[j]).sum();
            let v = (row.lo - act).max(act - row.hi);
            if v > SEPARATION_TOL {
                violated.push((v, r));
            }
        }
        if violated.is_empty() {
            return out;
        }
        violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        violated.truncate(200);
        violated.sort_by_key(|v| v.1);
        for (_, r) in violated {
            if pool.activate(r) {
                s.add_row(r);
            }
        }
        s.bland = false;
        s.degenerate_run = 0;
    }
}
