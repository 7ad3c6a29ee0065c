//! Dense-tableau bounded-variable primal simplex.
//!
//! Every row `r` gets a logical variable `s_r = a_r x` whose bounds encode
//! the relation, so the working system is `A x - s = 0`. Rows whose logical
//! would start outside its bounds get an artificial variable and are repaired
//! in phase one. Dantzig pricing switches to Bland's rule while the method
//! stalls on degenerate pivots.

use std::time::Instant;

use super::model::{LinearModel, Relation};
use super::{MilpSolution, MilpStatus};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_threshold: usize,
    pub pivot_tol: f64,
    pub optimality_tol: f64,
    pub feasibility_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 50_000,
            stall_threshold: 50,
            pivot_tol: 1e-7,
            optimality_tol: 1e-9,
            feasibility_tol: 1e-7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub(crate) struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// Solves the LP relaxation of `model` (binaries relaxed to `[0, 1]`).
pub fn simplex_solve(model: &LinearModel) -> Result<MilpSolution> {
    simplex_solve_with(model, &SimplexOptions::default())
}

pub fn simplex_solve_with(model: &LinearModel, opts: &SimplexOptions) -> Result<MilpSolution> {
    model.validate()?;
    let t0 = Instant::now();
    let lower: Vec<f64> = model.vars.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.vars.iter().map(|v| v.upper).collect();
    let r = solve_lp(model, &lower, &upper, opts)?;
    let status = match r.status {
        LpStatus::Optimal => MilpStatus::Optimal,
        LpStatus::Infeasible => MilpStatus::Infeasible,
        LpStatus::IterationLimit => MilpStatus::IterationLimit,
    };
    let optimal = status == MilpStatus::Optimal;
    Ok(MilpSolution {
        status,
        objective: if optimal { r.objective } else { f64::INFINITY },
        bound: if optimal { r.objective } else { f64::NEG_INFINITY },
        values: if optimal { r.x } else { Vec::new() },
        nodes: 0,
        iterations: r.iterations,
        elapsed: t0.elapsed(),
    })
}

struct Tableau {
    m: usize,
    cols: usize,
    structural: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    x: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    dj: Vec<f64>,
    iterations: usize,
}

enum Phase {
    Optimal,
    IterationLimit,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, j: usize) -> f64 {
        self.t[r * self.cols + j]
    }

    fn recompute_reduced_costs(&mut self) {
        self.dj.copy_from_slice(&self.cost);
        for r in 0..self.m {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.t[r * self.cols..(r + 1) * self.cols];
                for (d, &a) in self.dj.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.dj[b] = 0.0;
        }
    }

    /// Recomputes basic values from the nonbasic ones: row `r` reads `sum_j T_rj x_j = 0`.
    fn refresh_basics(&mut self) {
        for r in 0..self.m {
            let row = &self.t[r * self.cols..(r + 1) * self.cols];
            let mut v = 0.0;
            for (j, &a) in row.iter().enumerate() {
                if a != 0.0 && !self.is_basic[j] {
                    v -= a * self.x[j];
                }
            }
            self.x[self.basis[r]] = v;
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let piv = self.t[r * cols + q];
        let mut prow: Vec<(usize, f64)> = Vec::new();
        for j in 0..cols {
            let v = self.t[r * cols + j] / piv;
            let v = if v.abs() < 1e-14 { 0.0 } else { v };
            self.t[r * cols + j] = v;
            if v != 0.0 {
                prow.push((j, v));
            }
        }
        self.t[r * cols + q] = 1.0;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + q];
            if f != 0.0 {
                let row = &mut self.t[i * cols..(i + 1) * cols];
                for &(j, v) in &prow {
                    row[j] -= f * v;
                }
                row[q] = 0.0;
            }
        }
        let f = self.dj[q];
        if f != 0.0 {
            for &(j, v) in &prow {
                self.dj[j] -= f * v;
            }
        }
        self.dj[q] = 0.0;
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    fn run(&mut self, opts: &SimplexOptions) -> Result<Phase> {
        let mut stall = 0usize;
        let mut since_refresh = 0usize;
        // Reduced costs are updated incrementally; confirm optimality against fresh ones.
        let mut fresh = false;
        loop {
            if self.iterations >= opts.max_iterations {
                return Ok(Phase::IterationLimit);
            }
            let bland = stall >= opts.stall_threshold;

            // Pricing.
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..self.cols {
                if self.is_basic[j] || self.hi[j] - self.lo[j] <= 0.0 {
                    continue;
                }
                let d = self.dj[j];
                let dir = if self.x[j] == self.lo[j] && d < -opts.optimality_tol {
                    1.0
                } else if self.x[j] == self.hi[j] && d > opts.optimality_tol {
                    -1.0
                } else {
                    continue;
                };
                if bland {
                    entering = Some((j, dir, d.abs()));
                    break;
                }
                if entering.is_none_or(|(_, _, s)| d.abs() > s) {
                    entering = Some((j, dir, d.abs()));
                }
            }
            let Some((q, dir, _)) = entering else {
                if fresh {
                    return Ok(Phase::Optimal);
                }
                self.refresh_basics();
                self.recompute_reduced_costs();
                fresh = true;
                continue;
            };
            fresh = false;

            // Ratio test.
            let flip = self.hi[q] - self.lo[q];
            let mut best = f64::INFINITY;
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.at(r, q) * dir;
                let b = self.basis[r];
                let limit = if a > opts.pivot_tol && self.lo[b].is_finite() {
                    (self.x[b] - self.lo[b]) / a
                } else if a < -opts.pivot_tol && self.hi[b].is_finite() {
                    (self.hi[b] - self.x[b]) / -a
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let take = match leave {
                    None => true,
                    Some(_) if limit < best - 1e-12 => true,
                    Some((lr, la)) if limit <= best + 1e-12 => {
                        if bland {
                            b < self.basis[lr]
                        } else {
                            a.abs() > la.abs()
                        }
                    }
                    Some(_) => false,
                };
                if take {
                    best = best.min(limit);
                    leave = Some((r, a));
                }
            }
            let theta = best.min(flip);
            if theta.is_infinite() {
                return Err(Error::Solver("LP relaxation is unbounded".into()));
            }

            self.iterations += 1;
            let step = dir * theta;
            if step != 0.0 {
                for r in 0..self.m {
                    let a = self.at(r, q);
                    if a != 0.0 {
                        let b = self.basis[r];
                        self.x[b] -= a * step;
                    }
                }
            }
            match leave {
                Some((r, a)) if best < flip => {
                    let b = self.basis[r];
                    self.x[b] = if a > 0.0 { self.lo[b] } else { self.hi[b] };
                    self.x[q] += step;
                    self.pivot(r, q);
                }
                _ => {
                    // Bound flip.
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
            }
            if theta <= 1e-12 {
                stall += 1;
            } else {
                stall = 0;
            }
            since_refresh += 1;
            if since_refresh >= 200 {
                self.refresh_basics();
                since_refresh = 0;
            }
        }
    }
}

/// Solves the LP over `model`'s rows with the given variable bounds.
pub(crate) fn solve_lp(model: &LinearModel, lower: &[f64], upper: &[f64], opts: &SimplexOptions) -> Result<LpResult> {
    let ns = model.vars.len();
    let m = model.constraints.len();

    for j in 0..ns {
        if lower[j] > upper[j] + opts.feasibility_tol {
            return Ok(LpResult { status: LpStatus::Infeasible, objective: f64::INFINITY, x: Vec::new(), iterations: 0 });
        }
    }

    // Nonbasic structurals start at their lower bound.
    let x0: Vec<f64> = (0..ns).map(|j| lower[j].min(upper[j])).collect();
    let activity: Vec<f64> = model
        .constraints
        .iter()
        .map(|c| c.terms.iter().map(|&(v, a)| a * x0[v.0]).sum())
        .collect();
    let logical_bounds: Vec<(f64, f64)> = model
        .constraints
        .iter()
        .map(|c| match c.relation {
            Relation::Le => (f64::NEG_INFINITY, c.rhs),
            Relation::Ge => (c.rhs, f64::INFINITY),
            Relation::Eq => (c.rhs, c.rhs),
        })
        .collect();
    let needs_art: Vec<bool> = (0..m)
        .map(|r| {
            let (lo, hi) = logical_bounds[r];
            activity[r] < lo - 1e-12 || activity[r] > hi + 1e-12
        })
        .collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let cols = ns + m + n_art;

    let mut tab = Tableau {
        m,
        cols,
        structural: ns,
        t: vec![0.0; m * cols],
        basis: vec![0; m],
        is_basic: vec![false; cols],
        x: vec![0.0; cols],
        lo: vec![0.0; cols],
        hi: vec![0.0; cols],
        cost: vec![0.0; cols],
        dj: vec![0.0; cols],
        iterations: 0,
    };
    tab.x[..ns].copy_from_slice(&x0);
    tab.lo[..ns].copy_from_slice(lower);
    tab.hi[..ns].copy_from_slice(upper);
    for j in 0..ns {
        tab.hi[j] = tab.hi[j].max(tab.lo[j]);
    }

    let mut next_art = ns + m;
    for (r, c) in model.constraints.iter().enumerate() {
        let s = ns + r;
        let (lo, hi) = logical_bounds[r];
        tab.lo[s] = lo;
        tab.hi[s] = hi;
        let row = &mut tab.t[r * cols..(r + 1) * cols];
        if needs_art[r] {
            // a x - s + d t = 0 with t basic: row scaled by d.
            let res = activity[r] - if activity[r] > hi { hi } else { lo };
            let d = if res >= 0.0 { -1.0 } else { 1.0 };
            for &(v, a) in &c.terms {
                row[v.0] += d * a;
            }
            row[s] = -d;
            row[next_art] = 1.0;
            tab.x[s] = if activity[r] > hi { hi } else { lo };
            tab.x[next_art] = res.abs();
            tab.lo[next_art] = 0.0;
            tab.hi[next_art] = f64::INFINITY;
            tab.cost[next_art] = 1.0;
            tab.basis[r] = next_art;
            tab.is_basic[next_art] = true;
            next_art += 1;
        } else {
            // s basic: row scaled by -1.
            for &(v, a) in &c.terms {
                row[v.0] -= a;
            }
            row[s] = 1.0;
            tab.x[s] = activity[r];
            tab.basis[r] = s;
            tab.is_basic[s] = true;
        }
    }

    let scale = 1.0 + model.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
    if n_art > 0 {
        tab.recompute_reduced_costs();
        if let Phase::IterationLimit = tab.run(opts)? {
            return Ok(limit_result(tab.iterations));
        }
        tab.refresh_basics();
        let infeasibility: f64 = (ns + m..cols).map(|j| tab.x[j]).sum();
        if infeasibility > opts.feasibility_tol * scale {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                objective: f64::INFINITY,
                x: Vec::new(),
                iterations: tab.iterations,
            });
        }
        for j in ns + m..cols {
            tab.lo[j] = 0.0;
            tab.hi[j] = 0.0;
            tab.cost[j] = 0.0;
            if !tab.is_basic[j] {
                tab.x[j] = 0.0;
            }
        }
        // Drive basic artificials out where a pivot exists.
        for r in 0..m {
            let b = tab.basis[r];
            if b < ns + m {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..ns + m {
                let a = tab.at(r, j).abs();
                if !tab.is_basic[j] && a > 1e-7 && best.is_none_or(|(_, ba)| a > ba) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                tab.x[b] = 0.0;
                tab.pivot(r, j);
            }
        }
        tab.refresh_basics();
    }

    for &(v, c) in &model.objective {
        tab.cost[v.0] += c;
    }
    tab.recompute_reduced_costs();
    if let Phase::IterationLimit = tab.run(opts)? {
        return Ok(limit_result(tab.iterations));
    }
    tab.refresh_basics();

    let mut x: Vec<f64> = tab.x[..tab.structural].to_vec();
    for j in 0..ns {
        x[j] = x[j].clamp(lower[j], upper[j].max(lower[j]));
    }
    let objective = model.objective_value(&x);
    Ok(LpResult { status: LpStatus::Optimal, objective, x, iterations: tab.iterations })
}

fn limit_result(iterations: usize) -> LpResult {
    LpResult { status: LpStatus::IterationLimit, objective: f64::INFINITY, x: Vec::new(), iterations }
}
