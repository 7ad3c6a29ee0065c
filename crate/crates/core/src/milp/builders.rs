//! Scheduling formulations as [`LinearModel`]s.
//!
//! Appointments are zero-based inside the builders. The assignment `pi` is
//! either a block of binaries or a fixed sequence, in which case every
//! per-appointment quantity becomes a constant and the model shrinks.

use super::model::{LinExpr, LinearModel, Relation, VarId};
use crate::adversary::top_k_sum;
use crate::error::{invalid, Error, Result};
use crate::model::{evaluate, Instance, Scenario, Schedule, Sequence};

#[derive(Clone, Debug)]
pub enum Assignment {
    /// `pi[i][j] = 1` iff customer `j` takes appointment `i`.
    Free(Vec<Vec<VarId>>),
    Fixed(Sequence),
}

/// A model together with the handles needed to read a schedule back.
#[derive(Clone, Debug)]
pub struct Formulation {
    pub model: LinearModel,
    pub n: usize,
    pub assignment: Assignment,
    pub start: Vec<VarId>,
    /// Variable bounding the objective cost (absent for sample averages).
    pub cost_var: Option<VarId>,
}

/// Problem-wide magnitudes used for variable bounds and big-M constants.
struct Scale {
    /// Upper bound on any start time.
    start: f64,
    /// Upper bound on any clock value or idle/overtime amount.
    time: f64,
    max_ub: f64,
    sum_lb: f64,
}

impl Scale {
    fn new(inst: &Instance) -> Self {
        let sum_ub: f64 = inst.service_ub.iter().sum();
        let start = inst.horizon + sum_ub;
        Scale {
            start,
            time: start + sum_ub,
            max_ub: inst.service_ub.iter().copied().fold(0.0, f64::max),
            sum_lb: inst.service_lb.iter().sum(),
        }
    }
}

impl Formulation {
    fn new(inst: &Instance, fixed: Option<&Sequence>) -> Result<Self> {
        inst.validate()?;
        let n = inst.n;
        let scale = Scale::new(inst);
        let mut model = LinearModel::new();
        let assignment = match fixed {
            Some(seq) => {
                if seq.len() != n {
                    return Err(invalid(format!("sequence has length {}, instance has n = {n}", seq.len())));
                }
                Assignment::Fixed(seq.clone())
            }
            None => {
                let pi: Vec<Vec<VarId>> = (0..n)
                    .map(|i| (0..n).map(|j| model.add_binary(format!("pi_{}_{}", i + 1, j + 1))).collect())
                    .collect();
                for i in 0..n {
                    let row = LinExpr::from_terms(pi[i].iter().map(|&v| (v, 1.0)));
                    model.add_constraint(format!("assign_appt_{}", i + 1), row, Relation::Eq, 1.0);
                }
                for j in 0..n {
                    let col = LinExpr::from_terms(pi.iter().map(|row| (row[j], 1.0)));
                    model.add_constraint(format!("assign_cust_{}", j + 1), col, Relation::Eq, 1.0);
                }
                Assignment::Free(pi)
            }
        };
        let start = (0..n)
            .map(|i| {
                let hi = if i == 0 { 0.0 } else { scale.start };
                model.add_var(format!("A_{}", i + 1), 0.0, hi)
            })
            .collect();
        Ok(Formulation { model, n, assignment, start, cost_var: None })
    }

    /// `sum_j pi_ij v_j` for appointment `i`.
    fn positional(&self, i: usize, per_customer: &[f64]) -> LinExpr {
        match &self.assignment {
            Assignment::Fixed(seq) => LinExpr::constant(per_customer[seq.customer(i)]),
            Assignment::Free(pi) => LinExpr::from_terms(pi[i].iter().copied().zip(per_customer.iter().copied())),
        }
    }

    fn fixed(&self) -> Option<&Sequence> {
        match &self.assignment {
            Assignment::Fixed(seq) => Some(seq),
            Assignment::Free(_) => None,
        }
    }

    /// Start time of appointment `i` as an expression, with `A_n = L`.
    fn start_expr(&self, i: usize, horizon: f64) -> LinExpr {
        if i < self.n {
            LinExpr::from_terms([(self.start[i], 1.0)])
        } else {
            LinExpr::constant(horizon)
        }
    }

    /// Adds `clock = max(A_i, prev) + service` with one binary.
    fn add_clock(&mut self, name: &str, i: usize, prev: &LinExpr, service: &LinExpr, big_m: f64, hi: f64) -> VarId {
        let c = self.model.add_var(format!("{name}_{}", i + 1), 0.0, hi);
        let z = self.model.add_binary(format!("{name}_z_{}", i + 1));
        let ce = LinExpr::from_terms([(c, 1.0)]);
        let mut via_start = LinExpr::from_terms([(self.start[i], 1.0)]);
        via_start.add_expr(service, 1.0);
        let mut via_prev = prev.clone();
        via_prev.add_expr(service, 1.0);
        self.model.add_row(format!("{name}_ge_start_{}", i + 1), &ce, Relation::Ge, &via_start);
        self.model.add_row(format!("{name}_ge_prev_{}", i + 1), &ce, Relation::Ge, &via_prev);
        let mut cap_start = via_start.clone();
        cap_start.add(z, big_m);
        let mut cap_prev = via_prev;
        cap_prev.add(z, -big_m).add_const(big_m);
        self.model.add_row(format!("{name}_le_start_{}", i + 1), &ce, Relation::Le, &cap_start);
        self.model.add_row(format!("{name}_le_prev_{}", i + 1), &ce, Relation::Le, &cap_prev);
        c
    }

    /// Worst-case waiting constraints. `window_shows` is the number of
    /// earlier customers that may show (`k - 1`), or `None` for all.
    fn add_waiting(&mut self, inst: &Instance, window_shows: Option<usize>) {
        let n = self.n;
        let max_ub = Scale::new(inst).max_ub;
        let ub: Vec<LinExpr> = (0..n).map(|i| self.positional(i, &inst.service_ub)).collect();
        for i in 1..n {
            let w = self.positional(i, &inst.wait_guarantee);
            for l in 0..i {
                let len = i - l;
                let mut lhs = LinExpr::from_terms([(self.start[l], 1.0), (self.start[i], -1.0)]);
                let r = window_shows.unwrap_or(len);
                if len <= r {
                    for e in &ub[l..i] {
                        lhs.add_expr(e, 1.0);
                    }
                } else if let Some(seq) = self.fixed() {
                    let window: Vec<f64> = (l..i).map(|s| inst.service_ub[seq.customer(s)]).collect();
                    lhs.add_const(top_k_sum(&window, r));
                } else if r > 0 {
                    let alpha = self.model.add_var(format!("alpha_{}_{}", i + 1, l + 1), 0.0, max_ub);
                    lhs.add(alpha, r as f64);
                    for (s, e) in ub.iter().enumerate().take(i).skip(l) {
                        let q = self.model.add_var(format!("q_{}_{}_{}", i + 1, l + 1, s + 1), 0.0, max_ub);
                        lhs.add(q, 1.0);
                        let mut cover = LinExpr::from_terms([(q, 1.0), (alpha, 1.0)]);
                        cover.add_expr(e, -1.0);
                        self.model.add_constraint(format!("q_cover_{}_{}_{}", i + 1, l + 1, s + 1), cover, Relation::Ge, 0.0);
                    }
                }
                self.model.add_row(format!("wait_{}_{}", i + 1, l + 1), &lhs, Relation::Le, &w);
            }
        }
    }

    /// Realized cost of one sample with each clock's max linearized by a binary.
    fn sample_cost_clocks(&mut self, inst: &Instance, l: usize, sample: &[f64], time: f64, big_m: f64) -> LinExpr {
        let n = self.n;
        let mut rhs = LinExpr::new();
        let mut prev = LinExpr::constant(0.0);
        for i in 0..=n {
            let d = self.model.add_var(format!("Delta_{}_{}", l + 1, i + 1), 0.0, time);
            let mut gap = self.start_expr(i, inst.horizon);
            gap.add_expr(&prev, -1.0);
            self.model.add_row(format!("idle_{}_{}", l + 1, i + 1), &LinExpr::from_terms([(d, 1.0)]), Relation::Ge, &gap);
            rhs.add(d, inst.idle_cost[i]);
            if i < n {
                let service = self.positional(i, sample);
                let c = self.add_clock(&format!("C{}", l + 1), i, &prev, &service, big_m, time);
                prev = LinExpr::from_terms([(c, 1.0)]);
            }
        }
        let s = self.model.add_var(format!("sigma_{}", l + 1), 0.0, time);
        let mut over = prev;
        over.add_const(-inst.horizon);
        self.model.add_row(format!("overtime_{}", l + 1), &LinExpr::from_terms([(s, 1.0)]), Relation::Ge, &over);
        rhs.add(s, inst.overtime_cost);
        rhs
    }

    /// Realized cost of one sample through cumulative idle
    /// `I_m = max(I_{m-1}, A_m - S_{<m})`. Exact without binaries when the
    /// idle costs are non-increasing, since every `I_m` then carries a
    /// non-negative weight.
    fn sample_cost_chain(&mut self, inst: &Instance, l: usize, sample: &[f64], time: f64) -> LinExpr {
        let n = self.n;
        let c = &inst.idle_cost;
        let service: Vec<LinExpr> = (0..n).map(|i| self.positional(i, sample)).collect();
        let mut rhs = LinExpr::new();
        // cum[m] is I_m; the first appointment starts at zero, so I_0 = 0.
        let mut cum = vec![LinExpr::constant(0.0)];
        let mut served = service[0].clone();
        for m in 1..=n {
            let var = self.model.add_var(format!("I_{}_{}", l + 1, m + 1), 0.0, time);
            let ie = LinExpr::from_terms([(var, 1.0)]);
            let mut candidate = self.start_expr(m, inst.horizon);
            candidate.add_expr(&served, -1.0);
            self.model.add_row(format!("cum_prev_{}_{}", l + 1, m + 1), &ie, Relation::Ge, &cum[m - 1]);
            self.model.add_row(format!("cum_new_{}_{}", l + 1, m + 1), &ie, Relation::Ge, &candidate);
            rhs.add(var, if m < n { c[m] - c[m + 1] } else { c[n] });
            if m < n {
                served.add_expr(&service[m], 1.0);
            }
            cum.push(ie);
        }
        // The last completion is I_{n-1} plus all service.
        let s = self.model.add_var(format!("sigma_{}", l + 1), 0.0, time);
        let mut over = cum[n - 1].clone();
        over.add_expr(&served, 1.0);
        over.add_const(-inst.horizon);
        self.model.add_row(format!("overtime_{}", l + 1), &LinExpr::from_terms([(s, 1.0)]), Relation::Ge, &over);
        rhs.add(s, inst.overtime_cost);
        rhs
    }

    /// Reads the sequence and start times from a solution vector.
    pub fn extract_schedule(&self, x: &[f64]) -> Result<Schedule> {
        let seq = match &self.assignment {
            Assignment::Fixed(seq) => seq.clone(),
            Assignment::Free(pi) => {
                let perm = pi
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .max_by(|a, b| x[a.1 .0].total_cmp(&x[b.1 .0]).then(b.0.cmp(&a.0)))
                            .map(|(j, _)| j)
                            .expect("non-empty row")
                    })
                    .collect();
                Sequence::new(perm)?
            }
        };
        let start = self.start.iter().map(|v| x[v.0].max(0.0)).collect();
        Schedule::new(seq, start)
    }

    /// Re-targets the model to minimize the sum of start times among
    /// solutions whose cost is at most `cap`.
    pub fn with_start_sum_objective(mut self, cap: f64) -> Result<Self> {
        let u = self.cost_var.ok_or_else(|| invalid("formulation has no cost variable"))?;
        self.model.add_constraint("cost_cap", LinExpr::from_terms([(u, 1.0)]), Relation::Le, cap);
        let obj = LinExpr::from_terms(self.start.iter().map(|&a| (a, 1.0)));
        self.model.set_objective(obj);
        Ok(self)
    }
}

fn require_all_show(inst: &Instance, what: &str) -> Result<()> {
    if !inst.all_show() {
        return Err(Error::Unsupported(format!(
            "{what} requires show_count = n, found {} < {}",
            inst.show_count, inst.n
        )));
    }
    Ok(())
}

fn cost_bound(inst: &Instance, time: f64, extra: f64) -> f64 {
    let c: f64 = inst.idle_cost.iter().sum();
    (c + inst.overtime_cost + extra) * time + 1.0
}

/// Zero-no-show model: breakpoint cost rows over minimum-service clocks,
/// with each clock's max linearized by one binary.
pub fn build_raswtg0(inst: &Instance) -> Result<Formulation> {
    require_all_show(inst, "the zero-no-show model")?;
    let mut f = Formulation::new(inst, None)?;
    let n = inst.n;
    let scale = Scale::new(inst);
    let big_m = scale.time;
    let u = f.model.add_var("U", 0.0, cost_bound(inst, scale.time, 0.0));
    f.cost_var = Some(u);

    let mut clock = LinExpr::constant(0.0);
    let mut idle = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let d = f.model.add_var(format!("Delta_{}", i + 1), 0.0, scale.time);
        let mut rhs = f.start_expr(i, inst.horizon);
        rhs.add_expr(&clock, -1.0);
        f.model.add_row(format!("idle_{}", i + 1), &LinExpr::from_terms([(d, 1.0)]), Relation::Ge, &rhs);
        idle.push(d);
        if i < n {
            let service = f.positional(i, &inst.service_lb);
            let c = f.add_clock("Cmin", i, &clock, &service, big_m, scale.time);
            clock = LinExpr::from_terms([(c, 1.0)]);
        }
    }
    let sigma: Vec<VarId> = (0..=n).map(|b| f.model.add_var(format!("sigma_{}", b + 1), 0.0, scale.time)).collect();
    for b in 0..n {
        let mut rhs = f.start_expr(b, inst.horizon);
        for i in b..n {
            rhs.add_expr(&f.positional(i, &inst.service_ub), 1.0);
        }
        rhs.add_const(-inst.horizon);
        f.model.add_row(format!("overtime_{}", b + 1), &LinExpr::from_terms([(sigma[b], 1.0)]), Relation::Ge, &rhs);
    }
    for b in 0..=n {
        let mut rhs = LinExpr::from_terms([(sigma[b], inst.overtime_cost)]);
        for i in 0..=b {
            rhs.add(idle[i], inst.idle_cost[i]);
        }
        f.model.add_row(format!("cost_{}", b + 1), &LinExpr::from_terms([(u, 1.0)]), Relation::Ge, &rhs);
    }
    f.add_waiting(inst, None);
    f.model.set_objective(LinExpr::from_terms([(u, 1.0)]));
    Ok(f)
}

/// All `size`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// General model with `k` show-ups, optionally for a fixed sequence.
///
/// For a breakpoint whose suffix cannot absorb all `k` shows, the prefix
/// no-shows form a set `N` of `n - k` positions. Each admissible `N` gets a
/// chain of cumulative idle variables `I_m = max(I_{m-1}, A_m - S_{<m})`,
/// where `S_{<m}` is the minimum service shown before `m`; the idle cost up
/// to breakpoint `b` is `c_b I_b + sum_{m<b} (c_m - c_{m+1}) I_m`. With
/// non-increasing costs every coefficient is non-negative and the chain
/// needs no binaries. The suffix top-`m` maximum service sum and the
/// waiting constraints use their LP duals.
pub fn build_raswtg_k(inst: &Instance, fixed: Option<&Sequence>) -> Result<Formulation> {
    let mut f = Formulation::new(inst, fixed)?;
    let n = inst.n;
    let k = inst.show_count;
    let scale = Scale::new(inst);
    let exact_max = !inst.has_non_increasing_costs();
    let u = f.model.add_var("U", 0.0, cost_bound(inst, scale.time, 0.0));
    f.cost_var = Some(u);
    let lb: Vec<LinExpr> = (0..n).map(|i| f.positional(i, &inst.service_lb)).collect();
    let ub: Vec<LinExpr> = (0..n).map(|i| f.positional(i, &inst.service_ub)).collect();

    // Overtime bound per one-based breakpoint b in 1..=n (index b - 1).
    let mut sigma: Vec<Option<VarId>> = vec![None; n + 2];
    for b in 1..=n {
        let from = b - 1;
        let len = n - from;
        let m = k.min(len);
        let s = f.model.add_var(format!("sigma_{b}"), 0.0, scale.time);
        sigma[b] = Some(s);
        let mut rhs = LinExpr::from_terms([(f.start[from], 1.0)]);
        rhs.add_const(-inst.horizon);
        if let Some(seq) = f.fixed() {
            let tail: Vec<f64> = (from..n).map(|i| inst.service_ub[seq.customer(i)]).collect();
            rhs.add_const(top_k_sum(&tail, m));
        } else if m == len {
            ub[from..].iter().for_each(|e| {
                rhs.add_expr(e, 1.0);
            });
        } else if m > 0 {
            let beta = f.model.add_var(format!("beta_{b}"), 0.0, scale.max_ub);
            rhs.add(beta, m as f64);
            for (i, e) in ub.iter().enumerate().skip(from) {
                let zeta = f.model.add_var(format!("zeta_{b}_{}", i + 1), 0.0, scale.max_ub);
                rhs.add(zeta, 1.0);
                let mut cover = LinExpr::from_terms([(zeta, 1.0), (beta, 1.0)]);
                cover.add_expr(e, -1.0);
                f.model.add_constraint(format!("zeta_cover_{b}_{}", i + 1), cover, Relation::Ge, 0.0);
            }
        }
        f.model.add_row(format!("overtime_{b}"), &LinExpr::from_terms([(s, 1.0)]), Relation::Ge, &rhs);
    }

    // Chains: (absent positions, first and last breakpoint served).
    let mut chains: Vec<(Vec<usize>, usize, usize)> = vec![((0..n).collect(), 1, n - k + 1)];
    if k >= 1 {
        for set in subsets(n, n - k) {
            let first = set.last().map_or(1, |&p| p + 2).max(n - k + 2);
            chains.push((set, first, n + 1));
        }
    }
    let big_m = scale.start + scale.sum_lb;
    for (ci, (absent, first, last)) in chains.iter().enumerate() {
        let mut missing = vec![false; n];
        absent.iter().for_each(|&p| missing[p] = true);
        // cum[m] is I_m for one-based m; I_1 = 0.
        let mut cum: Vec<LinExpr> = vec![LinExpr::constant(0.0); last + 1];
        let mut shown_before = LinExpr::constant(0.0);
        if !missing[0] {
            shown_before.add_expr(&lb[0], 1.0);
        }
        for m in 2..=*last {
            let var = f.model.add_var(format!("I_{ci}_{m}"), 0.0, scale.start);
            let ie = LinExpr::from_terms([(var, 1.0)]);
            let mut candidate = f.start_expr(m - 1, inst.horizon);
            candidate.add_expr(&shown_before, -1.0);
            f.model.add_row(format!("cum_prev_{ci}_{m}"), &ie, Relation::Ge, &cum[m - 1]);
            f.model.add_row(format!("cum_new_{ci}_{m}"), &ie, Relation::Ge, &candidate);
            if exact_max {
                let y = f.model.add_binary(format!("y_{ci}_{m}"));
                let mut cap_prev = cum[m - 1].clone();
                cap_prev.add(y, big_m);
                let mut cap_new = candidate;
                cap_new.add(y, -big_m).add_const(big_m);
                f.model.add_row(format!("cum_prev_le_{ci}_{m}"), &ie, Relation::Le, &cap_prev);
                f.model.add_row(format!("cum_new_le_{ci}_{m}"), &ie, Relation::Le, &cap_new);
            }
            cum[m] = ie;
            if m <= n && !missing[m - 1] {
                shown_before.add_expr(&lb[m - 1], 1.0);
            }
        }
        for b in *first..=*last {
            let c = &inst.idle_cost;
            let mut rhs = LinExpr::new();
            rhs.add_expr(&cum[b], c[b - 1]);
            for m in 1..b {
                rhs.add_expr(&cum[m], c[m - 1] - c[m]);
            }
            if let Some(s) = sigma[b] {
                rhs.add(s, inst.overtime_cost);
            }
            f.model.add_row(format!("cost_{ci}_{b}"), &LinExpr::from_terms([(u, 1.0)]), Relation::Ge, &rhs);
        }
    }

    if k >= 1 {
        f.add_waiting(inst, Some(k - 1));
    }
    f.model.set_objective(LinExpr::from_terms([(u, 1.0)]));
    Ok(f)
}

/// Weighted-sum model: worst case over the `n + 1` split scenarios of idle,
/// waiting (weighted by `wait_cost`) and overtime cost, without guarantees.
pub fn build_wsras(inst: &Instance, wait_cost: f64) -> Result<Formulation> {
    require_all_show(inst, "the weighted-sum model")?;
    if !wait_cost.is_finite() || wait_cost < 0.0 {
        return Err(invalid(format!("waiting cost must be finite and non-negative, found {wait_cost}")));
    }
    let mut f = Formulation::new(inst, None)?;
    let n = inst.n;
    let scale = Scale::new(inst);
    let big_m = scale.time;
    let u = f.model.add_var("U", 0.0, cost_bound(inst, scale.time, wait_cost * n as f64));
    f.cost_var = Some(u);

    // Clocks under minimum service are shared by every scenario's prefix.
    let mut shared = Vec::with_capacity(n);
    let mut prev = LinExpr::constant(0.0);
    for i in 0..n {
        let service = f.positional(i, &inst.service_lb);
        let c = f.add_clock("Cmin", i, &prev, &service, big_m, scale.time);
        prev = LinExpr::from_terms([(c, 1.0)]);
        shared.push(prev.clone());
    }
    for b in 1..=n + 1 {
        let mut clocks: Vec<LinExpr> = Vec::with_capacity(n);
        for i in 0..n {
            if i + 1 < b {
                clocks.push(shared[i].clone());
            } else {
                let prev = if i == 0 { LinExpr::constant(0.0) } else { clocks[i - 1].clone() };
                let service = f.positional(i, &inst.service_ub);
                let c = f.add_clock(&format!("C{b}"), i, &prev, &service, big_m, scale.time);
                clocks.push(LinExpr::from_terms([(c, 1.0)]));
            }
        }
        let mut rhs = LinExpr::new();
        for i in 0..=n {
            let prev = if i == 0 { LinExpr::constant(0.0) } else { clocks[i - 1].clone() };
            let d = f.model.add_var(format!("Delta_{b}_{}", i + 1), 0.0, scale.time);
            let mut gap = f.start_expr(i, inst.horizon);
            gap.add_expr(&prev, -1.0);
            f.model.add_row(format!("idle_{b}_{}", i + 1), &LinExpr::from_terms([(d, 1.0)]), Relation::Ge, &gap);
            rhs.add(d, inst.idle_cost[i]);
            if i < n && i > 0 && wait_cost > 0.0 {
                let w = f.model.add_var(format!("omega_{b}_{}", i + 1), 0.0, scale.time);
                let mut late = prev.clone();
                late.add(f.start[i], -1.0);
                f.model.add_row(format!("wait_{b}_{}", i + 1), &LinExpr::from_terms([(w, 1.0)]), Relation::Ge, &late);
                rhs.add(w, wait_cost);
            }
        }
        let s = f.model.add_var(format!("sigma_{b}"), 0.0, scale.time);
        let mut over = clocks[n - 1].clone();
        over.add_const(-inst.horizon);
        f.model.add_row(format!("overtime_{b}"), &LinExpr::from_terms([(s, 1.0)]), Relation::Ge, &over);
        rhs.add(s, inst.overtime_cost);
        f.model.add_row(format!("cost_{b}"), &LinExpr::from_terms([(u, 1.0)]), Relation::Ge, &rhs);
    }
    f.model.set_objective(LinExpr::from_terms([(u, 1.0)]));
    Ok(f)
}

/// Sample-average model with robust waiting guarantees. `samples[l][j]` is
/// customer `j`'s service time in sample `l`.
pub fn build_saa_rwtg(inst: &Instance, samples: &[Vec<f64>]) -> Result<Formulation> {
    require_all_show(inst, "the sample-average model")?;
    if samples.is_empty() {
        return Err(invalid("at least one sample is required"));
    }
    let n = inst.n;
    for (l, s) in samples.iter().enumerate() {
        if s.len() != n || s.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(invalid(format!("sample {} must hold {n} finite non-negative service times", l + 1)));
        }
    }
    let mut f = Formulation::new(inst, None)?;
    let scale = Scale::new(inst);
    let sample_max: f64 = samples.iter().map(|s| s.iter().sum::<f64>()).fold(0.0, f64::max);
    let time = scale.time + sample_max;
    let big_m = time;
    let weight = 1.0 / samples.len() as f64;
    let mut objective = LinExpr::new();
    let chains = inst.has_non_increasing_costs();
    for (l, sample) in samples.iter().enumerate() {
        let ul = f.model.add_var(format!("U_{}", l + 1), 0.0, cost_bound(inst, time, 0.0));
        objective.add(ul, weight);
        let rhs = if chains {
            f.sample_cost_chain(inst, l, sample, time)
        } else {
            f.sample_cost_clocks(inst, l, sample, time, big_m)
        };
        f.model.add_row(format!("cost_{}", l + 1), &LinExpr::from_terms([(ul, 1.0)]), Relation::Ge, &rhs);
    }
    f.add_waiting(inst, None);
    f.model.set_objective(objective);
    Ok(f)
}

/// Weighted-sum cost of a schedule: the worst split scenario's idle,
/// `wait_cost`-weighted waiting and overtime cost.
pub fn wsras_objective(schedule: &Schedule, inst: &Instance, wait_cost: f64) -> Result<f64> {
    let n = inst.n;
    let mut worst = f64::NEG_INFINITY;
    for b in 1..=n + 1 {
        let mut service = vec![0.0; n];
        for i in 0..n {
            let j = schedule.sequence.customer(i);
            service[j] = if i + 1 < b { inst.service_lb[j] } else { inst.service_ub[j] };
        }
        let r = evaluate(schedule, &Scenario::all_show(service), inst)?;
        worst = worst.max(r.total_cost + wait_cost * r.wait.iter().sum::<f64>());
    }
    Ok(worst)
}

/// Mean realized cost of a schedule over full-attendance samples.
pub fn saa_objective(schedule: &Schedule, inst: &Instance, samples: &[Vec<f64>]) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("at least one sample is required"));
    }
    let mut total = 0.0;
    for s in samples {
        total += evaluate(schedule, &Scenario::all_show(s.clone()), inst)?.total_cost;
    }
    Ok(total / samples.len() as f64)
}
