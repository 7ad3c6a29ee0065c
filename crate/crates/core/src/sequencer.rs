//! Exact search over customer sequences.
//!
//! Sequences are enumerated depth first with customers that have identical
//! `(lb, ub, W)` kept in index order. Each prefix carries its ASAP start
//! times, which are independent of how the prefix is completed and bound any
//! feasible start vector from below, so the breakpoint terms already decided
//! by the prefix give an admissible bound.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{check_feasibility, top_k_sum, worst_case_cost, Frontier, TopSum};
use crate::error::{invalid, Error, Result};
use crate::milp::{branch_and_bound_with, build_raswtg_k, BnbOptions, MilpStatus};
use crate::model::{pos, Instance, Schedule, Sequence};
use crate::rules::{asap_schedule, pta_solve, svf_in_regime};

const TIE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactMethod {
    /// Enumerate sequences and schedule each with ASAP (non-increasing costs).
    AsapEnum,
    /// Enumerate sequences and schedule each with a fixed-sequence MILP.
    MilpEnum,
    /// Solve the full model with free sequence.
    FullMilp,
}

#[derive(Clone, Debug)]
pub struct ExactConfig {
    /// `None` picks a method from the instance.
    pub method: Option<ExactMethod>,
    pub enumeration_cap: usize,
    pub time_limit: Option<Duration>,
    pub threads: usize,
    pub node_limit: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { method: None, enumeration_cap: 10, time_limit: None, threads: 1, node_limit: 1_000_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOutcome {
    pub schedule: Schedule,
    pub objective: f64,
    pub optimal: bool,
    pub sequences_explored: u64,
    pub method: ExactMethod,
    /// Proven lower bound when the search stopped early.
    pub bound: Option<f64>,
    pub elapsed_ms: f64,
}

/// Incrementally evaluated sequence prefix.
#[derive(Clone)]
struct Prefix {
    perm: Vec<usize>,
    start: Vec<f64>,
    frontier: Frontier,
    bound: f64,
}

struct Ctx<'a> {
    inst: &'a Instance,
    /// Include idle terms in the bound (valid only when ASAP is optimal).
    with_idle: bool,
    class: Vec<usize>,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a Instance, with_idle: bool) -> Self {
        let key = |j: usize| {
            (inst.service_lb[j].to_bits(), inst.service_ub[j].to_bits(), inst.wait_guarantee[j].to_bits())
        };
        let class = (0..inst.n).map(|j| (0..=j).find(|&i| key(i) == key(j)).expect("j matches itself")).collect();
        Ctx { inst, with_idle, class }
    }

    fn root(&self) -> Prefix {
        let inst = self.inst;
        let bound = inst.overtime_cost * pos(top_k_sum(&inst.service_ub, inst.show_count) - inst.horizon);
        Prefix { perm: Vec::new(), start: Vec::new(), frontier: Frontier::new(inst.show_count, false), bound }
    }

    /// Customers to try next, one per symmetry class, in index order.
    fn children(&self, p: &Prefix) -> Vec<usize> {
        let n = self.inst.n;
        let mut used = vec![false; n];
        p.perm.iter().for_each(|&j| used[j] = true);
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for j in 0..n {
            if !used[j] && !seen[self.class[j]] {
                seen[self.class[j]] = true;
                out.push(j);
            }
        }
        out
    }

    fn push(&self, p: &Prefix, j: usize) -> Prefix {
        let inst = self.inst;
        let n = inst.n;
        let k = inst.show_count;
        let m = p.perm.len();
        let w = inst.wait_guarantee[j];
        let a = if m == 0 || k == 0 {
            0.0
        } else {
            let mut window = TopSum::new(k - 1);
            let mut latest = f64::NEG_INFINITY;
            for l in (0..m).rev() {
                window.push(inst.service_ub[p.perm[l]]);
                latest = latest.max(p.start[l] + window.sum());
            }
            pos(latest - w)
        };

        // Breakpoint m + 1 (one-based): suffix is every customer not yet placed before m.
        let mut placed = vec![false; n];
        p.perm.iter().for_each(|&i| placed[i] = true);
        let rest: Vec<f64> = (0..n).filter(|&i| !placed[i]).map(|i| inst.service_ub[i]).collect();
        let shows_in_suffix = k.min(n - m);
        let over = inst.overtime_cost * pos(a + top_k_sum(&rest, shows_in_suffix) - inst.horizon);
        let idle = if self.with_idle {
            p.frontier.query(k - shows_in_suffix, inst.idle_cost[m], a).map_or(0.0, |(v, _)| v)
        } else {
            0.0
        };

        let mut next = p.clone();
        next.bound = p.bound.max(idle + over);
        next.perm.push(j);
        next.start.push(a);
        if self.with_idle {
            next.frontier.advance(inst.idle_cost[m], a, inst.service_lb[j]);
        }
        next
    }

    /// Objective of a complete prefix under ASAP times.
    fn close(&self, p: &Prefix) -> f64 {
        let inst = self.inst;
        let last = p.frontier.query(inst.show_count, inst.idle_cost[inst.n], inst.horizon).map_or(0.0, |(v, _)| v);
        p.bound.max(last)
    }
}

/// Admissible lower bound on the best completion of `prefix` (zero-based
/// customers). A complete prefix yields its exact per-sequence optimum.
pub fn sequence_lower_bound(prefix: &[usize], inst: &Instance) -> Result<f64> {
    inst.validate()?;
    let mut used = vec![false; inst.n];
    for &j in prefix {
        if j >= inst.n || used[j] {
            return Err(invalid(format!("{prefix:?} is not a partial permutation of 0..{}", inst.n)));
        }
        used[j] = true;
    }
    let asap_optimal = inst.has_non_increasing_costs();
    if prefix.len() == inst.n {
        let seq = Sequence::new(prefix.to_vec())?;
        return Ok(per_sequence(inst, &seq, None)?.map_or(f64::INFINITY, |(_, v)| v));
    }
    let ctx = Ctx::new(inst, asap_optimal);
    let mut p = ctx.root();
    for &j in prefix {
        p = ctx.push(&p, j);
    }
    Ok(p.bound)
}

/// Optimal start times for a fixed sequence and their worst-case cost.
/// Returns `None` when a cutoff is given and nothing beats it.
fn per_sequence(inst: &Instance, seq: &Sequence, cutoff: Option<f64>) -> Result<Option<(Schedule, f64)>> {
    if inst.has_non_increasing_costs() {
        let s = asap_schedule(inst, seq)?;
        let v = worst_case_cost(&s, inst)?.value;
        return Ok(Some((s, v)));
    }
    fixed_sequence_milp(inst, seq, cutoff)
}

/// Fixed-sequence MILP followed by a second stage that minimizes the sum of
/// start times among cost-optimal schedules.
fn fixed_sequence_milp(inst: &Instance, seq: &Sequence, cutoff: Option<f64>) -> Result<Option<(Schedule, f64)>> {
    let f = build_raswtg_k(inst, Some(seq))?;
    let opts = BnbOptions { cutoff, ..Default::default() };
    let sol = branch_and_bound_with(&f.model, &opts)?;
    match sol.status {
        MilpStatus::Optimal => {}
        MilpStatus::Cutoff => return Ok(None),
        other => return Err(Error::Solver(format!("fixed-sequence model ended with status {other:?}"))),
    }
    let best = sol.objective;
    let tie = f.with_start_sum_objective(best + 1e-7)?;
    let second = branch_and_bound_with(&tie.model, &BnbOptions::default())?;
    let values = if second.has_solution() { &second.values } else { &sol.values };
    let schedule = tie.extract_schedule(values)?;
    let value = worst_case_cost(&schedule, inst)?.value;
    Ok(Some((schedule, value)))
}

struct Incumbent {
    value: AtomicU64,
    best: Mutex<Option<(f64, Schedule)>>,
}

impl Incumbent {
    fn value(&self) -> f64 {
        f64::from_bits(self.value.load(Ordering::Relaxed))
    }

    fn offer(&self, value: f64, schedule: Schedule) {
        let mut guard = self.best.lock().expect("incumbent lock poisoned");
        let better = match guard.as_ref() {
            None => true,
            Some((v, s)) => value < v - TIE || (value <= v + TIE && schedule.sequence < s.sequence),
        };
        if better {
            self.value.store(value.min(self.value()).to_bits(), Ordering::Relaxed);
            *guard = Some((value, schedule));
        }
    }
}

struct Search<'a> {
    ctx: Ctx<'a>,
    method: ExactMethod,
    incumbent: Incumbent,
    explored: AtomicU64,
    deadline: Option<Instant>,
    timed_out: AtomicBool,
    open_bound: Mutex<f64>,
}

impl Search<'_> {
    fn expired(&self) -> bool {
        if self.timed_out.load(Ordering::Relaxed) {
            return true;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    fn dfs(&self, p: Prefix) -> Result<()> {
        if p.bound >= self.incumbent.value() - TIE {
            return Ok(());
        }
        if self.expired() {
            let mut b = self.open_bound.lock().expect("bound lock poisoned");
            *b = b.min(p.bound);
            return Ok(());
        }
        let inst = self.ctx.inst;
        if p.perm.len() == inst.n {
            self.explored.fetch_add(1, Ordering::Relaxed);
            let seq = Sequence::new(p.perm.clone())?;
            match self.method {
                ExactMethod::AsapEnum => {
                    let value = self.ctx.close(&p);
                    if value < self.incumbent.value() - TIE {
                        let schedule = Schedule::new(seq, p.start.clone())?;
                        self.incumbent.offer(value, schedule);
                    }
                }
                _ => {
                    if let Some((schedule, value)) = fixed_sequence_milp(inst, &seq, Some(self.incumbent.value()))? {
                        if value < self.incumbent.value() - TIE {
                            self.incumbent.offer(value, schedule);
                        }
                    }
                }
            }
            return Ok(());
        }
        for j in self.ctx.children(&p) {
            self.dfs(self.ctx.push(&p, j))?;
        }
        Ok(())
    }
}

/// Minimum worst-case-cost feasible schedule.
pub fn exact_solve(inst: &Instance, config: &ExactConfig) -> Result<SolveOutcome> {
    inst.validate()?;
    let t0 = Instant::now();
    let asap_optimal = inst.has_non_increasing_costs();
    let method = match config.method {
        Some(m) => m,
        None if inst.n > config.enumeration_cap => ExactMethod::FullMilp,
        None if asap_optimal => ExactMethod::AsapEnum,
        None => ExactMethod::MilpEnum,
    };
    if method == ExactMethod::AsapEnum && !asap_optimal {
        return Err(Error::NotApplicable(
            "asap-enum requires non-increasing idle costs; use milp-enum or full-milp".into(),
        ));
    }
    if method != ExactMethod::FullMilp && inst.n > config.enumeration_cap {
        return Err(Error::SizeCap { what: "sequence enumeration", n: inst.n, cap: config.enumeration_cap });
    }

    let start = if svf_in_regime(inst) { pta_solve(inst)? } else { asap_schedule(inst, &Sequence::identity(inst.n))? };
    let start_value = worst_case_cost(&start, inst)?.value;

    let (schedule, optimal, bound, explored) = match method {
        ExactMethod::FullMilp => full_milp(inst, config, start, start_value)?,
        _ => {
            let search = Search {
                ctx: Ctx::new(inst, method == ExactMethod::AsapEnum),
                method,
                incumbent: Incumbent {
                    value: AtomicU64::new(start_value.to_bits()),
                    best: Mutex::new(Some((start_value, start))),
                },
                explored: AtomicU64::new(0),
                deadline: config.time_limit.map(|d| t0 + d),
                timed_out: AtomicBool::new(false),
                open_bound: Mutex::new(f64::INFINITY),
            };
            let root = search.ctx.root();
            let threads = config.threads.max(1);
            if threads == 1 {
                search.dfs(root)?;
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::Solver(format!("thread pool: {e}")))?;
                let firsts: Vec<Prefix> = search.ctx.children(&root).into_iter().map(|j| search.ctx.push(&root, j)).collect();
                pool.install(|| firsts.into_par_iter().try_for_each(|p| search.dfs(p)))?;
            }
            let timed_out = search.timed_out.load(Ordering::Relaxed);
            let (value, schedule) = search.incumbent.best.into_inner().expect("incumbent lock poisoned").expect("seeded");
            let bound = timed_out.then(|| search.open_bound.into_inner().expect("bound lock poisoned").min(value));
            (schedule, !timed_out, bound, search.explored.into_inner())
        }
    };

    // The sequence is settled; report the tie-broken start times for it.
    let schedule = if method == ExactMethod::AsapEnum {
        schedule
    } else {
        match per_sequence(inst, &schedule.sequence, None)? {
            Some((s, v)) if v <= worst_case_cost(&schedule, inst)?.value + 1e-6 => s,
            _ => schedule,
        }
    };
    let objective = worst_case_cost(&schedule, inst)?.value;
    let feas = check_feasibility(&schedule, inst)?;
    if !feas.feasible {
        return Err(Error::Solver(format!("solver produced an infeasible schedule: {:?}", feas.violations)));
    }
    Ok(SolveOutcome {
        schedule,
        objective,
        optimal,
        sequences_explored: explored,
        method,
        bound,
        elapsed_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}

fn full_milp(
    inst: &Instance,
    config: &ExactConfig,
    start: Schedule,
    start_value: f64,
) -> Result<(Schedule, bool, Option<f64>, u64)> {
    let f = build_raswtg_k(inst, None)?;
    let opts = BnbOptions {
        time_limit: config.time_limit,
        node_limit: config.node_limit,
        cutoff: Some(start_value),
        ..Default::default()
    };
    let sol = branch_and_bound_with(&f.model, &opts)?;
    let nodes = sol.nodes as u64;
    let (schedule, optimal) = match sol.status {
        MilpStatus::Optimal => (f.extract_schedule(&sol.values)?, true),
        MilpStatus::Cutoff => (start, true),
        MilpStatus::TimeLimit | MilpStatus::NodeLimit | MilpStatus::IterationLimit => {
            let s = if sol.has_solution() { f.extract_schedule(&sol.values)? } else { start };
            (s, false)
        }
        MilpStatus::Infeasible => return Err(Error::Solver("full model reported infeasible".into())),
    };
    let bound = (!optimal).then_some(sol.bound.min(start_value));
    Ok((schedule, optimal, bound, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn base(lb: &[f64], ub: &[f64], w: &[f64], horizon: f64, k: usize) -> Instance {
        let n = lb.len();
        Instance {
            n,
            service_lb: lb.to_vec(),
            service_ub: ub.to_vec(),
            wait_guarantee: w.to_vec(),
            idle_cost: vec![1.0; n + 1],
            overtime_cost: 1.25,
            horizon,
            show_count: k,
        }
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute(inst: &Instance) -> f64 {
        permutations(inst.n)
            .into_iter()
            .map(|p| {
                let s = asap_schedule(inst, &Sequence::new(p).unwrap()).unwrap();
                worst_case_cost(&s, inst).unwrap().value
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn remark_fixture() {
        let inst = base(&[10.0; 3], &[10.0; 3], &[0.0, 0.0, 30.0], 30.0, 3);
        let out = exact_solve(&inst, &ExactConfig::default()).unwrap();
        assert_abs_diff_eq!(out.objective, 0.0, epsilon = 1e-9);
        assert!(out.optimal);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.random_range(1..=5);
            let lb: Vec<f64> = (0..n).map(|_| rng.random_range(0..5) as f64).collect();
            let ub: Vec<f64> = lb.iter().map(|l| l + rng.random_range(0..4) as f64).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
            let mut inst = base(&lb, &ub, &w, rng.random_range(0..20) as f64, rng.random_range(0..=n));
            inst.idle_cost = (0..=n).map(|i| 1.0 - i as f64 / (2 * n) as f64).collect();
            let out = exact_solve(&inst, &ExactConfig::default()).unwrap();
            assert_abs_diff_eq!(out.objective, brute(&inst), epsilon = 1e-9);
            let par = exact_solve(&inst, &ExactConfig { threads: 3, ..Default::default() }).unwrap();
            assert_abs_diff_eq!(par.objective, out.objective, epsilon = 1e-9);
        }
    }

    #[test]
    fn lower_bound_is_admissible() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(2..=4);
            let lb: Vec<f64> = (0..n).map(|_| rng.random_range(0..5) as f64).collect();
            let ub: Vec<f64> = lb.iter().map(|l| l + rng.random_range(0..4) as f64).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
            let inst = base(&lb, &ub, &w, 8.0, rng.random_range(0..=n));
            let perms = permutations(n);
            for p in &perms {
                for m in 0..=n {
                    let bound = sequence_lower_bound(&p[..m], &inst).unwrap();
                    let best = perms
                        .iter()
                        .filter(|q| q[..m] == p[..m])
                        .map(|q| sequence_lower_bound(q, &inst).unwrap())
                        .fold(f64::INFINITY, f64::min);
                    assert!(bound <= best + 1e-9, "prefix {:?}: {bound} > {best}", &p[..m]);
                }
            }
        }
    }

    #[test]
    fn increasing_costs_use_milp() {
        let mut inst = base(&[1.0, 2.0, 1.0], &[3.0, 4.0, 2.0], &[0.0, 2.0, 1.0], 6.0, 3);
        inst.idle_cost = vec![0.5, 0.667, 0.833, 1.0];
        let out = exact_solve(&inst, &ExactConfig::default()).unwrap();
        assert_eq!(out.method, ExactMethod::MilpEnum);
        let full = exact_solve(&inst, &ExactConfig { method: Some(ExactMethod::FullMilp), ..Default::default() }).unwrap();
        assert_abs_diff_eq!(out.objective, full.objective, epsilon = 1e-6);
        assert!(matches!(
            exact_solve(&inst, &ExactConfig { method: Some(ExactMethod::AsapEnum), ..Default::default() }),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn pta_agrees_in_regime() {
        let inst = base(&[2.0, 1.0, 4.0, 3.0], &[5.0, 6.0, 4.0, 3.5], &[3.0, 0.0, 6.0, 2.0], 12.0, 4);
        let out = exact_solve(&inst, &ExactConfig::default()).unwrap();
        let pta = pta_solve(&inst).unwrap();
        assert_abs_diff_eq!(out.objective, worst_case_cost(&pta, &inst).unwrap().value, epsilon = 1e-9);
    }
}
