//! One entry point for every solution method.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::adversary::{check_feasibility, worst_case_cost};
use crate::error::{invalid, Error, Result};
use crate::milp::{
    branch_and_bound_with, build_raswtg0, build_raswtg_k, build_saa_rwtg, build_wsras, saa_objective, wsras_objective,
    BnbOptions, Formulation, MilpStatus,
};
use crate::model::{Instance, Schedule, Sequence};
use crate::rules::{asap_in_regime, asap_schedule, pta_solve, svf_in_regime};
use crate::sequencer::{exact_solve, ExactConfig, ExactMethod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed-form plateau schedule (constant costs, everyone shows).
    Pta,
    /// Earliest feasible start times for a given sequence.
    Asap,
    /// Zero-no-show MILP.
    Milp0,
    /// General MILP with no-shows.
    Milp,
    /// Weighted-sum model without guarantees.
    Wsras,
    /// Sample-average model with guarantees.
    Saa,
    /// Enumeration or branch and bound over sequences.
    Exact,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub time_limit: Option<Duration>,
    /// Waiting cost for the weighted-sum model.
    pub wait_cost: f64,
    /// Full-attendance service samples for the sample-average model, indexed by customer.
    pub samples: Vec<Vec<f64>>,
    /// Sequence used by `asap`; identity when absent.
    pub sequence: Option<Sequence>,
    pub threads: usize,
    pub exact_method: Option<ExactMethod>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// Stopped early; the schedule is the best one found.
    TimeLimit,
    /// A rule applied outside the regime where it is optimal.
    Heuristic,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub method: Method,
    pub schedule: Schedule,
    /// Value of the method's own objective.
    pub objective: f64,
    pub worst_case_cost: f64,
    pub feasible: bool,
    pub status: SolveStatus,
    pub optimal: bool,
    pub bound: Option<f64>,
    /// Whether the instance lies in the regime where the method is exact.
    pub in_regime: bool,
    pub runtime_ms: f64,
}

fn robust_start(inst: &Instance) -> Result<Schedule> {
    if svf_in_regime(inst) {
        pta_solve(inst)
    } else {
        asap_schedule(inst, &Sequence::identity(inst.n))
    }
}

struct MilpRun {
    schedule: Schedule,
    objective: f64,
    optimal: bool,
    bound: Option<f64>,
}

/// Solves `f`, falling back to `start` when the model finds nothing better.
fn run_milp(
    f: &Formulation,
    start: Schedule,
    start_value: f64,
    deadline: Option<Instant>,
    tie_break: bool,
) -> Result<MilpRun> {
    let remaining = || deadline.map(|d| d.saturating_duration_since(Instant::now()));
    let opts = BnbOptions { time_limit: remaining(), cutoff: Some(start_value), ..Default::default() };
    let sol = branch_and_bound_with(&f.model, &opts)?;
    let (schedule, objective, optimal) = match sol.status {
        MilpStatus::Optimal => (f.extract_schedule(&sol.values)?, sol.objective, true),
        MilpStatus::Cutoff => (start, start_value, true),
        MilpStatus::Infeasible => return Err(Error::Solver("model reported infeasible".into())),
        _ if sol.has_solution() => (f.extract_schedule(&sol.values)?, sol.objective, false),
        _ => (start, start_value, false),
    };
    let bound = (!optimal).then_some(sol.bound.min(objective));
    if !(optimal && tie_break && f.cost_var.is_some()) {
        return Ok(MilpRun { schedule, objective, optimal, bound });
    }
    // Among optimal schedules prefer the one with the earliest start times.
    let second = f.clone().with_start_sum_objective(objective + 1e-7)?;
    let opts = BnbOptions { time_limit: remaining(), ..Default::default() };
    let refined = branch_and_bound_with(&second.model, &opts)?;
    let schedule = if refined.has_solution() { second.extract_schedule(&refined.values)? } else { schedule };
    Ok(MilpRun { schedule, objective, optimal, bound })
}

pub fn solve(inst: &Instance, method: Method, opts: &SolveOptions) -> Result<SolveReport> {
    inst.validate()?;
    let t0 = Instant::now();
    let deadline = opts.time_limit.map(|d| t0 + d);
    let (schedule, objective, optimal, bound, in_regime) = match method {
        Method::Pta => {
            let s = pta_solve(inst)?;
            let v = worst_case_cost(&s, inst)?.value;
            (s, v, true, None, true)
        }
        Method::Asap => {
            let seq = opts.sequence.clone().unwrap_or_else(|| Sequence::identity(inst.n));
            if seq.len() != inst.n {
                return Err(invalid(format!("sequence has {} entries, instance has {}", seq.len(), inst.n)));
            }
            let s = asap_schedule(inst, &seq)?;
            let v = worst_case_cost(&s, inst)?.value;
            (s, v, inst.n == 1, None, asap_in_regime(inst))
        }
        Method::Milp0 | Method::Milp => {
            let f = if method == Method::Milp0 { build_raswtg0(inst)? } else { build_raswtg_k(inst, None)? };
            let start = robust_start(inst)?;
            let v = worst_case_cost(&start, inst)?.value;
            let r = run_milp(&f, start, v, deadline, true)?;
            (r.schedule, r.objective, r.optimal, r.bound, true)
        }
        Method::Wsras => {
            if !(opts.wait_cost >= 0.0) {
                return Err(invalid("waiting cost must be non-negative"));
            }
            let f = build_wsras(inst, opts.wait_cost)?;
            let start = asap_schedule(inst, &Sequence::identity(inst.n))?;
            let v = wsras_objective(&start, inst, opts.wait_cost)?;
            let r = run_milp(&f, start, v, deadline, false)?;
            let objective = wsras_objective(&r.schedule, inst, opts.wait_cost)?;
            (r.schedule, objective, r.optimal, r.bound, true)
        }
        Method::Saa => {
            let f = build_saa_rwtg(inst, &opts.samples)?;
            let start = asap_schedule(inst, &Sequence::identity(inst.n))?;
            let v = saa_objective(&start, inst, &opts.samples)?;
            let r = run_milp(&f, start, v, deadline, false)?;
            let objective = saa_objective(&r.schedule, inst, &opts.samples)?;
            (r.schedule, objective, r.optimal, r.bound, true)
        }
        Method::Exact => {
            let config = ExactConfig {
                method: opts.exact_method,
                time_limit: opts.time_limit,
                threads: opts.threads.max(1),
                ..Default::default()
            };
            let o = exact_solve(inst, &config)?;
            (o.schedule, o.objective, o.optimal, o.bound, true)
        }
    };
    let feasibility = check_feasibility(&schedule, inst)?;
    let worst = worst_case_cost(&schedule, inst)?.value;
    let status = if !optimal && matches!(method, Method::Asap) {
        SolveStatus::Heuristic
    } else if !optimal {
        SolveStatus::TimeLimit
    } else {
        SolveStatus::Optimal
    };
    Ok(SolveReport {
        method,
        schedule,
        objective,
        worst_case_cost: worst,
        feasible: feasibility.feasible,
        status,
        optimal,
        bound,
        in_regime,
        runtime_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}
