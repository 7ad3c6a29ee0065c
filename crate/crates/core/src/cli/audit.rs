//! Worst-case and empirical audits of a fixed schedule.

use serde::Serialize;

use crate::adversary::{check_feasibility, worst_case_cost, AdversaryResult, FeasibilityReport};
use crate::error::Result;
use crate::model::{evaluate, Instance, Scenario, Schedule, TOL};

/// A shown customer whose realized wait exceeded the guarantee.
#[derive(Clone, Debug, Serialize)]
pub struct ObservedViolation {
    /// Zero-based scenario index.
    pub scenario: usize,
    pub appointment: usize,
    pub customer: usize,
    pub wait: f64,
    pub guarantee: f64,
}

/// Averages over a scenario set. Per-appointment waits average over the
/// scenarios in which that appointment's customer shows.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalMetrics {
    pub scenarios: usize,
    pub out_of_box: usize,
    pub mean_wait: Vec<f64>,
    /// Entry `n` is the idle time after the last completion.
    pub mean_idle: Vec<f64>,
    pub guarantee_met_share: f64,
    pub mean_idle_to_last: f64,
    pub mean_total_idle: f64,
    pub mean_overtime: f64,
    pub mean_total_cost: f64,
    pub violations: Vec<ObservedViolation>,
}

pub fn empirical_metrics(schedule: &Schedule, inst: &Instance, scenarios: &[Scenario]) -> Result<EmpiricalMetrics> {
    let n = inst.n;
    let mut wait_sum = vec![0.0; n];
    let mut wait_cnt = vec![0usize; n];
    let mut idle_sum = vec![0.0; n + 1];
    let (mut shown, mut met) = (0usize, 0usize);
    let (mut overtime, mut cost, mut out_of_box) = (0.0, 0.0, 0usize);
    let mut violations = Vec::new();
    for (s, sc) in scenarios.iter().enumerate() {
        let r = evaluate(schedule, sc, inst)?;
        out_of_box += usize::from(!sc.within_box(inst));
        for i in 0..n {
            let j = schedule.sequence.customer(i);
            if !sc.show[j] {
                continue;
            }
            wait_sum[i] += r.wait[i];
            wait_cnt[i] += 1;
            shown += 1;
            if r.wait[i] <= inst.wait_guarantee[j] + TOL {
                met += 1;
            } else {
                violations.push(ObservedViolation {
                    scenario: s,
                    appointment: i + 1,
                    customer: j + 1,
                    wait: r.wait[i],
                    guarantee: inst.wait_guarantee[j],
                });
            }
        }
        idle_sum.iter_mut().zip(&r.idle).for_each(|(a, b)| *a += b);
        overtime += r.overtime;
        cost += r.total_cost;
    }
    let m = scenarios.len().max(1) as f64;
    let mean_idle: Vec<f64> = idle_sum.iter().map(|x| x / m).collect();
    Ok(EmpiricalMetrics {
        scenarios: scenarios.len(),
        out_of_box,
        mean_wait: wait_sum.iter().zip(&wait_cnt).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect(),
        guarantee_met_share: if shown > 0 { met as f64 / shown as f64 } else { 1.0 },
        mean_idle_to_last: mean_idle[..n].iter().sum(),
        mean_total_idle: mean_idle.iter().sum(),
        mean_idle,
        mean_overtime: overtime / m,
        mean_total_cost: cost / m,
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub feasibility: FeasibilityReport,
    pub worst_case: AdversaryResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalMetrics>,
}

/// Worst-case audit, plus empirical metrics when scenarios are supplied.
pub fn audit(schedule: &Schedule, inst: &Instance, scenarios: &[Scenario]) -> Result<AuditReport> {
    inst.validate()?;
    schedule.check_against(inst)?;
    Ok(AuditReport {
        feasibility: check_feasibility(schedule, inst)?,
        worst_case: worst_case_cost(schedule, inst)?,
        empirical: if scenarios.is_empty() { None } else { Some(empirical_metrics(schedule, inst, scenarios)?) },
    })
}
