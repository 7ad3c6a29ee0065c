//! Domain types and the deterministic evaluation kernel.
//!
//! Times are minutes as `f64`. Customers and appointments are indexed from
//! zero in the Rust API; the JSON schedule format uses one-based customer
//! numbers in `perm`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// Absolute tolerance used by the kernel for comparisons.
pub const TOL: f64 = 1e-9;

#[inline]
pub(crate) fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// A scheduling instance: customers with service-time intervals and
/// waiting-time guarantees, plus the cost structure of the provider.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub service_lb: Vec<f64>,
    pub service_ub: Vec<f64>,
    pub wait_guarantee: Vec<f64>,
    /// Idle cost per minute before each appointment; entry `n` prices idle
    /// time between the last completion and the end of the horizon.
    pub idle_cost: Vec<f64>,
    pub overtime_cost: f64,
    pub horizon: f64,
    /// Number of customers who show up.
    pub show_count: usize,
}

/// Shape of the idle-cost vector, which decides which solution rules apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostShape {
    Constant,
    NonIncreasing,
    General,
}

impl Instance {
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(invalid("instance must have at least one customer"));
        }
        let check_len = |name: &str, len: usize, want: usize| {
            if len != want {
                Err(invalid(format!("{name} has length {len}, expected {want}")))
            } else {
                Ok(())
            }
        };
        check_len("service_lb", self.service_lb.len(), n)?;
        check_len("service_ub", self.service_ub.len(), n)?;
        check_len("wait_guarantee", self.wait_guarantee.len(), n)?;
        check_len("idle_cost", self.idle_cost.len(), n + 1)?;
        let all = self
            .service_lb
            .iter()
            .chain(&self.service_ub)
            .chain(&self.wait_guarantee)
            .chain(&self.idle_cost)
            .chain([&self.overtime_cost, &self.horizon]);
        for &v in all {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(format!("entries must be finite and non-negative, found {v}")));
            }
        }
        for j in 0..n {
            if self.service_lb[j] > self.service_ub[j] {
                return Err(invalid(format!(
                    "customer {}: service_lb {} exceeds service_ub {}",
                    j + 1,
                    self.service_lb[j],
                    self.service_ub[j]
                )));
            }
        }
        if self.show_count > n {
            return Err(invalid(format!("show_count {} exceeds n = {n}", self.show_count)));
        }
        Ok(())
    }

    pub fn cost_shape(&self) -> CostShape {
        let c = &self.idle_cost;
        if c.windows(2).all(|w| (w[0] - w[1]).abs() <= TOL) {
            CostShape::Constant
        } else if c.windows(2).all(|w| w[0] + TOL >= w[1]) {
            CostShape::NonIncreasing
        } else {
            CostShape::General
        }
    }

    pub fn has_non_increasing_costs(&self) -> bool {
        self.cost_shape() != CostShape::General
    }

    pub fn all_show(&self) -> bool {
        self.show_count == self.n
    }

    pub fn max_idle_cost(&self) -> f64 {
        self.idle_cost[..self.n].iter().copied().fold(0.0, f64::max)
    }
}

/// Assignment of customers to appointments in one-line form:
/// `perm[i]` is the customer served at appointment `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence(Vec<usize>);

impl Sequence {
    pub fn identity(n: usize) -> Self {
        Sequence((0..n).collect())
    }

    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || seen[j] {
                return Err(invalid(format!("{perm:?} is not a permutation of 0..{n}")));
            }
            seen[j] = true;
        }
        Ok(Sequence(perm))
    }

    pub fn from_one_based(perm: &[usize]) -> Result<Self> {
        if perm.contains(&0) {
            return Err(invalid("one-based permutation contains 0"));
        }
        Self::new(perm.iter().map(|&j| j - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&j| j + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn customer(&self, appointment: usize) -> usize {
        self.0[appointment]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Dense binary matrix form, `pi[i][j] = 1` iff customer `j` takes appointment `i`.
    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.len();
        let mut m = vec![vec![0u8; n]; n];
        for (i, &j) in self.0.iter().enumerate() {
            m[i][j] = 1;
        }
        m
    }

    /// Reorders a per-customer vector into appointment order.
    pub fn positional(&self, per_customer: &[f64]) -> Vec<f64> {
        self.0.iter().map(|&j| per_customer[j]).collect()
    }
}

/// A sequence together with appointment start times.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub sequence: Sequence,
    pub start: Vec<f64>,
}

impl Schedule {
    /// Builds a schedule, snapping start times within [`TOL`] of zero to zero.
    pub fn new(sequence: Sequence, mut start: Vec<f64>) -> Result<Self> {
        if start.len() != sequence.len() {
            return Err(invalid(format!(
                "start has length {}, sequence has length {}",
                start.len(),
                sequence.len()
            )));
        }
        for a in start.iter_mut() {
            if !a.is_finite() || *a < -TOL {
                return Err(invalid(format!("start times must be finite and non-negative, found {a}")));
            }
            if *a < TOL {
                *a = 0.0;
            }
        }
        if let Some(&a1) = start.first() {
            if a1 != 0.0 {
                return Err(invalid(format!("first appointment must start at 0, found {a1}")));
            }
        }
        Ok(Schedule { sequence, start })
    }

    pub fn n(&self) -> usize {
        self.start.len()
    }

    pub fn check_against(&self, inst: &Instance) -> Result<()> {
        if self.n() != inst.n {
            return Err(invalid(format!("schedule has {} appointments, instance has {}", self.n(), inst.n)));
        }
        Ok(())
    }

    /// Gaps `A_{i+1} - A_i` between consecutive appointment times.
    pub fn interappointment_times(&self) -> Vec<f64> {
        self.start.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    perm: Vec<usize>,
    start: Vec<f64>,
}

impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScheduleRepr { perm: self.sequence.to_one_based(), start: self.start.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ScheduleRepr::deserialize(d)?;
        let seq = Sequence::from_one_based(&repr.perm).map_err(serde::de::Error::custom)?;
        Schedule::new(seq, repr.start).map_err(serde::de::Error::custom)
    }
}

/// One realization of service times and attendance, indexed by customer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub service: Vec<f64>,
    #[serde(with = "binary_vec")]
    pub show: Vec<bool>,
}

mod binary_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&b| b as u8))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(serde::de::Error::custom(format!("show entries must be 0 or 1, found {other}"))),
            })
            .collect()
    }
}

impl Scenario {
    pub fn all_show(service: Vec<f64>) -> Self {
        let n = service.len();
        Scenario { service, show: vec![true; n] }
    }

    pub fn show_count(&self) -> usize {
        self.show.iter().filter(|&&b| b).count()
    }

    /// Whether every service time lies in its customer's interval.
    pub fn within_box(&self, inst: &Instance) -> bool {
        self.service
            .iter()
            .enumerate()
            .all(|(j, &p)| p >= inst.service_lb[j] - TOL && p <= inst.service_ub[j] + TOL)
    }

    /// Service time realized at each appointment (zero for no-shows).
    pub fn realized(&self, seq: &Sequence) -> Vec<f64> {
        seq.as_slice()
            .iter()
            .map(|&j| if self.show[j] { self.service[j] } else { 0.0 })
            .collect()
    }
}

/// Waiting, idle time, overtime and cost of one schedule under one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub completion: Vec<f64>,
    pub wait: Vec<f64>,
    /// Idle time before each appointment, plus idle time before the horizon end.
    pub idle: Vec<f64>,
    pub overtime: f64,
    pub total_cost: f64,
}

impl EvaluationReport {
    pub fn idle_cost(&self, inst: &Instance) -> f64 {
        self.idle.iter().zip(&inst.idle_cost).map(|(t, c)| t * c).sum()
    }
}

fn check_inputs(schedule: &Schedule, scenario: &Scenario, inst: &Instance) -> Result<()> {
    schedule.check_against(inst)?;
    if scenario.service.len() != inst.n || scenario.show.len() != inst.n {
        return Err(invalid(format!(
            "scenario has dimensions ({}, {}), instance has n = {}",
            scenario.service.len(),
            scenario.show.len(),
            inst.n
        )));
    }
    if let Some(p) = scenario.service.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(invalid(format!("service times must be finite and non-negative, found {p}")));
    }
    Ok(())
}

/// Completion times by the forward recursion `C_i = max(A_i, C_{i-1}) + realized_i`.
pub fn completion_times(schedule: &Schedule, scenario: &Scenario, inst: &Instance) -> Result<Vec<f64>> {
    check_inputs(schedule, scenario, inst)?;
    let realized = scenario.realized(&schedule.sequence);
    let mut clock = 0.0f64;
    Ok(schedule
        .start
        .iter()
        .zip(&realized)
        .map(|(&a, &p)| {
            clock = a.max(clock) + p;
            clock
        })
        .collect())
}

/// Completion times via `C_i = max_{l <= i} (A_l + sum_{s=l..i} realized_s)`.
pub fn completion_times_closed(schedule: &Schedule, scenario: &Scenario, inst: &Instance) -> Result<Vec<f64>> {
    check_inputs(schedule, scenario, inst)?;
    let realized = scenario.realized(&schedule.sequence);
    let n = inst.n;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut best = f64::NEG_INFINITY;
        let mut tail = 0.0;
        for l in (0..=i).rev() {
            tail += realized[l];
            best = best.max(schedule.start[l] + tail);
        }
        out.push(best);
    }
    Ok(out)
}

/// Waiting, idle, overtime and total cost of `schedule` under `scenario`.
///
/// Service times outside the instance's intervals are accepted so that
/// replayed data can be evaluated.
pub fn evaluate(schedule: &Schedule, scenario: &Scenario, inst: &Instance) -> Result<EvaluationReport> {
    let completion = completion_times(schedule, scenario, inst)?;
    let n = inst.n;
    let a = &schedule.start;
    let mut wait = Vec::with_capacity(n);
    let mut idle = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    for i in 0..n {
        let shows = scenario.show[schedule.sequence.customer(i)];
        wait.push(if shows { pos(prev - a[i]) } else { 0.0 });
        idle.push(pos(a[i] - prev));
        prev = completion[i];
    }
    let last = completion[n - 1];
    idle.push(pos(inst.horizon - last));
    let overtime = pos(last - inst.horizon);
    let idle_part: f64 = (0..n).map(|i| inst.idle_cost[i] * idle[i]).sum();
    let terminal = (inst.idle_cost[n] * (inst.horizon - last)).max(inst.overtime_cost * (last - inst.horizon));
    Ok(EvaluationReport { completion, wait, idle, overtime, total_cost: idle_part + terminal })
}

/// Total idle cost rewritten over the appointments preceded by positive idle
/// time: telescoped start-time terms minus the realized service of each busy block.
pub fn idle_cost_block_form(schedule: &Schedule, scenario: &Scenario, inst: &Instance) -> Result<f64> {
    let completion = completion_times(schedule, scenario, inst)?;
    let n = inst.n;
    let realized = scenario.realized(&schedule.sequence);
    // Appointment times extended with the horizon end as appointment n.
    let start_at = |i: usize| if i < n { schedule.start[i] } else { inst.horizon };
    let idle_set: Vec<usize> = (0..=n)
        .filter(|&i| {
            let prev = if i == 0 { 0.0 } else { completion[i - 1] };
            start_at(i) - prev > 0.0
        })
        .collect();
    let Some(&last) = idle_set.last() else {
        return Ok(0.0);
    };
    let c = &inst.idle_cost;
    let mut total = 0.0;
    for w in idle_set.windows(2) {
        total += (c[w[0]] - c[w[1]]) * start_at(w[0]);
    }
    total += c[last] * start_at(last);
    total -= c[idle_set[0]] * schedule.start[0];
    let mut block_start = 0;
    for &i in &idle_set {
        let block: f64 = realized[block_start..i].iter().sum();
        total -= c[i] * block;
        block_start = i;
    }
    Ok(total)
}
