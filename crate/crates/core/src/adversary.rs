//! Worst-case scenarios for a fixed schedule.
//!
//! The cost adversary splits the horizon at a breakpoint `b`: appointments
//! before it run at minimum service time (to expose idle time), appointments
//! from it on run at maximum service time (to push overtime). With no-shows
//! the adversary additionally chooses which `k` customers attend; the suffix
//! gets the longest maximum service times and the prefix selection is solved
//! exactly by a Pareto dynamic program over (shows used, clock, idle cost).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{pos, Instance, Scenario, Schedule, TOL};

/// A worst-case value together with the breakpoint and a scenario attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryResult {
    pub value: f64,
    /// Breakpoint in `0..=n+1`: appointments `1..b-1` (one-based) run at
    /// minimum service time, appointments `b..n` at maximum.
    pub breakpoint: usize,
    pub scenario: Scenario,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// One-based appointment number.
    pub appointment: usize,
    /// One-based customer number.
    pub customer: usize,
    pub worst_wait: f64,
    pub guarantee: f64,
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub worst_wait: Vec<f64>,
    pub violations: Vec<Violation>,
}

/// Running sum of the `k` largest values pushed so far.
#[derive(Clone, Debug)]
pub(crate) struct TopSum {
    k: usize,
    heap: BinaryHeap<Reverse<OrderedFloat<f64>>>,
    sum: f64,
}

impl TopSum {
    pub(crate) fn new(k: usize) -> Self {
        TopSum { k, heap: BinaryHeap::with_capacity(k + 1), sum: 0.0 }
    }

    pub(crate) fn push(&mut self, x: f64) {
        if self.k == 0 {
            return;
        }
        self.heap.push(Reverse(OrderedFloat(x)));
        self.sum += x;
        if self.heap.len() > self.k {
            let Reverse(OrderedFloat(smallest)) = self.heap.pop().expect("heap is non-empty");
            self.sum -= smallest;
        }
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum
    }
}

/// Sum of the `k` largest entries of `values`.
pub fn top_k_sum(values: &[f64], k: usize) -> f64 {
    let mut t = TopSum::new(k);
    values.iter().for_each(|&v| t.push(v));
    t.sum()
}

/// Indices of the `k` largest entries, ties to the lowest index.
fn top_k_indices(values: &[(usize, f64)], k: usize) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    v.into_iter().take(k).map(|(i, _)| i).collect()
}

/// Per-appointment data of a schedule.
struct Positional {
    n: usize,
    start: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
}

impl Positional {
    fn new(schedule: &Schedule, inst: &Instance) -> Result<Self> {
        inst.validate()?;
        schedule.check_against(inst)?;
        let seq = &schedule.sequence;
        Ok(Positional {
            n: inst.n,
            start: schedule.start.clone(),
            lb: seq.positional(&inst.service_lb),
            ub: seq.positional(&inst.service_ub),
        })
    }

    /// Start time of one-based appointment `b`, with `A_0 = 0` and `A_{n+1} = L`.
    fn start_at(&self, b: usize, inst: &Instance) -> f64 {
        match b {
            0 => 0.0,
            b if b <= self.n => self.start[b - 1],
            _ => inst.horizon,
        }
    }

    /// Scenario with minimum service before breakpoint `b` and maximum from it on.
    fn split_scenario(&self, schedule: &Schedule, b: usize, shown: &[usize]) -> Scenario {
        let n = self.n;
        let mut service = vec![0.0; n];
        let mut show = vec![false; n];
        for i in 0..n {
            let j = schedule.sequence.customer(i);
            service[j] = if i + 1 < b.max(1) { self.lb[i] } else { self.ub[i] };
        }
        for &i in shown {
            show[schedule.sequence.customer(i)] = true;
        }
        Scenario { service, show }
    }
}

/// Worst-case cost when every customer shows up.
pub fn worst_case_cost_zero_noshow(schedule: &Schedule, inst: &Instance) -> Result<AdversaryResult> {
    if !inst.all_show() {
        return Err(Error::Unsupported(format!(
            "zero-no-show adversary needs show_count = n, found {} < {}",
            inst.show_count, inst.n
        )));
    }
    worst_case_cost(schedule, inst)
}

/// Exact worst-case cost over the service-time box and all size-`k` show sets.
pub fn worst_case_cost(schedule: &Schedule, inst: &Instance) -> Result<AdversaryResult> {
    let p = Positional::new(schedule, inst)?;
    let n = p.n;
    let k = inst.show_count;
    let c = &inst.idle_cost;

    let mut frontier = Frontier::new(k, true);
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for b in 0..=n + 1 {
        let suffix_from = b.max(1) - 1;
        let suffix: Vec<(usize, f64)> = (suffix_from..n).map(|i| (i, p.ub[i])).collect();
        let m = k.min(suffix.len());
        let mut shown = top_k_indices(&suffix, m);
        let top: f64 = shown.iter().map(|&i| p.ub[i]).sum();
        let a_b = p.start_at(b, inst);
        let overtime = inst.overtime_cost * pos(a_b + top - inst.horizon);

        let idle = if b == 0 {
            0.0
        } else {
            let (v, trail) = frontier
                .query(k - m, c[b - 1], a_b)
                .expect("prefix has enough positions for the remaining shows");
            shown.extend(frontier.shown_positions(trail));
            v
        };
        let value = idle + overtime;
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, b, shown));
        }
        if (1..=n).contains(&b) {
            frontier.advance(c[b - 1], p.start[b - 1], p.lb[b - 1]);
        }
    }
    let (value, breakpoint, shown) = best.expect("at least one breakpoint");
    Ok(AdversaryResult { value, breakpoint, scenario: p.split_scenario(schedule, breakpoint, &shown) })
}

/// Worst-case cost with the prefix attendance chosen greedily: customers with
/// the smallest `c(i) * p_lb` show, where `c(i)` is the idle cost of the next
/// appointment preceded by idle time. This is a lower bound on
/// [`worst_case_cost`] and coincides with it when `k = 0` or `k = n`.
pub fn worst_case_cost_greedy(schedule: &Schedule, inst: &Instance) -> Result<AdversaryResult> {
    let p = Positional::new(schedule, inst)?;
    let n = p.n;
    let k = inst.show_count;
    let c = &inst.idle_cost;
    let c_max = inst.max_idle_cost();

    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for b in 0..=n + 1 {
        let suffix_from = b.max(1) - 1;
        let suffix: Vec<(usize, f64)> = (suffix_from..n).map(|i| (i, p.ub[i])).collect();
        let m = k.min(suffix.len());
        let mut shown = top_k_indices(&suffix, m);
        let prefix_len = suffix_from;
        let s = k - m;
        if s > 0 {
            // Idle pattern with every prefix customer at minimum service time.
            let mut positive_idle = vec![false; n + 1];
            let mut clock = 0.0f64;
            for (i, flag) in positive_idle.iter_mut().enumerate() {
                let a = p.start_at(i + 1, inst);
                *flag = a - clock > TOL;
                if i < n {
                    let service = if i < prefix_len { p.lb[i] } else { p.ub[i] };
                    clock = clock.max(a) + service;
                }
            }
            let mut keyed: Vec<(usize, f64)> = (0..prefix_len)
                .map(|i| {
                    let next = (i + 1..=n).find(|&l| positive_idle[l]);
                    let ci = next.map_or(c_max, |l| c[l]);
                    (i, ci * p.lb[i])
                })
                .collect();
            keyed.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
            shown.extend(keyed.into_iter().take(s).map(|(i, _)| i));
        }
        let mut attends = vec![false; n];
        shown.iter().for_each(|&i| attends[i] = true);
        let mut clock = 0.0f64;
        let mut idle = 0.0;
        for i in 0..b.min(n + 1) {
            let a = p.start_at(i + 1, inst);
            idle += c[i] * pos(a - clock);
            if i < n {
                clock = clock.max(a) + if attends[i] { p.lb[i] } else { 0.0 };
            }
        }
        let top: f64 = (suffix_from..n).filter(|&i| attends[i]).map(|i| p.ub[i]).sum();
        let value = idle + inst.overtime_cost * pos(p.start_at(b, inst) + top - inst.horizon);
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, b, shown));
        }
    }
    let (value, breakpoint, shown) = best.expect("at least one breakpoint");
    Ok(AdversaryResult { value, breakpoint, scenario: p.split_scenario(schedule, breakpoint, &shown) })
}

#[derive(Clone, Copy, Debug)]
struct State {
    clock: f64,
    value: f64,
    trail: u32,
}

const NO_TRAIL: u32 = u32::MAX;

/// Pareto frontier of prefix attendance choices.
///
/// `layers[j]` holds the non-dominated `(clock, accumulated idle cost)`
/// pairs reachable with exactly `j` shows among the processed positions.
/// A smaller clock and a larger value are both better for the adversary.
#[derive(Clone, Debug)]
pub(crate) struct Frontier {
    layers: Vec<Vec<State>>,
    trails: Vec<(u32, u32)>,
    track: bool,
    processed: usize,
}

impl Frontier {
    pub(crate) fn new(max_shows: usize, track: bool) -> Self {
        let mut layers = vec![Vec::new(); max_shows + 1];
        layers[0].push(State { clock: 0.0, value: 0.0, trail: NO_TRAIL });
        Frontier { layers, trails: Vec::new(), track, processed: 0 }
    }

    /// Best `value + cost * (start - clock)^+` over states with `shows` shows.
    pub(crate) fn query(&self, shows: usize, cost: f64, start: f64) -> Option<(f64, u32)> {
        let layer = self.layers.get(shows)?;
        let mut best: Option<(f64, u32)> = None;
        for s in layer {
            let v = s.value + cost * pos(start - s.clock);
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, s.trail));
            }
        }
        best
    }

    /// Processes the next appointment with the given idle cost, start time
    /// and minimum service time.
    pub(crate) fn advance(&mut self, cost: f64, start: f64, lb: f64) {
        let position = self.processed as u32;
        self.processed += 1;
        let max_shows = self.layers.len() - 1;
        let mut next: Vec<Vec<State>> = vec![Vec::new(); max_shows + 1];
        for (j, layer) in self.layers.iter().enumerate() {
            for s in layer {
                let value = s.value + cost * pos(start - s.clock);
                let base = start.max(s.clock);
                next[j].push(State { clock: base, value, trail: s.trail });
                if j < max_shows {
                    let trail = if self.track {
                        self.trails.push((s.trail, position));
                        (self.trails.len() - 1) as u32
                    } else {
                        NO_TRAIL
                    };
                    next[j + 1].push(State { clock: base + lb, value, trail });
                }
            }
        }
        for layer in next.iter_mut() {
            prune(layer);
        }
        self.layers = next;
    }

    pub(crate) fn shown_positions(&self, mut trail: u32) -> Vec<usize> {
        let mut out = Vec::new();
        while trail != NO_TRAIL {
            let (parent, position) = self.trails[trail as usize];
            out.push(position as usize);
            trail = parent;
        }
        out.reverse();
        out
    }
}

fn prune(layer: &mut Vec<State>) {
    layer.sort_by(|a, b| a.clock.total_cmp(&b.clock).then(b.value.total_cmp(&a.value)));
    let mut kept: Vec<State> = Vec::with_capacity(layer.len());
    for s in layer.drain(..) {
        if kept.last().is_none_or(|last| s.value > last.value + 1e-12) {
            kept.push(s);
        }
    }
    *layer = kept;
}

/// Worst-case waiting time of zero-based appointment `i`.
///
/// The customer at `i` shows, so at most `k - 1` earlier customers do; the
/// adversary picks the window start `l` and the `k - 1` longest maximum
/// service times inside `l..i`.
pub fn worst_case_wait(schedule: &Schedule, inst: &Instance, i: usize) -> Result<f64> {
    let p = Positional::new(schedule, inst)?;
    if i >= p.n {
        return Err(crate::error::invalid(format!("appointment {i} out of range for n = {}", p.n)));
    }
    Ok(wait_at(&p.start, &p.ub, inst.show_count, i))
}

fn wait_at(start: &[f64], ub: &[f64], k: usize, i: usize) -> f64 {
    if k == 0 || i == 0 {
        return 0.0;
    }
    let mut window = TopSum::new(k - 1);
    let mut worst = 0.0f64;
    for l in (0..i).rev() {
        window.push(ub[l]);
        worst = worst.max(start[l] + window.sum() - start[i]);
    }
    worst
}

/// Worst-case waiting time of every appointment.
pub fn worst_case_waits(schedule: &Schedule, inst: &Instance) -> Result<Vec<f64>> {
    let p = Positional::new(schedule, inst)?;
    Ok((0..p.n).map(|i| wait_at(&p.start, &p.ub, inst.show_count, i)).collect())
}

pub fn check_feasibility(schedule: &Schedule, inst: &Instance) -> Result<FeasibilityReport> {
    let worst_wait = worst_case_waits(schedule, inst)?;
    let violations: Vec<Violation> = worst_wait
        .iter()
        .enumerate()
        .filter_map(|(i, &w)| {
            let j = schedule.sequence.customer(i);
            let guarantee = inst.wait_guarantee[j];
            (w > guarantee + TOL).then(|| Violation {
                appointment: i + 1,
                customer: j + 1,
                worst_wait: w,
                guarantee,
                excess: w - guarantee,
            })
        })
        .collect();
    Ok(FeasibilityReport { feasible: violations.is_empty(), worst_wait, violations })
}
