//! Brute-force reference implementations.
//!
//! Everything here is written directly from the definitions and relies on
//! nothing but [`evaluate`]; the point is to check the closed forms and the
//! solvers against code that shares none of their reasoning.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{evaluate, Instance, Scenario, Schedule, Sequence};

pub const MAX_SCENARIO_N: usize = 8;
pub const MAX_SEQUENCE_N: usize = 5;
pub const REFINED_SEQUENCES: usize = 3;

fn cap(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::SizeCap { what, n, cap: limit });
    }
    Ok(())
}

/// All show vectors with exactly `k` ones.
fn show_sets(n: usize, k: usize) -> Vec<Vec<bool>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).map(|j| m >> j & 1 == 1).collect())
        .collect()
}

/// All `2^n` corners of the service-time box.
fn corners(inst: &Instance) -> Vec<Vec<f64>> {
    let n = inst.n;
    (0u32..(1 << n))
        .map(|m| (0..n).map(|j| if m >> j & 1 == 1 { inst.service_ub[j] } else { inst.service_lb[j] }).collect())
        .collect()
}

/// Maximum cost over every box corner and every show set of size `k`.
pub fn brute_worst_cost(schedule: &Schedule, inst: &Instance) -> Result<f64> {
    inst.validate()?;
    cap("scenario enumeration", inst.n, MAX_SCENARIO_N)?;
    let mut worst = f64::NEG_INFINITY;
    for show in show_sets(inst.n, inst.show_count) {
        for service in corners(inst) {
            let sc = Scenario { service, show: show.clone() };
            worst = worst.max(evaluate(schedule, &sc, inst)?.total_cost);
        }
    }
    Ok(worst)
}

/// Maximum waiting time of zero-based appointment `i` over corners and show
/// sets of size `k` in which that appointment's customer shows.
pub fn brute_worst_wait(schedule: &Schedule, inst: &Instance, i: usize) -> Result<f64> {
    inst.validate()?;
    cap("scenario enumeration", inst.n, MAX_SCENARIO_N)?;
    let j = schedule.sequence.customer(i);
    let mut worst = 0.0f64;
    for show in show_sets(inst.n, inst.show_count).into_iter().filter(|s| s[j]) {
        for service in corners(inst) {
            let sc = Scenario { service, show: show.clone() };
            worst = worst.max(evaluate(schedule, &sc, inst)?.wait[i]);
        }
    }
    Ok(worst)
}

/// Largest cost over uniformly drawn interior scenarios with `k` shows.
pub fn max_sampled_cost(schedule: &Schedule, inst: &Instance, samples: usize, seed: u64) -> Result<f64> {
    inst.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = inst.n;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let service = (0..n)
            .map(|j| {
                let (lo, hi) = (inst.service_lb[j], inst.service_ub[j]);
                if hi > lo {
                    rng.random_range(lo..=hi)
                } else {
                    lo
                }
            })
            .collect();
        let mut show = vec![false; n];
        sample(&mut rng, n, inst.show_count).into_iter().for_each(|j| show[j] = true);
        worst = worst.max(evaluate(schedule, &Scenario { service, show }, inst)?.total_cost);
    }
    Ok(worst)
}

/// True iff no sampled interior scenario beats the corner enumeration.
pub fn corner_sufficiency_check(schedule: &Schedule, inst: &Instance, samples: usize, seed: u64) -> Result<bool> {
    cap("corner sufficiency check", inst.n, 6)?;
    let reference = brute_worst_cost(schedule, inst)?;
    Ok(max_sampled_cost(schedule, inst, samples, seed)? <= reference + 1e-9)
}

/// Objective minimized by [`brute_sequence_optimum`].
#[derive(Clone, Debug)]
pub enum OracleObjective {
    /// Worst-case cost subject to worst-case waiting guarantees.
    Robust,
    /// Worst split scenario of idle, weighted waiting and overtime cost; no guarantees.
    WeightedSum { wait_cost: f64 },
    /// Mean cost over full-attendance samples, subject to waiting guarantees.
    SampleAverage { samples: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleOutcome {
    pub schedule: Schedule,
    pub objective: f64,
    /// Start-time grid step of the final (refined) search.
    pub resolution: f64,
    pub sequences: usize,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(n, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

struct GridSearch<'a> {
    inst: &'a Instance,
    objective: &'a OracleObjective,
    seq: Sequence,
    guarantees: bool,
    best: Option<(f64, Vec<f64>)>,
}

impl GridSearch<'_> {
    /// Earliest start of appointment `i` meeting its guarantee in every
    /// scenario, given earlier start times. Waiting at `i` does not depend on
    /// `A_i` except through `(C_{i-1} - A_i)^+`.
    fn earliest(&self, start: &[f64], i: usize) -> Result<f64> {
        if !self.guarantees || i == 0 {
            return Ok(0.0);
        }
        let inst = self.inst;
        let n = inst.n;
        let j = self.seq.customer(i);
        // Probe with appointment i placed at 0 so its wait equals C_{i-1}.
        let mut probe = start[..i].to_vec();
        probe.resize(n, 0.0);
        let s = Schedule { sequence: self.seq.clone(), start: probe };
        let mut latest = 0.0f64;
        for show in show_sets(n, inst.show_count).into_iter().filter(|sh| sh[j]) {
            for service in corners(inst) {
                let r = evaluate(&s, &Scenario { service, show: show.clone() }, inst)?;
                latest = latest.max(r.wait[i]);
            }
        }
        Ok((latest - inst.wait_guarantee[j]).max(0.0))
    }

    fn value(&self, start: &[f64]) -> Result<f64> {
        let inst = self.inst;
        let s = Schedule { sequence: self.seq.clone(), start: start.to_vec() };
        match self.objective {
            OracleObjective::Robust => brute_worst_cost(&s, inst),
            OracleObjective::WeightedSum { wait_cost } => {
                let n = inst.n;
                let mut worst = f64::NEG_INFINITY;
                for b in 0..=n {
                    let service = (0..n)
                        .map(|j| {
                            let at = s.sequence.as_slice().iter().position(|&x| x == j).expect("bijection");
                            if at < b {
                                inst.service_lb[j]
                            } else {
                                inst.service_ub[j]
                            }
                        })
                        .collect();
                    let r = evaluate(&s, &Scenario::all_show(service), inst)?;
                    worst = worst.max(r.total_cost + wait_cost * r.wait.iter().sum::<f64>());
                }
                Ok(worst)
            }
            OracleObjective::SampleAverage { samples } => {
                let mut total = 0.0;
                for p in samples {
                    total += evaluate(&s, &Scenario::all_show(p.clone()), inst)?.total_cost;
                }
                Ok(total / samples.len() as f64)
            }
        }
    }

    /// Exhaustive search where appointment `i` ranges over `axis(i, earliest)`.
    fn run(&mut self, start: &mut Vec<f64>, axis: &dyn Fn(usize, f64) -> Vec<f64>) -> Result<()> {
        let i = start.len();
        if i == self.inst.n {
            let v = self.value(start)?;
            if self.best.as_ref().is_none_or(|(b, _)| v < *b - 1e-12) {
                self.best = Some((v, start.clone()));
            }
            return Ok(());
        }
        let lo = self.earliest(start, i)?;
        for a in axis(i, lo) {
            start.push(a);
            self.run(start, axis)?;
            start.pop();
        }
        Ok(())
    }
}

fn grid_from(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = vec![lo];
    let mut t = (lo / step).floor() * step + step;
    while t <= hi + 1e-12 {
        if t > lo + 1e-12 {
            out.push(t);
        }
        t += step;
    }
    out
}

/// Best schedule over every sequence and a start-time grid: a `coarse` step
/// over `[earliest feasible, max(L, sum ub)]` for every sequence, then a
/// 0.05-minute grid within one coarse step of the best point of the
/// [`REFINED_SEQUENCES`] best sequences, and a last 0.005-minute pass within
/// 0.05 of that. The earliest feasible start of each appointment is always a
/// grid point.
pub fn brute_sequence_optimum(inst: &Instance, objective: &OracleObjective, coarse: f64) -> Result<OracleOutcome> {
    inst.validate()?;
    cap("sequence enumeration", inst.n, MAX_SEQUENCE_N)?;
    if !(coarse > 0.0) {
        return Err(crate::error::invalid("grid resolution must be positive"));
    }
    let guarantees = !matches!(objective, OracleObjective::WeightedSum { .. });
    if let OracleObjective::SampleAverage { samples } = objective {
        if samples.is_empty() {
            return Err(crate::error::invalid("at least one sample is required"));
        }
    }
    let hi = inst.horizon.max(inst.service_ub.iter().sum());
    let fine = 0.05f64.min(coarse);

    let perms = permutations(inst.n);
    let mut coarse_best: Vec<(f64, Sequence, Vec<f64>)> = Vec::new();
    for p in &perms {
        let seq = Sequence::new(p.clone())?;
        let mut g = GridSearch { inst, objective, seq: seq.clone(), guarantees, best: None };
        g.run(&mut vec![], &|i, lo| if i == 0 { vec![0.0] } else { grid_from(lo, hi, coarse) })?;
        if let Some((v, start)) = g.best {
            coarse_best.push((v, seq, start));
        }
    }
    coarse_best.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best: Option<(f64, Schedule)> = None;
    for (v, seq, start) in coarse_best.into_iter().take(REFINED_SEQUENCES) {
        let mut cur = (v, start);
        for (step, radius) in [(fine, coarse), (fine / 10.0, fine)] {
            let around = cur.1.clone();
            let mut g = GridSearch { inst, objective, seq: seq.clone(), guarantees, best: Some(cur.clone()) };
            g.run(&mut vec![], &|i, lo| {
                if i == 0 {
                    return vec![0.0];
                }
                let from = (around[i] - radius).max(lo);
                grid_from(from, (around[i] + radius).min(hi.max(from)), step)
            })?;
            cur = g.best.expect("seeded");
        }
        let (v, start) = cur;
        if best.as_ref().is_none_or(|(b, _)| v < *b - 1e-12) {
            best = Some((v, Schedule::new(seq, start)?));
        }
    }
    let (objective, schedule) = best.ok_or_else(|| Error::Solver("no feasible grid point".into()))?;
    Ok(OracleOutcome { schedule, objective, resolution: fine / 10.0, sequences: perms.len() })
}
