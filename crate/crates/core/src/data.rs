//! Historical service-time records: CSV ingestion, percentile interval
//! estimation, instance generation and scenario sampling.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{Instance, Scenario, TOL};

/// One historical exam.
#[derive(Clone, Debug, PartialEq)]
pub struct ExamRecord {
    /// One-based data row number in the source file.
    pub id: usize,
    pub exam_type: String,
    pub day: NaiveDate,
    pub start: NaiveDateTime,
    pub completion: NaiveDateTime,
}

impl ExamRecord {
    pub fn duration_minutes(&self) -> f64 {
        (self.completion - self.start).num_milliseconds() as f64 / 60_000.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowError {
    pub row: usize,
    pub message: String,
}

/// Parsed records plus the rows that were rejected.
#[derive(Clone, Debug)]
pub struct LoadReport {
    pub records: Vec<ExamRecord>,
    pub rejected: Vec<RowError>,
}

#[derive(Deserialize)]
struct RawRow {
    exam_type: String,
    day: String,
    start: String,
    completion: String,
}

fn parse_time(day: NaiveDate, s: &str) -> std::result::Result<NaiveDateTime, String> {
    let s = s.trim();
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(t);
        }
    }
    for fmt in ["%H:%M:%S%.f", "%H:%M"] {
        if let Ok(t) = NaiveTime::parse_from_str(s, fmt) {
            return Ok(day.and_time(t));
        }
    }
    Err(format!("unrecognized time '{s}'"))
}

fn parse_row(raw: RawRow, id: usize) -> std::result::Result<ExamRecord, String> {
    let exam_type = raw.exam_type.trim().to_string();
    if exam_type.is_empty() {
        return Err("empty exam_type".into());
    }
    let day = NaiveDate::parse_from_str(raw.day.trim(), "%Y-%m-%d").map_err(|e| format!("bad day '{}': {e}", raw.day))?;
    let start = parse_time(day, &raw.start)?;
    let completion = parse_time(day, &raw.completion)?;
    if completion < start {
        return Err(format!("completion {completion} precedes start {start}"));
    }
    Ok(ExamRecord { id, exam_type, day, start, completion })
}

/// Parses CSV with header `exam_type,day,start,completion`. Rows that fail
/// to parse are reported by row number; an input with no valid row is an error.
pub fn parse_records<R: Read>(reader: R) -> Result<LoadReport> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    for want in ["exam_type", "day", "start", "completion"] {
        if !headers.iter().any(|h| h == want) {
            return Err(Error::Parse(format!("missing column '{want}'")));
        }
    }
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for (i, row) in rdr.deserialize::<RawRow>().enumerate() {
        let id = i + 1;
        match row.map_err(|e| e.to_string()).and_then(|raw| parse_row(raw, id)) {
            Ok(r) => records.push(r),
            Err(message) => rejected.push(RowError { row: id, message }),
        }
    }
    if records.is_empty() {
        let detail = rejected.iter().map(|r| format!("row {}: {}", r.row, r.message)).collect::<Vec<_>>().join("; ");
        return Err(Error::Parse(format!("no valid records{}{detail}", if detail.is_empty() { "" } else { ": " })));
    }
    Ok(LoadReport { records, rejected })
}

pub fn load_records(path: impl AsRef<Path>) -> Result<LoadReport> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_records(file)
}

/// Splits records into those strictly before `boundary` and the rest.
pub fn split_by_day(records: &[ExamRecord], boundary: NaiveDate) -> (Vec<ExamRecord>, Vec<ExamRecord>) {
    records.iter().cloned().partition(|r| r.day < boundary)
}

pub fn durations_by_type(records: &[ExamRecord]) -> BTreeMap<String, Vec<f64>> {
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records {
        out.entry(r.exam_type.clone()).or_default().push(r.duration_minutes());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lb: f64,
    pub ub: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalTable {
    pub lo_pct: f64,
    pub hi_pct: f64,
    pub types: BTreeMap<String, Interval>,
}

impl IntervalTable {
    pub fn get(&self, exam_type: &str) -> Result<&Interval> {
        self.types.get(exam_type).ok_or_else(|| invalid(format!("unknown exam type '{exam_type}'")))
    }
}

/// Nearest-rank percentile: the `ceil(pct * N / 100)`-th smallest value.
pub fn nearest_rank(sorted: &[f64], pct: f64) -> f64 {
    let n = sorted.len();
    // The small slack keeps ranks like 0.9 * 10 from rounding up to 10.000…1.
    let rank = (pct * n as f64 / 100.0 - 1e-9).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

pub fn estimate_intervals(records: &[ExamRecord], lo_pct: f64, hi_pct: f64) -> Result<IntervalTable> {
    if records.is_empty() {
        return Err(invalid("no records to estimate from"));
    }
    if !(0.0..=100.0).contains(&lo_pct) || !(0.0..=100.0).contains(&hi_pct) || lo_pct > hi_pct {
        return Err(invalid(format!("percentiles must satisfy 0 <= lo <= hi <= 100, got {lo_pct}, {hi_pct}")));
    }
    let types = durations_by_type(records)
        .into_iter()
        .map(|(t, mut d)| {
            d.sort_by(f64::total_cmp);
            let iv = Interval { lb: nearest_rank(&d, lo_pct), ub: nearest_rank(&d, hi_pct), count: d.len() };
            (t, iv)
        })
        .collect();
    Ok(IntervalTable { lo_pct, hi_pct, types })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CostTag {
    Constant,
    Decreasing,
    Increasing,
}

impl CostTag {
    /// Idle costs `c_1..c_{n+1}`.
    pub fn costs(self, n: usize) -> Vec<f64> {
        let two_n = 2.0 * n as f64;
        (1..=n + 1)
            .map(|i| match self {
                CostTag::Constant => 1.0,
                CostTag::Decreasing => 1.0 - (i as f64 - 1.0) / two_n,
                CostTag::Increasing => (n as f64 + i as f64 - 1.0) / two_n,
            })
            .collect()
    }
}

pub const DEFAULT_OVERTIME_COST: f64 = 1.25;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenerateParams {
    pub n: usize,
    pub noshow_rate: f64,
    pub wait: f64,
    pub cost_tag: CostTag,
    pub seed: u64,
}

/// Number of customers expected to show at the given no-show rate.
pub fn show_count(n: usize, noshow_rate: f64) -> usize {
    (((1.0 - noshow_rate) * n as f64) + 1e-9).floor() as usize
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub source_day: String,
    /// Row numbers of the sampled records, in appointment order.
    pub record_ids: Vec<usize>,
    pub exam_types: Vec<String>,
    pub cost_tag: CostTag,
    pub wait: f64,
    pub noshow_rate: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratedInstance {
    pub instance: Instance,
    pub provenance: Provenance,
}

/// Draws `n` consecutive records from `window` (at a seeded offset) and
/// builds an instance from their estimated intervals. The horizon is
/// `sum of upper bounds - W`, where `W` is the last customer's guarantee.
pub fn generate_instance(window: &[ExamRecord], intervals: &IntervalTable, params: &GenerateParams) -> Result<GeneratedInstance> {
    let n = params.n;
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(0.0..1.0).contains(&params.noshow_rate) {
        return Err(invalid(format!("no-show rate must lie in [0, 1), got {}", params.noshow_rate)));
    }
    if !(params.wait >= 0.0) {
        return Err(invalid("waiting guarantee must be non-negative"));
    }
    if window.len() < n {
        return Err(invalid(format!("window has {} records, need {n}", window.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let offset = rng.random_range(0..=window.len() - n);
    let picked = &window[offset..offset + n];
    let mut lb = Vec::with_capacity(n);
    let mut ub = Vec::with_capacity(n);
    for r in picked {
        let iv = intervals.get(&r.exam_type)?;
        lb.push(iv.lb);
        ub.push(iv.ub);
    }
    let horizon = ub.iter().sum::<f64>() - params.wait;
    if horizon < 0.0 {
        return Err(invalid(format!("horizon {horizon} is negative: the guarantee exceeds total maximum service")));
    }
    let show_count = show_count(n, params.noshow_rate);
    if show_count == 0 {
        return Err(invalid("no-show rate leaves no customer showing"));
    }
    let instance = Instance {
        n,
        service_lb: lb,
        service_ub: ub,
        wait_guarantee: vec![params.wait; n],
        idle_cost: params.cost_tag.costs(n),
        overtime_cost: DEFAULT_OVERTIME_COST,
        horizon,
        show_count,
    };
    instance.validate()?;
    debug_assert!((instance.horizon - (instance.service_ub.iter().sum::<f64>() - params.wait)).abs() <= TOL);
    let provenance = Provenance {
        source_day: picked[0].day.to_string(),
        record_ids: picked.iter().map(|r| r.id).collect(),
        exam_types: picked.iter().map(|r| r.exam_type.clone()).collect(),
        cost_tag: params.cost_tag,
        wait: params.wait,
        noshow_rate: params.noshow_rate,
        seed: params.seed,
    };
    Ok(GeneratedInstance { instance, provenance })
}

/// Where realized service times come from.
#[derive(Clone, Copy, Debug)]
pub enum ServiceSource<'a> {
    /// I.i.d. draws from each customer's held-out durations, keyed by the
    /// customer's exam type.
    Draw { exam_types: &'a [String], held_out: &'a BTreeMap<String, Vec<f64>> },
    /// Recorded per-customer durations, used in order and cycled.
    Replay(&'a [Vec<f64>]),
    /// Uniform draws inside each customer's service interval.
    Uniform,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
    /// Whether each scenario leaves the service-time box.
    pub out_of_box: Vec<bool>,
    pub warnings: Vec<String>,
    pub seed: u64,
}

/// Seeded scenarios: service times from `source`, and a uniformly random
/// show set of size `k`.
pub fn sample_scenarios(inst: &Instance, source: ServiceSource<'_>, count: usize, seed: u64) -> Result<ScenarioSet> {
    inst.validate()?;
    let n = inst.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut warnings = Vec::new();
    let mut pools: Vec<Option<&[f64]>> = Vec::new();
    match source {
        ServiceSource::Draw { exam_types, held_out } => {
            if exam_types.len() != n {
                return Err(invalid(format!("{} exam types for {n} customers", exam_types.len())));
            }
            for (j, t) in exam_types.iter().enumerate() {
                match held_out.get(t).filter(|d| !d.is_empty()) {
                    Some(d) => pools.push(Some(d)),
                    None => {
                        let msg = format!("no held-out data for type '{t}' (customer {}); using interval midpoint", j + 1);
                        log::warn!("{msg}");
                        warnings.push(msg);
                        pools.push(None);
                    }
                }
            }
        }
        ServiceSource::Uniform => {}
        ServiceSource::Replay(rows) => {
            if rows.is_empty() {
                return Err(invalid("replay needs at least one row"));
            }
            if let Some(bad) = rows.iter().position(|r| r.len() != n) {
                return Err(invalid(format!("replay row {} has {} durations, expected {n}", bad + 1, rows[bad].len())));
            }
        }
    }
    let mut scenarios = Vec::with_capacity(count);
    let mut out_of_box = Vec::with_capacity(count);
    for s in 0..count {
        let service: Vec<f64> = match source {
            ServiceSource::Replay(rows) => rows[s % rows.len()].clone(),
            ServiceSource::Uniform => (0..n)
                .map(|j| {
                    let (lo, hi) = (inst.service_lb[j], inst.service_ub[j]);
                    if hi > lo {
                        rng.random_range(lo..=hi)
                    } else {
                        lo
                    }
                })
                .collect(),
            ServiceSource::Draw { .. } => (0..n)
                .map(|j| match pools[j] {
                    Some(d) => d[rng.random_range(0..d.len())],
                    None => 0.5 * (inst.service_lb[j] + inst.service_ub[j]),
                })
                .collect(),
        };
        let mut show = vec![false; n];
        sample(&mut rng, n, inst.show_count).into_iter().for_each(|j| show[j] = true);
        let sc = Scenario { service, show };
        out_of_box.push(!sc.within_box(inst));
        scenarios.push(sc);
    }
    Ok(ScenarioSet { scenarios, out_of_box, warnings, seed })
}
