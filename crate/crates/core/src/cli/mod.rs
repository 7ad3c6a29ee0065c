//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal or verification failure, 2 invalid
//! input, 3 method not applicable to the instance, 4 time limit reached with
//! an incumbent, 5 audited schedule violates a guarantee.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::adversary::{worst_case_cost, worst_case_cost_greedy, worst_case_waits};
use crate::data::{
    durations_by_type, estimate_intervals, generate_instance, load_records, sample_scenarios, CostTag, GenerateParams,
    IntervalTable, Provenance, ServiceSource,
};
use crate::error::{invalid, Error, Result};
use crate::milp::{build_raswtg0, build_raswtg_k, build_saa_rwtg, build_wsras, write_lp};
use crate::model::{Instance, Scenario, Schedule, Sequence};
use crate::oracle::{
    brute_sequence_optimum, brute_worst_cost, brute_worst_wait, max_sampled_cost, OracleObjective, MAX_SCENARIO_N,
    MAX_SEQUENCE_N,
};
use crate::rules::asap_schedule;
use crate::sequencer::ExactMethod;

pub mod audit;
pub mod solve;

pub use audit::{audit, empirical_metrics, AuditReport, EmpiricalMetrics};
pub use solve::{solve, Method, SolveOptions, SolveReport, SolveStatus};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_TIME_LIMIT: i32 = 4;
pub const EXIT_INFEASIBLE: i32 = 5;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) | Error::Parse(_) | Error::Io { .. } => EXIT_INVALID,
        Error::NotApplicable(_) | Error::Unsupported(_) | Error::SizeCap { .. } => EXIT_REGIME,
        Error::Solver(_) => EXIT_FAILURE,
    }
}

#[derive(Parser, Debug)]
#[command(name = "robust-appt", version, about = "Robust appointment scheduling with waiting-time guarantees")]
pub struct Cli {
    /// Worker threads for parallel work.
    #[arg(long, global = true, env = "ROBUST_APPT_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate per-type service-time intervals from historical records.
    Estimate {
        records: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        lo: f64,
        #[arg(long, default_value_t = 90.0)]
        hi: f64,
        /// Only use records strictly before this day (YYYY-MM-DD).
        #[arg(long)]
        until: Option<chrono::NaiveDate>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an instance from consecutive historical records.
    Generate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        intervals: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        noshow_rate: f64,
        /// Waiting-time guarantee for every customer.
        #[arg(long)]
        wait: f64,
        #[arg(long, value_enum, default_value_t = CostTag::Constant)]
        cost_tag: CostTag,
        /// Restrict the window to one day (YYYY-MM-DD).
        #[arg(long)]
        day: Option<chrono::NaiveDate>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance file, or every `.json` instance in a directory.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
        /// Write the model in LP format (MILP methods only).
        #[arg(long)]
        lp_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check guarantees and worst-case cost, optionally over sampled scenarios.
    Audit {
        schedule: PathBuf,
        instance: PathBuf,
        #[command(flatten)]
        scenarios: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the robust, weighted-sum and sample-average models.
    Compare {
        instance: PathBuf,
        /// Waiting costs for the weighted-sum legs.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0])]
        cw_list: Vec<f64>,
        /// Training samples for the sample-average leg.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[command(flatten)]
        scenarios: ScenarioArgs,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Solve and emit the interappointment times as CSV.
    Interapp {
        instance: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case scenario and waiting times of a schedule.
    Adversary {
        schedule: PathBuf,
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the fast routines against brute force on one instance.
    Verify {
        instance: PathBuf,
        /// Schedule to check; defaults to earliest starts in identity order.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Also compare the exact solver with a grid search over start times.
        #[arg(long)]
        optimum: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    /// Waiting cost for `wsras`.
    #[arg(long, default_value_t = 0.0)]
    pub cw: f64,
    /// Number of in-box samples drawn for `saa`.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// JSON array of per-customer service vectors for `saa`.
    #[arg(long)]
    pub samples_file: Option<PathBuf>,
    /// One-based sequence for `asap`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub perm: Option<Vec<usize>>,
    /// Seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, value_enum)]
    pub exact_method: Option<ExactArg>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum ExactArg {
    AsapEnum,
    MilpEnum,
    FullMilp,
}

impl From<ExactArg> for ExactMethod {
    fn from(a: ExactArg) -> Self {
        match a {
            ExactArg::AsapEnum => ExactMethod::AsapEnum,
            ExactArg::MilpEnum => ExactMethod::MilpEnum,
            ExactArg::FullMilp => ExactMethod::FullMilp,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// Number of sampled scenarios; 0 skips the empirical part.
    #[arg(long, default_value_t = 0)]
    pub scenarios: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// JSON array of per-customer service vectors to replay.
    #[arg(long, conflicts_with = "records")]
    pub replay: Option<PathBuf>,
    /// Held-out records to draw service times from (needs a generated instance).
    #[arg(long)]
    pub records: Option<PathBuf>,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// Reads a plain instance or a generated instance with provenance.
pub fn read_instance(path: &Path) -> Result<(Instance, Option<Provenance>)> {
    let mut v = read_json(path)?;
    let (inst, prov) = if let Some(inner) = v.get_mut("instance").map(Value::take) {
        let prov = v.get_mut("provenance").map(Value::take).map(|p| from_value(p, "provenance")).transpose()?;
        (from_value::<Instance>(inner, "instance")?, prov)
    } else {
        (from_value::<Instance>(v, "instance")?, None)
    };
    inst.validate()?;
    Ok((inst, prov))
}

/// Reads `{"perm", "start"}`, or any report carrying it under `schedule`.
pub fn read_schedule(path: &Path) -> Result<Schedule> {
    let mut v = read_json(path)?;
    let v = v.get_mut("schedule").map(Value::take).unwrap_or(v);
    from_value(v, "schedule")
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    from_value(read_json(path)?, "service rows")
}

/// Serializes `body` with the schema version (and seed, when relevant) added.
pub fn envelope<T: Serialize>(body: &T, seed: Option<u64>) -> Result<String> {
    let mut v = serde_json::to_value(body).map_err(|e| Error::Solver(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        let mut out = serde_json::Map::new();
        out.insert("schema_version".into(), SCHEMA_VERSION.into());
        if let Some(s) = seed {
            out.insert("seed".into(), s.into());
        }
        out.extend(std::mem::take(map));
        v = Value::Object(out);
    }
    crate::json::to_string_pretty(&v).map_err(|e| Error::Solver(e.to_string()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|source| Error::Io { path: p.display().to_string(), source }),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Error::Io { path: "<stdout>".into(), source: e })
                }
                _ => Ok(()),
            }
        }
    }
}

fn in_box_samples(inst: &Instance, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let all = Instance { show_count: inst.n, ..inst.clone() };
    Ok(sample_scenarios(&all, ServiceSource::Uniform, count, seed)?.scenarios.into_iter().map(|s| s.service).collect())
}

fn solve_options(args: &SolveArgs, inst: &Instance, threads: usize) -> Result<SolveOptions> {
    let samples = match (&args.samples_file, args.method) {
        (Some(p), _) => read_rows(p)?,
        (None, Method::Saa) => in_box_samples(inst, args.samples, args.seed)?,
        _ => Vec::new(),
    };
    let sequence = args.perm.as_deref().map(Sequence::from_one_based).transpose()?;
    let time_limit = args.time_limit.map(duration).transpose()?;
    Ok(SolveOptions {
        time_limit,
        wait_cost: args.cw,
        samples,
        sequence,
        threads,
        exact_method: args.exact_method.map(Into::into),
    })
}

fn duration(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|_| invalid(format!("bad time limit {secs}")))
}

fn solve_code(r: &SolveReport) -> i32 {
    if r.status == SolveStatus::TimeLimit {
        EXIT_TIME_LIMIT
    } else {
        EXIT_OK
    }
}

/// Builds scenarios from `--scenarios/--replay/--records`.
fn scenarios(args: &ScenarioArgs, inst: &Instance, prov: Option<&Provenance>) -> Result<(Vec<Scenario>, Vec<String>)> {
    if args.scenarios == 0 && args.replay.is_none() {
        return Ok((Vec::new(), Vec::new()));
    }
    let rows;
    let held;
    let source = if let Some(p) = &args.replay {
        rows = read_rows(p)?;
        ServiceSource::Replay(&rows)
    } else if let Some(p) = &args.records {
        let prov = prov.ok_or_else(|| invalid("--records needs a generated instance with exam types"))?;
        held = durations_by_type(&load_records(p)?.records);
        ServiceSource::Draw { exam_types: &prov.exam_types, held_out: &held }
    } else {
        ServiceSource::Uniform
    };
    let count = match (&args.replay, args.scenarios) {
        (Some(_), 0) => rows_len(&source),
        (_, c) => c,
    };
    let set = sample_scenarios(inst, source, count, args.seed)?;
    Ok((set.scenarios, set.warnings))
}

fn rows_len(source: &ServiceSource<'_>) -> usize {
    match source {
        ServiceSource::Replay(r) => r.len(),
        _ => 0,
    }
}

#[derive(Serialize)]
struct EstimateOut<'a> {
    #[serde(flatten)]
    table: &'a IntervalTable,
    rejected_rows: &'a [crate::data::RowError],
}

#[derive(Serialize)]
struct AuditOut<'a> {
    #[serde(flatten)]
    report: &'a AuditReport,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct AdversaryOut {
    worst_case: crate::adversary::AdversaryResult,
    greedy_lower_bound: f64,
    worst_wait: Vec<f64>,
}

#[derive(Serialize, Clone, Debug)]
pub struct CompareRow {
    pub leg: String,
    pub cw: Option<f64>,
    pub status: String,
    pub objective: Option<f64>,
    pub worst_case_cost: Option<f64>,
    pub robust_feasible: Option<bool>,
    pub guarantee_met_share: Option<f64>,
    pub idle_to_last: Option<f64>,
    pub total_idle: Option<f64>,
    pub overtime: Option<f64>,
    pub total_cost: Option<f64>,
    pub runtime_ms: Option<f64>,
    pub error: Option<String>,
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    expected: f64,
    actual: f64,
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    match dispatch(cli.command, threads) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, threads: usize) -> Result<i32> {
    match command {
        Command::Estimate { records, lo, hi, until, out } => {
            let report = load_records(&records)?;
            for r in &report.rejected {
                log::warn!("row {} rejected: {}", r.row, r.message);
            }
            let used: Vec<_> = report.records.iter().filter(|r| until.is_none_or(|d| r.day < d)).cloned().collect();
            let table = estimate_intervals(&used, lo, hi)?;
            emit(out.as_deref(), &envelope(&EstimateOut { table: &table, rejected_rows: &report.rejected }, None)?)?;
            Ok(EXIT_OK)
        }
        Command::Generate { records, intervals, n, noshow_rate, wait, cost_tag, day, seed, out } => {
            let window: Vec<_> =
                load_records(&records)?.records.into_iter().filter(|r| day.is_none_or(|d| r.day == d)).collect();
            let table: IntervalTable = from_value(read_json(&intervals)?, "interval table")?;
            let g = generate_instance(&window, &table, &GenerateParams { n, noshow_rate, wait, cost_tag, seed })?;
            emit(out.as_deref(), &envelope(&g, Some(seed))?)?;
            Ok(EXIT_OK)
        }
        Command::Solve { instance, opts, lp_out, out } => {
            if instance.is_dir() {
                return solve_dir(&instance, &opts, out.as_deref(), threads);
            }
            let (inst, _) = read_instance(&instance)?;
            let so = solve_options(&opts, &inst, threads)?;
            if let Some(p) = &lp_out {
                let f = match opts.method {
                    Method::Milp0 => build_raswtg0(&inst)?,
                    Method::Milp | Method::Exact => build_raswtg_k(&inst, None)?,
                    Method::Wsras => build_wsras(&inst, opts.cw)?,
                    Method::Saa => build_saa_rwtg(&inst, &so.samples)?,
                    m => return Err(invalid(format!("--lp-out is not available for {m:?}"))),
                };
                std::fs::write(p, write_lp(&f.model)).map_err(|source| Error::Io { path: p.display().to_string(), source })?;
            }
            let r = solve(&inst, opts.method, &so)?;
            emit(out.as_deref(), &envelope(&r, Some(opts.seed))?)?;
            Ok(solve_code(&r))
        }
        Command::Audit { schedule, instance, scenarios: sargs, out } => {
            let (inst, prov) = read_instance(&instance)?;
            let s = read_schedule(&schedule)?;
            let (sc, warnings) = scenarios(&sargs, &inst, prov.as_ref())?;
            let report = audit(&s, &inst, &sc)?;
            let seed = (!sc.is_empty()).then_some(sargs.seed);
            emit(out.as_deref(), &envelope(&AuditOut { report: &report, warnings }, seed)?)?;
            Ok(if report.feasibility.feasible { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Compare { instance, cw_list, samples, scenarios: sargs, time_limit, out, csv } => {
            let (inst, prov) = read_instance(&instance)?;
            let mut sargs = sargs;
            if sargs.scenarios == 0 && sargs.replay.is_none() {
                sargs.scenarios = 1000;
            }
            let (sc, _) = scenarios(&sargs, &inst, prov.as_ref())?;
            let time_limit = time_limit.map(duration).transpose()?;
            let rows = compare(&inst, &cw_list, samples, &sc, time_limit, sargs.seed, threads)?;
            if let Some(p) = &csv {
                let mut w = csv::Writer::from_path(p).map_err(|e| Error::Parse(e.to_string()))?;
                for r in &rows {
                    w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
                }
                w.flush().map_err(|source| Error::Io { path: p.display().to_string(), source })?;
            }
            #[derive(Serialize)]
            struct Out<'a> {
                scenarios: usize,
                rows: &'a [CompareRow],
            }
            emit(out.as_deref(), &envelope(&Out { scenarios: sc.len(), rows: &rows }, Some(sargs.seed))?)?;
            Ok(EXIT_OK)
        }
        Command::Interapp { instance, opts, out } => {
            let (inst, _) = read_instance(&instance)?;
            let r = solve(&inst, opts.method, &solve_options(&opts, &inst, threads)?)?;
            let mut text = String::from("i,gap");
            for (i, g) in r.schedule.interappointment_times().iter().enumerate() {
                text.push_str(&format!("\n{},{g:.6}", i + 1));
            }
            emit(out.as_deref(), &text)?;
            Ok(solve_code(&r))
        }
        Command::Adversary { schedule, instance, out } => {
            let (inst, _) = read_instance(&instance)?;
            let s = read_schedule(&schedule)?;
            s.check_against(&inst)?;
            let body = AdversaryOut {
                worst_case: worst_case_cost(&s, &inst)?,
                greedy_lower_bound: worst_case_cost_greedy(&s, &inst)?.value,
                worst_wait: worst_case_waits(&s, &inst)?,
            };
            emit(out.as_deref(), &envelope(&body, None)?)?;
            Ok(EXIT_OK)
        }
        Command::Verify { instance, schedule, samples, optimum, seed, out } => {
            let (inst, _) = read_instance(&instance)?;
            let s = match &schedule {
                Some(p) => read_schedule(p)?,
                None => asap_schedule(&inst, &Sequence::identity(inst.n))?,
            };
            s.check_against(&inst)?;
            let checks = verify(&inst, &s, samples, optimum, seed, threads)?;
            let passed = checks.iter().all(|c| c.passed);
            #[derive(Serialize)]
            struct Out {
                passed: bool,
                checks: Vec<Check>,
            }
            emit(out.as_deref(), &envelope(&Out { passed, checks }, Some(seed))?)?;
            Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

fn solve_dir(dir: &Path, args: &SolveArgs, out: Option<&Path>, threads: usize) -> Result<i32> {
    let out = out.ok_or_else(|| invalid("solving a directory needs --out <directory>"))?;
    std::fs::create_dir_all(out).map_err(|source| Error::Io { path: out.display().to_string(), source })?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|source| Error::Io { path: dir.display().to_string(), source })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Solver(format!("thread pool: {e}")))?;
    let codes: Vec<i32> = pool.install(|| {
        files
            .par_iter()
            .map(|f| {
                let one = || -> Result<i32> {
                    let (inst, _) = read_instance(f)?;
                    let r = solve(&inst, args.method, &solve_options(args, &inst, 1)?)?;
                    emit(Some(&out.join(f.file_name().expect("file"))), &envelope(&r, Some(args.seed))?)?;
                    Ok(solve_code(&r))
                };
                one().unwrap_or_else(|e| {
                    eprintln!("error: {}: {e}", f.display());
                    exit_code(&e)
                })
            })
            .collect()
    });
    let failure = codes.iter().copied().filter(|&c| c != EXIT_OK && c != EXIT_TIME_LIMIT).max();
    Ok(failure.unwrap_or(if codes.contains(&EXIT_TIME_LIMIT) { EXIT_TIME_LIMIT } else { EXIT_OK }))
}

/// Solves each leg and evaluates it on the shared scenario set. A failing
/// leg becomes a row with an error message.
pub fn compare(
    inst: &Instance,
    cw_list: &[f64],
    samples: usize,
    scenarios: &[Scenario],
    time_limit: Option<Duration>,
    seed: u64,
    threads: usize,
) -> Result<Vec<CompareRow>> {
    let training = in_box_samples(inst, samples, seed)?;
    let mut legs: Vec<(String, Method, Option<f64>)> = vec![("raswtg".into(), Method::Exact, None)];
    legs.extend(cw_list.iter().map(|&cw| (format!("wsras(cw={cw})"), Method::Wsras, Some(cw))));
    legs.push(("saa".into(), Method::Saa, None));
    let rows = legs
        .into_iter()
        .map(|(leg, method, cw)| {
            let opts = SolveOptions {
                time_limit,
                wait_cost: cw.unwrap_or(0.0),
                samples: training.clone(),
                threads,
                ..Default::default()
            };
            let blank = CompareRow {
                leg,
                cw,
                status: "error".into(),
                objective: None,
                worst_case_cost: None,
                robust_feasible: None,
                guarantee_met_share: None,
                idle_to_last: None,
                total_idle: None,
                overtime: None,
                total_cost: None,
                runtime_ms: None,
                error: None,
            };
            let result = solve(inst, method, &opts)
                .and_then(|r| empirical_metrics(&r.schedule, inst, scenarios).map(|m| (r, m)));
            match result {
                Ok((r, m)) => CompareRow {
                    status: serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    objective: Some(r.objective),
                    worst_case_cost: Some(r.worst_case_cost),
                    robust_feasible: Some(r.feasible),
                    guarantee_met_share: Some(m.guarantee_met_share),
                    idle_to_last: Some(m.mean_idle_to_last),
                    total_idle: Some(m.mean_total_idle),
                    overtime: Some(m.mean_overtime),
                    total_cost: Some(m.mean_total_cost),
                    runtime_ms: Some(r.runtime_ms),
                    ..blank
                },
                Err(e) => CompareRow { error: Some(e.to_string()), ..blank },
            }
        })
        .collect();
    Ok(rows)
}

fn verify(inst: &Instance, s: &Schedule, samples: usize, optimum: bool, seed: u64, threads: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut check = |name: String, expected: f64, actual: f64, passed: bool| {
        checks.push(Check { name, passed, expected, actual });
    };
    let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol;
    if inst.n > MAX_SCENARIO_N {
        return Err(Error::SizeCap { what: "verification", n: inst.n, cap: MAX_SCENARIO_N });
    }
    let brute = brute_worst_cost(s, inst)?;
    let fast = worst_case_cost(s, inst)?.value;
    check("worst_case_cost".into(), brute, fast, close(brute, fast, 1e-6));
    for (i, w) in worst_case_waits(s, inst)?.into_iter().enumerate() {
        let b = brute_worst_wait(s, inst, i)?;
        check(format!("worst_case_wait[{}]", i + 1), b, w, close(b, w, 1e-6));
    }
    if samples > 0 && inst.n <= 6 {
        let sampled = max_sampled_cost(s, inst, samples, seed)?;
        // Passes when no interior scenario exceeds the corner maximum.
        check("corner_sufficiency".into(), brute, sampled, sampled <= brute + 1e-9);
    }
    if optimum && inst.n <= MAX_SEQUENCE_N {
        let exact = solve(inst, Method::Exact, &SolveOptions { threads, ..Default::default() })?;
        let grid = brute_sequence_optimum(inst, &OracleObjective::Robust, 0.5)?;
        let passed = close(grid.objective, exact.objective, 0.1) && exact.objective <= grid.objective + 1e-6;
        check("sequence_optimum".into(), grid.objective, exact.objective, passed);
    }
    Ok(checks)
}
