//! The `varietylab` command-line interface.
//!
//! One command per process; every command writes a single JSON report to
//! standard output. Exit codes: 0 on success, 1 on validation failure (the
//! error code is printed to standard error), 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use varietylab_core::analysis::{
    assess_stability, blocking_deduction, classify_pair, dominance_with_epsilon, PartitionCounts,
    DEFAULT_BALANCE_EPSILON,
};
use varietylab_core::harness::{
    simulate_adaptive_regulator, simulate_drift_environment, DriftSimConfig, RegulatorSimConfig,
};
use varietylab_core::partition::{absorption_events, membership_timeline, partition, Interval};
use varietylab_core::regulator::{
    greedy_policy, min_outcome_variety_bruteforce_with_budget, verify_bound_with_budget,
    OutcomeTable, DEFAULT_POLICY_BUDGET,
};
use varietylab_core::system::{ClosedSystemPair, Component, SystemSnapshot, Trace};
use varietylab_core::variety::{empirical_distribution, uniform_variety, variety, VarietyMode};

use crate::error::{Error, Result};
use crate::formats;
use crate::report::{self, RunManifest};

/// Environment variable overriding the policy-search budget.
pub const BUDGET_ENV_VAR: &str = "VARIETYLAB_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "varietylab",
    version,
    about = "Variety accounting, regulator-policy synthesis, and core/periphery dynamics",
    disable_help_subcommand = true
)]
struct Cli {
    /// Pretty-print the report (default is one compact JSON line)
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Variety (bits) of a set of element counts
    Variety(VarietyArgs),
    /// Core/periphery partition of a system over an interval
    Partition(PartitionArgs),
    /// Membership timelines and absorption events for a system
    Dynamics(DynamicsArgs),
    /// Symmetry classification of a system/environment pair
    Classify(ClassifyArgs),
    /// Requisite-variety bound utilities
    #[command(subcommand)]
    Lrv(LrvCommand),
    /// Regulator-policy synthesis
    #[command(subcommand)]
    Regulator(RegulatorCommand),
    /// Blocking deduction from partitions, a game table, and an outcome log
    Deduce(DeduceArgs),
    /// Deterministic trace generators
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Uniform,
    Empirical,
}

impl ModeArg {
    fn to_mode(self) -> VarietyMode {
        match self {
            ModeArg::Uniform => VarietyMode::Uniform,
            ModeArg::Empirical => VarietyMode::Empirical,
        }
    }

    fn as_str(self) -> &'static str {
        self.to_mode().as_str()
    }
}

#[derive(Debug, Args)]
struct VarietyArgs {
    /// Inline counts, e.g. a=2,b=3
    #[arg(long, value_name = "SPEC", required_unless_present = "counts_file", conflicts_with = "counts_file")]
    counts: Option<String>,
    /// JSON file mapping element labels to counts
    #[arg(long, value_name = "PATH")]
    counts_file: Option<PathBuf>,
    /// Probability source: uniform over the support, or count-weighted
    #[arg(long, value_enum, default_value_t = ModeArg::Uniform)]
    mode: ModeArg,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    #[arg(long, value_name = "PATH")]
    trace: PathBuf,
    #[arg(long)]
    system: String,
    /// Earlier snapshot time index
    #[arg(long)]
    from: u64,
    /// Later snapshot time index
    #[arg(long)]
    to: u64,
}

#[derive(Debug, Args)]
struct DynamicsArgs {
    #[arg(long, value_name = "PATH")]
    trace: PathBuf,
    #[arg(long)]
    system: String,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long, value_name = "PATH")]
    trace: PathBuf,
    #[arg(long)]
    system: String,
    #[arg(long)]
    environment: String,
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Uniform)]
    mode: ModeArg,
    /// Width of the balanced band in bits
    #[arg(long, default_value_t = DEFAULT_BALANCE_EPSILON)]
    epsilon: f64,
}

#[derive(Debug, Subcommand)]
enum LrvCommand {
    /// Check the bound against the exhaustive minimum for a table
    Verify {
        #[arg(long, value_name = "PATH")]
        table: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthMethod {
    Brute,
    Greedy,
}

#[derive(Debug, Subcommand)]
enum RegulatorCommand {
    /// Synthesize an outcome-entropy-minimizing policy
    Synth {
        #[arg(long, value_name = "PATH")]
        table: PathBuf,
        #[arg(long, value_enum)]
        method: SynthMethod,
    },
}

#[derive(Debug, Args)]
struct DeduceArgs {
    #[arg(long, value_name = "PATH")]
    trace: PathBuf,
    #[arg(long)]
    system: String,
    #[arg(long)]
    environment: String,
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long, value_name = "PATH")]
    table: PathBuf,
    /// Outcome log establishing the stability premise
    #[arg(long, value_name = "PATH")]
    outcomes: PathBuf,
    /// Stability threshold in bits (0 = constant outcome)
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// Adaptive regulator playing an outcome-table game
    Regulator {
        #[arg(long, value_name = "PATH")]
        table: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        cadence: u64,
        /// Trace output path
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Outcome log output path
        #[arg(long, value_name = "PATH")]
        outcome_log: Option<PathBuf>,
    },
    /// Environment whose input alphabet drifts
    Drift {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        cadence: u64,
        #[arg(long)]
        drift_rate: f64,
        #[arg(long)]
        alphabet: usize,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

/// Parses argv, runs the command, and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.code());
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<String> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Variety(args) => cmd_variety(args, pretty),
        Command::Partition(args) => cmd_partition(args, pretty),
        Command::Dynamics(args) => cmd_dynamics(args, pretty),
        Command::Classify(args) => cmd_classify(args, pretty),
        Command::Lrv(LrvCommand::Verify { table }) => cmd_lrv_verify(table, pretty),
        Command::Regulator(RegulatorCommand::Synth { table, method }) => {
            cmd_synth(table, method, pretty)
        }
        Command::Deduce(args) => cmd_deduce(args, pretty),
        Command::Simulate(command) => cmd_simulate(command, pretty),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn load_trace(path: &Path, manifest: RunManifest) -> Result<(Trace, RunManifest)> {
    let text = read_file(path)?;
    let trace = formats::parse_trace(&text)?;
    Ok((trace, manifest.input(path, text.as_bytes())))
}

fn load_table(path: &Path, manifest: RunManifest) -> Result<(OutcomeTable, RunManifest)> {
    let text = read_file(path)?;
    let table = formats::parse_table(&text)?;
    Ok((table, manifest.input(path, text.as_bytes())))
}

fn policy_budget() -> Result<u64> {
    match std::env::var(BUDGET_ENV_VAR) {
        Ok(raw) => raw.parse::<u64>().map_err(|_| {
            varietylab_core::Error::InvalidConfig {
                detail: format!("{BUDGET_ENV_VAR} must be an unsigned integer, got {raw:?}"),
            }
            .into()
        }),
        Err(_) => Ok(DEFAULT_POLICY_BUDGET),
    }
}

fn parse_counts_spec(spec: &str) -> Result<BTreeMap<String, u64>> {
    let mut counts = BTreeMap::new();
    for item in spec.split(',') {
        let item = item.trim();
        let invalid = || {
            Error::from(varietylab_core::Error::InvalidConfig {
                detail: format!("counts entry {item:?} is not label=count"),
            })
        };
        let (label, count) = item.split_once('=').ok_or_else(invalid)?;
        if label.is_empty() {
            return Err(invalid());
        }
        let count: u64 = count.parse().map_err(|_| invalid())?;
        counts.insert(label.to_string(), count);
    }
    Ok(counts)
}

fn cmd_variety(args: VarietyArgs, pretty: bool) -> Result<String> {
    let mut manifest = RunManifest::new("variety")
        .flag("mode", args.mode.as_str())
        .flag("pretty", pretty);
    let counts = match (&args.counts, &args.counts_file) {
        (Some(spec), None) => {
            manifest = manifest.flag("counts", spec);
            parse_counts_spec(spec)?
        }
        (None, Some(path)) => {
            let text = read_file(path)?;
            manifest = manifest.input(path, text.as_bytes());
            serde_json::from_str::<BTreeMap<String, u64>>(&text)
                .map_err(|e| Error::Malformed { line: None, message: e.to_string() })?
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    let support: Vec<String> =
        counts.iter().filter(|(_, &c)| c > 0).map(|(l, _)| l.clone()).collect();
    let bits = match args.mode.to_mode() {
        VarietyMode::Uniform => uniform_variety(support.iter())?,
        VarietyMode::Empirical => variety(&empirical_distribution(&counts)?),
    };
    let report = report::VarietyReport {
        bits,
        mode: args.mode.as_str().into(),
        support,
        manifest,
    };
    Ok(report::render(&report, pretty))
}

fn snapshot_pair<'t>(
    trace: &'t Trace,
    system: &str,
    from: u64,
    to: u64,
) -> Result<(&'t SystemSnapshot, &'t SystemSnapshot)> {
    Ok((trace.snapshot_at(system, from)?, trace.snapshot_at(system, to)?))
}

fn cmd_partition(args: PartitionArgs, pretty: bool) -> Result<String> {
    let manifest = RunManifest::new("partition")
        .flag("system", &args.system)
        .flag("from", args.from)
        .flag("to", args.to)
        .flag("pretty", pretty);
    let (trace, manifest) = load_trace(&args.trace, manifest)?;
    let (earlier, later) = snapshot_pair(&trace, &args.system, args.from, args.to)?;
    let partition = partition(earlier, later)?;
    Ok(report::render(&report::PartitionReport::new(&partition, manifest), pretty))
}

fn cmd_dynamics(args: DynamicsArgs, pretty: bool) -> Result<String> {
    let manifest = RunManifest::new("dynamics")
        .flag("system", &args.system)
        .flag("pretty", pretty);
    let (trace, manifest) = load_trace(&args.trace, manifest)?;
    let snaps = trace.snapshots(&args.system)?;
    let mut timelines = Vec::new();
    for component in [Component::Input, Component::Output] {
        let universe: std::collections::BTreeSet<&String> =
            snaps.iter().flat_map(|s| s.component(component).iter()).collect();
        for element in universe {
            let entries = membership_timeline(&trace, &args.system, element, component)?;
            timelines.push(report::timeline_json(component.as_str(), element, &entries));
        }
    }
    // absorption needs three snapshots; with exactly two there is nothing to
    // detect and the report carries an empty list
    let events = if snaps.len() >= 3 {
        absorption_events(&trace, &args.system)?
    } else {
        Vec::new()
    };
    let report = report::DynamicsReport {
        system: args.system,
        timelines,
        absorption_events: events.iter().map(Into::into).collect(),
        manifest,
    };
    Ok(report::render(&report, pretty))
}

fn cmd_classify(args: ClassifyArgs, pretty: bool) -> Result<String> {
    let manifest = RunManifest::new("classify")
        .flag("system", &args.system)
        .flag("environment", &args.environment)
        .flag("from", args.from)
        .flag("to", args.to)
        .flag("mode", args.mode.as_str())
        .flag("epsilon", args.epsilon)
        .flag("pretty", pretty);
    let (trace, manifest) = load_trace(&args.trace, manifest)?;
    let mode = args.mode.to_mode();
    let score_of = |system: &str| -> Result<_> {
        let (earlier, later) = snapshot_pair(&trace, system, args.from, args.to)?;
        let partition = partition(earlier, later)?;
        let counts = match mode {
            VarietyMode::Uniform => None,
            VarietyMode::Empirical => Some(PartitionCounts::from_snapshot(later)),
        };
        Ok(dominance_with_epsilon(&partition, mode, counts.as_ref(), args.epsilon)?)
    };
    let system_score = score_of(&args.system)?;
    let environment_score = score_of(&args.environment)?;
    let cell = classify_pair(&system_score, &environment_score)?;
    let interval = Interval::new(args.from, args.to)?;
    let report =
        report::ClassifyReport::new(&args.system, &args.environment, interval, &cell, manifest);
    Ok(report::render(&report, pretty))
}

fn cmd_lrv_verify(table_path: PathBuf, pretty: bool) -> Result<String> {
    let budget = policy_budget()?;
    let manifest = RunManifest::new("lrv verify")
        .flag("budget", budget)
        .flag("pretty", pretty);
    let (table, manifest) = load_table(&table_path, manifest)?;
    let bound = verify_bound_with_budget(&table, budget)?;
    Ok(report::render(&report::BoundReportJson::new(&bound, &table, manifest), pretty))
}

fn cmd_synth(table_path: PathBuf, method: SynthMethod, pretty: bool) -> Result<String> {
    let budget = policy_budget()?;
    let method_name = match method {
        SynthMethod::Brute => "brute",
        SynthMethod::Greedy => "greedy",
    };
    let manifest = RunManifest::new("regulator synth")
        .flag("method", method_name)
        .flag("budget", budget)
        .flag("pretty", pretty);
    let (table, manifest) = load_table(&table_path, manifest)?;
    let (policy, bits) = match method {
        SynthMethod::Brute => min_outcome_variety_bruteforce_with_budget(&table, budget)?,
        SynthMethod::Greedy => greedy_policy(&table),
    };
    Ok(report::render(
        &report::SynthReport::new(method_name, &policy, bits, &table, manifest),
        pretty,
    ))
}

fn cmd_deduce(args: DeduceArgs, pretty: bool) -> Result<String> {
    let manifest = RunManifest::new("deduce")
        .flag("system", &args.system)
        .flag("environment", &args.environment)
        .flag("from", args.from)
        .flag("to", args.to)
        .flag("threshold", args.threshold)
        .flag("pretty", pretty);
    let (trace, manifest) = load_trace(&args.trace, manifest)?;
    let (table, manifest) = load_table(&args.table, manifest)?;
    let log_text = read_file(&args.outcomes)?;
    let manifest = manifest.input(&args.outcomes, log_text.as_bytes());
    let log = formats::parse_outcome_log(&log_text)?;
    let observed: Vec<String> = log.iter().map(|r| r.outcome.clone()).collect();
    let stable = assess_stability(&table, &observed, args.threshold)?;
    let (sys_earlier, sys_later) = snapshot_pair(&trace, &args.system, args.from, args.to)?;
    let (env_earlier, env_later) =
        snapshot_pair(&trace, &args.environment, args.from, args.to)?;
    let sys_partition = partition(sys_earlier, sys_later)?;
    let env_partition = partition(env_earlier, env_later)?;
    let pair = ClosedSystemPair::new(&args.system, &args.environment);
    let deduction = blocking_deduction(&sys_partition, &env_partition, &pair, stable)?;
    let report = report::DeduceReport::new(
        &args.system,
        &args.environment,
        sys_partition.interval,
        &deduction,
        args.threshold,
        observed.len(),
        manifest,
    );
    Ok(report::render(&report, pretty))
}

fn cmd_simulate(command: SimulateCommand, pretty: bool) -> Result<String> {
    match command {
        SimulateCommand::Regulator { table, seed, steps, cadence, out, outcome_log } => {
            let manifest = RunManifest::new("simulate regulator")
                .flag("seed", seed)
                .flag("steps", steps)
                .flag("cadence", cadence)
                .flag("out", out.display())
                .flag("pretty", pretty)
                .seed(seed);
            let (game, manifest) = load_table(&table, manifest)?;
            let config = RegulatorSimConfig::new(seed, steps, cadence, game)?;
            let (trace, log) = simulate_adaptive_regulator(&config);
            let trace_text = formats::serialize_trace(&trace);
            write_file(&out, &trace_text)?;
            let mut report = report::SimulateReport {
                kind: "regulator".into(),
                trace_path: out.display().to_string(),
                trace_sha256: report::sha256_hex(trace_text.as_bytes()),
                outcome_log_path: None,
                outcome_log_sha256: None,
                snapshots: trace
                    .system_ids()
                    .map(|id| trace.snapshots(id).map(<[_]>::len).unwrap_or(0))
                    .sum(),
                steps,
                manifest,
            };
            if let Some(log_path) = outcome_log {
                let log_text = formats::serialize_outcome_log(&log);
                write_file(&log_path, &log_text)?;
                report.outcome_log_path = Some(log_path.display().to_string());
                report.outcome_log_sha256 = Some(report::sha256_hex(log_text.as_bytes()));
                report.manifest = report.manifest.flag("outcome-log", log_path.display());
            }
            Ok(report::render(&report, pretty))
        }
        SimulateCommand::Drift { seed, steps, cadence, drift_rate, alphabet, out } => {
            let manifest = RunManifest::new("simulate drift")
                .flag("seed", seed)
                .flag("steps", steps)
                .flag("cadence", cadence)
                .flag("drift-rate", drift_rate)
                .flag("alphabet", alphabet)
                .flag("out", out.display())
                .flag("pretty", pretty)
                .seed(seed);
            let config = DriftSimConfig::new(seed, steps, cadence, drift_rate, alphabet)?;
            let trace = simulate_drift_environment(&config);
            let trace_text = formats::serialize_trace(&trace);
            write_file(&out, &trace_text)?;
            let report = report::SimulateReport {
                kind: "drift".into(),
                trace_path: out.display().to_string(),
                trace_sha256: report::sha256_hex(trace_text.as_bytes()),
                outcome_log_path: None,
                outcome_log_sha256: None,
                snapshots: trace
                    .system_ids()
                    .map(|id| trace.snapshots(id).map(<[_]>::len).unwrap_or(0))
                    .sum(),
                steps,
                manifest,
            };
            Ok(report::render(&report, pretty))
        }
    }
}
