//! Command-line driver.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use ceqec_core::circuit::{enumerate_locations, insert_cc_layers, LocationKind};
use ceqec_core::code::{check_ce_full, check_ce_necessary, distance_brute_force, CssCode, BUILTIN_NAMES};
use ceqec_core::extraction::{Method, ShorSchedule};
use ceqec_core::frame::{Calibration, FrameSimulator, OverlapPolicy, SimState};
use ceqec_core::ftec::{build_lookup_table, verify_with, Ftec};
use ceqec_core::noise::{trial_rng, CcPhases, Fault, FaultAssignment};
use ceqec_core::oracle::calibrate;
use ceqec_core::pauli::{Letter, Pauli};
use ceqec_core::search::{lemma2_check, lemma3_search_with, Lemma3Constraints};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::circuitfile::{parse_circuit, serialize_round, CircuitFile};
use crate::codefile::serialize_code;
use crate::codes::{resolve, resolve_css, REFERENCE_NAMES};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::report::{ftec_csv, ftec_summary, parse_table, serialize_table};
use crate::sim::{self, csv, Runner};
use crate::twirl::{parse_sweeps, sweep_csv};

#[derive(Debug, Parser)]
#[command(name = "ceqec", version, about = "Constant-excitation codes under collective coherent noise")]
pub struct Cli {
    /// Seed for every random draw; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Shor,
    Steane,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Shor => Method::Shor,
            MethodArg::Steane => Method::Steane,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScheduleArg {
    Sequential,
    Packed,
}

impl From<ScheduleArg> for ShorSchedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Sequential => ShorSchedule::Sequential,
            ScheduleArg::Packed => ShorSchedule::Packed,
        }
    }
}

#[derive(Debug, Args)]
pub struct RoundArgs {
    #[arg(long)]
    pub code: String,
    #[arg(long, value_enum, default_value = "shor")]
    pub method: MethodArg,
    /// Gadget placement for Shor rounds.
    #[arg(long, value_enum, default_value = "sequential")]
    pub schedule: ScheduleArg,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Override a config key, e.g. `--set trials=1000`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Built-in and reference codes.
    Codes {
        #[command(subcommand)]
        action: CodesCommand,
    },
    /// Brute-force minimum distance.
    Distance {
        name: String,
        #[arg(long, default_value_t = 3)]
        max_w: usize,
    },
    /// Extraction circuits.
    Circuit {
        #[command(subcommand)]
        action: CircuitCommand,
    },
    /// Exhaustive single-fault check of the two-round protocol.
    VerifyFt {
        #[command(flatten)]
        round: RoundArgs,
        /// Write every checked scenario as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the lookup table.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Use a lookup table read from a file instead of building one.
        #[arg(long, conflicts_with = "table")]
        load_table: Option<PathBuf>,
    },
    /// Logical error rates for every configured point.
    Sim(RunArgs),
    /// Threshold curves and pseudo-thresholds.
    Threshold {
        #[command(flatten)]
        run: RunArgs,
        /// Directory for one two-column `p p_L` file per curve.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Pauli twirl of the mixed depolarizing and coherent channel.
    Twirl {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        theta: f64,
        /// `AXIS=START:STOP:COUNT` with AXIS one of lambda, p, theta. Repeatable.
        #[arg(long)]
        sweep: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive nonexistence searches over small classical codes.
    Search {
        #[arg(value_enum)]
        which: SearchKind,
        /// Code length for lemma2 (8 or 9).
        #[arg(long)]
        n: Option<usize>,
        /// lemma3 self-test: drop the even-weight constraint and ask for dual distance 2.
        #[arg(long)]
        sanity: bool,
    },
    /// Record propagation constants fitted on small unitaries.
    Calibrate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SearchKind {
    Lemma3,
    Lemma2,
}

#[derive(Debug, Subcommand)]
pub enum CodesCommand {
    List,
    /// Print the code file.
    Show { name: String },
    /// Constant-excitation checks and distance.
    Check {
        name: String,
        #[arg(long, default_value_t = 3)]
        max_w: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CircuitCommand {
    /// Build one extraction round.
    Build {
        #[command(flatten)]
        round: RoundArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Parse, validate and summarize a circuit file.
    Check { file: PathBuf },
    /// Debug dump of one frame simulation.
    Trace {
        file: PathBuf,
        /// `LOCATION:FAULT` with FAULT one of X, Y, Z, a letter pair such as XZ, or `flip`.
        #[arg(long)]
        fault: Vec<String>,
        /// Pauli on all qubits applied before the first layer.
        #[arg(long)]
        input: Option<String>,
        /// CC phase applied after every layer.
        #[arg(long)]
        theta: Option<f64>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| Error::io("<stdout>", e))?
    };
}

/// Parses `argv` and runs. Returns the exit code; usage errors and help
/// are printed here.
pub fn main_with(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Codes { action } => codes(action, out),
        Command::Distance { name, max_w } => {
            let code = resolve(&name)?;
            say!(out, "distance({name}, w<={max_w})={}", distance_brute_force(&code, max_w));
            Ok(0)
        }
        Command::Circuit { action } => circuit(action, cli.seed.unwrap_or(0), out),
        Command::VerifyFt { round, csv: csv_path, table, load_table } => {
            let code = resolve_css(&round.code)?;
            let r = build(&code, &round)?;
            let t = match &load_table {
                Some(p) => parse_table(&read(p)?, code.n(), r.n_generators())
                    .map_err(|source| Error::File { path: p.clone(), source })?,
                None => build_lookup_table(&code, &r)?,
            };
            if let Some(p) = &table {
                write_or_print(Some(p), &serialize_table(&t), out)?;
            }
            let report = verify_with(&Ftec::with_table(&code, &r, t)?)?;
            if let Some(p) = &csv_path {
                write_or_print(Some(p), &ftec_csv(&report), out)?;
            }
            say!(out, "{}", ftec_summary(&report));
            Ok(if report.is_fault_tolerant() { 0 } else { 1 })
        }
        Command::Sim(args) => {
            let (cfg, runner) = setup(&args, cli.seed, cli.jobs)?;
            let rows = sim::run_sim(&cfg, &runner, |s| progress(err, s))?;
            write_or_print(args.output.as_deref(), &csv(&rows), out)?;
            Ok(0)
        }
        Command::Threshold { run, plot_data } => {
            let (cfg, runner) = setup(&run, cli.seed, cli.jobs)?;
            let curves = sim::run_threshold(&cfg, &runner, |s| progress(err, s))?;
            let rows: Vec<_> =
                curves.iter().flat_map(|c| c.runs.iter().map(|r| (r.clone(), c.theta_policy.clone()))).collect();
            write_or_print(run.output.as_deref(), &csv(&rows), out)?;
            if let Some(dir) = &plot_data {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                for c in &curves {
                    let p = dir.join(format!("{}.dat", c.slug()));
                    std::fs::write(&p, c.plot_data()).map_err(|e| Error::io(&p, e))?;
                }
            }
            let target: &mut dyn Write = if run.output.is_some() { out } else { err };
            for c in &curves {
                writeln!(target, "{}", c.summary()).map_err(|e| Error::io("<stdout>", e))?;
            }
            Ok(0)
        }
        Command::Twirl { lambda, p, theta, sweep, output } => {
            let sweeps = parse_sweeps(&sweep)?;
            write_or_print(output.as_deref(), &sweep_csv((lambda, p, theta), &sweeps)?, out)?;
            Ok(0)
        }
        Command::Search { which, n, sanity } => {
            let report = match which {
                SearchKind::Lemma3 => {
                    let mut c = Lemma3Constraints::default();
                    if sanity {
                        c.even_weight = false;
                        c.min_dual_distance = 2;
                    }
                    lemma3_search_with(c)?
                }
                SearchKind::Lemma2 => {
                    lemma2_check(n.ok_or_else(|| Error::Usage("search lemma2 needs --n 8 or --n 9".into()))?)?
                }
            };
            say!(out, "{report}");
            Ok(0)
        }
        Command::Calibrate => {
            let r = calibrate();
            say!(out, "{:<9}{:>9}{:>12}{:>12}  status", "constant", "literal", "calibrated", "residual");
            for c in &r.checks {
                let status = if c.kappa == c.literal { "ok" } else { "DEVIATES" };
                say!(out, "{:<9}{:>9}{:>12}{:>12.1e}  {status}", c.name, c.literal, c.kappa, c.residual);
            }
            let dev: Vec<&str> = r.deviations().map(|c| c.name).collect();
            say!(out, "deviations: {}", if dev.is_empty() { "none".to_string() } else { dev.join(", ") });
            Ok(0)
        }
    }
}

fn progress(err: &mut dyn Write, s: &ceqec_core::montecarlo::RunSummary) {
    let _ = writeln!(
        err,
        "p={:.4e} gamma={} cc={} trials={} failures={} p_L={:.4e} wall_time={:.2}s",
        s.p,
        s.gamma,
        s.cc_policy.name(),
        s.trials,
        s.failures,
        s.p_l,
        s.wall_time.unwrap_or(0.0)
    );
}

fn setup(args: &RunArgs, seed: Option<u64>, jobs: Option<usize>) -> Result<(Config, Runner)> {
    let mut cfg = match &args.config {
        Some(p) => Config::parse(&read(p)?).map_err(|source| Error::File { path: p.clone(), source })?,
        None => Config::default(),
    };
    cfg.apply_overrides(args.overrides.iter().map(String::as_str))?;
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let runner = Runner::new(jobs.or(cfg.jobs), cfg.chunk)?;
    Ok((cfg, runner))
}

fn build(code: &CssCode, args: &RoundArgs) -> Result<ceqec_core::extraction::ExtractionRound> {
    sim::round_for(code, args.method.into(), args.schedule.into())
}

fn codes(action: CodesCommand, out: &mut dyn Write) -> Result<i32> {
    match action {
        CodesCommand::List => {
            for name in BUILTIN_NAMES.iter().chain(&REFERENCE_NAMES) {
                let c = resolve(name)?;
                say!(out, "{name}\tn={} k={}", c.n(), c.k());
            }
            Ok(0)
        }
        CodesCommand::Show { name } => {
            let code = resolve(&name)?;
            write_or_print(None, &serialize_code(&code), out)?;
            Ok(0)
        }
        CodesCommand::Check { name, max_w } => {
            let code = resolve(&name)?;
            say!(out, "code={} n={} k={}", code.name(), code.n(), code.k());
            let nec = check_ce_necessary(&code);
            say!(out, "CE-necessary={}", nec.holds);
            for v in &nec.violations {
                say!(out, "  {v}");
            }
            let ce = match CssCode::from_stabilizer(code.clone()) {
                Ok(css) => {
                    let full = check_ce_full(&css)?;
                    let w = full.weight.map_or("-".to_string(), |w| w.to_string());
                    say!(out, "CE={} w={w} words={}", full.constant, full.words_checked);
                    full.constant
                }
                Err(_) => {
                    say!(out, "CE=unknown (the full check needs a CSS code)");
                    nec.holds
                }
            };
            say!(out, "distance(<={max_w} search)={}", distance_brute_force(&code, max_w));
            Ok(if ce { 0 } else { 1 })
        }
    }
}

fn parse_fault(spec: &str, kinds: &[LocationKind]) -> Result<(u32, Fault)> {
    let bad = || Error::Usage(format!("bad fault `{spec}`; expected LOCATION:X|Y|Z|PQ|flip"));
    let (loc, f) = spec.split_once(':').ok_or_else(bad)?;
    let loc: usize = loc.parse().map_err(|_| bad())?;
    let kind = *kinds.get(loc).ok_or_else(|| Error::Usage(format!("location {loc} out of range")))?;
    let letters: Option<Vec<Letter>> = f.chars().map(Letter::from_char).collect();
    let fault = match (kind, f, letters.as_deref()) {
        (LocationKind::Meas, "flip", _) => Fault::MeasFlip,
        (LocationKind::Gate2, _, Some(&[a, b])) => Fault::Pauli2(a, b),
        (LocationKind::Meas | LocationKind::Gate2, _, _) => return Err(bad()),
        (_, _, Some(&[a])) => Fault::Pauli1(a),
        _ => return Err(bad()),
    };
    Ok((loc as u32, fault))
}

fn circuit(action: CircuitCommand, seed: u64, out: &mut dyn Write) -> Result<i32> {
    match action {
        CircuitCommand::Build { round, output } => {
            let code = resolve_css(&round.code)?;
            let r = build(&code, &round)?;
            write_or_print(output.as_deref(), &serialize_round(&r), out)?;
            Ok(0)
        }
        CircuitCommand::Check { file } => {
            let f = load_circuit(&file)?;
            let c = &f.circuit;
            say!(out, "qubits={} depth={} locations={} cc_slots={}", c.n_qubits(), c.depth(), enumerate_locations(c).len(), c.cc_slot_count());
            if let Some(m) = &f.meta {
                say!(out, "round={} code={} generators={}", m.method.as_str(), m.code_name, m.generator_map.len());
            }
            Ok(0)
        }
        CircuitCommand::Trace { file, fault, input, theta } => {
            let f = load_circuit(&file)?;
            let mut c = f.circuit;
            if theta.is_some() {
                c = insert_cc_layers(&c);
            }
            let sim = FrameSimulator::with_options(&c, Calibration::DERIVED, OverlapPolicy::Sequential);
            let kinds: Vec<LocationKind> = sim.locations().iter().map(|l| l.kind).collect();
            let mut faults = fault.iter().map(|s| parse_fault(s, &kinds)).collect::<Result<Vec<_>>>()?;
            faults.sort_by_key(|f| f.0);
            let cc = theta.map_or(CcPhases::Off, CcPhases::Uniform);
            let assignment = FaultAssignment { faults, cc };
            let mut state = SimState::new(c.n_qubits());
            if let Some(p) = input {
                let p: Pauli = p.parse().map_err(|e| Error::Usage(format!("bad --input: {e}")))?;
                state.apply_pauli(&p)?;
            }
            let mut events = Vec::new();
            sim.run(&mut state, &assignment, &mut trial_rng(seed, 0), Some(&mut events))?;
            for e in &events {
                say!(out, "{e}");
            }
            say!(out, "outcomes={}", state.outcomes);
            Ok(0)
        }
    }
}

fn load_circuit(path: &Path) -> Result<CircuitFile> {
    parse_circuit(&read(path)?).map_err(|source| Error::File { path: path.into(), source })
}
