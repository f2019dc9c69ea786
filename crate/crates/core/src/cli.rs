// SPDX-License-Identifier: Apache-2.0

//! The `bmf-synth` command line. [`run`] returns the process exit code:
//! 0 on success, 1 for unparsable input, 2 for invalid requests, 3 for
//! exceeded budgets, 64 for bad usage and 74 for file system failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bmf::{AssoConfig, Weighting, DEFAULT_TAUS};
use crate::boolmat::Semiring;
use crate::error::{Error, ErrorKind};
use crate::explore::{explore, pareto_report, profile_all, verification_seed, ExploreConfig, DEFAULT_PROBE_SAMPLES};
use crate::netlist::{emit_blif, parse_blif, Netlist};
use crate::partition::{decompose, extract};
use crate::qor::{check_ports, Evaluator, Metric, OutputInterpretation, QorReport, Sampling, DEFAULT_SAMPLES, RNG_ALGORITHM};
use crate::fixtures;

pub const EXIT_PARSE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Uniform,
    #[default]
    Pow2,
}

/// Every knob of a run. Loaded from `--config` JSON, then overridden by
/// whatever flags were given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub k: usize,
    pub m: usize,
    pub metric: Metric,
    pub threshold: f64,
    pub taus: Vec<f64>,
    pub semiring: Semiring,
    pub weights: WeightMode,
    pub samples: usize,
    pub probe_samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub words: Option<String>,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            k: 10,
            m: 10,
            metric: Metric::Relative,
            threshold: 0.05,
            taus: DEFAULT_TAUS.to_vec(),
            semiring: Semiring::Or,
            weights: WeightMode::Pow2,
            samples: DEFAULT_SAMPLES,
            probe_samples: DEFAULT_PROBE_SAMPLES,
            seed: 1,
            out: PathBuf::from("out"),
            words: None,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.k == 0 || self.m == 0 {
            return Err(Error::Config("k and m must be at least 1".into()));
        }
        self.asso().validate()?;
        self.explore().validate()
    }

    pub fn asso(&self) -> AssoConfig {
        AssoConfig {
            taus: self.taus.clone(),
            semiring: self.semiring,
            weights: match self.weights {
                WeightMode::Uniform => Weighting::Uniform,
                WeightMode::Pow2 => Weighting::Pow2,
            },
            allow_zero_gain: false,
        }
    }

    pub fn explore(&self) -> ExploreConfig {
        ExploreConfig {
            metric: self.metric,
            threshold: self.threshold,
            samples: self.samples,
            probe_samples: self.probe_samples,
            seed: self.seed,
        }
    }

    pub fn interpretation(&self) -> Result<Option<OutputInterpretation>, Error> {
        self.words.as_deref().map(OutputInterpretation::parse).transpose()
    }
}

#[derive(Debug, Parser)]
#[command(name = "bmf-synth", version, about = "Approximate logic synthesis by Boolean matrix factorization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Partition a circuit and write one BLIF file per subcircuit.
    Decompose(Flags),
    /// Run profiling and degree exploration under an error threshold.
    Explore(Flags),
    /// Compare an approximate circuit against a golden one.
    Evaluate(EvaluateArgs),
    /// Write one of the built-in arithmetic circuits as BLIF.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct Flags {
    /// JSON run configuration; flags take precedence over its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(short = 'k')]
    k: Option<usize>,
    #[arg(short = 'm')]
    m: Option<usize>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Comma separated association thresholds.
    #[arg(long, value_delimiter = ',')]
    taus: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    semiring: Option<SemiringArg>,
    #[arg(long, value_enum)]
    weights: Option<WeightMode>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    probe_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output words, e.g. `sum:s8..s0;diff:d8..d0`.
    #[arg(long)]
    words: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Relative,
    Absolute,
    Hamming,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::Relative => Metric::Relative,
            MetricArg::Absolute => Metric::Absolute,
            MetricArg::Hamming => Metric::Hamming,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SemiringArg {
    Or,
    Xor,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    golden: PathBuf,
    #[arg(long)]
    approx: PathBuf,
    #[arg(long, value_enum, default_value = "relative")]
    metric: MetricArg,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    words: Option<String>,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Circuit {
    Adder,
    Mult,
    Butterfly,
    Sad,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    circuit: Circuit,
    #[arg(long, default_value_t = 8)]
    bits: usize,
    /// Operand pairs of the sum of absolute differences.
    #[arg(long, default_value_t = 2)]
    pairs: usize,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Tool(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Tool(e)
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut c = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    c.$field = v.clone().into();
                }
            )*};
        }
        apply!(k, m, threshold, taus, weights, samples, probe_samples, seed, out);
        if let Some(v) = &self.input {
            c.input = Some(v.clone());
        }
        if let Some(v) = self.metric {
            c.metric = v.into();
        }
        if let Some(v) = self.semiring {
            c.semiring = match v {
                SemiringArg::Or => Semiring::Or,
                SemiringArg::Xor => Semiring::Xor,
            };
        }
        if let Some(v) = &self.words {
            c.words = Some(v.clone());
        }
        if let Some(v) = self.workers {
            c.workers = Some(v);
        }
        c.validate()?;
        Ok(c)
    }
}

fn read_netlist(path: &Path) -> Result<Netlist, Failure> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_blif(&text).map_err(|e| match e {
        Error::Syntax { line, message } => Error::Syntax {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
    .into())
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

fn input_of(c: &RunConfig) -> Result<&Path, Failure> {
    c.input.as_deref().ok_or_else(|| Error::Config("no input circuit (use --input)".into()).into())
}

fn set_workers(c: &RunConfig) {
    if let Some(n) = c.workers {
        // Fails only if a pool already exists, e.g. on repeated in-process calls.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn cmd_decompose(c: &RunConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    set_workers(c);
    let n = read_netlist(input_of(c)?)?;
    let p = decompose(&n, c.k, c.m)?;
    for s in &p.subcircuits {
        let sub = extract(&n, s)?;
        write(&c.out.join("subcircuits").join(format!("s{}.blif", s.id)), &emit_blif(&sub))?;
    }
    let report = serde_json::to_string_pretty(&p.report()).expect("report serializes");
    write(&c.out.join("partition.json"), &report)?;
    let _ = writeln!(stdout, "{report}");
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Timings {
    pub parse_ms: f64,
    pub partition_ms: f64,
    pub profile_ms: f64,
    pub explore_ms: f64,
    pub verify_ms: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub rng: String,
    pub probe_seed: u64,
    pub commit_seed: u64,
    pub verification_seed: u64,
    pub subcircuits: usize,
    pub degrees: Vec<usize>,
    pub steps: usize,
    pub final_error: f64,
    pub threshold_met: bool,
    pub verification: QorReport,
    pub original_area: f64,
    pub final_area: f64,
    pub area_saving: f64,
    pub area_scope: String,
    pub timings: Timings,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn cmd_explore(c: &RunConfig, stdout: &mut dyn Write) -> Result<bool, Failure> {
    set_workers(c);
    let t = Instant::now();
    let n = read_netlist(input_of(c)?)?;
    let interp = c.interpretation()?;
    let parse_ms = ms(t);
    let t = Instant::now();
    let p = decompose(&n, c.k, c.m)?;
    let partition_ms = ms(t);
    let t = Instant::now();
    let cache = profile_all(&n, &p, &c.asso())?;
    let profile_ms = ms(t);
    let t = Instant::now();
    let e = explore(&n, &p, &cache, interp.as_ref(), &c.explore())?;
    let explore_ms = ms(t);
    let t = Instant::now();
    let vseed = verification_seed(c.seed);
    let verification = Evaluator::new(
        &n,
        interp.as_ref(),
        Sampling::MonteCarlo {
            samples: c.samples,
            seed: vseed,
        },
    )?
    .evaluate(&e.netlist)?
    .report(c.metric)?;
    let verify_ms = ms(t);
    let threshold_met = e.final_error <= c.threshold;
    write(&c.out.join("final.blif"), &emit_blif(&e.netlist))?;
    write(&c.out.join("trajectory.csv"), &pareto_report(&e.trajectory)?)?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: c.clone(),
        rng: RNG_ALGORITHM.into(),
        probe_seed: c.seed,
        commit_seed: c.seed,
        verification_seed: vseed,
        subcircuits: p.len(),
        degrees: e.degrees.clone(),
        steps: e.committed_steps(),
        final_error: e.final_error,
        threshold_met,
        verification,
        original_area: e.original_area.value(),
        final_area: e.final_area.value(),
        area_saving: e.area_saving(),
        area_scope: "partitioned combinational nodes, 2-input gate equivalents".into(),
        timings: Timings {
            parse_ms,
            partition_ms,
            profile_ms,
            explore_ms,
            verify_ms,
        },
    };
    write(&c.out.join("manifest.json"), &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    let _ = writeln!(
        stdout,
        "steps={} final_error={} area_saving={}",
        manifest.steps, manifest.final_error, manifest.area_saving
    );
    Ok(threshold_met)
}

fn cmd_evaluate(a: &EvaluateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let golden = read_netlist(&a.golden)?;
    let approx = read_netlist(&a.approx)?;
    check_ports(&golden, &approx)?;
    let interp = a.words.as_deref().map(OutputInterpretation::parse).transpose()?;
    let sampling = Sampling::auto(golden.inputs().len(), a.samples, a.seed);
    let report = Evaluator::new(&golden, interp.as_ref(), sampling)?
        .evaluate(&approx)?
        .report(a.metric.into())?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &a.out {
        write(path, &json)?;
    }
    let _ = writeln!(stdout, "{json}");
    Ok(())
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), Failure> {
    if a.bits == 0 || a.pairs == 0 {
        return Err(Error::Config("bits and pairs must be at least 1".into()).into());
    }
    let n = match a.circuit {
        Circuit::Adder => fixtures::ripple_carry_adder(a.bits),
        Circuit::Mult => fixtures::array_multiplier(a.bits),
        Circuit::Butterfly => fixtures::butterfly(a.bits),
        Circuit::Sad => fixtures::sum_abs_diff(a.pairs, a.bits),
    };
    write(&a.out, &emit_blif(&n))
}

/// Runs the command line `args` (program name first) and returns the exit
/// code, writing results to `stdout` and diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Decompose(f) => f.resolve().and_then(|c| cmd_decompose(&c, stdout)).map(|_| true),
        Command::Explore(f) => f.resolve().and_then(|c| cmd_explore(&c, stdout)),
        Command::Evaluate(a) => cmd_evaluate(a, stdout).map(|_| true),
        Command::Generate(a) => cmd_generate(a).map(|_| true),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "error: final design does not meet the threshold");
            EXIT_VALIDATION
        }
        Err(Failure::Tool(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            match e.kind() {
                ErrorKind::Parse => EXIT_PARSE,
                ErrorKind::Validation => EXIT_VALIDATION,
                ErrorKind::Budget => EXIT_BUDGET,
            }
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}
