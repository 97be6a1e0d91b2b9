//! `driftwatch`: generate streams, run drift detectors, score them.
//!
//! Exit status is 0 on success, 1 on runtime errors (unreadable input,
//! malformed data) and 2 on usage errors.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use driftwatch_core::compliance::{render_json, render_text, requirement_table, run_probes};
use driftwatch_core::config::RunConfig;
use driftwatch_core::detectors::{CrcddPolarity, DftDenominator};
use driftwatch_core::embedding::{embed_values, EmbeddingParams};
use driftwatch_core::io::{
    read_events, read_truth, write_csv, write_jsonl, write_truth, ObservationReader,
};
use driftwatch_core::metrics::{evaluate, CSV_HEADER};
use driftwatch_core::stream::{
    generate_logistic_map, generate_lorenz, generate_piecewise_gaussian, parse_segments,
    LorenzParams, Observation, Windows, DEFAULT_LORENZ_DT,
};
use driftwatch_core::DetectorKind;

mod detect;

#[derive(Parser)]
#[command(
    name = "driftwatch",
    version,
    about = "Streaming concept-drift detection toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic stream
    Generate(GenerateArgs),
    /// Reconstruct a phase space and write one state per row
    Embed(EmbedArgs),
    /// Run detectors over a stream and write drift events as JSONL
    Detect(detect::DetectArgs),
    /// Score drift events against ground truth
    Evaluate(EvaluateArgs),
    /// Print the R1-R4 requirement table
    Compliance(ComplianceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    kind: GenerateKind,
    /// Output file (stdout if omitted)
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Piecewise-stationary Gaussian stream
    Piecewise {
        /// Comma-separated `length:mean:stddev` segments
        #[arg(long)]
        segments: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the change points as JSON
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// x coordinate of the Lorenz system, fixed-step RK4
    Lorenz {
        #[arg(long, default_value_t = 5000)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_LORENZ_DT)]
        dt: f64,
        /// Initial state `x,y,z`
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1.0, 1.0, 1.0])]
        initial: Vec<f64>,
        #[arg(long, default_value_t = 10.0)]
        sigma: f64,
        #[arg(long, default_value_t = 28.0)]
        rho: f64,
        #[arg(long, default_value_t = 8.0 / 3.0)]
        beta: f64,
    },
    /// Logistic map x <- r x (1 - x)
    Logistic {
        #[arg(long, default_value_t = 5000)]
        count: usize,
        #[arg(long, default_value_t = 3.8)]
        r: f64,
        #[arg(long, default_value_t = 0.4)]
        x0: f64,
    },
}

#[derive(Args)]
struct EmbedArgs {
    /// CSV or JSONL stream (stdin if omitted or `-`)
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    tau: Option<usize>,
    /// Cut the stream into windows of this length and embed one of them
    #[arg(long)]
    n: Option<usize>,
    /// Index of the window to embed when `--n` is given
    #[arg(long, default_value_t = 0, requires = "n")]
    window: usize,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Drift events as JSONL
    #[arg(long)]
    events: PathBuf,
    /// Ground truth as JSON (`{"drift_points": [...]}`)
    #[arg(long)]
    truth: PathBuf,
    /// Stream length in observations
    #[arg(long)]
    len: u64,
    /// Report file (stdout if omitted)
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Append a comparison row to this CSV, writing the header if it is new
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Row label for `--csv`; defaults to the detector named in the events
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct ComplianceArgs {
    #[arg(long)]
    json: bool,
    /// Also run the R1 and R3 behavioural probes on the configured detectors
    #[arg(long)]
    probe: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub(crate) fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::shipped()),
        Some(p) => {
            RunConfig::load(p).with_context(|| format!("cannot load config {}", p.display()))
        }
    }
}

pub(crate) fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead + Send>> {
    match path {
        None => Ok(Box::new(BufReader::new(io::stdin()))),
        Some(p) if p.as_os_str() == "-" => Ok(Box::new(BufReader::new(io::stdin()))),
        Some(p) => {
            let f = File::open(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok(Box::new(BufReader::new(f)))
        }
    }
}

pub(crate) fn create_output(path: Option<&Path>) -> Result<Box<dyn Write + Send>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

pub(crate) fn observations(
    reader: Box<dyn BufRead + Send>,
    path: Option<&Path>,
) -> impl Iterator<Item = Result<Observation>> {
    let name = path.map_or("stdin".to_string(), |p| p.display().to_string());
    ObservationReader::new(reader).map(move |r| r.with_context(|| format!("in {name}")))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let stream = match args.kind {
        GenerateKind::Piecewise {
            segments,
            seed,
            truth,
            config,
        } => {
            let seed = match seed {
                Some(s) => s,
                None => load_config(config.as_deref())?.seed,
            };
            let segs = parse_segments(&segments)?;
            let (stream, gt) = generate_piecewise_gaussian(&segs, seed)?;
            if let Some(p) = truth {
                let mut out = create_output(Some(&p))?;
                write_truth(&mut out, &gt)?;
                out.flush()?;
            }
            stream
        }
        GenerateKind::Lorenz {
            count,
            dt,
            initial,
            sigma,
            rho,
            beta,
        } => generate_lorenz(
            count,
            dt,
            [initial[0], initial[1], initial[2]],
            LorenzParams { sigma, rho, beta },
        )?,
        GenerateKind::Logistic { count, r, x0 } => generate_logistic_map(count, r, x0)?,
    };
    let mut out = create_output(args.output.as_deref())?;
    match args.format {
        OutputFormat::Csv => write_csv(&mut out, &stream)?,
        OutputFormat::Jsonl => write_jsonl(&mut out, &stream)?,
    }
    out.flush()?;
    Ok(())
}

fn embed(args: EmbedArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let params = EmbeddingParams::new(
        args.m.unwrap_or(cfg.embedding_m),
        args.tau.unwrap_or(cfg.embedding_tau),
    )?;
    let input = args.input.as_deref();
    let mut obs = observations(open_input(input)?, input);
    let values: Vec<f64> = match args.n {
        None => obs.map(|r| r.map(|o| o.value)).collect::<Result<_>>()?,
        Some(n) => {
            let mut err = None;
            let source = obs
                .by_ref()
                .map_while(|r| r.map_err(|e| err = Some(e)).ok());
            let found = Windows::new(source, n)?.nth(args.window);
            if let Some(e) = err {
                return Err(e);
            }
            match found {
                Some(w) => w.values,
                None => bail!("stream has no window {} of length {n}", args.window),
            }
        }
    };
    let space = embed_values(&values, params)?;
    let mut out = create_output(args.output.as_deref())?;
    let header: Vec<String> = (0..params.m).map(|j| format!("c{j}")).collect();
    writeln!(out, "origin,{}", header.join(","))?;
    for s in space.states() {
        let coords: Vec<String> = s.coords.iter().map(f64::to_string).collect();
        writeln!(out, "{},{}", s.origin_index, coords.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<()> {
    let events = read_events(open_input(Some(&args.events))?)
        .with_context(|| format!("in {}", args.events.display()))?;
    let truth = read_truth(open_input(Some(&args.truth))?)
        .with_context(|| format!("in {}", args.truth.display()))?;
    let report = evaluate(&events, &truth, args.len)?;
    let mut out = create_output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    if let Some(path) = args.csv {
        let label = args
            .label
            .or_else(|| events.first().map(|e| e.detector.clone()))
            .unwrap_or_else(|| "events".to_string());
        let fresh = std::fs::metadata(&path)
            .map(|m| m.len() == 0)
            .unwrap_or(true);
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        if fresh {
            writeln!(f, "{CSV_HEADER}")?;
        }
        writeln!(f, "{}", report.csv_row(&label))?;
    }
    Ok(())
}

fn compliance(args: ComplianceArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let table = requirement_table();
    let mut out = io::stdout().lock();
    if !args.probe {
        if args.json {
            writeln!(out, "{}", render_json(&table))?;
        } else {
            write!(out, "{}", render_text(&table))?;
        }
        return Ok(());
    }
    let cfgs: Vec<_> = DetectorKind::ALL.iter().map(|&k| cfg.detector(k)).collect();
    let reports = run_probes(&cfgs, args.seed.unwrap_or(cfg.seed))?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?;
    } else {
        write!(out, "{}", render_text(&table))?;
        writeln!(out)?;
        for r in &reports {
            writeln!(
                out,
                "{:<6} R1 table={:<3} probe={:<12} R3 table={:<3} probe={:<12} {}",
                r.detector.label(),
                r.r1_table.as_str(),
                format!("{:?}", r.r1_probe).to_lowercase(),
                r.r3_table.as_str(),
                format!("{:?}", r.r3_probe).to_lowercase(),
                if r.agrees() { "agree" } else { "DISAGREE" }
            )?;
        }
    }
    Ok(())
}

pub(crate) fn parse_polarity(s: &str) -> CrcddPolarity {
    match s {
        "literal" => CrcddPolarity::Literal,
        _ => CrcddPolarity::Dissimilarity,
    }
}

pub(crate) fn parse_denominator(s: &str) -> DftDenominator {
    match s {
        "literal" => DftDenominator::Literal,
        _ => DftDenominator::Standard,
    }
}

/// Exits with status 2 and clap's usage formatting.
pub(crate) fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::ArgumentConflict, msg)
        .exit()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Embed(a) => embed(a),
        Command::Detect(a) => detect::run(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Compliance(a) => compliance(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
