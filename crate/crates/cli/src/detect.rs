//! The `detect` subcommand.
//!
//! One detector streams straight from the input. Several detectors each get
//! their own thread, fed batches of observations by the reading thread, and
//! write to per-detector files inside the output directory.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::mpsc::{sync_channel, Receiver, SyncSender};
use std::thread;

use anyhow::{anyhow, Context, Result};
use clap::Args;

use driftwatch_core::detectors::{run_detector_with, Decision, DetectorConfig};
use driftwatch_core::{DetectorKind, Observation};

use crate::{
    create_output, load_config, observations, open_input, parse_denominator, parse_polarity,
    usage_error,
};

const BATCH: usize = 4096;

#[derive(Args)]
pub struct DetectArgs {
    /// Detector(s) to run; repeat or comma-separate. Defaults to the
    /// configured list.
    #[arg(long, short, value_delimiter = ',')]
    detector: Vec<DetectorKind>,
    /// Threshold; only with a single detector
    #[arg(long)]
    lambda: Option<f64>,
    /// Window length for UDFT and CRCDD
    #[arg(long)]
    n: Option<usize>,
    /// Embedding dimension for CRCDD
    #[arg(long)]
    m: Option<usize>,
    /// Embedding delay for CRCDD
    #[arg(long)]
    tau: Option<usize>,
    /// CUSUM tracks downward shifts and fires at -lambda
    #[arg(long)]
    negative: bool,
    /// ADWIN evaluates every k-th cut
    #[arg(long)]
    adwin_stride: Option<usize>,
    #[arg(long, value_parser = ["dissimilarity", "literal"])]
    crcdd_polarity: Option<String>,
    #[arg(long, value_parser = ["standard", "literal"])]
    dft_denominator: Option<String>,
    /// CSV or JSONL stream (stdin if omitted or `-`)
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Events file for one detector (stdout if omitted); a directory
    /// receiving `<detector>.jsonl` for several
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Per-decision `t,stat,threshold,drift` CSV; a directory receiving
    /// `<detector>.csv` for several detectors
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Run configuration; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

fn configs(args: &DetectArgs) -> Result<Vec<DetectorConfig>> {
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(n) = args.n {
        cfg.window_n = n;
    }
    if let Some(m) = args.m {
        cfg.embedding_m = m;
    }
    if let Some(tau) = args.tau {
        cfg.embedding_tau = tau;
    }
    if args.negative {
        cfg.cusum_negative = true;
    }
    if let Some(s) = args.adwin_stride {
        cfg.adwin_stride = s;
    }
    if let Some(p) = &args.crcdd_polarity {
        cfg.crcdd_polarity = parse_polarity(p);
    }
    if let Some(d) = &args.dft_denominator {
        cfg.udft_denominator = parse_denominator(d);
    }
    let mut kinds = if args.detector.is_empty() {
        cfg.detectors.clone()
    } else {
        args.detector.clone()
    };
    kinds.dedup();
    if let Some(lambda) = args.lambda {
        if kinds.len() != 1 {
            usage_error("--lambda needs exactly one --detector");
        }
        cfg.set_lambda(kinds[0], lambda);
    }
    let out: Vec<_> = kinds.iter().map(|&k| cfg.detector(k)).collect();
    for c in &out {
        c.validate()
            .with_context(|| format!("invalid {} configuration", c.kind))?;
    }
    Ok(out)
}

struct Sink {
    events: Box<dyn Write + Send>,
    trace: Option<Box<dyn Write + Send>>,
}

impl Sink {
    fn open(events: Option<&Path>, trace: Option<&Path>) -> Result<Self> {
        let mut trace = trace.map(|p| create_output(Some(p))).transpose()?;
        if let Some(t) = trace.as_mut() {
            writeln!(t, "t,stat,threshold,drift")?;
        }
        Ok(Self {
            events: create_output(events)?,
            trace,
        })
    }

    fn run<I>(mut self, cfg: &DetectorConfig, stream: I) -> Result<()>
    where
        I: IntoIterator<Item = Observation>,
    {
        let mut io_err = None;
        let output = run_detector_with(cfg, stream, |d: &Decision| {
            if io_err.is_some() {
                return;
            }
            let mut write = || -> std::io::Result<()> {
                if let Some(e) = d.event(cfg.kind) {
                    serde_json::to_writer(&mut self.events, &e)?;
                    writeln!(self.events)?;
                }
                if let Some(t) = self.trace.as_mut() {
                    writeln!(
                        t,
                        "{},{},{},{}",
                        d.timestamp, d.statistic, d.threshold, d.drift
                    )?;
                }
                Ok(())
            };
            io_err = write().err();
        })?;
        if let Some(e) = io_err {
            return Err(e.into());
        }
        for w in output.warnings {
            eprintln!("warning: {w}");
        }
        self.events.flush()?;
        if let Some(t) = self.trace.as_mut() {
            t.flush()?;
        }
        Ok(())
    }
}

pub fn run(args: DetectArgs) -> Result<()> {
    let cfgs = configs(&args)?;
    let input = args.input.as_deref();
    let reader = open_input(input)?;

    if let [cfg] = cfgs.as_slice() {
        let sink = Sink::open(args.output.as_deref(), args.trace.as_deref())?;
        let mut read_err = None;
        let stream =
            observations(reader, input).map_while(|r| r.map_err(|e| read_err = Some(e)).ok());
        let result = sink.run(cfg, stream);
        if let Some(e) = read_err {
            return Err(e);
        }
        return result;
    }

    let Some(dir) = args.output.as_deref() else {
        usage_error("several detectors need --output <DIR>");
    };
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    if let Some(t) = args.trace.as_deref() {
        std::fs::create_dir_all(t).with_context(|| format!("cannot create {}", t.display()))?;
    }
    let sinks = cfgs
        .iter()
        .map(|c| {
            let events = dir.join(format!("{}.jsonl", c.kind));
            let trace = args
                .trace
                .as_deref()
                .map(|t| t.join(format!("{}.csv", c.kind)));
            Sink::open(Some(&events), trace.as_deref())
        })
        .collect::<Result<Vec<_>>>()?;

    thread::scope(|scope| {
        let mut senders: Vec<SyncSender<Vec<Observation>>> = Vec::new();
        let mut workers = Vec::new();
        for (cfg, sink) in cfgs.iter().zip(sinks) {
            let (tx, rx): (_, Receiver<Vec<Observation>>) = sync_channel(4);
            senders.push(tx);
            workers.push(scope.spawn(move || sink.run(cfg, rx.into_iter().flatten())));
        }

        let mut read_result = Ok(());
        let mut batch = Vec::with_capacity(BATCH);
        for r in observations(reader, input) {
            match r {
                Ok(o) => batch.push(o),
                Err(e) => {
                    read_result = Err(e);
                    break;
                }
            }
            if batch.len() == BATCH {
                let full = std::mem::replace(&mut batch, Vec::with_capacity(BATCH));
                // a worker that hung up has failed; its join reports why
                senders.retain(|tx| tx.send(full.clone()).is_ok());
            }
        }
        if read_result.is_ok() && !batch.is_empty() {
            for tx in &senders {
                let _ = tx.send(batch.clone());
            }
        }
        drop(senders);

        let mut first_err = read_result.err();
        for (cfg, w) in cfgs.iter().zip(workers) {
            let r = w
                .join()
                .map_err(|_| anyhow!("{} worker panicked", cfg.kind))
                .and_then(|r| r.with_context(|| format!("{} failed", cfg.kind)));
            if let Err(e) = r {
                first_err.get_or_insert(e);
            }
        }
        first_err.map_or(Ok(()), Err)
    })
}
