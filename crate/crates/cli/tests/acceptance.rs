//! Acceptance suite: one pass/fail line per criterion.
//!
//! Every detector check compares the library against a naive transcription
//! of the detector's recurrence written here from scratch, with no shared
//! code beyond stream generation.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use driftwatch_core::compliance::{
    probe_r3, probe_r3_with, r3_probe_stream, LeakyCusum, ProbeVerdict,
};
use driftwatch_core::config::RunConfig;
use driftwatch_core::detectors::{
    crcdd_step, run_detector, udft_features, CrcddPolarity, DetectorConfig, DftDenominator,
    FourierPlan,
};
use driftwatch_core::embedding::{embed_values, EmbeddingParams, PhaseSpace, PhaseState};
use driftwatch_core::indicator::{convergence_trace, Indicator, IndicatorConfig};
use driftwatch_core::metrics::evaluate;
use driftwatch_core::stream::{
    generate_lorenz, generate_piecewise_gaussian, window_stream, LorenzParams, Observation,
    Segment, DEFAULT_LORENZ_DT,
};
use driftwatch_core::{Detector, DetectorKind, FeatureVector, StreamWindow};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);
type Oracle = Box<dyn Fn(&[f64]) -> Vec<usize> + Sync>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------------------
// naive detector transcriptions

fn naive_cusum(xs: &[f64], lambda: f64, negative: bool) -> Vec<usize> {
    let mut g = 0.0;
    let mut out = Vec::new();
    for (t, &x) in xs.iter().enumerate() {
        g = if negative {
            f64::min(0.0, g + x)
        } else {
            f64::max(0.0, g + x)
        };
        let fire = if negative { g <= -lambda } else { g >= lambda };
        if fire {
            out.push(t);
            g = 0.0;
        }
    }
    out
}

/// Keeps every observation and every m value since the phenomenon began.
fn naive_pht(xs: &[f64], lambda: f64) -> Vec<usize> {
    let mut seen: Vec<f64> = Vec::new();
    let mut ms: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    for (t, &x) in xs.iter().enumerate() {
        seen.push(x);
        let mu = seen.iter().sum::<f64>() / seen.len() as f64;
        let m = ms.last().copied().unwrap_or(0.0) + (x - mu);
        ms.push(m);
        let min = ms.iter().copied().fold(f64::INFINITY, f64::min);
        if (m - min).abs() > lambda {
            out.push(t);
            seen.clear();
            ms.clear();
        }
    }
    out
}

fn mean(s: &[f64]) -> f64 {
    s.iter().sum::<f64>() / s.len() as f64
}

fn naive_adwin(xs: &[f64], lambda: f64) -> Vec<usize> {
    let mut buf: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    for (t, &x) in xs.iter().enumerate() {
        buf.push(x);
        if buf.len() < 2 {
            continue;
        }
        let best = (0..buf.len() - 1)
            .map(|k| (mean(&buf[..=k]) - mean(&buf[k + 1..])).abs())
            .fold(f64::NEG_INFINITY, f64::max);
        if best > lambda {
            out.push(t);
            buf.clear();
        }
    }
    out
}

/// `c_j = (eps/n) sum_k x_k exp(-i 2 pi j k / d)`, `eps = 1` for `j = 0`,
/// else 2, with `d` the exponent denominator (`n`, or `n - 1` for the
/// literal form where `d = 0` makes the ratio 0).
fn naive_dft(x: &[f64], d: usize) -> Vec<(f64, f64)> {
    let n = x.len();
    (0..=(n - 1) / 2)
        .map(|j| {
            let eps = if j == 0 { 1.0 } else { 2.0 };
            let (mut re, mut im) = (0.0, 0.0);
            for (k, &v) in x.iter().enumerate() {
                let ratio = if d == 0 { 0.0 } else { k as f64 / d as f64 };
                let phase = -2.0 * std::f64::consts::PI * j as f64 * ratio;
                re += v * phase.cos();
                im += v * phase.sin();
            }
            (eps / n as f64 * re, eps / n as f64 * im)
        })
        .collect()
}

fn naive_udft(xs: &[f64], n: usize, lambda: f64, literal: bool) -> Vec<usize> {
    let d = if literal { n - 1 } else { n };
    let mut prev: Option<Vec<(f64, f64)>> = None;
    let mut out = Vec::new();
    for (w, chunk) in xs.chunks_exact(n).enumerate() {
        let curr = naive_dft(chunk, d);
        match prev.take() {
            None => prev = Some(curr),
            Some(p) => {
                let dist = p
                    .iter()
                    .zip(&curr)
                    .map(|(a, b)| (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if dist > lambda {
                    out.push(w * n + n - 1);
                } else {
                    prev = Some(curr);
                }
            }
        }
    }
    out
}

fn naive_states(x: &[f64], m: usize, tau: usize) -> Vec<Vec<f64>> {
    let count = x.len() - (m - 1) * tau;
    (0..count)
        .map(|k| (0..m).map(|j| x[k + j * tau]).collect())
        .collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Mean distance to the ceil(ln M)-th nearest other state, M = |states|.
fn naive_radius(states: &[&Vec<f64>]) -> f64 {
    let total = states.len();
    let k = ((total as f64).ln().ceil() as usize).clamp(1, total - 1);
    let mut sum = 0.0;
    for (i, a) in states.iter().enumerate() {
        let mut ds: Vec<f64> = states
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, b)| dist(a, b))
            .collect();
        ds.sort_by(|p, q| p.partial_cmp(q).unwrap());
        sum += ds[k - 1];
    }
    sum / total as f64
}

fn naive_mdl(prev: &[Vec<f64>], curr: &[Vec<f64>], radius: f64) -> usize {
    let n = prev.len() as isize;
    let hit = |a: isize, b: isize| dist(&prev[a as usize], &curr[b as usize]) <= radius;
    let mut best = 0;
    for d in -(n - 1)..n {
        let mut run = 0;
        for a in 0..n {
            let b = a + d;
            if b < 0 || b >= n {
                continue;
            }
            if hit(a, b) {
                run += 1;
                best = best.max(run);
            } else {
                run = 0;
            }
        }
    }
    best
}

fn naive_crcdd_mdl(prev: &[Vec<f64>], curr: &[Vec<f64>]) -> usize {
    let union: Vec<&Vec<f64>> = prev.iter().chain(curr).collect();
    naive_mdl(prev, curr, naive_radius(&union))
}

fn naive_crcdd(
    xs: &[f64],
    n: usize,
    m: usize,
    tau: usize,
    lambda: f64,
    literal: bool,
) -> Vec<usize> {
    let mut prev: Option<Vec<Vec<f64>>> = None;
    let mut out = Vec::new();
    for (w, chunk) in xs.chunks_exact(n).enumerate() {
        let curr = naive_states(chunk, m, tau);
        match prev.take() {
            None => prev = Some(curr),
            Some(p) => {
                let mdl = naive_crcdd_mdl(&p, &curr) as f64;
                let fire = if literal { mdl > lambda } else { mdl <= lambda };
                if fire {
                    out.push(w * n + n - 1);
                } else {
                    prev = Some(curr);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// criteria

fn random_stream(seed: u64, len: usize) -> Vec<Observation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut segs = Vec::new();
    let mut left = len;
    while left > 0 {
        let l = rng.random_range(200..700).min(left);
        segs.push(Segment::new(
            l,
            rng.random_range(-3.0..3.0),
            rng.random_range(0.5..2.0),
        ));
        left -= l;
    }
    generate_piecewise_gaussian(&segs, seed).unwrap().0
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let shipped = RunConfig::shipped();
    let (n, m, tau) = (shipped.window_n, shipped.embedding_m, shipped.embedding_tau);
    let mut cases: Vec<(&str, DetectorConfig, Oracle)> = Vec::new();
    let base = |k: DetectorKind, l: f64| shipped.detector(k).with_lambda(l);
    cases.push((
        "cusum",
        base(DetectorKind::Cusum, 60.0),
        Box::new(|x| naive_cusum(x, 60.0, false)),
    ));
    let mut neg = base(DetectorKind::Cusum, 60.0);
    neg.negative_mode = true;
    cases.push((
        "cusum-negative",
        neg,
        Box::new(|x| naive_cusum(x, 60.0, true)),
    ));
    cases.push((
        "pht",
        base(DetectorKind::Pht, 40.0),
        Box::new(|x| naive_pht(x, 40.0)),
    ));
    cases.push((
        "adwin",
        base(DetectorKind::Adwin, 3.0),
        Box::new(|x| naive_adwin(x, 3.0)),
    ));
    cases.push((
        "udft",
        base(DetectorKind::Udft, 1.5),
        Box::new(move |x| naive_udft(x, n, 1.5, false)),
    ));
    let mut lit = base(DetectorKind::Udft, 1.5);
    lit.dft_denominator = DftDenominator::Literal;
    cases.push((
        "udft-literal",
        lit,
        Box::new(move |x| naive_udft(x, n, 1.5, true)),
    ));
    cases.push((
        "crcdd",
        base(DetectorKind::Crcdd, 2.0),
        Box::new(move |x| naive_crcdd(x, n, m, tau, 2.0, false)),
    ));
    let mut litc = base(DetectorKind::Crcdd, 4.0);
    litc.crcdd_polarity = CrcddPolarity::Literal;
    cases.push((
        "crcdd-literal",
        litc,
        Box::new(move |x| naive_crcdd(x, n, m, tau, 4.0, true)),
    ));

    let streams: Vec<Vec<Observation>> = (0..100).map(|s| random_stream(1000 + s, 2000)).collect();
    let results: Vec<Result<usize, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cases
            .iter()
            .map(|(name, cfg, oracle)| {
                let streams = &streams;
                scope.spawn(move || {
                    let mut total = 0;
                    for (i, s) in streams.iter().enumerate() {
                        let got: Vec<usize> = run_detector(cfg, s.iter().copied())
                            .unwrap()
                            .events
                            .iter()
                            .map(|e| e.timestamp as usize)
                            .collect();
                        let xs: Vec<f64> = s.iter().map(|o| o.value).collect();
                        let want = oracle(&xs);
                        if got != want {
                            return Err(format!("{name} stream {i}: got {got:?}, oracle {want:?}"));
                        }
                        total += got.len();
                    }
                    if total == 0 {
                        return Err(format!("{name} never fired, comparison is vacuous"));
                    }
                    Ok(total)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut counts = Vec::new();
    for ((name, _, _), r) in cases.iter().zip(results) {
        counts.push(format!("{name}={}", r?));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!(
        "100 streams x 2000, events {}; {secs:.1}s",
        counts.join(" ")
    ))
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_driftwatch"))
        .args(args)
        .output()
        .expect("run driftwatch")
}

fn ac2() -> Outcome {
    let out = run_cli(&["compliance"]);
    ensure!(out.status.success(), "exit {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| {
            l.split("  ")
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(String::from)
                .collect()
        })
        .collect();
    let want = [
        ["CUSUM", "Yes", "No", "Yes", "(No, No)"],
        ["PHT", "Yes", "No", "Yes", "(No, No)"],
        ["ADWIN", "No", "No", "Yes", "(No, No)"],
        ["UDFT", "No", "Yes", "Yes", "(No, No)"],
        ["CRCDD", "No", "Yes", "Yes", "(Yes, No)"],
    ];
    ensure!(rows.len() == 5, "expected 5 rows, got {}", rows.len());
    let mut cells = 0;
    for (row, w) in rows.iter().zip(want) {
        ensure!(row.len() == 5, "malformed row {row:?}");
        ensure!(row[0] == w[0], "row order: {row:?}");
        for (c, e) in row[1..].iter().zip(&w[1..]) {
            ensure!(c == e, "{}: got {c}, want {e}", w[0]);
            cells += 1;
        }
    }
    let json = run_cli(&["compliance", "--json"]);
    let parsed: serde_json::Value =
        serde_json::from_slice(&json.stdout).map_err(|e| e.to_string())?;
    ensure!(
        parsed[4]["r4_bvd"] == serde_json::json!(["Yes", "No"]),
        "json r4 for CRCDD"
    );
    Ok(format!("{cells}/20 cells match"))
}

fn ac3() -> Outcome {
    let x: Vec<f64> = (0..50).map(|k| k as f64 * 1.5 - 7.0).collect();
    let mut valid = 0;
    for n in 1..=50 {
        for m in 1..=5 {
            for tau in 1..=10 {
                let p = EmbeddingParams { m, tau };
                let span = (m - 1) * tau;
                match embed_values(&x[..n], p) {
                    Ok(space) => {
                        ensure!(n > span, "n={n} m={m} tau={tau} accepted");
                        ensure!(space.len() == n - span, "N wrong for n={n} m={m} tau={tau}");
                        for (k, s) in space.states().iter().enumerate() {
                            for j in 0..m {
                                ensure!(s.coords[j] == x[k + j * tau], "coord ({k},{j})");
                            }
                        }
                        valid += 1;
                    }
                    Err(_) => ensure!(n <= span, "n={n} m={m} tau={tau} rejected"),
                }
            }
        }
    }
    let lorenz = generate_lorenz(
        2500,
        DEFAULT_LORENZ_DT,
        [1.0, 1.0, 1.0],
        LorenzParams::default(),
    )
    .unwrap();
    let xs: Vec<f64> = lorenz.iter().map(|o| o.value).collect();
    let space = embed_values(&xs[..250], EmbeddingParams { m: 2, tau: 8 }).unwrap();
    ensure!(space.len() == 242, "Lorenz N = {}", space.len());
    for (k, s) in space.states().iter().enumerate() {
        ensure!(s.coords == vec![xs[k], xs[k + 8]], "Lorenz state {k}");
    }
    Ok(format!(
        "{valid} valid (n,m,tau) combinations; Lorenz (2,8) gives 242 states (x_k, x_k+8)"
    ))
}

fn ac4() -> Outcome {
    let (stream, _) = generate_piecewise_gaussian(&[Segment::new(2500, 0.0, 1.0)], 1).unwrap();
    let w = window_stream(&stream, 250).map_err(|e| e.to_string())?;
    ensure!(w.windows.len() == 10, "{} windows", w.windows.len());
    ensure!(w.remainder.is_empty(), "remainder {}", w.remainder.len());
    for (i, win) in w.windows.iter().enumerate() {
        ensure!(
            win.start_timestamp() == 250 * i as u64 && win.len() == 250,
            "window {i}"
        );
    }
    Ok("10 windows, no remainder".into())
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0f64;
    let mut worst_literal = 0f64;
    for i in 0..50 {
        let n = [9, 16, 33][i % 3];
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let got = udft_features(&StreamWindow::new(i, x.clone()));
        for (c, (re, im)) in got.values.iter().zip(naive_dft(&x, n)) {
            worst = worst.max((c.re - re).abs()).max((c.im - im).abs());
        }
        let lit = FourierPlan::new(n, DftDenominator::Literal)
            .compute(&x)
            .unwrap();
        for (c, (re, im)) in lit.values.iter().zip(naive_dft(&x, n - 1)) {
            worst_literal = worst_literal.max((c.re - re).abs()).max((c.im - im).abs());
        }
        ensure!(got.values.len() == (n - 1) / 2 + 1, "coefficient count");
    }
    ensure!(worst <= 1e-12, "max error {worst:e}");
    ensure!(
        worst_literal <= 1e-12,
        "literal max error {worst_literal:e}"
    );
    let mut leak = 0f64;
    for n in [9, 16, 33, 250] {
        let c = udft_features(&StreamWindow::new(0, vec![3.7; n]));
        ensure!((c.values[0].re - 3.7).abs() < 1e-9, "DC term");
        for z in &c.values[1..] {
            leak = leak.max(z.norm());
        }
    }
    ensure!(leak < 1e-9, "constant-window leak {leak:e}");
    Ok(format!(
        "max error {worst:.1e} (exponent /n), {worst_literal:.1e} (exponent /(n-1)); constant leak {leak:.1e}"
    ))
}

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> (PhaseSpace, Vec<Vec<f64>>) {
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
        .collect();
    let states = coords
        .iter()
        .enumerate()
        .map(|(k, c)| PhaseState {
            coords: c.clone(),
            origin_index: k,
        })
        .collect();
    (
        PhaseSpace::from_states(EmbeddingParams { m: 2, tau: 1 }, states).unwrap(),
        coords,
    )
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mdls = Vec::new();
    for i in 0..50 {
        let (a, ca) = random_space(&mut rng, 40);
        let (b, cb) = random_space(&mut rng, 40);
        let got = crcdd_step(&a, &b, 0.0, CrcddPolarity::Dissimilarity)
            .unwrap()
            .mdl;
        let want = naive_crcdd_mdl(&ca, &cb);
        ensure!(got == want, "pair {i}: mdl {got}, oracle {want}");
        mdls.push(got);
        let same = crcdd_step(&a, &a, 0.0, CrcddPolarity::Dissimilarity)
            .unwrap()
            .mdl;
        ensure!(same == 40, "identical pair {i}: mdl {same}");
    }
    let (lo, hi) = (mdls.iter().min().unwrap(), mdls.iter().max().unwrap());
    Ok(format!(
        "50/50 pairs match, mdl range {lo}..={hi}; identical spaces give 40"
    ))
}

/// Least-squares slope of log(trace) on log(t), t = 1..
fn loglog_slope(trace: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = trace
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0.0)
        .map(|(i, &d)| (((i + 1) as f64).ln(), d.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs the indicator on 500 scalar N(0,1) features; returns the divergence
/// trace for windows 1..500 and the running mean after all 500.
fn convergence_run(seed: u64) -> Result<(Vec<f64>, f64), String> {
    use rand_distr_free::standard_normal;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let feats: Vec<FeatureVector> = (0..500)
        .map(|i| FeatureVector::new(vec![standard_normal(&mut rng)], i).unwrap())
        .collect();
    let cfg = IndicatorConfig {
        lambda: 1e12,
        eta: 3.0,
        accumulate: true,
    };
    let mut ind = Indicator::new(cfg).map_err(|e| e.to_string())?;
    let mut snapshots = Vec::new();
    let mut steps = Vec::new();
    for f in &feats {
        if let Some(h) = ind.history() {
            snapshots.push(h.clone());
        }
        if let Some(step) = ind.observe(f).map_err(|e| e.to_string())? {
            ensure!(!step.drift, "unexpected drift at {}", f.window_index);
            steps.push(step.divergence);
        }
    }
    let trace = convergence_trace(&snapshots, &feats[1..]).map_err(|e| e.to_string())?;
    ensure!(trace == steps, "trace disagrees with per-step divergence");
    // batch recomputation per prefix
    let xs: Vec<f64> = feats.iter().map(|f| f.values[0]).collect();
    for t in 1..xs.len() {
        let mu = mean(&xs[..t]);
        ensure!(
            (trace[t - 1] - (xs[t] - mu).abs()).abs() < 1e-9,
            "trace at {t}"
        );
    }
    let mu = ind.history().unwrap().mean()[0];
    ensure!((mu - mean(&xs)).abs() < 1e-9, "running mean vs batch");
    Ok((trace, mu))
}

/// Box-Muller on the test's own RNG, so the feature stream does not go
/// through the library's generators.
mod rand_distr_free {
    use rand::Rng;

    pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

fn ac7() -> Outcome {
    let seed = RunConfig::shipped().seed;
    let (trace, mu) = convergence_run(seed)?;
    let slope = loglog_slope(&trace);
    // context only: how often the slope condition holds across seeds
    let negative = (0..200)
        .filter(|&s| loglog_slope(&convergence_run(s).unwrap().0) < 0.0)
        .count();
    let detail = format!(
        "seed {seed}: |mean| at t=500 = {:.4}, log-log slope = {slope:.4} (negative on {negative}/200 other seeds)",
        mu.abs()
    );
    ensure!(mu.abs() < 0.2, "{detail}");
    ensure!(slope < 0.0, "{detail}");
    Ok(detail)
}

fn ac8() -> Outcome {
    let cfg = RunConfig::shipped();
    let (stream, truth) = generate_piecewise_gaussian(
        &[Segment::new(2500, 0.0, 1.0), Segment::new(2500, 5.0, 1.0)],
        cfg.seed,
    )
    .unwrap();
    ensure!(
        truth.drift_points == vec![2500],
        "truth {:?}",
        truth.drift_points
    );
    let mut parts = Vec::new();
    for kind in DetectorKind::ALL {
        let events = run_detector(&cfg.detector(kind), stream.iter().copied())
            .unwrap()
            .events;
        let before = events.iter().filter(|e| e.timestamp < 2500).count();
        let hits = events
            .iter()
            .filter(|e| (2500..=3500).contains(&e.timestamp))
            .count();
        let r = evaluate(&events, &truth, stream.len() as u64).unwrap();
        let line = format!(
            "{kind}: before={before} hits={hits} mdr={} mtbfa={}{}",
            r.mdr,
            r.mtbfa,
            if r.mtbfa_censored { "(censored)" } else { "" }
        );
        ensure!(
            hits >= 1 && before <= 2 && r.mdr == 0.0 && r.mtbfa > 1000.0,
            "{line}"
        );
        parts.push(line);
    }
    Ok(format!("seed {}; {}", cfg.seed, parts.join("; ")))
}

fn ac9() -> Outcome {
    let cfg = RunConfig::shipped();
    let stream = r3_probe_stream(2500, 2500, cfg.seed).unwrap();
    for kind in DetectorKind::ALL {
        let v = probe_r3(&cfg.detector(kind), &stream).unwrap();
        ensure!(v == ProbeVerdict::Holds, "{kind}: {v:?}");
    }
    let leaky = || Box::new(LeakyCusum::new(cfg.cusum_lambda)) as Box<dyn Detector>;
    let v = probe_r3_with(leaky, &stream).unwrap();
    ensure!(v == ProbeVerdict::Violated, "leaky fixture: {v:?}");
    let small = driftwatch_core::stream::from_values([5.0, 1.0, 1.0]);
    let v = probe_r3_with(
        || Box::new(LeakyCusum::new(4.0)) as Box<dyn Detector>,
        &small,
    )
    .unwrap();
    ensure!(
        v == ProbeVerdict::Violated,
        "leaky fixture on [5,1,1]: {v:?}"
    );
    Ok("5/5 shipped detectors hold; leaky CUSUM violates".into())
}

fn pipeline(dir: &Path) -> Result<(), String> {
    let p = |f: &str| dir.join(f).to_str().unwrap().to_string();
    let steps: Vec<Vec<String>> = vec![
        vec![
            "generate",
            "piecewise",
            "--segments",
            "2500:0:1,2500:5:1",
            "--seed",
            "7",
            "--output",
            &p("stream.csv"),
            "--truth",
            &p("truth.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "detect",
            "--input",
            &p("stream.csv"),
            "--output",
            &p("events"),
            "--trace",
            &p("traces"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
    ];
    let mut all = steps;
    for k in DetectorKind::ALL {
        all.push(vec![
            "evaluate".to_string(),
            "--events".into(),
            p(&format!("events/{k}.jsonl")),
            "--truth".into(),
            p("truth.json"),
            "--len".into(),
            "5000".into(),
            "--output".into(),
            p(&format!("{k}.report.json")),
            "--csv".into(),
            p("summary.csv"),
        ]);
    }
    for args in all {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run_cli(&refs);
        ensure!(
            out.status.success(),
            "{refs:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    Ok(())
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            for (n, b) in files(&path) {
                out.push((
                    format!("{}/{n}", path.file_name().unwrap().to_string_lossy()),
                    b,
                ));
            }
        } else {
            out.push((
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&path).unwrap(),
            ));
        }
    }
    out.sort();
    out
}

fn ac10() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path())?;
    pipeline(b.path())?;
    let fa = files(a.path());
    let fb = files(b.path());
    ensure!(
        fa.len() == fb.len(),
        "file counts {} vs {}",
        fa.len(),
        fb.len()
    );
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        ensure!(na == nb, "file sets differ: {na} vs {nb}");
        ensure!(ba == bb, "{na} differs");
    }
    let summary = String::from_utf8(std::fs::read(a.path().join("summary.csv")).unwrap()).unwrap();
    for row in summary.lines().skip(1) {
        let mdr: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
        ensure!((0.0..=1.0).contains(&mdr), "mdr {mdr} in {row}");
    }
    let bytes: usize = fa.iter().map(|(_, b)| b.len()).sum();
    Ok(format!(
        "{} files, {bytes} bytes identical across two runs",
        fa.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1", "naive-oracle equivalence", ac1),
        ("AC2", "requirement table fixture", ac2),
        ("AC3", "embedding length law", ac3),
        ("AC4", "2500 observations, n = 250", ac4),
        ("AC5", "DFT correctness", ac5),
        ("AC6", "CRCDD diagonal oracle", ac6),
        ("AC7", "convergence monitor", ac7),
        ("AC8", "drift-injection sanity", ac8),
        ("AC9", "R3 isolation probe", ac9),
        ("AC10", "end-to-end determinism", ac10),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {detail}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
