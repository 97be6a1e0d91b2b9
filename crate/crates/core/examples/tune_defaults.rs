//! Grid search behind the thresholds in config/defaults.toml.
//!
//! For each detector and candidate lambda, runs the pinned piecewise fixture
//! (2500 x N(0,1) then 2500 x N(5,1), n = 250) for the shipped seed plus
//! `extra` further seeds, and prints the worst case over seeds of:
//! false alarms before the change, hits in [2500, 3500], MDR and MTBFA.
//!
//!     cargo run --release -p driftwatch-core --example tune_defaults [extra]

use driftwatch_core::config::RunConfig;
use driftwatch_core::detectors::run_detector;
use driftwatch_core::metrics::evaluate;
use driftwatch_core::stream::{generate_piecewise_gaussian, Segment};
use driftwatch_core::DetectorKind;

fn grid(kind: DetectorKind) -> Vec<f64> {
    match kind {
        DetectorKind::Cusum => (1..=12).map(|k| k as f64 * 500.0).collect(),
        DetectorKind::Pht => (1..=12).map(|k| k as f64 * 25.0).collect(),
        DetectorKind::Adwin => (4..=14).map(|k| k as f64 * 0.5).collect(),
        DetectorKind::Udft => (2..=16).map(|k| k as f64 * 0.5).collect(),
        DetectorKind::Crcdd => vec![0.0, 1.0, 2.0, 3.0],
    }
}

fn main() {
    let extra: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let shipped = RunConfig::shipped();
    let seeds: Vec<u64> = std::iter::once(shipped.seed).chain(1..=extra).collect();
    let fixtures: Vec<_> = seeds
        .iter()
        .map(|&s| {
            generate_piecewise_gaussian(
                &[Segment::new(2500, 0.0, 1.0), Segment::new(2500, 5.0, 1.0)],
                s,
            )
            .unwrap()
        })
        .collect();

    println!(
        "detector lambda  max_fa_before min_hits max_mdr min_mtbfa  ok_seeds/{}",
        seeds.len()
    );
    for kind in DetectorKind::ALL {
        for lambda in grid(kind) {
            let cfg = shipped.detector(kind).with_lambda(lambda);
            let (mut max_fa, mut min_hits, mut max_mdr, mut min_mtbfa, mut ok) =
                (0usize, usize::MAX, 0f64, f64::INFINITY, 0usize);
            for (stream, truth) in &fixtures {
                let events = run_detector(&cfg, stream.iter().copied()).unwrap().events;
                let before = events.iter().filter(|e| e.timestamp < 2500).count();
                let hits = events
                    .iter()
                    .filter(|e| (2500..=3500).contains(&e.timestamp))
                    .count();
                let report = evaluate(&events, truth, stream.len() as u64).unwrap();
                max_fa = max_fa.max(before);
                min_hits = min_hits.min(hits);
                max_mdr = max_mdr.max(report.mdr);
                min_mtbfa = min_mtbfa.min(report.mtbfa);
                if before <= 2 && hits >= 1 && report.mdr == 0.0 && report.mtbfa > 1000.0 {
                    ok += 1;
                }
            }
            println!(
                "{:<8} {:>7} {:>13} {:>8} {:>7.2} {:>10.1}  {}",
                kind.name(),
                lambda,
                max_fa,
                min_hits,
                max_mdr,
                min_mtbfa,
                ok
            );
        }
    }
}
