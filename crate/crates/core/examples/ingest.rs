//! Measures from measured stabilizer correlations, with Monte-Carlo error
//! bars. Reads a `label,expectation,stderr` CSV (default: the bundled
//! synthetic cluster-state data).
//!
//! Run with `cargo run --release --example ingest [file.csv]`.

use entdisc::dense::{cluster4, ghz};
use entdisc::measures::Normalization;
use entdisc::optimizer::{Metric, OptimizerConfig};
use entdisc::statstest::{ingest_correlations, measures_from_correlations};

fn main() -> entdisc::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/cluster4_measured.csv").to_string());
    let data = ingest_correlations(&path)?;
    println!("{} correlations from {path}", data.len());
    for r in data.records() {
        println!("  {:>6}  {:+.3} +/- {:.3}", r.label, r.expectation, r.stderr);
    }

    let cfg = OptimizerConfig { restarts: 16, ..OptimizerConfig::default() };
    let ideal = Normalization::Reference(cluster4());
    for metric in [Metric::F, Metric::D] {
        let est = measures_from_correlations(&data, &ghz(4), metric, &ideal, &cfg, 1000)?;
        println!("{metric} = {:.3} +/- {:.3}", est.value, est.uncertainty.unwrap_or(0.0));
    }
    Ok(())
}
