//! Which small families of GHZ stabilizers best separate GHZ from the
//! cluster-state orbit, permutations included?
//!
//! Run with `cargo run --release --example subset_search [max_size]`.

use std::time::Instant;

use entdisc::dense::{cluster4, ghz};
use entdisc::graph::{ghz_generators, group_from_generators};
use entdisc::optimizer::{subset_search, Metric, OptimizerConfig};

fn main() -> entdisc::Result<()> {
    let max_size: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let cands = group_from_generators(&ghz_generators(4))?.nontrivial();
    let cfg = OptimizerConfig { include_permutations: true, ..OptimizerConfig::default() };

    for metric in [Metric::D, Metric::F] {
        let t = Instant::now();
        let ranked = subset_search(&ghz(4), &cluster4(), &cands, max_size, metric, &cfg)?;
        println!("{metric}: {} families in {:.1?}", ranked.len(), t.elapsed());
        for size in 1..=max_size {
            let of_size: Vec<_> = ranked.iter().filter(|r| r.labels.len() == size).collect();
            let top = of_size[0].value;
            let ties = of_size.iter().filter(|r| (r.value - top).abs() < 5e-3).count();
            println!("  size {size}: best {top:.6} shared by {ties} families, e.g. {{{}}}", of_size[0].labels.join(", "));
        }
    }
    Ok(())
}
