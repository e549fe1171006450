//! White-noise robustness of the cluster-state stabilizers against the GHZ
//! orbit, printed as plot-ready CSV.
//!
//! Run with `cargo run --release --example noise_curve > curve.csv`.

use entdisc::dense::{cluster4, ghz, Observable};
use entdisc::graph::{cluster4_generators, group_from_generators};
use entdisc::optimizer::{noise_curve, noise_curve_csv, parse_grid, OptimizerConfig};

fn main() -> entdisc::Result<()> {
    let group = group_from_generators(&cluster4_generators())?;
    let cfg = OptimizerConfig { restarts: 16, ..OptimizerConfig::default() };
    let grid = parse_grid("0:1:0.05")?;

    let all: Vec<Observable> = group.nontrivial().into_iter().map(Observable::Pauli).collect();
    let three: Vec<Observable> = group.of_weight(3).into_iter().map(Observable::Pauli).collect();
    for (name, obs) in [("all stabilizers", all), ("three-point stabilizers", three)] {
        let curve = noise_curve(&cluster4(), &ghz(4), &obs, &grid, &cfg)?;
        let tolerance = curve.iter().find(|p| p.f == 0.0).map_or(1.0, |p| p.one_minus_p);
        eprintln!("{name}: F first vanishes on the grid at 1-p = {tolerance:.2}");
        println!("# {name}");
        print!("{}", noise_curve_csv(&curve)?);
    }
    Ok(())
}
