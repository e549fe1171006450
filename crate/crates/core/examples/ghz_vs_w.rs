//! The two three-qubit entanglement classes, discriminated in both directions.
//!
//! Run with `cargo run --release --example ghz_vs_w`.

use entdisc::dense::{ghz, w3, what_w3, Observable};
use entdisc::graph::{ghz_generators, group_from_generators};
use entdisc::measures::d_multi;
use entdisc::optimizer::{max_overlap, minimize_d, minimize_f, subset_search, Metric, OptimizerConfig};
use entdisc::pauli::parse_words;

fn main() -> entdisc::Result<()> {
    let cfg = OptimizerConfig::default();
    let group = group_from_generators(&ghz_generators(3))?;
    let stabilizers: Vec<Observable> = group.nontrivial().into_iter().map(Observable::Pauli).collect();

    let (fid, _) = max_overlap(&ghz(3), &w3(), &cfg)?;
    let f = minimize_f(&ghz(3), &w3(), &stabilizers, &cfg)?.f.expect("requested");
    let d = minimize_d(&ghz(3), &w3(), &stabilizers, &cfg)?.d.expect("requested");
    println!("GHZ vs W orbit, all 7 stabilizers");
    println!("  max overlap {fid:.6}  F {:.6}  D {:.6}", f.value, d.value);

    // A natural-looking guess for the closest W-type state, not the optimum.
    let guess = d_multi(&ghz(3), &what_w3(), &stabilizers)?;
    println!("  D at the fixed rotated W guess {guess:.6}");

    println!("\nsingle-observable families, best first (D)");
    for fam in subset_search(&ghz(3), &w3(), &group.nontrivial(), 1, Metric::D, &cfg)? {
        println!("  {:>5}  {:.6}", fam.labels[0], fam.value);
    }

    let singles: Vec<Observable> = parse_words(&["IIZ", "IZI", "ZII"])?.into_iter().map(Observable::Pauli).collect();
    let f = minimize_f(&w3(), &ghz(3), &singles, &cfg)?.f.expect("requested");
    let d = minimize_d(&w3(), &ghz(3), &singles, &cfg)?.d.expect("requested");
    println!("\nW vs GHZ orbit, single-qubit Z");
    println!("  F {:.6}  D {:.6}", f.value, d.value);
    Ok(())
}
