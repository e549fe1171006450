//! How well do the GHZ stabilizers tell a four-qubit GHZ state apart from
//! every local-unitary image of the linear cluster state?
//!
//! Run with `cargo run --release --example ghz_vs_cluster`.

use std::time::Instant;

use entdisc::dense::{cluster4, ghz, Observable};
use entdisc::graph::{ghz_generators, group_from_generators};
use entdisc::optimizer::{max_overlap, minimize_d, minimize_f, OptimizerConfig};

fn main() -> entdisc::Result<()> {
    let rho = ghz(4);
    let sigma = cluster4();
    let group = group_from_generators(&ghz_generators(4))?;
    let obs: Vec<Observable> = group.nontrivial().into_iter().map(Observable::Pauli).collect();
    let cfg = OptimizerConfig::default();

    let t = Instant::now();
    let (fid, _) = max_overlap(&rho, &sigma, &cfg)?;
    println!("max overlap        {fid:.6}   ({:.2?})", t.elapsed());

    let t = Instant::now();
    let f = minimize_f(&rho, &sigma, &obs, &cfg)?.f.expect("requested");
    println!("fidelity gap F     {:.6}   ({:.2?})", f.value, t.elapsed());

    let t = Instant::now();
    let d = minimize_d(&rho, &sigma, &obs, &cfg)?.d.expect("requested");
    println!("relative entropy D {:.6}   ({:.2?})", d.value, t.elapsed());

    println!("\nper-operator relative entropy at the minimizer:");
    for term in &d.terms {
        println!("  {:>6}  {:.6}", term.label, term.d);
    }
    Ok(())
}
