//! How many measurement runs make a noisy GHZ experiment distinguishable from
//! the best cluster-state impostor? Simulates finite data and compares the
//! empirical relative entropy with the asymptotic value.
//!
//! Run with `cargo run --release --example sampling`.

use entdisc::dense::{cluster4, ghz, white_noise, Observable};
use entdisc::graph::{ghz_generators, group_from_generators};
use entdisc::lu::conjugate_state;
use entdisc::optimizer::{minimize_d, OptimizerConfig};
use entdisc::statstest::{coin_equivalence, empirical_d_multi, simulate_runs};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> entdisc::Result<()> {
    let obs: Vec<Observable> = group_from_generators(&ghz_generators(4))?.nontrivial().into_iter().map(Observable::Pauli).collect();
    let lab = white_noise(&ghz(4), 0.9)?;
    let best = minimize_d(&lab, &cluster4(), &obs, &OptimizerConfig::default())?.d.expect("requested");
    let impostor = conjugate_state(&best.params, &cluster4())?;
    println!("asymptotic D = {:.4} at visibility 0.9", best.value);

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for runs in [150, 1500, 15000, 150000] {
        let samples = simulate_runs(&lab, &obs, runs, &mut rng)?;
        let d = empirical_d_multi(&samples, &impostor)?;
        let used: u64 = samples.iter().map(|s| s.total).sum();
        let (log2_p, tosses) = coin_equivalence(used, d);
        println!("{runs:>7} runs: empirical D {d:.4}, impostor probability 2^{log2_p:.1}, like {tosses:.0} fair-coin tails in a row");
    }
    Ok(())
}
