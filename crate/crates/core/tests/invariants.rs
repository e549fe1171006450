use approx::assert_abs_diff_eq;
use entdisc::dense::{cluster4, ghz, w3, white_noise, Observable};
use entdisc::graph::{cluster4_generators, ghz_generators, group_from_generators};
use entdisc::lu::{conjugate_state, random_params};
use entdisc::measures::{d_multi, f_gap, Normalization};
use entdisc::optimizer::{max_overlap, minimize_d, minimize_f, noise_curve, OptimizerConfig};

fn stabilizers(gens: &[entdisc::pauli::PauliString]) -> Vec<Observable> {
    group_from_generators(gens).unwrap().nontrivial().into_iter().map(Observable::Pauli).collect()
}

fn cfg(restarts: usize) -> OptimizerConfig {
    OptimizerConfig { restarts, ..OptimizerConfig::default() }
}

#[test]
fn fidelity_form_of_full_stabilizer_gap() {
    for (rho, sigma, gens) in [(ghz(3), w3(), ghz_generators(3)), (cluster4(), ghz(4), cluster4_generators())] {
        let obs = stabilizers(&gens);
        let dim = rho.dim() as f64;
        let f = minimize_f(&rho, &sigma, &obs, &cfg(32)).unwrap().f.unwrap().value;
        let (fid, _) = max_overlap(&rho, &sigma, &cfg(32)).unwrap();
        assert_abs_diff_eq!(f, dim / (dim - 1.0) * (1.0 - fid), epsilon = 1e-6);
    }
}

#[test]
fn optimum_never_exceeds_fixed_point() {
    let obs = stabilizers(&ghz_generators(4));
    for seed in 0..3 {
        let sigma = conjugate_state(&random_params(4, seed), &cluster4()).unwrap();
        let d = minimize_d(&ghz(4), &sigma, &obs, &cfg(2)).unwrap().d.unwrap().value;
        assert!(d <= d_multi(&ghz(4), &sigma, &obs).unwrap());
        let f = minimize_f(&ghz(4), &sigma, &obs, &cfg(2)).unwrap().f.unwrap().value;
        assert!(f <= f_gap(&ghz(4), &sigma, &obs, &Normalization::Rho).unwrap() + 1e-12);
    }
}

#[test]
fn seeded_reports_are_identical() {
    let obs = stabilizers(&ghz_generators(3));
    let c = OptimizerConfig { seed: 42, include_permutations: true, ..cfg(8) };
    let a = minimize_d(&ghz(3), &w3(), &obs, &c).unwrap();
    let b = minimize_d(&ghz(3), &w3(), &obs, &c).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn reported_minimizer_reproduces_value() {
    let obs = stabilizers(&ghz_generators(4));
    let c = OptimizerConfig { include_permutations: true, ..cfg(8) };
    let d = minimize_d(&ghz(4), &cluster4(), &obs, &c).unwrap().d.unwrap();
    let state = conjugate_state(&d.params, &cluster4()).unwrap();
    assert_abs_diff_eq!(d_multi(&ghz(4), &state, &obs).unwrap(), d.value, epsilon = 1e-9);
}

#[test]
fn family_bound_by_subfamily_under_noise() {
    // The relative entropy of a family is at least the subfamily's share of
    // the subfamily value, so the all-stabilizer D stays positive wherever the
    // three-point D does.
    let all = stabilizers(&cluster4_generators());
    let three: Vec<Observable> =
        group_from_generators(&cluster4_generators()).unwrap().of_weight(3).into_iter().map(Observable::Pauli).collect();
    let grid = [0.5, 0.9, 0.99];
    let full = noise_curve(&cluster4(), &ghz(4), &all, &grid, &cfg(16)).unwrap();
    let sub = noise_curve(&cluster4(), &ghz(4), &three, &grid, &cfg(16)).unwrap();
    for (a, b) in full.iter().zip(&sub) {
        assert!(b.d > 0.0);
        assert!(a.d >= (three.len() as f64 / all.len() as f64) * b.d - 1e-6, "at {}: {} vs {}", a.one_minus_p, a.d, b.d);
    }
}

#[test]
fn noise_curve_starts_at_noiseless_values() {
    let obs = stabilizers(&ghz_generators(3));
    let pts = noise_curve(&ghz(3), &w3(), &obs, &[0.0, 0.2], &cfg(16)).unwrap();
    let f = minimize_f(&ghz(3), &w3(), &obs, &cfg(16)).unwrap().f.unwrap().value;
    let d = minimize_d(&ghz(3), &w3(), &obs, &cfg(16)).unwrap().d.unwrap().value;
    assert_abs_diff_eq!(pts[0].f, f, epsilon = 1e-6);
    assert_abs_diff_eq!(pts[0].d, d, epsilon = 1e-6);
    // Fidelity gap at noise level 1-p is the noiseless gap reduced by 1-p.
    assert_abs_diff_eq!(pts[1].f, f - 0.2, epsilon = 1e-6);
}

#[test]
fn noisy_state_is_closer() {
    let obs = stabilizers(&ghz_generators(3));
    let noisy = white_noise(&ghz(3), 0.8).unwrap();
    let clean = minimize_d(&ghz(3), &w3(), &obs, &cfg(16)).unwrap().d.unwrap().value;
    let dirty = minimize_d(&noisy, &w3(), &obs, &cfg(16)).unwrap().d.unwrap().value;
    assert!(dirty < clean);
}
