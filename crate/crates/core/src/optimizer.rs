//! Searches over the local-unitary (and optionally permutation) orbit of a
//! pure `σ`: orbit-minimized measures, maximal overlap, optimal observable
//! families and white-noise curves.
//!
//! Every search is a multi-start Nelder-Mead over the `3n` Euler angles. The
//! first start of each permutation is the identity rotation, so a result
//! never exceeds the value at `σ` itself. Results are upper bounds (lower
//! bounds for maximizations) on the true orbit optimum.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{distinct_permutations, overlap, permute_qubits, white_noise, DenseState, Observable};
use crate::error::{Error, Result};
use crate::lu::{random_params_with, rotate_in_place, LocalUnitaryParams};
use crate::measures::{ext_real, DiscriminationReport, MeasureResult, Normalization, Problem};
use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Iteration cap of a single simplex run.
    pub max_iterations: usize,
    /// Convergence tolerance on the objective.
    pub tolerance: f64,
    pub seed: u64,
    pub include_permutations: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 64, max_iterations: 4000, tolerance: 1e-9, seed: 0, include_permutations: false }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    F,
    D,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::F => "F",
            Metric::D => "D",
        })
    }
}

/// Minimizes `f` from `x0` with the dimension-adapted Nelder-Mead coefficients.
/// Returns the best point and its value.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: f64, tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let d = x0.len();
    if d == 0 {
        return (Vec::new(), f(x0));
    }
    let dn = d as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / dn, 0.75 - 1.0 / (2.0 * dn), 1.0 - 1.0 / dn);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let by_value = |a: &f64, b: &f64| a.total_cmp(b);

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| by_value(&values[a], &values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[d] - values[0];
        let size = simplex[1..].iter().flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        if spread <= tol && size <= 1e3 * tol.sqrt() {
            break;
        }

        let mut centroid = vec![0.0; d];
        for v in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dn;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[d]).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(alpha);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(alpha * beta);
            let fe = f(&xe);
            if fe < fr {
                simplex[d] = xe;
                values[d] = fe;
            } else {
                simplex[d] = xr;
                values[d] = fr;
            }
            continue;
        }
        if fr < values[d - 1] {
            simplex[d] = xr;
            values[d] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[d] {
            let xc = along(alpha * gamma);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < fr.min(values[d]) {
            simplex[d] = xc;
            values[d] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=d {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + delta * (*x - b);
            }
            values[i] = f(&simplex[i]);
        }
    }
    let (i, _) = values.iter().enumerate().min_by(|a, b| by_value(a.1, b.1)).unwrap();
    (simplex[i].clone(), values[i])
}

/// Nelder-Mead followed by fresh-simplex restarts around the incumbent until
/// they stop improving.
fn polished<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], cfg: &OptimizerConfig) -> (Vec<f64>, f64) {
    let (mut x, mut v) = nelder_mead(f, x0, 0.6, cfg.tolerance, cfg.max_iterations);
    for step in [0.2, 0.05, 0.01] {
        let (y, w) = nelder_mead(f, &x, step, cfg.tolerance, cfg.max_iterations);
        let gain = v - w;
        if w < v {
            x = y;
            v = w;
        }
        if !(gain > cfg.tolerance) {
            break;
        }
    }
    (x, v)
}

/// Best point of an orbit search.
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    /// Exact objective value (minimized).
    pub value: f64,
    pub params: LocalUnitaryParams,
    /// The orbit element `U σ`.
    pub amplitudes: Vec<Complex64>,
}

fn sigma_amplitudes(sigma: &DenseState) -> Result<&[Complex64]> {
    sigma.amplitudes().ok_or(Error::NotPure)
}

/// Minimizes `objective` over the orbit of the pure `sigma`. The objective
/// returns `(search value, exact value)`; the search value steers the simplex
/// and the exact one ranks the candidates. `starts` adds warm starts.
pub fn orbit_minimize<F>(sigma: &DenseState, cfg: &OptimizerConfig, starts: &[LocalUnitaryParams], objective: F) -> Result<OrbitPoint>
where
    F: Fn(&[Complex64]) -> (f64, f64) + Sync,
{
    cfg.validate()?;
    sigma_amplitudes(sigma)?;
    let n = sigma.n();
    let images: Vec<(Vec<usize>, DenseState)> =
        if cfg.include_permutations { distinct_permutations(sigma)? } else { vec![((0..n).collect(), sigma.clone())] };

    // Job list: per permutation the identity, the matching warm starts, then random starts.
    let mut jobs: Vec<(usize, Option<Vec<f64>>)> = Vec::new();
    for (pi, (perm, _)) in images.iter().enumerate() {
        jobs.push((pi, Some(vec![0.0; 3 * n])));
        for s in starts {
            if s.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.n() });
            }
            let sp: Vec<usize> = s.perm.clone().unwrap_or_else(|| (0..n).collect());
            if &sp == perm {
                // Angles act before the permutation; inside the job they act after it.
                let flat: Vec<f64> = (0..n).flat_map(|k| s.angles[perm[k]]).collect();
                jobs.push((pi, Some(flat)));
            }
        }
        for _ in 1..cfg.restarts {
            jobs.push((pi, None));
        }
    }

    let evaluated: Vec<(f64, f64, usize, Vec<f64>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(job, (pi, x0))| {
            let base = images[*pi].1.amplitudes().unwrap();
            let x0 = x0.clone().unwrap_or_else(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(job as u64);
                random_params_with(n, &mut rng).flat()
            });
            let search = |x: &[f64]| buf_eval(base, x, |v| objective(v).0);
            let (x, _) = polished(&search, &x0, cfg);
            let mut buf = base.to_vec();
            rotate_in_place(&mut buf, &x);
            let (s, e) = objective(&buf);
            (e, s, job, x)
        })
        .collect();

    let (_, _, job, x) = evaluated
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)))
        .expect("at least one job");
    let (perm, image) = &images[jobs[job].0];
    let mut amps = image.amplitudes().unwrap().to_vec();
    rotate_in_place(&mut amps, &x);
    let value = objective(&amps).1;

    let mut angles = vec![[0.0; 3]; n];
    for k in 0..n {
        angles[perm[k]] = [x[3 * k], x[3 * k + 1], x[3 * k + 2]];
    }
    let identity = perm.iter().enumerate().all(|(k, &p)| k == p);
    let params = LocalUnitaryParams { angles, perm: if identity { None } else { Some(perm.clone()) } };
    Ok(OrbitPoint { value, params, amplitudes: amps })
}

fn buf_eval<G: Fn(&[Complex64]) -> f64>(base: &[Complex64], x: &[f64], g: G) -> f64 {
    let mut v = base.to_vec();
    rotate_in_place(&mut v, x);
    g(&v)
}

fn check_sizes(problem: &Problem, sigma: &DenseState) -> Result<()> {
    if problem.n() != sigma.n() {
        return Err(Error::LengthMismatch { left: problem.n(), right: sigma.n() });
    }
    Ok(())
}

/// Orbit-minimized relative-entropy measure for a prepared problem.
pub fn minimize_d_problem(problem: &Problem, sigma: &DenseState, cfg: &OptimizerConfig, starts: &[LocalUnitaryParams]) -> Result<MeasureResult> {
    check_sizes(problem, sigma)?;
    let best = orbit_minimize(sigma, cfg, starts, |amps| {
        let stats = problem.sigma_stats(amps);
        (problem.d_surrogate(&stats), problem.d_value(&stats))
    })?;
    let stats = problem.sigma_stats(&best.amplitudes);
    Ok(MeasureResult { value: best.value, params: best.params, terms: problem.terms(&stats) })
}

/// Orbit-maximized normalized `σ` level of the combined observable, with the point reaching it.
pub fn max_sigma_level(problem: &Problem, sigma: &DenseState, cfg: &OptimizerConfig, starts: &[LocalUnitaryParams]) -> Result<OrbitPoint> {
    check_sizes(problem, sigma)?;
    problem.target()?;
    let mut best = orbit_minimize(sigma, cfg, starts, |amps| {
        let level = -problem.sigma_level(&problem.sigma_stats(amps)).unwrap_or(f64::NAN);
        (level, level)
    })?;
    best.value = -best.value;
    Ok(best)
}

/// Orbit-minimized fidelity-gap measure for a prepared problem.
pub fn minimize_f_problem(problem: &Problem, sigma: &DenseState, cfg: &OptimizerConfig, starts: &[LocalUnitaryParams]) -> Result<MeasureResult> {
    let best = max_sigma_level(problem, sigma, cfg, starts)?;
    let stats = problem.sigma_stats(&best.amplitudes);
    Ok(MeasureResult { value: problem.f_value(&stats)?, params: best.params, terms: problem.terms(&stats) })
}

fn report(problem: &Problem, cfg: &OptimizerConfig, f: Option<MeasureResult>, d: Option<MeasureResult>) -> DiscriminationReport {
    DiscriminationReport { f, d, include_permutations: cfg.include_permutations, normalization: problem.normalization().to_string() }
}

pub fn minimize_d(rho: &DenseState, sigma: &DenseState, obs: &[Observable], cfg: &OptimizerConfig) -> Result<DiscriminationReport> {
    let problem = Problem::from_state(rho, obs, &Normalization::Rho)?;
    let d = minimize_d_problem(&problem, sigma, cfg, &[])?;
    Ok(report(&problem, cfg, None, Some(d)))
}

pub fn minimize_f(rho: &DenseState, sigma: &DenseState, obs: &[Observable], cfg: &OptimizerConfig) -> Result<DiscriminationReport> {
    let problem = Problem::from_state(rho, obs, &Normalization::Rho)?;
    let f = minimize_f_problem(&problem, sigma, cfg, &[])?;
    Ok(report(&problem, cfg, Some(f), None))
}

/// Both measures (as requested) for a prepared problem.
pub fn discriminate(problem: &Problem, sigma: &DenseState, cfg: &OptimizerConfig, want_f: bool, want_d: bool) -> Result<DiscriminationReport> {
    let f = if want_f { Some(minimize_f_problem(problem, sigma, cfg, &[])?) } else { None };
    let d = if want_d { Some(minimize_d_problem(problem, sigma, cfg, &[])?) } else { None };
    Ok(report(problem, cfg, f, d))
}

/// Largest `|<ψ|U|φ>|²` found over the orbit of `φ`.
pub fn max_overlap(psi: &DenseState, phi: &DenseState, cfg: &OptimizerConfig) -> Result<(f64, LocalUnitaryParams)> {
    let target = sigma_amplitudes(psi)?;
    if psi.n() != phi.n() {
        return Err(Error::LengthMismatch { left: psi.n(), right: phi.n() });
    }
    let best = orbit_minimize(phi, cfg, &[], |amps| {
        let ip: Complex64 = target.iter().zip(amps).map(|(a, b)| a.conj() * b).sum();
        let v = -ip.norm_sqr();
        (v, v)
    })?;
    Ok((-best.value, best.params))
}

/// One observable family with its orbit-optimized value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFamily {
    pub labels: Vec<String>,
    #[serde(with = "ext_real")]
    pub value: f64,
    pub params: LocalUnitaryParams,
    /// Canonical member of the symmetry class this family was evaluated through.
    pub representative: Vec<String>,
}

/// Simultaneous qubit permutations under which the search is invariant:
/// they fix `ρ`, map the candidates onto themselves and, without the
/// permutation orbit, also fix `σ`.
pub fn search_symmetries(rho: &DenseState, sigma: &DenseState, candidates: &[PauliString], include_permutations: bool) -> Result<Vec<Vec<usize>>> {
    let n = rho.n();
    let rho_m = rho.density_matrix();
    let mut out = Vec::new();
    for g in (0..n).permutations(n) {
        let moved = permute_qubits(rho, &g)?.density_matrix();
        if (&moved - &rho_m).norm() > 1e-9 {
            continue;
        }
        if !include_permutations && overlap(&permute_qubits(sigma, &g)?, sigma)? < 1.0 - 1e-9 {
            continue;
        }
        let closed = candidates.iter().map(|c| c.permuted(&g)).collect::<Result<Vec<_>>>()?.iter().all(|c| candidates.contains(c));
        if closed {
            out.push(g);
        }
    }
    Ok(out)
}

fn family_image(family: &[PauliString], g: &[usize]) -> Vec<PauliString> {
    let mut v: Vec<PauliString> = family.iter().map(|p| p.permuted(g).expect("checked permutation")).collect();
    v.sort_by_key(|p| p.to_string());
    v
}

fn labels_of(family: &[PauliString]) -> Vec<String> {
    family.iter().map(|p| p.to_string()).collect()
}

/// Permutes the orbit point reached for a representative onto a family member.
fn transport(params: &LocalUnitaryParams, g: &[usize], include_permutations: bool) -> LocalUnitaryParams {
    let n = params.n();
    if include_permutations {
        let pi: Vec<usize> = params.perm.clone().unwrap_or_else(|| (0..n).collect());
        let combined: Vec<usize> = g.iter().map(|&k| pi[k]).collect();
        let identity = combined.iter().enumerate().all(|(k, &v)| k == v);
        LocalUnitaryParams { angles: params.angles.clone(), perm: if identity { None } else { Some(combined) } }
    } else {
        // g fixes σ, so the permutation can be absorbed into the rotations.
        LocalUnitaryParams { angles: g.iter().map(|&k| params.angles[k]).collect(), perm: None }
    }
}

/// Ranks every family of `1..=max_size` candidates by its orbit-optimized
/// metric, highest first, ties by label list. Families related by a symmetry
/// of the problem are evaluated once.
pub fn subset_search(
    rho: &DenseState,
    sigma: &DenseState,
    candidates: &[PauliString],
    max_size: usize,
    metric: Metric,
    cfg: &OptimizerConfig,
) -> Result<Vec<RankedFamily>> {
    if candidates.is_empty() {
        return Err(Error::EmptyObservables);
    }
    cfg.validate()?;
    let mut cands: Vec<PauliString> = candidates.to_vec();
    cands.sort_by_key(|p| p.to_string());
    cands.dedup();
    for c in &cands {
        if c.n() != rho.n() {
            return Err(Error::LengthMismatch { left: rho.n(), right: c.n() });
        }
        let e = crate::dense::expectation(&Observable::Pauli(*c), rho)?;
        if c.is_identity() || e < 1.0 - 1e-9 {
            return Err(Error::InvalidObservable(format!("{c} is not a nontrivial stabilizing operator of rho")));
        }
    }
    let syms = search_symmetries(rho, sigma, &cands, cfg.include_permutations)?;

    let mut classes: BTreeMap<Vec<String>, Vec<Vec<PauliString>>> = BTreeMap::new();
    for size in 1..=max_size.min(cands.len()) {
        for combo in cands.iter().copied().combinations(size) {
            let canon = syms.iter().map(|g| labels_of(&family_image(&combo, g))).min().expect("identity is a symmetry");
            classes.entry(canon).or_default().push(combo);
        }
    }

    let reps: Vec<&Vec<String>> = classes.keys().collect();
    let values: Vec<Result<MeasureResult>> = reps
        .par_iter()
        .map(|labels| {
            let obs: Vec<Observable> = labels.iter().map(|l| Observable::Pauli(l.parse().expect("own label"))).collect();
            let problem = Problem::from_state(rho, &obs, &Normalization::Rho)?;
            match metric {
                Metric::D => minimize_d_problem(&problem, sigma, cfg, &[]),
                Metric::F => minimize_f_problem(&problem, sigma, cfg, &[]),
            }
        })
        .collect();

    let mut ranked = Vec::new();
    for (labels, result) in reps.into_iter().zip(values) {
        let result = result?;
        let rep: Vec<PauliString> = labels.iter().map(|l| l.parse().expect("own label")).collect();
        for member in &classes[labels] {
            let member_labels = labels_of(member);
            let g = syms.iter().find(|g| labels_of(&family_image(&rep, g)) == member_labels).expect("member of its class");
            ranked.push(RankedFamily {
                labels: member_labels,
                value: result.value,
                params: transport(&result.params, g, cfg.include_permutations),
                representative: labels.clone(),
            });
        }
    }
    ranked.sort_by(|a, b| match b.value.total_cmp(&a.value) {
        Ordering::Equal => a.labels.cmp(&b.labels),
        o => o,
    });
    Ok(ranked)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub one_minus_p: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "D", with = "ext_real")]
    pub d: f64,
}

/// Both measures for `p ρ + (1 - p) I/d` over a grid of noise levels `1 - p`.
/// The fidelity gap keeps the noiseless `ρ` as its normalization, so it falls
/// linearly in `1 - p` and crosses zero at the noiseless value.
pub fn noise_curve(rho: &DenseState, sigma: &DenseState, obs: &[Observable], one_minus_p: &[f64], cfg: &OptimizerConfig) -> Result<Vec<NoisePoint>> {
    if one_minus_p.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if let Some(bad) = one_minus_p.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::InvalidGrid(format!("noise level {bad} outside [0, 1]")));
    }
    let mut grid = one_minus_p.to_vec();
    grid.sort_by(f64::total_cmp);

    let ideal = Normalization::Reference(rho.clone());
    let clean = Problem::from_state(rho, obs, &ideal)?;
    let level = max_sigma_level(&clean, sigma, cfg, &[]).ok().map(|b| b.value);

    let mut points = Vec::with_capacity(grid.len());
    let mut warm: Vec<LocalUnitaryParams> = Vec::new();
    for &q in &grid {
        let noisy = white_noise(rho, 1.0 - q)?;
        let problem = Problem::from_state(&noisy, obs, &ideal)?;
        let f = match level {
            Some(m) => (problem.rho_level()? - m).max(0.0),
            None => f64::NAN,
        };
        let d = minimize_d_problem(&problem, sigma, cfg, &warm)?;
        warm = vec![d.params.clone()];
        points.push(NoisePoint { one_minus_p: q, f, d: d.value });
    }
    Ok(points)
}

pub fn noise_curve_csv(points: &[NoisePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// `lo, lo + step, ..., hi` (inclusive up to rounding).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, s] = parts.as_slice() else {
        return Err(Error::InvalidGrid(format!("expected lo:hi:step, got {spec}")));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::InvalidGrid(format!("not a number: {t}")));
    let (lo, hi, step) = (num(a)?, num(b)?, num(s)?);
    if !(step > 0.0) || hi < lo {
        return Err(Error::InvalidGrid(format!("bad range {spec}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + i as f64 * step).map(|v| (v * 1e12).round() / 1e12).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{cluster4, ghz, w3};
    use crate::graph::{ghz_generators, group_from_generators};
    use crate::lu::conjugate_state;
    use crate::measures::{d_multi, f_gap};
    use approx::assert_abs_diff_eq;

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 8, ..OptimizerConfig::default() }
    }

    fn paulis(words: &[&str]) -> Vec<Observable> {
        words.iter().map(|w| Observable::Pauli(w.parse().unwrap())).collect()
    }

    #[test]
    fn nelder_mead_quadratic() {
        let (x, v) = nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], 0.5, 1e-12, 5000);
        assert!(v < 1e-10);
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(x[1], -2.0, epsilon = 1e-5);
    }

    #[test]
    fn config_validation() {
        let bad = OptimizerConfig { restarts: 0, ..OptimizerConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = OptimizerConfig { tolerance: 0.0, ..OptimizerConfig::default() };
        assert!(bad.validate().is_err());
        assert!(max_overlap(&ghz(3), &w3(), &bad).is_err());
    }

    #[test]
    fn self_discrimination_is_zero() {
        let obs: Vec<Observable> = group_from_generators(&ghz_generators(3)).unwrap().nontrivial().into_iter().map(Observable::Pauli).collect();
        let g = ghz(3);
        let r = minimize_d(&g, &g, &obs, &quick()).unwrap();
        assert_eq!(r.d.unwrap().value, 0.0);
        let r = minimize_f(&g, &g, &obs, &quick()).unwrap();
        assert_abs_diff_eq!(r.f.unwrap().value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn params_reproduce_reported_state() {
        let obs = paulis(&["IZIZ", "XXXX", "ZZII"]);
        let cfg = OptimizerConfig { include_permutations: true, ..quick() };
        let problem = Problem::from_state(&ghz(4), &obs, &Normalization::Rho).unwrap();
        let best = orbit_minimize(&cluster4(), &cfg, &[], |amps| {
            let s = problem.sigma_stats(amps);
            (problem.d_surrogate(&s), problem.d_value(&s))
        })
        .unwrap();
        let state = conjugate_state(&best.params, &cluster4()).unwrap();
        let direct = DenseState::pure_normalized(best.amplitudes.clone()).unwrap();
        assert_abs_diff_eq!(overlap(&state, &direct).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d_multi(&ghz(4), &state, &obs).unwrap(), best.value, epsilon = 1e-9);
    }

    #[test]
    fn never_worse_than_identity() {
        let obs = paulis(&["IZZ", "XXX"]);
        let sigma = conjugate_state(&crate::lu::random_params(3, 5), &w3()).unwrap();
        let cfg = OptimizerConfig { restarts: 1, max_iterations: 1, ..OptimizerConfig::default() };
        let d = minimize_d(&ghz(3), &sigma, &obs, &cfg).unwrap().d.unwrap().value;
        assert!(d <= d_multi(&ghz(3), &sigma, &obs).unwrap());
        let f = minimize_f(&ghz(3), &sigma, &obs, &cfg).unwrap().f.unwrap().value;
        assert!(f <= f_gap(&ghz(3), &sigma, &obs, &Normalization::Rho).unwrap() + 1e-15);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let obs = paulis(&["IZZ", "ZIZ", "XXX"]);
        let cfg = OptimizerConfig { seed: 7, ..quick() };
        let a = minimize_d(&ghz(3), &w3(), &obs, &cfg).unwrap();
        let b = minimize_d(&ghz(3), &w3(), &obs, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn overlap_examples() {
        let (v, _) = max_overlap(&ghz(3), &ghz(3), &quick()).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        let (v, p) = max_overlap(&ghz(3), &w3(), &quick()).unwrap();
        assert_abs_diff_eq!(v, 0.75, epsilon = 1e-6);
        let reached = overlap(&ghz(3), &conjugate_state(&p, &w3()).unwrap()).unwrap();
        assert_abs_diff_eq!(reached, v, epsilon = 1e-12);
    }

    #[test]
    fn singleton_subsets_for_ghz3() {
        let cands = group_from_generators(&ghz_generators(3)).unwrap().nontrivial();
        let ranked = subset_search(&ghz(3), &w3(), &cands, 1, Metric::D, &quick()).unwrap();
        assert_eq!(ranked.len(), 7);
        let mut top: Vec<&str> = ranked[..3].iter().map(|r| r.labels[0].as_str()).collect();
        top.sort();
        assert_eq!(top, ["IZZ", "ZIZ", "ZZI"]);
        assert_abs_diff_eq!(ranked[0].value, (6.0f64 / 5.0).log2(), epsilon = 5e-3);
        assert_eq!(ranked.iter().filter(|r| (r.value - ranked[0].value).abs() < 1e-9).count(), 3);
        for r in &ranked {
            let state = conjugate_state(&r.params, &w3()).unwrap();
            let d = d_multi(&ghz(3), &state, &paulis(&[r.labels[0].as_str()])).unwrap();
            assert_abs_diff_eq!(d, r.value, epsilon = 1e-9);
        }
    }

    #[test]
    fn subset_search_rejects_bad_candidates() {
        assert!(matches!(subset_search(&ghz(3), &w3(), &[], 1, Metric::D, &quick()), Err(Error::EmptyObservables)));
        let not_stab = vec!["XZI".parse().unwrap()];
        assert!(subset_search(&ghz(3), &w3(), &not_stab, 1, Metric::D, &quick()).is_err());
    }

    #[test]
    fn symmetries_of_ghz_vs_cluster() {
        let cands = group_from_generators(&ghz_generators(4)).unwrap().nontrivial();
        assert_eq!(search_symmetries(&ghz(4), &cluster4(), &cands, true).unwrap().len(), 24);
        assert_eq!(search_symmetries(&ghz(4), &cluster4(), &cands, false).unwrap().len(), 8);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:0.3:0.1").unwrap().len(), 4);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn noise_curve_endpoints() {
        let obs = paulis(&["IIZ", "IZI", "ZII"]);
        let pts = noise_curve(&w3(), &ghz(3), &obs, &[0.0, 1.0], &quick()).unwrap();
        assert_abs_diff_eq!(pts[0].f, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(pts[1].f, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pts[1].d, 0.0, epsilon = 1e-9);
        assert!(noise_curve(&w3(), &ghz(3), &obs, &[1.5], &quick()).is_err());
        let csv = noise_curve_csv(&pts).unwrap();
        assert!(csv.starts_with("one_minus_p,F,D\n"));
    }
}
