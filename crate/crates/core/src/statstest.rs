//! Finite-sample view of the relative-entropy measure: simulated measurement
//! runs, type-class probabilities, and measures computed from measured
//! correlation data.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{outcome_distribution, DenseState, Observable};
use crate::error::{Error, Result};
use crate::lu::LocalUnitaryParams;
use crate::measures::{ext_real, kl_divergence, Normalization, Problem, StateStats};
use crate::optimizer::{max_sigma_level, minimize_d_problem, Metric, OptimizerConfig};
use crate::pauli::PauliString;

/// Counts of one observable measured `total` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRun {
    pub observable: Observable,
    pub outcomes: Vec<String>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl SampleRun {
    pub fn new(observable: Observable, counts: Vec<u64>) -> Result<Self> {
        let outcomes = observable.outcome_labels();
        if outcomes.len() != counts.len() {
            return Err(Error::InvalidDistribution(format!("{} counts for {} outcomes", counts.len(), outcomes.len())));
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("no shots recorded".into()));
        }
        Ok(SampleRun { observable, outcomes, counts, total })
    }

    /// Observed relative frequencies.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }
}

/// Multinomial draw of `shots` outcomes with probabilities `probs`, as a chain of binomials.
pub fn multinomial<R: Rng>(shots: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0; probs.len()];
    let mut left = shots;
    let mut mass: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = Binomial::new(left, q).expect("probability in [0, 1]").sample(rng);
        counts[i] = c;
        left -= c;
        mass -= p;
    }
    counts
}

/// Splits `runs_total` evenly over the observables (`⌊N/k⌋` shots each) and
/// samples each outcome distribution on `state`.
pub fn simulate_runs<R: Rng>(state: &DenseState, obs: &[Observable], runs_total: usize, rng: &mut R) -> Result<Vec<SampleRun>> {
    if obs.is_empty() {
        return Err(Error::EmptyObservables);
    }
    if runs_total < obs.len() {
        return Err(Error::TooFewRuns { runs: runs_total, observables: obs.len() });
    }
    let shots = (runs_total / obs.len()) as u64;
    obs.iter()
        .map(|a| {
            let dist = outcome_distribution(a, state)?;
            SampleRun::new(a.clone(), multinomial(shots, &dist.probs, rng))
        })
        .collect()
}

/// `D(P̃ ‖ Q)` between the observed frequencies and the outcome distribution on `sigma`.
pub fn empirical_d(sample: &SampleRun, sigma: &DenseState) -> Result<f64> {
    let q = outcome_distribution(&sample.observable, sigma)?;
    if q.labels != sample.outcomes {
        return Err(Error::LabelMismatch);
    }
    Ok(kl_divergence(&sample.frequencies(), &q.probs))
}

/// Mean of [`empirical_d`] over several runs.
pub fn empirical_d_multi(samples: &[SampleRun], sigma: &DenseState) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyObservables);
    }
    let mut total = 0.0;
    for s in samples {
        total += empirical_d(s, sigma)?;
    }
    Ok(total / samples.len() as f64)
}

/// `log2` of the probability `2^{-N D}` of mistaking the data for `σ` after
/// `n_runs` runs, and the number of fair-coin tosses with the same chance of
/// all landing tails.
pub fn coin_equivalence(n_runs: u64, d_value: f64) -> (f64, f64) {
    let tosses = if n_runs == 0 { 0.0 } else { n_runs as f64 * d_value };
    (-tosses, tosses)
}

/// One measured correlation `<label> = expectation ± stderr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub label: PauliString,
    pub expectation: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasuredCorrelations {
    records: Vec<CorrelationRecord>,
}

impl MeasuredCorrelations {
    pub fn new(records: Vec<CorrelationRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, r) in records.iter().enumerate() {
            check_record(r, i + 1)?;
            if !seen.insert(r.label.unsigned()) {
                return Err(Error::DuplicateLabel(r.label.to_string()));
            }
            if r.label.n() != records[0].label.n() {
                return Err(Error::LengthMismatch { left: records[0].label.n(), right: r.label.n() });
            }
        }
        Ok(MeasuredCorrelations { records })
    }

    pub fn records(&self) -> &[CorrelationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn observables(&self) -> Vec<Observable> {
        self.records.iter().map(|r| Observable::Pauli(r.label)).collect()
    }

    pub fn expectations(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.expectation).collect()
    }

    /// Exact expectations of `labels` on `state` with a common standard error.
    pub fn from_state(state: &DenseState, labels: &[PauliString], stderr: f64) -> Result<Self> {
        let records = labels
            .iter()
            .map(|&label| {
                let e = crate::dense::expectation(&Observable::Pauli(label), state)?;
                Ok(CorrelationRecord { label, expectation: e.clamp(-1.0, 1.0), stderr })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(records)
    }

    /// `label,expectation,stderr` lines; `#` starts a comment and a leading
    /// `label,...` header is skipped.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "expectation", "stderr"])?;
        for r in &self.records {
            w.write_record([r.label.to_string(), r.expectation.to_string(), r.stderr.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
    }
}

fn check_record(r: &CorrelationRecord, line: usize) -> Result<()> {
    if !r.expectation.is_finite() || r.expectation.abs() > 1.0 {
        return Err(Error::ExpectationRange { line, value: r.expectation });
    }
    if !r.stderr.is_finite() || r.stderr < 0.0 {
        return Err(Error::Malformed { line, msg: format!("stderr {} must be a finite non-negative number", r.stderr) });
    }
    Ok(())
}

pub fn parse_correlations<R: Read>(mut reader: R) -> Result<MeasuredCorrelations> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let row = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(body.as_bytes())
            .records()
            .next()
            .transpose()?
            .unwrap_or_default();
        if records.is_empty() && row.get(0).is_some_and(|f| f.eq_ignore_ascii_case("label")) {
            continue;
        }
        if row.len() != 3 {
            return Err(Error::Malformed { line, msg: format!("expected 3 fields, found {}", row.len()) });
        }
        let label: PauliString = row[0].parse().map_err(|_| Error::Malformed { line, msg: format!("bad Pauli label {:?}", &row[0]) })?;
        let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| Error::Malformed { line, msg: format!("bad {what} {s:?}") });
        let r = CorrelationRecord { label, expectation: num(&row[1], "expectation")?, stderr: num(&row[2], "stderr")? };
        check_record(&r, line)?;
        if !seen.insert(label.unsigned()) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        records.push(r);
    }
    MeasuredCorrelations::new(records)
}

pub fn ingest_correlations(path: impl AsRef<Path>) -> Result<MeasuredCorrelations> {
    parse_correlations(std::fs::File::open(path)?)
}

/// A measure computed from correlation data, with its Monte-Carlo spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub metric: Metric,
    #[serde(with = "ext_real")]
    pub value: f64,
    /// Standard deviation over the resamples; `None` when none were drawn.
    pub uncertainty: Option<f64>,
    pub params: LocalUnitaryParams,
    pub mc_samples: usize,
}

fn std_dev(values: &[f64]) -> f64 {
    if values.iter().any(|v| v.is_infinite()) {
        return f64::INFINITY;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Orbit-optimized `metric` with `ρ` known only through `data`. Each record
/// contributes the outcome probabilities `(1 ± e)/2`. The uncertainty is the
/// spread over `mc_samples` resamples that redraw every expectation from
/// `normal(e, stderr)` clamped to `[-1, 1]`; resampled relative entropies are
/// re-minimized locally from the point-estimate minimizer.
pub fn measures_from_correlations(
    data: &MeasuredCorrelations,
    sigma: &DenseState,
    metric: Metric,
    normalization: &Normalization,
    cfg: &OptimizerConfig,
    mc_samples: usize,
) -> Result<CorrelationEstimate> {
    if data.is_empty() {
        return Err(Error::EmptyObservables);
    }
    if mc_samples == 1 {
        return Err(Error::InvalidConfig("at least two resamples are needed for a spread".into()));
    }
    let obs = data.observables();
    let problem = Problem::from_stats(&obs, StateStats::from_expectations(&data.expectations()), normalization)?;

    let (value, params, level) = match metric {
        Metric::F => {
            let best = max_sigma_level(&problem, sigma, cfg, &[])?;
            ((problem.rho_level()? - best.value).max(0.0), best.params, best.value)
        }
        Metric::D => {
            let r = minimize_d_problem(&problem, sigma, cfg, &[])?;
            (r.value, r.params, f64::NAN)
        }
    };

    let uncertainty = if mc_samples == 0 {
        None
    } else if data.records().iter().all(|r| r.stderr == 0.0) {
        Some(0.0)
    } else {
        let local = OptimizerConfig { restarts: 1, ..cfg.clone() };
        let values = (0..mc_samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(1 + i as u64);
                let e: Vec<f64> = data
                    .records()
                    .iter()
                    .map(|r| {
                        if r.stderr == 0.0 {
                            r.expectation
                        } else {
                            Normal::new(r.expectation, r.stderr).expect("finite stderr").sample(&mut rng).clamp(-1.0, 1.0)
                        }
                    })
                    .collect();
                let p = Problem::from_stats(&obs, StateStats::from_expectations(&e), normalization)?;
                match metric {
                    Metric::F => Ok((p.rho_level()? - level).max(0.0)),
                    Metric::D => Ok(minimize_d_problem(&p, sigma, &local, std::slice::from_ref(&params))?.value),
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Some(std_dev(&values))
    };
    Ok(CorrelationEstimate { metric, value, uncertainty, params, mc_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{cluster4, ghz, w3};
    use crate::measures::d_single;
    use approx::assert_abs_diff_eq;

    fn pauli(s: &str) -> Observable {
        Observable::Pauli(s.parse().unwrap())
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn eigenstate_runs_are_deterministic() {
        let runs = simulate_runs(&ghz(4), &[pauli("ZZZZ")], 100, &mut rng(1)).unwrap();
        assert_eq!(runs[0].counts, vec![100, 0]);
        assert_eq!(runs[0].total, 100);
    }

    #[test]
    fn shots_split_evenly() {
        let runs = simulate_runs(&w3(), &[pauli("IIZ"), pauli("ZII"), pauli("XXX")], 100, &mut rng(2)).unwrap();
        assert!(runs.iter().all(|r| r.total == 33));
        assert!(matches!(simulate_runs(&w3(), &[pauli("IIZ"), pauli("ZII")], 1, &mut rng(2)), Err(Error::TooFewRuns { .. })));
    }

    #[test]
    fn frequencies_converge() {
        let mixed = DenseState::maximally_mixed(4).unwrap();
        let runs = simulate_runs(&mixed, &[pauli("ZZZZ")], 200_000, &mut rng(3)).unwrap();
        assert!((runs[0].frequencies()[0] - 0.5).abs() < 0.01);
        let runs = simulate_runs(&w3(), &[pauli("IIZ")], 200_000, &mut rng(4)).unwrap();
        assert!((runs[0].frequencies()[0] - 2.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn seeded_sampling_repeats() {
        let obs = [pauli("IIZ"), pauli("XXX")];
        let a = simulate_runs(&w3(), &obs, 500, &mut rng(9)).unwrap();
        let b = simulate_runs(&w3(), &obs, 500, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn multinomial_sums() {
        let c = multinomial(1000, &[0.2, 0.0, 0.5, 0.3], &mut rng(5));
        assert_eq!(c.iter().sum::<u64>(), 1000);
        assert_eq!(c[1], 0);
    }

    #[test]
    fn empirical_d_examples() {
        let exact = SampleRun::new(pauli("Z"), vec![50, 50]).unwrap();
        let plus = DenseState::pure_real(&[std::f64::consts::FRAC_1_SQRT_2; 2]).unwrap();
        assert_eq!(empirical_d(&exact, &plus).unwrap(), 0.0);
        let heads = SampleRun::new(pauli("Z"), vec![40, 0]).unwrap();
        assert_abs_diff_eq!(empirical_d(&heads, &plus).unwrap(), 1.0, epsilon = 1e-15);
        let skew = SampleRun::new(pauli("Z"), vec![200, 100]).unwrap();
        assert_abs_diff_eq!(empirical_d(&skew, &plus).unwrap(), 0.0817, epsilon = 1e-4);
    }

    #[test]
    fn empirical_d_vanishes_on_own_state() {
        let obs = [pauli("IIZ"), pauli("XXX"), pauli("ZZI")];
        let runs = simulate_runs(&w3(), &obs, 300_000, &mut rng(6)).unwrap();
        assert!(empirical_d_multi(&runs, &w3()).unwrap() < 1e-3);
    }

    #[test]
    fn coin_examples() {
        assert_eq!(coin_equivalence(100, 1.0), (-100.0, 100.0));
        assert_eq!(coin_equivalence(50, 0.0), (-0.0, 0.0));
        let (lp, t) = coin_equivalence(30, 0.4880);
        assert_abs_diff_eq!(lp, -14.64, epsilon = 1e-12);
        assert_abs_diff_eq!(t, 14.64, epsilon = 1e-12);
    }

    #[test]
    fn sample_run_json() {
        let r = SampleRun::new(pauli("-XYZ"), vec![3, 4]).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: SampleRun = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_parsing() {
        let data = parse_correlations("# lab run 3\nlabel,expectation,stderr\nZZZZ,0.93,0.02\n-XXYY, 0.5 ,0\n".as_bytes()).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.records()[1].label.to_string(), "-XXYY");
        let one = parse_correlations("ZZZZ,0.93,0.02".as_bytes()).unwrap();
        assert_eq!(one.records()[0], CorrelationRecord { label: "ZZZZ".parse().unwrap(), expectation: 0.93, stderr: 0.02 });
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(parse_correlations("ZZZZ,1.40,0.02".as_bytes()), Err(Error::ExpectationRange { line: 1, .. })));
        assert!(matches!(parse_correlations("ZZZZ,0.1,0.02\nZZZZ,0.2,0.0".as_bytes()), Err(Error::DuplicateLabel(_))));
        assert!(matches!(parse_correlations("# c\nZZQZ,0.1,0.02".as_bytes()), Err(Error::Malformed { line: 2, .. })));
        assert!(matches!(parse_correlations("ZZZZ,0.1".as_bytes()), Err(Error::Malformed { .. })));
        assert!(matches!(parse_correlations("ZZZZ,0.1,-1".as_bytes()), Err(Error::Malformed { .. })));
        let empty = parse_correlations("".as_bytes()).unwrap();
        assert!(empty.is_empty());
        let cfg = OptimizerConfig { restarts: 2, ..OptimizerConfig::default() };
        assert!(matches!(
            measures_from_correlations(&empty, &ghz(4), Metric::D, &Normalization::Unit, &cfg, 0),
            Err(Error::EmptyObservables)
        ));
    }

    #[test]
    fn csv_round_trip() {
        let labels: Vec<PauliString> = ["XZII", "ZXZI"].iter().map(|s| s.parse().unwrap()).collect();
        let data = MeasuredCorrelations::from_state(&cluster4(), &labels, 0.01).unwrap();
        let back = parse_correlations(data.to_csv().unwrap().as_bytes()).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn dichotomic_reconstruction_matches_dense() {
        let rho = crate::dense::white_noise(&w3(), 0.7).unwrap();
        let sigma = ghz(3);
        for w in ["IIZ", "XXI", "ZYX", "-XYY"] {
            let a = pauli(w);
            let e = crate::dense::expectation(&a, &rho).unwrap();
            let q = outcome_distribution(&a, &sigma).unwrap();
            let via = kl_divergence(&[(1.0 + e) / 2.0, (1.0 - e) / 2.0], &q.probs);
            let dense = d_single(&rho, &sigma, &a).unwrap();
            if dense.is_finite() {
                assert_abs_diff_eq!(via, dense, epsilon = 1e-10);
            } else {
                assert_eq!(via, dense);
            }
        }
    }

    #[test]
    fn zero_stderr_has_zero_spread() {
        let labels: Vec<PauliString> = ["IIZ", "IZI", "ZII"].iter().map(|s| s.parse().unwrap()).collect();
        let data = MeasuredCorrelations::from_state(&w3(), &labels, 0.0).unwrap();
        let cfg = OptimizerConfig { restarts: 4, ..OptimizerConfig::default() };
        let est = measures_from_correlations(&data, &ghz(3), Metric::F, &Normalization::Rho, &cfg, 50).unwrap();
        assert_eq!(est.uncertainty, Some(0.0));
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn noisy_data_has_spread() {
        let labels: Vec<PauliString> = ["IIZ", "IZI", "ZII"].iter().map(|s| s.parse().unwrap()).collect();
        let data = MeasuredCorrelations::from_state(&w3(), &labels, 0.02).unwrap();
        let cfg = OptimizerConfig { restarts: 4, ..OptimizerConfig::default() };
        let ideal = Normalization::Reference(w3());
        let f = measures_from_correlations(&data, &ghz(3), Metric::F, &ideal, &cfg, 200).unwrap();
        let u = f.uncertainty.unwrap();
        // Mean of three readings with stderr 0.02, scaled by 3: about 0.035.
        assert!(u > 0.02 && u < 0.06, "{u}");
        let d = measures_from_correlations(&data, &ghz(3), Metric::D, &ideal, &cfg, 50).unwrap();
        assert!(d.uncertainty.unwrap() > 0.0);
        let again = measures_from_correlations(&data, &ghz(3), Metric::D, &ideal, &cfg, 50).unwrap();
        assert_eq!(d, again);
    }
}
