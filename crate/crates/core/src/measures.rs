//! Relative entropy of outcome distributions and the two discrimination
//! measures evaluated at a fixed `σ`.
//!
//! Logarithms are base 2. Probabilities below [`ZERO_PROB`] are treated as
//! exact zeros, so `0 log(0/q) = 0` and `p log(p/0) = ∞`.

use serde::{Deserialize, Serialize};

use crate::dense::{expectation, outcome_distribution, DenseState, Observable, OutcomeDistribution, ProductBasis};
use crate::error::{Error, Result};
use crate::lu::LocalUnitaryParams;

pub const ZERO_PROB: f64 = 1e-12;
/// Floor applied to `σ` probabilities inside the optimizer surrogate.
pub const SURROGATE_FLOOR: f64 = 1e-300;

/// `Σ p_i log2(p_i / q_i)` with the zero conventions above.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi < ZERO_PROB {
            continue;
        }
        if qi < ZERO_PROB {
            return f64::INFINITY;
        }
        total += pi * (pi / qi).log2();
    }
    total.max(0.0)
}

/// Finite stand-in for [`kl_divergence`] that stays informative near `q_i = 0`.
pub fn kl_surrogate(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi < ZERO_PROB {
            continue;
        }
        total += pi * (pi / qi.max(SURROGATE_FLOOR)).log2();
    }
    total
}

pub fn relative_entropy(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    if p.labels != q.labels {
        return Err(Error::LabelMismatch);
    }
    OutcomeDistribution::new(p.probs.clone(), p.labels.clone())?;
    OutcomeDistribution::new(q.probs.clone(), q.labels.clone())?;
    Ok(kl_divergence(&p.probs, &q.probs))
}

/// Which state fixes the scale of the combined observable in the fidelity-gap
/// measure: its expectation on the target is set to 1.
#[derive(Debug, Clone, PartialEq)]
pub enum Normalization {
    /// The state being discriminated.
    Rho,
    /// An ideal reference state, e.g. the perfect state a noisy or measured `ρ` aims at.
    Reference(DenseState),
    /// Every observable already has expectation 1 on the ideal state
    /// (signed stabilizing operators of it).
    Unit,
}

impl Normalization {
    pub fn name(&self) -> &'static str {
        match self {
            Normalization::Rho => "rho",
            Normalization::Reference(_) => "reference",
            Normalization::Unit => "unit",
        }
    }
}

/// Outcome probabilities and (when defined) expectation values of a list of
/// observables on one state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateStats {
    pub dists: Vec<Vec<f64>>,
    pub expectations: Vec<Option<f64>>,
}

impl StateStats {
    pub fn of_state(obs: &[Observable], s: &DenseState) -> Result<Self> {
        let mut dists = Vec::with_capacity(obs.len());
        let mut expectations = Vec::with_capacity(obs.len());
        for a in obs {
            dists.push(outcome_distribution(a, s)?.probs);
            expectations.push(match a {
                Observable::ProductBasis(_) => None,
                _ => Some(expectation(a, s)?),
            });
        }
        Ok(StateStats { dists, expectations })
    }

    /// Fast path for state vectors; no validation.
    pub fn of_amplitudes(obs: &[Observable], amps: &[num_complex::Complex64]) -> Self {
        let mut dists = Vec::with_capacity(obs.len());
        let mut expectations = Vec::with_capacity(obs.len());
        for a in obs {
            match a {
                Observable::Pauli(p) => {
                    let e = p.expectation(amps).clamp(-1.0, 1.0);
                    dists.push(vec![(1.0 + e) / 2.0, (1.0 - e) / 2.0]);
                    expectations.push(Some(e));
                }
                Observable::Hermitian(h) => {
                    let v = nalgebra::DVector::from_column_slice(amps);
                    let probs = h.projectors().iter().map(|pi| (v.adjoint() * pi * &v)[(0, 0)].re.clamp(0.0, 1.0)).collect();
                    dists.push(probs);
                    expectations.push(Some((v.adjoint() * h.matrix() * &v)[(0, 0)].re));
                }
                Observable::ProductBasis(b) => {
                    dists.push(b.probabilities_pure(amps));
                    expectations.push(None);
                }
            }
        }
        StateStats { dists, expectations }
    }

    /// Stats of a dichotomic observable list known only through expectation values.
    pub fn from_expectations(values: &[f64]) -> Self {
        StateStats {
            dists: values.iter().map(|e| vec![(1.0 + e) / 2.0, (1.0 - e) / 2.0]).collect(),
            expectations: values.iter().map(|&e| Some(e)).collect(),
        }
    }
}

/// A discrimination problem with the `ρ` side fixed: what is measured, what
/// `ρ` produces, and how the fidelity gap is normalized.
#[derive(Debug, Clone)]
pub struct Problem {
    obs: Vec<Observable>,
    labels: Vec<String>,
    shifts: Vec<f64>,
    rho: StateStats,
    /// Per-observable expectation on the normalization target (traceless part).
    targets: Vec<Option<f64>>,
    normalization: &'static str,
}

impl Problem {
    pub fn from_state(rho: &DenseState, obs: &[Observable], normalization: &Normalization) -> Result<Self> {
        let stats = StateStats::of_state(obs, rho)?;
        Self::from_stats(obs, stats, normalization)
    }

    pub fn from_stats(obs: &[Observable], rho: StateStats, normalization: &Normalization) -> Result<Self> {
        if obs.is_empty() {
            return Err(Error::EmptyObservables);
        }
        let n = obs[0].n();
        if let Some(bad) = obs.iter().find(|a| a.n() != n) {
            return Err(Error::LengthMismatch { left: n, right: bad.n() });
        }
        let shifts: Vec<f64> = obs.iter().map(|a| a.trace_per_dim().unwrap_or(0.0)).collect();
        let targets = match normalization {
            Normalization::Rho => rho.expectations.iter().zip(&shifts).map(|(e, s)| e.map(|e| e - s)).collect(),
            Normalization::Reference(ideal) => {
                let ideal = StateStats::of_state(obs, ideal)?;
                ideal.expectations.iter().zip(&shifts).map(|(e, s)| e.map(|e| e - s)).collect()
            }
            Normalization::Unit => obs.iter().map(|a| a.trace_per_dim().ok().map(|_| 1.0)).collect(),
        };
        Ok(Problem {
            labels: obs.iter().map(Observable::label).collect(),
            obs: obs.to_vec(),
            shifts,
            rho,
            targets,
            normalization: normalization.name(),
        })
    }

    pub fn observables(&self) -> &[Observable] {
        &self.obs
    }

    pub fn n(&self) -> usize {
        self.obs[0].n()
    }

    pub fn normalization(&self) -> &'static str {
        self.normalization
    }

    pub fn rho_stats(&self) -> &StateStats {
        &self.rho
    }

    pub fn sigma_stats(&self, amps: &[num_complex::Complex64]) -> StateStats {
        StateStats::of_amplitudes(&self.obs, amps)
    }

    /// Mean relative entropy over the observables.
    pub fn d_value(&self, sigma: &StateStats) -> f64 {
        let k = self.obs.len() as f64;
        self.rho.dists.iter().zip(&sigma.dists).map(|(p, q)| kl_divergence(p, q)).sum::<f64>() / k
    }

    pub fn d_surrogate(&self, sigma: &StateStats) -> f64 {
        let k = self.obs.len() as f64;
        self.rho.dists.iter().zip(&sigma.dists).map(|(p, q)| kl_surrogate(p, q)).sum::<f64>() / k
    }

    fn mean_shifted(&self, stats: &StateStats) -> Result<f64> {
        let mut total = 0.0;
        for (e, s) in stats.expectations.iter().zip(&self.shifts) {
            let e = e.ok_or_else(|| Error::InvalidObservable("a product basis has no expectation value".into()))?;
            total += e - s;
        }
        Ok(total / self.obs.len() as f64)
    }

    /// Expectation of the combined traceless observable on the normalization target.
    pub fn target(&self) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.targets {
            total += t.ok_or_else(|| Error::InvalidObservable("a product basis has no expectation value".into()))?;
        }
        let t = total / self.obs.len() as f64;
        if t.abs() < ZERO_PROB {
            return Err(Error::NoSignal);
        }
        Ok(t)
    }

    /// Normalized `ρ` value of the combined observable (1 when normalizing on `ρ`).
    pub fn rho_level(&self) -> Result<f64> {
        Ok(self.mean_shifted(&self.rho)? / self.target()?)
    }

    /// Normalized `σ` value of the combined observable; the orbit maximum of
    /// this quantity sets the fidelity gap.
    pub fn sigma_level(&self, sigma: &StateStats) -> Result<f64> {
        Ok(self.mean_shifted(sigma)? / self.target()?)
    }

    /// `max(0, level_ρ - level_σ)`.
    pub fn f_value(&self, sigma: &StateStats) -> Result<f64> {
        Ok((self.rho_level()? - self.sigma_level(sigma)?).max(0.0))
    }

    pub fn terms(&self, sigma: &StateStats) -> Vec<ObservableTerm> {
        (0..self.obs.len())
            .map(|i| {
                let er = self.rho.expectations[i];
                let es = sigma.expectations[i];
                let f_gap = match (er, es, self.targets[i]) {
                    (Some(er), Some(es), Some(t)) if t.abs() >= ZERO_PROB => Some(((er - es) / t).max(0.0)),
                    _ => None,
                };
                ObservableTerm {
                    label: self.labels[i].clone(),
                    expectation_rho: er,
                    expectation_sigma: es,
                    f_gap,
                    d: kl_divergence(&self.rho.dists[i], &sigma.dists[i]),
                }
            })
            .collect()
    }
}

/// Serde helpers writing non-finite values as `"inf"`, `"-inf"` or `"nan"`.
pub mod ext_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("not a number: {t}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableTerm {
    pub label: String,
    pub expectation_rho: Option<f64>,
    pub expectation_sigma: Option<f64>,
    /// Gap of this observable alone, normalized on its own target.
    pub f_gap: Option<f64>,
    #[serde(with = "ext_real")]
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    #[serde(with = "ext_real")]
    pub value: f64,
    /// Orbit element of `σ` achieving `value`.
    pub params: LocalUnitaryParams,
    pub terms: Vec<ObservableTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationReport {
    pub f: Option<MeasureResult>,
    pub d: Option<MeasureResult>,
    pub include_permutations: bool,
    pub normalization: String,
}

pub fn d_single(rho: &DenseState, sigma: &DenseState, a: &Observable) -> Result<f64> {
    relative_entropy(&outcome_distribution(a, rho)?, &outcome_distribution(a, sigma)?)
}

pub fn d_multi(rho: &DenseState, sigma: &DenseState, obs: &[Observable]) -> Result<f64> {
    if obs.is_empty() {
        return Err(Error::EmptyObservables);
    }
    let mut total = 0.0;
    for a in obs {
        total += d_single(rho, sigma, a)?;
    }
    Ok(total / obs.len() as f64)
}

/// Fidelity gap at fixed `σ`: `max(0, 1 - <A>_σ)` for the mean of `obs`
/// shifted traceless and scaled to 1 on the normalization target.
pub fn f_gap(rho: &DenseState, sigma: &DenseState, obs: &[Observable], normalization: &Normalization) -> Result<f64> {
    let problem = Problem::from_state(rho, obs, normalization)?;
    problem.f_value(&StateStats::of_state(obs, sigma)?)
}

/// Relative entropy of the two full outcome distributions of one product-basis measurement.
pub fn d_product_basis(rho: &DenseState, sigma: &DenseState, basis: &ProductBasis) -> Result<f64> {
    let a = Observable::ProductBasis(basis.clone());
    d_single(rho, sigma, &a)
}
