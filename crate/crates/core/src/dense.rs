//! Dense state vectors and density matrices for a handful of qubits.
//!
//! Everything here is exact linear algebra on `2^n`-dimensional arrays and is
//! used both directly and as the reference the optimizers are checked against.
//! Qubit indices are 0-based; qubit 0 is the most significant bit of a basis
//! index.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub const MAX_DENSE_QUBITS: usize = 6;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
/// Eigenvalues closer than this belong to the same measurement outcome.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Two states count as identical when their overlap exceeds `1 - DISTINCT_TOL`.
pub const DISTINCT_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_cap(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::QubitCap { n, cap: MAX_DENSE_QUBITS });
    }
    Ok(())
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    check_cap(n)?;
    Ok(n)
}

/// Rotates `amps` so that the first nonzero amplitude is real and positive.
fn fix_global_phase(amps: &mut [Complex64]) {
    if let Some(a) = amps.iter().find(|a| a.norm() > NORM_TOL) {
        let rot = a.conj() / a.norm();
        for v in amps.iter_mut() {
            *v *= rot;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(Vec<Complex64>),
    Mixed(DMatrix<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    data: StateData,
}

impl DenseState {
    /// Pure state from unit-norm amplitudes. The global phase is fixed so the
    /// first nonzero amplitude is real and positive.
    pub fn pure(mut amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_dim(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        fix_global_phase(&mut amps);
        Ok(DenseState { n, data: StateData::Pure(amps) })
    }

    /// Pure state from any nonzero vector, rescaled to unit norm.
    pub fn pure_normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < NORM_TOL {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for a in amps.iter_mut() {
            *a /= norm;
        }
        Self::pure(amps)
    }

    pub fn pure_real(amps: &[f64]) -> Result<Self> {
        Self::pure(amps.iter().map(|&a| c(a)).collect())
    }

    pub fn mixed(rho: DMatrix<Complex64>) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::InvalidState("density matrix is not square".into()));
        }
        let n = qubits_for_dim(rho.nrows())?;
        let herm_err = (&rho - rho.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if herm_err > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm_err:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_eig = rho.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(DenseState { n, data: StateData::Mixed(rho) })
    }

    /// Computational basis state `|index>` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_cap(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} out of range")));
        }
        let mut amps = vec![c(0.0); dim];
        amps[index] = c(1.0);
        Self::pure(amps)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_cap(n)?;
        let dim = 1usize << n;
        Self::mixed(DMatrix::identity(dim, dim) * c(1.0 / dim as f64))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.data {
            StateData::Pure(a) => Some(a),
            StateData::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        match &self.data {
            StateData::Pure(a) => {
                let v = DVector::from_column_slice(a);
                &v * v.adjoint()
            }
            StateData::Mixed(m) => m.clone(),
        }
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        match &self.data {
            StateData::Pure(_) => 1.0,
            StateData::Mixed(m) => (m * m).trace().re,
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dim });
        }
        Ok(())
    }
}

/// Basis index map for [`permute_qubits`]: qubit `k` of the result is qubit
/// `perm[k]` of the source, so result index `j` reads source index `source_index(j)`.
pub(crate) fn source_index(j: usize, perm: &[usize]) -> usize {
    let n = perm.len();
    let mut out = 0;
    for (k, &src) in perm.iter().enumerate() {
        if j >> (n - 1 - k) & 1 == 1 {
            out |= 1 << (n - 1 - src);
        }
    }
    out
}

pub(crate) fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Qubit `k` of the result carries qubit `perm[k]` of `s` (0-based).
pub fn permute_qubits(s: &DenseState, perm: &[usize]) -> Result<DenseState> {
    check_perm(perm, s.n)?;
    let dim = s.dim();
    let map: Vec<usize> = (0..dim).map(|j| source_index(j, perm)).collect();
    let data = match &s.data {
        StateData::Pure(a) => {
            let mut out: Vec<Complex64> = map.iter().map(|&src| a[src]).collect();
            fix_global_phase(&mut out);
            StateData::Pure(out)
        }
        StateData::Mixed(m) => StateData::Mixed(DMatrix::from_fn(dim, dim, |i, j| m[(map[i], map[j])])),
    };
    Ok(DenseState { n: s.n, data })
}

/// One representative per distinct permuted copy of a pure state, in
/// lexicographic order of the permutations (identity first).
pub fn distinct_permutations(s: &DenseState) -> Result<Vec<(Vec<usize>, DenseState)>> {
    if !s.is_pure() {
        return Err(Error::NotPure);
    }
    let mut reps: Vec<(Vec<usize>, DenseState)> = Vec::new();
    for perm in (0..s.n).permutations(s.n) {
        let t = permute_qubits(s, &perm)?;
        let mut fresh = true;
        for (_, r) in &reps {
            if overlap(r, &t)? > 1.0 - DISTINCT_TOL {
                fresh = false;
                break;
            }
        }
        if fresh {
            reps.push((perm, t));
        }
    }
    Ok(reps)
}

/// `|<a|b>|^2` for pure states.
pub fn overlap(a: &DenseState, b: &DenseState) -> Result<f64> {
    let (Some(x), Some(y)) = (a.amplitudes(), b.amplitudes()) else {
        return Err(Error::NotPure);
    };
    a.check_dim(y.len())?;
    let ip: Complex64 = x.iter().zip(y).map(|(u, v)| u.conj() * v).sum();
    Ok(ip.norm_sqr())
}

/// `(1 - p) I/d + p rho`.
pub fn white_noise(s: &DenseState, p: f64) -> Result<DenseState> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::NoiseOutOfRange(p));
    }
    let dim = s.dim();
    let rho = s.density_matrix() * c(p) + DMatrix::identity(dim, dim) * c((1.0 - p) / dim as f64);
    Ok(DenseState { n: s.n, data: StateData::Mixed(rho) })
}

/// Tensor-product measurement basis. Qubit `k` is measured in the orthonormal
/// basis given by the columns of `qubit_bases[k]`; outcomes are ordered like
/// computational basis indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBasis {
    qubit_bases: Vec<Matrix2<Complex64>>,
}

impl ProductBasis {
    pub fn computational(n: usize) -> Result<Self> {
        check_cap(n)?;
        Ok(ProductBasis { qubit_bases: vec![Matrix2::identity(); n] })
    }

    pub fn from_qubit_bases(qubit_bases: Vec<Matrix2<Complex64>>) -> Result<Self> {
        check_cap(qubit_bases.len())?;
        for (k, b) in qubit_bases.iter().enumerate() {
            let err = (b.adjoint() * b - Matrix2::identity()).iter().map(|v| v.norm()).fold(0.0, f64::max);
            if err > HERMITIAN_TOL {
                return Err(Error::InvalidObservable(format!("basis of qubit {k} is not orthonormal")));
            }
        }
        Ok(ProductBasis { qubit_bases })
    }

    pub fn n(&self) -> usize {
        self.qubit_bases.len()
    }

    pub fn qubit_bases(&self) -> &[Matrix2<Complex64>] {
        &self.qubit_bases
    }

    /// Basis vector for outcome `index`.
    pub fn vector(&self, index: usize) -> Vec<Complex64> {
        let n = self.n();
        let mut v = vec![c(1.0)];
        for (k, b) in self.qubit_bases.iter().enumerate() {
            let bit = index >> (n - 1 - k) & 1;
            let col = [b[(0, bit)], b[(1, bit)]];
            v = v.iter().flat_map(|a| [a * col[0], a * col[1]]).collect();
        }
        v
    }

    pub fn labels(&self) -> Vec<String> {
        let n = self.n();
        (0..1usize << n).map(|i| format!("{i:0n$b}")).collect()
    }

    /// Outcome probabilities `|<e_i|psi>|^2` for a state vector.
    pub fn probabilities_pure(&self, amps: &[Complex64]) -> Vec<f64> {
        // Rotate into the measurement basis qubit by qubit: apply B_k^dagger.
        let mut v = amps.to_vec();
        for (k, b) in self.qubit_bases.iter().enumerate() {
            apply_single_qubit(&mut v, self.n(), k, &b.adjoint());
        }
        v.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Applies the 2x2 matrix `u` to qubit `k` of the vector in place.
pub(crate) fn apply_single_qubit(v: &mut [Complex64], n: usize, k: usize, u: &Matrix2<Complex64>) {
    let stride = 1usize << (n - 1 - k);
    for base in 0..v.len() {
        if base & stride != 0 {
            continue;
        }
        let a0 = v[base];
        let a1 = v[base | stride];
        v[base] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
        v[base | stride] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
    }
}

/// Dense Hermitian observable with its spectral decomposition precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    matrix: DMatrix<Complex64>,
    eigenvalues: Vec<f64>,
    projectors: Vec<DMatrix<Complex64>>,
}

impl HermitianObservable {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidObservable("matrix is not square".into()));
        }
        qubits_for_dim(matrix.nrows())?;
        let herm_err = (&matrix - matrix.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if herm_err > HERMITIAN_TOL {
            return Err(Error::InvalidObservable(format!("not Hermitian (error {herm_err:e})")));
        }
        let eig = matrix.clone().symmetric_eigen();
        let dim = matrix.nrows();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut projectors: Vec<DMatrix<Complex64>> = Vec::new();
        for i in order {
            let lambda = eig.eigenvalues[i];
            let v = eig.eigenvectors.column(i);
            let piece = v * v.adjoint();
            match eigenvalues.last() {
                Some(&last) if (last - lambda).abs() < DEGENERACY_TOL => {
                    *projectors.last_mut().unwrap() += piece;
                }
                _ => {
                    eigenvalues.push(lambda);
                    projectors.push(piece);
                }
            }
        }
        Ok(HermitianObservable { matrix, eigenvalues, projectors })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Distinct eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[DMatrix<Complex64>] {
        &self.projectors
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Pauli(PauliString),
    Hermitian(HermitianObservable),
    ProductBasis(ProductBasis),
}

impl Observable {
    pub fn n(&self) -> usize {
        match self {
            Observable::Pauli(p) => p.n(),
            Observable::Hermitian(h) => h.n(),
            Observable::ProductBasis(b) => b.n(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Observable::Pauli(p) => p.to_string(),
            Observable::Hermitian(h) => format!("hermitian[{}]", h.eigenvalues.len()),
            Observable::ProductBasis(b) => format!("product-basis[{}]", b.n()),
        }
    }

    pub fn as_pauli(&self) -> Option<&PauliString> {
        match self {
            Observable::Pauli(p) => Some(p),
            _ => None,
        }
    }

    /// Labels of the outcomes reported by [`outcome_distribution`].
    pub fn outcome_labels(&self) -> Vec<String> {
        match self {
            Observable::Pauli(_) => vec!["+1".into(), "-1".into()],
            Observable::Hermitian(h) => h.eigenvalues.iter().map(|e| format!("{e:.8}")).collect(),
            Observable::ProductBasis(b) => b.labels(),
        }
    }

    /// `tr(A)/d`, the shift that makes the observable traceless.
    pub fn trace_per_dim(&self) -> Result<f64> {
        match self {
            Observable::Pauli(p) => Ok(if p.is_identity() { p.sign() } else { 0.0 }),
            Observable::Hermitian(h) => Ok(h.matrix.trace().re / h.matrix.nrows() as f64),
            Observable::ProductBasis(_) => {
                Err(Error::InvalidObservable("a product basis has no expectation value".into()))
            }
        }
    }
}

impl From<PauliString> for Observable {
    fn from(p: PauliString) -> Self {
        Observable::Pauli(p)
    }
}

type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ObservableRepr {
    Pauli(PauliString),
    Hermitian(ComplexRows),
    /// One 2x2 basis matrix per qubit, columns are the basis vectors.
    ProductBasis(Vec<ComplexRows>),
}

fn rows_of(m: impl Fn(usize, usize) -> Complex64, dim: usize) -> ComplexRows {
    (0..dim).map(|i| (0..dim).map(|j| [m(i, j).re, m(i, j).im]).collect()).collect()
}

fn matrix_of(rows: &ComplexRows) -> Result<DMatrix<Complex64>> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidObservable("matrix is not square".into()));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Observable::Pauli(p) => ObservableRepr::Pauli(*p),
            Observable::Hermitian(h) => ObservableRepr::Hermitian(rows_of(|i, j| h.matrix[(i, j)], h.matrix.nrows())),
            Observable::ProductBasis(b) => {
                ObservableRepr::ProductBasis(b.qubit_bases.iter().map(|m| rows_of(|i, j| m[(i, j)], 2)).collect())
            }
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let parsed = match ObservableRepr::deserialize(d)? {
            ObservableRepr::Pauli(p) => Ok(Observable::Pauli(p)),
            ObservableRepr::Hermitian(rows) => matrix_of(&rows).and_then(HermitianObservable::new).map(Observable::Hermitian),
            ObservableRepr::ProductBasis(qubits) => qubits
                .iter()
                .map(|rows| {
                    let m = matrix_of(rows)?;
                    if m.nrows() != 2 {
                        return Err(Error::InvalidObservable("qubit basis must be 2x2".into()));
                    }
                    Ok(Matrix2::from_fn(|i, j| m[(i, j)]))
                })
                .collect::<Result<Vec<_>>>()
                .and_then(ProductBasis::from_qubit_bases)
                .map(Observable::ProductBasis),
        };
        parsed.map_err(D::Error::custom)
    }
}

/// Probabilities of the outcomes of a measurement, with outcome labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub probs: Vec<f64>,
    pub labels: Vec<String>,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if probs.len() != labels.len() || probs.is_empty() {
            return Err(Error::InvalidDistribution("probabilities and labels differ in length".into()));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidDistribution("negative or NaN probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(OutcomeDistribution { probs, labels })
    }

    /// Two-outcome distribution `{(1+e)/2, (1-e)/2}` of a dichotomic observable.
    pub fn dichotomic(e: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&e) {
            return Err(Error::InvalidDistribution(format!("expectation {e} outside [-1, 1]")));
        }
        Self::new(vec![(1.0 + e) / 2.0, (1.0 - e) / 2.0], vec!["+1".into(), "-1".into()])
    }
}

/// `tr(A rho)` with the (numerically tiny) imaginary part dropped.
pub fn expectation(a: &Observable, s: &DenseState) -> Result<f64> {
    s.check_dim(1 << a.n())?;
    match (a, &s.data) {
        (Observable::Pauli(p), StateData::Pure(v)) => Ok(p.expectation(v)),
        (Observable::Pauli(p), StateData::Mixed(m)) => {
            let mut acc = c(0.0);
            for j in 0..s.dim() {
                let (i, v) = p.column_entry(j);
                acc += m[(j, i)] * v;
            }
            Ok(acc.re)
        }
        (Observable::Hermitian(h), StateData::Pure(v)) => {
            let v = DVector::from_column_slice(v);
            Ok((v.adjoint() * &h.matrix * &v)[(0, 0)].re)
        }
        (Observable::Hermitian(h), StateData::Mixed(m)) => Ok((&h.matrix * m).trace().re),
        (Observable::ProductBasis(_), _) => {
            Err(Error::InvalidObservable("a product basis has no expectation value".into()))
        }
    }
}

fn clean_probs(mut probs: Vec<f64>) -> Vec<f64> {
    for p in probs.iter_mut() {
        *p = p.clamp(0.0, 1.0);
    }
    probs
}

/// Outcome probabilities `p_i = tr(rho Pi_i)` over the distinct eigenspaces of `a`.
pub fn outcome_distribution(a: &Observable, s: &DenseState) -> Result<OutcomeDistribution> {
    s.check_dim(1 << a.n())?;
    let probs = match a {
        Observable::Pauli(_) => {
            let e = expectation(a, s)?.clamp(-1.0, 1.0);
            vec![(1.0 + e) / 2.0, (1.0 - e) / 2.0]
        }
        Observable::Hermitian(h) => {
            let rho = s.density_matrix();
            h.projectors.iter().map(|pi| (pi * &rho).trace().re).collect()
        }
        Observable::ProductBasis(b) => match &s.data {
            StateData::Pure(v) => b.probabilities_pure(v),
            StateData::Mixed(m) => (0..s.dim())
                .map(|i| {
                    let e = DVector::from_vec(b.vector(i));
                    (e.adjoint() * m * &e)[(0, 0)].re
                })
                .collect(),
        },
    };
    OutcomeDistribution::new(clean_probs(probs), a.outcome_labels())
}

/// Every signed Pauli word with expectation `+1` on a pure state, identity first.
/// A state on `n` qubits is a stabilizer state iff this list has `2^n` entries.
pub fn stabilizing_words(s: &DenseState) -> Result<Vec<PauliString>> {
    let Some(amps) = s.amplitudes() else {
        return Err(Error::NotPure);
    };
    let n = s.n;
    let mut out = Vec::new();
    for x in 0..1u64 << n {
        for z in 0..1u64 << n {
            let p = PauliString::from_masks(n, x, z, false);
            let e = p.expectation(amps);
            if (e - 1.0).abs() < 1e-9 {
                out.push(p);
            } else if (e + 1.0).abs() < 1e-9 {
                out.push(p.negated());
            }
        }
    }
    Ok(out)
}

/// `(|0...0> + |1...1>)/sqrt(2)`.
pub fn ghz(n: usize) -> DenseState {
    let mut amps = vec![0.0; 1 << n];
    amps[0] = std::f64::consts::FRAC_1_SQRT_2;
    amps[(1 << n) - 1] = std::f64::consts::FRAC_1_SQRT_2;
    DenseState::pure_real(&amps).expect("valid GHZ state")
}

/// Four-qubit linear cluster state `(|0000> + |0011> + |1100> - |1111>)/2`.
pub fn cluster4() -> DenseState {
    let mut amps = vec![0.0; 16];
    amps[0b0000] = 0.5;
    amps[0b0011] = 0.5;
    amps[0b1100] = 0.5;
    amps[0b1111] = -0.5;
    DenseState::pure_real(&amps).expect("valid cluster state")
}

/// `(|001> + |010> + |100>)/sqrt(3)`.
pub fn w3() -> DenseState {
    let a = 1.0 / 3f64.sqrt();
    DenseState::pure_real(&[0.0, a, a, 0.0, a, 0.0, 0.0, 0.0]).expect("valid W state")
}

/// The LU image of the W state with maximal GHZ overlap, `(3,-1,...,-1,3)/(2 sqrt 6)`.
pub fn what_w3() -> DenseState {
    let s = 1.0 / (2.0 * 6f64.sqrt());
    let amps: Vec<f64> = [3.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0, 3.0].iter().map(|a| a * s).collect();
    DenseState::pure_real(&amps).expect("valid state")
}

/// Names accepted by [`builtin_state`].
pub const BUILTIN_STATES: [&str; 5] = ["ghz3", "ghz4", "w3", "what_w3", "cluster4"];

pub fn builtin_state(name: &str) -> Option<DenseState> {
    match name {
        "ghz3" => Some(ghz(3)),
        "ghz4" => Some(ghz(4)),
        "w3" => Some(w3()),
        "what_w3" => Some(what_w3()),
        "cluster4" => Some(cluster4()),
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    n: usize,
    kind: String,
    data: serde_json::Value,
}

fn parse_complex(v: &serde_json::Value) -> Result<Complex64> {
    let pair: [f64; 2] = serde_json::from_value(v.clone())
        .map_err(|_| Error::InvalidState(format!("expected [re, im], got {v}")))?;
    Ok(Complex64::new(pair[0], pair[1]))
}

impl DenseState {
    /// Parses `{"n": .., "kind": "pure"|"mixed", "data": [[re, im], ...]}`.
    /// Pure amplitudes are renormalized when within `1e-6` of unit norm.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: StateFile = serde_json::from_str(text)?;
        check_cap(f.n)?;
        let dim = 1usize << f.n;
        let rows = f.data.as_array().ok_or_else(|| Error::InvalidState("data is not an array".into()))?;
        if rows.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
        }
        match f.kind.as_str() {
            "pure" => {
                let amps = rows.iter().map(parse_complex).collect::<Result<Vec<_>>>()?;
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-6 {
                    return Err(Error::InvalidState(format!("norm {norm} is not 1")));
                }
                Self::pure_normalized(amps)
            }
            "mixed" => {
                let mut m = DMatrix::zeros(dim, dim);
                for (i, row) in rows.iter().enumerate() {
                    let row = row.as_array().ok_or_else(|| Error::InvalidState("row is not an array".into()))?;
                    if row.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
                    }
                    for (j, v) in row.iter().enumerate() {
                        m[(i, j)] = parse_complex(v)?;
                    }
                }
                Self::mixed(m)
            }
            other => Err(Error::InvalidState(format!("unknown kind {other:?}"))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pair = |a: &Complex64| serde_json::json!([a.re, a.im]);
        match &self.data {
            StateData::Pure(v) => serde_json::json!({
                "n": self.n, "kind": "pure", "data": v.iter().map(pair).collect::<Vec<_>>()
            }),
            StateData::Mixed(m) => serde_json::json!({
                "n": self.n,
                "kind": "mixed",
                "data": (0..self.dim())
                    .map(|i| (0..self.dim()).map(|j| pair(&m[(i, j)])).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli(s: &str) -> Observable {
        Observable::Pauli(s.parse().unwrap())
    }

    fn close_states(a: &DenseState, b: &DenseState) -> bool {
        overlap(a, b).unwrap() > 1.0 - 1e-12
    }

    #[test]
    fn expectation_examples() {
        assert_abs_diff_eq!(expectation(&pauli("IIZ"), &w3()).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(expectation(&pauli("ZZZZ"), &ghz(4)).unwrap(), 1.0, epsilon = 1e-14);
        let zero = DenseState::basis(1, 0).unwrap();
        assert_abs_diff_eq!(expectation(&pauli("X"), &zero).unwrap(), 0.0);
        assert!(matches!(
            expectation(&pauli("XX"), &zero),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn outcome_distribution_examples() {
        let d = outcome_distribution(&pauli("IIZ"), &w3()).unwrap();
        assert_abs_diff_eq!(d.probs[0], 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.probs[1], 1.0 / 3.0, epsilon = 1e-14);

        let comp = Observable::ProductBasis(ProductBasis::computational(4).unwrap());
        let d = outcome_distribution(&comp, &ghz(4)).unwrap();
        for (i, p) in d.probs.iter().enumerate() {
            let want = if i == 0 || i == 15 { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(*p, want, epsilon = 1e-14);
        }
        assert_eq!(d.labels[15], "1111");

        let zero = DenseState::basis(1, 0).unwrap();
        assert_eq!(outcome_distribution(&pauli("Z"), &zero).unwrap().probs, vec![1.0, 0.0]);
    }

    #[test]
    fn overlap_examples() {
        assert_abs_diff_eq!(overlap(&ghz(4), &ghz(4)).unwrap(), 1.0, epsilon = 1e-14);
        let zero4 = DenseState::basis(4, 0).unwrap();
        assert_abs_diff_eq!(overlap(&zero4, &cluster4()).unwrap(), 0.25, epsilon = 1e-14);
        // The |0000> and |1111> contributions cancel.
        assert_abs_diff_eq!(overlap(&ghz(4), &cluster4()).unwrap(), 0.0, epsilon = 1e-14);
        let mixed = DenseState::maximally_mixed(4).unwrap();
        assert!(matches!(overlap(&mixed, &ghz(4)), Err(Error::NotPure)));
    }

    #[test]
    fn white_noise_examples() {
        let g = ghz(4);
        let same = white_noise(&g, 1.0).unwrap();
        assert!((same.density_matrix() - g.density_matrix()).norm() < 1e-14);
        let flat = white_noise(&g, 0.0).unwrap();
        assert!((flat.density_matrix() - DMatrix::identity(16, 16) * c(1.0 / 16.0)).norm() < 1e-14);
        let half = white_noise(&g, 0.5).unwrap();
        assert_abs_diff_eq!(expectation(&pauli("ZZZZ"), &half).unwrap(), 0.5, epsilon = 1e-14);
        assert!(matches!(white_noise(&g, 1.5), Err(Error::NoiseOutOfRange(_))));
        assert!(white_noise(&g, -0.1).is_err());
    }

    #[test]
    fn permutation_examples() {
        let c4 = cluster4();
        assert!(close_states(&permute_qubits(&c4, &[0, 1, 2, 3]).unwrap(), &c4));

        let half = |idx: [usize; 3]| {
            let mut a = vec![0.0; 16];
            a[0] = 0.5;
            a[idx[0]] = 0.5;
            a[idx[1]] = 0.5;
            a[idx[2]] = -0.5;
            DenseState::pure_real(&a).unwrap()
        };
        let c2 = half([0b0110, 0b1001, 0b1111]);
        let c3 = half([0b0101, 0b1010, 0b1111]);
        // Swapping the middle qubits pairs 1-3 and 2-4.
        assert!(close_states(&permute_qubits(&c4, &[0, 2, 1, 3]).unwrap(), &c3));
        // Swapping qubits 1 and 3 pairs 1-4 and 2-3.
        assert!(close_states(&permute_qubits(&c4, &[2, 1, 0, 3]).unwrap(), &c2));

        let g = ghz(4);
        for perm in (0..4).permutations(4) {
            assert!(close_states(&permute_qubits(&g, &perm).unwrap(), &g));
        }
        assert!(permute_qubits(&g, &[0, 0, 1, 2]).is_err());
        assert!(permute_qubits(&g, &[0, 1, 2]).is_err());
    }

    #[test]
    fn permutation_matches_pauli_relabeling() {
        let c4 = cluster4();
        let perm = [2, 0, 3, 1];
        let moved = permute_qubits(&c4, &perm).unwrap();
        for w in ["XYXY", "IZXX", "-YYZI", "ZZII"] {
            let p: PauliString = w.parse().unwrap();
            let q = p.permuted(&perm).unwrap();
            assert_abs_diff_eq!(
                expectation(&Observable::Pauli(q), &moved).unwrap(),
                expectation(&Observable::Pauli(p), &c4).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn distinct_permutation_counts() {
        assert_eq!(distinct_permutations(&cluster4()).unwrap().len(), 3);
        assert_eq!(distinct_permutations(&ghz(4)).unwrap().len(), 1);
        assert_eq!(distinct_permutations(&w3()).unwrap().len(), 1);
        let mixed = DenseState::maximally_mixed(2).unwrap();
        assert!(matches!(distinct_permutations(&mixed), Err(Error::NotPure)));
    }

    #[test]
    fn pauli_distribution_matches_projectors() {
        let states = [w3(), what_w3(), white_noise(&w3(), 0.3).unwrap()];
        for s in &states {
            for w in ["IIZ", "XXZ", "-YYZ", "XYZ", "ZZZ"] {
                let p: PauliString = w.parse().unwrap();
                let herm = HermitianObservable::new(p.to_matrix().unwrap()).unwrap();
                let a = outcome_distribution(&Observable::Pauli(p), s).unwrap();
                let b = outcome_distribution(&Observable::Hermitian(herm), s).unwrap();
                assert_eq!(b.probs.len(), 2);
                for (x, y) in a.probs.iter().zip(&b.probs) {
                    assert_abs_diff_eq!(x, y, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn degenerate_eigenvalues_group() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(1.0 + 1e-10), c(-2.0), c(0.5)]));
        let h = HermitianObservable::new(m).unwrap();
        assert_eq!(h.eigenvalues().len(), 3);
        assert!(HermitianObservable::new(DMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64))).is_err());
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(DenseState::pure_real(&[1.0, 1.0]).is_err());
        assert!(DenseState::pure_real(&[1.0, 0.0, 0.0]).is_err());
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(DenseState::mixed(neg).is_err());
        assert!(DenseState::basis(7, 0).is_err());
    }

    #[test]
    fn phase_convention() {
        let s = DenseState::pure(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)]).unwrap();
        assert_eq!(s.amplitudes().unwrap()[1], c(1.0));
    }

    #[test]
    fn stabilizing_words_of_builtins() {
        assert_eq!(stabilizing_words(&ghz(4)).unwrap().len(), 16);
        assert_eq!(stabilizing_words(&cluster4()).unwrap().len(), 16);
        assert_eq!(stabilizing_words(&ghz(3)).unwrap().len(), 8);
        // Only the identity and -ZZZ.
        assert_eq!(stabilizing_words(&w3()).unwrap().len(), 2);
    }

    #[test]
    fn json_round_trip() {
        for s in [cluster4(), white_noise(&w3(), 0.25).unwrap()] {
            let back = DenseState::from_json(&s.to_json().to_string()).unwrap();
            assert!((back.density_matrix() - s.density_matrix()).norm() < 1e-14);
        }
        assert!(DenseState::from_json(r#"{"n":1,"kind":"pure","data":[[1,0]]}"#).is_err());
        assert!(DenseState::from_json(r#"{"n":1,"kind":"odd","data":[[1,0],[0,0]]}"#).is_err());
    }

    #[test]
    fn product_basis_probabilities() {
        let h = Matrix2::new(c(1.0), c(1.0), c(1.0), c(-1.0)) * c(std::f64::consts::FRAC_1_SQRT_2);
        let basis = ProductBasis::from_qubit_bases(vec![h; 3]).unwrap();
        let obs = Observable::ProductBasis(basis.clone());
        let pure = outcome_distribution(&obs, &ghz(3)).unwrap();
        let mixed = outcome_distribution(&obs, &DenseState::mixed(ghz(3).density_matrix()).unwrap()).unwrap();
        for (a, b) in pure.probs.iter().zip(&mixed.probs) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        // GHZ in the X basis: support on even-parity strings only.
        assert_abs_diff_eq!(pure.probs[0b001], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pure.probs[0b011], 0.25, epsilon = 1e-14);
        let bad = Matrix2::new(c(1.0), c(1.0), c(0.0), c(1.0));
        assert!(ProductBasis::from_qubit_bases(vec![bad]).is_err());
    }
}
