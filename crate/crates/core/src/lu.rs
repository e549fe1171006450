//! Local unitaries in the Euler parameterization
//! `U(φ, θ, ψ) = exp(iψσz/2) exp(iθσy/2) exp(iφσz/2)` on every qubit,
//! optionally followed by a qubit permutation.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dense::{apply_single_qubit, check_perm, permute_qubits, source_index, DenseState, StateData};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitaryParams {
    /// `(φ, θ, ψ)` per qubit, radians.
    pub angles: Vec<[f64; 3]>,
    /// 0-based; qubit `k` of the output carries qubit `perm[k]` of the rotated state.
    pub perm: Option<Vec<usize>>,
}

impl LocalUnitaryParams {
    pub fn identity(n: usize) -> Self {
        LocalUnitaryParams { angles: vec![[0.0; 3]; n], perm: None }
    }

    /// From a flat `[φ0, θ0, ψ0, φ1, ...]` slice.
    pub fn from_flat(flat: &[f64], perm: Option<Vec<usize>>) -> Self {
        let angles = flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        LocalUnitaryParams { angles, perm }
    }

    pub fn flat(&self) -> Vec<f64> {
        self.angles.iter().flatten().copied().collect()
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.angles.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::InvalidState("non-finite rotation angle".into()));
        }
        if let Some(p) = &self.perm {
            check_perm(p, self.n())?;
        }
        Ok(())
    }

    pub fn is_identity_perm(&self) -> bool {
        self.perm.as_ref().is_none_or(|p| p.iter().enumerate().all(|(k, &v)| k == v))
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    angles: Vec<[f64; 3]>,
    #[serde(default)]
    perm: Option<Vec<usize>>,
}

impl Serialize for LocalUnitaryParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n();
        let perm = self.perm.clone().unwrap_or_else(|| (0..n).collect());
        ParamsRepr { angles: self.angles.clone(), perm: Some(perm.iter().map(|p| p + 1).collect()) }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LocalUnitaryParams {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = ParamsRepr::deserialize(deserializer)?;
        let perm = match r.perm {
            Some(p) => {
                if p.contains(&0) {
                    return Err(serde::de::Error::custom("perm entries are 1-based"));
                }
                Some(p.into_iter().map(|v| v - 1).collect())
            }
            None => None,
        };
        let params = LocalUnitaryParams { angles: r.angles, perm };
        params.validate().map_err(serde::de::Error::custom)?;
        Ok(params)
    }
}

pub fn euler_unitary(phi: f64, theta: f64, psi: f64) -> Matrix2<Complex64> {
    let rz = |a: f64| {
        Matrix2::new(
            Complex64::from_polar(1.0, a / 2.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(1.0, -a / 2.0),
        )
    };
    let (s, c) = (theta / 2.0).sin_cos();
    let ry = Matrix2::new(Complex64::new(c, 0.0), Complex64::new(s, 0.0), Complex64::new(-s, 0.0), Complex64::new(c, 0.0));
    rz(psi) * ry * rz(phi)
}

/// Rotates a state vector in place by the flat Euler angles (no permutation).
pub fn rotate_in_place(amps: &mut [Complex64], flat_angles: &[f64]) {
    let n = flat_angles.len() / 3;
    for (k, a) in flat_angles.chunks_exact(3).enumerate() {
        apply_single_qubit(amps, n, k, &euler_unitary(a[0], a[1], a[2]));
    }
}

/// Dense `P · (U_0 ⊗ ... ⊗ U_{n-1})`.
pub fn build_unitary(p: &LocalUnitaryParams) -> Result<DMatrix<Complex64>> {
    p.validate()?;
    let mut u = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for a in &p.angles {
        let m = euler_unitary(a[0], a[1], a[2]);
        u = u.kronecker(&m);
    }
    if p.is_identity_perm() {
        return Ok(u);
    }
    let perm = p.perm.as_ref().unwrap();
    let dim = u.nrows();
    let mut pm = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        pm[(j, source_index(j, perm))] = Complex64::new(1.0, 0.0);
    }
    Ok(pm * u)
}

/// `U|s>` for pure states, `U s U^dagger` for mixed ones.
pub fn conjugate_state(p: &LocalUnitaryParams, s: &DenseState) -> Result<DenseState> {
    p.validate()?;
    if p.n() != s.n() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: 1 << p.n() });
    }
    let rotated = match s.data() {
        StateData::Pure(a) => {
            let mut v = a.clone();
            rotate_in_place(&mut v, &p.flat());
            DenseState::pure_normalized(v)?
        }
        StateData::Mixed(m) => {
            let mut u = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
            for a in &p.angles {
                u = u.kronecker(&euler_unitary(a[0], a[1], a[2]));
            }
            let mut r = &u * m * u.adjoint();
            // Restore exact Hermiticity lost to rounding.
            r = (&r + r.adjoint()) * Complex64::new(0.5, 0.0);
            DenseState::mixed(r)?
        }
    };
    match &p.perm {
        Some(perm) if !p.is_identity_perm() => permute_qubits(&rotated, perm),
        _ => Ok(rotated),
    }
}

/// Angles uniform in `[0, 2π)`, reproducible for a fixed seed.
pub fn random_params(n: usize, seed: u64) -> LocalUnitaryParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_params_with(n, &mut rng)
}

pub fn random_params_with<R: Rng>(n: usize, rng: &mut R) -> LocalUnitaryParams {
    let angles = (0..n).map(|_| [rng.random_range(0.0..TAU), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)]).collect();
    LocalUnitaryParams { angles, perm: None }
}
