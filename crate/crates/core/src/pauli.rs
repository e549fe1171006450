//! Signed n-qubit Pauli words in the symplectic (x, z) bit encoding.
//!
//! Qubits are numbered 0-based from the left of the text form, so qubit 0
//! is the leftmost letter in `"XIZY"`. In the bit masks qubit `k` sits at bit
//! `n - 1 - k`, which lines the masks up with computational-basis indices
//! (qubit 0 is the most significant bit of `|b0 b1 ... b_{n-1}>`).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest word length supported by the bit encoding.
pub const MAX_QUBITS: usize = 64;
/// Largest word length [`PauliString::to_matrix`] will expand.
pub const MATRIX_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// A power of `i`: the value `i^k` for `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u32 {
        self.0 as u32
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// A Hermitian Pauli word `±P_1 ⊗ ... ⊗ P_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        PauliString { n, x: 0, z: 0, negative: false }
    }

    pub fn from_letters(letters: &[Letter], negative: bool) -> Result<Self> {
        let n = letters.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::ParsePauli(format!("{n} letters")));
        }
        let mut p = PauliString::identity(n);
        p.negative = negative;
        for (k, l) in letters.iter().enumerate() {
            p.set(k, *l);
        }
        Ok(p)
    }

    /// Builds a word from raw masks aligned with basis indices (see module docs).
    pub fn from_masks(n: usize, x: u64, z: u64, negative: bool) -> Self {
        assert!(n <= MAX_QUBITS);
        let mask = full_mask(n);
        PauliString { n, x: x & mask, z: z & mask, negative }
    }

    /// Word with `letter` on qubit `k` (0-based) and identity elsewhere.
    pub fn single(n: usize, k: usize, letter: Letter) -> Self {
        let mut p = PauliString::identity(n);
        p.set(k, letter);
        p
    }

    fn bit(&self, k: usize) -> u64 {
        1u64 << (self.n - 1 - k)
    }

    fn set(&mut self, k: usize, letter: Letter) {
        let b = self.bit(k);
        let (x, z) = letter.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn letter(&self, k: usize) -> Letter {
        let b = self.bit(k);
        Letter::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|k| self.letter(k)).collect()
    }

    pub fn negated(&self) -> Self {
        PauliString { negative: !self.negative, ..*self }
    }

    pub fn unsigned(&self) -> Self {
        PauliString { negative: false, ..*self }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// 0-based indices of the qubits where the word acts nontrivially.
    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.n).filter(|&k| self.letter(k) != Letter::I).collect()
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        let s = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        Ok(s.is_multiple_of(2))
    }

    /// Matrix product `self · other = phase · word`.
    ///
    /// Real phases are folded into the sign of `word` and reported as
    /// [`Phase::ONE`]; an imaginary phase is returned as `±i` with a
    /// positive `word`.
    pub fn product(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        self.check_len(other)?;
        // Each word is sign · i^{|x&z|} X^x Z^z, and Z^z X^x' = (-1)^{|z&x'|} X^x' Z^z.
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let mut k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones();
        k += 4 - (x & z).count_ones() % 4;
        if self.negative {
            k += 2;
        }
        if other.negative {
            k += 2;
        }
        let phase = Phase::from_power(k);
        let word = PauliString { n: self.n, x, z, negative: false };
        Ok(if phase.is_real() {
            (Phase::ONE, PauliString { negative: phase == Phase::MINUS_ONE, ..word })
        } else {
            (phase, word)
        })
    }

    /// `tr(self · other) / 2^n`, which is always `+1`, `-1` or `0`.
    pub fn trace_overlap(&self, other: &PauliString) -> Result<i8> {
        self.check_len(other)?;
        if self.x != other.x || self.z != other.z {
            return Ok(0);
        }
        Ok(if self.negative == other.negative { 1 } else { -1 })
    }

    /// Nonzero entry of column `j`: `P|j> = value · |j ^ x_mask>`.
    #[inline]
    pub fn column_entry(&self, j: usize) -> (usize, Complex64) {
        let mut k = self.y_count() + 2 * ((self.z & j as u64).count_ones() % 2);
        if self.negative {
            k += 2;
        }
        (j ^ self.x as usize, Phase::from_power(k).to_complex())
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MATRIX_CAP {
            return Err(Error::QubitCap { n: self.n, cap: MATRIX_CAP });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let (i, v) = self.column_entry(j);
            m[(i, j)] = v;
        }
        Ok(m)
    }

    /// `P|psi>` for a state vector of matching dimension.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (j, a) in amps.iter().enumerate() {
            let (i, v) = self.column_entry(j);
            out[i] = v * a;
        }
        out
    }

    /// `<psi|P|psi>` without allocating.
    #[inline]
    pub fn expectation(&self, amps: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, a) in amps.iter().enumerate() {
            let (i, v) = self.column_entry(j);
            acc += amps[i].conj() * v * a;
        }
        acc.re
    }

    /// Rearranges letters so that letter `k` of the result is letter `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        let letters = self.letters();
        let mut out = PauliString::identity(self.n);
        out.negative = self.negative;
        for (k, &src) in perm.iter().enumerate() {
            out.set(k, letters[src]);
        }
        Ok(out)
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        for k in 0..self.n {
            write!(f, "{}", self.letter(k).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (negative, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let letters = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                _ => Err(Error::ParsePauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_letters(&letters, negative).map_err(|_| Error::ParsePauli(s.to_string()))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a list of words, e.g. `["XXXX", "-XXYY"]`.
pub fn parse_words<S: AsRef<str>>(words: &[S]) -> Result<Vec<PauliString>> {
    words.iter().map(|w| w.as_ref().parse()).collect()
}
