//! Stabilizer groups and graph states.
//!
//! Graph files and [`GraphSpec::new`] use 1-based vertices like the text form
//! of graphs in the literature; everything stored is 0-based.

use std::collections::{BTreeSet, HashSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{DenseState, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::pauli::{Phase, PauliString};

/// Simple undirected graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl GraphSpec {
    /// Builds a graph from 1-based vertex pairs.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidGraph(format!("{n} vertices")));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) outside 1..={n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            let e = (a.min(b) - 1, a.max(b) - 1);
            if !set.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(GraphSpec { n, edges: set })
    }

    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (2..=n).map(|j| (1, j)).collect();
        Self::new(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|j| (j, j + 1)).collect();
        Self::new(n, &edges)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: GraphFile = serde_json::from_str(text)?;
        let edges: Vec<_> = f.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(f.n, &edges)
    }

    pub fn to_json(&self) -> String {
        let f = GraphFile { n: self.n, edges: self.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect() };
        serde_json::to_string(&f).expect("graph serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based edges with the smaller vertex first.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// 0-based neighbourhood of vertex `v`.
    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Graph-state generators `K_i = X_i prod_{j in N(i)} Z_j`.
pub fn generators_from_graph(g: &GraphSpec) -> Vec<PauliString> {
    let n = g.n;
    (0..n)
        .map(|i| {
            let x = 1u64 << (n - 1 - i);
            let z = g.neighbors(i).iter().fold(0u64, |acc, &j| acc | 1 << (n - 1 - j));
            PauliString::from_masks(n, x, z, false)
        })
        .collect()
}

/// GF(2) rank of the symplectic rows `(x | z)`.
fn symplectic_rank(words: &[PauliString]) -> usize {
    let n = words.first().map_or(0, |w| w.n());
    let mut rows: Vec<u128> = words.iter().map(|w| (w.x_mask() as u128) << n | w.z_mask() as u128).collect();
    let mut rank = 0;
    for bit in (0..2 * n).rev() {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r] >> bit & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

/// All `2^k` signed products of `k` commuting, independent generators.
/// Element `m` is the product of the generators selected by the bits of `m`.
pub fn span(gens: &[PauliString]) -> Result<Vec<PauliString>> {
    let Some(first) = gens.first() else {
        return Err(Error::DependentGenerators);
    };
    let n = first.n();
    for g in gens {
        if g.n() != n {
            return Err(Error::LengthMismatch { left: n, right: g.n() });
        }
    }
    for (a, ga) in gens.iter().enumerate() {
        for gb in &gens[a + 1..] {
            if !ga.commutes(gb)? {
                return Err(Error::Anticommuting(ga.to_string(), gb.to_string()));
            }
        }
    }
    if symplectic_rank(gens) != gens.len() {
        return Err(Error::DependentGenerators);
    }
    let mut elements = vec![PauliString::identity(n)];
    for g in gens {
        let mut next = Vec::with_capacity(elements.len() * 2);
        for e in &elements {
            let (phase, word) = e.product(g)?;
            // Commuting Hermitian words multiply to a Hermitian word.
            debug_assert_eq!(phase, Phase::ONE);
            next.push(word);
        }
        elements.extend(next);
    }
    Ok(elements)
}

/// The full stabilizer group of an `n`-qubit stabilizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliString>,
    elements: Vec<PauliString>,
}

impl StabilizerGroup {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// All `2^n` elements, identity first.
    pub fn elements(&self) -> &[PauliString] {
        &self.elements
    }

    /// Elements other than the identity.
    pub fn nontrivial(&self) -> Vec<PauliString> {
        self.elements.iter().filter(|e| !e.is_identity()).copied().collect()
    }

    /// Elements acting nontrivially on exactly `w` qubits.
    pub fn of_weight(&self, w: usize) -> Vec<PauliString> {
        self.elements.iter().filter(|e| e.weight() == w).copied().collect()
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.elements.contains(p)
    }

    /// `2^-n sum_S S` as a dense matrix.
    pub fn projector(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::QubitCap { n: self.n, cap: MAX_DENSE_QUBITS });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for e in &self.elements {
            for j in 0..dim {
                let (i, v) = e.column_entry(j);
                m[(i, j)] += v;
            }
        }
        Ok(m / Complex64::new(dim as f64, 0.0))
    }
}

pub fn group_from_generators(gens: &[PauliString]) -> Result<StabilizerGroup> {
    let elements = span(gens)?;
    let n = gens[0].n();
    if gens.len() != n {
        return Err(Error::IncompleteGroup { gens: gens.len(), n });
    }
    Ok(StabilizerGroup { n, generators: gens.to_vec(), elements })
}

pub fn graph_group(g: &GraphSpec) -> Result<StabilizerGroup> {
    group_from_generators(&generators_from_graph(g))
}

/// Stabilizer group of a pure state, found by testing every Pauli word.
pub fn group_of_state(s: &DenseState) -> Result<StabilizerGroup> {
    let words = crate::dense::stabilizing_words(s)?;
    let n = s.n();
    if words.len() != 1 << n {
        return Err(Error::NotStabilizerState);
    }
    // Greedy independent generating set.
    let mut gens: Vec<PauliString> = Vec::new();
    for w in words.iter().filter(|w| !w.is_identity()) {
        let mut trial = gens.clone();
        trial.push(*w);
        if symplectic_rank(&trial) == trial.len() {
            gens = trial;
        }
        if gens.len() == n {
            break;
        }
    }
    group_from_generators(&gens)
}

/// The unique `+1` eigenvector of every element, via the group projector.
pub fn stabilizer_state(group: &StabilizerGroup) -> Result<DenseState> {
    let proj = group.projector()?;
    let rank = proj.trace().re.round();
    let idempotent = (&proj * &proj - &proj).norm() < 1e-10;
    if !idempotent || rank < 0.5 {
        return Err(Error::ProjectorRank(0));
    }
    if (rank - 1.0).abs() > 1e-9 {
        return Err(Error::ProjectorRank(rank as usize));
    }
    let col = (0..proj.ncols())
        .max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm()))
        .expect("nonempty projector");
    DenseState::pure_normalized(proj.column(col).iter().copied().collect())
}

/// Two-point stabilizing operators from the neighbourhood rules: leaves give
/// `XZ`, unconnected twins (`N(i) = N(j)`) give `XX`, connected twins
/// (`N(i) ∪ {i} = N(j) ∪ {j}`) give `YY`.
pub fn count_two_point(g: &GraphSpec) -> Result<(usize, Vec<PauliString>)> {
    if g.n < 3 {
        return Err(Error::InvalidGraph(format!("two-point counting needs at least 3 vertices, got {}", g.n)));
    }
    if !g.is_connected() {
        return Err(Error::InvalidGraph("graph is not connected".into()));
    }
    let n = g.n;
    let bit = |v: usize| 1u64 << (n - 1 - v);
    let neigh: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
    let mut ops = Vec::new();
    for (i, ni) in neigh.iter().enumerate() {
        if ni.len() == 1 {
            let j = *ni.iter().next().unwrap();
            ops.push(PauliString::from_masks(n, bit(i), bit(j), false));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if g.is_adjacent(i, j) {
                let mut a = neigh[i].clone();
                a.insert(i);
                let mut b = neigh[j].clone();
                b.insert(j);
                if a == b {
                    let m = bit(i) | bit(j);
                    ops.push(PauliString::from_masks(n, m, m, false));
                }
            } else if neigh[i] == neigh[j] {
                ops.push(PauliString::from_masks(n, bit(i) | bit(j), 0, false));
            }
        }
    }
    Ok((ops.len(), ops))
}

/// Weight-2 elements of the full graph-state group, by enumeration.
pub fn count_two_point_brute_force(g: &GraphSpec) -> Result<(usize, Vec<PauliString>)> {
    let ops = graph_group(g)?.of_weight(2);
    Ok((ops.len(), ops))
}

/// Lower bound `max(0, (k1 - k2)/k1)` on both measures when the two-point
/// operators of `g1` are used against the orbit of `g2`.
pub fn two_point_bound(g1: &GraphSpec, g2: &GraphSpec) -> Result<f64> {
    let (k1, _) = count_two_point(g1)?;
    let (k2, _) = count_two_point(g2)?;
    if k1 == 0 {
        return Err(Error::NoTwoPoint);
    }
    Ok(((k1 as f64 - k2 as f64) / k1 as f64).max(0.0))
}

/// Generators of the GHZ group in the computational basis:
/// `X...X` and `Z_i Z_{i+1}`.
pub fn ghz_generators(n: usize) -> Vec<PauliString> {
    let mut gens = vec![PauliString::from_masks(n, (1 << n) - 1, 0, false)];
    for i in 0..n - 1 {
        gens.push(PauliString::from_masks(n, 0, 0b11 << (n - 2 - i), false));
    }
    gens
}

/// Generators of the four-qubit linear cluster state in the computational
/// basis, `{ZZII, IIZZ, XXZI, IZXX}`.
pub fn cluster4_generators() -> Vec<PauliString> {
    crate::pauli::parse_words(&["ZZII", "IIZZ", "XXZI", "IZXX"]).expect("valid words")
}

/// Distinct qubit pairs carrying the given weight-2 operators.
pub fn pair_supports(ops: &[PauliString]) -> HashSet<Vec<usize>> {
    ops.iter().map(|p| p.support().into_iter().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{cluster4, expectation, ghz, overlap, Observable};
    use crate::pauli::parse_words;

    fn words(list: &[&str]) -> Vec<PauliString> {
        parse_words(list).unwrap()
    }

    fn as_set(v: &[PauliString]) -> HashSet<PauliString> {
        v.iter().copied().collect()
    }

    #[test]
    fn star_generators() {
        let g = GraphSpec::star(4).unwrap();
        assert_eq!(generators_from_graph(&g), words(&["XZZZ", "ZXII", "ZIXI", "ZIIX"]));
        let single = GraphSpec::new(1, &[]).unwrap();
        assert_eq!(generators_from_graph(&single), words(&["X"]));
        let path = GraphSpec::path(3).unwrap();
        assert_eq!(generators_from_graph(&path), words(&["XZI", "ZXZ", "IZX"]));
    }

    #[test]
    fn invalid_graphs() {
        assert!(GraphSpec::new(3, &[(1, 1)]).is_err());
        assert!(GraphSpec::new(3, &[(1, 2), (2, 1)]).is_err());
        assert!(GraphSpec::new(3, &[(1, 4)]).is_err());
        assert!(GraphSpec::new(3, &[(0, 1)]).is_err());
    }

    #[test]
    fn ghz4_group_matches_listing() {
        let group = group_from_generators(&words(&["XXXX", "ZZII", "IZZI", "IIZZ"])).unwrap();
        let expected = words(&[
            "IIII", "IIZZ", "IZIZ", "IZZI", "ZIIZ", "ZIZI", "ZZII", "ZZZZ", "XXXX", "-XXYY", "-XYXY", "-XYYX",
            "-YXXY", "-YXYX", "-YYXX", "YYYY",
        ]);
        assert_eq!(as_set(group.elements()), as_set(&expected));
        assert_eq!(group.elements().len(), 16);
    }

    #[test]
    fn cluster4_group_matches_listing() {
        let group = group_from_generators(&cluster4_generators()).unwrap();
        let expected = words(&[
            "IIII", "IIZZ", "ZZII", "ZZZZ", "XYXY", "XYYX", "YXXY", "YXYX", "IZXX", "ZIXX", "XXIZ", "XXZI", "-IZYY",
            "-ZIYY", "-YYIZ", "-YYZI",
        ]);
        assert_eq!(as_set(group.elements()), as_set(&expected));
    }

    #[test]
    fn single_qubit_group() {
        let group = group_from_generators(&words(&["X"])).unwrap();
        assert_eq!(group.elements(), &words(&["I", "X"])[..]);
    }

    #[test]
    fn generator_errors() {
        assert!(matches!(group_from_generators(&words(&["XI", "ZI"])), Err(Error::Anticommuting(..))));
        assert!(matches!(
            group_from_generators(&words(&["ZZ", "ZZ"])),
            Err(Error::DependentGenerators)
        ));
        assert!(matches!(
            group_from_generators(&words(&["ZZI", "IZZ"])),
            Err(Error::IncompleteGroup { gens: 2, n: 3 })
        ));
        assert_eq!(span(&words(&["ZZI", "IZZ"])).unwrap().len(), 4);
    }

    #[test]
    fn stabilizer_states_of_listed_groups() {
        let g = stabilizer_state(&group_from_generators(&ghz_generators(4)).unwrap()).unwrap();
        assert!(overlap(&g, &ghz(4)).unwrap() > 1.0 - 1e-12);
        assert!(g.amplitudes().unwrap()[0].re > 0.0);
        let c = stabilizer_state(&group_from_generators(&cluster4_generators()).unwrap()).unwrap();
        assert!(overlap(&c, &cluster4()).unwrap() > 1.0 - 1e-12);
        let zero = stabilizer_state(&group_from_generators(&words(&["Z"])).unwrap()).unwrap();
        assert_eq!(zero.amplitudes().unwrap()[0].re, 1.0);
    }

    #[test]
    fn group_of_state_recovers_groups() {
        let group = group_of_state(&cluster4()).unwrap();
        let listed = group_from_generators(&cluster4_generators()).unwrap();
        assert_eq!(as_set(group.elements()), as_set(listed.elements()));
        assert!(matches!(group_of_state(&crate::dense::w3()), Err(Error::NotStabilizerState)));
    }

    #[test]
    fn two_point_counts() {
        let star4 = GraphSpec::star(4).unwrap();
        let path4 = GraphSpec::path(4).unwrap();
        let star3 = GraphSpec::star(3).unwrap();
        assert_eq!(count_two_point(&star4).unwrap().0, 6);
        assert_eq!(count_two_point(&path4).unwrap().0, 2);
        assert_eq!(count_two_point(&star3).unwrap().0, 3);
        assert!(count_two_point(&GraphSpec::path(2).unwrap()).is_err());
        assert!(count_two_point(&GraphSpec::new(4, &[(1, 2), (3, 4)]).unwrap()).is_err());
    }

    #[test]
    fn two_point_rule_letters() {
        // Triangle: every pair is a connected twin, giving YY on each pair.
        let tri = GraphSpec::new(3, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        let (k, ops) = count_two_point(&tri).unwrap();
        assert_eq!(k, 3);
        assert_eq!(as_set(&ops), as_set(&words(&["YYI", "YIY", "IYY"])));
        let (_, brute) = count_two_point_brute_force(&tri).unwrap();
        assert_eq!(as_set(&ops), as_set(&brute));
    }

    #[test]
    fn bounds() {
        let star4 = GraphSpec::star(4).unwrap();
        let path4 = GraphSpec::path(4).unwrap();
        assert_eq!(two_point_bound(&star4, &path4).unwrap(), 4.0 / 6.0);
        assert_eq!(two_point_bound(&star4, &star4).unwrap(), 0.0);
        assert_eq!(two_point_bound(&path4, &star4).unwrap(), 0.0);
        // Four-cycle: opposite vertices are twins, no leaves.
        let cycle = GraphSpec::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        assert_eq!(count_two_point(&cycle).unwrap().0, 2);
        let p5 = GraphSpec::path(5).unwrap();
        assert_eq!(count_two_point(&p5).unwrap().0, 2);
    }

    #[test]
    fn graph_json_round_trip() {
        let g = GraphSpec::from_json(r#"{"n": 4, "edges": [[1,2],[1,3],[1,4]]}"#).unwrap();
        assert_eq!(g, GraphSpec::star(4).unwrap());
        assert_eq!(GraphSpec::from_json(&g.to_json()).unwrap(), g);
        assert!(GraphSpec::from_json(r#"{"n": 2, "edges": [[1,1]]}"#).is_err());
    }

    #[test]
    fn graph_state_fixed_by_generators() {
        let g = GraphSpec::path(4).unwrap();
        let state = stabilizer_state(&graph_group(&g).unwrap()).unwrap();
        for k in generators_from_graph(&g) {
            assert!((expectation(&Observable::Pauli(k), &state).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
