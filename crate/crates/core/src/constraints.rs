//! Plücker constraints zᵢⱼzₖₗ + zᵢₗzⱼₖ − zᵢₖzⱼₗ = 0 and the two rule-based dual
//! assignments built from mixed products in the squared commutator entries.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::bwform::{commutator_forms, objective_scale, CommutatorTable};
use crate::exact::{frac, int, Rational, SymMatrix};
use crate::indexing::{build_index_matrix, decode_pos, pos_index, IndexError, MatrixClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("quadruple {0:?} is not strictly increasing with ids >= 1")]
    BadQuadruple([usize; 4]),
    #[error("quadruple {quad:?} exceeds {m} variables")]
    OutOfSpace { quad: [usize; 4], m: usize },
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quadruple([usize; 4]);

impl Quadruple {
    pub fn new(i: usize, j: usize, k: usize, l: usize) -> Result<Self, ConstraintError> {
        let q = [i, j, k, l];
        if i == 0 || !(i < j && j < k && k < l) {
            return Err(ConstraintError::BadQuadruple(q));
        }
        Ok(Quadruple(q))
    }

    /// Sorts four distinct ids into a quadruple.
    pub fn from_ids(mut ids: [usize; 4]) -> Result<Self, ConstraintError> {
        ids.sort_unstable();
        Self::new(ids[0], ids[1], ids[2], ids[3])
    }

    pub fn ids(&self) -> [usize; 4] {
        self.0
    }

    /// The three candidate-slot pairings with their signs:
    /// (ij,kl) +1, (il,jk) +1, (ik,jl) −1.
    pub fn pairings(&self) -> [(usize, usize, i32); 3] {
        let [i, j, k, l] = self.0;
        let s = |a, b| pos_index(a, b).unwrap() - 1;
        [(s(i, j), s(k, l), 1), (s(i, l), s(j, k), 1), (s(i, k), s(j, l), -1)]
    }

    pub fn sign_of_pair(&self, a: usize, b: usize) -> Option<i32> {
        self.pairings()
            .into_iter()
            .find(|&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a))
            .map(|(_, _, s)| s)
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, j, k, l] = self.0;
        write!(f, "({i},{j},{k},{l})")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintMatrix {
    pub quad: Quadruple,
    pub mat: SymMatrix,
}

/// A_t over the candidate space of `m` variables, entries ±1.
pub fn plucker_constraint(q: Quadruple, m: usize) -> Result<ConstraintMatrix, ConstraintError> {
    if q.0[3] > m {
        return Err(ConstraintError::OutOfSpace { quad: q.0, m });
    }
    let mut mat = SymMatrix::zeros(m * (m - 1) / 2);
    for (a, b, s) in q.pairings() {
        mat.set(a, b, int(s as i64));
    }
    Ok(ConstraintMatrix { quad: q, mat })
}

pub fn all_quadruples(m: usize) -> impl Iterator<Item = Quadruple> {
    (1..=m).flat_map(move |i| {
        ((i + 1)..=m).flat_map(move |j| {
            ((j + 1)..=m).flat_map(move |k| ((k + 1)..=m).map(move |l| Quadruple([i, j, k, l])))
        })
    })
}

/// Dual weights y_t plus the identity shift γ (S = C − Σ y_t A_t + γI).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualVector {
    pub y: BTreeMap<Quadruple, Rational>,
    pub gamma: Rational,
}

impl DualVector {
    pub fn add(&mut self, q: Quadruple, v: &Rational) {
        let e = self.y.entry(q).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.y.remove(&q);
        }
    }

    pub fn support(&self) -> usize {
        self.y.len()
    }
}

/// For every commutator entry (row-major) and every pair of its terms (in slot order)
/// whose four ids are distinct, yields the sorted quadruple, the two slots and the
/// product of their coefficients.
pub fn mixed_pairs(r: &CommutatorTable) -> Vec<(Quadruple, usize, usize, Rational)> {
    let mut out = Vec::new();
    for row in &r.entries {
        for f in row {
            let terms: Vec<(usize, &Rational)> = f.iter().collect();
            for (x, (a, ca)) in terms.iter().enumerate() {
                for (b, cb) in &terms[x + 1..] {
                    let (i, j) = decode_pos(a + 1);
                    let (k, l) = decode_pos(b + 1);
                    if let Ok(q) = Quadruple::from_ids([i, j, k, l]) {
                        out.push((q, *a, *b, *ca * *cb));
                    }
                }
            }
        }
    }
    out
}

/// Removes `fraction` of every mixed product of C by the matching Plücker rewriting.
/// A mixed term −2c·z_a z_b in zᵀCz has C(a,b) = −c, and A_t(a,b) = σ.
fn eliminate_mixed(class: MatrixClass, n: usize, fraction: &Rational) -> Result<DualVector, IndexError> {
    let ind = build_index_matrix(class, n)?;
    let r = commutator_forms(&ind);
    let scale = objective_scale(class);
    let mut dv = DualVector::default();
    for (q, a, b, c) in mixed_pairs(&r) {
        let sigma = q.sign_of_pair(a, b).expect("pair belongs to its quadruple");
        dv.add(q, &(-(c * &scale) * int(sigma as i64) * fraction));
    }
    Ok(dv)
}

/// Removes every mixed product entirely (the tridiagonal and backward tridiagonal duals).
pub fn full_elimination(class: MatrixClass, n: usize) -> Result<DualVector, IndexError> {
    eliminate_mixed(class, n, &int(1))
}

/// The general-class rule: halve every mixed product; γ = (n−2)/2.
pub fn strategy_a(n: usize) -> Result<DualVector, IndexError> {
    let mut dv = eliminate_mixed(MatrixClass::General, n, &frac(1, 2))?;
    dv.gamma = frac(n as i64 - 2, 2);
    Ok(dv)
}

/// The Toeplitz rule: remove every mixed product entirely; γ = 0.
pub fn strategy_b(n: usize) -> Result<DualVector, IndexError> {
    if n < 3 {
        return Err(IndexError::UnsupportedOrder(n));
    }
    eliminate_mixed(MatrixClass::Toeplitz, n, &int(1))
}

/// Number of candidate terms in every commutator entry.
pub fn term_counts(class: MatrixClass, n: usize) -> Result<Vec<Vec<usize>>, IndexError> {
    let r = commutator_forms(&build_index_matrix(class, n)?);
    Ok(r.entries.iter().map(|row| row.iter().map(|f| f.len()).collect()).collect())
}

/// Mixed products with four distinct ids in the backward tridiagonal commutator.
pub fn mixed_pair_count_backward(n: usize) -> Result<usize, IndexError> {
    if n < 3 {
        return Err(IndexError::UnsupportedOrder(n));
    }
    let r = commutator_forms(&build_index_matrix(MatrixClass::BackwardTridiagonal, n)?);
    Ok(mixed_pairs(&r).len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_constraint_positions() {
        let q = Quadruple::new(2, 3, 4, 5).unwrap();
        let a = plucker_constraint(q, 5).unwrap();
        // 1-based (3,10) +1, (8,6) +1, (5,9) −1
        assert_eq!(a.mat.get(2, 9), int(1));
        assert_eq!(a.mat.get(7, 5), int(1));
        assert_eq!(a.mat.get(4, 8), int(-1));
        assert_eq!(a.mat.nnz(), 3);
        assert!(Quadruple::new(2, 2, 3, 4).is_err());
        assert!(plucker_constraint(q, 4).is_err());
    }

    #[test]
    fn quadruple_counts() {
        assert_eq!(all_quadruples(9).count(), 126);
        assert_eq!(all_quadruples(4).count(), 1);
    }

    #[test]
    fn strategy_a_small() {
        let d2 = strategy_a(2).unwrap();
        assert_eq!(d2.support(), 0);
        assert_eq!(d2.gamma, int(0));
        assert_eq!(strategy_a(3).unwrap().support(), 15);
        assert_eq!(strategy_a(3).unwrap().gamma, frac(1, 2));
    }

    #[test]
    fn strategy_b_counts() {
        assert_eq!(strategy_b(5).unwrap().support(), 14);
        for n in 3..=8 {
            assert_eq!(strategy_b(n).unwrap().support(), (n - 1) * (n - 2) * (2 * n - 3) / 6);
        }
    }

    #[test]
    fn backward_counts() {
        assert_eq!(mixed_pair_count_backward(6).unwrap(), 18);
        assert_eq!(mixed_pair_count_backward(4).unwrap(), 8);
        assert_eq!(mixed_pair_count_backward(5).unwrap(), 17);
    }
}
