use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::{connected_components, Rational, SymMatrix};

/// `M = Pᵀ L D Lᵀ P`: row `a` of the permuted system is original index `permutation[a]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdlCertificate {
    pub permutation: Vec<usize>,
    pub diag: Vec<Rational>,
    /// strictly-lower part of the unit lower factor, permuted coordinates
    pub lower: BTreeMap<(usize, usize), Rational>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotPsdWitness {
    pub vector: Vec<Rational>,
    /// wᵀ M w, always strictly negative
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd(LdlCertificate),
    NotPsd(NotPsdWitness),
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::Psd(_))
    }

    pub fn certificate(&self) -> Option<&LdlCertificate> {
        match self {
            PsdVerdict::Psd(c) => Some(c),
            PsdVerdict::NotPsd(_) => None,
        }
    }
}

impl LdlCertificate {
    pub fn order(&self) -> usize {
        self.permutation.len()
    }

    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.order();
        let mut cols: Vec<Vec<(usize, Rational)>> = (0..n).map(|r| vec![(r, super::one())]).collect();
        for (&(a, r), v) in &self.lower {
            cols[r].push((a, v.clone()));
        }
        let mut m = SymMatrix::zeros(n);
        for (r, col) in cols.iter().enumerate() {
            let d = &self.diag[r];
            if d.is_zero() {
                continue;
            }
            for (x, (a, la)) in col.iter().enumerate() {
                let dla = d * la;
                for (b, lb) in &col[x..] {
                    m.add_to(self.permutation[*a], self.permutation[*b], &(&dla * lb));
                }
            }
        }
        m
    }

    /// The weighted squares `d_r (Σ_a L[a][r] z_{P a})²` for every positive pivot,
    /// with forms expressed in original indices.
    pub fn squares(&self) -> Vec<(Rational, Vec<(usize, Rational)>)> {
        let n = self.order();
        let mut cols: Vec<Vec<(usize, Rational)>> =
            (0..n).map(|r| vec![(self.permutation[r], super::one())]).collect();
        for (&(a, r), v) in &self.lower {
            cols[r].push((self.permutation[a], v.clone()));
        }
        cols.into_iter()
            .enumerate()
            .filter(|(r, _)| !self.diag[*r].is_zero())
            .map(|(r, mut c)| {
                c.sort_by_key(|(i, _)| *i);
                (self.diag[r].clone(), c)
            })
            .collect()
    }
}

enum BlockOutcome {
    Factored { order: Vec<usize>, diag: Vec<Rational>, lower: Vec<(usize, usize, Rational)> },
    Witness(Vec<Rational>),
}

/// Semidefinite LDLᵀ with max-diagonal pivoting, run independently on every connected
/// block. A zero remaining diagonal forces the whole remaining block to vanish.
pub fn ldl_psd_certify(m: &SymMatrix) -> PsdVerdict {
    let n = m.order();
    if let Some(w) = cheap_witness(m) {
        let value = m.quad_form(&w);
        return PsdVerdict::NotPsd(NotPsdWitness { vector: w, value });
    }
    let mut permutation = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut lower = BTreeMap::new();
    for block in connected_components(m) {
        let sub = m.submatrix(&block);
        match factor_block(&sub) {
            BlockOutcome::Factored { order, diag: d, lower: l } => {
                let off = permutation.len();
                permutation.extend(order.iter().map(|&a| block[a]));
                diag.extend(d);
                for (a, b, v) in l {
                    lower.insert((off + a, off + b), v);
                }
            }
            BlockOutcome::Witness(w) => {
                let mut vector = vec![Rational::zero(); n];
                for (a, v) in w.into_iter().enumerate() {
                    vector[block[a]] = v;
                }
                let value = m.quad_form(&vector);
                assert!(value.is_negative(), "witness construction failed");
                return PsdVerdict::NotPsd(NotPsdWitness { vector, value });
            }
        }
    }
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    PsdVerdict::Psd(LdlCertificate { permutation, diag, lower, rank })
}

/// Negative diagonal entries and pairs with a_ii + a_jj < 2|a_ij| refute PSD with
/// one- or two-term vectors before any elimination.
fn cheap_witness(m: &SymMatrix) -> Option<Vec<Rational>> {
    let n = m.order();
    let unit = |i: usize, j: Option<(usize, Rational)>| {
        let mut w = vec![Rational::zero(); n];
        w[i] = super::one();
        if let Some((j, v)) = j {
            w[j] = v;
        }
        w
    };
    if let Some(i) = (0..n).find(|&i| m.get(i, i).is_negative()) {
        return Some(unit(i, None));
    }
    for (i, j, a) in m.iter() {
        if i != j && m.get(i, i) + m.get(j, j) < a.abs() * super::int(2) {
            let s = if a.is_positive() { -super::one() } else { super::one() };
            return Some(unit(i, Some((j, s))));
        }
    }
    None
}

fn factor_block(m: &SymMatrix) -> BlockOutcome {
    let b = m.order();
    let mut a = m.to_dense();
    let mut perm: Vec<usize> = (0..b).collect();
    let mut l: Vec<Vec<Rational>> = vec![vec![Rational::zero(); b]; b];
    let mut diag = Vec::with_capacity(b);
    for k in 0..b {
        // a negative remaining diagonal refutes PSD immediately
        if let Some(i) = (k..b).find(|&i| a[i][i].is_negative()) {
            let mut u = vec![Rational::zero(); b - k];
            u[i - k] = super::one();
            return BlockOutcome::Witness(lift(&l, &perm, k, u));
        }
        let p = (k..b).max_by(|&x, &y| a[x][x].cmp(&a[y][y]).then(y.cmp(&x))).unwrap();
        if a[p][p].is_zero() {
            for i in k..b {
                for j in (i + 1)..b {
                    if !a[i][j].is_zero() {
                        let mut u = vec![Rational::zero(); b - k];
                        u[i - k] = super::one();
                        u[j - k] = if a[i][j].is_positive() { -super::one() } else { super::one() };
                        return BlockOutcome::Witness(lift(&l, &perm, k, u));
                    }
                }
            }
            diag.extend((k..b).map(|_| Rational::zero()));
            break;
        }
        if p != k {
            a.swap(p, k);
            for row in a.iter_mut() {
                row.swap(p, k);
            }
            perm.swap(p, k);
            l.swap(p, k);
        }
        let d = a[k][k].clone();
        let inv = super::one() / &d;
        let col: Vec<Rational> = ((k + 1)..b).map(|i| &a[i][k] * &inv).collect();
        for (x, i) in ((k + 1)..b).enumerate() {
            if col[x].is_zero() {
                continue;
            }
            for j in i..b {
                if a[k][j].is_zero() {
                    continue;
                }
                let upd = &col[x] * &a[k][j];
                a[i][j] -= &upd;
                if i != j {
                    a[j][i] = a[i][j].clone();
                }
            }
            l[i][k] = col[x].clone();
        }
        diag.push(d);
    }
    let mut lower = Vec::new();
    for (i, row) in l.iter().enumerate() {
        for (j, v) in row.iter().enumerate().take(i) {
            if !v.is_zero() {
                lower.push((i, j, v.clone()));
            }
        }
    }
    BlockOutcome::Factored { order: perm, diag, lower }
}

/// Extends a vector `u` on the trailing Schur complement (pivots `k..`) to the full block
/// so that `wᵀ M w = uᵀ S u`, then undoes the permutation.
fn lift(l: &[Vec<Rational>], perm: &[usize], k: usize, u: Vec<Rational>) -> Vec<Rational> {
    let b = perm.len();
    let mut x = vec![Rational::zero(); b];
    for (t, v) in u.into_iter().enumerate() {
        x[k + t] = v;
    }
    for c in (0..k).rev() {
        let mut s = Rational::zero();
        for r in (c + 1)..b {
            if !l[r][c].is_zero() && !x[r].is_zero() {
                s += &l[r][c] * &x[r];
            }
        }
        x[c] = -s;
    }
    let mut w = vec![Rational::zero(); b];
    for (pos, &orig) in perm.iter().enumerate() {
        w[orig] = x[pos].clone();
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int};

    #[test]
    fn two_by_two_psd() {
        let m = SymMatrix::from_i64(&[&[2, -1], &[-1, 2]]).unwrap();
        let c = ldl_psd_certify(&m);
        let c = c.certificate().unwrap();
        assert_eq!(c.rank, 2);
        assert_eq!(c.diag, vec![int(2), frac(3, 2)]);
        assert_eq!(c.reconstruct(), m);
    }

    #[test]
    fn zero_matrix_rank_zero() {
        let m = SymMatrix::zeros(5);
        let c = ldl_psd_certify(&m);
        assert_eq!(c.certificate().unwrap().rank, 0);
        assert_eq!(c.certificate().unwrap().reconstruct(), m);
    }

    #[test]
    fn indefinite_gives_witness() {
        let m = SymMatrix::from_i64(&[&[1, 2], &[2, 1]]).unwrap();
        match ldl_psd_certify(&m) {
            PsdVerdict::NotPsd(w) => {
                assert_eq!(w.vector, vec![int(1), int(-1)]);
                assert_eq!(w.value, int(-2));
            }
            _ => panic!("expected witness"),
        }
    }

    #[test]
    fn zero_diagonal_with_coupling() {
        let m = SymMatrix::from_i64(&[&[1, 1, 0], &[1, 1, 3], &[0, 3, 0]]).unwrap();
        match ldl_psd_certify(&m) {
            PsdVerdict::NotPsd(w) => assert!(w.value.is_negative()),
            _ => panic!("expected witness"),
        }
    }

    #[test]
    fn semidefinite_with_kernel() {
        // rank-one (1,2,3)(1,2,3)ᵀ
        let m = SymMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[3, 6, 9]]).unwrap();
        let c = ldl_psd_certify(&m);
        let c = c.certificate().unwrap();
        assert_eq!(c.rank, 1);
        assert_eq!(c.reconstruct(), m);
        assert_eq!(c.squares().len(), 1);
    }
}
