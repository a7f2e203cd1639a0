//! Commutator entries as linear forms in the candidates, the objective Gram matrix C and
//! the biquadratic form itself as a polynomial in (p, q).
//!
//! Polynomial variables: p_i is variable `i-1`, q_i is variable `m+i-1`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exact::{frac, int, Poly, Rational, SymMatrix};
use crate::indexing::{
    build_index_matrix, normalize_candidate, CandidateSpace, IndexError, IndexMatrix, MatrixClass,
};

/// Linear form keyed by 0-based candidate slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: BTreeMap<usize, Rational>,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(it: I) -> Self {
        let mut f = Self::new();
        for (k, c) in it {
            f.add(k, &c);
        }
        f
    }

    pub fn add(&mut self, slot: usize, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(slot).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&slot);
        }
    }

    pub fn add_form(&mut self, o: &LinearForm, s: &Rational) {
        for (k, c) in &o.coeffs {
            self.add(*k, &(c * s));
        }
    }

    pub fn get(&self, slot: usize) -> Rational {
        self.coeffs.get(&slot).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `target += s · ℓℓᵀ`, so that zᵀ·target·z gains s·ℓ(z)².
    pub fn add_gram_to(&self, target: &mut SymMatrix, s: &Rational) {
        let terms: Vec<_> = self.coeffs.iter().collect();
        for (x, (a, ca)) in terms.iter().enumerate() {
            for (b, cb) in &terms[x..] {
                target.add_to(**a, **b, &(*ca * *cb * s));
            }
        }
    }

    pub fn to_poly(&self, m: usize) -> Poly {
        let mut p = Poly::zero();
        for (k, c) in &self.coeffs {
            p.add_scaled(&candidate_poly(m, *k), c);
        }
        p
    }
}

/// R = [P, Q] with every entry a linear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorTable {
    pub n: usize,
    pub entries: Vec<Vec<LinearForm>>,
}

impl CommutatorTable {
    pub fn get(&self, i: usize, j: usize) -> &LinearForm {
        &self.entries[i][j]
    }
}

pub fn commutator_forms(ind: &IndexMatrix) -> CommutatorTable {
    let n = ind.n;
    let mut entries = vec![vec![LinearForm::new(); n]; n];
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, f) in row.iter_mut().enumerate() {
            for k in 0..n {
                let (Some(a), Some(b)) = (ind.get(i, k), ind.get(k, j)) else { continue };
                if let Some((pos, s)) = normalize_candidate(a, b) {
                    f.add(pos - 1, &int(s as i64));
                }
            }
        }
    }
    CommutatorTable { n, entries }
}

/// zᵀCz = scale·BW. The Hankel and Toeplitz classes carry a factor ½.
pub fn objective_scale(class: MatrixClass) -> Rational {
    match class {
        MatrixClass::Hankel | MatrixClass::Toeplitz => frac(1, 2),
        _ => int(1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub class: MatrixClass,
    pub n: usize,
    pub space: CandidateSpace,
    pub mat: SymMatrix,
    pub scale: Rational,
}

/// C = scale·(D_μ − Σ Gram(R(i,j))), D_μ diagonal with 2μ_iμ_j at z_{i,j}.
pub fn objective_gram(class: MatrixClass, n: usize) -> Result<GramMatrix, IndexError> {
    let ind = build_index_matrix(class, n)?;
    let space = CandidateSpace::new(&ind);
    let scale = objective_scale(class);
    let mut mat = SymMatrix::zeros(space.size);
    for j in 2..=space.m {
        for i in 1..j {
            let d = int(2 * (space.mu[i - 1] * space.mu[j - 1]) as i64) * &scale;
            mat.add_to(space.slot(i, j), space.slot(i, j), &d);
        }
    }
    let r = commutator_forms(&ind);
    let neg = -scale.clone();
    for row in &r.entries {
        for f in row {
            f.add_gram_to(&mut mat, &neg);
        }
    }
    Ok(GramMatrix { class, n, space, mat, scale })
}

pub fn p_var(i: usize) -> u32 {
    (i - 1) as u32
}

pub fn q_var(m: usize, i: usize) -> u32 {
    (m + i - 1) as u32
}

/// z_{i,j} = p_i q_j − q_i p_j for the candidate in `slot`.
pub fn candidate_poly(m: usize, slot: usize) -> Poly {
    let (i, j) = crate::indexing::decode_pos(slot + 1);
    let pq = &Poly::var(p_var(i)) * &Poly::var(q_var(m, j));
    let qp = &Poly::var(q_var(m, i)) * &Poly::var(p_var(j));
    &pq - &qp
}

/// zᵀ·G·z after substituting every candidate.
pub fn substitute_gram(g: &SymMatrix, m: usize) -> Poly {
    let zs: Vec<Poly> = (0..g.order()).map(|k| candidate_poly(m, k)).collect();
    let mut out = Poly::zero();
    let two = int(2);
    for (a, b, v) in g.iter() {
        let c = if a == b { v.clone() } else { v * &two };
        out.add_scaled(&(&zs[a] * &zs[b]), &c);
    }
    out
}

/// 2(‖P‖²‖Q‖² − ⟨P,Q⟩²) − ‖PQ − QP‖², straight from the entry variables.
pub fn bw_polynomial(class: MatrixClass, n: usize) -> Result<Poly, IndexError> {
    let ind = build_index_matrix(class, n)?;
    let m = ind.m;
    let cell = |i: usize, j: usize, q: bool| -> Poly {
        match ind.get(i, j) {
            Some(id) => Poly::var(if q { q_var(m, id) } else { p_var(id) }),
            None => Poly::zero(),
        }
    };
    let mut pp = Poly::zero();
    let mut qq = Poly::zero();
    let mut pq = Poly::zero();
    for i in 0..n {
        for j in 0..n {
            let (p, q) = (cell(i, j, false), cell(i, j, true));
            pp = &pp + &(&p * &p);
            qq = &qq + &(&q * &q);
            pq = &pq + &(&p * &q);
        }
    }
    let mut bw = &(&pp * &qq) - &(&pq * &pq);
    bw = bw.scale(&int(2));
    for i in 0..n {
        for j in 0..n {
            let mut r = Poly::zero();
            for k in 0..n {
                r = &r + &(&cell(i, k, false) * &cell(k, j, true));
                r = &r - &(&cell(i, k, true) * &cell(k, j, false));
            }
            bw = &bw - &(&r * &r);
        }
    }
    Ok(bw)
}

/// μ for the Toeplitz class: offset d (upper or lower) occurs n−d times.
pub fn toeplitz_multiplicities(n: usize) -> Result<Vec<usize>, IndexError> {
    if n < 2 {
        return Err(IndexError::UnsupportedOrder(n));
    }
    Ok((1..n).map(|d| n - d).chain((1..n).map(|d| n - d)).collect())
}

/// Checks 2(‖P‖²‖Q‖² − ⟨P,Q⟩²) = 2Σ μ_iμ_j z_{i,j}² for Toeplitz order n by expansion.
pub fn toeplitz_multiplicity_identity(n: usize) -> Result<bool, IndexError> {
    let ind = build_index_matrix(MatrixClass::Toeplitz, n)?;
    let m = ind.m;
    let mu = toeplitz_multiplicities(n)?;
    let mut pp = Poly::zero();
    let mut qq = Poly::zero();
    let mut pq = Poly::zero();
    for (id, &k) in mu.iter().enumerate() {
        let (p, q) = (Poly::var(p_var(id + 1)), Poly::var(q_var(m, id + 1)));
        let k = int(k as i64);
        pp.add_scaled(&(&p * &p), &k);
        qq.add_scaled(&(&q * &q), &k);
        pq.add_scaled(&(&p * &q), &k);
    }
    let lhs = (&(&pp * &qq) - &(&pq * &pq)).scale(&int(2));
    let mut d = SymMatrix::zeros(m * (m - 1) / 2);
    for j in 2..=m {
        for i in 1..j {
            let s = crate::indexing::pos_index(i, j).unwrap() - 1;
            d.set(s, s, int(2 * (mu[i - 1] * mu[j - 1]) as i64));
        }
    }
    Ok(lhs == substitute_gram(&d, m))
}

/// Compares ‖R‖² with the compressed expression 2Σ_{i=1}^{2}Σ_{j=1}^{n−i} R(i,j)² for a
/// Toeplitz commutator, both as Gram matrices in the candidates.
pub fn toeplitz_compressed_norm_matches(n: usize) -> Result<bool, IndexError> {
    let ind = build_index_matrix(MatrixClass::Toeplitz, n)?;
    let size = ind.m * (ind.m - 1) / 2;
    let r = commutator_forms(&ind);
    let mut full = SymMatrix::zeros(size);
    for row in &r.entries {
        for f in row {
            f.add_gram_to(&mut full, &int(1));
        }
    }
    let mut comp = SymMatrix::zeros(size);
    for i in 0..2.min(n) {
        for j in 0..(n - i - 1) {
            r.get(i, j).add_gram_to(&mut comp, &int(2));
        }
    }
    let m = ind.m;
    Ok(substitute_gram(&full, m) == substitute_gram(&comp, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(pairs: &[(usize, usize, i64)]) -> LinearForm {
        LinearForm::from_pairs(
            pairs.iter().map(|&(i, j, c)| (crate::indexing::pos_index(i, j).unwrap() - 1, int(c))),
        )
    }

    #[test]
    fn commutator_examples() {
        let g = commutator_forms(&build_index_matrix(MatrixClass::General, 3).unwrap());
        assert_eq!(g.get(0, 1), &form(&[(1, 2, 1), (2, 5, 1), (3, 8, 1)]));
        let t = commutator_forms(&build_index_matrix(MatrixClass::Toeplitz, 5).unwrap());
        assert_eq!(t.get(0, 0), &form(&[(1, 5, 1), (2, 6, 1), (3, 7, 1), (4, 8, 1)]));
        assert_eq!(t.get(1, 1), &form(&[(2, 6, 1), (3, 7, 1)]));
        let c = commutator_forms(&build_index_matrix(MatrixClass::CyclicHankel, 4).unwrap());
        let tf = form(&[(1, 2, 1), (2, 3, 1), (3, 4, 1), (1, 4, -1)]);
        let mut neg = LinearForm::new();
        neg.add_form(&tf, &int(-1));
        assert!(c.get(0, 0).is_empty());
        assert_eq!(c.get(0, 1), &tf);
        assert!(c.get(0, 2).is_empty());
        assert_eq!(c.get(0, 3), &neg);
    }

    #[test]
    fn general_trace_of_c() {
        let g = objective_gram(MatrixClass::General, 3).unwrap();
        assert_eq!(g.mat.trace(), int(48));
    }

    #[test]
    fn toeplitz_small_facts() {
        assert_eq!(toeplitz_multiplicities(3).unwrap(), vec![2, 1, 2, 1]);
        assert_eq!(toeplitz_multiplicities(2).unwrap(), vec![1, 1]);
        assert_eq!(toeplitz_multiplicities(5).unwrap(), vec![4, 3, 2, 1, 4, 3, 2, 1]);
        // diagonal at z_{1,3}: ½·2·μ₁μ₃ = 4, less the commutator contribution
        let g = objective_gram(MatrixClass::Toeplitz, 3).unwrap();
        let s = crate::indexing::pos_index(1, 3).unwrap() - 1;
        assert_eq!(g.mat.get(s, s), int(3));
    }

    #[test]
    fn bw_at_unit_matrices() {
        let bw = bw_polynomial(MatrixClass::General, 2).unwrap();
        // p = E11, q = E12
        let mut x = vec![int(0); 8];
        x[0] = int(1);
        x[4 + 1] = int(1);
        assert_eq!(bw.eval(&x), int(1));
    }
}
