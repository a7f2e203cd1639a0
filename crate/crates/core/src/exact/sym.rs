use std::collections::BTreeMap;

use num_traits::Zero;

use super::{ExactError, Rational};

/// Sparse symmetric rational matrix. Only `row <= col` is stored; absent means zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymMatrix {
    order: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

#[inline]
fn key(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix { order, entries: BTreeMap::new() }
    }

    pub fn scalar(order: usize, v: &Rational) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn identity(order: usize) -> Self {
        Self::scalar(order, &super::one())
    }

    /// Builds from a full (row, col, value) list. Both triangles may be given, but any
    /// entry that is given in both places must agree.
    pub fn from_entries<I>(order: usize, entries: I) -> Result<Self, ExactError>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut full: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (i, j, v) in entries {
            if i >= order || j >= order {
                return Err(ExactError::IndexOutOfRange { row: i, col: j, order });
            }
            *full.entry((i, j)).or_insert_with(Rational::zero) += v;
        }
        let mut m = Self::zeros(order);
        for (&(i, j), v) in &full {
            if i == j {
                m.set(i, i, v.clone());
                continue;
            }
            let t = full.get(&(j, i));
            match t {
                Some(t) if t != v => return Err(ExactError::NonSymmetricInput { row: i, col: j }),
                None if !v.is_zero() => {
                    return Err(ExactError::NonSymmetricInput { row: i, col: j })
                }
                _ => m.set(i, j, v.clone()),
            }
        }
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Result<Self, ExactError> {
        let order = rows.len();
        let mut list = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != order {
                return Err(ExactError::IndexOutOfRange { row: i, col: r.len(), order });
            }
            for (j, v) in r.iter().enumerate() {
                if !v.is_zero() {
                    list.push((i, j, v.clone()));
                }
            }
        }
        Self::from_entries(order, list)
    }

    /// Convenience for small literal matrices.
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, ExactError> {
        let dense: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&v| super::int(v)).collect()).collect();
        Self::from_dense(&dense)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&key(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get_ref(&self, i: usize, j: usize) -> Option<&Rational> {
        self.entries.get(&key(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.order && j < self.order, "index out of range");
        if v.is_zero() {
            self.entries.remove(&key(i, j));
        } else {
            self.entries.insert(key(i, j), v);
        }
    }

    /// Adds `v` to entry (i,j) (and hence to its mirror).
    pub fn add_to(&mut self, i: usize, j: usize, v: &Rational) {
        assert!(i < self.order && j < self.order, "index out of range");
        if v.is_zero() {
            return;
        }
        let k = key(i, j);
        let cur = self.entries.entry(k).or_insert_with(Rational::zero);
        *cur += v;
        if cur.is_zero() {
            self.entries.remove(&k);
        }
    }

    /// Upper-triangle nonzeros `(row, col, value)` with `row <= col`, in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> Rational {
        self.iter().filter(|(i, j, _)| i == j).fold(Rational::zero(), |a, (_, _, v)| a + v)
    }

    pub fn shift_diagonal(&mut self, s: &Rational) {
        for i in 0..self.order {
            self.add_to(i, i, s);
        }
    }

    pub fn scaled(&self, s: &Rational) -> SymMatrix {
        if s.is_zero() {
            return Self::zeros(self.order);
        }
        SymMatrix {
            order: self.order,
            entries: self.entries.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &SymMatrix, s: &Rational) {
        assert_eq!(self.order, other.order, "order mismatch");
        for (i, j, v) in other.iter() {
            self.add_to(i, j, &(v * s));
        }
    }

    pub fn submatrix(&self, idx: &[usize]) -> SymMatrix {
        let mut m = Self::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate().skip(a) {
                if let Some(v) = self.get_ref(i, j) {
                    m.set(a, b, v.clone());
                }
            }
        }
        m
    }

    /// Symmetric permutation: result(a,b) = self(perm[a], perm[b]).
    pub fn permuted(&self, perm: &[usize]) -> SymMatrix {
        assert_eq!(perm.len(), self.order);
        self.submatrix(perm)
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.order]; self.order];
        for (i, j, v) in self.iter() {
            d[i][j] = v.clone();
            d[j][i] = v.clone();
        }
        d
    }

    pub fn to_f64_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.order]; self.order];
        for (i, j, v) in self.iter() {
            let f = super::to_f64(v);
            d[i][j] = f;
            d[j][i] = f;
        }
        d
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.order);
        let mut out = vec![Rational::zero(); self.order];
        for (i, j, a) in self.iter() {
            if !v[j].is_zero() {
                out[i] += a * &v[j];
            }
            if i != j && !v[i].is_zero() {
                out[j] += a * &v[i];
            }
        }
        out
    }

    pub fn quad_form(&self, v: &[Rational]) -> Rational {
        let two = super::int(2);
        let mut acc = Rational::zero();
        for (i, j, a) in self.iter() {
            if v[i].is_zero() || v[j].is_zero() {
                continue;
            }
            let t = a * &v[i] * &v[j];
            acc += if i == j { t } else { t * &two };
        }
        acc
    }

    /// tr(self · other) for two symmetric matrices.
    pub fn trace_product(&self, other: &SymMatrix) -> Rational {
        assert_eq!(self.order, other.order);
        let (small, big) = if self.nnz() <= other.nnz() { (self, other) } else { (other, self) };
        let two = super::int(2);
        let mut acc = Rational::zero();
        for (i, j, a) in small.iter() {
            if let Some(b) = big.get_ref(i, j) {
                let t = a * b;
                acc += if i == j { t } else { t * &two };
            }
        }
        acc
    }

    /// Neighbour lists of the off-diagonal sparsity graph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.order];
        for (i, j, _) in self.iter() {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn min_off_diagonal(&self) -> Option<Rational> {
        self.iter().filter(|(i, j, _)| i != j).map(|(_, _, v)| v.clone()).min()
    }

    pub fn max_diagonal(&self) -> Option<Rational> {
        (0..self.order).map(|i| self.get(i, i)).max()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{frac, int};
    use super::*;

    #[test]
    fn asymmetric_entries_are_rejected() {
        let err = SymMatrix::from_entries(2, vec![(0, 1, int(1)), (1, 0, int(2))]).unwrap_err();
        assert_eq!(err, ExactError::NonSymmetricInput { row: 0, col: 1 });
        let err = SymMatrix::from_entries(2, vec![(0, 1, int(1))]).unwrap_err();
        assert!(matches!(err, ExactError::NonSymmetricInput { .. }));
        assert!(SymMatrix::from_entries(2, vec![(3, 0, int(1))]).is_err());
    }

    #[test]
    fn quad_form_and_products() {
        let m = SymMatrix::from_i64(&[&[2, -1], &[-1, 2]]).unwrap();
        let v = vec![int(1), int(1)];
        assert_eq!(m.quad_form(&v), int(2));
        assert_eq!(m.mul_vec(&v), vec![int(1), int(1)]);
        assert_eq!(m.trace_product(&m), int(10));
        assert_eq!(m.trace(), int(4));
        let mut z = m.clone();
        z.add_scaled(&m, &frac(-1, 1));
        assert_eq!(z.nnz(), 0);
    }
}
