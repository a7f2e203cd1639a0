use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::{ExactError, Rational};

pub const MAX_DEGREE: usize = 4;

/// Product of at most four variables, stored as a sorted index list.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    len: u8,
    vars: [u32; MAX_DEGREE],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { len: 0, vars: [0; MAX_DEGREE] };

    pub fn new(vars: &[u32]) -> Result<Self, ExactError> {
        if vars.len() > MAX_DEGREE {
            return Err(ExactError::DegreeOverflow { max: MAX_DEGREE });
        }
        let mut v = [0u32; MAX_DEGREE];
        v[..vars.len()].copy_from_slice(vars);
        v[..vars.len()].sort_unstable();
        Ok(Monomial { len: vars.len() as u8, vars: v })
    }

    pub fn vars(&self) -> &[u32] {
        &self.vars[..self.len as usize]
    }

    pub fn degree(&self) -> usize {
        self.len as usize
    }

    pub fn mul(&self, o: &Monomial) -> Result<Monomial, ExactError> {
        let d = self.degree() + o.degree();
        if d > MAX_DEGREE {
            return Err(ExactError::DegreeOverflow { max: MAX_DEGREE });
        }
        let mut all = [0u32; MAX_DEGREE];
        all[..self.degree()].copy_from_slice(self.vars());
        all[self.degree()..d].copy_from_slice(o.vars());
        Monomial::new(&all[..d])
    }
}

/// Sparse polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::ONE, &c);
        p
    }

    pub fn var(v: u32) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::new(&[v]).unwrap(), &super::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add_scaled(&mut self, o: &Poly, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(*m, &(c * s));
        }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        let mut p = Poly::zero();
        p.add_scaled(self, s);
        p
    }

    pub fn try_mul(&self, o: &Poly) -> Result<Poly, ExactError> {
        let mut p = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                p.add_term(ma.mul(mb)?, &(ca * cb));
            }
        }
        Ok(p)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &v in m.vars() {
                t *= &x[v as usize];
            }
            acc += t;
        }
        acc
    }

    /// Renames every variable through `f` (e.g. identifying q with p).
    pub fn map_vars<F: Fn(u32) -> u32>(&self, f: F) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in &self.terms {
            let vs: Vec<u32> = m.vars().iter().map(|&v| f(v)).collect();
            p.add_term(Monomial::new(&vs).unwrap(), c);
        }
        p
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_scaled(o, &super::one());
        p
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_scaled(o, &-super::one());
        p
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-super::one())
    }
}

/// Panics past degree four; use `try_mul` where that can happen.
impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.try_mul(o).expect("degree overflow")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn difference_of_squares() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let lhs = &(&x + &y) * &(&x - &y);
        let rhs = &(&x * &x) - &(&y * &y);
        assert_eq!(lhs, rhs);
        assert!((&lhs - &rhs).is_zero());
        assert_eq!(lhs.eval(&[int(3), int(2)]), int(5));
    }

    #[test]
    fn degree_cap() {
        let x = Poly::var(0);
        let x4 = &(&x * &x) * &(&x * &x);
        assert_eq!(x4.degree(), Some(4));
        assert!(x4.try_mul(&x).is_err());
        assert!(Monomial::new(&[1, 2, 3, 4, 5]).is_err());
    }

    #[test]
    fn renaming_merges_terms() {
        let p = &(&Poly::var(0) * &Poly::var(3)) - &(&Poly::var(1) * &Poly::var(2));
        // z = p0 q1 − p1 q0 with q ↦ p vanishes
        let z = p.map_vars(|v| if v >= 2 { v - 2 } else { v });
        assert!(z.is_zero());
    }
}
