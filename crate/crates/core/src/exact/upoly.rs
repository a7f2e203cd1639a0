use std::fmt;

use num_traits::{Signed, Zero};

use super::{ExactError, Rational};

/// Dense univariate polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_i64(ascending: &[i64]) -> Self {
        Self::new(ascending.iter().map(|&c| super::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + super::to_f64(c))
    }

    pub fn div_rem(&self, d: &UPoly) -> Result<(UPoly, UPoly), ExactError> {
        let dd = d.degree().ok_or(ExactError::ZeroDivisor)?;
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((UPoly::new(vec![]), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for s in (0..quot.len()).rev() {
            let c = &rem[s + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (t, dc) in d.coeffs.iter().enumerate() {
                rem[s + t] -= &c * dc;
            }
            quot[s] = c;
        }
        rem.truncate(dd);
        Ok((UPoly::new(quot), UPoly::new(rem)))
    }

    /// Sign changes in the coefficient sequence (Descartes' bound on positive roots).
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<bool> =
            self.coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Narrows a sign-change interval `(lo, hi)` by exact bisection `steps` times.
    pub fn bisect(&self, lo: &Rational, hi: &Rational, steps: usize) -> Option<(Rational, Rational)> {
        let (mut lo, mut hi) = (lo.clone(), hi.clone());
        let slo = self.eval(&lo).signum();
        if slo.is_zero() || slo == self.eval(&hi).signum() {
            return None;
        }
        let two = super::int(2);
        for _ in 0..steps {
            let mid = (&lo + &hi) / &two;
            let sm = self.eval(&mid).signum();
            if sm.is_zero() {
                return Some((mid.clone(), mid));
            }
            if sm == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some((lo, hi))
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = d == 0 || a != super::one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match d {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{d}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn division_exact() {
        let a = UPoly::from_i64(&[-1, 0, 1]); // x²−1
        let b = UPoly::from_i64(&[1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, UPoly::from_i64(&[-1, 1]));
        assert!(r.is_zero());
        assert!(a.div_rem(&UPoly::new(vec![])).is_err());
    }

    #[test]
    fn bisect_and_display() {
        let p = UPoly::from_i64(&[-2, 0, 1]);
        let (lo, hi) = p.bisect(&int(1), &int(2), 20).unwrap();
        assert!(lo < hi && &hi - &lo < crate::exact::frac(1, 1000));
        assert_eq!(p.to_string(), "x^2 - 2");
        assert_eq!(p.sign_changes(), 1);
    }
}
