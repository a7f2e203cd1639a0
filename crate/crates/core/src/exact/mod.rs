//! Exact rational scalars, sparse symmetric matrices, polynomials and the
//! linear-algebra kernels used to certify positive semidefiniteness.

mod graph;
mod ldl;
mod poly;
mod spectral;
mod sym;
mod upoly;

pub use graph::connected_components;
pub use ldl::{ldl_psd_certify, LdlCertificate, NotPsdWitness, PsdVerdict};
pub use poly::{Monomial, Poly, MAX_DEGREE};
pub use spectral::{
    char_poly, char_poly_bounded, determinant, nullity_at, rank, CHAR_POLY_DEFAULT_BOUND,
};
pub use sym::SymMatrix;
pub use upoly::UPoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("entry ({row}, {col}) differs from its transpose")]
    NonSymmetricInput { row: usize, col: usize },
    #[error("index ({row}, {col}) out of range for order {order}")]
    IndexOutOfRange { row: usize, col: usize, order: usize },
    #[error("matrix of order {order} exceeds the characteristic polynomial bound {bound}")]
    OrderTooLarge { order: usize, bound: usize },
    #[error("monomial degree exceeds {max}")]
    DegreeOverflow { max: usize },
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders `r` as `num/den`, including a `/1` denominator for integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let bad = || ExactError::ParseRational(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // fall back to a scaled quotient for huge operands
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub(crate) fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let r = frac(-6, 4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(format_rational(&int(540)), "540/1");
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let r = frac(4, -8);
        assert_eq!(r.numer(), &BigInt::from(-1));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 4), 126);
        assert_eq!(binomial(25, 2), 300);
        assert_eq!(binomial(3, 4), 0);
    }
}
