use num_traits::Zero;

use super::{connected_components, ExactError, Rational, SymMatrix, UPoly};

pub const CHAR_POLY_DEFAULT_BOUND: usize = 24;

fn dense_rank(mut a: Vec<Vec<Rational>>) -> usize {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        let inv = super::one() / &a[rank][c];
        for r in (rank + 1)..rows {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &inv;
            for j in c..cols {
                if !a[rank][j].is_zero() {
                    let t = &f * &a[rank][j];
                    a[r][j] -= t;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn rank(m: &SymMatrix) -> usize {
    connected_components(m).iter().map(|b| dense_rank(m.submatrix(b).to_dense())).sum()
}

/// dim ker(M − λI), by exact elimination on each connected block.
pub fn nullity_at(m: &SymMatrix, lambda: &Rational) -> usize {
    let mut shifted = m.clone();
    shifted.shift_diagonal(&-lambda.clone());
    // the shift cannot change the off-diagonal pattern, so blocks are those of m
    connected_components(m)
        .iter()
        .map(|b| b.len() - dense_rank(shifted.submatrix(b).to_dense()))
        .sum()
}

pub fn determinant(m: &SymMatrix) -> Rational {
    let mut a = m.to_dense();
    let n = a.len();
    let mut det = super::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = super::one() / &a[c][c];
        for r in (c + 1)..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &inv;
            for j in c..n {
                if !a[c][j].is_zero() {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    det
}

pub fn char_poly(m: &SymMatrix) -> Result<UPoly, ExactError> {
    char_poly_bounded(m, CHAR_POLY_DEFAULT_BOUND)
}

/// Monic det(xI − M) by Faddeev–LeVerrier.
pub fn char_poly_bounded(m: &SymMatrix, bound: usize) -> Result<UPoly, ExactError> {
    let n = m.order();
    if n > bound {
        return Err(ExactError::OrderTooLarge { order: n, bound });
    }
    let a = m.to_dense();
    // coefficients c_n = 1, c_{n-1}, ..., c_0 of xⁿ + c_{n-1}x^{n-1} + ...
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = super::one();
    let mut mk = vec![vec![Rational::zero(); n]; n]; // M_0 = 0
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if a[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !mk[l][j].is_zero() {
                        next[i][j] += &a[i][l] * &mk[l][j];
                    }
                }
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        mk = next;
        // c_{n-k} = -tr(A M_k)/k
        let mut tr = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                if !a[i][l].is_zero() && !mk[l][i].is_zero() {
                    tr += &a[i][l] * &mk[l][i];
                }
            }
        }
        coeffs[n - k] = -tr / super::int(k as i64);
    }
    Ok(UPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn nullity_identity_and_b3() {
        assert_eq!(nullity_at(&SymMatrix::identity(7), &int(1)), 7);
        let b3 = SymMatrix::from_i64(&[&[2, -1], &[-1, 2]]).unwrap();
        assert_eq!(nullity_at(&b3, &int(3)), 1);
        assert_eq!(nullity_at(&b3, &int(1)), 1);
        assert_eq!(nullity_at(&b3, &int(2)), 0);
    }

    #[test]
    fn char_poly_small() {
        let b3 = SymMatrix::from_i64(&[&[2, -1], &[-1, 2]]).unwrap();
        assert_eq!(char_poly(&b3).unwrap(), UPoly::from_i64(&[3, -4, 1]));
        assert_eq!(char_poly(&SymMatrix::identity(2)).unwrap(), UPoly::from_i64(&[1, -2, 1]));
        assert!(matches!(
            char_poly_bounded(&SymMatrix::identity(5), 4),
            Err(ExactError::OrderTooLarge { order: 5, bound: 4 })
        ));
    }

    #[test]
    fn determinant_matches_constant_term() {
        let m = SymMatrix::from_i64(&[&[4, 1, 0], &[1, 3, -2], &[0, -2, 5]]).unwrap();
        let p = char_poly(&m).unwrap();
        assert_eq!(p.eval(&int(0)), -determinant(&m));
        assert_eq!(rank(&m), 3);
    }
}
