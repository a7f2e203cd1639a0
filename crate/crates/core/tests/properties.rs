use bwsos_core::constraints::{all_quadruples, plucker_constraint};
use bwsos_core::exact::{
    char_poly, connected_components, determinant, frac, int, ldl_psd_certify, PsdVerdict, Rational, SymMatrix,
};
use bwsos_core::indexing::{decode_pos, pos_index};
use bwsos_core::sdpsolve::rational_approx;
use num_traits::Zero;
use proptest::prelude::*;

fn dense(rows: &[Vec<i64>]) -> SymMatrix {
    let n = rows.len();
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, int(rows[i][j]));
        }
    }
    m
}

/// Gram matrix BᵀB of a random integer matrix, with a sparse pattern so that blocks appear.
fn psd_strategy() -> impl Strategy<Value = SymMatrix> {
    (1usize..7, 1usize..5).prop_flat_map(|(n, r)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], n), r).prop_map(
            move |b| {
                let mut m = SymMatrix::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        let v: i64 = b.iter().map(|row| row[i] * row[j]).sum();
                        m.set(i, j, int(v));
                    }
                }
                m
            },
        )
    })
}

fn sym_strategy() -> impl Strategy<Value = SymMatrix> {
    (1usize..6).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(-4i64..=4, n), n).prop_map(|a| {
            let n = a.len();
            let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| a[i.min(j)][i.max(j)]).collect()).collect();
            dense(&rows)
        })
    })
}

proptest! {
    #[test]
    fn ldl_reconstructs_psd_input(m in psd_strategy()) {
        match ldl_psd_certify(&m) {
            PsdVerdict::Psd(c) => prop_assert_eq!(c.reconstruct(), m),
            PsdVerdict::NotPsd(w) => prop_assert!(false, "Gram matrix refuted with value {}", w.value),
        }
    }

    #[test]
    fn not_psd_witness_is_negative(m in sym_strategy()) {
        if let PsdVerdict::NotPsd(w) = ldl_psd_certify(&m) {
            prop_assert!(w.value < Rational::zero());
            prop_assert_eq!(m.quad_form(&w.vector), w.value);
        }
    }

    #[test]
    fn components_invariant_under_permutation(m in sym_strategy(), seed in any::<u64>()) {
        let n = m.order();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = m.permuted(&perm);
        let mut a: Vec<usize> = connected_components(&m).iter().map(|c| c.len()).collect();
        let mut b: Vec<usize> = connected_components(&p).iter().map(|c| c.len()).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        prop_assert_eq!(determinant(&m), determinant(&p));
    }

    #[test]
    fn charpoly_at_zero_is_signed_determinant(m in sym_strategy()) {
        let p = char_poly(&m).unwrap();
        let sign = if m.order() % 2 == 0 { int(1) } else { int(-1) };
        prop_assert_eq!(p.eval(&Rational::zero()), sign * determinant(&m));
    }

    #[test]
    fn pos_is_a_bijection(j in 2usize..200, di in 1usize..200) {
        let i = 1 + (di - 1) % (j - 1);
        let k = pos_index(i, j).unwrap();
        prop_assert_eq!(decode_pos(k), (i, j));
        if i > 1 {
            prop_assert_eq!(pos_index(i - 1, j).unwrap() + 1, k);
        } else if j > 2 {
            prop_assert_eq!(pos_index(j - 2, j - 1).unwrap() + 1, k);
        }
    }

    #[test]
    fn plucker_forms_vanish_on_rank_two_points(p in prop::collection::vec(-5i64..=5, 6), q in prop::collection::vec(-5i64..=5, 6)) {
        let m = 6;
        let mut z = vec![Rational::zero(); m * (m - 1) / 2];
        for j in 2..=m {
            for i in 1..j {
                z[pos_index(i, j).unwrap() - 1] = int(p[i - 1] * q[j - 1] - q[i - 1] * p[j - 1]);
            }
        }
        for quad in all_quadruples(m) {
            let a = plucker_constraint(quad, m).unwrap();
            prop_assert!(a.mat.quad_form(&z).is_zero(), "{quad}");
        }
    }

    #[test]
    fn rational_approx_is_close(num in -500i64..500, den in 1i64..40, noise in -1e-9f64..1e-9) {
        let x = num as f64 / den as f64 + noise;
        prop_assert_eq!(rational_approx(x, 64), frac(num, den));
    }
}
