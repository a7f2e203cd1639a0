//! Certificates for the structured classes: the tridiagonal identity, backward
//! tridiagonal counting, cyclic Hankel sums of squares, the Hankel n=3 fixture and the
//! Toeplitz block analysis.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::bwform::{bw_polynomial, commutator_forms, objective_gram, p_var, q_var, substitute_gram, LinearForm};
use crate::certificates::{
    block_spectra, build_dual, size_multiset, total_spectrum, verify_identity, BlockSpectrum, CertError,
    DualCertificate, SosDecomposition, SosTerm,
};
use crate::constraints::{all_quadruples, full_elimination, mixed_pairs, strategy_b, term_counts, DualVector, Quadruple};
use crate::exact::{
    char_poly, connected_components, format_rational, frac, int, ldl_psd_certify, nullity_at, Poly, PsdVerdict,
    Rational, SymMatrix, UPoly,
};
use crate::indexing::{build_index_matrix, normalize_candidate, pos_index, IndexError, MatrixClass};
use crate::report::Report;
use crate::sdpsolve::{self, ConstraintSelection, SolverOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructuredError {
    #[error("summand family {family} is empty for n = {n}")]
    UnsatisfiableRange { family: &'static str, n: usize },
    #[error("no Toeplitz block for k = {k}, n = {n}")]
    BadSize { k: usize, n: usize },
    #[error("order {0} is not supported here")]
    UnsupportedOrder(usize),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error("solver: {0}")]
    Solver(String),
}

impl From<sdpsolve::SolveError> for StructuredError {
    fn from(e: sdpsolve::SolveError) -> Self {
        StructuredError::Solver(e.to_string())
    }
}

type Res<T> = Result<T, StructuredError>;

fn spec_string(m: &BTreeMap<Rational, usize>) -> String {
    let v: Vec<String> = m.iter().map(|(k, c)| format!("{}^{c}", format_rational(k))).collect();
    format!("{{{}}}", v.join(", "))
}

fn mult(m: &BTreeMap<Rational, usize>, l: i64) -> usize {
    m.get(&int(l)).copied().unwrap_or(0)
}

/// Linear form Σ c·z_{a,b} over signed id pairs; a term with an id outside [1, m] is zero.
fn form_in_range(m: usize, terms: &[(i64, i64, i64)]) -> LinearForm {
    let mut f = LinearForm::new();
    for &(a, b, c) in terms {
        if a < 1 || b < 1 || a > m as i64 || b > m as i64 {
            continue;
        }
        if let Some((pos, s)) = normalize_candidate(a as usize, b as usize) {
            f.add(pos - 1, &int(c * s as i64));
        }
    }
    f
}

// ---------------------------------------------------------------------------
// tridiagonal

/// Table 2: (n, λ=0, λ=1, λ=2, λ=3, 2×2 blocks, active, rank X).
pub const TABLE2: [[usize; 8]; 7] = [
    [2, 3, 0, 3, 0, 2, 0, 3],
    [3, 7, 1, 12, 1, 6, 1, 7],
    [4, 11, 2, 30, 2, 10, 2, 11],
    [5, 15, 3, 57, 3, 14, 3, 15],
    [6, 19, 4, 93, 4, 18, 4, 19],
    [7, 23, 5, 138, 5, 22, 5, 23],
    [8, 27, 6, 192, 6, 26, 6, 27],
];

#[derive(Clone, Debug)]
pub struct TridiagIdentity {
    pub n: usize,
    /// Gram matrix of the displayed BW side
    pub lhs_gram: SymMatrix,
    /// the displayed squares, including the cancelling family with coefficient −1
    pub rhs_sos: SosDecomposition,
    pub active: Vec<Quadruple>,
    pub dual: DualCertificate,
}

type Family = (&'static str, i64, fn(i64) -> Vec<(i64, i64, i64)>);

const LHS_FAMILIES: [Family; 5] = [
    ("lhs_pair_diff", -1, |i| vec![(3 * i - 4, 3 * i - 3, 1), (3 * i - 1, 3 * i, -1)]),
    ("lhs_far_mid", -1, |i| vec![(3 * i - 1, 3 * i + 2, 1)]),
    ("lhs_far_right", -1, |i| vec![(3 * i, 3 * i + 3, 1)]),
    ("lhs_left_sum", -1, |i| vec![(3 * i - 2, 3 * i - 1, 1), (3 * i - 1, 3 * i + 1, 1)]),
    ("lhs_right_sum", -1, |i| vec![(3 * i - 2, 3 * i, 1), (3 * i, 3 * i + 1, 1)]),
];

const RHS_FAMILIES: [Family; 7] = [
    ("rhs_cross_sum", 1, |i| vec![(3 * i - 4, 3 * i - 1, 1), (3 * i - 3, 3 * i, 1)]),
    ("rhs_cross_diff", 1, |i| vec![(3 * i - 4, 3 * i, 1), (3 * i - 3, 3 * i - 1, -1)]),
    ("rhs_left_diff", 1, |i| vec![(3 * i - 2, 3 * i - 1, 1), (3 * i - 1, 3 * i + 1, -1)]),
    ("rhs_right_diff", 1, |i| vec![(3 * i - 2, 3 * i, 1), (3 * i, 3 * i + 1, -1)]),
    ("rhs_skip_two", 1, |i| vec![(3 * i, 3 * i + 2, 1)]),
    ("rhs_skip_three", 2, |i| vec![(3 * i - 2, 3 * i + 1, 1)]),
    ("rhs_cancelling", -1, |i| vec![(3 * i - 1, 3 * i + 3, 1)]),
];

fn instantiate(n: usize, m: usize, fam: &Family) -> Res<Vec<SosTerm>> {
    let (name, coeff, f) = fam;
    let mut out = Vec::new();
    for i in -2..=(n as i64 + 3) {
        let form = form_in_range(m, &f(i));
        if !form.is_empty() {
            out.push(SosTerm { coeff: int(*coeff), form });
        }
    }
    if out.is_empty() && n >= 3 {
        return Err(StructuredError::UnsatisfiableRange { family: name, n });
    }
    Ok(out)
}

/// Squares 2·z_{i,j}² with j ≥ i+4.
fn far_diagonal(m: usize) -> Vec<SosTerm> {
    let mut out = Vec::new();
    for j in 1..=m {
        for i in 1..j {
            if j >= i + 4 {
                out.push(SosTerm { coeff: int(2), form: form_in_range(m, &[(i as i64, j as i64, 1)]) });
            }
        }
    }
    out
}

pub fn tridiagonal_identity(n: usize) -> Res<TridiagIdentity> {
    if n < 2 {
        return Err(StructuredError::UnsupportedOrder(n));
    }
    let m = 3 * n - 2;
    let size = m * (m - 1) / 2;
    let mut lhs_gram = SymMatrix::scalar(size, &int(2));
    for fam in &LHS_FAMILIES {
        for t in instantiate(n, m, fam)? {
            t.form.add_gram_to(&mut lhs_gram, &t.coeff);
        }
    }
    let mut terms = Vec::new();
    for fam in &RHS_FAMILIES {
        terms.extend(instantiate(n, m, fam)?);
    }
    terms.extend(far_diagonal(m));
    let rhs_sos = SosDecomposition { terms };
    let active = (2..n)
        .map(|i| Quadruple::new(3 * i - 4, 3 * i - 3, 3 * i - 1, 3 * i).expect("distinct ids"))
        .collect();
    let y = if n >= 3 { full_elimination(MatrixClass::Tridiagonal, n)? } else { DualVector::default() };
    let dual = build_dual(MatrixClass::Tridiagonal, n, y)?;
    Ok(TridiagIdentity { n, lhs_gram, rhs_sos, active, dual })
}

/// One row of Table 2 recomputed: (λ=0..3 multiplicities, 2×2 blocks, active, unresolved).
pub fn table2_row(t: &TridiagIdentity) -> ([usize; 4], usize, usize, usize) {
    let cands: Vec<Rational> = (0..=3).map(int).collect();
    let bs = block_spectra(&t.dual.s, &cands);
    let tot = total_spectrum(&bs);
    let two = bs.iter().filter(|b| b.members.len() == 2).count();
    let unresolved = bs.iter().map(|b| b.unresolved).sum();
    ([0, 1, 2, 3].map(|l| mult(&tot, l)), two, t.dual.y.support(), unresolved)
}

pub fn tridiagonal_report(n: usize, solver: Option<&SolverOptions>) -> Res<Report> {
    let t = tridiagonal_identity(n)?;
    let mut r = Report::new("tridiagonal");
    r.class = Some(MatrixClass::Tridiagonal.name().into());
    r.n = Some(n);
    let m = 3 * n - 2;
    let bw = bw_polynomial(MatrixClass::Tridiagonal, n)?;
    r.check("lhs_expands_to_bw", substitute_gram(&t.lhs_gram, m) == bw, "displayed BW side vs expanded BW");
    let rhs = t.rhs_sos.gram(t.lhs_gram.order());
    r.check("lhs_minus_rhs_is_zero", substitute_gram(&rhs, m) == bw, "polynomial identity in (p, q)");
    r.check("rhs_gram_equals_S", rhs == t.dual.s, "Gram of the displayed squares equals the dual slack");
    // the other reading: drop the cancelling family from the decomposition
    let mut without = SosDecomposition::default();
    without.terms.extend(t.rhs_sos.terms.iter().filter(|s| !s.coeff.is_negative()).cloned());
    let alt = substitute_gram(&without.gram(rhs.order()), m) == bw;
    let has_cancelling = without.terms.len() < t.rhs_sos.terms.len();
    r.check(
        "cancelling_family_participates",
        !has_cancelling || !alt,
        "the identity only holds when −Σ z_{3i−1,3i+3}² enters the Gram matrix",
    );
    let expected: Vec<Quadruple> = t.dual.y.y.keys().copied().collect();
    r.check_eq("active_quadruples", expected, t.active.clone());
    r.check("S_psd", ldl_psd_certify(&t.dual.s).is_psd(), "exact LDLᵀ at gamma 0");
    let (eig, two, act, unresolved) = table2_row(&t);
    r.check_eq("spectrum_resolved", unresolved, 0);
    let cands: Vec<Rational> = (0..=3).map(int).collect();
    r.spectrum("S", &total_spectrum(&block_spectra(&t.dual.s, &cands)));
    if let Some(row) = TABLE2.iter().find(|row| row[0] == n) {
        r.check_eq("table2_eigenvalue_multiplicities", eig.to_vec(), row[1..5].to_vec());
        r.check_eq("table2_two_blocks", two, row[5]);
        r.check_eq("table2_active", act, row[6]);
        if let Some(opts) = solver {
            let inst = sdpsolve::instance_for(MatrixClass::Tridiagonal, n, ConstraintSelection::Auto)?;
            let res = sdpsolve::solve(&inst, opts)?;
            let rk = sdpsolve::numerical_rank(&res.x, 1e-6);
            r.check_float("table2_rank_X", rk == row[7], format!("solver rank {rk}, printed {}", row[7]));
            r.check_float("strict_complementarity", rk == eig[0], format!("rank X {rk}, defect {}", eig[0]));
            r.check_float("solver_objective", res.gamma().abs() <= 1e-5, format!("gamma {:.3e}", res.gamma()));
        }
    }
    if n >= 2 {
        let expected2 = 3 + 9 * (n - 1) * (n - 2) / 2;
        r.check_eq("eigenvalue_two_multiplicity", eig[2], expected2);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// backward tridiagonal

/// (n, λ=0..4 with `None` for a dash, the columns "act", "2-bl", "4-bl", rank X)
pub type Table3Row = (usize, [Option<usize>; 5], [usize; 3], usize);

/// Table 3 as printed.
pub const TABLE3: [Table3Row; 7] = [
    (2, [Some(3), Some(0), Some(3), Some(0), Some(0)], [2, 0, 0], 3),
    (3, [Some(8), None, None, None, None], [3, 3, 7], 5),
    (4, [Some(13), Some(4), Some(25), Some(0), Some(3)], [6, 3, 8], 13),
    (5, [Some(20), None, None, None, None], [11, 6, 17], 18),
    (6, [Some(25), Some(6), Some(81), Some(2), Some(6)], [14, 6, 18], 25),
    (7, [Some(32), None, None, None, None], [30, 9, 27], 30),
    (8, [Some(37), Some(8), Some(173), Some(4), Some(9)], [22, 9, 28], 37),
];

#[derive(Clone, Debug)]
pub struct BackwardAnalysis {
    pub n: usize,
    pub mixed_pairs: usize,
    pub term_counts: Vec<Vec<usize>>,
    pub dual: DualCertificate,
    pub blocks: Vec<BlockSpectrum>,
    pub defect: usize,
}

impl BackwardAnalysis {
    pub fn blocks_of(&self, size: usize) -> usize {
        self.blocks.iter().filter(|b| b.members.len() == size).count()
    }
}

/// The dual that removes every mixed product (all weights 1, γ = 0).
pub fn backward_tridiagonal_analysis(n: usize) -> Res<BackwardAnalysis> {
    if n < 2 {
        return Err(StructuredError::UnsupportedOrder(n));
    }
    let class = MatrixClass::BackwardTridiagonal;
    let ind = build_index_matrix(class, n)?;
    let mixed = mixed_pairs(&commutator_forms(&ind)).len();
    let y = if n >= 3 { full_elimination(class, n)? } else { DualVector::default() };
    let dual = build_dual(class, n, y)?;
    let cands: Vec<Rational> = (0..=4).map(int).collect();
    let blocks = block_spectra(&dual.s, &cands);
    let defect = nullity_at(&dual.s, &Rational::zero());
    Ok(BackwardAnalysis { n, mixed_pairs: mixed, term_counts: term_counts(class, n)?, dual, blocks, defect })
}

pub fn backward_tridiagonal_report(n: usize, solver: Option<&SolverOptions>) -> Res<Report> {
    let a = backward_tridiagonal_analysis(n)?;
    let mut r = Report::new("backward-tridiagonal");
    r.class = Some(MatrixClass::BackwardTridiagonal.name().into());
    r.n = Some(n);
    let pairs: usize = a.term_counts.iter().flatten().map(|&c| c * c.saturating_sub(1) / 2).sum();
    r.control("term_count_pairs", &int(pairs as i64));
    if n >= 3 {
        let formula = if n % 2 == 0 { 5 * n - 12 } else { 5 * n - 8 };
        r.check_eq("mixed_pair_count", a.mixed_pairs, formula);
    }
    r.check_eq("active_equals_mixed_pairs", a.dual.y.support(), a.mixed_pairs);
    r.check("S_psd", ldl_psd_certify(&a.dual.s).is_psd(), "exact LDLᵀ at gamma 0, all weights 1");
    let tot = total_spectrum(&a.blocks);
    let unresolved: usize = a.blocks.iter().map(|b| b.unresolved).sum();
    r.spectrum("S_integer_part", &tot);
    r.control("defect", &int(a.defect as i64));
    r.control("unresolved_eigenvalues", &int(unresolved as i64));
    let (two, four) = (a.blocks_of(2), a.blocks_of(4));
    let Some((_, lam, cols, rk)) = TABLE3.iter().find(|row| row.0 == n) else {
        return Ok(r);
    };
    // the printed columns "act", "2-bl", "4-bl" hold the 2×2 block count, the 4×4 block
    // count and the active count, in that order
    r.check_eq("table3_defect", a.defect, lam[0].unwrap());
    r.check_eq("table3_four_blocks", four, cols[1]);
    r.check_eq("table3_active", a.dual.y.support(), cols[2]);
    if two == cols[0] {
        r.check_eq("table3_two_blocks", two, cols[0]);
    } else {
        r.mismatch(format!("table3_n{n}_act"), cols[0].to_string(), two.to_string());
    }
    let even = n % 2 == 0;
    if even {
        r.check_eq("spectrum_resolved", unresolved, 0);
        let exact: Vec<usize> = (0..=4).map(|l| mult(&tot, l)).collect();
        let printed: Vec<usize> = lam.iter().map(|v| v.unwrap()).collect();
        r.check_eq("table3_eigenvalue_multiplicities", exact, printed);
    } else {
        r.check("irrational_eigenvalues_present", unresolved > 0, format!("{unresolved} eigenvalues outside 0..4"));
    }
    if let Some(opts) = solver {
        let inst = sdpsolve::instance_for(MatrixClass::BackwardTridiagonal, n, ConstraintSelection::Auto)?;
        let res = sdpsolve::solve(&inst, opts)?;
        let rank = sdpsolve::numerical_rank(&res.x, 1e-6);
        r.check_float("solver_gamma_zero", res.gamma().abs() <= 1e-5, format!("gamma {:.3e}", res.gamma()));
        if even {
            let ev = sdpsolve::slack_eigenvalues(&inst, &res);
            let resid = ev.iter().map(|e| (e - e.round()).abs()).fold(0.0, f64::max);
            let mut counts = [0usize; 5];
            for e in &ev {
                let k = e.round();
                if (0.0..=4.0).contains(&k) {
                    counts[k as usize] += 1;
                }
            }
            let printed: Vec<usize> = lam.iter().map(|v| v.unwrap()).collect();
            r.check_float(
                "solver_eigenvalues_round",
                resid < 1e-5 && counts.to_vec() == printed,
                format!("rounded {counts:?}, printed {printed:?}, max residual {resid:.2e}"),
            );
            r.check_float("table3_rank_X", rank == *rk, format!("solver rank {rank}, printed {rk}"));
        } else if rank != *rk {
            r.mismatch(format!("table3_n{n}_rank_X"), rk.to_string(), rank.to_string());
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// cyclic Hankel

#[derive(Clone, Debug)]
pub struct CyclicSos {
    pub n: usize,
    pub k: usize,
    pub t_forms: Vec<LinearForm>,
    /// SOS of BW/(2n)
    pub sos: SosDecomposition,
    /// 1-based positions of candidates in no t_i
    pub residual_ids: Vec<usize>,
}

pub fn cyclic_t_form(n: usize, i: usize) -> LinearForm {
    let mut f = LinearForm::new();
    for j in 1..=n - i {
        f.add(pos_index(j, i + j).unwrap() - 1, &int(1));
    }
    for j in 1..=i {
        f.add(pos_index(j, n - i + j).unwrap() - 1, &int(-1));
    }
    f
}

pub fn cyclic_hankel_sos(n: usize) -> Res<CyclicSos> {
    if n < 3 {
        return Err(StructuredError::UnsupportedOrder(n));
    }
    let k = (n - 1) / 2;
    let t_forms: Vec<LinearForm> = (1..=k).map(|i| cyclic_t_form(n, i)).collect();
    let mut terms = Vec::new();
    for t in &t_forms {
        let a: Vec<(usize, &Rational)> = t.iter().collect();
        for x in 0..a.len() {
            for y in x + 1..a.len() {
                let form = LinearForm::from_pairs([(a[x].0, a[x].1.clone()), (a[y].0, -a[y].1.clone())]);
                terms.push(SosTerm { coeff: int(1), form });
            }
        }
    }
    let used: std::collections::BTreeSet<usize> = t_forms.iter().flat_map(|t| t.iter().map(|(s, _)| s)).collect();
    let size = n * (n - 1) / 2;
    let residual_ids: Vec<usize> = (0..size).filter(|s| !used.contains(s)).map(|s| s + 1).collect();
    for &p in &residual_ids {
        terms.push(SosTerm { coeff: int(n as i64), form: LinearForm::from_pairs([(p - 1, int(1))]) });
    }
    Ok(CyclicSos { n, k, t_forms, sos: SosDecomposition { terms }, residual_ids })
}

/// The six squares whose sum is 4·Σ z² at n = 4.
pub fn six_square_forms() -> Vec<LinearForm> {
    let f = |v: &[(usize, usize, i64)]| {
        LinearForm::from_pairs(v.iter().map(|&(i, j, c)| (pos_index(i, j).unwrap() - 1, int(c))))
    };
    vec![
        f(&[(1, 2, 1), (2, 3, 1), (1, 4, -1), (3, 4, 1)]),
        f(&[(1, 2, 1), (2, 3, -1), (1, 4, 1), (3, 4, 1)]),
        f(&[(1, 2, 1), (1, 3, 1), (2, 4, -1), (3, 4, -1)]),
        f(&[(1, 2, 1), (1, 3, -1), (2, 4, 1), (3, 4, -1)]),
        f(&[(1, 3, 1), (2, 3, 1), (1, 4, 1), (2, 4, 1)]),
        f(&[(1, 3, 1), (2, 3, -1), (1, 4, -1), (2, 4, 1)]),
    ]
}

pub fn cyclic_hankel_report(n: usize) -> Res<Report> {
    let c = cyclic_hankel_sos(n)?;
    let mut r = Report::new("cyclic-hankel");
    r.class = Some(MatrixClass::CyclicHankel.name().into());
    r.n = Some(n);
    let scaled = SosDecomposition {
        terms: c
            .sos
            .terms
            .iter()
            .map(|t| SosTerm { coeff: &t.coeff * int(2 * n as i64), form: t.form.clone() })
            .collect(),
    };
    r.check("sos_identity", verify_identity(&scaled, MatrixClass::CyclicHankel, n, &Rational::zero())?, "2n·SOS = BW");
    r.check("all_coefficients_positive", c.sos.all_positive(), "");
    r.check_eq("k", c.k, (n - 1) / 2);
    r.check_eq("residual_empty_iff_odd", c.residual_ids.is_empty(), n % 2 == 1);
    let offsets_ok = c.residual_ids.iter().all(|&p| {
        let (i, j) = crate::indexing::decode_pos(p);
        2 * (j - i) == n
    });
    r.check("residual_is_half_offset", offsets_ok, format!("{:?}", c.residual_ids));
    // each used candidate sits in exactly one t_i
    let mut seen = BTreeMap::new();
    for t in &c.t_forms {
        for (s, _) in t.iter() {
            *seen.entry(s).or_insert(0usize) += 1;
        }
    }
    r.check("t_forms_disjoint", seen.values().all(|&v| v == 1), "");
    // ‖R‖² = 2n Σ t_i²
    let g = objective_gram(MatrixClass::CyclicHankel, n)?;
    let mut commutator = SymMatrix::zeros(g.space.size);
    for row in &commutator_forms(&build_index_matrix(MatrixClass::CyclicHankel, n)?).entries {
        for f in row {
            f.add_gram_to(&mut commutator, &int(1));
        }
    }
    let mut ts = SymMatrix::zeros(g.space.size);
    for t in &c.t_forms {
        t.add_gram_to(&mut ts, &int(2 * n as i64));
    }
    r.check("commutator_norm_is_2n_sum_t2", commutator == ts, "as Gram matrices");
    r.check("slack_C_psd", ldl_psd_certify(&g.mat).is_psd(), "y = 0 suffices");
    if n == 3 {
        r.check("norm_consistency_n3", norm_consistency_n3()?, "2(‖P‖²‖Q‖²−tr²) = 18(‖p‖²‖q‖²−(pᵀq)²)");
    }
    if n == 4 {
        let mut g6 = SymMatrix::zeros(6);
        for f in six_square_forms() {
            f.add_gram_to(&mut g6, &int(1));
        }
        r.check("six_square_identity", g6 == SymMatrix::scalar(6, &int(4)), "4 Σ z² as the sum of six squares");
        let t1 = LinearForm::from_pairs([(0, int(1)), (2, int(1)), (5, int(1)), (3, int(-1))]);
        r.check_eq("t1_n4", c.t_forms[0].clone(), t1);
    }
    Ok(r)
}

fn norm_consistency_n3() -> Res<bool> {
    let n = 3;
    let ind = build_index_matrix(MatrixClass::CyclicHankel, n)?;
    let m = ind.m;
    let (mut pp, mut qq, mut pq) = (Poly::zero(), Poly::zero(), Poly::zero());
    for id in ind.cells.iter().flatten().flatten() {
        let (p, q) = (Poly::var(p_var(*id)), Poly::var(q_var(m, *id)));
        pp = &pp + &(&p * &p);
        qq = &qq + &(&q * &q);
        pq = &pq + &(&p * &q);
    }
    let lhs = (&(&pp * &qq) - &(&pq * &pq)).scale(&int(2));
    let (mut sp, mut sq, mut spq) = (Poly::zero(), Poly::zero(), Poly::zero());
    for id in 1..=m {
        let (p, q) = (Poly::var(p_var(id)), Poly::var(q_var(m, id)));
        sp = &sp + &(&p * &p);
        sq = &sq + &(&q * &q);
        spq = &spq + &(&p * &q);
    }
    let rhs = (&(&sp * &sq) - &(&spq * &spq)).scale(&int(2 * (n * n) as i64));
    Ok(lhs == rhs)
}

// ---------------------------------------------------------------------------
// Hankel n = 3

pub struct FixtureBlock {
    /// 1-based candidate slots
    pub slots: Vec<usize>,
    pub matrix: Vec<Vec<i64>>,
    pub eigenvalues: Vec<i64>,
    /// eigenvector columns, aligned with `eigenvalues`
    pub vectors: Vec<Vec<i64>>,
}

/// c·(Σ c_t z_{i,j})² with 1-based (i, j, c_t) terms
pub type FixtureSquare = (Rational, Vec<(usize, usize, i64)>);

pub struct Hankel3Fixture {
    pub y: [i64; 5],
    pub s: [[i64; 10]; 10],
    pub blocks: Vec<FixtureBlock>,
    pub identity: Vec<FixtureSquare>,
}

pub fn hankel3_fixture() -> Hankel3Fixture {
    Hankel3Fixture {
        y: [0, 0, 1, 0, 0],
        s: [
            [1, 0, -1, 0, 0, -1, 0, 0, 0, 1],
            [0, 2, 0, 0, -1, 0, 0, 0, -1, 0],
            [-1, 0, 4, 0, 0, -2, 0, 0, 0, -1],
            [0, 0, 0, 2, 0, 0, 0, -1, 0, 0],
            [0, -1, 0, 0, 3, 0, 1, 0, -1, 0],
            [-1, 0, -2, 0, 0, 4, 0, 0, 0, -1],
            [0, 0, 0, 0, 1, 0, 1, 0, 0, 0],
            [0, 0, 0, -1, 0, 0, 0, 2, 0, 0],
            [0, -1, 0, 0, -1, 0, 0, 0, 2, 0],
            [1, 0, -1, 0, 0, -1, 0, 0, 0, 1],
        ],
        blocks: vec![
            FixtureBlock {
                slots: vec![1, 3, 6, 10],
                matrix: vec![vec![1, -1, -1, 1], vec![-1, 4, -2, -1], vec![-1, -2, 4, -1], vec![1, -1, -1, 1]],
                eigenvalues: vec![0, 0, 4, 6],
                vectors: vec![vec![2, 1, 1, 0], vec![-1, 1, 1, 3], vec![1, -1, -1, 1], vec![0, 1, -1, 0]],
            },
            FixtureBlock {
                slots: vec![2, 5, 7, 9],
                matrix: vec![vec![2, -1, 0, -1], vec![-1, 3, 1, -1], vec![0, 1, 1, 0], vec![-1, -1, 0, 2]],
                eigenvalues: vec![0, 1, 3, 4],
                vectors: vec![vec![1, 1, -1, 1], vec![1, 0, 2, 1], vec![1, 0, 0, -1], vec![1, -3, -1, 1]],
            },
            FixtureBlock {
                slots: vec![4, 8],
                matrix: vec![vec![2, -1], vec![-1, 2]],
                eigenvalues: vec![1, 3],
                vectors: vec![vec![1, 1], vec![1, -1]],
            },
        ],
        identity: vec![
            (int(1), vec![(1, 2, 1), (2, 3, -1), (3, 4, -1), (4, 5, 1)]),
            (int(3), vec![(2, 3, 1), (3, 4, -1)]),
            (frac(1, 6), vec![(1, 3, 1), (1, 5, 2), (3, 5, 1)]),
            (frac(3, 2), vec![(1, 3, 1), (3, 5, -1)]),
            (frac(1, 3), vec![(1, 3, 1), (2, 4, -3), (1, 5, -1), (3, 5, 1)]),
            (frac(1, 2), vec![(1, 4, 1), (2, 5, 1)]),
            (frac(3, 2), vec![(1, 4, 1), (2, 5, -1)]),
        ],
    }
}

/// The BW side of the final identity, as printed.
fn hankel3_bw_side() -> SymMatrix {
    let mut g = SymMatrix::zeros(10);
    let diag = [((1, 2), 2), ((1, 3), 3), ((2, 3), 6), ((1, 4), 2), ((2, 4), 4), ((3, 4), 6), ((1, 5), 1), ((2, 5), 2), ((3, 5), 3), ((4, 5), 2)];
    for ((i, j), c) in diag {
        let p = pos_index(i, j).unwrap() - 1;
        g.add_to(p, p, &int(c));
    }
    for f in [
        [(1, 3), (2, 4), (3, 5)],
        [(1, 2), (2, 3), (3, 4)],
        [(2, 3), (3, 4), (4, 5)],
    ] {
        LinearForm::from_pairs(f.map(|(i, j)| (pos_index(i, j).unwrap() - 1, int(1)))).add_gram_to(&mut g, &int(-1));
    }
    g
}

/// The fixture's dual in our sign convention for A_t.
pub fn hankel3_dual() -> Res<DualCertificate> {
    let fx = hankel3_fixture();
    let mut y = DualVector::default();
    for (q, &v) in all_quadruples(5).zip(fx.y.iter()) {
        // the printed +1 multiplies a constraint oriented opposite to ours
        y.add(q, &int(-v));
    }
    Ok(build_dual(MatrixClass::Hankel, 3, y)?)
}

pub fn hankel3_verify() -> Res<Report> {
    let fx = hankel3_fixture();
    let mut r = Report::new("fixture hankel3");
    r.class = Some(MatrixClass::Hankel.name().into());
    r.n = Some(3);
    let g = objective_gram(MatrixClass::Hankel, 3)?;
    r.check_eq("candidate_space", (g.space.m, g.space.size, all_quadruples(5).count()), (5, 10, 5));
    let dual = hankel3_dual()?;
    let printed = SymMatrix::from_i64(&fx.s.iter().map(|r| &r[..]).collect::<Vec<_>>()).expect("symmetric");
    r.check("S_matches_printed", dual.s == printed, "entrywise, 10×10");
    let braces = [(1, 10, 1), (4, 8, -1), (5, 7, 1)];
    let brace_ok = braces.iter().all(|&(i, j, v)| {
        g.mat.get(i - 1, j - 1).is_zero() && dual.s.get(i - 1, j - 1) == int(v) && dual.s.get(j - 1, i - 1) == int(v)
    });
    r.check("brace_entries", brace_ok, "zero in C, nonzero in S (all six)");
    r.check("S_psd", ldl_psd_certify(&dual.s).is_psd(), "exact LDLᵀ");
    let comps = connected_components(&dual.s);
    for (b, FixtureBlock { slots, matrix: mat, eigenvalues: eig, vectors: vecs }) in fx.blocks.iter().enumerate() {
        let label = format!("B{}", b + 1);
        let idx: Vec<usize> = slots.iter().map(|s| s - 1).collect();
        r.check(format!("{label}_is_component"), comps.contains(&idx), format!("slots {slots:?}"));
        let sub = dual.s.submatrix(&idx);
        let pm = SymMatrix::from_i64(&mat.iter().map(|r| &r[..]).collect::<Vec<_>>()).expect("symmetric");
        r.check(format!("{label}_matches_printed"), sub == pm, "");
        let mut spec = BTreeMap::new();
        for &l in eig {
            *spec.entry(int(l)).or_insert(0usize) += 1;
        }
        let found: BTreeMap<Rational, usize> =
            spec.keys().map(|l| (l.clone(), nullity_at(&sub, l))).collect();
        r.check(format!("E{}", b + 1), found == spec, spec_string(&found));
        r.spectrum(label.clone(), &found);
        for (c, &l) in eig.iter().enumerate() {
            let v: Vec<Rational> = vecs[c].iter().map(|&x| int(x)).collect();
            let bv = sub.mul_vec(&v);
            let ok = bv.iter().zip(&v).all(|(a, x)| *a == int(l) * x) && v.iter().any(|x| !x.is_zero());
            r.check(format!("V{}_column{}", b + 1, c + 1), ok, format!("eigenvalue {l}"));
        }
    }
    let bw_side = hankel3_bw_side();
    let bw = bw_polynomial(MatrixClass::Hankel, 3)?.scale(&frac(1, 2));
    r.check("bw_side_equals_half_bw", substitute_gram(&bw_side, 5) == bw, "");
    r.check("bw_side_equals_C", bw_side == g.mat, "");
    let mut rhs = SymMatrix::zeros(10);
    for (coeff, terms) in &fx.identity {
        LinearForm::from_pairs(terms.iter().map(|&(i, j, c)| (pos_index(i, j).unwrap() - 1, int(c))))
            .add_gram_to(&mut rhs, coeff);
    }
    r.check("final_identity", substitute_gram(&rhs, 5) == bw, "seven squares = ½ BW");
    r.check("final_identity_gram_is_S", rhs == dual.s, "");
    Ok(r)
}

// ---------------------------------------------------------------------------
// Toeplitz

/// The factor p1 of the n = 8 block's characteristic polynomial as printed (ascending).
pub const TOEPLITZ_P1_PRINTED: [i64; 7] = [-145152, -575680, 327472, -53472, 536, -100, 1];
/// det(xI − (D+H)) at n = 8; differs from the printed factor only in the x⁴ coefficient.
pub const TOEPLITZ_P1: [i64; 7] = [-145152, -575680, 327472, -53472, 3536, -100, 1];

/// Sign changes of p(−x): an upper bound on the number of negative roots.
fn negative_root_bound(p: &UPoly) -> usize {
    let neg: Vec<Rational> =
        p.coeffs().iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() }).collect();
    UPoly::new(neg).sign_changes()
}

pub fn toeplitz_block(k: usize, n: usize) -> Res<SymMatrix> {
    if k < 1 || n < 3 || k + 2 > n {
        return Err(StructuredError::BadSize { k, n });
    }
    let s = n - 1 - k;
    let mut m = SymMatrix::zeros(2 * s);
    for r in 0..s {
        let i = s - r;
        let d = int((i * (i + k)) as i64);
        m.set(r, r, d.clone());
        m.set(s + r, s + r, d);
    }
    for a in 1..=s {
        for b in 1..=s {
            let h = a.min(b).min(s + 1 - a).min(s + 1 - b);
            m.set(a - 1, s + b - 1, int(-(h as i64)));
        }
    }
    Ok(m)
}

/// Candidate slots of the type (a) block for offset k, in the block's row order.
pub fn toeplitz_block_slots(k: usize, n: usize) -> Vec<usize> {
    let s = n - 1 - k;
    let upper = (1..=s).map(|i| pos_index(i, i + k).unwrap() - 1);
    let lower = (1..=s).map(|i| pos_index(n - 1 + i, n - 1 + i + k).unwrap() - 1);
    upper.chain(lower).collect()
}

#[derive(Clone, Debug)]
pub struct ToeplitzBlockReport {
    pub n: usize,
    pub dual: DualCertificate,
    pub type_a_sizes: BTreeMap<usize, usize>,
    pub type_b_sizes: BTreeMap<usize, usize>,
    pub largest_block: SymMatrix,
    pub charpoly: UPoly,
    pub psd: bool,
    pub negative_bracket: Option<(Rational, Rational)>,
}

fn multiset(v: impl IntoIterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for x in v {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

pub fn toeplitz_analyze(n: usize) -> Res<(ToeplitzBlockReport, Report)> {
    if n < 3 {
        return Err(StructuredError::UnsupportedOrder(n));
    }
    let dual = build_dual(MatrixClass::Toeplitz, n, strategy_b(n)?)?;
    let s = &dual.s;
    let mut r = Report::new("toeplitz");
    r.class = Some(MatrixClass::Toeplitz.name().into());
    r.n = Some(n);
    let comps = connected_components(s);
    let mut type_a = Vec::new();
    let mut all_verbatim = true;
    for k in 1..=n - 2 {
        let slots = toeplitz_block_slots(k, n);
        let mut sorted = slots.clone();
        sorted.sort_unstable();
        let is_comp = comps.contains(&sorted);
        let verbatim = is_comp && s.submatrix(&slots) == toeplitz_block(k, n)?;
        all_verbatim &= verbatim;
        if is_comp {
            type_a.push(sorted);
        }
    }
    r.check("type_a_blocks_verbatim", all_verbatim, "every [[D,H],[H,D]] is a component of S");
    let type_a_sizes = multiset(type_a.iter().map(|b| b.len()));
    let type_b_sizes = size_multiset(&comps.iter().filter(|c| !type_a.contains(c)).cloned().collect::<Vec<_>>());
    r.check_eq("type_a_sizes", type_a_sizes.clone(), multiset((1..=n - 2).map(|i| 2 * i)));
    let expected_b = multiset((1..=n - 2).flat_map(|i| [i, i]).chain([n - 1]));
    r.check_eq("type_b_sizes", type_b_sizes.clone(), expected_b);
    r.check_eq("order_of_S", s.order(), (n - 1) * (2 * n - 3));
    let nn = (n * (n - 2)) as i64;
    r.check_eq("active_count", dual.y.support(), (n - 1) * (n - 2) * (2 * n - 3) / 6);
    r.check_eq("defect", nullity_at(s, &Rational::zero()), n - 1);
    r.check_eq("max_diagonal", s.max_diagonal(), Some(int(nn)));
    r.check_eq("min_off_diagonal", s.min_off_diagonal(), Some(int(-(((n - 1) / 2) as i64))));
    let mut shifted = s.scaled(&int(-1));
    shifted.shift_diagonal(&int(nn));
    let top = nullity_at(s, &int(nn)) > 0 && ldl_psd_certify(&shifted).is_psd();
    r.check("max_eigenvalue", top, format!("n(n−2) = {nn} is an eigenvalue and bounds the spectrum"));
    let largest_block = toeplitz_block(1, n)?;
    let charpoly = char_poly(&largest_block).map_err(|e| StructuredError::Solver(e.to_string()))?;
    let verdict = ldl_psd_certify(s);
    let psd = verdict.is_psd();
    let mut negative_bracket = None;
    let detail = match &verdict {
        PsdVerdict::Psd(_) => "exact LDLᵀ of the Strategy B slack".to_string(),
        PsdVerdict::NotPsd(w) => {
            r.control("witness_value", &w.value);
            format!("witness wᵀSw = {}", format_rational(&w.value))
        }
    };
    r.check("S_psd", psd, detail);
    if n >= 8 {
        negative_bracket = charpoly.bisect(&int(-1), &Rational::zero(), 40);
        r.check(
            "negative_eigenvalue_bracket",
            negative_bracket.is_some(),
            "sign change of charpoly(B) inside (−1, 0)",
        );
        if n == 8 {
            let printed = UPoly::from_i64(&TOEPLITZ_P1_PRINTED);
            let (_, rem) = charpoly.div_rem(&printed).map_err(|e| StructuredError::Solver(e.to_string()))?;
            if !rem.is_zero() {
                r.mismatch("p1_x4_coefficient", "536", "3536");
            }
            let p1 = UPoly::from_i64(&TOEPLITZ_P1);
            let (p2, rem) = charpoly.div_rem(&p1).map_err(|e| StructuredError::Solver(e.to_string()))?;
            r.check("p1_divides_charpoly", rem.is_zero(), format!("p1 = {p1}, cofactor p2 = {p2}"));
            let pb = p1.bisect(&int(-1), &Rational::zero(), 40);
            let ok = pb.as_ref().is_some_and(|(lo, hi)| {
                let mid = (crate::exact::to_f64(lo) + crate::exact::to_f64(hi)) / 2.0;
                (mid + 0.2228).abs() < 1e-3
            });
            let shown = pb.map(|(a, b)| (format_rational(&a), format_rational(&b)));
            r.check("p1_root_near_minus_0_2228", ok, format!("{shown:?}"));
            r.check_eq("p1_negative_roots_at_most_one", negative_root_bound(&p1), 1);
            // soft: Descartes' rule on the cofactor
            r.check_eq("p2_has_no_negative_roots", negative_root_bound(&p2), 0);
        }
    }
    if let Some((lo, hi)) = &negative_bracket {
        r.control("bracket_lo", lo);
        r.control("bracket_hi", hi);
    }
    Ok((ToeplitzBlockReport { n, dual, type_a_sizes, type_b_sizes, largest_block, charpoly, psd, negative_bracket }, r))
}

/// Offsets k whose type (a) block has a negative eigenvalue.
pub fn toeplitz_negative_blocks(n: usize) -> Res<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=n.saturating_sub(2) {
        if !ldl_psd_certify(&toeplitz_block(k, n)?).is_psd() {
            out.push(k);
        }
    }
    Ok(out)
}
