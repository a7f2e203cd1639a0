//! Dense primal–dual interior point method for
//!
//!   min tr(CX)  s.t.  tr(A_t X) = 0,  tr(X) = 1,  X ⪰ 0
//!   max y₀      s.t.  C − Σ y_t A_t − y₀ I ⪰ 0
//!
//! (HKM search direction with Mehrotra's predictor–corrector), and rounding of the float
//! dual into an exactly checked rational certificate. γ = −y₀.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use thiserror::Error;

use crate::bwform::objective_gram;
use crate::certificates::{build_dual, DualCertificate};
use crate::constraints::{all_quadruples, DualVector, Quadruple};
use crate::exact::{binomial, int, ldl_psd_certify, PsdVerdict, Rational, SymMatrix};
use crate::indexing::{decode_pos, IndexError, MatrixClass};
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("instance order {order} exceeds the bound {bound}")]
    OrderTooLarge { order: usize, bound: usize },
    #[error("numerical breakdown: {0}")]
    Numerical(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_order: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_iter: 100, max_order: 700 }
    }
}

impl SolverOptions {
    /// Defaults overridden by BWSOS_TOL / BWSOS_MAXIT when set and parseable.
    pub fn from_env() -> Self {
        let mut o = Self::default();
        if let Some(t) = std::env::var("BWSOS_TOL").ok().and_then(|s| s.parse().ok()) {
            o.tol = t;
        }
        if let Some(m) = std::env::var("BWSOS_MAXIT").ok().and_then(|s| s.parse().ok()) {
            o.max_iter = m;
        }
        o
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpInstance {
    pub c: SymMatrix,
    pub quads: Vec<Quadruple>,
    pub normalize_trace: bool,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub x: DMatrix<f64>,
    /// multipliers of the Plücker constraints, aligned with the instance's quadruples
    pub y: Vec<f64>,
    /// multiplier of the trace constraint
    pub y0: f64,
    pub objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub min_eig_s: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolverResult {
    pub fn gamma(&self) -> f64 {
        -self.y0
    }

    pub fn gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }
}

/// Which Plücker constraints enter the SDP.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ConstraintSelection {
    All,
    /// quadruples with a pairing on a nonzero off-diagonal entry of C
    Touching,
    /// All up to `AUTO_ALL_LIMIT` quadruples, else Touching
    Auto,
}

pub const AUTO_ALL_LIMIT: u64 = 1000;

pub fn touching_quadruples(c: &SymMatrix) -> Vec<Quadruple> {
    let mut set = BTreeSet::new();
    for (a, b, _) in c.iter() {
        if a == b {
            continue;
        }
        let (i, j) = decode_pos(a + 1);
        let (k, l) = decode_pos(b + 1);
        if let Ok(q) = Quadruple::from_ids([i, j, k, l]) {
            set.insert(q);
        }
    }
    set.into_iter().collect()
}

pub fn select_constraints(c: &SymMatrix, m: usize, sel: ConstraintSelection) -> Vec<Quadruple> {
    match sel {
        ConstraintSelection::All => all_quadruples(m).collect(),
        ConstraintSelection::Touching => touching_quadruples(c),
        ConstraintSelection::Auto => {
            if binomial(m as u64, 4) <= AUTO_ALL_LIMIT {
                all_quadruples(m).collect()
            } else {
                touching_quadruples(c)
            }
        }
    }
}

pub fn instance_for(class: MatrixClass, n: usize, sel: ConstraintSelection) -> Result<SdpInstance, SolveError> {
    let g = objective_gram(class, n)?;
    let quads = select_constraints(&g.mat, g.space.m, sel);
    Ok(SdpInstance { c: g.mat, quads, normalize_trace: true })
}

fn to_dense(m: &SymMatrix) -> DMatrix<f64> {
    let n = m.order();
    let mut d = DMatrix::zeros(n, n);
    for (i, j, v) in m.iter() {
        let f = crate::exact::to_f64(v);
        d[(i, j)] = f;
        d[(j, i)] = f;
    }
    d
}

/// The six (row, col, value) entries of A_t.
fn entries(q: &Quadruple) -> [(usize, usize, f64); 6] {
    let p = q.pairings();
    let mut e = [(0, 0, 0.0); 6];
    for (t, (a, b, s)) in p.iter().enumerate() {
        e[2 * t] = (*a, *b, *s as f64);
        e[2 * t + 1] = (*b, *a, *s as f64);
    }
    e
}

struct Ops {
    cons: Vec<[(usize, usize, f64); 6]>,
    trace: bool,
    n: usize,
}

impl Ops {
    fn len(&self) -> usize {
        self.cons.len() + usize::from(self.trace)
    }

    /// (tr(A_i G))_i for a possibly nonsymmetric G; the trace row comes last.
    fn apply(&self, g: &DMatrix<f64>) -> DVector<f64> {
        let mut v = DVector::zeros(self.len());
        for (i, e) in self.cons.iter().enumerate() {
            v[i] = e.iter().map(|&(p, q, s)| s * g[(q, p)]).sum();
        }
        if self.trace {
            v[self.cons.len()] = g.trace();
        }
        v
    }

    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, e) in self.cons.iter().enumerate() {
            for &(p, q, s) in e {
                m[(p, q)] += s * y[i];
            }
        }
        if self.trace {
            let t = y[self.cons.len()];
            for i in 0..self.n {
                m[(i, i)] += t;
            }
        }
        m
    }

    /// M_ij = tr(A_i X A_j Z⁻¹).
    fn schur(&self, x: &DMatrix<f64>, zi: &DMatrix<f64>) -> DMatrix<f64> {
        let k = self.len();
        let nc = self.cons.len();
        let mut m = DMatrix::zeros(k, k);
        for i in 0..nc {
            let ei = &self.cons[i];
            for j in i..nc {
                let ej = &self.cons[j];
                let mut acc = 0.0;
                for &(p, q, s) in ei {
                    for &(r, t, u) in ej {
                        acc += s * u * x[(q, r)] * zi[(t, p)];
                    }
                }
                m[(i, j)] = acc;
                m[(j, i)] = acc;
            }
        }
        if self.trace {
            let zx = zi * x;
            for j in 0..nc {
                let acc: f64 = self.cons[j].iter().map(|&(r, t, u)| u * zx[(t, r)]).sum();
                m[(nc, j)] = acc;
                m[(j, nc)] = acc;
            }
            m[(nc, nc)] = (x * zi).trace();
        }
        m
    }
}

fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> Result<f64, SolveError> {
    let chol = x.clone().cholesky().ok_or_else(|| SolveError::Numerical("iterate lost definiteness".into()))?;
    let l = chol.l();
    let a = l.solve_lower_triangular(dx).ok_or_else(|| SolveError::Numerical("triangular solve".into()))?;
    let b = l
        .solve_lower_triangular(&a.transpose())
        .ok_or_else(|| SolveError::Numerical("triangular solve".into()))?;
    let sym = (&b + b.transpose()) * 0.5;
    let lmin = sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if lmin < 0.0 { -1.0 / lmin } else { f64::INFINITY })
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

pub fn solve(inst: &SdpInstance, opts: &SolverOptions) -> Result<SolverResult, SolveError> {
    let n = inst.c.order();
    if n > opts.max_order {
        return Err(SolveError::OrderTooLarge { order: n, bound: opts.max_order });
    }
    let c = to_dense(&inst.c);
    let ops = Ops { cons: inst.quads.iter().map(entries).collect(), trace: inst.normalize_trace, n };
    let k = ops.len();
    let mut b = DVector::zeros(k);
    if inst.normalize_trace {
        b[k - 1] = 1.0;
    }
    let cnorm = c.norm();
    let nf = n as f64;
    let mut x = DMatrix::identity(n, n) / nf.max(1.0);
    let eta = 10f64.max(nf.sqrt()).max(cnorm);
    let mut z = DMatrix::identity(n, n) * eta;
    let mut y = DVector::zeros(k);
    let tau = 0.95;
    let mut it = 0;
    let mut converged = false;
    loop {
        let rp = &b - ops.apply(&x);
        let rd = &c - ops.adjoint(&y) - &z;
        let pobj = inner(&c, &x);
        let dobj = b.dot(&y);
        let pres = rp.norm() / (1.0 + b.norm());
        let dres = rd.norm() / (1.0 + cnorm);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pres <= opts.tol && dres <= opts.tol && gap <= opts.tol {
            converged = true;
            break;
        }
        if it >= opts.max_iter {
            break;
        }
        it += 1;
        let mu = inner(&x, &z) / nf;
        // near the boundary the factorization can fail in floating point; keep the iterate
        let Some(zchol) = z.clone().cholesky() else { break };
        let zi = zchol.inverse();
        let m = ops.schur(&x, &zi);
        let mchol = match m.clone().cholesky() {
            Some(ch) => ch,
            None => {
                let mut reg = m;
                let d = 1e-12 * reg.diagonal().max().max(1.0);
                for i in 0..k {
                    reg[(i, i)] += d;
                }
                reg.cholesky().ok_or_else(|| SolveError::Numerical("Schur complement".into()))?
            }
        };
        let xrd = &x * &rd * &zi;
        let direction = |kmat: &DMatrix<f64>| {
            let g = kmat * &zi - &x - &xrd;
            let dy = mchol.solve(&(&rp - ops.apply(&g)));
            let dz = &rd - ops.adjoint(&dy);
            let dx = kmat * &zi - &x - &x * &dz * &zi;
            let dx = (&dx + dx.transpose()) * 0.5;
            (dx, dy, dz)
        };
        // predictor
        let zero = DMatrix::zeros(n, n);
        let (dxp, _, dzp) = direction(&zero);
        let (Ok(sx), Ok(sz)) = (max_step(&x, &dxp), max_step(&z, &dzp)) else { break };
        let ap = (tau * sx).min(1.0);
        let ad = (tau * sz).min(1.0);
        let mu_aff = inner(&(&x + &dxp * ap), &(&z + &dzp * ad)) / nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        // corrector
        let kmat = DMatrix::identity(n, n) * (sigma * mu) - &dxp * &dzp;
        let (dx, dy, dz) = direction(&kmat);
        let (Ok(sx), Ok(sz)) = (max_step(&x, &dx), max_step(&z, &dz)) else { break };
        let ap = (tau * sx).min(1.0);
        let ad = (tau * sz).min(1.0);
        x += &dx * ap;
        x = (&x + x.transpose()) * 0.5;
        y += &dy * ad;
        z += &dz * ad;
        z = (&z + z.transpose()) * 0.5;
    }
    let rp = &b - ops.apply(&x);
    let rd = &c - ops.adjoint(&y) - &z;
    let s = &c - ops.adjoint(&y);
    let min_eig_s = s.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    let nc = inst.quads.len();
    Ok(SolverResult {
        objective: inner(&c, &x),
        dual_objective: b.dot(&y),
        primal_residual: rp.norm(),
        dual_residual: rd.norm(),
        min_eig_s,
        iterations: it,
        converged,
        y0: if inst.normalize_trace { y[nc] } else { 0.0 },
        y: y.iter().take(nc).cloned().collect(),
        x,
    })
}

/// Number of eigenvalues above `rel · λ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    let ev = m.clone().symmetric_eigenvalues();
    let top = ev.iter().cloned().fold(0.0, f64::max);
    ev.iter().filter(|&&v| v > rel * top).count()
}

/// Eigenvalues of the float slack C − Σ y A − y₀ I.
pub fn slack_eigenvalues(inst: &SdpInstance, r: &SolverResult) -> Vec<f64> {
    let ops = Ops { cons: inst.quads.iter().map(entries).collect(), trace: inst.normalize_trace, n: inst.c.order() };
    let mut y = DVector::from_vec(r.y.clone());
    if inst.normalize_trace {
        y = y.push(r.y0);
    }
    let s = to_dense(&inst.c) - ops.adjoint(&y);
    let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn estimate_gamma(
    class: MatrixClass,
    n: usize,
    sel: ConstraintSelection,
    opts: &SolverOptions,
) -> Result<(f64, SolverResult), SolveError> {
    let inst = instance_for(class, n, sel)?;
    let r = solve(&inst, opts)?;
    Ok((r.gamma(), r))
}

/// Last continued-fraction convergent of `x` whose denominator stays ≤ `max_den`.
pub fn rational_approx(x: f64, max_den: u64) -> Rational {
    let max_den = BigInt::from(max_den.max(1));
    if !x.is_finite() {
        return Rational::from_integer(0.into());
    }
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
        if r.abs() > 1e15 {
            break;
        }
    }
    if k1 == BigInt::from(0) {
        return Rational::from_integer(BigInt::from(x.round() as i64));
    }
    Rational::new(h1, k1)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RoundingVerdict {
    CertifiedExact,
    RoundedButNotPsd,
}

#[derive(Clone, Debug)]
pub struct Rationalized {
    pub dual: DualCertificate,
    pub verdict: RoundingVerdict,
    /// wᵀSw of the refuting vector when not PSD
    pub witness_value: Option<Rational>,
}

/// Rounds every coordinate (largest magnitude first) and γ, assembles S exactly and
/// certifies it. CertifiedExact only ever comes from a successful exact LDL.
pub fn rationalize(
    class: MatrixClass,
    n: usize,
    quads: &[Quadruple],
    y_float: &[f64],
    gamma_float: f64,
    max_den: u64,
) -> Result<Rationalized, SolveError> {
    let mut order: Vec<usize> = (0..quads.len()).collect();
    order.sort_by(|&a, &b| y_float[b].abs().partial_cmp(&y_float[a].abs()).unwrap().then(a.cmp(&b)));
    let mut dv = DualVector { gamma: rational_approx(gamma_float, max_den), ..Default::default() };
    for i in order {
        dv.add(quads[i], &rational_approx(y_float[i], max_den));
    }
    let dual = build_dual(class, n, dv).map_err(|e| SolveError::Numerical(e.to_string()))?;
    let (verdict, witness_value) = match ldl_psd_certify(&dual.s) {
        PsdVerdict::Psd(_) => (RoundingVerdict::CertifiedExact, None),
        PsdVerdict::NotPsd(w) => (RoundingVerdict::RoundedButNotPsd, Some(w.value)),
    };
    Ok(Rationalized { dual, verdict, witness_value })
}

/// Solver run plus rounding, summarized for the conjecture ledger.
pub fn explore(
    class: MatrixClass,
    n: usize,
    sel: ConstraintSelection,
    opts: &SolverOptions,
    max_den: u64,
) -> Result<(SolverResult, Rationalized, Report), SolveError> {
    let inst = instance_for(class, n, sel)?;
    let res = solve(&inst, opts)?;
    let rat = rationalize(class, n, &inst.quads, &res.y, res.gamma(), max_den)?;
    let mut r = Report::new("explore");
    r.class = Some(class.name().into());
    r.n = Some(n);
    r.check_float(
        "solver_converged",
        res.converged,
        format!(
            "{} iterations, primal residual {:.2e}, dual residual {:.2e}, gap {:.2e}",
            res.iterations,
            res.primal_residual,
            res.dual_residual,
            res.gap()
        ),
    );
    r.control("constraints", &int(inst.quads.len() as i64));
    r.control("gamma_rounded", &rat.dual.y.gamma);
    r.control("support_rounded", &int(rat.dual.y.support() as i64));
    r.control("max_denominator", &int(max_den as i64));
    r.control_sums.insert("gamma_float".into(), format!("{:.12}", res.gamma()));
    r.control_sums.insert("min_eig_S_float".into(), format!("{:.3e}", res.min_eig_s));
    let detail = match (&rat.verdict, &rat.witness_value) {
        (RoundingVerdict::CertifiedExact, _) => "CertifiedExact: exact LDLᵀ of the rounded slack".to_string(),
        (_, Some(v)) => format!("RoundedButNotPsd: witness value ≈ {:.3e}", crate::exact::to_f64(v)),
        _ => "RoundedButNotPsd".to_string(),
    };
    r.check("rational_certificate", rat.verdict == RoundingVerdict::CertifiedExact, detail);
    Ok((res, rat, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    #[test]
    fn convergents() {
        assert_eq!(rational_approx(0.5000001, 64), frac(1, 2));
        assert_eq!(rational_approx(-0.9999999, 64), int(-1));
        assert_eq!(rational_approx(3e-9, 64), int(0));
        assert_eq!(rational_approx(0.33334, 64), frac(1, 3));
        assert_eq!(rational_approx(2.0, 4), int(2));
    }

    #[test]
    fn zero_input_certifies_iff_c_psd() {
        // cyclic Hankel C is PSD; general n=3 C is not
        let q: Vec<Quadruple> = vec![];
        let r = rationalize(MatrixClass::CyclicHankel, 4, &q, &[], 0.0, 8).unwrap();
        assert_eq!(r.verdict, RoundingVerdict::CertifiedExact);
        let r = rationalize(MatrixClass::General, 3, &q, &[], 0.0, 8).unwrap();
        assert_eq!(r.verdict, RoundingVerdict::RoundedButNotPsd);
    }

    #[test]
    fn general_two_and_three() {
        let opts = SolverOptions::default();
        let (g2, r2) = estimate_gamma(MatrixClass::General, 2, ConstraintSelection::All, &opts).unwrap();
        assert!(g2.abs() < 1e-6, "{g2} {r2:?}");
        let (g3, _) = estimate_gamma(MatrixClass::General, 3, ConstraintSelection::Auto, &opts).unwrap();
        assert!((g3 - 0.5).abs() < 1e-6, "{g3}");
    }
}
