//! One line per acceptance criterion. Run with `cargo test -p bwsos --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use bwsos_core::bwform::objective_gram;
use bwsos_core::certificates::{
    build_primal, general_dual, verify_dual_general, REFERENCE_BLOCK_N3, REFERENCE_BLOCK_N3_INDICES,
    REFERENCE_V12_N3,
};
use bwsos_core::constraints::{mixed_pair_count_backward, strategy_b};
use bwsos_core::exact::{binomial, connected_components, int, SymMatrix};
use bwsos_core::indexing::MatrixClass;
use bwsos_core::report::Report;
use bwsos_core::sdpsolve::{self, ConstraintSelection, RoundingVerdict, SolverOptions};
use bwsos_core::structured;

struct Outcome {
    pass: bool,
    detail: String,
}

fn passes(r: &Report, names: &[&str]) -> Result<(), String> {
    for name in names {
        match r.verdicts.iter().find(|v| v.name == *name) {
            Some(v) if v.pass => {}
            Some(v) => return Err(format!("{name} failed: {}", v.detail)),
            None => return Err(format!("{name} missing")),
        }
    }
    Ok(())
}

fn all_pass(r: &Report, label: &str) -> Result<(), String> {
    match r.failed().first() {
        None => Ok(()),
        Some(v) => Err(format!("{label}: {} failed: {}", v.name, v.detail)),
    }
}

fn run(f: impl FnOnce() -> Result<String, String>) -> Outcome {
    match f() {
        Ok(detail) => Outcome { pass: true, detail },
        Err(detail) => Outcome { pass: false, detail },
    }
}

fn criterion1() -> Outcome {
    run(|| {
        let mut times = Vec::new();
        for (n, bound) in [(3, 1), (4, 30), (5, 600)] {
            let t = Instant::now();
            let r = verify_dual_general(&general_dual(n).map_err(|e| e.to_string())?);
            let el = t.elapsed();
            passes(&r, &["S_psd", "defect", "gamma", "primal_objective", "strong_duality"])?;
            if el > Duration::from_secs(bound) {
                return Err(format!("n={n} took {el:?}, bound {bound} s"));
            }
            times.push(format!("n={n} {} ms", el.as_millis()));
        }
        Ok(format!("Strategy A exact PSD, defect n²−1, γ=(n−2)/2, tr(CX)=(2−n)/2 ({})", times.join(", ")))
    })
}

fn criterion2() -> Outcome {
    run(|| {
        let mut flagged = 0;
        for n in 3..=5 {
            let r = verify_dual_general(&general_dual(n).map_err(|e| e.to_string())?);
            passes(
                &r,
                &[
                    "block_sizes",
                    "spectrum_big_blocks",
                    "spectrum_middle_block",
                    "spectrum_4_blocks",
                    "spectrum_scalar_blocks",
                    "total_Eig=0",
                    "total_Eig=4",
                    "total_Eig=n",
                    "row_totals_match_spectrum",
                    "trace_2S",
                ],
            )?;
            flagged += r.mismatches.iter().filter(|m| m.name.starts_with("table_total")).count();
        }
        if flagged == 0 {
            return Err("expected the flagged total rows".into());
        }
        Ok(format!("block sizes and per-block spectra exact; {flagged} printed total rows flagged (exit 3 path)"))
    })
}

fn criterion3() -> Outcome {
    run(|| {
        for n in 3..=5u64 {
            let r = verify_dual_general(&general_dual(n as usize).map_err(|e| e.to_string())?);
            passes(&r, &["trace_C", "active_count", "eig_control", "diag_control", "trace_2S_from_spectrum"])?;
            let want_c = n * (n - 1) * (n - 1) * (n + 1);
            let want_act = binomial(n, 2) * (n * n - 4);
            let got_c = r.control_sums.get("trace_C").cloned().unwrap_or_default();
            let got_act = r.control_sums.get("active").cloned().unwrap_or_default();
            if got_c != format!("{want_c}/1") || got_act != format!("{want_act}/1") {
                return Err(format!("n={n}: trace_C {got_c}, active {got_act}"));
            }
        }
        Ok("trace(C), active counts, ROW/EIG/DIAG/TRACE controls exact for n = 3..5".into())
    })
}

fn criterion4() -> Outcome {
    run(|| {
        let pc = build_primal(3).map_err(|e| e.to_string())?;
        if pc.dense_vector(0) != REFERENCE_V12_N3.to_vec() {
            return Err("v_{1,2} differs from the printed vector".into());
        }
        let dc = general_dual(3).map_err(|e| e.to_string())?;
        let two_s = dc.s.scaled(&int(2));
        let idx: Vec<usize> = REFERENCE_BLOCK_N3_INDICES.iter().map(|k| k - 1).collect();
        if !connected_components(&two_s).contains(&idx) {
            return Err("index set is not a block of S".into());
        }
        let rows: Vec<&[i64]> = REFERENCE_BLOCK_N3.iter().map(|r| &r[..]).collect();
        if two_s.submatrix(&idx) != SymMatrix::from_i64(&rows).map_err(|e| e.to_string())? {
            return Err("10×10 block differs from the printed matrix".into());
        }
        Ok("v_{1,2} and the 10×10 block on {1,4,8,10,13,21,24,28,30,32} match entrywise".into())
    })
}

fn criterion5() -> Outcome {
    run(|| {
        let opts = SolverOptions::default();
        let mut slowest = Duration::ZERO;
        for n in 2..=8 {
            let t = Instant::now();
            let r = structured::tridiagonal_report(n, Some(&opts)).map_err(|e| e.to_string())?;
            slowest = slowest.max(t.elapsed());
            all_pass(&r, &format!("n={n}"))?;
            passes(
                &r,
                &[
                    "lhs_minus_rhs_is_zero",
                    "table2_eigenvalue_multiplicities",
                    "table2_two_blocks",
                    "table2_active",
                    "table2_rank_X",
                ],
            )?;
        }
        if slowest > Duration::from_secs(60) {
            return Err(format!("slowest n took {slowest:?}"));
        }
        Ok(format!("identity exact and Table 2 rows n = 2..8 reproduced (slowest {} ms)", slowest.as_millis()))
    })
}

fn criterion6() -> Outcome {
    run(|| {
        for n in 3..=8 {
            let want = if n % 2 == 0 { 5 * n - 12 } else { 5 * n - 8 };
            let got = mixed_pair_count_backward(n).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("n={n}: {got} mixed pairs, want {want}"));
            }
        }
        let opts = SolverOptions::default();
        let mut mism = Vec::new();
        for n in 3..=8 {
            let r = structured::backward_tridiagonal_report(n, Some(&opts)).map_err(|e| e.to_string())?;
            all_pass(&r, &format!("n={n}"))?;
            if n % 2 == 0 {
                passes(&r, &["solver_eigenvalues_round", "table3_rank_X", "table3_eigenvalue_multiplicities"])?;
            }
            passes(&r, &["table3_defect", "table3_four_blocks", "table3_active"])?;
            mism.extend(r.mismatches.iter().map(|m| format!("{} {}→{}", m.name, m.printed, m.computed)));
        }
        Ok(format!("counts 5n−12/5n−8; even rows via solver; odd rows defect and blocks; flagged: {}", mism.join(", ")))
    })
}

fn criterion7() -> Outcome {
    run(|| {
        for n in 3..=8 {
            let r = structured::cyclic_hankel_report(n).map_err(|e| e.to_string())?;
            passes(&r, &["sos_identity", "residual_empty_iff_odd"])?;
            all_pass(&r, &format!("n={n}"))?;
        }
        let r4 = structured::cyclic_hankel_report(4).map_err(|e| e.to_string())?;
        passes(&r4, &["six_square_identity"])?;
        Ok("SOS identity exact at γ=0 for n = 3..8; six-square identity; residual empty iff n odd".into())
    })
}

fn criterion8() -> Outcome {
    run(|| {
        let r = structured::hankel3_verify().map_err(|e| e.to_string())?;
        all_pass(&r, "hankel3")?;
        passes(&r, &["S_matches_printed", "brace_entries", "E1", "E2", "E3", "final_identity"])?;
        Ok(format!("{} exact checks: S, braces, E1–E3, all eigenvector columns, final identity", r.verdicts.len()))
    })
}

/// Everything but the literal divisibility by the printed p1, which carries a coefficient typo.
fn criterion9() -> Outcome {
    let mut notes = Vec::new();
    let body = run(|| {
        for n in 3..=10 {
            let (t, r) = structured::toeplitz_analyze(n).map_err(|e| e.to_string())?;
            passes(&r, &["defect", "max_diagonal", "max_eigenvalue", "min_off_diagonal", "active_count"])?;
            if n <= 7 {
                passes(&r, &["S_psd"])?;
            } else if t.negative_bracket.is_none() {
                return Err(format!("n={n}: no negative bracket"));
            }
            if n == 8 {
                passes(&r, &["p1_divides_charpoly", "p1_root_near_minus_0_2228"])?;
                notes.extend(r.mismatches.iter().map(|m| format!("{}: printed {}, computed {}", m.name, m.printed, m.computed)));
            }
        }
        let g = objective_gram(MatrixClass::Toeplitz, 5).map_err(|e| e.to_string())?;
        if strategy_b(5).map_err(|e| e.to_string())?.support() != 14 || g.mat.order() != 28 {
            return Err("n=5 counts".into());
        }
        Ok(String::new())
    });
    if !body.pass {
        return body;
    }
    // the printed p1 has x⁴ coefficient 536; the block's factor has 3536
    Outcome {
        pass: notes.is_empty(),
        detail: if notes.is_empty() {
            "all parts exact".into()
        } else {
            format!(
                "printed p1 does not divide charpoly(B) ({}); the corrected factor divides exactly and brackets \
                 the root near −0.2228; n ≤ 7 PSD, n = 8..10 negative eigenvalue certified; defect, max eigenvalue, \
                 min off-diagonal and active counts exact",
                notes.join("; ")
            )
        },
    }
}

fn criterion10() -> Outcome {
    run(|| {
        let opts = SolverOptions::default();
        for n in [3, 4] {
            let (g, _) = sdpsolve::estimate_gamma(MatrixClass::General, n, ConstraintSelection::Auto, &opts)
                .map_err(|e| e.to_string())?;
            if (g - (n as f64 - 2.0) / 2.0).abs() > 1e-5 {
                return Err(format!("n={n}: gamma {g}"));
            }
        }
        let (_, rat, _) = sdpsolve::explore(MatrixClass::Hankel, 3, ConstraintSelection::All, &opts, 4)
            .map_err(|e| e.to_string())?;
        let fixture = structured::hankel3_dual().map_err(|e| e.to_string())?;
        if rat.verdict != RoundingVerdict::CertifiedExact || rat.dual.y != fixture.y {
            return Err("Hankel-3 certificate not recovered".into());
        }
        Ok("γ within 1e−5 for n = 3, 4; Hankel-3 dual recovered and certified exactly".into())
    })
}

fn criterion11() -> Outcome {
    run(|| {
        let opts = SolverOptions::default();
        let mut out = Vec::new();
        for n in [8, 9] {
            let (res, rat, _) = sdpsolve::explore(MatrixClass::Toeplitz, n, ConstraintSelection::Auto, &opts, 64)
                .map_err(|e| e.to_string())?;
            out.push(format!("n={n}: γ≈{:.2e}, {:?}", res.gamma(), rat.verdict));
        }
        Ok(format!("explorer completed ({})", out.join("; ")))
    })
}

/// Criteria that are red for a documented reason unrelated to our computation.
const KNOWN_RED: &[usize] = &[9];

#[test]
fn acceptance() {
    let criteria: [fn() -> Outcome; 11] = [
        criterion1,
        criterion2,
        criterion3,
        criterion4,
        criterion5,
        criterion6,
        criterion7,
        criterion8,
        criterion9,
        criterion10,
        criterion11,
    ];
    let mut unexpected = Vec::new();
    for (i, c) in criteria.iter().enumerate() {
        let k = i + 1;
        let o = c();
        println!("criterion {k:>2}: {} — {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && !KNOWN_RED.contains(&k) {
            unexpected.push(k);
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
