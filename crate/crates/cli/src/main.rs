use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bwsos_core::certificates::{build_dual, general_dual, verify_dual_general, CertificateFile, DualCertificate};
use bwsos_core::constraints::{full_elimination, strategy_b, DualVector};
use bwsos_core::indexing::MatrixClass;
use bwsos_core::report::Report;
use bwsos_core::sdpsolve::{self, ConstraintSelection, SolverOptions};
use bwsos_core::structured;
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "bwsos", version, about = "Sum-of-squares certificates for the Böttcher–Wenzel form")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// record wall-clock time in the report
    #[arg(long, global = true)]
    timing: bool,
    /// lift the default order caps
    #[arg(long, global = true)]
    big: bool,
    #[arg(long, global = true, env = "BWSOS_TOL")]
    tol: Option<f64>,
    #[arg(long, global = true, env = "BWSOS_MAXIT")]
    max_iter: Option<usize>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Selection {
    Auto,
    All,
    Touching,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, verify and optionally export a closed-form certificate
    Certify {
        #[arg(long)]
        class: MatrixClass,
        #[arg(long)]
        n: usize,
        /// certificate file to write
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Re-import a certificate file and verify it from scratch
    Verify { path: PathBuf },
    /// Reproduce a table and diff it against the printed values
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
    },
    /// Toeplitz block analysis of the Strategy B dual
    Toeplitz {
        #[arg(long)]
        n: usize,
    },
    /// Solve the SDP numerically and try to round it to an exact certificate
    Explore {
        #[arg(long)]
        class: MatrixClass,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        max_denominator: u64,
        #[arg(long, value_enum, default_value_t = Selection::Auto)]
        constraints: Selection,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Verify a hard-coded worked example
    Fixture { name: FixtureName },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FixtureName {
    Hankel3,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn solver_options(cli: &Cli) -> SolverOptions {
    let mut o = SolverOptions::default();
    if let Some(t) = cli.tol {
        o.tol = t;
    }
    if let Some(m) = cli.max_iter {
        o.max_iter = m;
    }
    o
}

fn cap(class: MatrixClass, n: usize, big: bool) -> Result<(), Failure> {
    let bound = match (class, big) {
        (MatrixClass::General, false) => 5,
        (MatrixClass::General, true) => 7,
        (_, false) => 8,
        (_, true) => 12,
    };
    if n > bound {
        let hint = if big { "" } else { " (raise with --big)" };
        return Err(Failure(format!("n = {n} exceeds the cap {bound} for {}{hint}", class.name())));
    }
    Ok(())
}

fn closed_form_dual(class: MatrixClass, n: usize) -> Result<(DualCertificate, Report), Failure> {
    Ok(match class {
        MatrixClass::General => {
            let dc = general_dual(n)?;
            let r = verify_dual_general(&dc);
            (dc, r)
        }
        MatrixClass::Tridiagonal => {
            let r = structured::tridiagonal_report(n, None)?;
            (structured::tridiagonal_identity(n)?.dual, r)
        }
        MatrixClass::BackwardTridiagonal => {
            let r = structured::backward_tridiagonal_report(n, None)?;
            let y = if n >= 3 { full_elimination(class, n)? } else { DualVector::default() };
            (build_dual(class, n, y)?, r)
        }
        MatrixClass::CyclicHankel => (build_dual(class, n, DualVector::default())?, structured::cyclic_hankel_report(n)?),
        MatrixClass::Hankel => {
            if n != 3 {
                return Err(Failure("hankel has a closed-form certificate only for n = 3; try `explore`".into()));
            }
            (structured::hankel3_dual()?, structured::hankel3_verify()?)
        }
        MatrixClass::Toeplitz => {
            let (_, r) = structured::toeplitz_analyze(n)?;
            (build_dual(class, n, strategy_b(n)?)?, r)
        }
    })
}

/// Exports the certificate when S is PSD and folds the file's own verification in.
fn export(dc: &DualCertificate, path: Option<&PathBuf>, r: &mut Report) -> Result<(), Failure> {
    let Ok(file) = CertificateFile::from_dual(dc) else {
        r.check("certificate_exported", false, "slack is not PSD; nothing to export");
        return Ok(());
    };
    let text = file.to_text();
    let back = CertificateFile::parse(&text)?;
    r.merge_prefixed(back.verify()?, "file_");
    if let Some(p) = path {
        std::fs::write(p, text)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let opts = solver_options(cli);
    let mut r = match &cli.command {
        Command::Certify { class, n, cert } => {
            cap(*class, *n, cli.big)?;
            let (dc, mut r) = closed_form_dual(*class, *n)?;
            r.command = "certify".into();
            // printed-table diffs are the business of `tables`
            if !r.mismatches.is_empty() {
                let k = r.mismatches.len() as i64;
                r.mismatches.clear();
                r.control("printed_value_mismatches_see_tables", &bwsos_core::exact::int(k));
            }
            r.class = Some(class.name().into());
            r.n = Some(*n);
            r.control("gamma", &dc.y.gamma);
            export(&dc, cert.as_ref(), &mut r)?;
            r
        }
        Command::Verify { path } => {
            let text = std::fs::read_to_string(path)?;
            CertificateFile::parse(&text)?.verify()?
        }
        Command::Tables { which } => {
            let mut r = Report::new(format!("tables {which}"));
            match which {
                1 => {
                    for n in 3..=5 {
                        r.merge_prefixed(verify_dual_general(&general_dual(n)?), &format!("n{n}."));
                    }
                }
                2 => {
                    for n in 2..=8 {
                        r.merge_prefixed(structured::tridiagonal_report(n, Some(&opts))?, &format!("n{n}."));
                    }
                }
                _ => {
                    for n in 2..=8 {
                        r.merge_prefixed(structured::backward_tridiagonal_report(n, Some(&opts))?, &format!("n{n}."));
                    }
                }
            }
            r
        }
        Command::Toeplitz { n } => {
            cap(MatrixClass::Toeplitz, *n, cli.big)?;
            structured::toeplitz_analyze(*n)?.1
        }
        Command::Explore { class, n, max_denominator, constraints, cert } => {
            cap(*class, *n, cli.big)?;
            let sel = match constraints {
                Selection::Auto => ConstraintSelection::Auto,
                Selection::All => ConstraintSelection::All,
                Selection::Touching => ConstraintSelection::Touching,
            };
            let (_, rat, mut r) = sdpsolve::explore(*class, *n, sel, &opts, *max_denominator)?;
            if rat.verdict == sdpsolve::RoundingVerdict::CertifiedExact {
                export(&rat.dual, cert.as_ref(), &mut r)?;
            }
            r
        }
        Command::Fixture { name: FixtureName::Hankel3 } => structured::hankel3_verify()?,
    };
    if r.command.is_empty() {
        r.command = "bwsos".into();
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let mut report = match run(&cli) {
        Ok(r) => r,
        Err(Failure(msg)) => {
            eprintln!("bwsos: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    let body = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                eprintln!("bwsos: cannot write {}: {e}", p.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
