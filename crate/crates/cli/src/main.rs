//! `dualmds` command-line interface.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 domain error
//! (including non-Euclidean input), 3 parse or I/O error.

mod report;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use dualmds::basis::{basis_atom, basis_gram, dual_atom, dual_gram};
use dualmds::mds::{embed, is_euclidean, procrustes_residual, squared_distances, DEFAULT_RANK_TOLERANCE};
use dualmds::nalgebra::DMatrix;
use dualmds::nearness::{constraint_matrix, gram_identity_check};
use dualmds::pairspace::{pairs, PointConfiguration, SquaredDistanceMatrix};
use dualmds::stability::noise_experiment;
use dualmds::verify::{check_singular_values, verify, CheckResult};
use dualmds::{io, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::report::RunReport;

#[derive(Parser)]
#[command(name = "dualmds", version, about = "Dual-basis classical multidimensional scaling")]
struct Cli {
    /// Print the machine-readable JSON report instead of the text block.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded standard-normal configuration and its squared distances.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for points.csv and distances.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a squared-distance CSV with classical MDS.
    Embed {
        /// Squared-distance matrix (CSV, no header).
        input: PathBuf,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOLERANCE)]
        tol: f64,
        /// Output CSV for the recovered points.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Original points to compare against with a Procrustes residual.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Check every closed-form result for one n.
    Verify {
        #[arg(long)]
        n: usize,
    },
    /// Randomized additive-noise experiment.
    Noise {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export the triangle-inequality constraint matrix.
    Nearness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Triplets)]
        format: Format,
    },
    /// Print w, v, H and H^-1 for small n.
    Basis {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dense,
    Triplets,
}

/// A command failure mapped to an exit code.
struct Failure {
    code: u8,
    message: String,
    report: Option<RunReport>,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Parse(_) | Error::Io(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
            report: None,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match cli.command {
        Command::Gen { n, r, seed, out } => cmd_gen(n, r, seed, &out),
        Command::Embed {
            input,
            r,
            tol,
            out,
            reference,
        } => cmd_embed(&input, r, tol, out.as_deref(), reference.as_deref()),
        Command::Verify { n } => cmd_verify(n),
        Command::Noise {
            n,
            r,
            epsilon,
            trials,
            seed,
        } => cmd_noise(n, r, epsilon, trials, seed),
        Command::Nearness { n, out, format } => cmd_nearness(n, out.as_deref(), format),
        Command::Basis { n } => cmd_basis(n),
    };
    match outcome {
        Ok(mut report) => {
            report.duration = start.elapsed();
            emit(&report, cli.json);
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(failure) => {
            if let Some(mut report) = failure.report {
                report.duration = start.elapsed();
                emit(&report, cli.json);
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn emit(report: &RunReport, json: bool) {
    let out = if json {
        format!("{}\n", serde_json::to_string_pretty(&report.to_json()).expect("serializable"))
    } else {
        report.to_text()
    };
    // A reader that stops early, such as `| head`, is not worth a panic.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn cmd_gen(n: usize, r: usize, seed: u64, out: &Path) -> Result<RunReport, Failure> {
    if r < 1 || n <= r {
        return Err(Error::Domain(format!("gen needs n > r >= 1, got n = {n}, r = {r}")).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = DMatrix::from_fn(n, r, |_, _| StandardNormal.sample(&mut rng));
    let points = PointConfiguration::new(points)?;
    let d = squared_distances(&points);
    fs::create_dir_all(out)?;
    io::write_matrix_file(out.join("points.csv"), points.points())?;
    io::write_matrix_file(out.join("distances.csv"), d.entries())?;

    let mut report = RunReport::new("gen");
    report.param("n", n);
    report.param("r", r);
    report.param("seed", seed);
    report.param("out", out.display());
    let test = is_euclidean(&d, DEFAULT_RANK_TOLERANCE);
    report.checks.push(CheckResult {
        name: "euclidean",
        pass: test.euclidean,
        values: vec![("min_eigenvalue".into(), test.min_eigenvalue)],
    });
    Ok(report)
}

fn cmd_embed(
    input: &Path,
    dim: Option<usize>,
    tol: f64,
    out: Option<&Path>,
    reference: Option<&Path>,
) -> Result<RunReport, Failure> {
    let raw = io::read_matrix_file(input)?;
    // an input that fails validation is a malformed file, not a domain error
    let d = SquaredDistanceMatrix::new(raw).map_err(|e| Failure {
        code: 3,
        message: format!("{}: {e}", input.display()),
        report: None,
    })?;

    let mut report = RunReport::new("embed");
    report.param("input", input.display());
    report.param("r", dim.map_or("auto".to_string(), |r| r.to_string()));
    report.param("tol", tol);

    let result = match embed(&d, dim, tol) {
        Ok(result) => result,
        Err(Error::NonEuclidean { min_eigenvalue }) => {
            report.checks.push(CheckResult {
                name: "euclidean",
                pass: false,
                values: vec![("min_eigenvalue".into(), min_eigenvalue)],
            });
            return Err(Failure {
                code: 2,
                message: format!("input is not Euclidean (minimum Gram eigenvalue {min_eigenvalue:e})"),
                report: Some(report),
            });
        }
        Err(e) => return Err(e.into()),
    };

    let mut values = vec![
        ("rank".to_string(), result.rank as f64),
        ("min_eigenvalue".to_string(), result.min_eigenvalue),
        ("discarded_mass".to_string(), result.discarded_mass),
    ];
    for (k, l) in result.retained_eigenvalues.iter().enumerate() {
        values.push((format!("retained eigenvalue {}", k + 1), *l));
    }
    report.checks.push(CheckResult {
        name: "euclidean",
        pass: true,
        values,
    });
    if result.padded_dims > 0 {
        report.notes.push(format!(
            "requested dimension exceeds detected rank {}; {} zero column(s) appended",
            result.rank, result.padded_dims
        ));
    }
    if let Some(reference) = reference {
        let original = PointConfiguration::new(io::read_matrix_file(reference)?)?;
        let residual = procrustes_residual(&result.points, &original)?;
        let limit = 1e-7 * original.frobenius_norm().max(1.0);
        report.checks.push(CheckResult {
            name: "procrustes",
            pass: residual <= limit,
            values: vec![("residual".into(), residual), ("limit".into(), limit)],
        });
    }
    match out {
        Some(path) => io::write_matrix_file(path, result.points.points())?,
        None => report.matrices.push(("points".into(), csv_text(result.points.points())?)),
    }
    Ok(report)
}

fn csv_text(m: &DMatrix<f64>) -> Result<String, Failure> {
    let mut buf = Vec::new();
    io::write_matrix(&mut buf, m)?;
    Ok(String::from_utf8(buf).expect("ascii output"))
}

fn cmd_verify(n: usize) -> Result<RunReport, Failure> {
    let mut report = RunReport::new("verify");
    report.param("n", n);
    report.checks = verify(n)?;
    Ok(report)
}

fn cmd_noise(n: usize, r: usize, epsilon: f64, trials: usize, seed: u64) -> Result<RunReport, Failure> {
    let s = noise_experiment(n, r, epsilon, trials, seed)?;
    let mut report = RunReport::new("noise");
    report.param("n", n);
    report.param("r", r);
    report.param("epsilon", epsilon);
    report.param("trials", trials);
    report.param("seed", seed);
    report.checks.push(CheckResult {
        name: "noise_bound",
        pass: s.pass,
        values: vec![
            ("max_ratio".into(), s.max_ratio),
            ("amplification_factor".into(), s.amplification_factor),
            ("bound".into(), s.bound),
        ],
    });
    Ok(report)
}

fn cmd_nearness(n: usize, out: Option<&Path>, format: Format) -> Result<RunReport, Failure> {
    let a = constraint_matrix(n)?;
    let mut buf = Vec::new();
    match format {
        Format::Dense => io::write_int_matrix(&mut buf, &a.to_dense())?,
        Format::Triplets => a.write_triplets(&mut buf)?,
    }
    let mut report = RunReport::new("nearness");
    report.param("n", n);
    report.param(
        "format",
        match format {
            Format::Dense => "dense",
            Format::Triplets => "triplets",
        },
    );
    report.param("rows", a.nrows());
    report.param("cols", a.ncols());
    match out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => report
            .matrices
            .push(("A".into(), String::from_utf8(buf).expect("ascii output"))),
    }
    let identity = gram_identity_check(n)?;
    report.checks.push(CheckResult {
        name: "nearness_identity",
        pass: identity.holds,
        values: vec![
            ("max_deviation".into(), identity.max_deviation as f64),
            ("diagonal".into(), identity.diagonal.map_or(f64::NAN, |d| d as f64)),
        ],
    });
    report.checks.push(check_singular_values(n)?);
    Ok(report)
}

const BASIS_MAX_N: usize = 8;

/// Entries times the smallest of `n^2`, `2 n^2` that makes them integers.
fn scaled_text(m: &DMatrix<f64>, n: usize) -> String {
    let candidates = [1, n * n, 2 * n * n];
    let scale = candidates
        .into_iter()
        .find(|&s| m.iter().all(|v| (v * s as f64 - (v * s as f64).round()).abs() < 1e-9))
        .unwrap_or(1);
    let mut s = String::new();
    if scale != 1 {
        s.push_str(&format!("(1/{scale}) *\n"));
    }
    for row in m.row_iter() {
        let cells: Vec<String> = row
            .iter()
            .map(|v| format!("{:>4}", (v * scale as f64).round() as i64))
            .collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

fn cmd_basis(n: usize) -> Result<RunReport, Failure> {
    if !(2..=BASIS_MAX_N).contains(&n) {
        return Err(Error::Domain(format!("basis prints 2 <= n <= {BASIS_MAX_N}, got {n}")).into());
    }
    let mut report = RunReport::new("basis");
    report.param("n", n);
    for p in pairs(n) {
        report
            .matrices
            .push((format!("w{p}"), scaled_text(&basis_atom(p).to_f64(), n)));
        report
            .matrices
            .push((format!("v{p}"), scaled_text(&dual_atom(p).matrix(), n)));
    }
    report
        .matrices
        .push(("H".into(), scaled_text(&basis_gram(n)?.to_f64(), n)));
    report
        .matrices
        .push(("H^-1".into(), scaled_text(&dual_gram(n)?, n)));
    Ok(report)
}
