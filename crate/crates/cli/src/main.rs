use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use metaplectic::io::{self, FactorizationReport, MatrixFile};
use metaplectic::linalg::{Mat, INVERTIBILITY_RTOL};
use metaplectic::numeric::{
    apply_metaplectic, opa_build, rihacek, stft, wigner, wigner_metaplectic, GaussianChirp, Grid, GridFunction,
};
use metaplectic::probes::{self, Evaluator, ProbeReport, Verdict};
use metaplectic::symplectic::{
    classify_lp, dj_factorize, random_free, random_lower_triangular, rihacek_matrix, shift_invertible,
    symplectic_residual, BoundednessCase, SymplecticMatrix, DEFAULT_SYMPLECTIC_TOL,
};
use metaplectic::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "metaplectic", version, about = "Symplectic matrices and metaplectic operators")]
struct Cli {
    /// Relative tolerance for the symplectic relations.
    #[arg(long, global = true, env = "METAPLECTIC_TOL", default_value_t = DEFAULT_SYMPLECTIC_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct GridArgs {
    /// Samples per axis.
    #[arg(long)]
    n: Option<usize>,
    /// Half-width of the grid; defaults to the self-dual value sqrt(n)/2.
    #[arg(long)]
    extent: Option<f64>,
}

impl GridArgs {
    fn grid(&self, dim: usize, default_n: usize) -> Result<Grid, Error> {
        let n = self.n.unwrap_or(default_n);
        match self.extent {
            Some(t) => Grid::new(dim, n, t),
            None => Grid::self_dual(dim, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Distribution {
    Wigner,
    Stft,
    Rihacek,
    Metaplectic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProbeKind {
    Beckner,
    QuasiIsometry,
    Unbounded,
    NormEquiv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symplectic, free and shift-invertibility verdicts.
    Check { matrix: PathBuf },
    /// Dopico-Johnson factorization.
    Factorize {
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// L^p boundedness case and closed-form norm.
    Classify {
        matrix: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Apply the metaplectic operator to a grid function.
    Apply {
        matrix: PathBuf,
        /// Input grid function; a standard Gaussian when omitted.
        input: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time-frequency distribution of one or two grid functions.
    Wigner {
        f: PathBuf,
        g: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Distribution::Wigner)]
        kind: Distribution,
        /// 4d x 4d matrix for the metaplectic distribution.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Output path; `.csv` writes |W| per grid point.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the quantization of a symbol and apply it.
    Quantize {
        matrix: PathBuf,
        symbol: PathBuf,
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norm-ratio experiment; writes a CSV table.
    Probe {
        #[arg(value_enum)]
        kind: ProbeKind,
        /// Matrix file; a random matrix of the required class when omitted.
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluate on a grid of this size instead of exactly.
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shift-invertible approximations A_tau of a matrix over decreasing tau.
    Demo {
        matrix: Option<PathBuf>,
        /// Largest tau; the table uses tau, tau/10, tau/100, tau/1000.
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
    Ambiguous(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_matrix_file(path: &Path) -> Result<MatrixFile, Failure> {
    io::parse_matrix(&read(path)?).map_err(|e| Failure::Lib(annotate(path, e)))
}

fn load_matrix(path: &Path, tol: f64) -> Result<SymplecticMatrix, Failure> {
    Ok(load_matrix_file(path)?.symplectic(tol)?)
}

fn load_grid_function(path: &Path) -> Result<GridFunction, Failure> {
    io::parse_grid_function(&read(path)?).map_err(|e| Failure::Lib(annotate(path, e)))
}

fn annotate(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    match out {
        Some(path) => {
            write(path, text)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text.to_string()),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn check(path: &Path, tol: f64) -> Outcome {
    let file = load_matrix_file(path)?;
    let residual = symplectic_residual(&file.entries)?;
    let mut out = String::new();
    let s = match file.symplectic(tol) {
        Ok(s) => s,
        Err(e) => {
            return Err(Failure::Lib(Error::Validation(format!("symplectic: no (residual {residual:.3e}); {e}"))));
        }
    };
    out.push_str(&format!("symplectic: yes (residual {residual:.3e})\n"));
    let v = classify_lp(&s);
    let free = match v.case {
        BoundednessCase::Free => "yes",
        BoundednessCase::Ambiguous => "ambiguous",
        _ => "no",
    };
    out.push_str(&format!("free: {free} (sigma_min(B)/sigma_max(S) = {:.3e})\n", v.b_sigma_min_rel));
    if s.dim() % 2 == 0 {
        let r = shift_invertible(&s, INVERTIBILITY_RTOL)?;
        out.push_str(&format!("shift-invertible: {} (det E = {:.6e})\n", yes_no(r.invertible), r.det_e));
    } else {
        out.push_str("shift-invertible: n/a (odd d)\n");
    }
    if v.case == BoundednessCase::Ambiguous {
        return Err(Failure::Ambiguous(out));
    }
    Ok(out)
}

fn factorize(path: &Path, tol: f64, out: &Option<PathBuf>) -> Outcome {
    let file = load_matrix_file(path)?;
    let s = file.symplectic(tol)?;
    let f = dj_factorize(&s, INVERTIBILITY_RTOL)?;
    let mut text = FactorizationReport::new(&f, file.label.as_deref()).to_json();
    text.push('\n');
    emit(out, &text)
}

fn classify(path: &Path, tol: f64, p: f64) -> Outcome {
    let s = load_matrix(path, tol)?;
    let v = classify_lp(&s);
    let case = match v.case {
        BoundednessCase::LowerTriangular => "lower-triangular (B = 0)",
        BoundednessCase::Free => "free (B invertible)",
        BoundednessCase::SingularNonzeroB => "singular nonzero B",
        BoundednessCase::Ambiguous => "ambiguous",
    };
    let mut out = format!("case: {case}\n");
    out.push_str(&format!("det A: {:.6e}\ndet B: {:.6e}\n", v.det_a, v.det_b));
    match (v.target_exponent(p), v.norm(p)) {
        (Some(q), Some(norm)) => out.push_str(&format!("norm L^{p} -> L^{q}: {norm:.6}\n")),
        _ if v.case == BoundednessCase::SingularNonzeroB => out.push_str("norm: unbounded for p != 2\n"),
        _ => out.push_str(&format!("norm: not defined at p = {p}\n")),
    }
    if v.case == BoundednessCase::Ambiguous {
        return Err(Failure::Ambiguous(out));
    }
    Ok(out)
}

fn input_or_gaussian(input: &Option<PathBuf>, grid: &GridArgs, dim: usize) -> Result<GridFunction, Failure> {
    match input {
        Some(path) => Ok(load_grid_function(path)?),
        None => Ok(GaussianChirp::standard(dim).sample(&grid.grid(dim, 64)?)?),
    }
}

fn aliasing_note(f: &GridFunction) {
    if f.aliasing_warning() {
        eprintln!("warning: output does not decay at the grid boundary (aliasing)");
    }
}

fn apply(path: &Path, tol: f64, input: &Option<PathBuf>, grid: &GridArgs, out: &Option<PathBuf>) -> Outcome {
    let s = load_matrix(path, tol)?;
    let f = input_or_gaussian(input, grid, s.dim())?;
    let y = apply_metaplectic(&dj_factorize(&s, INVERTIBILITY_RTOL)?, &f)?;
    aliasing_note(&y);
    emit(out, &(io::format_grid_function(&y) + "\n"))
}

fn distribution(
    f: &Path,
    g: &Option<PathBuf>,
    kind: Distribution,
    matrix: &Option<PathBuf>,
    tol: f64,
    out: &Option<PathBuf>,
) -> Outcome {
    let f = load_grid_function(f)?;
    let g = match g {
        Some(path) => load_grid_function(path)?,
        None => f.clone(),
    };
    let w = match kind {
        Distribution::Wigner => wigner(&f, &g)?,
        Distribution::Stft => stft(&g, &f)?,
        Distribution::Rihacek => rihacek(&f, &g)?,
        Distribution::Metaplectic => {
            let path = matrix
                .as_ref()
                .ok_or_else(|| Failure::Lib(Error::Validation("--matrix is required for --kind metaplectic".into())))?;
            wigner_metaplectic(&load_matrix(path, tol)?, &f, &g)?
        }
    };
    aliasing_note(&w);
    let csv = out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "csv"));
    let text = if csv { io::modulus_csv(&w) } else { io::format_grid_function(&w) + "\n" };
    emit(out, &text)
}

fn quantize(path: &Path, symbol: &Path, input: &Option<PathBuf>, tol: f64, out: &Option<PathBuf>) -> Outcome {
    let a = load_matrix(path, tol)?;
    let sym = load_grid_function(symbol)?;
    let op = opa_build(&sym, &a)?;
    let f = match input {
        Some(p) => load_grid_function(p)?,
        None => GaussianChirp::standard(op.grid().dim()).sample(op.grid())?,
    };
    let y = op.apply(&f)?;
    let mut report = format!("rows: {}\n", op.matrix().nrows());
    report.push_str(&format!("adjoint defect: {:.3e}\n", op.adjoint_defect()));
    let t = op.trace();
    report.push_str(&format!("trace: {:.6e} {:+.6e}i\n", t.re, t.im));
    match out {
        Some(p) => {
            write(p, &(io::format_grid_function(&y) + "\n"))?;
            report.push_str(&format!("wrote {}\n", p.display()));
            Ok(report)
        }
        None => Ok(report + &io::format_grid_function(&y) + "\n"),
    }
}

fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}

fn diag_b_example(d: usize) -> Result<SymplecticMatrix, Error> {
    let mut m = Mat::identity(2 * d, 2 * d);
    m[(0, 0)] = 0.0;
    m[(d, d)] = 0.0;
    m[(0, d)] = 1.0;
    m[(d, 0)] = -1.0;
    SymplecticMatrix::new(m)
}

fn default_matrix(kind: ProbeKind, seed: u64) -> Result<SymplecticMatrix, Error> {
    match kind {
        ProbeKind::Beckner => random_free(seed, 1),
        ProbeKind::QuasiIsometry => random_lower_triangular(seed, 1),
        ProbeKind::Unbounded => diag_b_example(2),
        ProbeKind::NormEquiv => Ok(rihacek_matrix(1)),
    }
}

struct ProbeArgs<'a> {
    kind: ProbeKind,
    matrix: &'a Option<PathBuf>,
    p: f64,
    q: f64,
    seed: u64,
    grid: &'a GridArgs,
    out: &'a Option<PathBuf>,
}

fn probe(args: ProbeArgs<'_>, tol: f64) -> Outcome {
    let s = match args.matrix {
        Some(path) => load_matrix(path, tol)?,
        None => default_matrix(args.kind, args.seed)?,
    };
    let grid_dim = match args.kind {
        ProbeKind::NormEquiv => s.dim() / 2,
        _ => s.dim(),
    };
    let ev = match args.grid.n {
        Some(_) => Evaluator::Grid(args.grid.grid(grid_dim, 64)?),
        None => Evaluator::Exact,
    };
    let scales = [0.7, 0.9, 1.1, 1.4];
    let lambdas = match ev {
        Evaluator::Exact => geometric(1.0, 100.0, 6),
        Evaluator::Grid(_) => geometric(1.0, 3.0, 6),
    };
    let report: ProbeReport = match args.kind {
        ProbeKind::Beckner => probes::beckner_probe(&s, args.p, &scales, ev)?,
        ProbeKind::QuasiIsometry => probes::quasi_isometry_probe(&s, args.p, &scales, ev)?,
        ProbeKind::Unbounded => probes::unbounded_probe(&s, args.p, args.q, &lambdas, ev)?,
        ProbeKind::NormEquiv => probes::norm_equiv_probe(&s, args.p, &lambdas, ev)?,
    };
    let mut text = io::probe_summary(&report);
    if let Some(path) = args.out {
        write(path, &io::probe_table(&report))?;
        text.push_str(&format!("table: {}\n", path.display()));
    }
    if report.verdict == Verdict::Inconclusive {
        return Err(Failure::Ambiguous(text));
    }
    Ok(text)
}

fn demo(matrix: &Option<PathBuf>, tau: f64, tol: f64, out: &Option<PathBuf>) -> Outcome {
    let a = match matrix {
        Some(path) => load_matrix(path, tol)?,
        None => rihacek_matrix(1),
    };
    let taus: Vec<f64> = (0..4).map(|k| tau / 10f64.powi(k)).collect();
    let rows = probes::density_table(&a, &taus)?;
    let report = probes::density_report(&rows)?;
    let mut text = String::from("        tau   |Xi_tau - I|  Xi free  A_tau shift-inv    residual\n");
    for r in &rows {
        text.push_str(&format!(
            "{:>11.1e}  {:>12.6e}  {:>7}  {:>15}  {:>10.3e}\n",
            r.tau,
            r.xi_distance,
            yes_no(r.xi_free),
            yes_no(r.a_tau_shift_invertible),
            r.residual
        ));
    }
    text.push_str(&format!("verdict: {}\n", report.verdict));
    if let Some(path) = out {
        write(path, &io::density_csv(&rows))?;
        text.push_str(&format!("table: {}\n", path.display()));
    }
    if report.verdict == Verdict::Inconclusive {
        return Err(Failure::Ambiguous(text));
    }
    Ok(text)
}

fn run(cli: &Cli) -> Outcome {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Failure::Lib(Error::Validation(format!("tolerance must be positive, got {}", cli.tol))));
    }
    let tol = cli.tol;
    match &cli.command {
        Command::Check { matrix } => check(matrix, tol),
        Command::Factorize { matrix, out } => factorize(matrix, tol, out),
        Command::Classify { matrix, p } => classify(matrix, tol, *p),
        Command::Apply { matrix, input, grid, out } => apply(matrix, tol, input, grid, out),
        Command::Wigner { f, g, kind, matrix, out } => distribution(f, g, *kind, matrix, tol, out),
        Command::Quantize { matrix, symbol, input, out } => quantize(matrix, symbol, input, tol, out),
        Command::Probe { kind, matrix, p, q, seed, grid, out } => {
            probe(ProbeArgs { kind: *kind, matrix, p: *p, q: *q, seed: *seed, grid, out }, tol)
        }
        Command::Demo { matrix, tau, out } => demo(matrix, *tau, tol, out),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Validation(_)
        | Error::Dimension(_)
        | Error::Precondition(_)
        | Error::GridMismatch(_)
        | Error::TooLarge(_) => EXIT_VALIDATION,
        Error::Factorization(_) | Error::Domain(_) => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Ambiguous(text)) => {
            print!("{text}");
            eprintln!("ambiguous: result lies inside the tolerance band");
            ExitCode::from(EXIT_AMBIGUOUS)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
