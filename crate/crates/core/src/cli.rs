//! Command-line front end. Every subcommand writes CSV with a header row
//! (to `--out` or standard output); `spectrum --json` adds a metadata file
//! that embeds the resolved configuration and can be fed back as `--config`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::classical::{self, AffineState, DilatationPotential, IntegrateOptions};
use crate::config::ProblemConfig;
use crate::error::{Error, Result};
use crate::haar;
use crate::liegen::{HalfInt, RotRep};
use crate::peterweyl::{parity_class, PwCoeffs, PwTermRecord};
use crate::reduced::{AffineModel, ModelKind};
use crate::rigidbody::{top_spectrum, TopParams};
use crate::spectra::{bound_state_diagnostic, eigen_lowest, DriftReport, SpectrumResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence(_) | Error::Unstable(_) | Error::NotPositiveDefinite { .. } => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

#[derive(Debug, Parser)]
#[command(name = "gltop", version, about = "Quantized affinely-rigid bodies and rigid tops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Representation checks.
    Rep {
        #[command(subcommand)]
        action: RepAction,
    },
    /// Peter-Weyl coefficient files.
    Pw {
        #[command(subcommand)]
        action: PwAction,
    },
    /// Rigid-top spectrum for all j up to --jmax.
    Top(TopArgs),
    /// Two-polar decomposition of a matrix read from CSV.
    Decompose(DecomposeArgs),
    /// Radial densities on the deformation invariants.
    Measure(MeasureArgs),
    /// Reduced Hamiltonians.
    Reduced {
        #[command(subcommand)]
        action: ReducedAction,
    },
    /// Lowest eigenvalues of a reduced Hamiltonian.
    Spectrum(SpectrumArgs),
    /// Classical trajectory integration.
    Classical(ClassicalArgs),
}

#[derive(Debug, Subcommand)]
enum RepAction {
    /// Hermiticity, commutator and Casimir residuals.
    Check(RepCheckArgs),
}

#[derive(Debug, Args)]
struct RepCheckArgs {
    /// Largest j (n = 3); every j from 0 in half steps is checked.
    #[arg(long, conflicts_with = "weight")]
    jmax: Option<HalfInt>,
    /// Planar weight (n = 2).
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<i64>,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum PwAction {
    /// Prints bosonic, fermionic, mixed or zero.
    Classify { file: PathBuf },
}

#[derive(Debug, Args)]
struct TopArgs {
    #[arg(long = "I1")]
    i1: f64,
    #[arg(long = "I2")]
    i2: f64,
    #[arg(long = "I3")]
    i3: f64,
    #[arg(long)]
    jmax: HalfInt,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, conflicts_with = "bosonic_only")]
    fermionic_only: bool,
    #[arg(long)]
    bosonic_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Square matrix, one comma-separated row per line.
    file: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct MeasureArgs {
    /// Logarithmic invariants: prints the Haar radial weight.
    #[arg(long = "q", value_delimiter = ',', allow_hyphen_values = true)]
    q_log: Option<Vec<f64>>,
    /// Invariants Q: prints the Lebesgue radial weight.
    #[arg(long = "Q", value_delimiter = ',', allow_hyphen_values = true)]
    q_big: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
enum ReducedAction {
    /// Assembles the matrix and writes it in Matrix Market format.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(short = 'k', default_value_t = 10)]
    k: usize,
    /// Box scale factors for the drift diagnostic, e.g. 1,2,4.
    #[arg(long, value_delimiter = ',')]
    scan_box: Option<Vec<f64>>,
    /// Overrides the solver seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    AffAff,
    MetAff,
    AffMet,
    DAlembert,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::AffAff => ModelKind::AffAff,
            ModelArg::MetAff => ModelKind::MetAff,
            ModelArg::AffMet => ModelKind::AffMet,
            ModelArg::DAlembert => ModelKind::DAlembert,
        }
    }
}

#[derive(Debug, Args)]
struct ClassicalArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Initial configuration, CSV rows.
    #[arg(long)]
    phi0: PathBuf,
    /// Initial velocity, CSV rows.
    #[arg(long)]
    phidot0: PathBuf,
    #[arg(long = "t")]
    t_end: f64,
    #[arg(long)]
    dt: f64,
    #[arg(long = "A", default_value_t = 1.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long = "B", default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long = "I", default_value_t = 1.0)]
    i: f64,
    /// Harmonic dilatation potential stiffness.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 1)]
    every: usize,
    #[arg(long, default_value_t = 1e-6)]
    max_drift: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Rep {
            action: RepAction::Check(a),
        } => emit(out, a.out.as_deref(), &rep_check(&a)?),
        Command::Pw {
            action: PwAction::Classify { file },
        } => {
            let text = read(&file)?;
            let recs: Vec<PwTermRecord> =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
            let class = parity_class(&PwCoeffs::from_records(&recs)?);
            emit(out, None, &format!("{class}\n"))
        }
        Command::Top(a) => emit(out, a.out.as_deref(), &top_csv(&a)?),
        Command::Decompose(a) => emit(out, a.out.as_deref(), &decompose_csv(&read_matrix(&a.file)?)?),
        Command::Measure(a) => {
            let w = match (&a.q_log, &a.q_big) {
                (Some(q), _) => haar::p_lambda(q),
                (_, Some(q)) => {
                    if q.iter().any(|x| !(*x > 0.0)) {
                        return Err(Error::InvalidArgument("invariants Q must be positive".into()));
                    }
                    haar::p_l(q)
                }
                _ => unreachable!("clap requires one of --q, --Q"),
            };
            emit(out, None, &format!("{w}\n"))
        }
        Command::Reduced {
            action: ReducedAction::Build { config, out: path },
        } => {
            let h = ProblemConfig::from_path(&config)?.build()?;
            let mut buf = Vec::new();
            h.matrix.write_matrix_market(&mut buf)?;
            std::fs::write(&path, buf).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            emit(
                out,
                None,
                &format!(
                    "dimension,nnz,hermiticity_residual\n{},{},{:e}\n",
                    h.dim(),
                    h.matrix.nnz(),
                    h.matrix.hermiticity_residual()
                ),
            )
        }
        Command::Spectrum(a) => spectrum(&a, out),
        Command::Classical(a) => emit(out, a.out.as_deref(), &classical_csv(&a)?),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Energy formatting for tables: 12 significant digits, trailing zeros
/// dropped, exponent form outside `1e-5 <= |x| < 1e12`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        trim(&format!("{x:.*}", (11 - exp).max(0) as usize))
    } else {
        format!("{}e{exp}", trim(mant))
    }
}

/// Reads a dense matrix: one row per non-empty line, comma-separated.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Config(format!("not a number: {v:?}"))))
                .collect()
        })
        .collect::<Result<_>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Shape("matrix rows must be non-empty and of equal length".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix(&read(path)?)
}

fn rep_check(a: &RepCheckArgs) -> Result<String> {
    let reps: Vec<RotRep<f64>> = match (a.jmax, a.weight) {
        (_, Some(m)) => vec![RotRep::planar(m, a.hbar)],
        (Some(jmax), None) => jmax.up_to().map(|j| RotRep::spin(j, a.hbar)).collect(),
        (None, None) => return Err(Error::InvalidArgument("give --jmax or --weight".into())),
    };
    let mut s = String::from("n,label,dim,hermiticity,commutator,casimir\n");
    for r in reps {
        let res = r.residuals();
        let _ = writeln!(
            s,
            "{},{},{},{:e},{:e},{:e}",
            r.n(),
            r.label(),
            r.dim(),
            res.hermiticity,
            res.commutator,
            res.casimir
        );
    }
    Ok(s)
}

fn top_csv(a: &TopArgs) -> Result<String> {
    let params = TopParams::new(a.i1, a.i2, a.i3, a.hbar)?;
    let mut rows: Vec<(f64, usize, u32)> = Vec::new();
    for j in a.jmax.up_to() {
        if (a.fermionic_only && j.is_integer()) || (a.bosonic_only && !j.is_integer()) {
            continue;
        }
        let spec = top_spectrum(&RotRep::spin(j, a.hbar), &params)?;
        rows.extend(spec.levels.iter().map(|&(e, m)| (e, m, j.twice())));
    }
    rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut s = String::from("twice_j,energy,multiplicity\n");
    for (e, m, tj) in rows {
        let _ = writeln!(s, "{tj},{},{m}", sig12(e));
    }
    Ok(s)
}

fn decompose_csv(phi: &DMatrix<f64>) -> Result<String> {
    let tp = haar::two_polar(phi)?;
    let n = phi.nrows();
    let mut s = String::from("factor,row");
    for c in 0..n {
        let _ = write!(s, ",c{c}");
    }
    s.push('\n');
    let mut put = |name: &str, r: usize, vals: Vec<f64>| {
        let _ = write!(s, "{name},{r}");
        for v in vals {
            let _ = write!(s, ",{v:e}");
        }
        s.push('\n');
    };
    for r in 0..n {
        put("L", r, tp.l.row(r).iter().copied().collect());
    }
    put("Q", 0, tp.q_big.clone());
    for r in 0..n {
        put("R", r, tp.r.row(r).iter().copied().collect());
    }
    Ok(s)
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    config: &'a ProblemConfig,
    k: usize,
    result: &'a SpectrumResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    box_scan: Option<&'a DriftReport>,
}

fn spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = ProblemConfig::from_path(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.solver.seed = seed;
    }
    let h = cfg.build()?;
    let result = eigen_lowest(&h, a.k, &cfg.solver)?;
    let scan = match &a.scan_box {
        Some(scales) => Some(bound_state_diagnostic(&cfg, a.k, scales)?),
        None => None,
    };
    let mut csv = String::from("index,energy,residual,flag\n");
    for (i, (e, r)) in result.eigenvalues.iter().zip(&result.residuals).enumerate() {
        let flag = scan.as_ref().map_or("unscanned", |s| s.rows[i].flag.name());
        let _ = writeln!(csv, "{i},{},{r:.3e},{flag}", sig12(*e));
    }
    emit(out, a.out.as_deref(), &csv)?;
    if let Some(path) = &a.json {
        let doc = SpectrumJson {
            config: &cfg,
            k: a.k,
            result: &result,
            box_scan: scan.as_ref(),
        };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        emit(out, Some(path), &(text + "\n"))?;
    }
    Ok(())
}

fn classical_csv(a: &ClassicalArgs) -> Result<String> {
    let phi = read_matrix(&a.phi0)?;
    let state = AffineState::new(phi.clone(), read_matrix(&a.phidot0)?)?;
    let n = state.n();
    let model = AffineModel {
        kind: a.model.into(),
        n,
        a: a.a,
        b: a.b,
        i: a.i,
        hbar: 1.0,
    };
    if model.kind != ModelKind::AffAff && !(model.i > 0.0) {
        return Err(Error::InvalidModel("I must be positive".into()));
    }
    let pot = match a.kappa {
        Some(kappa) => DilatationPotential::Harmonic { kappa },
        None => DilatationPotential::None,
    };
    let opts = IntegrateOptions {
        dt: a.dt,
        t_end: a.t_end,
        every: a.every,
        max_drift: a.max_drift,
    };
    let tr = classical::integrate(&model, &pot, &state, &opts)?;
    let mut s = String::from("t");
    for r in 1..=n {
        for c in 1..=n {
            let _ = write!(s, ",phi_{r}{c}");
        }
    }
    s.push_str(",kinetic,energy,energy_drift,omega_hat_deviation\n");
    for smp in &tr.samples {
        let _ = write!(s, "{:e}", smp.t);
        for r in 0..n {
            for c in 0..n {
                let _ = write!(s, ",{:e}", smp.state.phi[(r, c)]);
            }
        }
        let kin = classical::kinetic_energy(&model, &smp.state)?;
        let dev = smp.omega_hat_deviation.map_or(String::new(), |d| format!("{d:e}"));
        let _ = writeln!(s, ",{kin:e},{:e},{:e},{dev}", smp.energy, smp.energy_drift);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let argv = std::iter::once("gltop").chain(args.iter().copied());
        let code = run_with(argv, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(1.5), "1.5");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(-1234.5), "-1234.5");
        assert_eq!(sig12(1.25e-7), "1.25e-7");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn top_symmetric_rows() {
        let (code, out, _) = run_capture(&["top", "--I1", "1", "--I2", "1", "--I3", "0.5", "--jmax", "2"]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = out.lines().collect();
        assert_eq!(rows[0], "twice_j,energy,multiplicity");
        assert!(rows.contains(&"2,1,1"));
        assert!(rows.contains(&"2,1.5,2"));
    }

    #[test]
    fn top_parity_filters() {
        let (_, out, _) = run_capture(&["top", "--I1", "1", "--I2", "2", "--I3", "3", "--jmax", "2", "--bosonic-only"]);
        assert!(out.lines().skip(1).all(|l| l.split(',').next().unwrap().parse::<u32>().unwrap() % 2 == 0));
        let (_, out, _) =
            run_capture(&["top", "--I1", "1", "--I2", "2", "--I3", "3", "--jmax", "2", "--fermionic-only"]);
        assert!(out.lines().skip(1).all(|l| l.split(',').next().unwrap().parse::<u32>().unwrap() % 2 == 1));
    }

    #[test]
    fn measure_prints_weights() {
        assert_eq!(run_capture(&["measure", "--Q", "2,1"]).1, "9\n");
        let (code, out, _) = run_capture(&["measure", "--q", "1,0,-1"]);
        assert_eq!(code, 0);
        assert!((out.trim().parse::<f64>().unwrap() - 25.090572839711086).abs() < 1e-9);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["spectrum", "--config", "missing.toml"]).0, 2);
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["top", "--I1", "0", "--I2", "1", "--I3", "1", "--jmax", "1"]).0, 2);
        assert_eq!(run_capture(&["measure", "--Q", "2,-1"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn rep_check_rows() {
        let (code, out, _) = run_capture(&["rep", "check", "--jmax", "3/2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 5);
        let (_, out, _) = run_capture(&["rep", "check", "--weight", "-2"]);
        assert!(out.contains("2,m=-2,1,"));
    }

    #[test]
    fn matrix_parsing() {
        let m = parse_matrix("1, 2\n# c\n3,4\n").unwrap();
        assert_eq!(m, nalgebra::dmatrix![1.0, 2.0; 3.0, 4.0]);
        assert!(parse_matrix("1,2\n3\n").is_err());
        assert!(parse_matrix("a,b\n").is_err());
    }
}
