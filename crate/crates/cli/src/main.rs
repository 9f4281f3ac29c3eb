use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fredent_core::bipartite::{fen_pure, gramian_function, log_gramian, PureBipartiteState};
use fredent_core::claims::{self, outcome_matches, ExpectedStatus, REGISTRY};
use fredent_core::entropy::{fen, fen_truncated};
use fredent_core::fredholm::{
    det_direct, det_grothendieck, det_plemelj, det_spectral, DeterminantResult, Route, PLEMELJ_DEFAULT_ORDER,
};
use fredent_core::io::{MatrixFile, MatrixKind};
use fredent_core::linalg::c;
use fredent_core::majorization::{additive_majorizes, multiplicative_majorizes, state_m_majorizes, OrderedSequence};
use fredent_core::{ComplexMatrix, DensityMatrix, Error, TraceClassOperator};
use fredent::experiments::{self, Experiment};
use fredent::output::{sci, sci_list, write_atomic};
use num_complex::Complex64;
use serde_json::json;

/// Relative disagreement between determinant routes that aborts `det`.
const ROUTE_AGREEMENT_TOL: f64 = 1e-8;
const SPECTRUM_HEAD: usize = 8;

#[derive(Parser)]
#[command(name = "fredent", version, about = "Fredholm determinants, renormalized entropies and claim checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// FEN± of a density matrix
    Fen {
        #[arg(long)]
        input: PathBuf,
        /// Keep only the largest N eigenvalues and report the tail bound
        #[arg(long)]
        keep: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// det(I + zA) by one route, cross-checked against another
    Det {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "1,0", value_parser = parse_complex)]
        z: Complex64,
        #[arg(long, value_enum, default_value_t = RouteArg::Spectral)]
        route: RouteArg,
        /// Truncation order for the grothendieck and plemelj routes
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schmidt coefficients and gramian data of a pure bipartite state
    Schmidt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Does the second input majorize the first? Exit 1 when not.
    Majorize {
        /// Two files: first the candidate minor, then the majorant
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Additive)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a registered claim and compare with its expected status
    Verify {
        /// Claim id; see --list
        claim: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, env = "FREDENT_SEED", default_value_t = 0)]
        seed: u64,
        /// Largest matrix dimension (local dimension for bipartite claims)
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scalar sweeps as CSV
    Experiment {
        /// fen-uniform-limit, gramian-dim-sweep or plemelj-convergence
        name: String,
        /// Largest n (or d) for the uniform sweeps
        #[arg(long, default_value_t = 1_000_000)]
        max_n: u64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        /// Operator for plemelj-convergence (default diag(0.5, 0.3, 0.2))
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "1,0", value_parser = parse_complex)]
        z: Complex64,
        /// Largest truncation order for plemelj-convergence
        #[arg(long, default_value_t = 60)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Spectral,
    Grothendieck,
    Plemelj,
    Direct,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Route {
        match r {
            RouteArg::Spectral => Route::Spectral,
            RouteArg::Grothendieck => Route::Grothendieck,
            RouteArg::Plemelj => Route::Plemelj,
            RouteArg::Direct => Route::Direct,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Additive,
    Multiplicative,
    State,
}

enum Failure {
    /// Bad arguments, unreadable files or failed validation.
    Usage(String),
    /// Two determinant routes disagree.
    Disagreement(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let name = format!("{e:?}");
        let name = name.split(['(', ' ', '{']).next().unwrap_or_default().to_string();
        Failure::Usage(format!("{name}: {e}"))
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("invalid number '{p}': {e}"));
    let z = match parts.as_slice() {
        [re] => c(num(re)?, 0.0),
        [re, im] => c(num(re)?, num(im)?),
        _ => return Err(format!("expected RE,IM but got '{s}'")),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite value '{s}'"));
    }
    Ok(z)
}

fn read_file(path: &Path) -> Result<MatrixFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("MalformedInput: {}: {e}", path.display())))
}

fn read_density(path: &Path) -> Result<DensityMatrix, Failure> {
    let f = read_file(path)?;
    if f.kind != MatrixKind::Density {
        return Err(Failure::Usage(format!("{}: expected kind \"density\"", path.display())));
    }
    Ok(DensityMatrix::new(f.to_matrix()?)?)
}

fn read_pure_bipartite(path: &Path) -> Result<PureBipartiteState, Failure> {
    let f = read_file(path)?;
    if f.kind != MatrixKind::PureBipartite {
        return Err(Failure::Usage(format!("{}: expected kind \"pure_bipartite\"", path.display())));
    }
    let [da, db] = f
        .dims
        .ok_or_else(|| Failure::Usage(format!("{}: pure_bipartite needs \"dims\": [dA, dB]", path.display())))?;
    let m = f.to_matrix()?;
    let state = if m.shape() == (da, db) {
        PureBipartiteState::new(m)?
    } else if m.nrows() == 1 || m.ncols() == 1 {
        let v: Vec<Complex64> = m.iter().copied().collect();
        PureBipartiteState::from_vector(&v, da, db)?
    } else {
        return Err(Error::DimFactorizationMismatch { dim: m.nrows() * m.ncols(), da, db }.into());
    };
    Ok(state)
}

/// Real non-negative sequence: the spectrum of a density file, or the
/// entries of a single-row or single-column matrix file.
fn read_sequence(path: &Path) -> Result<OrderedSequence, Failure> {
    let f = read_file(path)?;
    if f.kind == MatrixKind::Density {
        return Ok(OrderedSequence::from_spectrum(DensityMatrix::new(f.to_matrix()?)?.spectrum()));
    }
    if f.dim_rows != 1 && f.dim_cols != 1 {
        return Err(Failure::Usage(format!("{}: a sequence must be a single row or column", path.display())));
    }
    if f.entries.iter().any(|e| e[1] != 0.0) {
        return Err(Error::InvalidSequence("entries must be real".into()).into());
    }
    Ok(OrderedSequence::new(f.entries.iter().map(|e| e[0]).collect())?)
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<(), Failure> {
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(value).expect("json serialises") + "\n";
        write_atomic(path, &text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_fen(input: &Path, keep: Option<usize>, out: Option<&Path>) -> CmdResult {
    let q = read_density(input)?;
    let value = match keep {
        Some(k) => fen_truncated(q.spectrum(), k)?,
        None => fen(&q),
    };
    let head: Vec<f64> = q.spectrum().iter().take(SPECTRUM_HEAD).collect();
    println!("plus       {}", sci(value.plus));
    println!("minus      {}", sci(value.minus));
    println!("tail_bound {}", sci(value.tail_bound));
    println!("spectrum   {}", sci_list(&head));
    emit_json(out, &json!({ "plus": value.plus, "minus": value.minus, "tail_bound": value.tail_bound, "spectrum_head": head }))?;
    Ok(ExitCode::SUCCESS)
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn run_route(route: Route, m: &ComplexMatrix, op: Option<&TraceClassOperator>, z: Complex64, order: Option<usize>) -> Result<DeterminantResult, Failure> {
    let need_psd = || {
        op.ok_or_else(|| Failure::Usage(format!("route {route:?} needs a Hermitian PSD input")))
    };
    Ok(match route {
        Route::Direct => det_direct(m, z)?,
        Route::Spectral => det_spectral(need_psd()?, z),
        Route::Grothendieck => {
            let a = need_psd()?;
            det_grothendieck(a, z, order.unwrap_or(a.dim()))
        }
        Route::Plemelj => det_plemelj(need_psd()?, z, order.unwrap_or(PLEMELJ_DEFAULT_ORDER))?,
    })
}

fn cmd_det(input: &Path, z: Complex64, route: Route, order: Option<usize>, out: Option<&Path>) -> CmdResult {
    let f = read_file(input)?;
    let m = f.to_matrix()?;
    let op = match f.kind {
        MatrixKind::Density => Some(DensityMatrix::new(m.clone())?.into_operator()),
        MatrixKind::Matrix if route == Route::Direct => TraceClassOperator::new(m.clone()).ok(),
        MatrixKind::Matrix => Some(TraceClassOperator::new(m.clone())?),
        MatrixKind::PureBipartite => {
            return Err(Failure::Usage("det expects kind \"matrix\" or \"density\"".into()));
        }
    };
    let result = run_route(route, &m, op.as_ref(), z, order)?;
    // cross-check: PSD routes against LU, LU against the spectrum when available
    let reference = match (route, op.as_ref()) {
        (Route::Direct, Some(a)) => Some(det_spectral(a, z)),
        (Route::Direct, None) => None,
        _ => Some(det_direct(&m, z)?),
    };
    println!("value      {} {}", sci(result.value.re), sci(result.value.im));
    println!("route      {}", serde_json::to_value(result.route).expect("route").as_str().unwrap_or_default());
    if let Some(n) = result.truncation_order {
        println!("order      {n}");
    }
    println!("bound      {}", sci(result.bound));
    emit_json(out, &serde_json::to_value(&result).expect("result serialises"))?;
    if let Some(r) = reference {
        let gap = relative_gap(result.value, r.value);
        if gap > ROUTE_AGREEMENT_TOL {
            return Err(Failure::Disagreement(format!(
                "route disagreement: {:?} gives {} {}, {:?} gives {} {} (relative gap {})",
                result.route,
                sci(result.value.re),
                sci(result.value.im),
                r.route,
                sci(r.value.re),
                sci(r.value.im),
                sci(gap)
            )));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_schmidt(input: &Path, out: Option<&Path>) -> CmdResult {
    let psi = read_pure_bipartite(input)?;
    let tau = psi.schmidt().values().to_vec();
    let sum_sq: f64 = tau.iter().map(|t| t * t).sum();
    let g = gramian_function(&psi, c(1.0, 0.0)).re;
    let lg = log_gramian(&psi);
    let f = fen_pure(&psi);
    println!("tau        {}", sci_list(&tau));
    println!("sum_tau_sq {}", sci(sum_sq));
    println!("gramian    {}", sci(g));
    println!("log_gram   {}", sci(lg));
    println!("fen        {}", sci(f));
    let (da, db) = psi.dims();
    emit_json(
        out,
        &json!({ "dims": [da, db], "tau": tau, "sum_tau_sq": sum_sq, "gramian": g, "log_gramian": lg, "fen": f }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_majorize(inputs: &[PathBuf], mode: Mode, out: Option<&Path>) -> CmdResult {
    let [a, b] = inputs else {
        return Err(Failure::Usage(format!("majorize takes --input exactly twice (got {})", inputs.len())));
    };
    let verdict = match mode {
        Mode::Additive => additive_majorizes(&read_sequence(a)?, &read_sequence(b)?),
        Mode::Multiplicative => multiplicative_majorizes(&read_sequence(a)?, &read_sequence(b)?),
        Mode::State => state_m_majorizes(&read_density(a)?, &read_density(b)?),
    };
    println!("holds      {}", verdict.holds);
    match verdict.first_violation {
        Some(k) => println!("violation  {k}"),
        None => println!("violation  none"),
    }
    println!("margins    {}", sci_list(&verdict.margins));
    emit_json(out, &serde_json::to_value(&verdict).expect("verdict serialises"))?;
    Ok(if verdict.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_verify(claim: Option<&str>, list: bool, trials: u64, seed: u64, dim: usize, out: Option<&Path>) -> CmdResult {
    if list {
        for spec in REGISTRY {
            let status = match spec.expected {
                ExpectedStatus::Holds => "holds",
                ExpectedStatus::DocumentedCounterexample => "documented-counterexample",
            };
            println!("{:<26} {:<26} {}", spec.id, status, spec.summary);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let id = claim.ok_or_else(|| Failure::Usage("verify needs a claim id (see --list)".into()))?;
    let spec = claims::lookup(id)?;
    let report = claims::run_claim(id, trials, seed, dim)?;
    let text = report.to_json() + "\n";
    match out {
        Some(path) => {
            write_atomic(path, &text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    let replay_ok = match claims::replay(&report)? {
        Some(m) => Some(m) == report.witness_margin(),
        None => true,
    };
    let matches = outcome_matches(spec, &report);
    let expected = match spec.expected {
        ExpectedStatus::Holds => "holds",
        ExpectedStatus::DocumentedCounterexample => "documented-counterexample",
    };
    eprintln!(
        "{}: {} violations in {} trials; expected {}; {}",
        spec.id,
        report.violations,
        report.trials,
        expected,
        if matches && replay_ok { "as expected" } else { "UNEXPECTED" }
    );
    if !replay_ok {
        eprintln!("witness replay did not reproduce the recorded margin");
    }
    Ok(if matches && replay_ok { ExitCode::SUCCESS } else { ExitCode::from(4) })
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    name: &str,
    max_n: u64,
    points: usize,
    input: Option<&Path>,
    z: Complex64,
    order: usize,
    out: Option<&Path>,
) -> CmdResult {
    let experiment: Experiment = name.parse().map_err(Failure::Usage)?;
    let rows = match experiment {
        Experiment::FenUniformLimit => experiments::fen_uniform_limit(max_n, points),
        Experiment::GramianDimSweep => experiments::gramian_dim_sweep(max_n, points),
        Experiment::PlemeljConvergence => {
            let a = match input {
                Some(p) => {
                    let f = read_file(p)?;
                    TraceClassOperator::new(f.to_matrix()?)?
                }
                None => TraceClassOperator::from_diagonal(&[0.5, 0.3, 0.2])?,
            };
            experiments::plemelj_convergence(&a, z, order)?
        }
    };
    let csv = experiments::to_csv(&rows);
    match out {
        Some(path) => write_atomic(path, &csv).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Fen { input, keep, out } => cmd_fen(&input, keep, out.as_deref()),
        Command::Det { input, z, route, order, out } => cmd_det(&input, z, route.into(), order, out.as_deref()),
        Command::Schmidt { input, out } => cmd_schmidt(&input, out.as_deref()),
        Command::Majorize { input, mode, out } => cmd_majorize(&input, mode, out.as_deref()),
        Command::Verify { claim, list, trials, seed, dim, out } => {
            cmd_verify(claim.as_deref(), list, trials, seed, dim, out.as_deref())
        }
        Command::Experiment { name, max_n, points, input, z, order, out } => {
            cmd_experiment(&name, max_n, points, input.as_deref(), z, order, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Disagreement(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
