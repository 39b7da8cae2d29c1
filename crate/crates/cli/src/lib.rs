//! Command-line front end for phase-space quantum mechanics.
//!
//! [`run`] parses arguments and writes results to any writer; the `psqm` binary
//! wraps it. Exit codes: 0 success, 1 a check failed, 2 bad usage or malformed input,
//! 3 a computation or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use psqm_core::io::{parse_slice_spec, read_field, slice_csv, write_field};
use psqm_core::oscillators::{ho3d_state, nc_state, nc_wigner, radial_eigensolve, DEFAULT_GRID_N};
use psqm_core::parse::{parse_rational, parse_symbol};
use psqm_core::star_grid::star_series;
use psqm_core::weyl::{boost_checks, casimir_check, galilei_generators, verify_galilei_algebra};
use psqm_core::wigner::evolve;
use psqm_core::{Field, NcParams, PhaseGrid, PsqmError, Rational, Scalar};

#[derive(Parser)]
#[command(
    name = "psqm",
    version,
    about = "Phase-space quantum mechanics with star products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Galilei algebra checks.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Three-dimensional isotropic oscillator.
    #[command(subcommand)]
    Ho3d(Ho3dCmd),
    /// Noncommutative two-dimensional oscillator.
    #[command(subcommand)]
    Nc(NcCmd),
    /// Star products of field files.
    #[command(subcommand)]
    Star(StarCmd),
    /// Integrate i ħ ∂ψ/∂t = H⋆ψ with RK4.
    Evolve(EvolveArgs),
    /// Export field files.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Check all commutators of the ten generators, the boosts and the Casimirs.
    Verify {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        m: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        hbar: String,
        /// Boost velocity as three comma-separated rationals.
        #[arg(long, default_value = "1,2,3", allow_hyphen_values = true)]
        velocity: String,
    },
}

#[derive(Subcommand)]
enum Ho3dCmd {
    /// Build Ψ_n and check H⋆Ψ_n = (n + 3/2)Ψ_n exactly.
    Solve {
        #[arg(long)]
        n: u32,
        /// Write the full result as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Radial eigenvalues below an energy cutoff.
    Spectrum {
        #[arg(long)]
        emax: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_N)]
        grid_n: usize,
    },
}

#[derive(Subcommand)]
enum NcCmd {
    /// Build ψ_{nx,ny} by ladder operators and check the star-eigenvalue equation.
    State {
        #[arg(long)]
        nx: u32,
        #[arg(long)]
        ny: u32,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sample the Wigner function on a 4D grid and write CSV slices beside it.
    Wigner {
        #[arg(long)]
        nx: u32,
        #[arg(long)]
        ny: u32,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        out: PathBuf,
        /// Nodes per axis, a power of two.
        #[arg(long, default_value_t = 32)]
        grid_n: usize,
        /// Every axis spans [−L, L].
        #[arg(long, default_value_t = 6.0)]
        half_width: f64,
    },
}

#[derive(Subcommand)]
enum StarCmd {
    /// Truncated star series of two fields on the same grid.
    Mul {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    state: PathBuf,
    /// Polynomial symbol, e.g. `(q^2 + p^2)/2`.
    #[arg(long, allow_hyphen_values = true)]
    hamiltonian: String,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ExportCmd {
    /// A 2D slice as CSV; all other axes fixed with AXIS=VALUE pairs.
    Csv {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        slice: String,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Check(String),
    Usage(String),
    Run(String),
}

impl From<PsqmError> for Failure {
    fn from(e: PsqmError) -> Self {
        match e {
            PsqmError::Parse { .. }
            | PsqmError::InvalidParameter(_)
            | PsqmError::AxisOutOfRange { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Runs one command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    let result = match cli.command {
        Command::Algebra(AlgebraCmd::Verify {
            m,
            t,
            hbar,
            velocity,
        }) => algebra_verify(out, &m, &t, &hbar, &velocity),
        Command::Ho3d(Ho3dCmd::Solve { n, json }) => ho3d_solve(out, n, json.as_deref()),
        Command::Ho3d(Ho3dCmd::Spectrum { emax, grid_n }) => ho3d_spectrum(out, emax, grid_n),
        Command::Nc(NcCmd::State {
            nx,
            ny,
            theta,
            json,
        }) => nc_state_cmd(out, nx, ny, theta, json.as_deref()),
        Command::Nc(NcCmd::Wigner {
            nx,
            ny,
            theta,
            out: path,
            grid_n,
            half_width,
        }) => nc_wigner_cmd(out, nx, ny, theta, &path, grid_n, half_width),
        Command::Star(StarCmd::Mul {
            left,
            right,
            order,
            theta,
            out: path,
        }) => star_mul(out, &left, &right, order, theta, &path),
        Command::Evolve(a) => evolve_cmd(out, &a),
        Command::Export(ExportCmd::Csv {
            input,
            slice,
            out: path,
        }) => export_csv(out, &input, &slice, &path),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            3
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn algebra_verify(out: &mut dyn Write, m: &str, t: &str, hbar: &str, velocity: &str) -> Outcome {
    let start = Instant::now();
    let g = galilei_generators(
        parse_rational(m)?,
        parse_rational(t)?,
        parse_rational(hbar)?,
    )?;
    let v: Vec<Rational> = velocity
        .split(',')
        .map(parse_rational)
        .collect::<Result<_, _>>()?;
    let v: [Rational; 3] = v
        .try_into()
        .map_err(|_| Failure::Usage("--velocity needs exactly three components".into()))?;

    let report = verify_galilei_algebra(&g);
    for e in &report.entries {
        writeln!(
            out,
            "{} [{}, {}] = {}",
            pass(e.pass),
            e.left,
            e.right,
            e.computed
        )?;
        if !e.pass {
            writeln!(out, "    expected {}", e.expected)?;
        }
    }
    let boosts = boost_checks(&g, &v);
    for b in &boosts {
        writeln!(
            out,
            "boost {}: {} -> {} ({})",
            b.name,
            b.name,
            b.got,
            if b.pass { "ok" } else { "wrong" }
        )?;
    }
    let cas = casimir_check(&g);
    writeln!(
        out,
        "casimir I1 = {} ({})",
        cas.i1,
        if cas.i1.is_zero() { "ok" } else { "nonzero" }
    )?;
    for (i, w) in cas.i2.iter().enumerate() {
        writeln!(
            out,
            "casimir I2[{}] = {} ({})",
            i + 1,
            w,
            if w.is_zero() { "ok" } else { "nonzero" }
        )?;
    }
    let n_ok = report.entries.iter().filter(|e| e.pass).count();
    let b_ok = boosts.iter().filter(|b| b.pass).count();
    writeln!(
        out,
        "{n_ok}/{} commutators, {b_ok}/{} boosts, casimirs {} in {:.3} s",
        report.entries.len(),
        boosts.len(),
        if cas.pass() {
            "vanish"
        } else {
            "do not vanish"
        },
        start.elapsed().as_secs_f64()
    )?;
    if report.all_pass() && b_ok == boosts.len() && cas.pass() {
        Ok(())
    } else {
        Err(Failure::Check("Galilei algebra".into()))
    }
}

fn write_json(path: &Path, v: &serde_json::Value) -> Outcome {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Run(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn ho3d_solve(out: &mut dyn Write, n: u32, json: Option<&Path>) -> Outcome {
    let r = ho3d_state(n)?;
    writeln!(out, "n = {n}")?;
    writeln!(out, "energy {}", r.energy)?;
    if let Some(e) = &r.exact_energy {
        writeln!(out, "exact energy {}", e.fmt_coeff())?;
    }
    writeln!(out, "residual {:e}", r.residual)?;
    writeln!(out, "eigenstate {}", pass(r.is_eigen))?;
    if let Some(p) = json {
        write_json(p, &r.to_json())?;
    }
    if r.is_eigen {
        Ok(())
    } else {
        Err(Failure::Check(format!("Ψ_{n} is not a star-eigenstate")))
    }
}

/// `x` rounded to six decimals with trailing zeros dropped.
fn short(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn ho3d_spectrum(out: &mut dyn Write, emax: f64, grid_n: usize) -> Outcome {
    let s = radial_eigensolve(emax, grid_n)?;
    writeln!(
        out,
        "{}",
        s.energies
            .iter()
            .map(|&e| short(e))
            .collect::<Vec<_>>()
            .join(" ")
    )?;
    writeln!(
        out,
        "# grid_n = {}, r_max = {}, drift = {:e}",
        s.grid_n, s.r_max, s.drift
    )?;
    writeln!(out, "# n  energy  raw  n+3/2 error")?;
    for (k, (e, raw)) in s.energies.iter().zip(&s.raw).enumerate() {
        let exact = k as f64 + 1.5;
        writeln!(out, "{k} {e:.10} {raw:.10} {:e}", (e - exact).abs())?;
    }
    Ok(())
}

fn nc_state_cmd(out: &mut dyn Write, nx: u32, ny: u32, theta: f64, json: Option<&Path>) -> Outcome {
    let r = nc_state(nx, ny, theta)?;
    writeln!(out, "nx = {nx}, ny = {ny}, theta = {theta}")?;
    writeln!(out, "energy {:.9}", r.energy)?;
    if let Some(e) = &r.exact_energy {
        writeln!(out, "exact energy {}", e.fmt_coeff())?;
    }
    writeln!(out, "residual {:e}", r.residual)?;
    writeln!(out, "eigenstate {}", pass(r.is_eigen))?;
    if let Some(p) = json {
        write_json(p, &r.to_json())?;
    }
    if r.is_eigen {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "ψ_{nx}{ny} is not a star-eigenstate"
        )))
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("field");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn nc_wigner_cmd(
    out: &mut dyn Write,
    nx: u32,
    ny: u32,
    theta: f64,
    path: &Path,
    grid_n: usize,
    half_width: f64,
) -> Outcome {
    let w = nc_wigner(nx, ny, theta)?;
    let grid = Arc::new(PhaseGrid::uniform(2, half_width, grid_n, 1.0, theta)?);
    let field = w.sample(grid.clone())?;
    write_field(path, &field)?;
    writeln!(out, "wrote {}", path.display())?;
    // nodes sit at half-integers, so the slice snaps to the two nodes nearest 0
    for (free, fixed) in [("x_px", "y=0,py=0"), ("x_y", "px=0,py=0")] {
        let csv = with_suffix(path, free);
        std::fs::write(&csv, slice_csv(&field, &parse_slice_spec(&grid, fixed)?)?)?;
        writeln!(out, "wrote {}", csv.display())?;
    }
    let min = field
        .values()
        .iter()
        .map(|v| v.re)
        .fold(f64::INFINITY, f64::min);
    writeln!(out, "integral {:.12}", field.integrate().re)?;
    writeln!(out, "min {min:e}")?;
    Ok(())
}

fn star_mul(
    out: &mut dyn Write,
    left: &Path,
    right: &Path,
    order: usize,
    theta: f64,
    path: &Path,
) -> Outcome {
    let f = read_field(left)?;
    let g = read_field(right)?;
    let grid = f.grid();
    if theta != grid.theta() {
        log::info!(
            "using theta = {theta} instead of the file's {}",
            grid.theta()
        );
    }
    let out_grid = Arc::new(PhaseGrid::new(
        grid.dim(),
        grid.axes().to_vec(),
        grid.hbar(),
        theta,
    )?);
    let nc = NcParams::new(Complex64::new(grid.hbar(), 0.0), Complex64::new(theta, 0.0))?;
    let r = star_series(&f, &g, order, &nc)?;
    let result = Field::from_values(out_grid, r.field.into_values())?;
    write_field(path, &result)?;
    writeln!(
        out,
        "order {}, terms {}, relative last {:e}, converged {}",
        r.order, r.terms, r.relative_last, r.converged
    )?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn evolve_cmd(out: &mut dyn Write, a: &EvolveArgs) -> Outcome {
    let psi = read_field(&a.state)?;
    let h = parse_symbol(&a.hamiltonian, Some(psi.grid().dim()))?.to_complex64();
    let nc = psi.grid().nc_params()?;
    let ev = evolve(&psi, &h, a.t, a.dt, &nc)?;
    write_field(&a.out, &ev.field)?;
    writeln!(out, "steps {}, dt {}", ev.steps, ev.dt)?;
    writeln!(out, "norm drift {:e}", ev.norm_drift)?;
    writeln!(
        out,
        "spectral radius {:.6}, stable {}",
        ev.spectral_radius, ev.stable
    )?;
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(())
}

fn export_csv(out: &mut dyn Write, input: &Path, slice: &str, path: &Path) -> Outcome {
    let f = read_field(input)?;
    let fixed = parse_slice_spec(f.grid(), slice)?;
    std::fs::write(path, slice_csv(&f, &fixed)?)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}
