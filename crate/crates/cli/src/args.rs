use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracstab::{BranchPolicy, Complex64, Window};
use nalgebra::{DMatrix, DVector};

#[derive(Parser, Debug)]
#[command(
    name = "fracstab",
    version,
    about = "Stability domains of fractional difference systems and fractional Mandelbrot sets"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Not every subcommand reads every flag.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Fractional order, in (0, 1].
    #[arg(long, global = true, default_value = "0.85", value_parser = parse_order)]
    pub q: f64,

    /// Branch for powers of negative bases.
    #[arg(long, global = true, default_value = "principal", value_parser = parse_policy)]
    pub policy: BranchPolicy,

    /// Plot window as x0,x1,y0,y1.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_window)]
    pub window: Option<Window>,

    /// Raster size as WxH.
    #[arg(long, global = true, value_parser = parse_size)]
    pub size: Option<Size>,

    /// Iteration budget.
    #[arg(long, global = true, value_parser = parse_count)]
    pub iters: Option<usize>,

    /// Escape radius for fractional orbits.
    #[arg(long, global = true, default_value = "1000", value_parser = parse_positive)]
    pub escape: f64,

    /// Convergence and fixed-point tolerance.
    #[arg(long, global = true, default_value = "1e-3", value_parser = parse_positive)]
    pub tol: f64,

    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Classify a raster of eigenvalues and draw the stability frontier.
    Domain(DomainArgs),
    /// Render the fractional (or classical) Mandelbrot set.
    Mandelbrot(MandelbrotArgs),
    /// Check one eigenvalue against the orbit of its parameter.
    Verify(VerifyArgs),
    /// Step q over a range, writing frames and a coverage table.
    Sweep(SweepArgs),
    /// Simulate a linear system and fit its decay rate.
    Simulate(SimulateArgs),
    /// Estimate the area of the stability domain two ways.
    Area(AreaArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DomainArgs {
    /// Frontier samples written to boundary.csv.
    #[arg(long, default_value_t = 2001, value_parser = parse_samples)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    /// Memory-kernel map of order q.
    Fractional,
    /// z → z² + c with |z| > 2 escape; ignores --q and --escape.
    Classic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Overlay {
    #[value(alias = "gamma_curve", alias = "gamma-curve")]
    Gamma,
    Cardioid,
    None,
}

#[derive(Args, Debug, Clone)]
pub struct MandelbrotArgs {
    #[arg(long, value_enum, default_value = "fractional")]
    pub map: MapKind,
    #[arg(long, value_enum, default_value = "gamma")]
    pub overlay: Overlay,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Eigenvalue as x,y.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub lambda: Complex64,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_order)]
    pub q_start: f64,
    #[arg(long, value_parser = parse_order)]
    pub q_end: f64,
    #[arg(long, default_value_t = 9, value_parser = parse_count)]
    pub steps: usize,
    /// Also write a fractal frame with the Γ(c) overlay per step.
    #[arg(long)]
    pub fractal: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// Square system matrix, rows separated by ';' (at most 4x4).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_matrix)]
    pub matrix: DMatrix<f64>,
    /// Initial state, comma separated; defaults to all ones.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
    pub y0: Option<DVector<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct AreaArgs {
    /// Grid cells per side.
    #[arg(long, default_value_t = 1000, value_parser = parse_count)]
    pub cells: usize,
    /// Frontier samples for the contour integral.
    #[arg(long, default_value_t = 100_000, value_parser = parse_samples)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Size {
    pub width: usize,
    pub height: usize,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_list(s: &str, sep: char) -> Result<Vec<f64>, String> {
    s.split(sep).map(parse_f64).collect()
}

pub fn parse_order(s: &str) -> Result<f64, String> {
    let q = parse_f64(s)?;
    if q > 0.0 && q <= 1.0 {
        Ok(q)
    } else {
        Err(format!("order {q} is outside (0, 1]"))
    }
}

fn parse_policy(s: &str) -> Result<BranchPolicy, String> {
    s.parse().map_err(|e: fracstab::Error| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("'{s}' is not a positive integer")),
    }
}

fn parse_samples(s: &str) -> Result<usize, String> {
    let n = parse_count(s)?;
    if n >= 100 {
        Ok(n)
    } else {
        Err(format!("{n} samples is too few (minimum 100)"))
    }
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    match parse_list(s, ',')?[..] {
        [x0, x1, y0, y1] => Window::new(x0, x1, y0, y1).map_err(|e| e.to_string()),
        _ => Err(format!("window '{s}' needs four values x0,x1,y0,y1")),
    }
}

pub fn parse_size(s: &str) -> Result<Size, String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("size '{s}' is not of the form WxH"))?;
    Ok(Size { width: parse_count(w)?, height: parse_count(h)? })
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    match parse_list(s, ',')?[..] {
        [x, y] => Ok(Complex64::new(x, y)),
        _ => Err(format!("'{s}' needs two values x,y")),
    }
}

pub fn parse_matrix(s: &str) -> Result<DMatrix<f64>, String> {
    let rows: Vec<Vec<f64>> = s.split(';').map(|r| parse_list(r, ',')).collect::<Result<_, _>>()?;
    let d = rows.len();
    if d > 4 {
        return Err(format!("matrix has {d} rows; at most 4 are supported"));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(format!("matrix is not square: a row has {} entries, expected {d}", bad.len()));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn parse_vector(s: &str) -> Result<DVector<f64>, String> {
    Ok(DVector::from_vec(parse_list(s, ',')?))
}
