//! Fractional-order and integer-order Mandelbrot sets, the fixed points of
//! `z ↦ z² + c` and their eigenvalues, the stability curve `Γ(c)`, and the
//! coverage of the set's main body by the fixed-point stability region.
//!
//! For the fractional map the fixed points solve `f_c(z) = 0`, i.e.
//! `z* = ±i√c`, and the eigenvalues of the linearization are
//!
//! ```text
//! ±√(2|c| − 2c_x) ± i √(2|c| + 2c_x).
//! ```

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::dynamics::{classify_orbit, frac_orbit_with_kernel, OrbitVerdict, DEFAULT_CONV_TOL, DEFAULT_TAIL};
use crate::error::{check_order, Error, Result};
use crate::geometry::{PixelMap, Polyline, Window};
use crate::numerics::{BranchPolicy, KernelCoefficients};
use crate::par::{map_indexed, Exec};
use crate::stability::{classify, BOUNDARY_TOL};

/// Escape radius for fractional orbits. The classical `|z| > 2` bound does
/// not carry over to the memory kernel.
pub const FOM_ESCAPE_RADIUS: f64 = 1e3;
pub const DEFAULT_ITERATIONS: usize = 1000;
/// Seed inside the main body of the fractional set for all tested orders.
pub const MAIN_BODY_SEED: Complex64 = Complex64::new(-0.05, 0.0);
/// Sample count of the `Γ(c)` polygon used for point-in-polygon tests.
pub const GAMMA_POLYGON_SAMPLES: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub member: bool,
    pub iterations_used: u32,
    pub escape_index: Option<u32>,
}

impl Cell {
    fn from_escape(escape: Option<usize>, iterations: usize) -> Self {
        match escape {
            Some(n) => Cell { member: false, iterations_used: n as u32, escape_index: Some(n as u32) },
            None => Cell { member: true, iterations_used: iterations as u32, escape_index: None },
        }
    }
}

/// Per-pixel membership over a window of the parameter plane.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterGrid {
    pub map: PixelMap,
    pub cells: Vec<Cell>,
}

impl RasterGrid {
    pub fn width(&self) -> usize {
        self.map.width
    }

    pub fn height(&self) -> usize {
        self.map.height
    }

    pub fn window(&self) -> Window {
        self.map.window
    }

    pub fn member_count(&self) -> usize {
        self.cells.iter().filter(|c| c.member).count()
    }

    pub fn cell(&self, col: usize, row: usize) -> &Cell {
        &self.cells[row * self.map.width + col]
    }

    pub fn member_mask(&self) -> Vec<bool> {
        self.cells.iter().map(|c| c.member).collect()
    }
}

/// Membership of a single parameter in the fractional set.
#[derive(Clone, Debug, PartialEq)]
pub struct FomPoint {
    pub member: bool,
    pub verdict: OrbitVerdict<Complex64>,
    pub final_state: Complex64,
}

/// Escape index of the fractional orbit of `0` under `z ↦ z² + c`.
fn fom_escape(
    c: Complex64,
    kernel: &KernelCoefficients,
    iterations: usize,
    escape_radius: f64,
) -> Result<Option<usize>> {
    let traj =
        frac_orbit_with_kernel(kernel, |z: &Complex64| z * z + c, Complex64::new(0.0, 0.0), iterations, escape_radius)?;
    Ok(traj.escape_index)
}

pub fn fom_point(c: Complex64, q: f64, iterations: usize, escape_radius: f64) -> Result<FomPoint> {
    check_order(q)?;
    let kernel = KernelCoefficients::new(q, iterations.max(1))?;
    fom_point_with_kernel(c, &kernel, iterations, escape_radius)
}

pub fn fom_point_with_kernel(
    c: Complex64,
    kernel: &KernelCoefficients,
    iterations: usize,
    escape_radius: f64,
) -> Result<FomPoint> {
    let traj =
        frac_orbit_with_kernel(kernel, |z: &Complex64| z * z + c, Complex64::new(0.0, 0.0), iterations, escape_radius)?
            .with_tag("fractional-mandelbrot");
    let verdict = classify_orbit(&traj, DEFAULT_CONV_TOL, DEFAULT_TAIL);
    Ok(FomPoint { member: !verdict.is_diverged(), verdict, final_state: *traj.last() })
}

/// Renders the fractional-order set. The kernel is built once and shared by
/// every pixel.
pub fn fom_raster(
    window: Window,
    width: usize,
    height: usize,
    q: f64,
    iterations: usize,
    escape_radius: f64,
    exec: Exec,
) -> Result<RasterGrid> {
    check_order(q)?;
    let map = PixelMap::new(window, width, height)?;
    let kernel = KernelCoefficients::new(q, iterations.max(1))?;
    // Validates iterations/escape once so per-pixel work cannot fail.
    fom_escape(Complex64::new(0.0, 0.0), &kernel, iterations, escape_radius)?;
    let cells = map_indexed(map.len(), exec, |idx| {
        let escape = fom_escape(map.center_of(idx), &kernel, iterations, escape_radius)
            .expect("orbit parameters validated above");
        Cell::from_escape(escape, iterations)
    });
    Ok(RasterGrid { map, cells })
}

/// Classical escape time of `z ↦ z² + c` from `0`, with `|z| > 2` escape.
pub fn iom_escape(c: Complex64, iterations: usize) -> Option<usize> {
    let mut z = Complex64::new(0.0, 0.0);
    for n in 1..=iterations {
        z = z * z + c;
        if z.norm_sqr() > 4.0 {
            return Some(n);
        }
    }
    None
}

/// Renders the integer-order set.
pub fn iom_raster(window: Window, width: usize, height: usize, iterations: usize, exec: Exec) -> Result<RasterGrid> {
    let map = PixelMap::new(window, width, height)?;
    let cells =
        map_indexed(map.len(), exec, |idx| Cell::from_escape(iom_escape(map.center_of(idx), iterations), iterations));
    Ok(RasterGrid { map, cells })
}

/// Zeros of `z² + c`: `(i√c, −i√c)` with the principal root.
pub fn fixed_points(c: Complex64) -> (Complex64, Complex64) {
    let z1 = Complex64::i() * c.sqrt();
    (z1, -z1)
}

/// The four eigenvalues `(±A, ±B)` with `A = √(2|c| − 2c_x)`, `B = √(2|c| + 2c_x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair {
    /// `A + iB`
    pub l1: Complex64,
    /// `A − iB`
    pub l2: Complex64,
    /// `−A + iB`
    pub l3: Complex64,
    /// `−A − iB`
    pub l4: Complex64,
}

impl EigenPair {
    pub fn all(&self) -> [Complex64; 4] {
        [self.l1, self.l2, self.l3, self.l4]
    }

    /// The eigenvalue whose real and imaginary signs match `target`.
    pub fn matching_signs(&self, target: Complex64) -> Complex64 {
        match (target.re < 0.0, target.im < 0.0) {
            (false, false) => self.l1,
            (false, true) => self.l2,
            (true, false) => self.l3,
            (true, true) => self.l4,
        }
    }
}

pub fn eigenvalues(c: Complex64) -> EigenPair {
    let r = c.re.hypot(c.im);
    let a = (2.0 * r - 2.0 * c.re).max(0.0).sqrt();
    let b = (2.0 * r + 2.0 * c.re).max(0.0).sqrt();
    EigenPair {
        l1: Complex64::new(a, b),
        l2: Complex64::new(a, -b),
        l3: Complex64::new(-a, b),
        l4: Complex64::new(-a, -b),
    }
}

/// Inverse of [`eigenvalues`]: the parameter `c` (with `c_y ≥ 0`) whose
/// eigenvalue magnitudes are `(|Re λ|, |Im λ|)`.
pub fn eigen_to_c(lambda: Complex64) -> Complex64 {
    let u = lambda.re * lambda.re;
    let v = lambda.im * lambda.im;
    // √(|c|² − c_x²) with |c| = (u+v)/4 and c_x = (v−u)/4 simplifies to √(uv)/2.
    Complex64::new((v - u) / 4.0, (lambda.re * lambda.im).abs() / 2.0)
}

/// Point of `Γ(c)` at parameter `θ ∈ [-π/2, π/2]`.
pub fn gamma_c_point(q: f64, theta: f64) -> Complex64 {
    let cos2q = (FRAC_PI_2 - theta.abs()).sin().max(0.0).powf(2.0 * q);
    let cx = -(2f64.powf(2.0 * q - 2.0)) * cos2q * (2.0 * theta * (q - 2.0)).cos();
    let cy = 2f64.powf(2.0 * q - 1.0) * (theta * (2.0 - q)).sin() * cos2q * (theta * (q - 2.0)).cos();
    Complex64::new(cx, cy)
}

/// The closed curve `Γ(c)` bounding the fixed-point stability region.
pub fn gamma_c_curve(q: f64, samples: usize) -> Result<Polyline> {
    check_order(q)?;
    if samples < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {samples}")));
    }
    Ok(Polyline::sample(-FRAC_PI_2, FRAC_PI_2, samples, true, |t| gamma_c_point(q, t)))
}

/// The main cardioid `|1 − √(1 − 4c)| = 1` of the integer-order set.
pub fn iom_cardioid(samples: usize) -> Result<Polyline> {
    if samples < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {samples}")));
    }
    Ok(Polyline::sample(-PI, PI, samples, true, |t| {
        Complex64::new(2.0 * t.cos() - (2.0 * t).cos(), 2.0 * t.sin() - (2.0 * t).sin()) / 4.0
    }))
}

/// Boolean mask over a raster's pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl PixelMask {
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }
}

/// 4-connected flood fill of `member` cells starting at `(col, row)`.
pub fn flood_fill(member: &[bool], width: usize, height: usize, col: usize, row: usize) -> Vec<bool> {
    let mut filled = vec![false; member.len()];
    let start = row * width + col;
    if !member[start] {
        return filled;
    }
    let mut queue = VecDeque::from([start]);
    filled[start] = true;
    while let Some(idx) = queue.pop_front() {
        let (x, y) = (idx % width, idx / width);
        let mut visit = |n: usize| {
            if member[n] && !filled[n] {
                filled[n] = true;
                queue.push_back(n);
            }
        };
        if x > 0 {
            visit(idx - 1);
        }
        if x + 1 < width {
            visit(idx + 1);
        }
        if y > 0 {
            visit(idx - width);
        }
        if y + 1 < height {
            visit(idx + width);
        }
    }
    filled
}

/// The connected component of member pixels containing `seed`.
pub fn main_body_mask(raster: &RasterGrid, seed: Complex64) -> Result<PixelMask> {
    let (col, row) = raster.map.locate(seed).ok_or(Error::SeedNotMember((seed.re, seed.im)))?;
    if !raster.cell(col, row).member {
        return Err(Error::SeedNotMember((seed.re, seed.im)));
    }
    let bits = flood_fill(&raster.member_mask(), raster.width(), raster.height(), col, row);
    Ok(PixelMask { width: raster.width(), height: raster.height(), bits })
}

/// How the parameter-plane stability region is rasterized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StabilityRegion {
    /// Even-odd interior of the sampled `Γ(c)` polygon.
    #[default]
    GammaPolygon,
    /// Some eigenvalue of `c` classifies as `StableInterior` under the policy.
    Eigenvalues(BranchPolicy),
}

/// Parameters of a coverage measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageParams {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub iterations: usize,
    pub escape_radius: f64,
    pub seed: Complex64,
    pub region: StabilityRegion,
}

impl Default for CoverageParams {
    fn default() -> Self {
        Self {
            window: Window { x_min: -1.5, x_max: 0.5, y_min: -1.0, y_max: 1.0 },
            width: 600,
            height: 600,
            iterations: 300,
            escape_radius: FOM_ESCAPE_RADIUS,
            seed: MAIN_BODY_SEED,
            region: StabilityRegion::GammaPolygon,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageReport {
    pub q: f64,
    pub main_body_pixels: usize,
    pub stability_region_pixels: usize,
    pub intersection_pixels: usize,
    /// `intersection / main_body`.
    pub ratio: f64,
}

/// Stability-region mask over the pixel centers of `map`.
pub fn stability_region_mask(q: f64, map: &PixelMap, region: StabilityRegion, exec: Exec) -> Result<PixelMask> {
    check_order(q)?;
    let bits = match region {
        StabilityRegion::GammaPolygon => {
            let curve = gamma_c_curve(q, GAMMA_POLYGON_SAMPLES)?;
            map_indexed(map.len(), exec, |idx| curve.contains(map.center_of(idx)))
        }
        StabilityRegion::Eigenvalues(policy) => map_indexed(map.len(), exec, |idx| {
            eigenvalues(map.center_of(idx))
                .all()
                .iter()
                .any(|&l| classify(l, q, policy, BOUNDARY_TOL).map(|v| v.is_stable()).unwrap_or(false))
        }),
    };
    Ok(PixelMask { width: map.width, height: map.height, bits })
}

/// Fraction of the fractional set's main body covered by the fixed-point
/// stability region.
pub fn coverage_report(q: f64, params: &CoverageParams, exec: Exec) -> Result<CoverageReport> {
    check_order(q)?;
    let raster =
        fom_raster(params.window, params.width, params.height, q, params.iterations, params.escape_radius, exec)?;
    coverage_from_raster(q, &raster, params, exec)
}

/// [`coverage_report`] on an already rendered raster.
pub fn coverage_from_raster(
    q: f64,
    raster: &RasterGrid,
    params: &CoverageParams,
    exec: Exec,
) -> Result<CoverageReport> {
    let body = match main_body_mask(raster, params.seed) {
        Ok(mask) => mask,
        Err(Error::SeedNotMember(_)) => return Err(Error::EmptyMainBody),
        Err(e) => return Err(e),
    };
    let region = stability_region_mask(q, &raster.map, params.region, exec)?;
    let main_body_pixels = body.count();
    if main_body_pixels == 0 {
        return Err(Error::EmptyMainBody);
    }
    let intersection_pixels = body.bits.iter().zip(&region.bits).filter(|(a, b)| **a && **b).count();
    Ok(CoverageReport {
        q,
        main_body_pixels,
        stability_region_pixels: region.count(),
        intersection_pixels,
        ratio: intersection_pixels as f64 / main_body_pixels as f64,
    })
}
