//! The stability domain `S^q` of `Δ^q y(n+1-q) = A y(n)` in the eigenvalue
//! plane.
//!
//! A point `z` belongs to `S^q` when it passes the sector test
//! `|arg z| > qπ/2` and the modulus test `A_q(z) < 0`, where
//!
//! ```text
//! A_q(z) = |z| - (2 cos((|arg z| - π)/(2 - q)))^q.
//! ```
//!
//! Inside the excluded sector the cosine is negative and the power has no
//! real value; how that case evaluates is delegated to a [`BranchPolicy`].
//! The sector test runs first, so verdicts outside the sector never depend on
//! the policy.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{check_order, Error, Result};
use crate::geometry::{PixelMap, Polyline, Window};
use crate::numerics::{principal_arg, real_power, BranchPolicy, PowerResult};
use crate::par::{map_indexed, Exec};

/// Default half-width of the [`VerdictKind::Boundary`] band around `A_q = 0`.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    StableInterior,
    Boundary,
    UnstableMatignon,
    UnstableModulus,
    UndefinedComplexPower,
}

impl VerdictKind {
    pub fn name(self) -> &'static str {
        match self {
            VerdictKind::StableInterior => "stable-interior",
            VerdictKind::Boundary => "boundary",
            VerdictKind::UnstableMatignon => "unstable-matignon",
            VerdictKind::UnstableModulus => "unstable-modulus",
            VerdictKind::UndefinedComplexPower => "undefined-complex-power",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityVerdict {
    pub kind: VerdictKind,
    pub a_q: PowerResult,
    pub matignon_ok: bool,
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        self.kind == VerdictKind::StableInterior
    }
}

/// Right-hand side of the modulus test, `(2 cos E)^q`, at argument modulus `a`.
fn modulus_bound(a: f64, q: f64, policy: BranchPolicy) -> PowerResult {
    let e = (a - PI) / (2.0 - q);
    real_power(2.0 * e.cos(), q, policy)
}

/// `A_q(z)`; complex or undefined whenever the power is.
pub fn a_q(z: Complex64, q: f64, policy: BranchPolicy) -> Result<PowerResult> {
    check_order(q)?;
    Ok(a_q_unchecked(z, q, policy))
}

fn a_q_unchecked(z: Complex64, q: f64, policy: BranchPolicy) -> PowerResult {
    let modulus = z.norm();
    match modulus_bound(principal_arg(z).abs(), q, policy) {
        PowerResult::Real(v) => PowerResult::Real(modulus - v),
        PowerResult::Complex(w) => PowerResult::Complex(Complex64::new(modulus, 0.0) - w),
        PowerResult::Undefined => PowerResult::Undefined,
    }
}

/// Classifies an eigenvalue against `S^q`.
pub fn classify(z: Complex64, q: f64, policy: BranchPolicy, boundary_tol: f64) -> Result<StabilityVerdict> {
    check_order(q)?;
    if boundary_tol.is_nan() || boundary_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("boundary tolerance {boundary_tol} must be positive")));
    }
    Ok(classify_unchecked(z, q, policy, boundary_tol))
}

fn classify_unchecked(z: Complex64, q: f64, policy: BranchPolicy, boundary_tol: f64) -> StabilityVerdict {
    let a_q = a_q_unchecked(z, q, policy);
    let matignon_ok = principal_arg(z).abs() > q * FRAC_PI_2;
    let kind = if !matignon_ok {
        VerdictKind::UnstableMatignon
    } else {
        match a_q {
            PowerResult::Real(v) if v.abs() <= boundary_tol => VerdictKind::Boundary,
            PowerResult::Real(v) if v < 0.0 => VerdictKind::StableInterior,
            PowerResult::Real(_) => VerdictKind::UnstableModulus,
            PowerResult::Complex(_) => VerdictKind::UndefinedComplexPower,
            // Only reachable through rounding on the tangent rays.
            PowerResult::Undefined => VerdictKind::UnstableModulus,
        }
    };
    StabilityVerdict { kind, a_q, matignon_ok }
}

/// Point of the frontier `Γ` at parameter `θ ∈ [-π/2, π/2]`.
pub fn boundary_point(q: f64, theta: f64) -> Complex64 {
    // cos θ via sin(π/2 − |θ|): exactly zero at the endpoints.
    let cos = (FRAC_PI_2 - theta.abs()).sin().max(0.0);
    let radius = -(2.0 * cos).powf(q);
    let phase = (2.0 - q) * theta;
    Complex64::new(radius * phase.cos(), radius * phase.sin())
}

/// The closed frontier `Γ` of `S^q`, sampled uniformly in `θ`. Both ends of
/// the parameter range sit at the origin.
pub fn boundary_curve(q: f64, samples: usize) -> Result<Polyline> {
    check_order(q)?;
    if samples < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {samples}")));
    }
    Ok(Polyline::sample(-FRAC_PI_2, FRAC_PI_2, samples, true, |t| boundary_point(q, t)))
}

/// The two sector rays `|arg z| = qπ/2`, each from the origin to `radius`.
pub fn matignon_rays(q: f64, radius: f64) -> Result<(Polyline, Polyline)> {
    check_order(q)?;
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!("ray radius {radius} must be positive")));
    }
    let angle = q * FRAC_PI_2;
    let ray = |sign: f64| Polyline {
        points: vec![Complex64::new(0.0, 0.0), Complex64::from_polar(radius, sign * angle)],
        parameters: vec![0.0, radius],
        closed: false,
    };
    Ok((ray(1.0), ray(-1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AreaMethod {
    GridCount,
    GreenTheorem,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AreaEstimate {
    pub value: f64,
    pub method: AreaMethod,
    /// Cell side length for grid counts, sample count for Green's theorem.
    pub resolution: f64,
    pub policy: BranchPolicy,
}

/// Verdict for every cell center of a raster, row-major.
pub fn classify_raster(
    q: f64,
    policy: BranchPolicy,
    window: Window,
    width: usize,
    height: usize,
    exec: Exec,
) -> Result<Vec<StabilityVerdict>> {
    check_order(q)?;
    let map = PixelMap::new(window, width, height)?;
    Ok(map_indexed(map.len(), exec, |idx| classify_unchecked(map.center_of(idx), q, policy, BOUNDARY_TOL)))
}

/// Area of `S^q` by counting `StableInterior` cell centers on a `cells × cells`
/// grid. Rows are counted independently and summed as integers, so the
/// result does not depend on the worker count.
pub fn region_area_grid(
    q: f64,
    policy: BranchPolicy,
    window: Window,
    cells: usize,
    exec: Exec,
) -> Result<AreaEstimate> {
    check_order(q)?;
    let radius = 2f64.powf(q);
    if !window.contains_disk(radius) {
        return Err(Error::WindowTooSmall { window: window.as_array(), radius });
    }
    let map = PixelMap::new(window, cells, cells)?;
    let row_counts = map_indexed(cells, exec, |row| {
        (0..cells).filter(|&col| classify_unchecked(map.center(col, row), q, policy, BOUNDARY_TOL).is_stable()).count()
            as u64
    });
    let count: u64 = row_counts.iter().sum();
    Ok(AreaEstimate {
        value: count as f64 * map.cell_area(),
        method: AreaMethod::GridCount,
        resolution: window.width() / cells as f64,
        policy,
    })
}

/// Area enclosed by the sampled frontier, via the shoelace form of Green's
/// theorem.
pub fn region_area_green(q: f64, samples: usize) -> Result<AreaEstimate> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 samples, got {samples}")));
    }
    let curve = boundary_curve(q, samples)?;
    Ok(AreaEstimate {
        value: curve.signed_area().abs(),
        method: AreaMethod::GreenTheorem,
        resolution: samples as f64,
        policy: BranchPolicy::PrincipalComplex,
    })
}
