//! Caputo-type fractional difference dynamics.
//!
//! The initial value problem `Δ^q x(t) = f(x(t+q-1))` is integrated with its
//! memory-kernel sum
//!
//! ```text
//! x(n) = x(0) + Σ_{j=0}^{n-1} b_j f(x(n-1-j)),   b_j = Γ(j+q) / (Γ(q) Γ(j+1)),
//! ```
//!
//! which costs `O(N²)` right-hand-side combinations for `N` steps. Each
//! trajectory is inherently sequential; independent trajectories can share
//! one [`KernelCoefficients`].

use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_order, Error, Result};
use crate::numerics::KernelCoefficients;

/// Norm cap for linear orbits; beyond it the orbit is treated as escaped.
pub const OVERFLOW_GUARD: f64 = 1e12;
/// Default convergence tolerance of [`classify_orbit`].
pub const DEFAULT_CONV_TOL: f64 = 1e-3;
/// Default tail length of [`classify_orbit`].
pub const DEFAULT_TAIL: usize = 10;

/// A vector-space state the integrator can accumulate.
pub trait State: Clone {
    /// `self += weight * other`.
    fn add_scaled(&mut self, weight: f64, other: &Self);
    fn norm(&self) -> f64;
    fn distance(&self, other: &Self) -> f64;
    fn difference(&self, other: &Self) -> Self;

    fn is_finite(&self) -> bool {
        self.norm().is_finite()
    }
}

impl State for f64 {
    #[inline]
    fn add_scaled(&mut self, weight: f64, other: &Self) {
        *self += weight * other;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn difference(&self, other: &Self) -> Self {
        self - other
    }
}

impl State for Complex64 {
    #[inline]
    fn add_scaled(&mut self, weight: f64, other: &Self) {
        self.re += weight * other.re;
        self.im += weight * other.im;
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn difference(&self, other: &Self) -> Self {
        self - other
    }
}

impl State for DVector<f64> {
    fn add_scaled(&mut self, weight: f64, other: &Self) {
        self.axpy(weight, other, 1.0);
    }
    fn norm(&self) -> f64 {
        DVector::norm(self)
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn difference(&self, other: &Self) -> Self {
        self - other
    }
}

/// A finite orbit `x(0..=N)`. When the orbit escapes, `states` ends at the
/// escaping state and `escape_index` records its index.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    pub q: f64,
    pub states: Vec<S>,
    pub rhs_tag: &'static str,
    pub escape_index: Option<usize>,
}

impl<S: State> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectories always hold x(0)")
    }

    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(State::norm).collect()
    }

    pub fn with_tag(mut self, tag: &'static str) -> Self {
        self.rhs_tag = tag;
        self
    }
}

fn check_steps(steps: usize, escape_radius: f64) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidArgument("orbit needs at least one step".into()));
    }
    if escape_radius.is_nan() || escape_radius <= 0.0 {
        return Err(Error::InvalidArgument(format!("escape radius {escape_radius} must be positive")));
    }
    Ok(())
}

/// Integrates `steps` steps of the fractional difference system with
/// right-hand side `rhs`, truncating at the first state whose norm exceeds
/// `escape_radius` or is not finite.
pub fn frac_orbit<S, F>(q: f64, rhs: F, x0: S, steps: usize, escape_radius: f64) -> Result<Trajectory<S>>
where
    S: State,
    F: Fn(&S) -> S,
{
    check_order(q)?;
    check_steps(steps, escape_radius)?;
    let kernel = KernelCoefficients::new(q, steps)?;
    frac_orbit_with_kernel(&kernel, rhs, x0, steps, escape_radius)
}

/// [`frac_orbit`] with precomputed weights; `kernel` must hold at least
/// `steps` coefficients.
pub fn frac_orbit_with_kernel<S, F>(
    kernel: &KernelCoefficients,
    rhs: F,
    x0: S,
    steps: usize,
    escape_radius: f64,
) -> Result<Trajectory<S>>
where
    S: State,
    F: Fn(&S) -> S,
{
    check_steps(steps, escape_radius)?;
    if kernel.len() < steps {
        return Err(Error::InvalidArgument(format!("kernel has {} coefficients, orbit needs {steps}", kernel.len())));
    }
    let b = kernel.as_slice();
    let unit_kernel = kernel.q() == 1.0;

    let mut states = Vec::with_capacity(steps + 1);
    let mut forcing: Vec<S> = Vec::with_capacity(steps);
    states.push(x0.clone());
    let mut escape_index = None;

    for n in 1..=steps {
        forcing.push(rhs(&states[n - 1]));
        let next = if unit_kernel {
            // All weights are 1: the sum telescopes to the plain recursion.
            let mut x = states[n - 1].clone();
            x.add_scaled(1.0, &forcing[n - 1]);
            x
        } else {
            let mut x = x0.clone();
            for (weight, f) in b[..n].iter().zip(forcing.iter().rev()) {
                x.add_scaled(*weight, f);
            }
            x
        };
        let norm = next.norm();
        states.push(next);
        if !norm.is_finite() || norm > escape_radius {
            escape_index = Some(n);
            break;
        }
    }

    Ok(Trajectory { q: kernel.q(), states, rhs_tag: "custom", escape_index })
}

/// Simulates `Δ^q y(n+1-q) = A y(n)` for `steps` steps.
pub fn linear_orbit(q: f64, a: &DMatrix<f64>, y0: &DVector<f64>, steps: usize) -> Result<Trajectory<DVector<f64>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if a.nrows() != y0.len() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: y0.len() });
    }
    if a.nrows() == 0 {
        return Err(Error::InvalidArgument("system dimension must be at least 1".into()));
    }
    frac_orbit(q, |y: &DVector<f64>| a * y, y0.clone(), steps, OVERFLOW_GUARD).map(|t| t.with_tag("linear"))
}

/// Scalar complex linear system `Δ^q y = λ y`; equivalent to the real 2×2
/// system with eigenvalues `λ, conj λ`.
pub fn scalar_orbit(q: f64, lambda: Complex64, y0: Complex64, steps: usize) -> Result<Trajectory<Complex64>> {
    frac_orbit(q, |y: &Complex64| lambda * y, y0, steps, OVERFLOW_GUARD).map(|t| t.with_tag("scalar-linear"))
}

/// Least-squares fit of `log‖y(n)‖` against `log n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: RangeInclusive<usize>,
    /// RMS residual of the fit, in log units.
    pub residual: f64,
}

/// Fits the algebraic decay rate of a trajectory over `window`.
pub fn decay_exponent<S: State>(traj: &Trajectory<S>, window: RangeInclusive<usize>) -> Result<DecayFit> {
    decay_exponent_of_norms(&traj.norms(), window)
}

/// [`decay_exponent`] on a precomputed norm sequence indexed from `n = 0`.
pub fn decay_exponent_of_norms(norms: &[f64], window: RangeInclusive<usize>) -> Result<DecayFit> {
    let (start, end) = (*window.start(), *window.end());
    if start < 1 || end >= norms.len() || end < start || end - start + 1 < 10 {
        return Err(Error::InvalidArgument(format!(
            "fit window {start}..={end} must lie in [1, {}] and span at least 10 points",
            norms.len().saturating_sub(1)
        )));
    }
    let mut xs = Vec::with_capacity(end - start + 1);
    let mut ys = Vec::with_capacity(end - start + 1);
    for (n, &v) in norms.iter().enumerate().take(end + 1).skip(start) {
        if v.is_nan() || v <= 0.0 || v.is_infinite() {
            return Err(Error::ZeroStateInWindow(n));
        }
        xs.push((n as f64).ln());
        ys.push(v.ln());
    }
    let count = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / count;
    let mean_y = ys.iter().sum::<f64>() / count;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sq: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(DecayFit { slope, intercept, window, residual: (sq / count).sqrt() })
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitVerdict<S> {
    /// The tail settled within `achieved_tol` of its mean `point`.
    ConvergedTo {
        point: S,
        achieved_tol: f64,
    },
    Diverged {
        escape_index: usize,
    },
    Undecided,
}

impl<S> OrbitVerdict<S> {
    pub fn is_diverged(&self) -> bool {
        matches!(self, OrbitVerdict::Diverged { .. })
    }

    pub fn converged_point(&self) -> Option<&S> {
        match self {
            OrbitVerdict::ConvergedTo { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// Decides the fate of an orbit from its last `tail` states.
pub fn classify_orbit<S: State>(traj: &Trajectory<S>, conv_tol: f64, tail: usize) -> OrbitVerdict<S> {
    if let Some(escape_index) = traj.escape_index {
        return OrbitVerdict::Diverged { escape_index };
    }
    let tail = tail.clamp(1, traj.states.len());
    let window = &traj.states[traj.states.len() - tail..];
    // Offsets from the first tail state keep a constant tail exact.
    let mut mean = window[0].clone();
    for s in &window[1..] {
        mean.add_scaled(1.0 / tail as f64, &s.difference(&window[0]));
    }
    let spread = window.iter().map(|s| s.distance(&mean)).fold(0.0, f64::max);
    if spread <= conv_tol {
        OrbitVerdict::ConvergedTo { point: mean, achieved_tol: spread }
    } else {
        OrbitVerdict::Undecided
    }
}
