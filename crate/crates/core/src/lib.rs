//! Stability domains of linear fractional-order difference systems and the
//! fractional-order Mandelbrot map.
//!
//! * [`numerics`]: principal argument, branch-aware real powers, memory-kernel weights.
//! * [`stability`]: membership in `S^q`, its frontier and its area.
//! * [`dynamics`]: the memory-kernel integrator, linear simulation and decay fits.
//! * [`mandelbrot`]: fractional and classical escape-time rasters, fixed points,
//!   eigenvalues, the `Γ(c)` curve and main-body coverage.
//!
//! Raster and grid work takes an [`Exec`]; with the default `parallel`
//! feature it is spread over rayon's pool, otherwise it runs sequentially.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod mandelbrot;
pub mod numerics;
pub mod par;
pub mod stability;

pub use error::{Error, Result};
pub use geometry::{PixelMap, Polyline, Window};
pub use num_complex::Complex64;
pub use numerics::{BranchPolicy, KernelCoefficients, PowerResult};
pub use par::Exec;
pub use stability::{StabilityVerdict, VerdictKind};
