//! Scalar building blocks: the principal argument, the sign-based `atan2`
//! emulation, real powers of negative bases under an explicit branch policy,
//! the quadrant function of the modulus bound, and the Caputo memory-kernel
//! weights.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{check_order, Error, Result};

/// Rule for `x^y` when `x < 0` and `y` is not an integer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BranchPolicy {
    /// `exp(y · Log x)` with the principal logarithm; the result is complex.
    #[default]
    PrincipalComplex,
    /// Sign-preserving real root: `-(|x|^y)`.
    RealOddRoot,
    /// Negative bases are outside the domain.
    RestrictedDomain,
}

impl BranchPolicy {
    pub const ALL: [BranchPolicy; 3] =
        [BranchPolicy::PrincipalComplex, BranchPolicy::RealOddRoot, BranchPolicy::RestrictedDomain];

    pub fn name(self) -> &'static str {
        match self {
            BranchPolicy::PrincipalComplex => "principal",
            BranchPolicy::RealOddRoot => "oddroot",
            BranchPolicy::RestrictedDomain => "restricted",
        }
    }
}

impl fmt::Display for BranchPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BranchPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "principal" => Ok(BranchPolicy::PrincipalComplex),
            "oddroot" => Ok(BranchPolicy::RealOddRoot),
            "restricted" => Ok(BranchPolicy::RestrictedDomain),
            other => Err(Error::InvalidArgument(format!(
                "unknown branch policy '{other}' (expected principal, oddroot or restricted)"
            ))),
        }
    }
}

/// Outcome of a real power evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PowerResult {
    Real(f64),
    Complex(Complex64),
    Undefined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerKind {
    Real,
    Complex,
    Undefined,
}

impl PowerResult {
    pub fn kind(&self) -> PowerKind {
        match self {
            PowerResult::Real(_) => PowerKind::Real,
            PowerResult::Complex(_) => PowerKind::Complex,
            PowerResult::Undefined => PowerKind::Undefined,
        }
    }

    pub fn real(&self) -> Option<f64> {
        match *self {
            PowerResult::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, PowerResult::Real(_))
    }

    /// Real and imaginary parts; `None` when undefined.
    pub fn parts(&self) -> Option<(f64, f64)> {
        match *self {
            PowerResult::Real(v) => Some((v, 0.0)),
            PowerResult::Complex(z) => Some((z.re, z.im)),
            PowerResult::Undefined => None,
        }
    }
}

/// Principal argument in `(-π, π]`; `0` at the origin.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    // atan2(-0.0, x<0) is -π; the principal range is half-open at -π.
    if a == -PI {
        PI
    } else {
        a
    }
}

/// The sign-based emulation of `atan2` next to the native value it emulates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atan2Check {
    pub emulated: f64,
    pub native: f64,
}

impl Atan2Check {
    /// The formula disagrees with the native function; this happens on the
    /// negative real axis, where `sign(0) = 0` drops the `π` shift.
    pub fn mismatch(&self) -> bool {
        (self.emulated - self.native).abs() > 1e-12
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `arctan(y/x) + (π/2)·sign(y)·(1 − sign(x))`, evaluated verbatim.
///
/// Undefined for `x = 0`. Wrong for `y = 0, x < 0` (yields 0 instead of π);
/// the returned [`Atan2Check`] flags that case.
pub fn atan2_emulated(y: f64, x: f64) -> Result<Atan2Check> {
    if x == 0.0 {
        return Err(Error::Domain("atan2 emulation divides by x = 0"));
    }
    let emulated = (y / x).atan() + FRAC_PI_2 * sign(y) * (1.0 - sign(x));
    Ok(Atan2Check { emulated, native: y.atan2(x) })
}

/// `base^exponent` with the negative-base branch chosen by `policy`.
///
/// Non-negative bases (and integer exponents outside `RestrictedDomain`) are
/// real under every policy. `0^0 = 1`.
pub fn real_power(base: f64, exponent: f64, policy: BranchPolicy) -> PowerResult {
    if base >= 0.0 || base.is_nan() {
        return PowerResult::Real(base.powf(exponent));
    }
    if policy == BranchPolicy::RestrictedDomain {
        return PowerResult::Undefined;
    }
    if exponent.fract() == 0.0 {
        return PowerResult::Real(base.powf(exponent));
    }
    match policy {
        BranchPolicy::PrincipalComplex => {
            // Log(x) = ln|x| + iπ for x < 0.
            let w = Complex64::new(base.abs().ln(), PI) * exponent;
            PowerResult::Complex(w.exp())
        }
        BranchPolicy::RealOddRoot => PowerResult::Real(-(base.abs().powf(exponent))),
        BranchPolicy::RestrictedDomain => unreachable!(),
    }
}

/// Which quadrant `E_a(q)` falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadrantTag {
    QuadrantIII,
    QuadrantIV,
    Boundary,
}

/// Tolerance for tagging `E_a(q) = -π/2` as [`QuadrantTag::Boundary`].
pub const QUADRANT_TOL: f64 = 1e-12;

/// `E_a(q) = (a − π)/(2 − q)`, the cosine argument of the modulus bound, with
/// its quadrant. Quadrant III (negative cosine) happens exactly when `a < qπ/2`.
pub fn e_a(a: f64, q: f64) -> Result<(f64, QuadrantTag)> {
    if !(0.0..PI).contains(&a) {
        return Err(Error::InvalidArgument(format!("|arg z| = {a} outside [0, π)")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidOrder(q));
    }
    let value = (a - PI) / (2.0 - q);
    let tag = if (value + FRAC_PI_2).abs() <= QUADRANT_TOL {
        QuadrantTag::Boundary
    } else if value < -FRAC_PI_2 {
        QuadrantTag::QuadrantIII
    } else {
        QuadrantTag::QuadrantIV
    };
    Ok((value, tag))
}

/// Normalized memory weights `b_j = Γ(j+q) / (Γ(q) Γ(j+1))`.
///
/// Built from `b_0 = 1`, `b_j = b_{j-1} (j-1+q)/j`, which never touches Γ at
/// large arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelCoefficients {
    q: f64,
    b: Vec<f64>,
}

impl KernelCoefficients {
    pub fn new(q: f64, n: usize) -> Result<Self> {
        check_order(q)?;
        if n == 0 {
            return Err(Error::InvalidArgument("kernel needs at least one coefficient".into()));
        }
        let mut b = Vec::with_capacity(n);
        b.push(1.0);
        for j in 1..n {
            let jf = j as f64;
            b.push(b[j - 1] * (jf - 1.0 + q) / jf);
        }
        Ok(Self { q, b })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.b
    }
}

/// Shorthand for [`KernelCoefficients::new`].
pub fn kernel_coefficients(q: f64, n: usize) -> Result<KernelCoefficients> {
    KernelCoefficients::new(q, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn principal_arg_axes() {
        assert_eq!(principal_arg(Complex64::new(1.0, 0.0)), 0.0);
        assert_eq!(principal_arg(Complex64::new(0.0, 1.0)), FRAC_PI_2);
        assert_eq!(principal_arg(Complex64::new(-1.0, 0.0)), PI);
        assert_eq!(principal_arg(Complex64::new(-1.0, -0.0)), PI);
        assert_eq!(principal_arg(Complex64::new(0.0, 0.0)), 0.0);
        assert!(principal_arg(Complex64::new(-1.0, -1e-3)) < 0.0);
    }

    #[test]
    fn atan2_emulation_examples() {
        let first = atan2_emulated(1.0, 1.0).unwrap();
        assert!((first.emulated - FRAC_PI_4).abs() < 1e-15);
        let second = atan2_emulated(1.0, -1.0).unwrap();
        assert!((second.emulated - 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert!(!second.mismatch());
        let axis = atan2_emulated(0.0, -1.0).unwrap();
        assert_eq!(axis.emulated, 0.0);
        assert_eq!(axis.native, PI);
        assert!(axis.mismatch());
        assert!(matches!(atan2_emulated(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn real_power_examples() {
        for policy in BranchPolicy::ALL {
            assert_eq!(real_power(4.0, 0.5, policy), PowerResult::Real(2.0));
            assert_eq!(real_power(0.0, 0.0, policy), PowerResult::Real(1.0));
        }
        match real_power(-1.0, 0.5, BranchPolicy::PrincipalComplex) {
            PowerResult::Complex(z) => assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15),
            other => panic!("expected complex, got {other:?}"),
        }
        let odd = real_power(-8.0, 1.0 / 3.0, BranchPolicy::RealOddRoot).real().unwrap();
        assert!((odd + 2.0).abs() < 1e-14);
        assert_eq!(real_power(-8.0, 1.0 / 3.0, BranchPolicy::RestrictedDomain), PowerResult::Undefined);
        assert_eq!(real_power(-2.0, 2.0, BranchPolicy::RealOddRoot), PowerResult::Real(4.0));
        assert_eq!(real_power(-2.0, 2.0, BranchPolicy::RestrictedDomain), PowerResult::Undefined);
    }

    #[test]
    fn policy_names_round_trip() {
        for policy in BranchPolicy::ALL {
            assert_eq!(policy.name().parse::<BranchPolicy>().unwrap(), policy);
        }
        assert!("matlab".parse::<BranchPolicy>().is_err());
    }

    #[test]
    fn e_a_examples() {
        let (v, tag) = e_a(0.0, 0.8).unwrap();
        assert!((v + PI / 1.2).abs() < 1e-15);
        assert!((v + 2.618).abs() < 1e-3);
        assert_eq!(tag, QuadrantTag::QuadrantIII);

        let (v, tag) = e_a(FRAC_PI_2, 0.5).unwrap();
        assert!((v + PI / 3.0).abs() < 1e-15);
        assert_eq!(tag, QuadrantTag::QuadrantIV);

        let (v, tag) = e_a(0.6 * FRAC_PI_2, 0.6).unwrap();
        assert!((v + FRAC_PI_2).abs() < 1e-15);
        assert_eq!(tag, QuadrantTag::Boundary);

        assert!(e_a(PI, 0.5).is_err());
        assert!(e_a(1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_coefficients(0.5, 3).unwrap();
        assert_eq!(k.as_slice(), &[1.0, 0.5, 0.375]);
        let ones = kernel_coefficients(1.0, 200).unwrap();
        assert!(ones.as_slice().iter().all(|&b| b == 1.0));
        assert!(kernel_coefficients(0.0, 3).is_err());
        assert!(kernel_coefficients(1.2, 3).is_err());
        assert!(kernel_coefficients(0.5, 0).is_err());
    }

    #[test]
    fn kernel_survives_long_histories() {
        // Γ(j) overflows past j ≈ 171; the recurrence must not.
        let k = kernel_coefficients(0.85, 100_000).unwrap();
        let b = k.as_slice();
        assert!(b.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!(b.windows(2).all(|w| w[1] < w[0]));
    }
}
