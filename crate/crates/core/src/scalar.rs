//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All linear algebra is written against [`Real`] and [`Complex<T>`] so the
//! same code runs in `f64` (the default, used by the CLI and the acceptance
//! suite) and `f32` (useful for spot checks of conditioning).

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type underlying every amplitude.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Default tolerance for scientific assertions (overlaps, marginals).
    fn assertion_tolerance() -> Self;
    /// Default tolerance for linear-algebra residuals.
    fn residual_tolerance() -> Self;
    /// Off-diagonal threshold at which the Jacobi sweep stops.
    fn jacobi_threshold() -> Self;
}

impl Real for f64 {
    fn assertion_tolerance() -> Self {
        1e-10
    }
    fn residual_tolerance() -> Self {
        1e-12
    }
    fn jacobi_threshold() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn assertion_tolerance() -> Self {
        1e-4
    }
    fn residual_tolerance() -> Self {
        1e-5
    }
    fn jacobi_threshold() -> Self {
        1e-7
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in target float")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Tolerance pair used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Applied to scientific claims (overlaps, marginals, Gram entries).
    pub assertion: T,
    /// Applied to linear-algebra residuals (reconstruction, trace preservation).
    pub residual: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            assertion: T::assertion_tolerance(),
            residual: T::residual_tolerance(),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn uniform(tol: T) -> Self {
        Self {
            assertion: tol,
            residual: tol,
        }
    }
}
