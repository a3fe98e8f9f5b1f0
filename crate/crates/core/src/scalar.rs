//! Floating-point abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real scalar the engine can run on.
///
/// Tolerances are precision dependent: the f64 values are the contract
/// values, the f32 ones are loosened to what single precision can hold.
pub trait Scalar: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Absolute tolerance on probability sums (simplex, matrix rows, posteriors).
    const PROB_TOL: f64;
    /// Inputs this close to the simplex are rescaled instead of rejected.
    const RENORM_TOL: f64;
    /// Tolerance on compartment bounds and population conservation.
    const STATE_TOL: f64;
    /// Drift beyond which the integrator rescales the state to sum to one.
    const DRIFT_TOL: f64;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f64 {
    const PROB_TOL: f64 = 1e-12;
    const RENORM_TOL: f64 = 1e-9;
    const STATE_TOL: f64 = 1e-9;
    const DRIFT_TOL: f64 = 1e-12;

    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    const PROB_TOL: f64 = 1e-6;
    const RENORM_TOL: f64 = 1e-4;
    const STATE_TOL: f64 = 1e-5;
    const DRIFT_TOL: f64 = 1e-6;

    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

/// Shorthand for [`Scalar::lit`].
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}

/// `-expm1(-x)/x`, continuous through `x = 0`.
#[inline]
pub(crate) fn one_minus_exp_over<T: Scalar>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        -(-x).exp_m1() / x
    }
}
