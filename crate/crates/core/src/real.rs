//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display};
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating point types the spectral kernels can run on.
///
/// Implemented for `f32` and `f64`. All tolerances in the crate are
/// expressed through [`Real::chop_tol`] and [`Float::epsilon`] so that the
/// same code adapts to the working precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Relative tolerance used by the chop rule when no override is set.
    const DEFAULT_CHOP_TOL: f64;

    /// Lossy conversion from `f64`, used for literal constants.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Lossy conversion from an index or count.
    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("representable count")
    }

    /// Lossy conversion from a signed mode number.
    #[inline]
    fn from_isize_lossy(x: isize) -> Self {
        Self::from_isize(x).expect("representable mode")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative chop tolerance: `BALLKIT_TOL` if set and parsable, otherwise
    /// [`Real::DEFAULT_CHOP_TOL`]. The override is clamped below by the
    /// working precision.
    fn chop_tol() -> Self {
        let tol = env_tol().unwrap_or(Self::DEFAULT_CHOP_TOL);
        Self::lit(tol).max(Self::epsilon())
    }
}

impl Real for f64 {
    const DEFAULT_CHOP_TOL: f64 = 1e-15;
}

impl Real for f32 {
    const DEFAULT_CHOP_TOL: f64 = 5e-7;
}

fn env_tol() -> Option<f64> {
    static TOL: OnceLock<Option<f64>> = OnceLock::new();
    *TOL.get_or_init(|| {
        std::env::var("BALLKIT_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
    })
}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `e^{i x}`.
#[inline]
pub(crate) fn cis<T: Real>(x: T) -> C<T> {
    Complex::new(x.cos(), x.sin())
}

/// `(-1)^k` for a signed integer.
#[inline]
pub(crate) fn sign_pow<T: Real>(k: isize) -> T {
    if k.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}
