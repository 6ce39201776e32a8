//! Float math routed to `std` or `libm` depending on the enabled feature.
//!
//! Both backends are correctly rounded for `sqrt` and exact for `abs`, so
//! results do not depend on the backend for the operations the solvers use.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
    #[inline]
    pub fn copysign(x: f64, sign: f64) -> f64 {
        x.copysign(sign)
    }
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
mod imp {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
    #[inline]
    pub fn copysign(x: f64, sign: f64) -> f64 {
        libm::copysign(x, sign)
    }
}

pub(crate) use imp::{abs, copysign, exp, floor, sqrt};

/// Overflow-safe `sqrt(a² + b²)`, backend-independent.
pub(crate) fn hypot(a: f64, b: f64) -> f64 {
    let (a, b) = (abs(a), abs(b));
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big == 0.0 {
        return 0.0;
    }
    let r = small / big;
    big * sqrt(1.0 + r * r)
}

/// `x²` without `powi`, which is not available on all backends.
#[inline]
pub(crate) fn sq(x: f64) -> f64 {
    x * x
}
