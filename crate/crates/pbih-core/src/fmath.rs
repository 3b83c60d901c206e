//! Float math routed through one module so the crate builds against either
//! `std` or `libm`.

#![allow(dead_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("pbih-core requires either the `std` feature or the `libm` feature");

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    #[inline]
    pub fn sinh(x: f64) -> f64 {
        x.sinh()
    }
    #[inline]
    pub fn cosh(x: f64) -> f64 {
        x.cosh()
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
mod imp {
    #[inline]
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    #[inline]
    pub fn sinh(x: f64) -> f64 {
        libm::sinh(x)
    }
    #[inline]
    pub fn cosh(x: f64) -> f64 {
        libm::cosh(x)
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
}

pub use imp::*;

/// Integer power by squaring; one implementation for both feature sets so
/// results are bit-identical across builds.
pub fn powi(base: f64, exp: i64) -> f64 {
    let (mut b, mut e) = if exp < 0 {
        (1.0 / base, exp.unsigned_abs())
    } else {
        (base, exp as u64)
    };
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// True when `x` is finite and has no fractional part.
pub fn is_integer(x: f64) -> bool {
    x.is_finite() && x == floor(x)
}
