//! Float-method shim so the crate builds without `std`.
//!
//! With `std` enabled the inherent `f64` methods win method resolution and
//! this module contributes nothing. Without `std`, the same names resolve to
//! the `libm` implementations through the trait below.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("cat0lab-core requires either the `std` or the `libm` feature");

#[cfg(not(feature = "std"))]
pub(crate) trait FloatExt: Sized {
    fn sqrt(self) -> Self;
    fn powf(self, e: Self) -> Self;
    fn powi(self, e: i32) -> Self;
    fn tanh(self) -> Self;
    fn atanh(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn hypot(self, other: Self) -> Self;
}

#[cfg(not(feature = "std"))]
impl FloatExt for f64 {
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    fn powf(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
    fn powi(self, e: i32) -> f64 {
        libm::pow(self, e as f64)
    }
    fn tanh(self) -> f64 {
        libm::tanh(self)
    }
    fn atanh(self) -> f64 {
        libm::atanh(self)
    }
    fn sin(self) -> f64 {
        libm::sin(self)
    }
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    fn hypot(self, other: f64) -> f64 {
        libm::hypot(self, other)
    }
}
