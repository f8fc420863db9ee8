//! Poincaré disk model (curvature -1, a CAT(0) space).
//!
//! Points are complex numbers of modulus < 1. Geodesics are computed by
//! Möbius-translating one endpoint to the origin, where geodesics through 0
//! are Euclidean radii and hyperbolic arclength along a radius is
//! `2 * atanh(r)`.

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::float::FloatExt;

/// Points whose norm reaches `1 - BOUNDARY_MARGIN` are rejected: `atanh`
/// loses all precision against the ideal boundary.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// Minimal complex arithmetic; only what the Möbius maps below need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cpx {
    pub re: f64,
    pub im: f64,
}

impl Cpx {
    pub const ZERO: Cpx = Cpx { re: 0.0, im: 0.0 };
    pub const ONE: Cpx = Cpx { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Cpx { re, im }
    }

    pub fn conj(self) -> Self {
        Cpx::new(self.re, -self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        Cpx::new(self.re * s, self.im * s)
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl core::ops::Add for Cpx {
    type Output = Cpx;
    fn add(self, o: Cpx) -> Cpx {
        Cpx::new(self.re + o.re, self.im + o.im)
    }
}

impl core::ops::Sub for Cpx {
    type Output = Cpx;
    fn sub(self, o: Cpx) -> Cpx {
        Cpx::new(self.re - o.re, self.im - o.im)
    }
}

impl core::ops::Mul for Cpx {
    type Output = Cpx;
    fn mul(self, o: Cpx) -> Cpx {
        Cpx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl core::ops::Div for Cpx {
    type Output = Cpx;
    fn div(self, o: Cpx) -> Cpx {
        let d = o.re * o.re + o.im * o.im;
        Cpx::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

/// Möbius automorphism sending `a` to the origin: z -> (z - a) / (1 - conj(a) z).
pub fn to_origin(a: Cpx, z: Cpx) -> Cpx {
    (z - a) / (Cpx::ONE - a.conj() * z)
}

/// Inverse of [`to_origin`]: w -> (w + a) / (1 + conj(a) w).
pub fn from_origin(a: Cpx, w: Cpx) -> Cpx {
    (w + a) / (Cpx::ONE + a.conj() * w)
}

/// Hyperbolic distance d(x, y) = 2 atanh |(x - y) / (1 - conj(x) y)|.
pub fn distance(x: Cpx, y: Cpx) -> f64 {
    let num = (x - y).abs();
    let den = (Cpx::ONE - x.conj() * y).abs();
    2.0 * (num / den).atanh()
}

/// Point at hyperbolic distance `dist` from the origin in direction `dir`
/// (unit complex number).
fn radial(dir: Cpx, dist: f64) -> Cpx {
    dir.scale((dist / 2.0).tanh())
}

/// Geodesic point at distance `(1 - t) * d(x, y)` from `x` toward `y`.
///
/// Möbius-translate `x` to the origin, walk the now-radial geodesic, map back.
pub fn combine(x: Cpx, y: Cpx, t: f64) -> Cpx {
    if t == 1.0 || x == y {
        return x;
    }
    if t == 0.0 {
        return y;
    }
    let w = to_origin(x, y);
    let s = w.abs();
    if s == 0.0 {
        return x;
    }
    let total = 2.0 * s.atanh();
    let target = (1.0 - t) * total;
    from_origin(x, radial(w.scale(1.0 / s), target))
}

/// Point at hyperbolic distance `dist` from `from` along the geodesic ray
/// through `via`. Hyperbolic rays never leave the open disk, so any
/// nonnegative `dist` is admissible.
pub fn extend(from: Cpx, via: Cpx, dist: f64) -> Option<Cpx> {
    let w = to_origin(from, via);
    let s = w.abs();
    if s == 0.0 {
        return None;
    }
    Some(from_origin(from, radial(w.scale(1.0 / s), dist)))
}
