//! Scalar helpers that work without `std`.

use core::f64::consts::{PI, TAU};

pub use num_complex::Complex64 as C64;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn sqrt(v: f64) -> f64 {
    libm::sqrt(v)
}

#[inline]
pub fn exp(v: f64) -> f64 {
    libm::exp(v)
}

#[inline]
pub fn ln(v: f64) -> f64 {
    libm::log(v)
}

#[inline]
pub fn powi(v: f64, n: i32) -> f64 {
    libm::pow(v, n as f64)
}

#[inline]
pub fn powf(v: f64, p: f64) -> f64 {
    libm::pow(v, p)
}

#[inline]
pub fn cos(v: f64) -> f64 {
    libm::cos(v)
}

#[inline]
pub fn sin(v: f64) -> f64 {
    libm::sin(v)
}

#[inline]
pub fn tan(v: f64) -> f64 {
    libm::tan(v)
}

#[inline]
pub fn floor(v: f64) -> f64 {
    libm::floor(v)
}

#[inline]
pub fn round(v: f64) -> f64 {
    libm::round(v)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(libm::cos(theta), libm::sin(theta))
}

/// Reduces an angle to `[0, m)`.
#[inline]
pub fn wrap(theta: f64, m: f64) -> f64 {
    let r = theta - m * libm::floor(theta / m);
    if r >= m {
        0.0
    } else {
        r
    }
}

/// Reduces an angle to `(-π, π]`.
#[inline]
pub fn wrap_pi(theta: f64) -> f64 {
    let r = wrap(theta + PI, TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Distance between two angles modulo `m`.
#[inline]
pub fn angle_dist(a: f64, b: f64, m: f64) -> f64 {
    let d = wrap(a - b, m);
    d.min(m - d)
}

/// Integer power of a complex number by repeated squaring.
pub fn cpowi(z: C64, n: u32) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let mut base = z;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, 10 points.
pub const GL10: [(f64, f64); 10] = [
    (0.013046735741414128, 0.033335672154344034),
    (0.06746831665550773, 0.07472567457529018),
    (0.16029521585048778, 0.109543181257991),
    (0.2833023029353764, 0.13463335965499826),
    (0.4255628305091844, 0.1477621123573765),
    (0.5744371694908156, 0.1477621123573765),
    (0.7166976970646236, 0.13463335965499826),
    (0.8397047841495122, 0.109543181257991),
    (0.9325316833444923, 0.07472567457529018),
    (0.9869532642585859, 0.033335672154344034),
];
