//! Complex spherical harmonics, orthonormal over the unit sphere.

use crate::legendre::assoc_legendre;
use num_complex::Complex64;

fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|v| v as f64).product()
}

/// Orthonormal spherical harmonic Y_l^m(theta, phi):
///
///   Y_l^m = sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!) * P_l^m(cos theta) * exp(i m phi)
///
/// for m >= 0, with the Condon-Shortley phase carried by `assoc_legendre`.
/// Negative orders come from the conjugation identity
/// Y_l^{-m} = (-1)^m conj(Y_l^m), applied at the basis level so that the
/// identity is exact in floating point.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    debug_assert!(m.unsigned_abs() <= l);
    if m < 0 {
        let pos = spherical_harmonic(l, -m, theta, phi);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        return sign * pos.conj();
    }
    let m = m as u32;
    let norm = ((2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI) * factorial(l - m)
        / factorial(l + m))
    .sqrt();
    let plm = assoc_legendre(l, m, theta.cos());
    let phase = Complex64::new(0.0, m as f64 * phi).exp();
    norm * plm * phase
}
