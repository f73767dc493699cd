//! 3D Zernike polynomials on the unit ball.
//!
//! Two independent evaluation routes are kept deliberately:
//!
//! * a Cartesian route built from harmonic polynomials, safe at the
//!   origin and free of any spherical-coordinate singularity, used by the
//!   moment engines;
//! * a spherical route assembled from the radial polynomial and a
//!   spherical harmonic, used to cross-validate the Cartesian one.
//!
//! The normalization makes (3 / 4 pi) times the ball integral of
//! Z conj(Z') reproduce Kronecker deltas.

use crate::special::{binomial_u128, ln_gamma};
use crate::spherical::spherical_harmonic;
use num_complex::Complex64;

/// Radial expansion coefficient q_k,l,v of the orthonormal radial set,
/// computed in log space with the sign (-1)^{k+v} carried exactly.
///
/// R_nl(rho) = sum_v q_{k,l,v} rho^{2v + l} with 2k = n - l satisfies
/// 3 Int_0^1 R_nl R_n'l rho^2 d rho = delta_{n n'}.
pub fn zernike_radial_coeff(k: u32, l: u32, v: u32) -> f64 {
    assert!(v <= k, "v={v} exceeds k={k}");
    let sign = if (k + v) % 2 == 0 { 1.0 } else { -1.0 };
    let ln_binom = |n: u32, r: u32| -> f64 {
        ln_gamma(n as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((n - r) as f64 + 1.0)
    };
    let mut ln = -(k as f64) * 4.0f64.ln();
    ln += 0.5 * (((2 * l + 4 * k + 3) as f64) / 3.0).ln();
    ln += ln_binom(2 * k, k);
    ln += ln_binom(k, v);
    ln += ln_binom(2 * (k + l + v) + 1, 2 * k);
    ln -= ln_binom(k + l + v, k);
    sign * ln.exp()
}

/// Radial polynomial R_nl(rho). Requires n >= l with n - l even.
pub fn zernike_radial(n: u32, l: u32, rho: f64) -> f64 {
    radial_envelope(n, l, rho * rho) * rho.powi(l as i32)
}

/// The radial polynomial with its rho^l factor removed, as a polynomial
/// in rho^2: sum_v q_{k,l,v} (rho^2)^v. This is the origin-safe factor
/// the Cartesian form multiplies onto a harmonic polynomial.
pub fn radial_envelope(n: u32, l: u32, rho_sq: f64) -> f64 {
    assert!(l <= n && (n - l) % 2 == 0, "invalid radial indices n={n} l={l}");
    let k = (n - l) / 2;
    let mut acc = 0.0;
    let mut pw = 1.0;
    for v in 0..=k {
        acc += zernike_radial_coeff(k, l, v) * pw;
        pw *= rho_sq;
    }
    acc
}

/// Harmonic polynomial e_l^m(x, y, z) for m >= 0:
///
///   e_l^m = c_lm ((i x - y)/2)^m sum_u C(l,u) C(l-u, m+u)
///           (-(x^2+y^2)/4)^u z^{l-m-2u}
///
/// with c_lm = sqrt((2l+1)(l+m)!(l-m)!) / l!. Written as a genuine
/// polynomial (no division by z), so the z = 0 plane is safe. On the
/// unit sphere it reduces to 2 sqrt(pi) (-i)^m Y_l^m. Negative m uses
/// e_l^{-m} = (-1)^m conj(e_l^m).
pub fn harmonic_polynomial(l: u32, m: i32, x: f64, y: f64, z: f64) -> Complex64 {
    assert!(m.unsigned_abs() <= l, "order m={m} exceeds degree l={l}");
    if m < 0 {
        let pos = harmonic_polynomial(l, -m, x, y, z);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        return sign * pos.conj();
    }
    let m = m as u32;
    let c = ((2 * l + 1) as f64 * factorial(l + m) * factorial(l - m)).sqrt() / factorial(l);
    let prefactor = Complex64::new(-y / 2.0, x / 2.0).powu(m);

    let r2 = x * x + y * y;
    let mut sum = 0.0;
    let mut quarter_r2_pow = 1.0; // (r2/4)^u
    for u in 0..=((l - m) / 2) {
        let c1 = binomial_u128(l as u64, u as u64) as f64;
        let c2 = binomial_u128((l - u) as u64, (m + u) as u64) as f64;
        let sign = if u % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c1 * c2 * quarter_r2_pow * z.powi((l - m - 2 * u) as i32);
        quarter_r2_pow *= r2 / 4.0;
    }
    c * prefactor * sum
}

/// Zernike polynomial in Cartesian form:
/// Z_nl^m(X) = [sum_v q_{k,l,v} |X|^{2v}] e_l^m(X), 2k = n - l.
pub fn zernike_poly(n: u32, l: u32, m: i32, x: f64, y: f64, z: f64) -> Complex64 {
    let rho_sq = x * x + y * y + z * z;
    radial_envelope(n, l, rho_sq) * harmonic_polynomial(l, m, x, y, z)
}

/// Zernike polynomial assembled in spherical coordinates:
/// Z = R_nl(rho) * 2 sqrt(pi) * (-i)^m * Y_l^m(theta, phi).
///
/// Independent of [`zernike_poly`] in every factor; the two agree at
/// common points and that agreement is asserted in tests.
pub fn zernike_poly_spherical(
    n: u32,
    l: u32,
    m: i32,
    rho: f64,
    theta: f64,
    phi: f64,
) -> Complex64 {
    let radial = zernike_radial(n, l, rho);
    let scale = 2.0 * std::f64::consts::PI.sqrt();
    radial * scale * neg_i_pow(m) * spherical_harmonic(l, m, theta, phi)
}

/// (-i)^m for any integer m, exact.
fn neg_i_pow(m: i32) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|v| v as f64).product()
}
