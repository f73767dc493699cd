//! Legendre and associated Legendre polynomials on [-1, 1].

use crate::special::binomial_u128;

/// Legendre polynomial L_s(a) by the three-term Bonnet recurrence.
///
/// The recurrence is numerically stable on [-1, 1]; the explicit
/// coefficient sum [`legendre_explicit`] serves as an independent
/// cross-check for low orders.
pub fn legendre(s: u32, a: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&a));
    match s {
        0 => 1.0,
        1 => a,
        _ => {
            let mut prev = 1.0;
            let mut cur = a;
            for k in 1..s {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0) * a * cur - kf * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Legendre polynomial by its explicit alternating coefficient sum:
/// L_s(a) = 2^{-s} sum_k (-1)^k C(s,k) C(2s-2k,s) a^{s-2k}.
///
/// Exact binomials keep this reliable for s <= 10, which is all the
/// cross-validation needs; prefer [`legendre`] elsewhere.
pub fn legendre_explicit(s: u32, a: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..=(s / 2) {
        let c1 = binomial_u128(s as u64, k as u64) as f64;
        let c2 = binomial_u128((2 * s - 2 * k) as u64, s as u64) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c1 * c2 * a.powi((s - 2 * k) as i32);
    }
    sum / 2f64.powi(s as i32)
}

/// Associated Legendre function P_l^m(a) for 0 <= m <= l, including the
/// (-1)^m Condon-Shortley factor.
///
/// Standard construction: closed form for P_m^m, one step up to
/// P_{m+1}^m, then the degree recurrence.
pub fn assoc_legendre(l: u32, m: u32, a: f64) -> f64 {
    debug_assert!(m <= l);
    debug_assert!((-1.0..=1.0).contains(&a));

    // P_m^m = (-1)^m (2m-1)!! (1-a^2)^{m/2}
    let somx2 = ((1.0 - a) * (1.0 + a)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }

    // P_{m+1}^m = a (2m+1) P_m^m
    let mut pmmp1 = a * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }

    // (l-m) P_l^m = a (2l-1) P_{l-1}^m - (l+m-1) P_{l-2}^m
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        pll = (a * (2.0 * llf - 1.0) * pmmp1 - (llf + mf - 1.0) * pmm) / (llf - mf);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}
