//! Scalar numeric helpers shared by the polynomial bases: log-gamma,
//! sign/log-magnitude arithmetic, double-double accumulation, and a stable
//! log-sum-exp.
//!
//! Everything here is deliberately small and self-contained. The moment
//! engines push factorial-scale magnitudes through alternating sums, so the
//! building blocks below are written for predictable error bounds rather
//! than raw speed.

/// Lanczos coefficients (g = 7, 9 terms). Accurate to roughly 1e-15
/// relative error over the positive real axis.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive arguments.
///
/// Returns NaN for `x <= 0`; the callers in this crate only ever form
/// gamma arguments that are strictly positive, so a pole is a logic error
/// surfaced as NaN rather than a panic.
pub fn ln_gamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x < 0.5 {
        // Reflection keeps the Lanczos series in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// A real number stored as a sign and the log of its magnitude, so that
/// products of factorial-scale factors never overflow.
///
/// `sign` is -1.0, 0.0 or +1.0. A zero value carries `ln_abs == -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignLog {
    pub const ZERO: SignLog = SignLog {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_value(v: f64) -> SignLog {
        if v == 0.0 {
            SignLog::ZERO
        } else {
            SignLog {
                sign: v.signum(),
                ln_abs: v.abs().ln(),
            }
        }
    }

    /// Positive number given directly in log space.
    pub fn from_ln(ln_abs: f64) -> SignLog {
        SignLog { sign: 1.0, ln_abs }
    }

    pub fn mul(self, other: SignLog) -> SignLog {
        if self.sign == 0.0 || other.sign == 0.0 {
            return SignLog::ZERO;
        }
        SignLog {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// Pochhammer (rising factorial) in sign/log form:
/// `(alpha)_k = alpha (alpha+1) ... (alpha+k-1)`.
///
/// Handles negative and zero factors exactly: a zero factor yields the
/// zero `SignLog`.
pub fn pochhammer_log(alpha: f64, k: u32) -> SignLog {
    let mut sign = 1.0f64;
    let mut ln_abs = 0.0f64;
    for j in 0..k {
        let f = alpha + j as f64;
        if f == 0.0 {
            return SignLog::ZERO;
        }
        sign *= f.signum();
        ln_abs += f.abs().ln();
    }
    SignLog { sign, ln_abs }
}

/// Exact binomial coefficient. Intermediate products stay integral by
/// dividing as each factor is folded in; callers stay well inside u128
/// range (largest use here is around C(35, 17)).
pub(crate) fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

/// `ln(sum(exp(x)))` over a slice, tolerant of `-inf` entries.
/// Returns `-inf` for an empty slice or when every entry is `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + s.ln()
}

/// Double-double value: an unevaluated sum `hi + lo` with `|lo|` at most
/// half an ulp of `hi`, giving roughly 32 significant decimal digits.
///
/// Only the handful of operations the alternating-series summation needs
/// are implemented: addition, and multiplication/division by f64.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    debug_assert!(a == 0.0 || a.abs() >= b.abs() || a.is_nan() || b.is_nan());
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[allow(dead_code)] // test-support constructor
    pub fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e + self.lo - p2;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}
