//! Discrete Hahn polynomial apparatus on the lattice a = 0..n-1.
//!
//! The direct terminating-sum evaluation is the reference path. Its inner
//! alternating series is accumulated in double-double precision because the
//! terms grow to ~1e8 times the final value at n = 64 before cancelling;
//! plain f64 summation visibly destroys orthogonality from n = 32 up.
//! Scale factors (falling-factorial prefactors, weights, norms) carry no
//! cancellation and live in sign/log-magnitude space instead.
//!
//! Two deliberate consistency decisions, both enforced by tests:
//!
//! * The square norm d_s^2 is defined by the brute-force weighted sum
//!   over the lattice. The closed-form expression for it that this
//!   apparatus historically shipped with disagrees with the direct sum
//!   (see `norm_sq_log_closed_form`); the brute-force value is the one
//!   that makes the normalized basis orthonormal, so it is authoritative
//!   and the closed form is kept only as a logged diagnostic.
//! * The orthogonality weight is order-independent. The order-shifted
//!   weight variant (`weight_log` with s > 0, whose gamma pole truncates
//!   the lattice) breaks cross-order orthogonality and is retained only
//!   for diagnostics; normalization always uses the s = 0 row.

use crate::special::{ln_gamma, log_sum_exp, Dd, SignLog};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HahnError {
    #[error("shape parameters must satisfy mu > -1 and nu > -1 (got mu={mu}, nu={nu})")]
    InvalidShape { mu: f64, nu: f64 },
    #[error("lattice size must be at least 2 (got {n})")]
    LatticeTooSmall { n: usize },
    #[error("order {s} exceeds maximum order {max} for this lattice")]
    OrderOutOfRange { s: usize, max: usize },
    #[error("lattice site {a} outside 0..{n}")]
    SiteOutOfRange { a: usize, n: usize },
    #[error("weighting function undefined at (s={s}, a={a}): gamma pole")]
    WeightPole { s: usize, a: usize },
}

/// Shape parameters and lattice size of a Hahn basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HahnParams {
    mu: f64,
    nu: f64,
    n: usize,
}

impl HahnParams {
    pub fn new(mu: f64, nu: f64, n: usize) -> Result<Self, HahnError> {
        if !(mu > -1.0) || !(nu > -1.0) || !mu.is_finite() || !nu.is_finite() {
            return Err(HahnError::InvalidShape { mu, nu });
        }
        if n < 2 {
            return Err(HahnError::LatticeTooSmall { n });
        }
        Ok(HahnParams { mu, nu, n })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_order(&self, s: usize) -> Result<(), HahnError> {
        if s >= self.n {
            Err(HahnError::OrderOutOfRange { s, max: self.n - 1 })
        } else {
            Ok(())
        }
    }

    fn check_site(&self, a: usize) -> Result<(), HahnError> {
        if a >= self.n {
            Err(HahnError::SiteOutOfRange { a, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// Log of the order-shifted weighting function
/// rho_s(a) = 1 / (a! G(a+mu+1) G(n+nu-a) G(n-s-a)).
///
/// For s > 0 the last gamma factor hits a pole once a > n-s-1; those
/// cells are reported as out-of-domain. Orthogonality and normalization
/// never consult this variant beyond s = 0; see
/// [`orthogonality_weight_log`].
pub fn weight_log(params: &HahnParams, s: usize, a: usize) -> Result<f64, HahnError> {
    params.check_order(s)?;
    params.check_site(a)?;
    let n = params.n as f64;
    let af = a as f64;
    let tail = n - s as f64 - af;
    if tail <= 0.0 {
        return Err(HahnError::WeightPole { s, a });
    }
    Ok(-(ln_gamma(af + 1.0)
        + ln_gamma(af + params.mu + 1.0)
        + ln_gamma(n + params.nu - af)
        + ln_gamma(tail)))
}

/// Log of the order-independent orthogonality weight
/// rho(a) = 1 / (a! G(a+mu+1) G(n+nu-a) G(n-a)), defined on the whole
/// lattice. This is the weight under which the polynomials of different
/// orders are mutually orthogonal, and the one normalization uses.
pub fn orthogonality_weight_log(params: &HahnParams, a: usize) -> f64 {
    weight_log(params, 0, a).expect("s = 0 weight has no pole on the lattice")
}

/// The weight rebuilt from its seed value and site-to-site ratio
/// recurrence: rho(0) = 1/(G(mu+1) G(n+nu) G(n-s)) and
/// rho(a) = (n-a)(n+nu-a) / (a (a+mu)) rho(a-1).
///
/// Used as a cross-check of the gamma form; the ratio matches the
/// order-shifted weight only at s = 0, which the tests document.
pub fn weight_log_via_recurrence(params: &HahnParams, s: usize, a: usize) -> Result<f64, HahnError> {
    params.check_order(s)?;
    params.check_site(a)?;
    let n = params.n as f64;
    let mut ln = -(ln_gamma(params.mu + 1.0) + ln_gamma(n + params.nu) + ln_gamma(n - s as f64));
    for j in 1..=a {
        let jf = j as f64;
        ln += ((n - jf) * (n + params.nu - jf)).ln();
        ln -= (jf * (jf + params.mu)).ln();
    }
    Ok(ln)
}

/// Direct evaluation of the (unnormalized) Hahn polynomial h_s(a) in
/// sign/log-magnitude form.
///
/// The terminating series runs to k = min(s, a); consecutive terms are
/// related by an exact rational ratio, so the alternating sum is walked
/// with a double-double accumulator instead of assembling each term from
/// log-gamma values (which would re-round every term and lose the
/// cancellation battle).
pub fn direct_sign_log(params: &HahnParams, s: usize, a: usize) -> Result<SignLog, HahnError> {
    params.check_order(s)?;
    params.check_site(a)?;
    let n = params.n as f64;
    let (mu, nu) = (params.mu, params.nu);
    let sf = s as f64;
    let af = a as f64;

    // sum_k of T_k with T_0 = 1 and
    // T_k / T_{k-1} = -(k-1-s)(k-1-a)(c-k+1) / ((d-k+1)(e-k+1) k),
    // c = 2n+mu+nu-s-1, d = n+nu-1, e = n-1.
    let c = 2.0 * n + mu + nu - sf - 1.0;
    let d = n + nu - 1.0;
    let e = n - 1.0;
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 1..=s.min(a) {
        let kf = k as f64;
        let num = -((kf - 1.0 - sf) * (kf - 1.0 - af) * (c - kf + 1.0));
        let den = (d - kf + 1.0) * (e - kf + 1.0) * kf;
        term = term.mul_f64(num).div_f64(den);
        sum = sum.add(term);
    }

    // Falling-factorial prefactor (n+nu-1)(n+nu-2)...(n+nu-s) times
    // (n-1)(n-2)...(n-s); every factor is positive for s <= n-1.
    let mut prefactor_ln = 0.0;
    for j in 0..s {
        let jf = j as f64;
        prefactor_ln += (n + nu - 1.0 - jf).ln() + (n - 1.0 - jf).ln();
    }

    Ok(SignLog::from_value(sum.to_f64()).mul(SignLog::from_ln(prefactor_ln)))
}

/// Direct Hahn polynomial value as a plain f64. Magnitudes grow
/// factorially with s, so prefer [`direct_sign_log`] when composing
/// further products; this plain form is for low-order inspection and tests.
pub fn direct(params: &HahnParams, s: usize, a: usize) -> Result<f64, HahnError> {
    Ok(direct_sign_log(params, s, a)?.to_f64())
}

/// Log of the square norm d_s^2 = sum_a h_s(a)^2 rho(a), computed by
/// brute force over the lattice. This value is authoritative: it is the
/// constant that makes the normalized basis row have unit norm under the
/// orthogonality weight.
pub fn norm_sq_log(params: &HahnParams, s: usize) -> Result<f64, HahnError> {
    params.check_order(s)?;
    let terms: Vec<f64> = (0..params.n)
        .map(|a| {
            let h = direct_sign_log(params, s, a).expect("validated range");
            2.0 * h.ln_abs + orthogonality_weight_log(params, a)
        })
        .collect();
    Ok(log_sum_exp(&terms))
}

/// The closed-form square-norm expression this basis is usually quoted
/// with:
///
///   d_s^2 = G(2n+mu+nu-s) / (G(2n+mu+nu-2s-1) G(n+mu+nu-s))
///           * 1 / (s! G(n+mu-s) G(n+nu-s) G(n-s))
///
/// Returns None when a gamma argument leaves the positive domain. It
/// does NOT agree with the brute-force norm (for example it yields
/// 7/1296 where the lattice sum gives 5/9); it is exposed only so the
/// disagreement can be logged and inspected.
pub fn norm_sq_log_closed_form(params: &HahnParams, s: usize) -> Option<f64> {
    if s >= params.n {
        return None;
    }
    let n = params.n as f64;
    let (mu, nu) = (params.mu, params.nu);
    let sf = s as f64;
    let args = [
        2.0 * n + mu + nu - sf,
        2.0 * n + mu + nu - 2.0 * sf - 1.0,
        n + mu + nu - sf,
        sf + 1.0,
        n + mu - sf,
        n + nu - sf,
        n - sf,
    ];
    if args.iter().any(|&x| x <= 0.0) {
        return None;
    }
    Some(
        ln_gamma(args[0]) - ln_gamma(args[1]) - ln_gamma(args[2]) - ln_gamma(args[3])
            - ln_gamma(args[4])
            - ln_gamma(args[5])
            - ln_gamma(args[6]),
    )
}

/// Normalized Hahn polynomial h~_s(a) = h_s(a) sqrt(rho(a) / d_s^2).
///
/// Recomputes the row norm on every call; batch consumers should build a
/// [`HahnBasisTable`] instead.
pub fn normalized(params: &HahnParams, s: usize, a: usize) -> Result<f64, HahnError> {
    let h = direct_sign_log(params, s, a)?;
    let d_log = norm_sq_log(params, s)?;
    let w = orthogonality_weight_log(params, a);
    Ok(h.sign * (h.ln_abs + 0.5 * (w - d_log)).exp())
}

/// Outcome of comparing the printed-coefficient three-term recurrence
/// against the direct path for one lattice cell.
#[derive(Clone, Copy, Debug)]
pub struct RecurrenceCell {
    pub s: usize,
    pub a: usize,
    pub recurrence: f64,
    pub direct: f64,
}

/// Full comparison of the recurrence fast path against the direct path.
#[derive(Clone, Debug, Default)]
pub struct RecurrenceReport {
    /// False when the B coefficient is singular (|mu| == |nu| makes its
    /// denominator vanish); the path is then skipped entirely and every
    /// value comes from the direct sum.
    pub enabled: bool,
    /// Cells where the recurrence reproduces the direct value to 1e-9
    /// (absolute, on the unit-normalized scale). Only these would ever
    /// be eligible to serve from the fast path.
    pub retained: Vec<RecurrenceCell>,
    /// Cells where it does not; the table serves the direct value.
    pub fallback: Vec<RecurrenceCell>,
    /// How many fallback cells missed even the loose 1e-6 validation
    /// bound, i.e. were rejected outright rather than borderline.
    pub beyond_validation: usize,
}

const RECURRENCE_RETAIN_TOL: f64 = 1e-9;
const RECURRENCE_VALIDATE_TOL: f64 = 1e-6;

/// Run the three-term recurrence with its published coefficients
///
///   A = -s (2n+mu+nu-s) / ((2n+mu+nu-2s-1)(2n+mu+nu-2s))
///   B = a - (2(n-1)+nu-mu) / (4 (mu^2-nu^2)(2n+mu+nu))
///   C = (n-s+1)(n-s+mu+1)(n-s+nu+1)(n-s+mu+nu+1)
///       / ((2n+mu+nu-2s+2)(2n+mu+nu-2s+1))
///
/// seeded by the closed zeroth/first-order rows, and compare every cell
/// against the direct path. The B coefficient above is not a consistent
/// transformation of the underlying polynomial recurrence (its second
/// term is not even scale-homogeneous with `a`, and it divides by
/// mu^2 - nu^2), so in practice only the seed rows validate; the report
/// makes that measurable instead of hiding it.
pub fn recurrence_report(params: &HahnParams, max_order: usize) -> Result<RecurrenceReport, HahnError> {
    params.check_order(max_order)?;
    let n_sites = params.n;
    let rows = normalized_rows(params, max_order)?;

    let mut report = RecurrenceReport::default();
    let singular = params.mu * params.mu == params.nu * params.nu;
    report.enabled = !singular;
    if singular {
        return Ok(report);
    }

    let n = params.n as f64;
    let (mu, nu) = (params.mu, params.nu);
    let w = &rows.weight_log;

    // Recurrence-propagated rows, seeded from the closed low-order forms.
    let mut rec: Vec<Vec<f64>> = Vec::with_capacity(max_order + 1);
    for s in 0..=max_order.min(1) {
        let d_log = rows.norm_sq_log[s];
        let row = (0..n_sites)
            .map(|a| {
                let af = a as f64;
                let bracket = if s == 0 {
                    1.0
                } else {
                    (n + nu - 1.0) * (n - 1.0) - (2.0 * n + mu + nu - 2.0) * af
                };
                bracket * (0.5 * (w[a] - d_log)).exp()
            })
            .collect();
        rec.push(row);
    }
    for s in 2..=max_order {
        let sf = s as f64;
        let big = 2.0 * n + mu + nu;
        let a_coeff = -sf * (big - sf) / ((big - 2.0 * sf - 1.0) * (big - 2.0 * sf));
        let c_coeff = ((n - sf + 1.0) * (n - sf + mu + 1.0) / (big - 2.0 * sf + 2.0))
            * ((n - sf + nu + 1.0) * (n - sf + mu + nu + 1.0) / (big - 2.0 * sf + 1.0));
        let b_shift = (2.0 * (n - 1.0) + nu - mu) / (4.0 * (mu * mu - nu * nu) * big);
        let r1 = (0.5 * (rows.norm_sq_log[s - 1] - rows.norm_sq_log[s])).exp();
        let r2 = (0.5 * (rows.norm_sq_log[s - 2] - rows.norm_sq_log[s])).exp();
        let row: Vec<f64> = (0..n_sites)
            .map(|a| {
                let b_coeff = a as f64 - b_shift;
                (b_coeff * r1 * rec[s - 1][a] + c_coeff * r2 * rec[s - 2][a]) / a_coeff
            })
            .collect();
        rec.push(row);
    }

    for s in 0..=max_order {
        for a in 0..n_sites {
            let cell = RecurrenceCell {
                s,
                a,
                recurrence: rec[s][a],
                direct: rows.values[s * n_sites + a],
            };
            let dev = (cell.recurrence - cell.direct).abs();
            let scale = cell.direct.abs().max(1.0);
            if cell.recurrence.is_finite() && dev <= RECURRENCE_RETAIN_TOL * scale {
                report.retained.push(cell);
            } else {
                if !(cell.recurrence.is_finite() && dev <= RECURRENCE_VALIDATE_TOL * scale) {
                    report.beyond_validation += 1;
                }
                report.fallback.push(cell);
            }
        }
    }
    Ok(report)
}

struct NormalizedRows {
    values: Vec<f64>,
    weight_log: Vec<f64>,
    norm_sq_log: Vec<f64>,
}

fn normalized_rows(params: &HahnParams, max_order: usize) -> Result<NormalizedRows, HahnError> {
    params.check_order(max_order)?;
    let n = params.n;
    let weight_log: Vec<f64> = (0..n).map(|a| orthogonality_weight_log(params, a)).collect();
    let mut values = vec![0.0; (max_order + 1) * n];
    let mut norm_sq_log = Vec::with_capacity(max_order + 1);
    let mut row_sl = Vec::with_capacity(n);
    for s in 0..=max_order {
        row_sl.clear();
        for a in 0..n {
            row_sl.push(direct_sign_log(params, s, a)?);
        }
        let terms: Vec<f64> = row_sl
            .iter()
            .zip(&weight_log)
            .map(|(h, w)| 2.0 * h.ln_abs + w)
            .collect();
        let d_log = log_sum_exp(&terms);
        norm_sq_log.push(d_log);
        for (a, h) in row_sl.iter().enumerate() {
            values[s * n + a] = h.sign * (h.ln_abs + 0.5 * (weight_log[a] - d_log)).exp();
        }
    }
    Ok(NormalizedRows {
        values,
        weight_log,
        norm_sq_log,
    })
}

/// Diagnostics gathered while building a [`HahnBasisTable`].
#[derive(Clone, Debug, Default)]
pub struct TableDiagnostics {
    /// Whether the recurrence fast path was attempted (false at singular
    /// parameters, where it cannot even be evaluated).
    pub recurrence_attempted: bool,
    /// Cells whose recurrence value matched the direct path closely
    /// enough to retain.
    pub recurrence_retained_cells: usize,
    /// Cells served from the direct path after the comparison.
    pub recurrence_fallback_cells: usize,
    /// Largest |log d_s^2 (closed form) - log d_s^2 (brute force)| over
    /// the orders where the closed form is defined, if any. A large value
    /// here is expected; it documents why brute force is authoritative.
    pub closed_form_norm_max_log_dev: Option<f64>,
}

/// Immutable table of normalized Hahn polynomial values h~_s(a) for
/// s = 0..=max_order over the whole lattice, plus the weights and norms
/// that produced them.
///
/// Every stored value comes from the direct evaluation path; the
/// recurrence comparison runs during construction purely to populate the
/// diagnostics. Rows satisfy sum_a h~_p(a) h~_q(a) = delta_pq to well
/// below 1e-8, which the test suite enforces across lattice sizes.
#[derive(Clone, Debug)]
pub struct HahnBasisTable {
    params: HahnParams,
    max_order: usize,
    values: Vec<f64>,
    weight_log: Vec<f64>,
    norm_sq_log: Vec<f64>,
    diagnostics: TableDiagnostics,
}

impl HahnBasisTable {
    pub fn build(params: HahnParams, max_order: usize) -> Result<Self, HahnError> {
        let rows = normalized_rows(&params, max_order)?;
        for (i, v) in rows.values.iter().enumerate() {
            if !v.is_finite() {
                // Cannot happen for validated parameters; fail loudly
                // rather than poison downstream sums.
                panic!(
                    "non-finite basis value at s={}, a={} for {:?}",
                    i / params.n,
                    i % params.n,
                    params
                );
            }
        }

        let report = recurrence_report(&params, max_order)?;
        let closed_dev = (0..=max_order)
            .filter_map(|s| {
                norm_sq_log_closed_form(&params, s).map(|cf| (cf - rows.norm_sq_log[s]).abs())
            })
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |m| m.max(d))));

        Ok(HahnBasisTable {
            params,
            max_order,
            values: rows.values,
            weight_log: rows.weight_log,
            norm_sq_log: rows.norm_sq_log,
            diagnostics: TableDiagnostics {
                recurrence_attempted: report.enabled,
                recurrence_retained_cells: report.retained.len(),
                recurrence_fallback_cells: report.fallback.len(),
                closed_form_norm_max_log_dev: closed_dev,
            },
        })
    }

    pub fn params(&self) -> &HahnParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Normalized value h~_s(a).
    pub fn value(&self, s: usize, a: usize) -> f64 {
        assert!(s <= self.max_order && a < self.params.n);
        self.values[s * self.params.n + a]
    }

    /// One full lattice row of order s.
    pub fn row(&self, s: usize) -> &[f64] {
        assert!(s <= self.max_order);
        &self.values[s * self.params.n..(s + 1) * self.params.n]
    }

    pub fn weight_log(&self, a: usize) -> f64 {
        self.weight_log[a]
    }

    pub fn norm_sq_log(&self, s: usize) -> f64 {
        self.norm_sq_log[s]
    }

    pub fn diagnostics(&self) -> &TableDiagnostics {
        &self.diagnostics
    }
}
