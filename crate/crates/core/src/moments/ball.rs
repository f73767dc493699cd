//! Engines for the ball-indexed families: complex and Zernike moments.
//!
//! Both families live on the unit ball inscribed in the grid cube. Voxel
//! centres map to `u_i = (2i + 1 - n) / n` per axis; centres with
//! `|u| > 1` carry no basis value, so their mass is skipped and reported
//! through [`MomentSet::discarded_mass_fraction`]. Negative azimuthal
//! orders are derived from the positive ones through the conjugation
//! identity of the underlying basis, which keeps the symmetry
//! `c_{s,l,-m} = (-1)^m conj(c_{s,l,m})` exact in floating point for real
//! fields.

use num_complex::Complex64;

use crate::legendre::assoc_legendre;
use crate::voxel::VoxelGrid;
use crate::zernike::{harmonic_polynomial, radial_envelope};

use super::{spherical_indices, GridMeta, MomentFamily, MomentIndex, MomentSet};

const Y00: f64 = 0.28209479177387814; // 1 / sqrt(4 pi)

/// Slots for the non-negative-m accumulators, in the same relative order as
/// the canonical enumeration.
fn nonneg_slots(max_order: u32) -> Vec<(u32, u32, u32)> {
    let mut slots = Vec::new();
    for s in 0..=max_order {
        let mut l = s % 2;
        while l <= s {
            for m in 0..=l {
                slots.push((s, l, m));
            }
            l += 2;
        }
    }
    slots
}

/// Expand non-negative-m accumulators into the canonical full-m entry list.
/// `acc` must be ordered like [`nonneg_slots`].
fn emit_entries(
    max_order: u32,
    slots: &[(u32, u32, u32)],
    acc: &[Complex64],
    scale: f64,
) -> Vec<(MomentIndex, Complex64)> {
    let slot_of = |s: u32, l: u32, m: u32| -> usize {
        slots
            .iter()
            .position(|&t| t == (s, l, m))
            .expect("slot enumeration covers every admissible index")
    };
    spherical_indices(max_order)
        .into_iter()
        .map(|idx| {
            let MomentIndex::Spherical { s, l, m } = idx else {
                unreachable!()
            };
            let base = acc[slot_of(s, l, m.unsigned_abs())] * scale;
            let value = if m >= 0 {
                base
            } else if m % 2 == 0 {
                base.conj()
            } else {
                -base.conj()
            };
            (idx, value)
        })
        .collect()
}

struct BallWalk {
    acc: Vec<Complex64>,
    mass_inside: f64,
    mass_outside: f64,
}

/// Walk every non-empty voxel, classify it against the inscribed ball, and
/// hand inside voxels to `visit(slot accumulator, u, rho_sq, f)`.
fn walk_ball<F>(grid: &VoxelGrid, slots: usize, mut visit: F) -> BallWalk
where
    F: FnMut(&mut [Complex64], [f64; 3], f64, f64),
{
    let n = grid.n() as f64;
    let mut state = BallWalk {
        acc: vec![Complex64::new(0.0, 0.0); slots],
        mass_inside: 0.0,
        mass_outside: 0.0,
    };
    for (x, y, z, f) in grid.iter() {
        if f == 0.0 {
            continue;
        }
        let u = [
            (2.0 * x as f64 + 1.0 - n) / n,
            (2.0 * y as f64 + 1.0 - n) / n,
            (2.0 * z as f64 + 1.0 - n) / n,
        ];
        let rho_sq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        if rho_sq > 1.0 {
            state.mass_outside += f;
            continue;
        }
        state.mass_inside += f;
        visit(&mut state.acc, u, rho_sq, f);
    }
    state
}

fn discarded_fraction(state: &BallWalk) -> f64 {
    let total = state.mass_inside + state.mass_outside;
    if total > 0.0 {
        state.mass_outside / total
    } else {
        0.0
    }
}

/// Complex moments of the grid: projections onto `rho^s Y_l^m` over the
/// inscribed unit ball.
///
/// Each inside voxel contributes `rho^s Y_l^m(theta, phi) f dV` with
/// `dV = (2/n)^3`; the harmonic is *not* conjugated, matching the raw-moment
/// convention of the geometric family. Admissible indices pair `l <= s` with
/// `l` of the same parity as `s`.
pub fn complex_moments(grid: &VoxelGrid, max_order: u32) -> MomentSet {
    let slots = nonneg_slots(max_order);
    let lmax = max_order;
    // Per-(l, m) orthonormalization constants, shared across voxels.
    let norm: Vec<f64> = slots
        .iter()
        .map(|&(_, l, m)| {
            let num: f64 = (1..=(l - m)).map(|v| v as f64).product();
            let den: f64 = (1..=(l + m)).map(|v| v as f64).product();
            ((2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI) * num / den).sqrt()
        })
        .collect();

    let state = walk_ball(grid, slots.len(), |acc, u, rho_sq, f| {
        let rho = rho_sq.sqrt();
        if rho == 0.0 {
            // The centre voxel has no defined direction; every basis value
            // with s > 0 vanishes there and only rho^0 Y_0^0 survives.
            acc[0] += f * Y00;
            return;
        }
        let ct = u[2] / rho;
        let phi = u[1].atan2(u[0]);
        let mut rho_pow = vec![1.0f64; max_order as usize + 1];
        for s in 1..=max_order as usize {
            rho_pow[s] = rho_pow[s - 1] * rho;
        }
        // Associated Legendre values and azimuthal phases, one per (l, m).
        let mut plm = vec![0.0f64; slots.len()];
        let mut phase = vec![Complex64::new(1.0, 0.0); lmax as usize + 1];
        for m in 0..=lmax {
            let mf = m as f64;
            phase[m as usize] = Complex64::new((mf * phi).cos(), (mf * phi).sin());
        }
        for (k, &(_, l, m)) in slots.iter().enumerate() {
            plm[k] = assoc_legendre(l, m, ct);
        }
        for (k, &(s, _, m)) in slots.iter().enumerate() {
            let y = norm[k] * plm[k] * phase[m as usize];
            acc[k] += rho_pow[s as usize] * y * f;
        }
    });

    let dv = (2.0 / grid.n() as f64).powi(3);
    MomentSet {
        family: MomentFamily::Complex,
        max_order,
        entries: emit_entries(max_order, &slots, &state.acc, dv),
        grid: GridMeta::of(grid),
        discarded_mass_fraction: discarded_fraction(&state),
    }
}

/// Zernike moments of the grid: orthogonal projections onto the ball
/// polynomials `Z_s,l^m`.
///
/// Each inside voxel contributes `conj(Z) f dV` and the set carries the
/// `3 / (4 pi)` normalization, so a field equal to a single basis polynomial
/// yields (up to discretization error) a coefficient of one at that index
/// and zero elsewhere.
pub fn zernike_moments(grid: &VoxelGrid, max_order: u32) -> MomentSet {
    let slots = nonneg_slots(max_order);

    let state = walk_ball(grid, slots.len(), |acc, u, rho_sq, f| {
        let [ux, uy, uz] = u;
        // Harmonic polynomials depend on (l, m) only; radial envelopes on
        // (s, l) only. Cache both per voxel and combine per slot.
        let mut harm = vec![Complex64::new(0.0, 0.0); slots.len()];
        let mut env = vec![0.0f64; slots.len()];
        for (k, &(s, l, m)) in slots.iter().enumerate() {
            harm[k] = if k > 0 && slots[k - 1].1 == l && slots[k - 1].2 == m {
                harm[k - 1]
            } else {
                harmonic_polynomial(l, m as i32, ux, uy, uz)
            };
            env[k] = radial_envelope(s, l, rho_sq);
        }
        for k in 0..slots.len() {
            let z = env[k] * harm[k];
            acc[k] += z.conj() * f;
        }
    });

    let dv = (2.0 / grid.n() as f64).powi(3);
    let scale = 3.0 / (4.0 * std::f64::consts::PI) * dv;
    MomentSet {
        family: MomentFamily::Zernike,
        max_order,
        entries: emit_entries(max_order, &slots, &state.acc, scale),
        grid: GridMeta::of(grid),
        discarded_mass_fraction: discarded_fraction(&state),
    }
}
