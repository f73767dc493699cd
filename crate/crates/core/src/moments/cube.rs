//! Engines for the cube-indexed families: geometric, Legendre, and Hahn.
//!
//! All three are separable: the 3-D sum over voxels factors into one weight
//! matrix per axis. The shared contraction below applies the x weights first,
//! then y, then z, turning the naive `O(n^3)` sum per moment into three
//! matrix passes. The summation order within each pass is fixed (ascending
//! site index), so results are deterministic and reproduce a naive triple
//! loop that accumulates in the same order.

use num_complex::Complex64;

use crate::hahn::{HahnBasisTable, HahnError, HahnParams};
use crate::legendre::legendre;
use crate::voxel::VoxelGrid;

use super::{
    cube_indices, monomial_integral, GeometricVariant, GridMeta, MomentError, MomentFamily,
    MomentIndex, MomentSet,
};

/// Dense table of separable moments, indexed `[p][q][r]`.
pub(super) struct CubeMoments {
    pub orders: usize,
    pub values: Vec<f64>,
}

impl CubeMoments {
    pub fn get(&self, p: u32, q: u32, r: u32) -> f64 {
        let o = self.orders;
        self.values[(p as usize * o + q as usize) * o + r as usize]
    }
}

/// Apply one weight matrix per axis to the grid and return every moment with
/// per-axis order below `orders`. `weights[ord][site]` must have `orders`
/// rows of `n` entries each; the same matrix is used for all three axes.
pub(super) fn separable_transform(grid: &VoxelGrid, weights: &[Vec<f64>]) -> CubeMoments {
    let n = grid.n();
    let orders = weights.len();
    debug_assert!(weights.iter().all(|row| row.len() == n));

    // Stage 1: contract over x. t1[(p, y, z)] = sum_x w[p][x] f(x, y, z).
    let mut t1 = vec![0.0f64; orders * n * n];
    for (ord, row) in weights.iter().enumerate() {
        for y in 0..n {
            for z in 0..n {
                let mut acc = 0.0;
                for (x, w) in row.iter().enumerate() {
                    acc += w * grid.value(x, y, z);
                }
                t1[(ord * n + y) * n + z] = acc;
            }
        }
    }

    // Stage 2: contract over y. t2[(p, q, z)] = sum_y w[q][y] t1[(p, y, z)].
    let mut t2 = vec![0.0f64; orders * orders * n];
    for p in 0..orders {
        for (q, row) in weights.iter().enumerate() {
            for z in 0..n {
                let mut acc = 0.0;
                for (y, w) in row.iter().enumerate() {
                    acc += w * t1[(p * n + y) * n + z];
                }
                t2[(p * orders + q) * n + z] = acc;
            }
        }
    }

    // Stage 3: contract over z. m[(p, q, r)] = sum_z w[r][z] t2[(p, q, z)].
    let mut values = vec![0.0f64; orders * orders * orders];
    for p in 0..orders {
        for q in 0..orders {
            for (r, row) in weights.iter().enumerate() {
                let mut acc = 0.0;
                for (z, w) in row.iter().enumerate() {
                    acc += w * t2[(p * orders + q) * n + z];
                }
                values[(p * orders + q) * orders + r] = acc;
            }
        }
    }

    CubeMoments { orders, values }
}

fn collect_cube_set(
    family: MomentFamily,
    max_order: u32,
    table: &CubeMoments,
    grid: &VoxelGrid,
) -> MomentSet {
    let entries = cube_indices(max_order)
        .into_iter()
        .map(|idx| {
            let MomentIndex::Cube { p, q, r } = idx else {
                unreachable!()
            };
            (idx, Complex64::new(table.get(p, q, r), 0.0))
        })
        .collect();
    MomentSet {
        family,
        max_order,
        entries,
        grid: GridMeta::of(grid),
        discarded_mass_fraction: 0.0,
    }
}

/// Raw geometric moments of the grid up to total order `max_order`.
///
/// Voxel sites are addressed 1-based: the voxel at storage index `(i, j, k)`
/// contributes at coordinates `(i + 1, j + 1, k + 1)`. With
/// [`GeometricVariant::ZeroOrder`] each site contributes `i^p j^q k^r f`;
/// with [`GeometricVariant::Precise`] the monomials are integrated over the
/// unit cell centred on the site, which leaves orders 0 and 1 unchanged and
/// corrects the flat-sample bias from order 2 upward.
pub fn geometric_moments(grid: &VoxelGrid, max_order: u32, variant: GeometricVariant) -> MomentSet {
    let n = grid.n();
    let weights: Vec<Vec<f64>> = (0..=max_order)
        .map(|ord| {
            (0..n)
                .map(|site| {
                    let a = (site + 1) as f64;
                    match variant {
                        GeometricVariant::ZeroOrder => a.powi(ord as i32),
                        GeometricVariant::Precise => monomial_integral(ord, a),
                    }
                })
                .collect()
        })
        .collect();
    let table = separable_transform(grid, &weights);
    collect_cube_set(MomentFamily::Geometric, max_order, &table, grid)
}

/// Legendre moments of the grid up to total order `max_order`.
///
/// The grid is mapped onto `[-1, 1]^3` with voxel centres at
/// `x_i = (2i - n + 1) / n` and cell width `2 / n`; each moment carries the
/// orthonormalization prefactor `(2p+1)(2q+1)(2r+1) / 8` and the cell volume,
/// so a field that is exactly a product of Legendre polynomials on the cube
/// reproduces its expansion coefficients up to discretization error.
pub fn legendre_moments(grid: &VoxelGrid, max_order: u32) -> MomentSet {
    let n = grid.n();
    let delta = 2.0 / n as f64;
    // Fold the per-axis factor (2p+1)/2 * delta into the weight rows so the
    // product over axes reproduces the full prefactor times the cell volume.
    let weights: Vec<Vec<f64>> = (0..=max_order)
        .map(|ord| {
            let norm = (2.0 * f64::from(ord) + 1.0) / 2.0 * delta;
            (0..n)
                .map(|site| {
                    let x = (2.0 * site as f64 - n as f64 + 1.0) / n as f64;
                    norm * legendre(ord, x)
                })
                .collect()
        })
        .collect();
    let table = separable_transform(grid, &weights);
    collect_cube_set(MomentFamily::Legendre, max_order, &table, grid)
}

fn hahn_weight_rows(
    table: &HahnBasisTable,
    grid: &VoxelGrid,
    orders: u32,
) -> Result<Vec<Vec<f64>>, MomentError> {
    let n = grid.n();
    if table.n() != n {
        return Err(MomentError::GridSizeMismatch {
            table_n: table.n(),
            grid_n: n,
        });
    }
    if orders > 0 && table.max_order() < (orders - 1) as usize {
        return Err(MomentError::TableOrderTooLow {
            needed: orders - 1,
            available: table.max_order() as u32,
        });
    }
    Ok((0..orders as usize).map(|s| table.row(s).to_vec()).collect())
}

/// Hahn moments of the grid up to total order `max_order`.
///
/// `table` must be built for the same lattice size as the grid; the three
/// axes share it. Sites are addressed 0-based, matching the basis table.
/// Returns an error when the lattice sizes disagree, when the table does not
/// hold enough orders, or when `max_order` exceeds the largest order the
/// lattice supports (`n - 1`).
pub fn hahn_moments(
    grid: &VoxelGrid,
    max_order: u32,
    table: &HahnBasisTable,
) -> Result<MomentSet, MomentError> {
    let limit = grid.n() as u32 - 1;
    if max_order > limit {
        return Err(MomentError::OrderExceedsLattice {
            requested: max_order,
            limit,
        });
    }
    let weights = hahn_weight_rows(table, grid, max_order + 1)?;
    let moments = separable_transform(grid, &weights);
    Ok(collect_cube_set(
        MomentFamily::Hahn,
        max_order,
        &moments,
        grid,
    ))
}

/// The complete Hahn transform: every coefficient with `p, q, r <= n - 1`.
///
/// This is the set [`super::reconstruct_hahn`] needs to invert the grid
/// exactly. Entries follow the canonical cube order with total orders up to
/// `3(n - 1)`, and `max_order` on the returned set records that bound. For
/// feature extraction use [`hahn_moments`] instead.
pub fn hahn_moments_complete(
    grid: &VoxelGrid,
    table: &HahnBasisTable,
) -> Result<MomentSet, MomentError> {
    let n = grid.n();
    let weights = hahn_weight_rows(table, grid, n as u32)?;
    let moments = separable_transform(grid, &weights);
    let max_axis = n as u32 - 1;
    let entries = cube_indices(3 * max_axis)
        .into_iter()
        .filter(|idx| {
            let MomentIndex::Cube { p, q, r } = *idx else {
                unreachable!()
            };
            p <= max_axis && q <= max_axis && r <= max_axis
        })
        .map(|idx| {
            let MomentIndex::Cube { p, q, r } = idx else {
                unreachable!()
            };
            (idx, Complex64::new(moments.get(p, q, r), 0.0))
        })
        .collect();
    Ok(MomentSet {
        family: MomentFamily::Hahn,
        max_order: 3 * max_axis,
        entries,
        grid: GridMeta::of(grid),
        discarded_mass_fraction: 0.0,
    })
}

/// Build a Hahn basis table sized for `grid` with enough orders for both
/// feature extraction and exact reconstruction.
pub fn hahn_table_for_grid(
    grid: &VoxelGrid,
    mu: f64,
    nu: f64,
) -> Result<HahnBasisTable, HahnError> {
    let params = HahnParams::new(mu, nu, grid.n())?;
    HahnBasisTable::build(params, grid.n() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voxel::VoxelGrid;

    fn zero_grid(n: usize) -> VoxelGrid {
        VoxelGrid::new(n, [0.0; 3], 1.0).unwrap()
    }

    fn single_voxel(n: usize, x: usize, y: usize, z: usize, value: f64) -> VoxelGrid {
        let mut g = zero_grid(n);
        g.set(x, y, z, value);
        g
    }

    #[test]
    fn single_voxel_zero_order_geometric_pin() {
        // A unit voxel at storage index (1, 2, 3) sits at 1-based site
        // (2, 3, 4), so m_110 = 2 * 3 = 6 and m_222 = (2*3*4)^2 = 576.
        let g = single_voxel(8, 1, 2, 3, 1.0);
        let m = geometric_moments(&g, 8, GeometricVariant::ZeroOrder);
        let get = |p, q, r| m.value(MomentIndex::Cube { p, q, r }).unwrap().re;
        assert_eq!(get(0, 0, 0), 1.0);
        assert_eq!(get(1, 1, 0), 6.0);
        assert_eq!(get(1, 0, 1), 8.0);
        assert_eq!(get(2, 2, 2), 576.0);
    }

    #[test]
    fn single_voxel_precise_matches_cell_integrals() {
        // Orders 0 and 1 agree with the point sample; order 2 picks up the
        // cell-average correction, e.g. U_2(2) = 49/12 instead of 4.
        let g = single_voxel(8, 1, 2, 3, 1.0);
        let m = geometric_moments(&g, 8, GeometricVariant::Precise);
        let get = |p, q, r| m.value(MomentIndex::Cube { p, q, r }).unwrap().re;
        assert_eq!(get(0, 0, 0), 1.0);
        assert!((get(1, 1, 0) - 6.0).abs() < 1e-12);
        assert!((get(2, 0, 0) - 49.0 / 12.0).abs() < 1e-12);
        assert!(
            (get(2, 2, 2) - (49.0 / 12.0) * (109.0 / 12.0) * (193.0 / 12.0)).abs() < 1e-9,
            "independent product of per-axis cell integrals"
        );
    }

    #[test]
    fn precise_variant_scales_with_voxel_value() {
        let g = single_voxel(6, 2, 2, 2, 0.25);
        let m = geometric_moments(&g, 4, GeometricVariant::Precise);
        let m000 = m.value(MomentIndex::Cube { p: 0, q: 0, r: 0 }).unwrap().re;
        assert!((m000 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn uniform_grid_legendre_pins() {
        // On the all-ones grid the field is the constant polynomial: the
        // order-zero coefficient is exactly 1 (midpoint sums of L_0 are
        // exact) and every odd first-order coefficient cancels by symmetry.
        let mut g = zero_grid(8);
        for x in 0..8 {
            for y in 0..8 {
                for z in 0..8 {
                    g.set(x, y, z, 1.0);
                }
            }
        }
        let m = legendre_moments(&g, 4);
        let get = |p, q, r| m.value(MomentIndex::Cube { p, q, r }).unwrap().re;
        assert!((get(0, 0, 0) - 1.0).abs() < 1e-12);
        assert!(get(1, 0, 0).abs() < 1e-12);
        assert!(get(0, 1, 0).abs() < 1e-12);
        assert!(get(0, 0, 1).abs() < 1e-12);
        // Midpoint quadrature of L_2 over [-1, 1] is not exactly zero at
        // finite n, but it must be small and is pinned by the closed form
        // sum_i x_i^2 = (n^2 - 1) / (3 n^2) - 1/3 = -1/(3 n^2).
        let expected = (2.0 * 2.0 + 1.0) / 2.0 * (2.0 / 8.0) * {
            let n = 8.0f64;
            let mut s = 0.0;
            for i in 0..8 {
                let x = (2.0 * i as f64 - n + 1.0) / n;
                s += 0.5 * (3.0 * x * x - 1.0);
            }
            s
        };
        assert!((get(2, 0, 0) - expected).abs() < 1e-14);
    }

    #[test]
    fn hahn_engine_matches_direct_basis_sum() {
        let g = single_voxel(8, 3, 1, 6, 1.0);
        let table = hahn_table_for_grid(&g, 0.0, 0.0).unwrap();
        let m = hahn_moments(&g, 5, &table).unwrap();
        for (idx, v) in &m.entries {
            let MomentIndex::Cube { p, q, r } = *idx else {
                unreachable!()
            };
            let direct = table.value(p as usize, 3) * table.value(q as usize, 1) * table.value(r as usize, 6);
            assert!(
                (v.re - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                "{idx}: engine {} vs direct {}",
                v.re,
                direct
            );
        }
    }

    #[test]
    fn hahn_separated_field_recovers_outer_product() {
        // Build f as a two-term basis combination
        //   f = c0 h~_0(x) h~_0(y) h~_0(z) + c1 h~_1(x) h~_0(y) h~_0(z)
        // with c0 large enough to keep f in [0, 1] (h~_0 is strictly
        // positive). Orthonormality then pins H_000 = c0, H_100 = c1, and
        // every other coefficient of the truncated set to zero.
        let n = 8;
        let params = HahnParams::new(0.0, 0.0, n).unwrap();
        let table = HahnBasisTable::build(params, n - 1).unwrap();
        let h1: Vec<f64> = (0..n).map(|a| table.value(1, a)).collect();
        let h0: Vec<f64> = (0..n).map(|a| table.value(0, a)).collect();
        let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let min_h0 = h0.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        assert!(min_h0 > 0.0, "order-0 functions are square roots of weights");
        let ratio = 0.5 * min_h0 / max_abs(&h1);
        let peak = (max_abs(&h0) + ratio * max_abs(&h1)) * max_abs(&h0) * max_abs(&h0);
        let c0 = 0.9 / peak;
        let c1 = ratio * c0;
        let mut g = zero_grid(n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let v = (c0 * h0[x] + c1 * h1[x]) * h0[y] * h0[z];
                    g.set(x, y, z, v);
                }
            }
        }
        let m = hahn_moments(&g, 3, &table).unwrap();
        let get = |p, q, r| m.value(MomentIndex::Cube { p, q, r }).unwrap().re;
        assert!(
            (get(0, 0, 0) - c0).abs() < 1e-12,
            "H_000 = {}, expected {c0}",
            get(0, 0, 0)
        );
        assert!(
            (get(1, 0, 0) - c1).abs() < 1e-12,
            "H_100 = {}, expected {c1}",
            get(1, 0, 0)
        );
        for (idx, v) in &m.entries {
            let MomentIndex::Cube { p, q, r } = *idx else {
                unreachable!()
            };
            if (p, q, r) == (1, 0, 0) || (p, q, r) == (0, 0, 0) {
                continue;
            }
            assert!(v.re.abs() < 1e-12, "{idx} should vanish, got {}", v.re);
        }
    }

    #[test]
    fn hahn_requires_matching_lattice() {
        let g = zero_grid(8);
        let params = HahnParams::new(0.0, 0.0, 16).unwrap();
        let table = HahnBasisTable::build(params, 15).unwrap();
        let err = hahn_moments(&g, 3, &table).unwrap_err();
        assert_eq!(
            err,
            MomentError::GridSizeMismatch {
                table_n: 16,
                grid_n: 8
            }
        );
    }

    #[test]
    fn hahn_order_guards() {
        let g = zero_grid(4);
        let params = HahnParams::new(0.0, 0.0, 4).unwrap();
        let full = HahnBasisTable::build(params, 3).unwrap();
        assert_eq!(
            hahn_moments(&g, 4, &full).unwrap_err(),
            MomentError::OrderExceedsLattice {
                requested: 4,
                limit: 3
            }
        );
        let short = HahnBasisTable::build(params, 1).unwrap();
        assert_eq!(
            hahn_moments(&g, 3, &short).unwrap_err(),
            MomentError::TableOrderTooLow {
                needed: 3,
                available: 1
            }
        );
    }

    #[test]
    fn complete_set_has_cube_count_and_satisfies_parseval() {
        let n = 6;
        let mut g = zero_grid(n);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    g.set(x, y, z, if next() < 0.4 { 1.0 } else { 0.0 });
                }
            }
        }
        let table = hahn_table_for_grid(&g, 0.0, 0.0).unwrap();
        let m = hahn_moments_complete(&g, &table).unwrap();
        assert_eq!(m.entries.len(), n * n * n);
        // Orthonormal transform preserves the squared mass of the field.
        let coeff_energy: f64 = m.entries.iter().map(|(_, v)| v.re * v.re).sum();
        let field_energy: f64 = g.raw_values().iter().map(|v| v * v).sum();
        assert!(
            (coeff_energy - field_energy).abs() <= 1e-10 * field_energy.max(1.0),
            "coefficient energy {coeff_energy} vs field energy {field_energy}"
        );
    }

    #[test]
    fn empty_grid_yields_all_zero_moments() {
        let g = zero_grid(6);
        let table = hahn_table_for_grid(&g, 2.0, 2.0).unwrap();
        for set in [
            geometric_moments(&g, 4, GeometricVariant::ZeroOrder),
            geometric_moments(&g, 4, GeometricVariant::Precise),
            legendre_moments(&g, 4),
            hahn_moments(&g, 4, &table).unwrap(),
        ] {
            for (idx, v) in &set.entries {
                assert_eq!(v.re, 0.0, "{idx}");
                assert_eq!(v.im, 0.0, "{idx}");
            }
        }
    }

    #[test]
    fn engines_are_linear_in_the_field() {
        let n = 5;
        let mut a = zero_grid(n);
        let mut b = zero_grid(n);
        let mut combo = zero_grid(n);
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let (alpha, beta) = (0.3, 0.45);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (va, vb) = (next(), next());
                    a.set(x, y, z, va);
                    b.set(x, y, z, vb);
                    combo.set(x, y, z, alpha * va + beta * vb);
                }
            }
        }
        let table = hahn_table_for_grid(&a, 1.0, 3.0).unwrap();
        let runs: Vec<(MomentSet, MomentSet, MomentSet)> = vec![
            (
                geometric_moments(&a, 4, GeometricVariant::Precise),
                geometric_moments(&b, 4, GeometricVariant::Precise),
                geometric_moments(&combo, 4, GeometricVariant::Precise),
            ),
            (
                legendre_moments(&a, 4),
                legendre_moments(&b, 4),
                legendre_moments(&combo, 4),
            ),
            (
                hahn_moments(&a, 4, &table).unwrap(),
                hahn_moments(&b, 4, &table).unwrap(),
                hahn_moments(&combo, 4, &table).unwrap(),
            ),
        ];
        for (ma, mb, mc) in &runs {
            for ((idx, va), ((_, vb), (_, vc))) in
                ma.entries.iter().zip(mb.entries.iter().zip(mc.entries.iter()))
            {
                let lin = alpha * va.re + beta * vb.re;
                let scale = lin.abs().max(1.0);
                assert!(
                    (vc.re - lin).abs() <= 1e-12 * scale,
                    "{:?} {idx}: {} vs {}",
                    ma.family,
                    vc.re,
                    lin
                );
            }
        }
    }

    #[test]
    fn moment_sets_are_bit_identical_across_runs() {
        let mut g = zero_grid(6);
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    g.set(x, y, z, ((x * 31 + y * 7 + z) % 5) as f64 / 4.0);
                }
            }
        }
        let table = hahn_table_for_grid(&g, 0.0, 0.0).unwrap();
        let first = (
            geometric_moments(&g, 6, GeometricVariant::Precise),
            legendre_moments(&g, 6),
            hahn_moments(&g, 5, &table).unwrap(),
        );
        let second = (
            geometric_moments(&g, 6, GeometricVariant::Precise),
            legendre_moments(&g, 6),
            hahn_moments(&g, 5, &table).unwrap(),
        );
        assert_eq!(first.0, second.0);
        assert_eq!(first.1, second.1);
        assert_eq!(first.2, second.2);
    }
}
