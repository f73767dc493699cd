//! Molecular geometry ingestion and voxel rasterization.

use std::collections::HashMap;
use thiserror::Error;

/// One atom: element symbol plus Cartesian position in angstroms.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub element: String,
    pub position: [f64; 3],
}

/// An ordered collection of atoms with an optional identifier (taken
/// from the XYZ comment line when present).
#[derive(Clone, Debug, PartialEq)]
pub struct Molecule {
    pub name: Option<String>,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Error, PartialEq)]
pub enum XyzError {
    #[error("empty file")]
    Empty,
    #[error("line 1: expected an atom count, found {found:?}")]
    BadCount { found: String },
    #[error("declared {declared} atoms, found {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("line {line}: expected \"symbol x y z\", found {found:?}")]
    BadAtomLine { line: usize, found: String },
    #[error("line {line}: coordinate {field} is not a finite number: {found:?}")]
    BadCoordinate {
        line: usize,
        field: usize,
        found: String,
    },
    #[error("line {line}: element symbol must be nonempty ASCII")]
    BadElement { line: usize },
    #[error("declared atom count must be at least 1")]
    ZeroAtoms,
}

/// Parse XYZ-format text: atom count, comment line, then one
/// "symbol x y z" line per atom. Blank lines after the header are
/// tolerated; surplus fields on an atom line are ignored.
pub fn parse_xyz(text: &str) -> Result<Molecule, XyzError> {
    let mut lines = text.lines().enumerate();

    let (_, count_line) = lines.next().ok_or(XyzError::Empty)?;
    let declared: usize = count_line
        .trim()
        .parse()
        .map_err(|_| XyzError::BadCount {
            found: count_line.trim().to_string(),
        })?;
    if declared == 0 {
        return Err(XyzError::ZeroAtoms);
    }

    let name = lines
        .next()
        .map(|(_, comment)| comment.trim())
        .filter(|c| !c.is_empty())
        .map(str::to_string);

    let mut atoms = Vec::with_capacity(declared);
    for (idx, raw) in lines {
        let line = idx + 1; // 1-based for messages
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(XyzError::BadAtomLine {
                line,
                found: trimmed.to_string(),
            });
        }
        let element = fields[0];
        if element.is_empty() || !element.is_ascii() {
            return Err(XyzError::BadElement { line });
        }
        let mut position = [0.0; 3];
        for (axis, slot) in position.iter_mut().enumerate() {
            let field = fields[1 + axis];
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or(XyzError::BadCoordinate {
                    line,
                    field: axis + 1,
                    found: field.to_string(),
                })?;
        }
        atoms.push(Atom {
            element: element.to_string(),
            position,
        });
        if atoms.len() > declared {
            break;
        }
    }

    if atoms.len() != declared {
        return Err(XyzError::CountMismatch {
            declared,
            found: atoms.len(),
        });
    }
    Ok(Molecule { name, atoms })
}

/// Per-element sphere radii in angstroms, with an optional fallback for
/// symbols missing from the table.
#[derive(Clone, Debug)]
pub struct RadiusTable {
    radii: HashMap<String, f64>,
    fallback: Option<f64>,
}

impl RadiusTable {
    pub fn new(radii: HashMap<String, f64>, fallback: Option<f64>) -> Self {
        RadiusTable { radii, fallback }
    }

    /// Van der Waals radii for the elements common in small organics,
    /// with a 1.5 angstrom fallback for anything else.
    pub fn vdw() -> Self {
        let radii = [
            ("H", 1.2),
            ("C", 1.7),
            ("N", 1.55),
            ("O", 1.52),
            ("S", 1.8),
            ("P", 1.8),
            ("F", 1.47),
            ("Cl", 1.75),
            ("Br", 1.85),
            ("I", 1.98),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        RadiusTable {
            radii,
            fallback: Some(1.5),
        }
    }

    /// Radius for an element symbol. Lookup is tolerant of case noise
    /// ("CL" finds "Cl"); None when the symbol is absent and no fallback
    /// is configured.
    pub fn radius_for(&self, element: &str) -> Option<f64> {
        if let Some(&r) = self.radii.get(element) {
            return Some(r);
        }
        let canonical: String = element
            .char_indices()
            .map(|(i, c)| {
                if i == 0 {
                    c.to_ascii_uppercase()
                } else {
                    c.to_ascii_lowercase()
                }
            })
            .collect();
        self.radii.get(&canonical).copied().or(self.fallback)
    }
}

/// How atoms mark voxels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VoxelMode {
    /// Each atom occupies the single voxel nearest its center.
    Point,
    /// Each atom occupies every voxel whose center lies within its
    /// element radius.
    Sphere,
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid size must be at least 2 (got {n})")]
    TooSmall { n: usize },
    #[error("expected {expect} voxel values, got {got}")]
    WrongLength { expect: usize, got: usize },
    #[error("voxel value at index {index} is {value}, outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("scale must be a positive finite number (got {scale})")]
    BadScale { scale: f64 },
}

/// A cubic scalar occupancy grid.
///
/// Values are held in binvox payload order (y varies fastest, then z,
/// then x); use [`VoxelGrid::value`] for coordinate access. `translate`
/// and `scale` place the grid in world space: voxel (x, y, z) has its
/// center at translate + scale * ((x+0.5)/n, (y+0.5)/n, (z+0.5)/n).
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelGrid {
    n: usize,
    values: Vec<f64>,
    translate: [f64; 3],
    scale: f64,
}

impl VoxelGrid {
    /// An all-empty grid.
    pub fn new(n: usize, translate: [f64; 3], scale: f64) -> Result<Self, GridError> {
        Self::from_values(n, vec![0.0; n * n * n], translate, scale)
    }

    /// Wrap an existing value array (binvox order). Values must be
    /// finite and within [0, 1].
    pub fn from_values(
        n: usize,
        values: Vec<f64>,
        translate: [f64; 3],
        scale: f64,
    ) -> Result<Self, GridError> {
        if n < 2 {
            return Err(GridError::TooSmall { n });
        }
        if values.len() != n * n * n {
            return Err(GridError::WrongLength {
                expect: n * n * n,
                got: values.len(),
            });
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(GridError::BadScale { scale });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(GridError::ValueOutOfRange { index, value });
            }
        }
        Ok(VoxelGrid {
            n,
            values,
            translate,
            scale,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn translate(&self) -> [f64; 3] {
        self.translate
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    fn index(&self, x: usize, y: usize, z: usize) -> usize {
        debug_assert!(x < self.n && y < self.n && z < self.n);
        (x * self.n + z) * self.n + y
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[self.index(x, y, z)]
    }

    pub(crate) fn set(&mut self, x: usize, y: usize, z: usize, v: f64) {
        debug_assert!((0.0..=1.0).contains(&v));
        let i = self.index(x, y, z);
        self.values[i] = v;
    }

    /// Raw values in binvox payload order.
    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }

    /// Number of voxels with nonzero occupancy.
    pub fn occupied_count(&self) -> usize {
        self.values.iter().filter(|v| **v > 0.0).count()
    }

    /// Iterate (x, y, z, value) over the whole grid.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |x| {
            (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z, self.value(x, y, z))))
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum VoxelizeError {
    #[error("grid size must be at least 2 (got {n})")]
    GridTooSmall { n: usize },
    #[error("margin must lie in [0, 0.45] (got {margin})")]
    BadMargin { margin: f64 },
    #[error("no radius known for element {element:?}")]
    UnknownElement { element: String },
    #[error("molecule has no atoms")]
    NoAtoms,
    #[error("atom {index} has a non-finite coordinate")]
    BadGeometry { index: usize },
}

/// Rasterize a molecule onto an n-cubed grid.
///
/// The bounding box (inflated by element radii in sphere mode) is
/// scaled uniformly so its longest edge fills the cube minus the margin
/// fraction on each side, and centered. Occupancy is computed from
/// coordinates relative to the box corner, so translating every atom by
/// the same vector yields a bit-identical grid.
pub fn voxelize(
    mol: &Molecule,
    n: usize,
    mode: VoxelMode,
    radii: &RadiusTable,
    margin: f64,
) -> Result<VoxelGrid, VoxelizeError> {
    if n < 2 {
        return Err(VoxelizeError::GridTooSmall { n });
    }
    if !(0.0..=0.45).contains(&margin) {
        return Err(VoxelizeError::BadMargin { margin });
    }
    if mol.atoms.is_empty() {
        return Err(VoxelizeError::NoAtoms);
    }
    for (index, atom) in mol.atoms.iter().enumerate() {
        if atom.position.iter().any(|c| !c.is_finite()) {
            return Err(VoxelizeError::BadGeometry { index });
        }
    }

    let atom_radius = |atom: &Atom| -> Result<f64, VoxelizeError> {
        match mode {
            VoxelMode::Point => Ok(0.0),
            VoxelMode::Sphere => {
                radii
                    .radius_for(&atom.element)
                    .ok_or_else(|| VoxelizeError::UnknownElement {
                        element: atom.element.clone(),
                    })
            }
        }
    };

    // Radius-inflated bounding box.
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for atom in &mol.atoms {
        let r = atom_radius(atom)?;
        for axis in 0..3 {
            lo[axis] = lo[axis].min(atom.position[axis] - r);
            hi[axis] = hi[axis].max(atom.position[axis] + r);
        }
    }
    let extent = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
    let longest = extent.iter().cloned().fold(0.0f64, f64::max);
    let scale = if longest > 0.0 {
        longest / (1.0 - 2.0 * margin)
    } else {
        1.0 // degenerate molecule: any positive box, it sits at center
    };

    // Per-axis offset that centers the box inside the cube; depends on
    // extents only, never on absolute coordinates.
    let offset = [
        (scale - extent[0]) / 2.0,
        (scale - extent[1]) / 2.0,
        (scale - extent[2]) / 2.0,
    ];
    let translate = [
        (lo[0] + hi[0]) / 2.0 - scale / 2.0,
        (lo[1] + hi[1]) / 2.0 - scale / 2.0,
        (lo[2] + hi[2]) / 2.0 - scale / 2.0,
    ];

    let mut grid = VoxelGrid::new(n, translate, scale).expect("validated size");
    let nf = n as f64;
    // Voxel-center coordinate of a world position, per axis.
    let to_grid =
        |w: f64, axis: usize| -> f64 { (w - lo[axis] + offset[axis]) / scale * nf - 0.5 };

    for atom in &mol.atoms {
        let u = [
            to_grid(atom.position[0], 0),
            to_grid(atom.position[1], 1),
            to_grid(atom.position[2], 2),
        ];
        match mode {
            VoxelMode::Point => {
                let clamp_idx = |v: f64| -> usize { (v.round().max(0.0) as usize).min(n - 1) };
                grid.set(clamp_idx(u[0]), clamp_idx(u[1]), clamp_idx(u[2]), 1.0);
            }
            VoxelMode::Sphere => {
                let r = atom_radius(atom)? / scale * nf;
                let lo_i = |c: f64| ((c - r).ceil().max(0.0)) as usize;
                let hi_i = |c: f64| ((c + r).floor().min(nf - 1.0)).max(0.0) as usize;
                for x in lo_i(u[0])..=hi_i(u[0]) {
                    for y in lo_i(u[1])..=hi_i(u[1]) {
                        for z in lo_i(u[2])..=hi_i(u[2]) {
                            let dx = x as f64 - u[0];
                            let dy = y as f64 - u[1];
                            let dz = z as f64 - u[2];
                            if dx * dx + dy * dy + dz * dz <= r * r {
                                grid.set(x, y, z, 1.0);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_and_water() {
        let m = parse_xyz("1\n\nC 0.0 0.0 0.0").unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert_eq!(m.atoms[0].element, "C");
        assert_eq!(m.atoms[0].position, [0.0, 0.0, 0.0]);
        assert_eq!(m.name, None);

        let m = parse_xyz("2\nwater-ish\nO 0 0 0\nH 0.96 0 0").unwrap();
        assert_eq!(m.atoms.len(), 2);
        assert_eq!(m.name.as_deref(), Some("water-ish"));
        assert_eq!(m.atoms[1].position[0], 0.96);
    }

    #[test]
    fn parse_errors_carry_context() {
        assert_eq!(parse_xyz(""), Err(XyzError::Empty));
        assert_eq!(
            parse_xyz("3\n\nC 0 0 0\nH 1 0 0"),
            Err(XyzError::CountMismatch {
                declared: 3,
                found: 2
            })
        );
        assert!(matches!(
            parse_xyz("x\n\nC 0 0 0"),
            Err(XyzError::BadCount { .. })
        ));
        let err = parse_xyz("1\n\nC 0 frog 0").unwrap_err();
        assert_eq!(
            err,
            XyzError::BadCoordinate {
                line: 3,
                field: 2,
                found: "frog".to_string()
            }
        );
        assert_eq!(
            err.to_string(),
            "line 3: coordinate 2 is not a finite number: \"frog\""
        );
        assert!(matches!(
            parse_xyz("1\n\nC 0 0"),
            Err(XyzError::BadAtomLine { line: 3, .. })
        ));
        assert_eq!(parse_xyz("0\n\n"), Err(XyzError::ZeroAtoms));
        // Infinities are rejected even though they parse as f64.
        assert!(matches!(
            parse_xyz("1\n\nC inf 0 0"),
            Err(XyzError::BadCoordinate { .. })
        ));
    }

    #[test]
    fn radius_lookup_and_fallback() {
        let t = RadiusTable::vdw();
        assert_eq!(t.radius_for("C"), Some(1.7));
        assert_eq!(t.radius_for("Cl"), Some(1.75));
        assert_eq!(t.radius_for("CL"), Some(1.75));
        assert_eq!(t.radius_for("Xx"), Some(1.5));
        let strict = RadiusTable::new(
            [("C".to_string(), 1.7)].into_iter().collect(),
            None,
        );
        assert_eq!(strict.radius_for("N"), None);
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            VoxelGrid::new(1, [0.0; 3], 1.0),
            Err(GridError::TooSmall { n: 1 })
        ));
        assert!(matches!(
            VoxelGrid::from_values(2, vec![0.0; 7], [0.0; 3], 1.0),
            Err(GridError::WrongLength { .. })
        ));
        assert!(matches!(
            VoxelGrid::from_values(2, vec![1.5; 8], [0.0; 3], 1.0),
            Err(GridError::ValueOutOfRange { .. })
        ));
        assert!(matches!(
            VoxelGrid::new(2, [0.0; 3], -1.0),
            Err(GridError::BadScale { .. })
        ));
    }

    #[test]
    fn single_atom_centers_on_odd_grid() {
        let m = parse_xyz("1\n\nC 0 0 0").unwrap();
        let g = voxelize(&m, 9, VoxelMode::Point, &RadiusTable::vdw(), 0.05).unwrap();
        assert_eq!(g.occupied_count(), 1);
        assert_eq!(g.value(4, 4, 4), 1.0);
    }

    #[test]
    fn two_distant_atoms_land_on_opposite_faces() {
        let m = parse_xyz("2\n\nC 0 0 0\nC 100 0 0").unwrap();
        let g = voxelize(&m, 16, VoxelMode::Point, &RadiusTable::vdw(), 0.05).unwrap();
        assert_eq!(g.occupied_count(), 2);
        // Affine fit by hand: scale = 100/0.9, first atom maps to voxel
        // coordinate 0.3 -> 0, second to 14.7 -> 15; y and z center at 8.
        assert_eq!(g.value(0, 8, 8), 1.0);
        assert_eq!(g.value(15, 8, 8), 1.0);
    }

    #[test]
    fn sphere_occupancy_matches_distance_scan() {
        let m = parse_xyz("1\n\nC 0 0 0").unwrap();
        let g = voxelize(&m, 32, VoxelMode::Sphere, &RadiusTable::vdw(), 0.1).unwrap();
        // Independent scan: center is at voxel coordinate 15.5 on each
        // axis, radius 1.7 A maps to 1.7/4.25*32 voxels.
        let r = 1.7 / 4.25 * 32.0;
        let mut count = 0;
        for (x, y, z, v) in g.iter() {
            let d2 = (x as f64 - 15.5).powi(2) + (y as f64 - 15.5).powi(2)
                + (z as f64 - 15.5).powi(2);
            let inside = d2 <= r * r;
            assert_eq!(v > 0.0, inside, "voxel ({x},{y},{z})");
            if inside {
                count += 1;
            }
        }
        assert_eq!(g.occupied_count(), count);
        assert!(count > 0);
    }

    #[test]
    fn translation_leaves_grid_bit_identical() {
        let base = parse_xyz("3\nasym\nC 0.1 0.2 0.3\nO 1.4 -0.7 0.9\nH -1.1 0.8 -0.2").unwrap();
        let shifted = Molecule {
            name: base.name.clone(),
            atoms: base
                .atoms
                .iter()
                .map(|a| Atom {
                    element: a.element.clone(),
                    position: [
                        a.position[0] + 103.25,
                        a.position[1] - 57.5,
                        a.position[2] + 0.125,
                    ],
                })
                .collect(),
        };
        for mode in [VoxelMode::Point, VoxelMode::Sphere] {
            let g1 = voxelize(&base, 24, mode, &RadiusTable::vdw(), 0.05).unwrap();
            let g2 = voxelize(&shifted, 24, mode, &RadiusTable::vdw(), 0.05).unwrap();
            assert_eq!(g1.raw_values(), g2.raw_values());
        }
    }

    #[test]
    fn sphere_mode_requires_known_elements() {
        let m = parse_xyz("1\n\nQq 0 0 0").unwrap();
        let strict = RadiusTable::new(
            [("C".to_string(), 1.7)].into_iter().collect(),
            None,
        );
        let err = voxelize(&m, 8, VoxelMode::Sphere, &strict, 0.05).unwrap_err();
        assert_eq!(
            err,
            VoxelizeError::UnknownElement {
                element: "Qq".to_string()
            }
        );
        // Point mode ignores radii entirely.
        assert!(voxelize(&m, 8, VoxelMode::Point, &strict, 0.05).is_ok());
    }

    #[test]
    fn margin_validation() {
        let m = parse_xyz("1\n\nC 0 0 0").unwrap();
        assert!(matches!(
            voxelize(&m, 8, VoxelMode::Point, &RadiusTable::vdw(), 0.5),
            Err(VoxelizeError::BadMargin { .. })
        ));
        assert!(matches!(
            voxelize(&m, 1, VoxelMode::Point, &RadiusTable::vdw(), 0.05),
            Err(VoxelizeError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn occupancy_is_strictly_binary() {
        let m = parse_xyz("2\n\nO 0 0 0\nH 0.96 0 0").unwrap();
        let g = voxelize(&m, 12, VoxelMode::Sphere, &RadiusTable::vdw(), 0.05).unwrap();
        assert!(g.raw_values().iter().all(|&v| v == 0.0 || v == 1.0));
    }
}
