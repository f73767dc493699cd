//! binvox v1 file format: ASCII header plus byte-pair run-length payload.
//!
//! Layout written and expected:
//!
//! ```text
//! #binvox 1
//! dim d d d
//! translate tx ty tz
//! scale s
//! data
//! <value byte, count byte> pairs
//! ```
//!
//! Voxels run y-fastest, then z, then x, which matches [`VoxelGrid`]'s
//! internal order, so the payload maps straight onto the value array.

use crate::voxel::VoxelGrid;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BinvoxError {
    #[error("missing or malformed magic line; expected \"#binvox 1\"")]
    BadMagic,
    #[error("malformed header line: {line:?}")]
    BadHeaderLine { line: String },
    #[error("dim must be cubic with edge >= 2, got {dims:?}")]
    BadDim { dims: Vec<usize> },
    #[error("header ended before the data section")]
    MissingData,
    #[error("no dim line before the data section")]
    MissingDim,
    #[error("RLE payload has a dangling value byte without a count")]
    DanglingPair,
    #[error("RLE value byte must be 0 or 1, got {value}")]
    BadValueByte { value: u8 },
    #[error("RLE count byte must be nonzero")]
    ZeroRun,
    #[error("RLE payload decodes to {got} voxels, expected {expect}")]
    PayloadSize { got: usize, expect: usize },
    #[error("payload continues past {expect} voxels")]
    TrailingData { expect: usize },
}

/// Serialize a grid. Occupancy is thresholded at 0.5; runs are split at
/// the 255 limit of the one-byte count field. Floats in the header are
/// written in shortest round-trip form, so read(write(g)) reproduces
/// translate and scale bit-exactly.
pub fn write_binvox(grid: &VoxelGrid) -> Vec<u8> {
    let n = grid.n();
    let t = grid.translate();
    let mut out = Vec::with_capacity(128 + n * n);
    out.extend_from_slice(b"#binvox 1\n");
    out.extend_from_slice(format!("dim {n} {n} {n}\n").as_bytes());
    out.extend_from_slice(format!("translate {} {} {}\n", t[0], t[1], t[2]).as_bytes());
    out.extend_from_slice(format!("scale {}\n", grid.scale()).as_bytes());
    out.extend_from_slice(b"data\n");

    let bit = |v: f64| -> u8 { u8::from(v >= 0.5) };
    let mut values = grid.raw_values().iter().map(|&v| bit(v));
    let mut current = values.next().expect("grids are never empty");
    let mut run: usize = 1;
    let flush = |value: u8, mut run: usize, out: &mut Vec<u8>| {
        while run > 0 {
            let chunk = run.min(255);
            out.push(value);
            out.push(chunk as u8);
            run -= chunk;
        }
    };
    for v in values {
        if v == current {
            run += 1;
        } else {
            flush(current, run, &mut out);
            current = v;
            run = 1;
        }
    }
    flush(current, run, &mut out);
    out
}

/// Deserialize a binvox v1 byte stream. Unrecognized header lines are
/// ignored; translate defaults to 0 and scale to 1 when absent.
pub fn read_binvox(bytes: &[u8]) -> Result<VoxelGrid, BinvoxError> {
    // Header is ASCII lines up to and including "data\n".
    let mut pos = 0usize;
    let next_line = |pos: &mut usize| -> Option<String> {
        if *pos >= bytes.len() {
            return None;
        }
        let start = *pos;
        let end = bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| start + i)
            .unwrap_or(bytes.len());
        *pos = end + 1;
        Some(String::from_utf8_lossy(&bytes[start..end]).into_owned())
    };

    let magic = next_line(&mut pos).ok_or(BinvoxError::BadMagic)?;
    if magic.trim() != "#binvox 1" {
        return Err(BinvoxError::BadMagic);
    }

    let mut dim: Option<usize> = None;
    let mut translate = [0.0f64; 3];
    let mut scale = 1.0f64;
    loop {
        let line = next_line(&mut pos).ok_or(BinvoxError::MissingData)?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.first().copied() {
            Some("data") => break,
            Some("dim") => {
                let dims: Vec<usize> = fields[1..]
                    .iter()
                    .map(|f| f.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| BinvoxError::BadHeaderLine { line: line.clone() })?;
                if dims.len() != 3 || dims[0] != dims[1] || dims[1] != dims[2] || dims[0] < 2 {
                    return Err(BinvoxError::BadDim { dims });
                }
                dim = Some(dims[0]);
            }
            Some("translate") => {
                let vals: Vec<f64> = fields[1..]
                    .iter()
                    .map(|f| f.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| BinvoxError::BadHeaderLine { line: line.clone() })?;
                if vals.len() != 3 {
                    return Err(BinvoxError::BadHeaderLine { line });
                }
                translate = [vals[0], vals[1], vals[2]];
            }
            Some("scale") => {
                scale = fields
                    .get(1)
                    .and_then(|f| f.parse::<f64>().ok())
                    .ok_or(BinvoxError::BadHeaderLine { line: line.clone() })?;
            }
            Some(_) => {} // tolerate unknown header lines
            None => {}    // blank line
        }
    }
    let n = dim.ok_or(BinvoxError::MissingDim)?;
    let expect = n * n * n;

    let mut values = Vec::with_capacity(expect);
    let payload = &bytes[pos..];
    let mut i = 0;
    while i < payload.len() {
        if i + 1 >= payload.len() {
            return Err(BinvoxError::DanglingPair);
        }
        let value = payload[i];
        let count = payload[i + 1];
        i += 2;
        if value > 1 {
            return Err(BinvoxError::BadValueByte { value });
        }
        if count == 0 {
            return Err(BinvoxError::ZeroRun);
        }
        if values.len() + count as usize > expect {
            return Err(BinvoxError::TrailingData { expect });
        }
        values.extend(std::iter::repeat(value as f64).take(count as usize));
    }
    if values.len() != expect {
        return Err(BinvoxError::PayloadSize {
            got: values.len(),
            expect,
        });
    }
    Ok(VoxelGrid::from_values(n, values, translate, scale).expect("validated payload"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn grid_from_bits(n: usize, bits: &[u8]) -> VoxelGrid {
        let values: Vec<f64> = bits.iter().map(|&b| b as f64).collect();
        VoxelGrid::from_values(n, values, [0.0; 3], 1.0).unwrap()
    }

    #[test]
    fn all_ones_single_run() {
        let bytes = b"#binvox 1\ndim 2 2 2\ntranslate 0 0 0\nscale 1\ndata\n\x01\x08";
        let g = read_binvox(bytes).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.occupied_count(), 8);
    }

    #[test]
    fn half_empty_half_full() {
        let bytes = b"#binvox 1\ndim 2 2 2\ndata\n\x00\x04\x01\x04";
        let g = read_binvox(bytes).unwrap();
        // First four voxels in payload order are empty; payload order is
        // y fastest, then z, then x, so the occupied half is x = 1.
        assert_eq!(g.raw_values()[..4], [0.0, 0.0, 0.0, 0.0]);
        assert_eq!(g.raw_values()[4..], [1.0, 1.0, 1.0, 1.0]);
        for y in 0..2 {
            for z in 0..2 {
                assert_eq!(g.value(0, y, z), 0.0);
                assert_eq!(g.value(1, y, z), 1.0);
            }
        }
    }

    #[test]
    fn payload_size_mismatch_is_reported() {
        let bytes = b"#binvox 1\ndim 2 2 2\ndata\n\x00\x07";
        assert_eq!(
            read_binvox(bytes),
            Err(BinvoxError::PayloadSize { got: 7, expect: 8 })
        );
    }

    #[test]
    fn header_errors() {
        assert_eq!(read_binvox(b"#voxbin 1\ndata\n"), Err(BinvoxError::BadMagic));
        assert_eq!(
            read_binvox(b"#binvox 1\ndim 2 3 2\ndata\n"),
            Err(BinvoxError::BadDim {
                dims: vec![2, 3, 2]
            })
        );
        assert_eq!(
            read_binvox(b"#binvox 1\ndata\n"),
            Err(BinvoxError::MissingDim)
        );
        assert_eq!(
            read_binvox(b"#binvox 1\ndim 2 2 2\n"),
            Err(BinvoxError::MissingData)
        );
        assert_eq!(
            read_binvox(b"#binvox 1\ndim 2 2 2\ndata\n\x00\x04\x01"),
            Err(BinvoxError::DanglingPair)
        );
        assert_eq!(
            read_binvox(b"#binvox 1\ndim 2 2 2\ndata\n\x02\x08"),
            Err(BinvoxError::BadValueByte { value: 2 })
        );
        assert_eq!(
            read_binvox(b"#binvox 1\ndim 2 2 2\ndata\n\x00\x00"),
            Err(BinvoxError::ZeroRun)
        );
        assert_eq!(
            read_binvox(b"#binvox 1\ndim 2 2 2\ndata\n\x00\x08\x01\x01"),
            Err(BinvoxError::TrailingData { expect: 8 })
        );
    }

    #[test]
    fn empty_grid_writes_single_run() {
        let g = VoxelGrid::new(4, [0.0; 3], 1.0).unwrap();
        let bytes = write_binvox(&g);
        let tail = &bytes[bytes.len() - 2..];
        assert_eq!(tail, &[0u8, 64]);
        // Exactly one pair after "data\n".
        let data_at = bytes.windows(5).position(|w| w == b"data\n").unwrap() + 5;
        assert_eq!(bytes.len() - data_at, 2);
    }

    #[test]
    fn long_runs_split_at_255() {
        // 7^3 = 343 empty voxels: expect (0,255)(0,88).
        let g = VoxelGrid::new(7, [0.0; 3], 1.0).unwrap();
        let bytes = write_binvox(&g);
        let data_at = bytes.windows(5).position(|w| w == b"data\n").unwrap() + 5;
        assert_eq!(&bytes[data_at..], &[0u8, 255, 0, 88]);
    }

    #[test]
    fn random_round_trips_are_exact() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(41);
        for _ in 0..100 {
            let n = 8usize;
            let bits: Vec<u8> = (0..n * n * n).map(|_| rng.gen_range(0..=1)).collect();
            let mut g = grid_from_bits(n, &bits);
            // Random but finite world placement.
            g = VoxelGrid::from_values(
                n,
                g.raw_values().to_vec(),
                [
                    rng.gen_range(-10.0..10.0),
                    rng.gen_range(-10.0..10.0),
                    rng.gen_range(-10.0..10.0),
                ],
                rng.gen_range(0.1..50.0),
            )
            .unwrap();
            let back = read_binvox(&write_binvox(&g)).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn threshold_applies_on_write() {
        let values = vec![0.2, 0.5, 0.7, 0.49, 1.0, 0.0, 0.51, 0.3];
        let g = VoxelGrid::from_values(2, values, [0.0; 3], 1.0).unwrap();
        let back = read_binvox(&write_binvox(&g)).unwrap();
        assert_eq!(
            back.raw_values(),
            &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]
        );
    }
}
