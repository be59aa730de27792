//! Raw field files: `N³` little-endian `f64`, row-major in lattice
//! coordinates with `λ₃` fastest.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use graphtori_core::field::{Grid, ScalarField};

pub fn read_raw(path: &Path, grid: Grid) -> Result<ScalarField> {
    let bytes = fs::read(path).with_context(|| format!("reading raw field {}", path.display()))?;
    let expected = grid.len() * 8;
    if bytes.len() != expected {
        bail!("raw field {} has {} bytes, expected {} for N = {}", path.display(), bytes.len(), expected, grid.n());
    }
    let samples = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight"))).collect();
    Ok(ScalarField::from_samples(grid, samples)?)
}

pub fn write_raw(path: &Path, field: &ScalarField) -> Result<()> {
    let bytes: Vec<u8> = field.samples().iter().flat_map(|x| x.to_le_bytes()).collect();
    fs::write(path, bytes).with_context(|| format!("writing raw field {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use graphtori_core::field::FieldFamily;
    use graphtori_core::lattice::FlatTorus;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.raw");
        let grid = Grid::new(FlatTorus::unit_cube(), 16).unwrap();
        let f = FieldFamily::centered_well(grid.torus(), 0.1, 0.3).sample(grid.clone()).unwrap();
        write_raw(&path, &f).unwrap();
        let g = read_raw(&path, grid).unwrap();
        assert_eq!(f.samples(), g.samples());
    }

    #[test]
    fn wrong_length_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.raw");
        fs::write(&path, [0u8; 24]).unwrap();
        let err = read_raw(&path, Grid::new(FlatTorus::unit_cube(), 16).unwrap()).unwrap_err();
        assert!(err.to_string().contains("expected 32768"), "{err}");
    }
}
