use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, FieldDomain, SpaceTimeGrid};
use crate::error::{Error, Result};

/// JSON sidecar written next to a field binary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub grid: SpaceTimeGrid,
    pub domain: FieldDomain,
    /// Values are stored re/im interleaved when true, real parts only otherwise.
    pub complex: bool,
    pub len: usize,
    pub byte_order: String,
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut p = stem.as_os_str().to_owned();
    p.push(ext);
    PathBuf::from(p)
}

/// Writes `<stem>.bin` (little-endian f64) and `<stem>.json`. Real-valued
/// fields are stored without imaginary parts.
pub fn write_field(field: &Field, stem: &Path) -> Result<(PathBuf, PathBuf)> {
    let complex = field.values.iter().any(|v| v.im != 0.0);
    let mut bytes = Vec::with_capacity(field.values.len() * if complex { 16 } else { 8 });
    for v in &field.values {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        if complex {
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    let bin = with_ext(stem, ".bin");
    let json = with_ext(stem, ".json");
    fs::write(&bin, bytes)?;
    let header = FieldHeader {
        grid: field.grid,
        domain: field.domain,
        complex,
        len: field.values.len(),
        byte_order: "little".into(),
    };
    fs::write(&json, serde_json::to_string_pretty(&header)?)?;
    Ok((bin, json))
}

pub fn read_field(stem: &Path) -> Result<Field> {
    let header: FieldHeader = serde_json::from_str(&fs::read_to_string(with_ext(stem, ".json"))?)?;
    let bytes = fs::read(with_ext(stem, ".bin"))?;
    let width = if header.complex { 16 } else { 8 };
    if bytes.len() != header.len * width {
        return Err(Error::Io(format!(
            "field binary has {} bytes, header expects {}",
            bytes.len(),
            header.len * width
        )));
    }
    let word = |i: usize| f64::from_le_bytes(bytes[i * 8..i * 8 + 8].try_into().expect("8 bytes"));
    let values = (0..header.len)
        .map(|k| {
            if header.complex {
                Complex64::new(word(2 * k), word(2 * k + 1))
            } else {
                Complex64::new(word(k), 0.0)
            }
        })
        .collect();
    Field::new(header.grid, header.domain, values)
}

/// CSV export of a one-dimensional field: `x,re,im` for a spatial slice and
/// `t,x,re,im` for a spacetime field.
pub fn write_csv_slice(field: &Field, path: &Path) -> Result<()> {
    let g = field.grid;
    if g.d != 1 {
        return Err(Error::Unsupported(format!("CSV export needs d=1, got d={}", g.d)));
    }
    let mut out = fs::File::create(path)?;
    match field.domain {
        FieldDomain::Space => {
            writeln!(out, "x,re,im")?;
            for (j, v) in field.values.iter().enumerate() {
                writeln!(out, "{},{},{}", g.coord(j), v.re, v.im)?;
            }
        }
        FieldDomain::SpaceTime => {
            writeln!(out, "t,x,re,im")?;
            for k in 0..field.n_slices() {
                for (j, v) in field.slice(k).iter().enumerate() {
                    writeln!(out, "{},{},{},{}", g.time(k), g.coord(j), v.re, v.im)?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = SpaceTimeGrid::new(1, 8, 2.0, 3, 1.5).unwrap();
        let f = Field::spacetime_from_fn(g, |t, x| Complex64::new(t + x[0], t * x[0]));
        let stem = dir.path().join("w");
        write_field(&f, &stem).unwrap();
        assert_eq!(read_field(&stem).unwrap(), f);
        let raw = fs::read(dir.path().join("w.bin")).unwrap();
        assert_eq!(raw.len(), 32 * 16);
        assert_eq!(f64::from_le_bytes(raw[..8].try_into().unwrap()), -2.0);
        let real = f.map(|v| Complex64::new(v.re, 0.0));
        write_field(&real, &stem).unwrap();
        assert_eq!(fs::read(dir.path().join("w.bin")).unwrap().len(), 32 * 8);
        assert_eq!(read_field(&stem).unwrap(), real);
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let g = SpaceTimeGrid::new(1, 8, 2.0, 2, 1.0).unwrap();
        let f = Field::spacetime_from_fn(g, |t, _| Complex64::new(t, 0.0));
        let p = dir.path().join("w.csv");
        write_csv_slice(&f, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 * 8);
        assert!(text.starts_with("t,x,re,im\n0,-2,0,0"));
        let g2 = SpaceTimeGrid::new(2, 8, 2.0, 2, 1.0).unwrap();
        assert!(write_csv_slice(&Field::zeros(g2, FieldDomain::Space), &p).is_err());
    }
}
