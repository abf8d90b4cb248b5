//! File formats shared with the command line and the plotting scripts.
//!
//! Fields are written in centered orientation: row `i` / column `j` hold the
//! cell with centered indices `i - L/2` (time) and `j - L/2` (frequency), so
//! the phase-space origin sits at `(L/2, L/2)`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, RealField};
use crate::locop::EigenSystem;
use crate::mask::DomainMask;
use crate::signal::Signal;

/// Reads a signal from CSV: one sample per line, `re` or `re,im`.
pub fn read_signal_csv(path: impl AsRef<Path>, grid: PhaseGrid) -> Result<Signal> {
    let text = fs::read_to_string(path.as_ref())?;
    let mut values = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad sample '{s}'")));
        let v = match parts.as_slice() {
            [re] => Complex64::new(num(re)?, 0.0),
            [re, im] => Complex64::new(num(re)?, num(im)?),
            _ => return Err(Error::Parse(format!("bad signal line '{line}'"))),
        };
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::invalid(format!(
            "signal file {} has {} samples but L={}",
            path.as_ref().display(),
            values.len(),
            grid.len()
        )));
    }
    Signal::new(grid, values)
}

/// Writes `re,im` lines.
pub fn write_signal_csv(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    let mut out = String::new();
    for v in signal.values() {
        let _ = writeln!(out, "{},{}", v.re, v.im);
    }
    fs::write(path, out)?;
    Ok(())
}

fn centered_rows(field: &RealField) -> impl Iterator<Item = Vec<f64>> + '_ {
    let grid = field.grid();
    let l = grid.len();
    (0..l).map(move |i| {
        let row = field.row(grid.centered_to_storage(i));
        (0..l).map(|j| row[grid.centered_to_storage(j)]).collect()
    })
}

/// Header `L,delta`, one line of values, then `L` rows of `L` values.
pub fn write_field_csv(path: impl AsRef<Path>, field: &RealField) -> Result<()> {
    let grid = field.grid();
    let mut out = String::with_capacity(grid.cells() * 12);
    let _ = writeln!(out, "L,delta");
    let _ = writeln!(out, "{},{}", grid.len(), grid.delta());
    for row in centered_rows(field) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads back what [`write_field_csv`] wrote.
pub fn read_field_csv(path: impl AsRef<Path>) -> Result<RealField> {
    let text = fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("L,delta") {
        return Err(Error::Parse("field CSV must start with 'L,delta'".into()));
    }
    let meta = lines.next().ok_or_else(|| Error::Parse("missing L,delta values".into()))?;
    let l: usize = meta
        .split(',')
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad L in '{meta}'")))?;
    let grid = PhaseGrid::new(l)?;
    let mut field = RealField::zeros(grid);
    let mut rows = 0;
    for (i, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        if i >= l {
            return Err(Error::Parse(format!("more than {l} field rows")));
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("field row {i}: {e}")))?;
        if vals.len() != l {
            return Err(Error::Parse(format!("field row {i} has {} values, want {l}", vals.len())));
        }
        let m = grid.centered_to_storage(i);
        for (j, v) in vals.into_iter().enumerate() {
            field.set(m, grid.centered_to_storage(j), v);
        }
        rows += 1;
    }
    if rows != l {
        return Err(Error::Parse(format!("field CSV has {rows} rows, want {l}")));
    }
    Ok(field)
}

/// Scaling recorded next to a PGM: `value = min + pixel / 65535 * (max - min)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgmSidecar {
    pub min: f64,
    pub max: f64,
    #[serde(rename = "L")]
    pub len: usize,
    pub delta: f64,
    /// Centered index of the first row and column written.
    pub first_index: i64,
    pub size: usize,
    pub orientation: String,
}

/// Path of the JSON sidecar for a PGM file.
pub fn sidecar_path(pgm: &Path) -> PathBuf {
    let mut s = pgm.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// 16-bit binary PGM of the whole field, min-max scaled.
pub fn write_field_pgm(path: impl AsRef<Path>, field: &RealField) -> Result<PgmSidecar> {
    write_field_pgm_cropped(path, field, None)
}

/// As [`write_field_pgm`], keeping only centered indices in
/// `[-half, half)` when `half` is given.
pub fn write_field_pgm_cropped(
    path: impl AsRef<Path>,
    field: &RealField,
    half: Option<usize>,
) -> Result<PgmSidecar> {
    let path = path.as_ref();
    let grid = field.grid();
    let l = grid.len();
    let half = half.unwrap_or(l / 2).min(l / 2);
    let first = l / 2 - half;
    let size = (2 * half).min(l);
    let idx: Vec<usize> = (first..first + size).map(|i| grid.centered_to_storage(i)).collect();

    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &m in &idx {
        for &n in &idx {
            let v = field.get(m, n);
            min = min.min(v);
            max = max.max(v);
        }
    }
    let span = max - min;
    let mut bytes = format!("P5\n{size} {size}\n65535\n").into_bytes();
    bytes.reserve(size * size * 2);
    for &m in &idx {
        for &n in &idx {
            let t = if span > 0.0 { (field.get(m, n) - min) / span } else { 0.0 };
            let px = (t * 65535.0).round().clamp(0.0, 65535.0) as u16;
            bytes.extend_from_slice(&px.to_be_bytes());
        }
    }
    fs::write(path, bytes)?;
    let sidecar = PgmSidecar {
        min,
        max,
        len: l,
        delta: grid.delta(),
        first_index: first as i64 - (l / 2) as i64,
        size,
        orientation: "rows: time ascending, columns: frequency ascending".into(),
    };
    write_json(sidecar_path(path), &sidecar)?;
    Ok(sidecar)
}

/// Header, dimensions and 16-bit pixels of a binary PGM.
pub fn read_pgm16(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<u16>)> {
    let bytes = fs::read(path)?;
    let (tokens, offset) = pnm_header(&bytes, 4)?;
    if tokens[0] != "P5" || tokens[3] != "65535" {
        return Err(Error::Parse("expected a 16-bit P5 PGM".into()));
    }
    let w: usize = parse_tok(&tokens[1])?;
    let h: usize = parse_tok(&tokens[2])?;
    let data = &bytes[offset..];
    if data.len() != w * h * 2 {
        return Err(Error::Parse("truncated PGM data".into()));
    }
    let px = data.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    Ok((w, h, px))
}

/// `k,lambda` with `k` counted from 1.
pub fn write_eigenvalues_csv(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    write_indexed_csv(path, "k,lambda", 1, values)
}

/// Oracle eigenvalues: `k,lambda` with the Hermite index `k` from 0.
pub fn write_oracle_csv(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    write_indexed_csv(path, "k,lambda", 0, values)
}

fn write_indexed_csv(path: impl AsRef<Path>, header: &str, first: usize, values: &[f64]) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{header}");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + first, v);
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads the `lambda` column of a `k,lambda` file.
pub fn read_eigenvalues_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("k,lambda") {
        return Err(Error::Parse("eigenvalue CSV must start with 'k,lambda'".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .nth(1)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad eigenvalue line '{l}'")))
        })
        .collect()
}

/// `r,rho` samples.
pub fn write_radial_csv(path: impl AsRef<Path>, samples: &[(f64, f64)]) -> Result<()> {
    let mut out = String::from("r,rho\n");
    for (r, v) in samples {
        let _ = writeln!(out, "{r},{v}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Manifest of a raw eigenvector dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorManifest {
    pub file: String,
    #[serde(rename = "L")]
    pub len: usize,
    pub count: usize,
    pub dtype: String,
    pub layout: String,
    pub eigenvalues: Vec<f64>,
}

/// Writes `count` vectors of `L` complex doubles (`re, im`, little-endian)
/// to `<stem>.bin` and the manifest to `<stem>.json`.
pub fn write_eigenvectors(dir: impl AsRef<Path>, stem: &str, es: &EigenSystem) -> Result<EigenvectorManifest> {
    let dir = dir.as_ref();
    let l = es.grid().len();
    let mut f = std::io::BufWriter::new(fs::File::create(dir.join(format!("{stem}.bin")))?);
    for v in es.eigenvectors() {
        for c in v.values() {
            f.write_all(&c.re.to_le_bytes())?;
            f.write_all(&c.im.to_le_bytes())?;
        }
    }
    f.flush()?;
    let manifest = EigenvectorManifest {
        file: format!("{stem}.bin"),
        len: l,
        count: es.len(),
        dtype: "complex128-le".into(),
        layout: "vector-major, each vector L pairs (re, im)".into(),
        eigenvalues: es.eigenvalues().to_vec(),
    };
    write_json(dir.join(format!("{stem}.json")), &manifest)?;
    Ok(manifest)
}

/// Reads the vectors written by [`write_eigenvectors`].
pub fn read_eigenvectors(dir: impl AsRef<Path>, stem: &str) -> Result<(EigenvectorManifest, Vec<Signal>)> {
    let dir = dir.as_ref();
    let manifest: EigenvectorManifest =
        serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
    let grid = PhaseGrid::new(manifest.len)?;
    let bytes = fs::read(dir.join(&manifest.file))?;
    if bytes.len() != manifest.count * manifest.len * 16 {
        return Err(Error::Parse("eigenvector file size does not match manifest".into()));
    }
    let doubles: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let vectors = doubles
        .chunks_exact(2 * manifest.len)
        .map(|v| {
            let vals = v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
            Signal::new(grid, vals)
        })
        .collect::<Result<_>>()?;
    Ok((manifest, vectors))
}

/// JSON mask descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum MaskDescriptor {
    Disk {
        #[serde(rename = "R")]
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Rectangle {
        width: f64,
        height: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    LShape {
        size: f64,
    },
    Blobs {
        count: usize,
        extent: f64,
        #[serde(default)]
        seed: u64,
    },
    Full,
}

impl MaskDescriptor {
    pub fn build(&self, grid: PhaseGrid) -> Result<DomainMask> {
        match *self {
            MaskDescriptor::Disk { radius, center } => DomainMask::disk(grid, (center[0], center[1]), radius),
            MaskDescriptor::Rectangle { width, height, center } => {
                DomainMask::rectangle(grid, (center[0], center[1]), width, height)
            }
            MaskDescriptor::LShape { size } => DomainMask::l_shape(grid, size),
            MaskDescriptor::Blobs { count, extent, seed } => DomainMask::random_blobs(grid, count, extent, seed),
            MaskDescriptor::Full => Ok(DomainMask::full(grid)),
        }
    }
}

/// Loads a mask from a PBM (`P1`/`P4`, `L x L`, 1 = inside) or a JSON
/// descriptor, chosen by the file's first bytes.
pub fn read_mask(path: impl AsRef<Path>, grid: PhaseGrid) -> Result<DomainMask> {
    let path = path.as_ref();
    let bytes = fs::read(path)
        .map_err(|e| Error::invalid(format!("cannot read mask {}: {e}", path.display())))?;
    match bytes.get(..2) {
        Some(b"P1") | Some(b"P4") => read_pbm(&bytes, grid),
        _ => {
            let desc: MaskDescriptor = serde_json::from_slice(&bytes)
                .map_err(|e| Error::Parse(format!("mask {}: {e}", path.display())))?;
            desc.build(grid)
        }
    }
}

fn read_pbm(bytes: &[u8], grid: PhaseGrid) -> Result<DomainMask> {
    let (tokens, offset) = pnm_header(bytes, 3)?;
    let w: usize = parse_tok(&tokens[1])?;
    let h: usize = parse_tok(&tokens[2])?;
    let l = grid.len();
    if w != l || h != l {
        return Err(Error::invalid(format!("PBM is {w}x{h}, grid needs {l}x{l}")));
    }
    let bits: Vec<bool> = if tokens[0] == "P1" {
        bytes[offset..]
            .iter()
            .filter(|b| !b.is_ascii_whitespace())
            .map(|&b| match b {
                b'1' => Ok(true),
                b'0' => Ok(false),
                _ => Err(Error::Parse(format!("bad P1 pixel '{}'", b as char))),
            })
            .collect::<Result<_>>()?
    } else {
        let stride = l.div_ceil(8);
        let data = &bytes[offset..];
        if data.len() < stride * l {
            return Err(Error::Parse("truncated P4 data".into()));
        }
        (0..l * l)
            .map(|p| {
                let (i, j) = (p / l, p % l);
                data[i * stride + j / 8] >> (7 - j % 8) & 1 == 1
            })
            .collect()
    };
    if bits.len() != l * l {
        return Err(Error::Parse(format!("PBM has {} pixels, want {}", bits.len(), l * l)));
    }
    let mut cells = vec![false; l * l];
    for (p, &b) in bits.iter().enumerate() {
        let (i, j) = (p / l, p % l);
        cells[grid.centered_to_storage(i) * l + grid.centered_to_storage(j)] = b;
    }
    DomainMask::from_cells(grid, cells)
}

/// Binary `P4` dump of a mask in centered orientation.
pub fn write_mask_pbm(path: impl AsRef<Path>, mask: &DomainMask) -> Result<()> {
    let grid = mask.grid();
    let l = grid.len();
    let stride = l.div_ceil(8);
    let mut bytes = format!("P4\n{l} {l}\n").into_bytes();
    let start = bytes.len();
    bytes.resize(start + stride * l, 0);
    for i in 0..l {
        let m = grid.centered_to_storage(i);
        for j in 0..l {
            if mask.contains(m, grid.centered_to_storage(j)) {
                bytes[start + i * stride + j / 8] |= 1 << (7 - j % 8);
            }
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// Splits `count` whitespace-separated header tokens (skipping `#`
/// comments) and returns them with the offset of the raster.
fn pnm_header(bytes: &[u8], count: usize) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::with_capacity(count);
    let mut i = 0;
    while tokens.len() < count {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'#') {
            if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return Err(Error::Parse("truncated PNM header".into()));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
    }
    // One whitespace byte separates the header from binary data.
    Ok((tokens, i + 1))
}

fn parse_tok(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("bad PNM header value '{s}'")))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locop::{eigh, LocOperator};
    use crate::signal::Window;

    fn grid(l: usize) -> PhaseGrid {
        PhaseGrid::new(l).unwrap()
    }

    #[test]
    fn field_csv_round_trip_and_orientation() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(16);
        let f = RealField::from_fn(g, |m, n| (m * 16 + n) as f64 / 7.0);
        let p = dir.path().join("f.csv");
        write_field_csv(&p, &f).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("L,delta"));
        assert_eq!(lines.next(), Some("16,0.25"));
        // Row L/2, column L/2 is the origin cell (0, 0).
        let row8: Vec<&str> = text.lines().nth(2 + 8).unwrap().split(',').collect();
        assert_eq!(row8[8], "0");
        assert_eq!(read_field_csv(&p).unwrap(), f);
    }

    #[test]
    fn pgm_scaling_and_crop() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(16);
        let f = RealField::from_fn(g, |m, n| if (m, n) == (0, 0) { 1.0 } else { 0.25 });
        let p = dir.path().join("f.pgm");
        let side = write_field_pgm(&p, &f).unwrap();
        assert_eq!((side.min, side.max, side.size), (0.25, 1.0, 16));
        let (w, h, px) = read_pgm16(&p).unwrap();
        assert_eq!((w, h), (16, 16));
        let brightest = px.iter().enumerate().max_by_key(|(_, v)| **v).unwrap().0;
        assert_eq!((brightest / 16, brightest % 16), (8, 8));
        assert_eq!(px[brightest], 65535);
        let json: PgmSidecar =
            serde_json::from_str(&fs::read_to_string(sidecar_path(&p)).unwrap()).unwrap();
        assert_eq!(json, side);

        let side = write_field_pgm_cropped(&p, &f, Some(3)).unwrap();
        assert_eq!((side.size, side.first_index), (6, -3));
        let (w, _, px) = read_pgm16(&p).unwrap();
        assert_eq!(w, 6);
        assert_eq!(px[3 * 6 + 3], 65535);
    }

    #[test]
    fn eigenvalue_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        write_eigenvalues_csv(&p, &[0.9, 0.5]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "k,lambda\n1,0.9\n2,0.5\n");
        assert_eq!(read_eigenvalues_csv(&p).unwrap(), vec![0.9, 0.5]);
        write_oracle_csv(&p, &[0.9]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "k,lambda\n0,0.9\n");
    }

    #[test]
    fn eigenvector_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(16);
        let mask = DomainMask::disk(g, (0.0, 0.0), 1.0).unwrap();
        let es = eigh(&LocOperator::from_mask(&mask, Window::gaussian(g)).unwrap()).unwrap();
        let m = write_eigenvectors(dir.path(), "vecs", &es).unwrap();
        assert_eq!((m.len, m.count), (16, 16));
        let (m2, vs) = read_eigenvectors(dir.path(), "vecs").unwrap();
        assert_eq!(m, m2);
        assert_eq!(vs, es.eigenvectors());
    }

    #[test]
    fn masks_from_files() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(64);
        let disk = DomainMask::disk(g, (0.5, -0.25), 1.5).unwrap();

        let p4 = dir.path().join("m.pbm");
        write_mask_pbm(&p4, &disk).unwrap();
        assert_eq!(read_mask(&p4, g).unwrap(), disk);
        assert!(read_mask(&p4, grid(32)).is_err());

        // Plain P1 with a comment; the single set pixel is the origin.
        let mut p1 = String::from("P1\n# origin\n8 8\n");
        for i in 0..8 {
            let row: Vec<&str> = (0..8).map(|j| if (i, j) == (4, 4) { "1" } else { "0" }).collect();
            p1.push_str(&row.join(" "));
            p1.push('\n');
        }
        let path = dir.path().join("m1.pbm");
        fs::write(&path, p1).unwrap();
        let m = read_mask(&path, grid(8)).unwrap();
        assert_eq!(m.count(), 1);
        assert!(m.contains(0, 0));

        let js = dir.path().join("m.json");
        fs::write(&js, r#"{"shape":"disk","R":1.5,"center":[0.5,-0.25]}"#).unwrap();
        assert_eq!(read_mask(&js, g).unwrap(), disk);
        fs::write(&js, r#"{"shape":"disk","R":9.0}"#).unwrap();
        assert!(matches!(read_mask(&js, g), Err(Error::DomainOverflow(_))));
        assert!(read_mask(dir.path().join("missing.json"), g).is_err());
    }

    #[test]
    fn signal_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(32);
        let s = Signal::random(g, 4);
        let p = dir.path().join("s.csv");
        write_signal_csv(&p, &s).unwrap();
        assert_eq!(read_signal_csv(&p, g).unwrap(), s);
        let err = read_signal_csv(&p, grid(64)).unwrap_err().to_string();
        assert!(err.contains("32 samples") && err.contains("L=64"), "{err}");
    }
}
