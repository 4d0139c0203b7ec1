//! MatrixMarket coordinate files for Hermitian matrices.
//!
//! Written as `%%MatrixMarket matrix coordinate complex hermitian` with 1-based indices.
//! Entries are the stored upper triangle (`row <= col`); the lower triangle is implied.

use std::io::{BufRead, Write};

use crate::tb_model::{RawHermitian, SparseHermitian};
use crate::{Complex, Error, Result};

const HEADER: &str = "%%MatrixMarket matrix coordinate complex hermitian";

/// `comments` are emitted as `%` lines after the banner.
pub fn write_matrix_market<W: Write>(
    mut w: W,
    h: &SparseHermitian,
    comments: &[String],
) -> std::io::Result<()> {
    writeln!(w, "{HEADER}")?;
    writeln!(w, "% storage: upper triangle, row <= col")?;
    for c in comments {
        for line in c.lines() {
            writeln!(w, "% {line}")?;
        }
    }
    writeln!(w, "{} {} {}", h.dim(), h.dim(), h.nnz_stored())?;
    for e in h.entries() {
        writeln!(
            w,
            "{} {} {:e} {:e}",
            e.row + 1,
            e.col + 1,
            e.value.re,
            e.value.im
        )?;
    }
    Ok(())
}

/// Reads a coordinate file. `complex`/`real` fields and `hermitian`/`symmetric`/`general`
/// symmetry are accepted; entries from either triangle are folded onto the upper one.
/// A `general` file must list both triangles consistently.
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<SparseHermitian> {
    let mut lines = r.lines();
    let banner = lines
        .next()
        .ok_or_else(|| Error::Parse("empty MatrixMarket file".into()))??;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5
        || tokens[0] != "%%matrixmarket"
        || tokens[1] != "matrix"
        || tokens[2] != "coordinate"
    {
        return Err(Error::Parse(format!(
            "unsupported MatrixMarket banner {banner:?}"
        )));
    }
    let complex = match tokens[3].as_str() {
        "complex" => true,
        "real" | "integer" => false,
        other => return Err(Error::Parse(format!("unsupported field type {other}"))),
    };
    let general = match tokens[4].as_str() {
        "general" => true,
        "hermitian" | "symmetric" => false,
        other => return Err(Error::Parse(format!("unsupported symmetry {other}"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if size.is_none() {
            if fields.len() != 3 {
                return Err(Error::Parse(format!("bad size line {t:?}")));
            }
            let p = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad size line {t:?}")))
            };
            let (rows, cols) = (p(fields[0])?, p(fields[1])?);
            if rows != cols {
                return Err(Error::InvalidMatrix("matrix is not square".into()));
            }
            size = Some((rows, p(fields[2])?));
            continue;
        }
        let want = if complex { 4 } else { 3 };
        if fields.len() != want {
            return Err(Error::Parse(format!("bad entry line {t:?}")));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&i| i >= 1)
                .map(|i| i - 1)
                .ok_or_else(|| Error::Parse(format!("bad index in {t:?}")))
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad value in {t:?}")))
        };
        let (row, col) = (idx(fields[0])?, idx(fields[1])?);
        let value = Complex::new(num(fields[2])?, if complex { num(fields[3])? } else { 0.0 });
        triplets.push((row, col, value));
    }
    let (dim, count) = size.ok_or_else(|| Error::Parse("missing size line".into()))?;
    if triplets.len() != count {
        return Err(Error::Parse(format!(
            "expected {count} entries, found {}",
            triplets.len()
        )));
    }
    if general {
        // Keep the upper triangle, checking that the lower one mirrors it.
        let mut upper = Vec::new();
        let mut lower = std::collections::BTreeMap::new();
        for (r, c, v) in triplets {
            if r <= c {
                upper.push((r, c, v));
            } else {
                lower.insert((c, r), v.conj());
            }
        }
        let raw = RawHermitian::from_triplets(dim, upper)?;
        for e in raw.entries() {
            if e.row != e.col {
                let mirrored = lower.remove(&(e.row, e.col)).unwrap_or_default();
                if (mirrored - e.value).norm() > 1e-12 * e.value.norm().max(1.0) {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({},{}) breaks hermiticity",
                        e.row + 1,
                        e.col + 1
                    )));
                }
            }
        }
        if lower.values().any(|v| v.norm() != 0.0) {
            return Err(Error::InvalidMatrix(
                "lower triangle has entries without upper partners".into(),
            ));
        }
        return SparseHermitian::from_raw(raw);
    }
    SparseHermitian::from_raw(RawHermitian::from_triplets(dim, triplets)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_then_read() {
        let h = SparseHermitian::from_triplets(
            2,
            [
                (0, 0, Complex::new(1.25, 0.0)),
                (1, 3, Complex::new(0.1, -0.7)),
                (2, 2, Complex::new(-3.0, 0.0)),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &h, &["seed = 1".to_string()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(HEADER));
        assert!(text.contains("\n2 4 1e-1 -7e-1\n"));
        let back = read_matrix_market(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn general_real_file() {
        let text =
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n1 2 2.0\n2 1 2.0\n";
        let h = read_matrix_market(std::io::Cursor::new(text)).unwrap();
        assert_eq!(h.get(1, 0), Complex::new(2.0, 0.0));
        let bad = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 2.0\n2 1 3.0\n";
        assert!(read_matrix_market(std::io::Cursor::new(bad)).is_err());
    }

    #[test]
    fn entry_count_checked() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n";
        assert!(read_matrix_market(std::io::Cursor::new(text)).is_err());
    }
}
