//! Matrix Market coordinate format, complex Hermitian and general.

use std::io::{BufRead, Write};

use crate::error::{LinalgError, Result};
use crate::scalar::{Real, C};
use crate::sparse::Csr;

/// Writes the lower triangle as `coordinate complex hermitian`.
pub fn write_hermitian<T: Real, W: Write>(out: &mut W, a: &Csr<T>, comments: &[String]) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(LinalgError::MatrixMarket("hermitian output needs a square matrix".into()));
    }
    writeln!(out, "%%MatrixMarket matrix coordinate complex hermitian")?;
    for c in comments {
        for line in c.lines() {
            writeln!(out, "% {line}")?;
        }
    }
    let lower: Vec<(usize, usize, C<T>)> = a.triplets().into_iter().filter(|t| t.0 >= t.1).collect();
    writeln!(out, "{} {} {}", a.rows(), a.cols(), lower.len())?;
    let mut sorted = lower;
    sorted.sort_by_key(|t| (t.1, t.0));
    for (i, j, v) in sorted {
        writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im)?;
    }
    Ok(())
}

/// Reads real or complex coordinate data in general, symmetric or hermitian symmetry.
pub fn read<T: Real, R: BufRead>(input: R) -> Result<Csr<T>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| LinalgError::MatrixMarket("empty input".into()))??;
    let h: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
        return Err(LinalgError::MatrixMarket(format!("unsupported header: {header}")));
    }
    let complex = match h[3].as_str() {
        "complex" => true,
        "real" | "integer" => false,
        f => return Err(LinalgError::MatrixMarket(format!("unsupported field {f}"))),
    };
    let sym = h[4].clone();
    if !matches!(sym.as_str(), "general" | "symmetric" | "hermitian") {
        return Err(LinalgError::MatrixMarket(format!("unsupported symmetry {sym}")));
    }
    let mut size: Option<(usize, usize, usize)> = None;
    let mut trips = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if size.is_none() {
            let p = |s: &str| s.parse::<usize>().map_err(|e| LinalgError::MatrixMarket(e.to_string()));
            if f.len() != 3 {
                return Err(LinalgError::MatrixMarket(format!("bad size line: {t}")));
            }
            size = Some((p(f[0])?, p(f[1])?, p(f[2])?));
            continue;
        }
        let want = if complex { 4 } else { 3 };
        if f.len() < want {
            return Err(LinalgError::MatrixMarket(format!("bad entry: {t}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| LinalgError::MatrixMarket(e.to_string()));
        let i = num(f[0])? as usize - 1;
        let j = num(f[1])? as usize - 1;
        let v = C::new(T::lit(num(f[2])?), if complex { T::lit(num(f[3])?) } else { T::zero() });
        trips.push((i, j, v));
        if i != j {
            match sym.as_str() {
                "symmetric" => trips.push((j, i, v)),
                "hermitian" => trips.push((j, i, v.conj())),
                _ => {}
            }
        }
    }
    let (r, c, nnz) = size.ok_or_else(|| LinalgError::MatrixMarket("missing size line".into()))?;
    let stored = if sym == "general" { trips.len() } else { trips.iter().filter(|t| t.0 >= t.1).count() };
    if stored != nnz {
        return Err(LinalgError::MatrixMarket(format!("expected {nnz} entries, found {stored}")));
    }
    Ok(Csr::from_triplets(r, c, trips))
}
