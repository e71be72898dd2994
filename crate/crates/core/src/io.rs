//! File formats: CSV arrays, JSON documents, atomic writes.
//!
//! CSV grid columns are written with Rust's shortest round-trip formatting
//! and value columns in exponent form, so files re-read bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::signal::{ComplexSpectrum, SignalKind, TimeTrace};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::file(path, "not a file path"))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| Error::file(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::file(path, e)
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::file(path, e))
}

/// Two-column CSV `header[0],header[1]`.
pub fn columns_csv(header: [&str; 2], x: &[f64], y: &[f64]) -> String {
    let mut s = format!("{},{}\n", header[0], header[1]);
    for (a, b) in x.iter().zip(y) {
        let _ = writeln!(s, "{a},{b:e}");
    }
    s
}

pub fn trace_csv(trace: &TimeTrace) -> String {
    columns_csv(["delta_t_ps", "value"], &trace.times(), &trace.values)
}

pub fn spectrum_csv(spec: &ComplexSpectrum) -> String {
    complex_csv("f_THz", &spec.frequencies(), &spec.values)
}

pub fn complex_csv(x_name: &str, x: &[f64], values: &[Complex64]) -> String {
    let mut s = format!("{x_name},re,im\n");
    for (f, v) in x.iter().zip(values) {
        let _ = writeln!(s, "{f},{:e},{:e}", v.re, v.im);
    }
    s
}

/// Parses a CSV with the given header into columns.
pub fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_csv(&text, header).map_err(|m| Error::file(path, m))
}

pub fn parse_csv(text: &str, header: &[&str]) -> std::result::Result<Vec<Vec<f64>>, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or("empty file")?;
    let got: Vec<&str> = first.split(',').map(str::trim).collect();
    if got != header {
        return Err(format!("expected header `{}`, found `{}`", header.join(","), first.trim()));
    }
    let mut cols = vec![Vec::new(); header.len()];
    for (no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(format!("line {}: expected {} fields, found {}", no + 1, header.len(), fields.len()));
        }
        for (c, f) in cols.iter_mut().zip(&fields) {
            let v: f64 = f.parse().map_err(|_| format!("line {}: `{f}` is not a number", no + 1))?;
            if !v.is_finite() {
                return Err(format!("line {}: non-finite value", no + 1));
            }
            c.push(v);
        }
    }
    if cols[0].is_empty() {
        return Err("no data rows".into());
    }
    Ok(cols)
}

/// Checks that `x` is uniformly spaced and returns `(x0, dx)`.
pub fn uniform_grid(x: &[f64]) -> std::result::Result<(f64, f64), String> {
    if x.len() < 2 {
        return Err("need at least two samples".into());
    }
    let dx = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    if !(dx > 0.0) {
        return Err("grid is not increasing".into());
    }
    for (j, v) in x.iter().enumerate() {
        if (v - (x[0] + j as f64 * dx)).abs() > 1e-6 * dx {
            return Err(format!("grid is not uniform at sample {j}"));
        }
    }
    Ok((x[0], dx))
}

pub fn read_trace(path: &Path, kind: SignalKind) -> Result<TimeTrace> {
    let cols = read_csv(path, &["delta_t_ps", "value"])?;
    let (t0, dt) = uniform_grid(&cols[0]).map_err(|m| Error::file(path, m))?;
    Ok(TimeTrace {
        kind,
        t0_ps: t0,
        dt_ps: dt,
        values: cols[1].clone(),
    })
}

pub fn read_spectrum(path: &Path, kind: SignalKind) -> Result<ComplexSpectrum> {
    let cols = read_csv(path, &["f_THz", "re", "im"])?;
    let (f0, df) = uniform_grid(&cols[0]).map_err(|m| Error::file(path, m))?;
    Ok(ComplexSpectrum {
        kind,
        f0_thz: f0,
        df_thz: df,
        values: cols[1].iter().zip(&cols[2]).map(|(&r, &i)| Complex64::new(r, i)).collect(),
    })
}
