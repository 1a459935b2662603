//! Relative permittivities of the host dielectric, the metal and the fiber
//! core as functions of vacuum wavelength.
//!
//! Time dependence is `exp(-i omega t)`, so absorbing media have `Im eps > 0`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
const C_LIGHT: f64 = 299_792_458.0;

/// Table header accepted by [`load_table`].
pub const TABLE_HEADER: &str = "wavelength_um,eps_re,eps_im";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub wavelength_um: f64,
    pub eps: C,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpticalMedium {
    Fixed(C),
    /// Free-electron metal, `eps = 1 - wp^2 / (w^2 + i gamma w)`.
    Drude {
        /// rad/s
        plasma_frequency: f64,
        /// rad/s
        damping: f64,
    },
    /// Sorted rows, linear interpolation in wavelength.
    Table(Vec<TableRow>),
}

impl OpticalMedium {
    /// Silver near 1 µm.
    pub fn silver() -> Self {
        OpticalMedium::Fixed(C::new(-50.0, 0.6))
    }

    /// Host dielectric used throughout the default design.
    pub fn host() -> Self {
        OpticalMedium::Fixed(C::new(2.0, 0.0))
    }

    /// Fiber core used by the default coupler.
    pub fn fiber_core() -> Self {
        OpticalMedium::Fixed(C::new(13.0, 0.0))
    }

    pub fn from_table(rows: Vec<TableRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("material table has no rows".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if !(r.wavelength_um > 0.0) || !r.eps.re.is_finite() || !r.eps.im.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "material table row {} is not a finite positive-wavelength entry",
                    i + 1
                )));
            }
        }
        if let Some(i) = rows.windows(2).position(|w| w[1].wavelength_um <= w[0].wavelength_um) {
            return Err(Error::NonMonotone { row: i + 2 });
        }
        Ok(OpticalMedium::Table(rows))
    }

    pub fn permittivity(&self, lambda_um: f64) -> Result<C> {
        if !(lambda_um > 0.0) || !lambda_um.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "vacuum wavelength must be positive, got {lambda_um}"
            )));
        }
        match self {
            OpticalMedium::Fixed(eps) => Ok(*eps),
            OpticalMedium::Drude { plasma_frequency, damping } => {
                let w = 2.0 * std::f64::consts::PI * C_LIGHT / (lambda_um * 1e-6);
                let wp2 = plasma_frequency * plasma_frequency;
                Ok(C::new(1.0, 0.0) - wp2 / C::new(w * w, damping * w))
            }
            OpticalMedium::Table(rows) => interpolate(rows, lambda_um),
        }
    }
}

fn interpolate(rows: &[TableRow], lambda: f64) -> Result<C> {
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    if lambda < first.wavelength_um || lambda > last.wavelength_um {
        return Err(Error::OutOfRange {
            lambda,
            min: first.wavelength_um,
            max: last.wavelength_um,
        });
    }
    let j = rows.partition_point(|r| r.wavelength_um <= lambda);
    if j == 0 {
        return Ok(first.eps);
    }
    let lo = rows[j - 1];
    if lo.wavelength_um == lambda || j == rows.len() {
        return Ok(lo.eps);
    }
    let hi = rows[j];
    let t = (lambda - lo.wavelength_um) / (hi.wavelength_um - lo.wavelength_um);
    Ok(C::new(
        lo.eps.re + t * (hi.eps.re - lo.eps.re),
        lo.eps.im + t * (hi.eps.im - lo.eps.im),
    ))
}

/// Parse the CSV table format. Blank lines and lines starting with `#` are
/// skipped; the first remaining line must be the header.
pub fn parse_table(text: &str) -> Result<OpticalMedium> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            let normalized: String = line.split(',').map(str::trim).collect::<Vec<_>>().join(",");
            if normalized != TABLE_HEADER {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header `{TABLE_HEADER}`, found `{line}`"),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let mut vals = [0.0; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("`{f}`: {e}"),
            })?;
        }
        rows.push((line_no, TableRow { wavelength_um: vals[0], eps: C::new(vals[1], vals[2]) }));
    }
    if !seen_header {
        return Err(Error::Parse { line: 0, message: "missing header".into() });
    }
    if let Some(w) = rows.windows(2).find(|w| w[1].1.wavelength_um <= w[0].1.wavelength_um) {
        return Err(Error::NonMonotone { row: w[1].0 });
    }
    OpticalMedium::from_table(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn load_table(path: impl AsRef<Path>) -> Result<OpticalMedium> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text)
}

/// Serialize table rows in the format read by [`load_table`]. Values are
/// written with round-trip precision.
pub fn format_table(rows: &[TableRow]) -> String {
    let mut out = String::new();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{:?},{:?},{:?}", r.wavelength_um, r.eps.re, r.eps.im);
    }
    out
}
