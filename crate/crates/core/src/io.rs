//! File formats.
//!
//! * FieldState: CSV `x,f,ft` plus a JSON sidecar `{t, l_minus, l_plus}` next
//!   to it (same stem, `.json` extension).
//! * ScatteringData: pretty JSON, complex numbers as `[re, im]`.
//! * Conservation log: CSV `t,E,P`.
//! * Asymptotic samples: CSV `x,t,frame,cos_lead,sin_lead,R_cos,R_sin,cos_total,sin_total`.
//! * Comparison metrics: JSON `{max, l2, windowed_l2, slope, stderr}`.
//!
//! Floats are written in shortest round-trip form, so repeated runs give
//! byte-identical files.

use crate::asymptotics::AsymptoticSample;
use crate::diagnostics::Metrics;
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::pde::EnergyRecord;
use crate::scattering::ScatteringData;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize, Deserialize)]
struct FieldRow {
    x: f64,
    f: f64,
    ft: f64,
}

/// Sidecar metadata of a FieldState CSV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub t: f64,
    pub l_minus: i64,
    pub l_plus: i64,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_field_csv(path: &Path, state: &FieldState) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for i in 0..state.len() {
        w.serialize(FieldRow { x: state.xs[i], f: state.f[i], ft: state.ft[i] })?;
    }
    w.flush()?;
    let side = Sidecar { t: state.t, l_minus: state.l_minus, l_plus: state.l_plus };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

/// Read a FieldState CSV. Without a sidecar the time is 0 and the windings
/// are read off the end values.
pub fn read_field_csv(path: &Path) -> Result<FieldState> {
    let mut r = csv::Reader::from_path(path)?;
    let (mut xs, mut f, mut ft) = (vec![], vec![], vec![]);
    for row in r.deserialize() {
        let row: FieldRow = row?;
        xs.push(row.x);
        f.push(row.f);
        ft.push(row.ft);
    }
    let side = sidecar_path(path);
    if side.exists() {
        let s: Sidecar = serde_json::from_str(&fs::read_to_string(side)?)?;
        FieldState::with_windings(xs, f, ft, s.t, s.l_minus, s.l_plus)
    } else {
        FieldState::new(xs, f, ft, 0.0)
    }
}

pub fn write_scattering_json(path: &Path, data: &ScatteringData) -> Result<()> {
    fs::write(path, data.to_json()?)?;
    Ok(())
}

pub fn read_scattering_json(path: &Path) -> Result<ScatteringData> {
    ScatteringData::from_json(&fs::read_to_string(path)?)
}

pub fn write_energy_csv(path: &Path, log: &[EnergyRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for rec in log {
        w.serialize(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_energy_csv(path: &Path) -> Result<Vec<EnergyRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct AsymRow {
    x: f64,
    t: f64,
    frame: String,
    cos_lead: f64,
    sin_lead: f64,
    #[serde(rename = "R_cos")]
    r_cos: f64,
    #[serde(rename = "R_sin")]
    r_sin: f64,
    cos_total: f64,
    sin_total: f64,
}

pub fn write_asymptote_csv(path: &Path, rows: &[AsymptoticSample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for a in rows {
        w.serialize(AsymRow {
            x: a.x,
            t: a.t,
            frame: a.frame.to_string(),
            cos_lead: a.cos_lead,
            sin_lead: a.sin_lead,
            r_cos: a.r_cos,
            r_sin: a.r_sin,
            cos_total: a.cos_total,
            sin_total: a.sin_total,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Header of the asymptote CSV, for consumers that check it.
pub const ASYMPTOTE_HEADER: &str = "x,t,frame,cos_lead,sin_lead,R_cos,R_sin,cos_total,sin_total";

pub fn write_metrics_json(path: &Path, m: &Metrics) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{uniform_grid, Field, KinkParams};

    #[test]
    fn field_round_trip_keeps_windings() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("kink.csv");
        let xs = uniform_grid(-5.0, 5.0, 0.5).unwrap();
        let st = KinkParams::new(0.3, 0.0, 1).unwrap().sample(&xs, 1.5).unwrap();
        write_field_csv(&p, &st).unwrap();
        let back = read_field_csv(&p).unwrap();
        assert_eq!(back, st);
        let head = fs::read_to_string(&p).unwrap();
        assert!(head.starts_with("x,f,ft\n"));
    }

    #[test]
    fn energy_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("energy.csv");
        write_energy_csv(&p, &[EnergyRecord { t: 0.0, e: 8.0, p: 0.0 }]).unwrap();
        assert!(fs::read_to_string(&p).unwrap().starts_with("t,E,P\n"));
        assert_eq!(read_energy_csv(&p).unwrap()[0].e, 8.0);
    }
}
