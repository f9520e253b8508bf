//! Run manifests and the CSV emission helpers shared by the command-line
//! tool. Output is deterministic: floats are printed with 17 significant
//! digits, lines end with LF, and the manifest carries no timestamps.

use crate::cauchy::CauchyGrid;
use crate::error::{E1Error, Result};
use crate::rotsym::RadialProfile;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const MANIFEST_SCHEMA: &str = "e1lab-manifest/1";

/// Description of one produced file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OutputRecord {
    pub file: String,
    pub rows: usize,
}

/// JSON manifest written next to every CSV batch.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            schema: MANIFEST_SCHEMA.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set_param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn record_output(&mut self, file: &Path, rows: usize) {
        self.outputs.push(OutputRecord {
            file: file
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_else(|| file.display().to_string()),
            rows,
        });
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| E1Error::InvalidInput(format!("manifest serialization: {e}")))?;
        std::fs::write(path, body + "\n")
            .map_err(|e| E1Error::InvalidInput(format!("write {}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| E1Error::InvalidInput(format!("read {}: {e}", path.display())))?;
        let manifest: RunManifest = serde_json::from_str(&body)
            .map_err(|e| E1Error::InvalidInput(format!("parse {}: {e}", path.display())))?;
        if manifest.schema != MANIFEST_SCHEMA {
            return Err(E1Error::InvalidInput(format!(
                "unsupported manifest schema `{}`",
                manifest.schema
            )));
        }
        Ok(manifest)
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn open_writer(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let file = std::fs::File::create(path)
        .map_err(|e| E1Error::InvalidInput(format!("create {}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(file))
}

fn io_err(path: &Path, e: std::io::Error) -> E1Error {
    E1Error::InvalidInput(format!("write {}: {e}", path.display()))
}

/// CSV of a radial profile: r,w,u,family,rho0. The u and rho0 columns are
/// left empty when not available. Returns the number of data rows.
pub fn write_rotsym_csv(path: &Path, profile: &RadialProfile) -> Result<usize> {
    let mut out = open_writer(path)?;
    writeln!(out, "r,w,u,family,rho0").map_err(|e| io_err(path, e))?;
    let family = profile.family.label();
    let rho0 = profile
        .family
        .rho0()
        .map(fmt_f64)
        .unwrap_or_default();
    for i in 0..profile.len() {
        let u = profile
            .u
            .as_ref()
            .map(|u| fmt_f64(u[i]))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(profile.r[i]),
            fmt_f64(profile.w[i]),
            u,
            family,
            rho0
        )
        .map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))?;
    Ok(profile.len())
}

/// CSV of one or more Cauchy slices: r,phi,theta,alpha,H,m.
pub fn write_cauchy_csv(path: &Path, grids: &[&CauchyGrid]) -> Result<usize> {
    let mut out = open_writer(path)?;
    writeln!(out, "r,phi,theta,alpha,H,m").map_err(|e| io_err(path, e))?;
    let mut rows = 0;
    for grid in grids {
        for (phi, st) in grid.phi.iter().zip(grid.states.iter()) {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(grid.r),
                fmt_f64(*phi),
                fmt_f64(st.theta),
                fmt_f64(st.alpha),
                fmt_f64(st.h),
                fmt_f64(st.m)
            )
            .map_err(|e| io_err(path, e))?;
            rows += 1;
        }
    }
    out.flush().map_err(|e| io_err(path, e))?;
    Ok(rows)
}

/// CSV of the diagonal-mode spectrum: l,Q.
pub fn write_secondvar_csv(path: &Path, spectrum: &[(i64, f64)]) -> Result<usize> {
    let mut out = open_writer(path)?;
    writeln!(out, "l,Q").map_err(|e| io_err(path, e))?;
    for (l, q) in spectrum {
        writeln!(out, "{},{}", l, fmt_f64(*q)).map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))?;
    Ok(spectrum.len())
}
