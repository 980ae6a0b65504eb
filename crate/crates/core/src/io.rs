//! CSV/JSON artifacts and the run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::ConvergenceRecord;
use crate::error::Result;
use crate::kernels::PeriodicKernel;
use crate::scheme::EvolutionResult;
use crate::spectral;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Collects output paths relative to an output directory, in creation order.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        Ok(OutputDir { root, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.root.join(name)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_path(self.path(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        write_json(&self.path(name), value)
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn kernel_sample_rows(pk: &PeriodicKernel) -> Vec<Vec<String>> {
    let h = pk.spacing();
    pk.samples().iter().enumerate().map(|(j, v)| vec![j.to_string(), fmt_float(j as f64 * h), fmt_float(*v)]).collect()
}

/// `k, J̃_k, Ĵ_k, J̃_0 − J̃_k` over the grid's wavenumbers.
pub fn kernel_spectrum_rows(pk: &PeriodicKernel) -> Result<Vec<Vec<String>>> {
    spectral::wavenumbers(pk.n_points())
        .map(|k| {
            Ok(vec![
                k.to_string(),
                fmt_float(pk.dft_value(k)?),
                fmt_float(pk.hat_coefficient(k)?),
                fmt_float(pk.dft_gap(k)?),
            ])
        })
        .collect()
}

pub fn snapshot_rows(res: &EvolutionResult) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (step, g) in &res.snapshots {
        for (j, v) in g.values().iter().enumerate() {
            rows.push(vec![step.to_string(), j.to_string(), fmt_float(g.x(j)), fmt_float(v.re), fmt_float(v.im)]);
        }
    }
    rows
}

pub fn norm_rows(res: &EvolutionResult) -> Vec<Vec<String>> {
    res.norm_history
        .iter()
        .enumerate()
        .map(|(n, v)| vec![n.to_string(), fmt_float(res.time_of(n)), fmt_float(*v)])
        .collect()
}

pub const ERRORS_HEADER: [&str; 8] = ["N", "h", "dt", "t_final", "error", "family", "kernel", "blowup"];

pub fn error_rows<'a>(records: impl IntoIterator<Item = &'a ConvergenceRecord>) -> Vec<Vec<String>> {
    records
        .into_iter()
        .map(|r| {
            vec![
                r.n_points.to_string(),
                fmt_float(r.h),
                fmt_float(r.dt),
                fmt_float(r.t_final),
                fmt_float(r.error),
                r.initial_family.clone(),
                r.kernel_tag.clone(),
                r.blowup.to_string(),
            ]
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub wall_time: f64,
    pub exit_code: i32,
    pub blowup: bool,
    pub notes: Vec<String>,
}

impl RunManifest {
    /// Writes `manifest.json` into `dir`; call after every other output.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("manifest.json"), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 2.5e-8, 123456.789, 1e20, -7.25e-6, f64::MIN_POSITIVE] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(1e-9), "1e-9");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
    }

    #[test]
    fn outputs_are_tracked() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path().join("sub")).unwrap();
        out.csv("a.csv", &["x", "y"], vec![vec!["1".into(), "q,\"r\"".into()]]).unwrap();
        out.json("b.json", &serde_json::json!({"z": 1, "a": 2})).unwrap();
        assert_eq!(out.written(), ["a.csv", "b.json"]);
        let text = std::fs::read_to_string(out.root().join("a.csv")).unwrap();
        assert_eq!(text, "x,y\n1,\"q,\"\"r\"\"\"\n");
    }
}
