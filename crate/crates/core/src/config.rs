//! Run configuration: one TOML file with `[kernel]`, `[initial]`, `[scheme]`, `[sweep]`
//! and `[stability]` sections, every key optional.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::InitialFamily;
use crate::kernels::{periodize, InfiniteKernel, PeriodicKernel};
use crate::scheme::RhsPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    Gaussian,
    Laplace,
    /// `1 + cos(2π m x)`: satisfies every hypothesis except monotone decay.
    Cosine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub family: KernelFamily,
    pub c: f64,
    pub n_points: usize,
    pub tail_tol: f64,
    /// Cosine kernel frequency.
    pub mode: u32,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection { family: KernelFamily::Gaussian, c: 10.0, n_points: 64, tail_tol: 1e-14, mode: 2 }
    }
}

impl KernelSection {
    /// The infinite-line kernel, or `None` for kernels defined only on the grid.
    pub fn infinite(&self) -> Result<Option<InfiniteKernel>> {
        match self.family {
            KernelFamily::Gaussian => InfiniteKernel::gaussian(self.c).map(Some),
            KernelFamily::Laplace => InfiniteKernel::laplace(self.c).map(Some),
            KernelFamily::Cosine => Ok(None),
        }
    }

    pub fn periodic(&self, n_points: usize) -> Result<PeriodicKernel> {
        match self.infinite()? {
            Some(k) => periodize(&k, n_points, self.tail_tol),
            None => {
                let m = self.mode as f64;
                let samples = (0..n_points).map(|j| 1.0 + (2.0 * PI * m * j as f64 / n_points as f64).cos()).collect();
                PeriodicKernel::from_samples(format!("cosine(m={})", self.mode), samples)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    GaussianBump,
    LaplaceBump,
    SingleMode,
    /// Cosine of the mode with the largest `|g|` at the configured time step.
    WorstMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub family: InitialKind,
    pub a: f64,
    pub center: f64,
    pub k: i64,
    pub amplitude: f64,
    /// Tolerance on the coefficient tail of the reference series.
    pub coefficient_tol: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            family: InitialKind::GaussianBump,
            a: 1.0,
            center: 0.5,
            k: 1,
            amplitude: 1.0,
            coefficient_tol: 1e-2,
        }
    }
}

impl InitialSection {
    /// Closed-form family for `kind`; `None` for worst-mode data, which depends on the kernel.
    pub fn family_for(&self, kind: InitialKind) -> Option<InitialFamily> {
        match kind {
            InitialKind::GaussianBump => Some(InitialFamily::gaussian_bump(self.a, self.center)),
            InitialKind::LaplaceBump => Some(InitialFamily::laplace_bump(self.center)),
            InitialKind::SingleMode => Some(InitialFamily::single_mode(self.k, self.amplitude)),
            InitialKind::WorstMode => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    pub dt: f64,
    pub n_steps: usize,
    pub snapshot_every: usize,
    pub rhs: RhsPath,
    pub record_spectra: bool,
}

impl Default for SchemeSection {
    fn default() -> Self {
        SchemeSection { dt: 1.0 / 64.0, n_steps: 64, snapshot_every: 16, rhs: RhsPath::Direct, record_spectra: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub t_final: f64,
    pub grids: Vec<usize>,
    pub dts: Vec<f64>,
    pub families: Vec<InitialKind>,
    /// Reference series length; `0` means `max(256, 8N)`.
    pub max_mode: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            t_final: 1.0,
            grids: vec![32, 64, 128, 256],
            dts: vec![1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0, 1.0 / 1024.0],
            families: vec![InitialKind::GaussianBump, InitialKind::LaplaceBump],
            max_mode: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilitySection {
    /// Probe time steps as multiples of the sharp threshold.
    pub probe_factors: Vec<f64>,
    /// Additional absolute probe time steps.
    pub probe_dts: Vec<f64>,
    /// Steps of worst-mode data per probe; `0` skips the empirical check.
    pub probe_steps: usize,
}

impl Default for StabilitySection {
    fn default() -> Self {
        StabilitySection { probe_factors: vec![0.5, 0.9, 1.0, 1.1, 1.25], probe_dts: vec![1.0], probe_steps: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub kernel: KernelSection,
    pub initial: InitialSection,
    pub scheme: SchemeSection,
    pub sweep: SweepSection,
    pub stability: StabilitySection,
}

impl Config {
    /// Reads `path` (if given), applies `section.key=value` overrides, and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml_str(&text, overrides)
    }

    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut root: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut root, o)?;
        }
        let cfg: Config =
            toml::Value::Table(root).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let k = &self.kernel;
        if k.n_points < 4 || !k.n_points.is_multiple_of(2) {
            return bad(format!("kernel.n_points must be even and at least 4, got {}", k.n_points));
        }
        if !(k.c.is_finite() && k.c > 0.0) {
            return bad(format!("kernel.c must be positive, got {}", k.c));
        }
        if !(k.tail_tol > 0.0 && k.tail_tol < 1.0) {
            return bad(format!("kernel.tail_tol must lie in (0, 1), got {}", k.tail_tol));
        }
        if k.family == KernelFamily::Cosine && k.mode == 0 {
            return bad("kernel.mode must be positive for the cosine kernel".into());
        }
        let s = &self.scheme;
        if !(s.dt.is_finite() && s.dt >= 0.0) {
            return bad(format!("scheme.dt must be nonnegative, got {}", s.dt));
        }
        if s.snapshot_every == 0 {
            return bad("scheme.snapshot_every must be at least 1".into());
        }
        let w = &self.sweep;
        if !(w.t_final.is_finite() && w.t_final >= 0.0) {
            return bad(format!("sweep.t_final must be nonnegative, got {}", w.t_final));
        }
        if w.grids.iter().any(|&n| n < 4 || n % 2 != 0) {
            return bad("sweep.grids entries must be even and at least 4".into());
        }
        if w.dts.iter().any(|&d| !(d.is_finite() && d > 0.0)) {
            return bad("sweep.dts entries must be positive".into());
        }
        if self.initial.coefficient_tol <= 0.0 {
            return bad("initial.coefficient_tol must be positive".into());
        }
        Ok(())
    }

    /// Canonical TOML of the resolved configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`Config::to_toml`], hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

/// `section.key=value`; the value is read as a TOML value, or as a bare string if that fails.
fn apply_override(root: &mut toml::Table, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{spec}' is not of the form section.key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| Error::Config(format!("override key '{path}' is not of the form section.key")))?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let table = root
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("'{section}' is not a section")))?;
    table.insert(key.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let cfg = Config::from_toml_str("", &[]).unwrap();
        assert_eq!(cfg, Config::default());
        assert_eq!(cfg.kernel.c, 10.0);
        assert_eq!(cfg.sweep.t_final, 1.0);
    }

    #[test]
    fn file_values_and_overrides() {
        let text = "[kernel]\nfamily = \"laplace\"\nc = 5.0\n[sweep]\ngrids = [8, 16]\n";
        let cfg =
            Config::from_toml_str(text, &["kernel.n_points=128".into(), "initial.family=laplace-bump".into()]).unwrap();
        assert_eq!(cfg.kernel.family, KernelFamily::Laplace);
        assert_eq!(cfg.kernel.n_points, 128);
        assert_eq!(cfg.initial.family, InitialKind::LaplaceBump);
        assert_eq!(cfg.sweep.grids, vec![8, 16]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Config::from_toml_str("[kernel]\nn_points = 15\n", &[]), Err(Error::Config(_))));
        assert!(matches!(Config::from_toml_str("[kernel]\nbogus = 1\n", &[]), Err(Error::Config(_))));
        assert!(matches!(Config::from_toml_str("not toml [", &[]), Err(Error::Config(_))));
        assert!(matches!(Config::from_toml_str("", &["nodot=1".into()]), Err(Error::Config(_))));
        assert!(matches!(Config::from_toml_str("", &["kernel.c=-1".into()]), Err(Error::Config(_))));
    }

    #[test]
    fn digest_tracks_resolved_values() {
        let a = Config::from_toml_str("", &[]).unwrap();
        let b = Config::from_toml_str("[kernel]\nc = 10.0\n", &[]).unwrap();
        let c = Config::from_toml_str("", &["kernel.c=11".into()]).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
        assert_eq!(Config::from_toml_str(&a.to_toml(), &[]).unwrap(), a);
    }

    #[test]
    fn cosine_kernel_from_config() {
        let cfg = Config::from_toml_str("[kernel]\nfamily = \"cosine\"\nn_points = 32\n", &[]).unwrap();
        let pk = cfg.kernel.periodic(32).unwrap();
        assert!(!pk.assumptions().overall);
        assert!(cfg.kernel.infinite().unwrap().is_none());
    }
}
