use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checkers::{ToleranceModel, CHECKER_IDS};
use crate::error::{Error, Result};
use crate::generate::PerturbationKind;
use crate::schatten::SchattenIndex;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides the configured worker count.
pub const WORKERS_ENV: &str = "LRPERTURB_WORKERS";

/// A batch of seeded instances. See `configs/default.json` for the layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub schema_version: u32,
    pub trials: usize,
    pub seed: u64,
    /// `(m, n)` pairs, written as two-element arrays.
    pub dims: Vec<(usize, usize)>,
    pub ks: Vec<usize>,
    pub ps: Vec<SchattenIndex>,
    pub spectra: Vec<SpectrumTemplate>,
    pub perturbations: Vec<PerturbationTemplate>,
    /// Bound ids to run; all when absent.
    #[serde(default)]
    pub checkers: Option<Vec<String>>,
    #[serde(default = "default_kappa")]
    pub tolerance_kappa: f64,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_kappa() -> f64 {
    ToleranceModel::DEFAULT_KAPPA
}

/// Singular value profile of the generated matrices, before the per-trial
/// amplitude is applied. `j` runs from 1 to `r = min(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumTemplate {
    /// All ones: no gap anywhere.
    Flat,
    /// `σ_j ∈ [1, 1.5]` for `j ≤ k`, then `σ_{k+1} = gap_ratio` decreasing
    /// linearly to `gap_ratio / 2`.
    Gapped { gap_ratio: f64 },
    /// `σ_j = rate^{j−1}`.
    Decaying { rate: f64 },
}

impl SpectrumTemplate {
    pub fn key(&self) -> String {
        match self {
            Self::Flat => "flat".into(),
            Self::Gapped { gap_ratio } => format!("gapped({gap_ratio})"),
            Self::Decaying { rate } => format!("decaying({rate})"),
        }
    }

    /// Non-ascending singular values for an `m×n` matrix targeted at rank `k`.
    pub fn sigmas(&self, m: usize, n: usize, k: usize) -> Vec<f64> {
        let r = m.min(n);
        (1..=r)
            .map(|j| match *self {
                Self::Flat => 1.0,
                Self::Gapped { gap_ratio } => {
                    if j <= k {
                        1.0 + 0.5 * (k - j) as f64 / k as f64
                    } else {
                        let tail = (r - k).max(1) as f64;
                        gap_ratio * (1.0 - 0.5 * (j - k - 1) as f64 / tail)
                    }
                }
                Self::Decaying { rate } => rate.powi(j as i32 - 1),
            })
            .collect()
    }

    fn validate(&self, field: &str) -> Result<()> {
        let bad = |what: &str, v: f64| Error::config(field, format!("{what} must lie in (0, 1), got {v}"));
        match *self {
            Self::Flat => Ok(()),
            Self::Gapped { gap_ratio } if !(gap_ratio > 0.0 && gap_ratio < 1.0) => Err(bad("gap_ratio", gap_ratio)),
            Self::Decaying { rate } if !(rate > 0.0 && rate < 1.0) => Err(bad("rate", rate)),
            _ => Ok(()),
        }
    }
}

/// A perturbation without its seed; seeds are derived per instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationTemplate {
    pub kind: PerturbationKind,
    pub magnitude: f64,
}

impl PerturbationTemplate {
    pub fn key(&self) -> String {
        format!("{}({})", self.kind.as_str(), self.magnitude)
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("suite config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        if self.dims.is_empty() {
            return Err(Error::config("dims", "must not be empty"));
        }
        if let Some((i, _)) = self.dims.iter().enumerate().find(|(_, (m, n))| *m == 0 || *n == 0) {
            return Err(Error::config(format!("dims[{i}]"), "dimensions must be positive"));
        }
        if self.ks.is_empty() {
            return Err(Error::config("ks", "must not be empty"));
        }
        for (i, &k) in self.ks.iter().enumerate() {
            if k == 0 {
                return Err(Error::config(format!("ks[{i}]"), "must be >= 1"));
            }
            if !self.dims.iter().any(|&(m, n)| k < m.min(n)) {
                return Err(Error::config(format!("ks[{i}]"), format!("k = {k} is not below min(m, n) for any dims entry")));
            }
        }
        if self.ps.is_empty() {
            return Err(Error::config("ps", "must not be empty"));
        }
        if self.spectra.is_empty() {
            return Err(Error::config("spectra", "must not be empty"));
        }
        for (i, s) in self.spectra.iter().enumerate() {
            s.validate(&format!("spectra[{i}]"))?;
        }
        if self.perturbations.is_empty() {
            return Err(Error::config("perturbations", "must not be empty"));
        }
        for (i, t) in self.perturbations.iter().enumerate() {
            let spec = crate::generate::PerturbationSpec {
                kind: t.kind,
                magnitude: t.magnitude,
                seed: 0,
            };
            spec.validate()
                .map_err(|e| Error::config(format!("perturbations[{i}]"), e.to_string()))?;
        }
        if let Some(ids) = &self.checkers {
            for (i, id) in ids.iter().enumerate() {
                if !CHECKER_IDS.contains(&id.as_str()) {
                    return Err(Error::config(
                        format!("checkers[{i}]"),
                        format!("unknown bound id {id:?}; known: {}", CHECKER_IDS.join(", ")),
                    ));
                }
            }
        }
        if !(self.tolerance_kappa > 0.0 && self.tolerance_kappa.is_finite()) {
            return Err(Error::config("tolerance_kappa", "must be positive and finite"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers", "must be >= 1"));
        }
        Ok(())
    }

    /// Checkers selected by the config, in canonical order.
    pub fn selected_checkers(&self) -> Vec<&'static str> {
        CHECKER_IDS
            .iter()
            .copied()
            .filter(|id| self.checkers.as_ref().is_none_or(|c| c.iter().any(|x| x == id)))
            .collect()
    }

    /// Worker count: explicit override, then the environment, then the
    /// config, then 1.
    pub fn resolve_workers(&self, flag: Option<usize>) -> Result<usize> {
        if let Some(w) = flag {
            return if w == 0 { Err(Error::config("workers", "must be >= 1")) } else { Ok(w) };
        }
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            return match v.trim().parse::<usize>() {
                Ok(w) if w > 0 => Ok(w),
                _ => Err(Error::config(WORKERS_ENV, format!("expected a positive integer, got {v:?}"))),
            };
        }
        Ok(self.workers.unwrap_or(1))
    }
}
