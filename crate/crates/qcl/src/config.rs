use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qcl_core::theorems::TheoremId;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::spec::{FieldSpec, SurfaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Theorem(pub TheoremId);

impl FromStr for Theorem {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        TheoremId::parse(s).map(Theorem).ok_or_else(|| {
            let names: Vec<&str> = TheoremId::ALL.iter().map(|t| t.name()).collect();
            CliError::usage(format!("unknown theorem `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.name())
    }
}

impl TryFrom<String> for Theorem {
    type Error = CliError;
    fn try_from(s: String) -> Result<Self, CliError> {
        s.parse()
    }
}

impl From<Theorem> for String {
    fn from(t: Theorem) -> String {
        t.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything a run needs. Missing optional fields fall back to the theorem's
/// defaults when the run starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub theorem: Option<Theorem>,
    pub f: FieldSpec,
    pub q0: [f64; 4],
    pub surface: Option<SurfaceSpec>,
    /// Gauss–Legendre orders; `verify` uses the first, `convergence` all of them.
    pub orders: Vec<usize>,
    pub panels: usize,
    pub tol: Option<f64>,
    pub format: Format,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            theorem: None,
            f: FieldSpec::default(),
            q0: [0.0; 4],
            surface: None,
            orders: Vec::new(),
            panels: 1,
            tol: None,
            format: Format::Json,
            seed: 0,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.q0.iter().any(|v| !v.is_finite()) {
            return Err(CliError::usage("q0 must be finite"));
        }
        if self.orders.contains(&0) || self.panels == 0 {
            return Err(CliError::usage("quadrature orders and panels must be positive"));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(CliError::usage("tolerance must be positive"));
            }
        }
        Ok(())
    }

    pub fn theorem(&self) -> Result<TheoremId, CliError> {
        self.theorem.map(|t| t.0).ok_or_else(|| CliError::usage("no theorem given (--theorem)"))
    }

    pub fn tolerance(&self, t: TheoremId) -> f64 {
        self.tol.unwrap_or_else(|| t.default_tolerance())
    }

    pub fn surface(&self, t: TheoremId) -> SurfaceSpec {
        self.surface.unwrap_or_else(|| SurfaceSpec::from_kind(&t.default_surface(self.q0)))
    }
}

/// Gauss–Legendre order used when none is configured.
pub fn default_order(t: TheoremId) -> usize {
    if t.is_bi() {
        24
    } else {
        32
    }
}
