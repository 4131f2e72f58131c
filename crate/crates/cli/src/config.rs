//! Run configuration: a JSON document mirroring the command-line surface.
//! Flags override file values; validation happens before any computation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use logmean::fields::{HARMONIC_LABELS, PANHARMONIC_LABELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// One JSON document describing a run. Every field is optional; the
/// command-specific defaults fill the gaps after flags are merged in.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    /// Check families (verify) or sweep kind (sweep).
    #[serde(default)]
    pub checks: Vec<String>,
    /// Catalog field labels; also the boundary-data label for `solve`.
    #[serde(default)]
    pub fields: Vec<String>,
    #[serde(default)]
    pub dims: Vec<usize>,
    pub radial_order: Option<Vec<usize>>,
    pub angular_order: Option<usize>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub mu: Vec<f64>,
    pub seed: Option<u64>,
    pub walks: Option<usize>,
    pub eps: Option<f64>,
    /// Domain radius for `solve` (unit ball by default).
    pub radius: Option<f64>,
    /// Query points for `solve`.
    #[serde(default)]
    pub at: Vec<Vec<f64>>,
    /// Argument grid for `bessel`.
    #[serde(default)]
    pub t: Vec<f64>,
    /// Number of random admissible balls per (field, dimension) in verify.
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config `{}`: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("invalid config `{}`: {e}", path.display()))
    }

    /// Overlay non-empty flag values on top of this config.
    pub fn merge_flags(&mut self, flags: &crate::Flags) {
        if !flags.check.is_empty() {
            self.checks = flags.check.clone();
        }
        if !flags.fields.is_empty() {
            self.fields = flags.fields.clone();
        }
        if !flags.dims.is_empty() {
            self.dims = flags.dims.clone();
        }
        if !flags.radial_order.is_empty() {
            self.radial_order = Some(flags.radial_order.clone());
        }
        if let Some(v) = flags.angular_order {
            self.angular_order = Some(v);
        }
        if let Some(v) = flags.tol {
            self.tol = Some(v);
        }
        if !flags.mu.is_empty() {
            self.mu = flags.mu.clone();
        }
        if let Some(v) = flags.seed {
            self.seed = Some(v);
        }
        if let Some(v) = flags.walks {
            self.walks = Some(v);
        }
        if let Some(v) = flags.eps {
            self.eps = Some(v);
        }
        if let Some(v) = flags.radius {
            self.radius = Some(v);
        }
        if !flags.at.is_empty() {
            self.at = flags.at.iter().map(|p| p.coords.clone()).collect();
        }
        if !flags.t.is_empty() {
            self.t = flags.t.clone();
        }
        if let Some(v) = flags.samples {
            self.samples = Some(v);
        }
        if let Some(v) = &flags.out {
            self.out = Some(v.clone());
        }
        if let Some(v) = flags.format {
            self.format = Some(v);
        }
    }

    /// Reject unknown labels and invalid dimensions up front.
    pub fn validate_catalog(&self) -> Result<(), String> {
        for label in &self.fields {
            let known = HARMONIC_LABELS.contains(&label.as_str())
                || PANHARMONIC_LABELS.contains(&label.as_str())
                || label == "counterexample_disc"
                || label.starts_with("const")
                || label == "cos_2theta";
            if !known {
                return Err(format!("unknown field label `{label}`"));
            }
        }
        for &d in &self.dims {
            if d < 2 {
                return Err(format!("dimension must be ≥ 2, got {d}"));
            }
        }
        if let Some(orders) = &self.radial_order {
            if orders.is_empty() {
                return Err("radial order list must not be empty".into());
            }
            for &order in orders {
                if order < 2 {
                    return Err(format!("radial order must be ≥ 2, got {order}"));
                }
            }
        }
        if let Some(order) = self.angular_order {
            if order < 4 {
                return Err(format!("angular order must be ≥ 4, got {order}"));
            }
        }
        Ok(())
    }
}

/// A `--at` query point parsed from `x0,x1,...`.
#[derive(Debug, Clone)]
pub struct QueryPoint {
    pub coords: Vec<f64>,
}

impl std::str::FromStr for QueryPoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords: Result<Vec<f64>, _> = s.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match coords {
            Ok(coords) if coords.len() >= 2 => Ok(QueryPoint { coords }),
            _ => Err(format!("invalid point `{s}`; expected `x0,x1[,...]`")),
        }
    }
}
