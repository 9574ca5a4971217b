//! JSON run configuration for the command-line front end.
//!
//! The schema is strict: unknown keys anywhere in the document are
//! rejected before any computation starts.

use crate::bvp::BvpSpec;
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Mirror of the problem description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub order: usize,
    pub interval: (f64, f64),
    /// a_1 .. a_n.
    pub coefficients: Vec<Coefficient>,
    #[serde(default)]
    pub shift: usize,
    #[serde(default)]
    pub param: f64,
    /// Row i weights u^(j) at the left endpoint in the i-th functional.
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

impl ProblemConfig {
    pub fn to_spec(&self) -> Result<BvpSpec> {
        let n = self.order;
        let flatten = |rows: &Vec<Vec<f64>>, name: &str| -> Result<DMatrix<f64>> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Config(format!(
                    "{name} must be a {n}x{n} array of numbers"
                )));
            }
            Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        };
        BvpSpec::new(
            self.order,
            self.interval,
            self.coefficients.clone(),
            self.shift,
            self.param,
            flatten(&self.alpha, "alpha")?,
            flatten(&self.beta, "beta")?,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_grid_points")]
    pub t_points: usize,
    #[serde(default = "default_grid_points")]
    pub s_points: usize,
}

fn default_grid_points() -> usize {
    40
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            t_points: default_grid_points(),
            s_points: default_grid_points(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

fn default_panels() -> usize {
    1
}

fn default_nodes() -> usize {
    24
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels: default_panels(),
            nodes: default_nodes(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Parameter pairs (M0, M1) to link.
    pub param_pairs: Vec<(f64, f64)>,
    /// Derivative levels for the leveled identities.
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    /// Largest acceptable |residual|; exceeding it fails the run.
    #[serde(default = "default_max_residual")]
    pub max_residual: f64,
    /// Optional second problem for the M1 kernel. Must describe the same
    /// family (order, interval, coefficients, shift, boundary data).
    #[serde(default)]
    pub problem_b: Option<ProblemConfig>,
}

fn default_levels() -> Vec<usize> {
    vec![0, 1]
}

fn default_max_residual() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub bracket: (f64, f64),
    pub points: usize,
    #[serde(default = "default_sweep_levels")]
    pub levels: Vec<usize>,
    /// Parameter values within this distance of a detected eigenvalue are
    /// dropped from the grid.
    #[serde(default = "default_exclusion_radius")]
    pub exclusion_radius: f64,
    #[serde(default = "default_eigen_scan")]
    pub eigen_scan_points: usize,
}

fn default_sweep_levels() -> Vec<usize> {
    vec![0]
}

fn default_exclusion_radius() -> f64 {
    0.3
}

fn default_eigen_scan() -> usize {
    240
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigConfig {
    pub bracket: (f64, f64),
    #[serde(default = "default_max_count")]
    pub max_count: usize,
    #[serde(default = "default_eig_scan")]
    pub scan_points: usize,
}

fn default_max_count() -> usize {
    16
}

fn default_eig_scan() -> usize {
    400
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopConfig {
    /// Derivative level of the annihilating operator; defaults to n - 1.
    #[serde(default)]
    pub level: Option<usize>,
    /// Place the parameter at the literal coefficient index instead of the
    /// operator position (experimentation only).
    #[serde(default)]
    pub literal_param_index: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default)]
    pub svg: bool,
}

fn default_out_dir() -> String {
    "out".to_string()
}

/// Top-level run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub eig: Option<EigConfig>,
    #[serde(default)]
    pub hop: Option<HopConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

fn default_tolerance() -> f64 {
    1e-10
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if !(cfg.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "problem": {
            "order": 2,
            "interval": [0.0, 1.0],
            "coefficients": [
                {"type": "const", "value": 0.0},
                {"type": "const", "value": 0.0}
            ],
            "shift": 0,
            "param": 1.0,
            "alpha": [[1.0, 0.0], [0.0, 0.0]],
            "beta": [[0.0, 0.0], [0.0, 1.0]]
        },
        "tolerance": 1e-10,
        "verify": {"param_pairs": [[-1.0, 1.0]], "levels": [0, 1]}
    }"#;

    #[test]
    fn parses_and_builds_the_spec() {
        let cfg: RunConfig = serde_json::from_str(EXAMPLE).unwrap();
        let spec = cfg.problem.to_spec().unwrap();
        assert_eq!(spec.order(), 2);
        assert_eq!(spec.param(), 1.0);
        assert_eq!(cfg.verify.unwrap().param_pairs, vec![(-1.0, 1.0)]);
    }

    #[test]
    fn unknown_keys_rejected_at_any_depth() {
        let bad = EXAMPLE.replace("\"tolerance\"", "\"tollerance\"");
        assert!(serde_json::from_str::<RunConfig>(&bad).is_err());
        let bad = EXAMPLE.replace("\"param_pairs\"", "\"pairs\"");
        assert!(serde_json::from_str::<RunConfig>(&bad).is_err());
    }

    #[test]
    fn matrix_shape_is_validated() {
        let bad = EXAMPLE.replace("[[1.0, 0.0], [0.0, 0.0]]", "[[1.0], [0.0]]");
        let cfg: RunConfig = serde_json::from_str(&bad).unwrap();
        assert!(cfg.problem.to_spec().is_err());
    }
}
