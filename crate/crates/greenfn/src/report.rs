//! Report types produced by verification and sweep runs, with JSON and CSV
//! serialization. All numeric CSV fields use the shortest round-trip
//! decimal form, so identical runs produce byte-identical files.

use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize)]
pub struct GridDescription {
    pub t_points: usize,
    pub s_points: usize,
    pub interval: (f64, f64),
}

/// Summary of one identity checked over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub identity: String,
    /// Derivative level for the identities that take one.
    pub level: Option<usize>,
    pub grid: GridDescription,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_location: (f64, f64),
}

/// One evaluated identity point, for the per-point CSV.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualSample {
    pub identity: String,
    pub level: Option<usize>,
    pub t: f64,
    pub s: f64,
    pub residual: f64,
}

/// CSV with fixed columns: identity, t, s, residual.
pub fn residual_samples_csv(samples: &[ResidualSample]) -> String {
    let mut out = String::from("identity,t,s,residual\n");
    for r in samples {
        let name = match r.level {
            Some(l) => format!("{}[l={}]", r.identity, l),
            None => r.identity.clone(),
        };
        let _ = writeln!(out, "{},{},{},{}", name, r.t, r.s, r.residual);
    }
    out
}

/// Sign classification of a derivative field over the evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignClass {
    Nonnegative,
    Nonpositive,
    SignChanging,
    /// Everything within tolerance of zero: the sign cannot be resolved.
    Indeterminate,
    NotSolvable,
}

impl SignClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignClass::Nonnegative => "nonnegative",
            SignClass::Nonpositive => "nonpositive",
            SignClass::SignChanging => "sign-changing",
            SignClass::Indeterminate => "indeterminate",
            SignClass::NotSolvable => "not-solvable",
        }
    }
}

/// Per-level classification at one parameter value.
#[derive(Debug, Clone, Serialize)]
pub struct LevelClass {
    pub level: usize,
    pub class: SignClass,
    pub min: f64,
    pub max: f64,
}

/// Everything recorded at one parameter value of the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub m: f64,
    pub solvable: bool,
    pub det: f64,
    pub per_level: Vec<LevelClass>,
    /// Largest kernel magnitude on the grid; grows without bound as the
    /// parameter approaches a window endpoint at an eigenvalue.
    pub max_abs_kernel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueInfo {
    pub value: f64,
    pub bracket: (f64, f64),
}

/// A maximal constant-sign parameter window for one derivative level.
#[derive(Debug, Clone, Serialize)]
pub struct SignWindow {
    pub level: usize,
    pub class: SignClass,
    /// Refined endpoints.
    pub m_lo: f64,
    pub m_hi: f64,
    /// Endpoints that coincide with the scanned bracket edge; the window may
    /// extend beyond it, which a finite scan cannot certify.
    pub lo_at_bracket_edge: bool,
    pub hi_at_bracket_edge: bool,
}

/// sup of the nonpositive window against inf of the nonnegative window for
/// the kernel itself.
#[derive(Debug, Clone, Serialize)]
pub struct EndpointCheck {
    pub sup_nonpositive: f64,
    pub inf_nonnegative: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotoneDirection {
    Nonincreasing,
    Nondecreasing,
}

/// Ordering check between two consecutive constant-sign parameter values.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityVerdict {
    pub level: usize,
    pub m_from: f64,
    pub m_to: f64,
    pub expected: MonotoneDirection,
    pub violations: usize,
    /// Worst violation magnitude and where it happened.
    pub worst: f64,
    pub worst_location: (f64, f64),
}

/// Full result of a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub levels: Vec<usize>,
    pub grid: GridDescription,
    pub entries: Vec<SweepEntry>,
    pub eigenvalues: Vec<EigenvalueInfo>,
    pub windows: Vec<SignWindow>,
    pub endpoint_check: Option<EndpointCheck>,
    pub monotonicity: Vec<MonotonicityVerdict>,
}

impl SweepReport {
    /// CSV with fixed columns: m, level, classification, min, max.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,level,classification,min,max\n");
        for e in &self.entries {
            for lc in &e.per_level {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    e.m,
                    lc.level,
                    lc.class.as_str(),
                    lc.min,
                    lc.max
                );
            }
        }
        out
    }
}

/// Kernel sample rows for the build command: t, s, l, value.
pub fn kernel_samples_csv(samples: &[(f64, f64, usize, f64)]) -> String {
    let mut out = String::from("t,s,l,value\n");
    for &(t, s, l, v) in samples {
        let _ = writeln!(out, "{},{},{},{}", t, s, l, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_deterministic_and_round_trips() {
        let samples = vec![
            ResidualSample {
                identity: "link-0".into(),
                level: None,
                t: 0.1,
                s: 0.2,
                residual: 1.25e-9,
            },
            ResidualSample {
                identity: "dlink-1".into(),
                level: Some(1),
                t: 1.0 / 3.0,
                s: 0.2,
                residual: -3.5e-12,
            },
        ];
        let a = residual_samples_csv(&samples);
        let b = residual_samples_csv(&samples);
        assert_eq!(a, b);
        // shortest round-trip decimals parse back exactly
        let line = a.lines().nth(2).unwrap();
        let t: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(t, 1.0 / 3.0);
    }
}
