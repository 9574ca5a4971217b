//! Batch front end: load a problem configuration, run a computation, emit
//! reports. The binary in `main.rs` only parses arguments and dispatches
//! here.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid or unsolvable
//! problem, 3 configuration error.

use crate::analysis::{
    self, strong_sign_witness, EigenOptions, SweepOptions, WitnessSign,
};
use crate::config::{OutputConfig, RunConfig};
use crate::error::Error;
use crate::green::GreenFunction;
use crate::grid::TsGrid;
use crate::linking::verify_identities;
use crate::quad::QuadratureRule;
use crate::recurrence::{AnnihilatorOp, ParamPlacement};
use crate::report::{kernel_samples_csv, residual_samples_csv};
use crate::svg;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub mod exit_code {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const INVALID_PROBLEM: i32 = 2;
    pub const CONFIG: i32 = 3;
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone)]
pub struct CommonArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Build,
    Verify,
    Sweep,
    Eig,
    HOp,
}

fn classify_error(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Io(_) => exit_code::CONFIG,
        _ => exit_code::INVALID_PROBLEM,
    }
}

/// Entry point used by the binary: runs the command and returns the exit
/// code, printing errors to stderr.
pub fn run(cmd: Command, args: &CommonArgs) -> i32 {
    if let Some(threads) = args.threads {
        // a failed pool build means one was already installed; keep going
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(cmd, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            classify_error(&e)
        }
    }
}

fn dispatch(cmd: Command, args: &CommonArgs) -> crate::error::Result<i32> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(Error::Config("--tol must be positive".into()));
        }
        cfg.tolerance = tol;
    }
    let mut output = cfg.output.clone().unwrap_or_default();
    if let Some(dir) = &args.out {
        output.dir = dir.display().to_string();
    }
    if args.svg {
        output.svg = true;
    }
    std::fs::create_dir_all(&output.dir)?;
    match cmd {
        Command::Build => cmd_build(&cfg, &output),
        Command::Verify => cmd_verify(&cfg, &output),
        Command::Sweep => cmd_sweep(&cfg, &output),
        Command::Eig => cmd_eig(&cfg, &output),
        Command::HOp => cmd_h_op(&cfg, &output),
    }
}

fn write_text(dir: &str, name: &str, text: &str) -> crate::error::Result<PathBuf> {
    let path = Path::new(dir).join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &str, name: &str, value: &T) -> crate::error::Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}

#[derive(Serialize)]
struct BuildSummary {
    solvable: bool,
    det: f64,
    condition: f64,
    jump_max_error: f64,
    boundary_max: f64,
    sign_class: crate::report::SignClass,
    witness: Option<&'static str>,
    witness_margin: Option<f64>,
}

fn cmd_build(cfg: &RunConfig, output: &OutputConfig) -> crate::error::Result<i32> {
    let spec = cfg.problem.to_spec()?;
    let n = spec.order();
    let g = match GreenFunction::build(spec, cfg.tolerance) {
        Ok(g) => g,
        Err(Error::NotSolvable { det, threshold }) => {
            eprintln!(
                "problem is not uniquely solvable at this parameter (eigenvalue): \
                 characteristic determinant {det:.6e}, threshold {threshold:.3e}"
            );
            return Ok(exit_code::INVALID_PROBLEM);
        }
        Err(e) => return Err(e),
    };
    let grid = TsGrid::uniform(g.spec().interval(), cfg.grid.t_points, cfg.grid.s_points);

    // definitional checks
    let mut jump_max_error = 0.0f64;
    let mut boundary_max = 0.0f64;
    for &s in &grid.s {
        jump_max_error = jump_max_error.max((g.jump_estimate(s)? - 1.0).abs());
        boundary_max = boundary_max.max(g.boundary_residuals(s)?.amax());
    }

    // kernel samples for all derivative orders below n
    let mut samples = Vec::new();
    let mut level0 = vec![vec![f64::NAN; grid.t.len()]; grid.s.len()];
    let mut min0 = f64::INFINITY;
    let mut max0 = f64::NEG_INFINITY;
    for l in 0..n {
        for (j, &s) in grid.s.iter().enumerate() {
            for (i, &t) in grid.t.iter().enumerate() {
                if t == s && l + 2 > n {
                    continue;
                }
                let v = g.eval(t, s, l)?;
                samples.push((t, s, l, v));
                if l == 0 {
                    level0[j][i] = v;
                    min0 = min0.min(v);
                    max0 = max0.max(v);
                }
            }
        }
    }
    let sign_class = if min0 >= -1e-9 && max0 <= 1e-9 {
        crate::report::SignClass::Indeterminate
    } else if min0 >= -1e-9 {
        crate::report::SignClass::Nonnegative
    } else if max0 <= 1e-9 {
        crate::report::SignClass::Nonpositive
    } else {
        crate::report::SignClass::SignChanging
    };

    let interior = TsGrid::interior(g.spec().interval(), cfg.grid.t_points, cfg.grid.s_points);
    let witness = strong_sign_witness(&g, &interior)?;

    let summary = BuildSummary {
        solvable: true,
        det: g.certificate().det,
        condition: g.certificate().condition,
        jump_max_error,
        boundary_max,
        sign_class,
        witness: witness.as_ref().map(|w| match w.sign {
            WitnessSign::Positive => "strongly-positive",
            WitnessSign::Negative => "strongly-negative",
        }),
        witness_margin: witness.as_ref().map(|w| w.margin),
    };
    write_text(&output.dir, "kernel_samples.csv", &kernel_samples_csv(&samples))?;
    write_json(&output.dir, "build_summary.json", &summary)?;
    if output.svg {
        let s = svg::heatmap("g(t, s)", &grid.t, &grid.s, &level0);
        write_text(&output.dir, "kernel.svg", &s)?;
    }
    println!(
        "solvable: det = {:.6e} (condition {:.3e})",
        summary.det, summary.condition
    );
    println!(
        "jump error {:.3e}, boundary residual {:.3e}, sign {}",
        summary.jump_max_error,
        summary.boundary_max,
        summary.sign_class.as_str()
    );
    if let Some(w) = summary.witness {
        println!("envelope witness: {w} (margin {:.3e})", summary.witness_margin.unwrap());
    } else {
        println!("envelope witness: none");
    }
    Ok(exit_code::OK)
}

#[derive(Serialize)]
struct VerifyPairReport {
    m0: f64,
    m1: f64,
    reports: Vec<crate::report::ResidualReport>,
}

fn cmd_verify(cfg: &RunConfig, output: &OutputConfig) -> crate::error::Result<i32> {
    let verify = cfg
        .verify
        .as_ref()
        .ok_or_else(|| Error::Config("verify section missing from config".into()))?;
    if verify.param_pairs.is_empty() {
        return Err(Error::Config("verify.param_pairs is empty".into()));
    }
    let spec = cfg.problem.to_spec()?;
    let spec_b = match &verify.problem_b {
        Some(p) => {
            let sb = p.to_spec()?;
            if !spec.same_family(&sb) {
                return Err(Error::Config(
                    "problem_b must match the primary problem up to the parameter \
                     (same order, interval, coefficients, shift, boundary data)"
                        .into(),
                ));
            }
            sb
        }
        None => spec.clone(),
    };
    let quad = QuadratureRule::new(cfg.quadrature.panels, cfg.quadrature.nodes)?;
    let grid = TsGrid::staggered(spec.interval(), cfg.grid.t_points, cfg.grid.s_points);

    let mut failed = false;
    let mut pair_reports = Vec::new();
    for (idx, &(m0, m1)) in verify.param_pairs.iter().enumerate() {
        let g0 = GreenFunction::build(spec.with_param(m0), cfg.tolerance)?;
        let g1 = GreenFunction::build(spec_b.with_param(m1), cfg.tolerance)?;
        let (reports, samples) = verify_identities(&g0, &g1, &verify.levels, &grid, &quad)?;
        for r in &reports {
            let status = if r.max_abs <= verify.max_residual {
                "ok"
            } else {
                failed = true;
                "FAIL"
            };
            println!(
                "pair ({m0}, {m1}) {:<12} l={:<4} max {:.3e} mean {:.3e} [{status}]",
                r.identity,
                r.level.map_or("-".to_string(), |l| l.to_string()),
                r.max_abs,
                r.mean_abs
            );
        }
        write_text(
            &output.dir,
            &format!("residuals_pair{idx}.csv"),
            &residual_samples_csv(&samples),
        )?;
        pair_reports.push(VerifyPairReport {
            m0,
            m1,
            reports,
        });
    }
    write_json(&output.dir, "residual_reports.json", &pair_reports)?;
    Ok(if failed {
        exit_code::VERIFY_FAILED
    } else {
        exit_code::OK
    })
}

fn cmd_sweep(cfg: &RunConfig, output: &OutputConfig) -> crate::error::Result<i32> {
    let sweep_cfg = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep section missing from config".into()))?;
    if sweep_cfg.points == 0 {
        return Err(Error::Config("sweep.points must be at least 1".into()));
    }
    let template = cfg.problem.to_spec()?;
    let eig_opts = EigenOptions {
        scan_points: sweep_cfg.eigen_scan_points,
        tol: cfg.tolerance.min(1e-10),
        ..EigenOptions::default()
    };
    let scan = analysis::find_eigenvalues(&template, sweep_cfg.bracket, 64, &eig_opts)?;
    let ms = analysis::build_m_grid(
        sweep_cfg.bracket,
        sweep_cfg.points,
        &scan.values,
        sweep_cfg.exclusion_radius,
    );
    if ms.is_empty() {
        return Err(Error::Config(
            "parameter grid is empty after eigenvalue exclusion".into(),
        ));
    }
    let grid = TsGrid::uniform(template.interval(), cfg.grid.t_points, cfg.grid.s_points);
    let opts = SweepOptions {
        build_tol: cfg.tolerance,
        ..SweepOptions::default()
    };
    let report = analysis::sweep(&template, &ms, &sweep_cfg.levels, &grid, &scan.infos(), &opts)?;

    write_json(&output.dir, "sweep.json", &report)?;
    write_text(&output.dir, "sweep.csv", &report.to_csv())?;
    if output.svg {
        let dets: Vec<f64> = report.entries.iter().map(|e| e.det).collect();
        let dm = svg::line_plot("characteristic determinant D(M)", &ms, &dets, &scan.values);
        write_text(&output.dir, "determinant.svg", &dm)?;
        for (idx, e) in report.entries.iter().enumerate() {
            if !e.solvable {
                continue;
            }
            let g = GreenFunction::build(template.with_param(e.m), cfg.tolerance)?;
            let n = template.order();
            let mut vals = vec![vec![f64::NAN; grid.t.len()]; grid.s.len()];
            for (j, &s) in grid.s.iter().enumerate() {
                for (i, &t) in grid.t.iter().enumerate() {
                    if t == s && n < 2 {
                        continue;
                    }
                    vals[j][i] = g.eval(t, s, 0)?;
                }
            }
            let hm = svg::heatmap(&format!("g(t, s) at M = {}", e.m), &grid.t, &grid.s, &vals);
            write_text(&output.dir, &format!("kernel_m{idx:04}.svg"), &hm)?;
        }
    }

    for w in &report.windows {
        println!(
            "level {} {} window: [{}, {}]{}{}",
            w.level,
            w.class.as_str(),
            w.m_lo,
            w.m_hi,
            if w.lo_at_bracket_edge { " (lo at bracket)" } else { "" },
            if w.hi_at_bracket_edge { " (hi at bracket)" } else { "" },
        );
    }
    if let Some(c) = &report.endpoint_check {
        println!(
            "endpoint coincidence: sup(N_0) = {} vs inf(P_0) = {} (gap {:.3e})",
            c.sup_nonpositive, c.inf_nonnegative, c.gap
        );
    }
    println!(
        "eigenvalues in bracket: {:?}",
        report.eigenvalues.iter().map(|e| e.value).collect::<Vec<_>>()
    );
    Ok(exit_code::OK)
}

#[derive(Serialize)]
struct EigReport {
    values: Vec<f64>,
    truncated: bool,
}

fn cmd_eig(cfg: &RunConfig, output: &OutputConfig) -> crate::error::Result<i32> {
    let eig = cfg
        .eig
        .as_ref()
        .ok_or_else(|| Error::Config("eig section missing from config".into()))?;
    let template = cfg.problem.to_spec()?;
    let opts = EigenOptions {
        scan_points: eig.scan_points,
        tol: cfg.tolerance.min(1e-10),
        ..EigenOptions::default()
    };
    let scan = analysis::find_eigenvalues(&template, eig.bracket, eig.max_count, &opts)?;
    for v in &scan.values {
        println!("{v}");
    }
    if scan.truncated {
        println!("(truncated at {})", eig.max_count);
    }
    write_json(
        &output.dir,
        "eigenvalues.json",
        &EigReport {
            values: scan.values.clone(),
            truncated: scan.truncated,
        },
    )?;
    Ok(exit_code::OK)
}

#[derive(Serialize)]
struct HopReport {
    level: usize,
    coefficients: Vec<String>,
    branches: Vec<String>,
}

fn cmd_h_op(cfg: &RunConfig, output: &OutputConfig) -> crate::error::Result<i32> {
    let spec = cfg.problem.to_spec()?;
    let hop = cfg.hop.clone().unwrap_or(crate::config::HopConfig {
        level: None,
        literal_param_index: false,
    });
    let level = hop.level.unwrap_or(spec.order().saturating_sub(1));
    let placement = if hop.literal_param_index {
        ParamPlacement::LiteralIndex
    } else {
        ParamPlacement::OperatorOrder
    };
    let op = AnnihilatorOp::build_with_placement(&spec, level, placement)?;
    print!("{}", op.pretty());
    let report = HopReport {
        level,
        coefficients: (1..=spec.order())
            .map(|j| op.coefficient(j).to_string())
            .collect(),
        branches: op.branches().iter().map(|b| format!("{b:?}")).collect(),
    };
    write_json(&output.dir, "h_operator.json", &report)?;
    Ok(exit_code::OK)
}
