//! Command-line orchestration: configuration, single runs, refinement studies and method
//! comparisons, with their CSV and JSON outputs.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{Overrides, ProblemKind, RunConfig};

use crate::diagnostics::{error_report, observed_order, ErrorSeries};
use crate::error::{Error, Result};
use crate::grid::{build_composite_grid, CompositeGrid, GridConfig, Side};
use crate::projection::Trace;
use crate::scheme::{InterfaceScheme, Master, Problem, Variant};
use crate::solver::{march, SolveMode, SolveReport, Trajectory, WindowTraces};

pub const EXIT_OK: i32 = 0;
/// Output could not be written or a linear solve failed.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Result of a command that ran to the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Every window of every run met the iteration tolerance.
    pub converged: bool,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.converged {
            EXIT_OK
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(Error::Config(_) | Error::Usage(_)) => EXIT_CONFIG,
        Err(_) => EXIT_FAILURE,
    }
}

/// Seventeen significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One solved configuration with its error measurements.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub trajectory: Trajectory,
    pub report: SolveReport,
    pub errors: ErrorSeries,
}

/// Exact solution sampled at cell centers, with interface traces chosen so that the
/// interface values implied by the fluxes are exact as well.
pub fn exact_trajectory(grid: &CompositeGrid, problem: &Problem) -> Result<Trajectory> {
    if !problem.has_exact() {
        return Err(Error::Usage("exact trajectory needs a problem with an exact solution".into()));
    }
    let exact = |x: f64, t: f64| problem.exact(x, t).unwrap_or(0.0);
    let sample = |side: Side, t: f64| -> Vec<f64> {
        grid.subdomain(side).centers().iter().map(|&x| exact(x, t)).collect()
    };
    let k = grid.ratio();
    let xi = grid.interface_x();
    let (d1, d2) = (grid.interface_distance(Side::Fine), grid.interface_distance(Side::Coarse));
    let mut fine = vec![sample(Side::Fine, 0.0)];
    let mut coarse = vec![sample(Side::Coarse, 0.0)];
    let mut traces = Vec::with_capacity(grid.windows());
    for n in 0..grid.windows() {
        let mut fine_p = Vec::with_capacity(k);
        let mut fine_u = Vec::with_capacity(k);
        for level in 1..=k {
            let t = grid.sublevel_time(n, level);
            let cells = sample(Side::Fine, t);
            let p = exact(xi, t);
            fine_u.push((p - cells[cells.len() - 1]) / d1);
            fine_p.push(p);
            fine.push(cells);
        }
        let t = grid.window_start(n + 1);
        let cells = sample(Side::Coarse, t);
        let p = exact(xi, t);
        let u = (cells[0] - p) / d2;
        coarse.push(cells);
        traces.push(WindowTraces {
            fine_pressure: Trace::fine(fine_p, grid.dt_fine()),
            fine_flux: Trace::fine(fine_u, grid.dt_fine()),
            coarse_pressure: Trace::coarse(p, grid.dt_coarse()),
            coarse_flux: Trace::coarse(u, grid.dt_coarse()),
        });
    }
    Ok(Trajectory { fine, coarse, traces })
}

/// Solve one configuration and measure its errors. With `inject_exact` the solver is
/// bypassed and the exact solution stands in for the computed one.
pub fn execute(
    grid: &CompositeGrid,
    variant: Variant,
    mode: SolveMode,
    problem: &Problem,
    inject_exact: bool,
) -> Result<RunResult> {
    let (trajectory, report) = if inject_exact {
        let t = exact_trajectory(grid, problem)?;
        (t, SolveReport { windows: Vec::new() })
    } else {
        march(grid, variant, mode, problem)?
    };
    let errors = error_report(&trajectory, problem, grid)?;
    Ok(RunResult {
        trajectory,
        report,
        errors,
    })
}

#[derive(Serialize)]
struct FinalNorms {
    l2: f64,
    l2_fine: f64,
    l2_coarse: f64,
    h1: f64,
    space_time_h1: f64,
}

#[derive(Serialize)]
struct Summary {
    variant: String,
    mode: String,
    problem: &'static str,
    converged: bool,
    windows: usize,
    iterations_per_window: Vec<usize>,
    mean_iterations: f64,
    conservativity_defects: Vec<f64>,
    max_conservativity_defect: f64,
    residual_history: Vec<Vec<(f64, f64)>>,
    final_norms: FinalNorms,
}

/// Create the output directory and write every file, or nothing if it cannot be created.
fn write_files(dir: &Path, files: Vec<(&str, String)>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

fn load(path: &Path, overrides: &Overrides) -> Result<(RunConfig, CompositeGrid)> {
    let mut cfg = RunConfig::from_file(path)?;
    cfg.apply(overrides);
    let grid = cfg.validate()?;
    Ok((cfg, grid))
}

/// Single run: `summary.json`, `error_space.csv` and `error_time.csv`.
pub fn run_experiment(config_path: &Path, overrides: &Overrides) -> Result<Outcome> {
    let (cfg, grid) = load(config_path, overrides)?;
    let run = execute(&grid, cfg.variant, cfg.mode, &cfg.problem(), cfg.inject_exact)?;
    let e = &run.errors;
    let rep = &run.report;
    let summary = Summary {
        variant: cfg.variant.name().to_string(),
        mode: cfg.mode.name().to_string(),
        problem: cfg.problem.name(),
        converged: rep.converged(),
        windows: rep.windows.len(),
        iterations_per_window: rep.iterations(),
        mean_iterations: rep.mean_iterations(),
        conservativity_defects: rep.windows.iter().map(|w| w.conservativity_defect).collect(),
        max_conservativity_defect: rep.max_conservativity_defect(),
        residual_history: rep.windows.iter().map(|w| w.residual_history.clone()).collect(),
        final_norms: FinalNorms {
            l2: e.final_l2,
            l2_fine: e.final_l2_fine,
            l2_coarse: e.final_l2_coarse,
            h1: e.final_h1,
            space_time_h1: e.space_time_h1,
        },
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))? + "\n";

    let mut space = String::from("x,error\n");
    for (x, err) in e.centers.iter().zip(&e.final_error) {
        let _ = writeln!(space, "{},{}", num(*x), num(*err));
    }
    let mut time = String::from("t,l2_error\n");
    for (t, err) in e.times.iter().zip(&e.l2_per_level) {
        let _ = writeln!(time, "{},{}", num(*t), num(*err));
    }
    let files = write_files(
        &cfg.output_dir,
        vec![("summary.json", json), ("error_space.csv", space), ("error_time.csv", time)],
    )?;
    Ok(Outcome {
        converged: rep.converged(),
        files,
    })
}

/// One row of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    /// Largest cell width of the composite grid.
    pub h: f64,
    /// Coarse time step.
    pub dt: f64,
    pub l2_error: f64,
    /// Space-time discrete H¹ seminorm of the error.
    pub h1_error: f64,
    pub order_l2: Option<f64>,
    pub order_h1: Option<f64>,
    pub converged: bool,
}

/// Factor-2 refinements `grid`, `grid/2`, … with `levels` entries, solved with `variant`
/// and `mode`.
pub fn convergence_study(
    grid: &GridConfig,
    levels: usize,
    variant: Variant,
    mode: SolveMode,
    problem: &Problem,
    inject_exact: bool,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(levels);
    for level in 0..levels {
        let g = build_composite_grid(&grid.refined(1 << level))?;
        let run = execute(&g, variant, mode, problem, inject_exact)?;
        let h = g
            .fine()
            .widths()
            .iter()
            .chain(g.coarse().widths())
            .fold(0.0_f64, |m, &w| m.max(w));
        rows.push(ConvergenceRow {
            level,
            h,
            dt: g.dt_coarse(),
            l2_error: run.errors.final_l2,
            h1_error: run.errors.space_time_h1,
            order_l2: None,
            order_h1: None,
            converged: run.report.converged(),
        });
    }
    let l2 = observed_order(&rows.iter().map(|r| (r.h, r.dt, r.l2_error)).collect::<Vec<_>>())?;
    let h1 = observed_order(&rows.iter().map(|r| (r.h, r.dt, r.h1_error)).collect::<Vec<_>>())?;
    for (i, (a, b)) in l2.into_iter().zip(h1).enumerate() {
        rows[i + 1].order_l2 = a;
        rows[i + 1].order_h1 = b;
    }
    Ok(rows)
}

fn order_cell(level: usize, order: Option<f64>) -> String {
    match (level, order) {
        (0, _) => String::new(),
        (_, Some(p)) => num(p),
        (_, None) => "undefined".into(),
    }
}

/// Refinement study: `convergence.csv`.
pub fn run_convergence(config_path: &Path, overrides: &Overrides) -> Result<Outcome> {
    let (cfg, _) = load(config_path, overrides)?;
    let rows = convergence_study(
        &cfg.grid,
        cfg.convergence_levels,
        cfg.variant,
        cfg.mode,
        &cfg.problem(),
        cfg.inject_exact,
    )?;
    let mut csv = String::from("level,h,dt,l2_error,h1_error,observed_order_l2,observed_order_h1\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.level,
            num(r.h),
            num(r.dt),
            num(r.l2_error),
            num(r.h1_error),
            order_cell(r.level, r.order_l2),
            order_cell(r.level, r.order_h1),
        );
    }
    let files = write_files(&cfg.output_dir, vec![("convergence.csv", csv)])?;
    Ok(Outcome {
        converged: rows.iter().all(|r| r.converged),
        files,
    })
}

/// One method of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub method: String,
    pub final_l2_error: f64,
    /// Final-time L² error restricted to the fine subdomain.
    pub final_l2_fine: f64,
    pub mean_iterations: f64,
    pub max_conservativity_defect: f64,
    pub converged: bool,
}

/// Name, grid, variant and mode of every compared method.
fn compare_methods(cfg: &RunConfig) -> Vec<(String, GridConfig, Variant, SolveMode)> {
    let is2_fine = Variant::new(InterfaceScheme::CellNeighbours, Master::Fine);
    let mut out: Vec<_> = Variant::ALL
        .iter()
        .map(|&v| (v.name().to_string(), cfg.grid.clone(), v, cfg.mode))
        .collect();
    // Baselines: one time step everywhere, which makes the predictor the union-mesh solve.
    let uniform_fine = GridConfig {
        dt_coarse: cfg.grid.dt_fine,
        ..cfg.grid.clone()
    };
    let uniform_coarse = GridConfig {
        dt_fine: cfg.grid.dt_coarse,
        ..cfg.grid.clone()
    };
    out.push(("uniform-fine".into(), uniform_fine, is2_fine, SolveMode::PredictorOnly));
    out.push(("uniform-coarse".into(), uniform_coarse, is2_fine, SolveMode::PredictorOnly));
    out.push((
        format!("{}-single-iteration", is2_fine.name()),
        cfg.grid.clone(),
        is2_fine,
        SolveMode::SingleIteration,
    ));
    out
}

/// Run every method of the comparison, in parallel.
pub fn compare(cfg: &RunConfig) -> Result<Vec<CompareRow>> {
    let problem = cfg.problem();
    let methods = compare_methods(cfg);
    let grids = methods
        .iter()
        .map(|(_, g, _, _)| build_composite_grid(g))
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<CompareRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = methods
            .iter()
            .zip(&grids)
            .map(|((name, _, variant, mode), grid)| {
                let problem = &problem;
                s.spawn(move || {
                    let run = execute(grid, *variant, *mode, problem, cfg.inject_exact)?;
                    Ok(CompareRow {
                        method: name.clone(),
                        final_l2_error: run.errors.final_l2,
                        final_l2_fine: run.errors.final_l2_fine,
                        mean_iterations: run.report.mean_iterations(),
                        max_conservativity_defect: run.report.max_conservativity_defect(),
                        converged: run.report.converged(),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Solver("comparison run panicked".into()))))
            .collect()
    });
    results.into_iter().collect()
}

/// Method comparison: `compare.csv`.
pub fn run_compare(config_path: &Path, overrides: &Overrides) -> Result<Outcome> {
    let (cfg, _) = load(config_path, overrides)?;
    let rows = compare(&cfg)?;
    let mut csv = String::from("method,final_l2_error,mean_iterations,max_conservativity_defect\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.method,
            num(r.final_l2_error),
            num(r.mean_iterations),
            num(r.max_conservativity_defect)
        );
    }
    let files = write_files(&cfg.output_dir, vec![("compare.csv", csv)])?;
    Ok(Outcome {
        converged: rows.iter().all(|r| r.converged),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::manufactured_problem;

    #[test]
    fn number_format_has_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.0), "0.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn exact_trajectory_has_zero_error() {
        let grid = build_composite_grid(&GridConfig::reference()).unwrap();
        let problem = manufactured_problem();
        let run = execute(&grid, Variant::ALL[0], SolveMode::Direct, &problem, true).unwrap();
        assert_eq!(run.errors.final_l2, 0.0);
        assert_eq!(run.errors.space_time_h1, 0.0);
        assert!(run.errors.l2_per_level.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn order_cells() {
        assert_eq!(order_cell(0, Some(1.0)), "");
        assert_eq!(order_cell(2, None), "undefined");
        assert_eq!(order_cell(1, Some(1.0)), num(1.0));
    }

    #[test]
    fn compare_lists_every_method() {
        let names: Vec<_> = compare_methods(&RunConfig::default()).into_iter().map(|m| m.0).collect();
        assert_eq!(
            names,
            [
                "is1-coarse",
                "is1-fine",
                "is2-coarse",
                "is2-fine",
                "uniform-fine",
                "uniform-coarse",
                "is2-fine-single-iteration"
            ]
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Err(Error::Config("x".into()))), EXIT_CONFIG);
        assert_eq!(exit_code(&Err(Error::Io("x".into()))), EXIT_FAILURE);
        let ok = Outcome { converged: true, files: vec![] };
        assert_eq!(exit_code(&Ok(ok.clone())), EXIT_OK);
        assert_eq!(exit_code(&Ok(Outcome { converged: false, ..ok })), EXIT_NOT_CONVERGED);
    }
}
