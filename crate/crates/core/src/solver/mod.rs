//! Direct linear solves, predictor and Dirichlet–Neumann corrector for one coarse window,
//! and time marching over the whole interval.

mod linear;
mod window;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use linear::{solve_linear, RESIDUAL_TOL};
pub use window::{corrector_sweep, initial_iterate, predictor_step, solve_window, DIVERGENCE_LIMIT};

use crate::error::{Error, Result};
use crate::grid::CompositeGrid;
use crate::projection::Trace;
use crate::scheme::{Problem, Variant, WindowSolution};

pub const DEFAULT_EPS: f64 = 1e-5;
pub const DEFAULT_MAX_ITERS: usize = 100;

/// How each coarse window is solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMode {
    /// Sweep until both interface residuals are at most `eps`, or `max_iters` sweeps.
    Converged { eps: f64, max_iters: usize },
    /// Predictor and one sweep, stopping after the flux-receiving solve.
    SingleIteration,
    /// Predictor values only.
    PredictorOnly,
    /// The fully coupled window system solved directly; the fixed point of the sweeps.
    Direct,
}

impl Default for SolveMode {
    fn default() -> Self {
        SolveMode::Converged {
            eps: DEFAULT_EPS,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

impl SolveMode {
    pub fn validate(&self) -> Result<()> {
        if let SolveMode::Converged { eps, max_iters } = *self {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::Config(format!("eps must be positive, got {eps}")));
            }
            if max_iters == 0 {
                return Err(Error::Config("max_iters must be at least 1".into()));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolveMode::Converged { .. } => "converged",
            SolveMode::SingleIteration => "single-iteration",
            SolveMode::PredictorOnly => "predictor-only",
            SolveMode::Direct => "direct",
        }
    }
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolveMode {
    type Err = Error;

    /// Parses the mode name; a converged mode gets the default tolerance and sweep limit.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "converged" => Ok(SolveMode::default()),
            "single-iteration" | "single" => Ok(SolveMode::SingleIteration),
            "predictor-only" | "predictor" => Ok(SolveMode::PredictorOnly),
            "direct" | "monolithic" => Ok(SolveMode::Direct),
            other => Err(Error::Config(format!("unknown solve mode `{other}`"))),
        }
    }
}

/// Cell values of both subdomains at one coarse time level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelState {
    pub fine: Vec<f64>,
    pub coarse: Vec<f64>,
}

impl LevelState {
    /// Cell-center samples of the initial condition.
    pub fn initial(grid: &CompositeGrid, problem: &Problem) -> Self {
        let sample = |c: &[f64]| c.iter().map(|&x| problem.initial(x)).collect();
        LevelState {
            fine: sample(grid.fine().centers()),
            coarse: sample(grid.coarse().centers()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    pub iterations: usize,
    /// `(dirichlet, neumann)` residual after each sweep, max-norm.
    pub residual_history: Vec<(f64, f64)>,
    pub conservativity_defect: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub windows: Vec<WindowReport>,
}

impl SolveReport {
    pub fn iterations(&self) -> Vec<usize> {
        self.windows.iter().map(|w| w.iterations).collect()
    }

    pub fn mean_iterations(&self) -> f64 {
        if self.windows.is_empty() {
            return 0.0;
        }
        self.windows.iter().map(|w| w.iterations as f64).sum::<f64>() / self.windows.len() as f64
    }

    pub fn converged(&self) -> bool {
        self.windows.iter().all(|w| w.converged)
    }

    pub fn max_conservativity_defect(&self) -> f64 {
        self.windows
            .iter()
            .map(|w| w.conservativity_defect)
            .fold(0.0, f64::max)
    }
}

/// Interface traces of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowTraces {
    pub fine_pressure: Trace,
    pub fine_flux: Trace,
    pub coarse_pressure: Trace,
    pub coarse_flux: Trace,
}

/// Every computed value: `N₁ + 1` fine levels, `N₂ + 1` coarse levels, and the interface
/// traces of each window.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub fine: Vec<Vec<f64>>,
    pub coarse: Vec<Vec<f64>>,
    pub traces: Vec<WindowTraces>,
}

impl Trajectory {
    /// Cell values of both subdomains at coarse level `n`.
    pub fn coarse_level(&self, n: usize, ratio: usize) -> LevelState {
        LevelState {
            fine: self.fine[n * ratio].clone(),
            coarse: self.coarse[n].clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.fine
            .iter()
            .chain(&self.coarse)
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Solve all windows in order, starting from the sampled initial condition.
pub fn march(
    grid: &CompositeGrid,
    variant: Variant,
    mode: SolveMode,
    problem: &Problem,
) -> Result<(Trajectory, SolveReport)> {
    march_from(grid, variant, mode, problem, LevelState::initial(grid, problem))
}

/// [`march`] from an explicit initial state.
pub fn march_from(
    grid: &CompositeGrid,
    variant: Variant,
    mode: SolveMode,
    problem: &Problem,
    initial: LevelState,
) -> Result<(Trajectory, SolveReport)> {
    mode.validate()?;
    crate::error::check_len(grid.fine().n_cells(), initial.fine.len(), "initial fine state")?;
    crate::error::check_len(grid.coarse().n_cells(), initial.coarse.len(), "initial coarse state")?;
    let mut traj = Trajectory {
        fine: vec![initial.fine.clone()],
        coarse: vec![initial.coarse.clone()],
        traces: Vec::with_capacity(grid.windows()),
    };
    let mut reports = Vec::with_capacity(grid.windows());
    let mut state = initial;
    for n in 0..grid.windows() {
        let (sol, report) = solve_window(grid, n, &state, variant, mode, problem)?;
        let WindowSolution { fine, coarse, .. } = sol;
        state = LevelState {
            fine: fine.final_level().to_vec(),
            coarse: coarse.final_level().to_vec(),
        };
        traj.fine.extend(fine.levels);
        traj.coarse.extend(coarse.levels);
        traj.traces.push(WindowTraces {
            fine_pressure: fine.pressure,
            fine_flux: fine.flux,
            coarse_pressure: coarse.pressure,
            coarse_flux: coarse.flux,
        });
        reports.push(report);
    }
    Ok((traj, SolveReport { windows: reports }))
}

#[cfg(test)]
mod tests;
