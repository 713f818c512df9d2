//! Conservative local time stepping for the one-dimensional heat equation on a grid made
//! of a fine subdomain and a coarse subdomain, each with its own time step.
//!
//! The crate provides the composite grid, the time projections between the two time
//! grids, the finite-volume equations and their interface couplings, a predictor plus
//! Dirichlet–Neumann corrector for each coarse window, and error diagnostics.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod projection;
pub mod scheme;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{build_composite_grid, validate_grid, CompositeGrid, GridConfig, Side};
pub use projection::{inject_coarse_to_fine, interface_pairing, project_fine_to_coarse, Trace};
pub use scheme::{manufactured_problem, InterfaceScheme, Master, Problem, Variant};
pub use solver::{march, solve_window, SolveMode, SolveReport, Trajectory};
