//! Discrete equations of the composite scheme: problem data, per-subdomain implicit
//! steps with interface closures, the single-step predictor on the union mesh and the
//! fully coupled window system.

mod assembly;
mod monolithic;
mod problem;
mod system;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::grid::Side;

pub use assembly::{assemble_predictor, assemble_subdomain_step, closure_flux, Closure};
pub use monolithic::{
    assemble_monolithic_window, coupling_residuals, unpack_monolithic, CouplingResiduals,
    SubdomainState, WindowSolution,
};
pub use problem::{
    cell_average_source, manufactured_problem, BoundaryMode, ExponentialBump, Problem, SpaceFn,
    SpaceTimeFn, TimeFn,
};
pub use system::{LinearSystem, Unknown};

/// How the two subdomains are glued together at the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterfaceScheme {
    /// Each side carries its own interface pressure unknown at the face (IS1).
    InterfaceUnknowns,
    /// The flux uses the cell across the interface directly (IS2).
    CellNeighbours,
}

/// Which subdomain is given the Neumann (flux) data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Master {
    Coarse,
    Fine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub scheme: InterfaceScheme,
    pub master: Master,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::new(InterfaceScheme::InterfaceUnknowns, Master::Coarse),
        Variant::new(InterfaceScheme::InterfaceUnknowns, Master::Fine),
        Variant::new(InterfaceScheme::CellNeighbours, Master::Coarse),
        Variant::new(InterfaceScheme::CellNeighbours, Master::Fine),
    ];

    pub const fn new(scheme: InterfaceScheme, master: Master) -> Self {
        Variant { scheme, master }
    }

    pub fn master_side(&self) -> Side {
        match self.master {
            Master::Coarse => Side::Coarse,
            Master::Fine => Side::Fine,
        }
    }

    pub fn slave_side(&self) -> Side {
        self.master_side().other()
    }

    /// Short name used on the command line and in output files, e.g. `is2-fine`.
    pub fn name(&self) -> &'static str {
        match (self.scheme, self.master) {
            (InterfaceScheme::InterfaceUnknowns, Master::Coarse) => "is1-coarse",
            (InterfaceScheme::InterfaceUnknowns, Master::Fine) => "is1-fine",
            (InterfaceScheme::CellNeighbours, Master::Coarse) => "is2-coarse",
            (InterfaceScheme::CellNeighbours, Master::Fine) => "is2-fine",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts `is1-coarse`, `IS2 fine-master`, `is2_fine` and similar spellings.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
            .collect();
        let norm = norm.replace("-master", "");
        Variant::ALL
            .iter()
            .copied()
            .find(|v| v.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown variant `{s}`")))
    }
}
