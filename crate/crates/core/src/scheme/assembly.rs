use super::problem::{cell_average_source, Problem};
use super::system::{LinearSystem, Unknown};
use crate::error::{check_len, Error, Result};
use crate::grid::{CompositeGrid, Side};
use crate::projection::{Resolution, Trace};

/// Interface data handed to one subdomain for one window. Fluxes are oriented from the
/// fine side towards the coarse side.
#[derive(Debug, Clone, PartialEq)]
pub enum Closure {
    /// Pressure prescribed on the interface face.
    InterfacePressure(Trace),
    /// Pressure of the cell across the interface.
    NeighbourCell(Trace),
    /// Flux through the interface face.
    Flux(Trace),
}

impl Closure {
    pub fn trace(&self) -> &Trace {
        match self {
            Closure::InterfacePressure(t) | Closure::NeighbourCell(t) | Closure::Flux(t) => t,
        }
    }

    fn face(&self, grid: &CompositeGrid, side: Side, level: usize) -> Face {
        let idx = match side {
            Side::Fine => level - 1,
            Side::Coarse => 0,
        };
        let value = self.trace().at(idx);
        match self {
            Closure::InterfacePressure(_) => Face::Dirichlet {
                value,
                distance: grid.interface_distance(side),
            },
            Closure::NeighbourCell(_) => Face::Dirichlet {
                value,
                distance: grid.interface_cell_distance(),
            },
            Closure::Flux(_) => Face::Flux(value),
        }
    }
}

/// Condition on an end face of a chain of cells.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Face {
    /// Pressure `value` at distance `distance` from the adjacent cell center.
    Dirichlet { value: f64, distance: f64 },
    /// Flux oriented in the direction of increasing `x`.
    Flux(f64),
}

/// One backward-Euler step for a row of cells:
/// `h/dt·(p − p_old) − (u_right − u_left) = h·f̄`.
pub(crate) struct Chain<'a> {
    pub widths: &'a [f64],
    pub faces: &'a [f64],
    pub dt: f64,
    pub time: (f64, f64),
}

impl Chain<'_> {
    pub(crate) fn assemble(
        &self,
        sys: &mut LinearSystem,
        index: &dyn Fn(usize) -> usize,
        previous: &[f64],
        problem: &Problem,
        left: Face,
        right: Face,
    ) {
        let n = self.widths.len();
        for j in 0..n {
            let h = self.widths[j];
            let row = index(j);
            sys.add(row, row, h / self.dt);
            let f = cell_average_source(problem, (self.faces[j], self.faces[j + 1]), self.time);
            sys.add_rhs(row, h / self.dt * previous[j] + h * f);
            if j + 1 < n {
                let c = 1.0 / (0.5 * (h + self.widths[j + 1]));
                let next = index(j + 1);
                sys.add(row, row, c);
                sys.add(row, next, -c);
                sys.add(next, next, c);
                sys.add(next, row, -c);
            }
        }
        let first = index(0);
        match left {
            Face::Dirichlet { value, distance } => {
                sys.add(first, first, 1.0 / distance);
                sys.add_rhs(first, value / distance);
            }
            Face::Flux(u) => sys.add_rhs(first, -u),
        }
        let last = index(n - 1);
        match right {
            Face::Dirichlet { value, distance } => {
                sys.add(last, last, 1.0 / distance);
                sys.add_rhs(last, value / distance);
            }
            Face::Flux(u) => sys.add_rhs(last, u),
        }
    }
}

pub(crate) fn step_times(grid: &CompositeGrid, side: Side, window: usize, level: usize) -> (f64, f64) {
    match side {
        Side::Fine => (
            grid.sublevel_time(window, level - 1),
            grid.sublevel_time(window, level),
        ),
        Side::Coarse => (grid.window_start(window), grid.window_start(window + 1)),
    }
}

pub(crate) fn outer_face(grid: &CompositeGrid, problem: &Problem, side: Side, t: f64) -> Face {
    let sub = grid.subdomain(side);
    match side {
        Side::Fine => Face::Dirichlet {
            value: problem.boundary_lo(t),
            distance: sub.half_width(0),
        },
        Side::Coarse => Face::Dirichlet {
            value: problem.boundary_hi(t),
            distance: sub.half_width(sub.n_cells() - 1),
        },
    }
}

fn check_closure(grid: &CompositeGrid, side: Side, closure: &Closure) -> Result<()> {
    let resolution = match side {
        Side::Fine => Resolution::Fine,
        Side::Coarse => Resolution::Coarse,
    };
    closure
        .trace()
        .expect_shape(resolution, grid.ratio(), "interface closure")
}

pub(crate) fn check_level(grid: &CompositeGrid, side: Side, window: usize, level: usize) -> Result<()> {
    if window >= grid.windows() {
        return Err(Error::Config(format!(
            "window {window} out of range (grid has {})",
            grid.windows()
        )));
    }
    let max = match side {
        Side::Fine => grid.ratio(),
        Side::Coarse => 1,
    };
    if level == 0 || level > max {
        return Err(Error::Config(format!(
            "time level {level} out of range 1..={max}"
        )));
    }
    Ok(())
}

/// System for one implicit step on `side`: level `level` of coarse window `window`,
/// starting from `previous`, with the interface closed by `closure`.
///
/// Fine levels run `1..=K`; the coarse side has the single level `1`.
pub fn assemble_subdomain_step(
    grid: &CompositeGrid,
    problem: &Problem,
    side: Side,
    window: usize,
    level: usize,
    previous: &[f64],
    closure: &Closure,
) -> Result<LinearSystem> {
    check_level(grid, side, window, level)?;
    check_closure(grid, side, closure)?;
    let sub = grid.subdomain(side);
    check_len(sub.n_cells(), previous.len(), "previous cell values")?;
    let labels = (0..sub.n_cells())
        .map(|cell| Unknown::Cell { side, cell, level })
        .collect();
    let mut sys = LinearSystem::new(labels);
    let time = step_times(grid, side, window, level);
    let chain = Chain {
        widths: sub.widths(),
        faces: sub.faces(),
        dt: sub.dt(),
        time,
    };
    let outer = outer_face(grid, problem, side, time.1);
    let inner = closure.face(grid, side, level);
    match side {
        Side::Fine => chain.assemble(&mut sys, &|j| j, previous, problem, outer, inner),
        Side::Coarse => chain.assemble(&mut sys, &|j| j, previous, problem, inner, outer),
    }
    Ok(sys)
}

/// Flux through the interface (fine towards coarse) implied by `closure` and the
/// solved cell values of `side` at `level`.
pub fn closure_flux(
    grid: &CompositeGrid,
    side: Side,
    level: usize,
    cells: &[f64],
    closure: &Closure,
) -> Result<f64> {
    check_closure(grid, side, closure)?;
    check_len(grid.subdomain(side).n_cells(), cells.len(), "cell values")?;
    Ok(match closure.face(grid, side, level) {
        Face::Flux(u) => u,
        Face::Dirichlet { value, distance } => match side {
            Side::Fine => (value - cells[cells.len() - 1]) / distance,
            Side::Coarse => (cells[0] - value) / distance,
        },
    })
}

/// One coarse step on the union of both subdomains, as if the grid were conforming in
/// time. Unknowns are ordered fine cells first.
pub fn assemble_predictor(
    grid: &CompositeGrid,
    problem: &Problem,
    window: usize,
    fine_previous: &[f64],
    coarse_previous: &[f64],
) -> Result<LinearSystem> {
    check_level(grid, Side::Coarse, window, 1)?;
    let (fine, coarse) = (grid.fine(), grid.coarse());
    check_len(fine.n_cells(), fine_previous.len(), "fine previous values")?;
    check_len(coarse.n_cells(), coarse_previous.len(), "coarse previous values")?;

    let widths: Vec<f64> = fine.widths().iter().chain(coarse.widths()).copied().collect();
    let faces: Vec<f64> = fine
        .faces()
        .iter()
        .chain(&coarse.faces()[1..])
        .copied()
        .collect();
    let previous: Vec<f64> = fine_previous.iter().chain(coarse_previous).copied().collect();
    let labels = (0..fine.n_cells())
        .map(|cell| Unknown::Cell {
            side: Side::Fine,
            cell,
            level: 1,
        })
        .chain((0..coarse.n_cells()).map(|cell| Unknown::Cell {
            side: Side::Coarse,
            cell,
            level: 1,
        }))
        .collect();
    let mut sys = LinearSystem::new(labels);
    let time = (grid.window_start(window), grid.window_start(window + 1));
    let chain = Chain {
        widths: &widths,
        faces: &faces,
        dt: grid.dt_coarse(),
        time,
    };
    chain.assemble(
        &mut sys,
        &|j| j,
        &previous,
        problem,
        outer_face(grid, problem, Side::Fine, time.1),
        outer_face(grid, problem, Side::Coarse, time.1),
    );
    Ok(sys)
}
