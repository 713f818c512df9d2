use super::linear::solve_linear;
use super::{LevelState, SolveMode, WindowReport};
use crate::diagnostics::conservativity_defect;
use crate::error::{check_len, Result};
use crate::grid::{CompositeGrid, Side};
use crate::projection::{inject_coarse_to_fine, project_fine_to_coarse, Trace};
use crate::scheme::{
    assemble_monolithic_window, assemble_predictor, assemble_subdomain_step, closure_flux,
    unpack_monolithic, Closure, CouplingResiduals, InterfaceScheme, Master, Problem,
    SubdomainState, Variant, WindowSolution,
};

/// Residual above which a converged-mode iteration is abandoned as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e100;

/// One implicit coarse step on the union mesh.
pub fn predictor_step(
    grid: &CompositeGrid,
    window: usize,
    state: &LevelState,
    problem: &Problem,
) -> Result<LevelState> {
    let sys = assemble_predictor(grid, problem, window, &state.fine, &state.coarse)?;
    let mut x = solve_linear(&sys)?;
    let coarse = x.split_off(grid.fine().n_cells());
    Ok(LevelState { fine: x, coarse })
}

/// Starting iterate of the corrector built from the predictor values.
pub fn initial_iterate(
    grid: &CompositeGrid,
    window: usize,
    predicted: &LevelState,
    variant: Variant,
) -> WindowSolution {
    let k = grid.ratio();
    let (dt1, dt2) = (grid.dt_fine(), grid.dt_coarse());
    let p_i = predicted.fine[predicted.fine.len() - 1];
    let p_c = predicted.coarse[0];
    let flux = (p_c - p_i) / grid.interface_cell_distance();
    let (fine_p, coarse_p) = match variant.scheme {
        InterfaceScheme::InterfaceUnknowns => {
            let d1 = grid.interface_distance(Side::Fine);
            let d2 = grid.interface_distance(Side::Coarse);
            let eps = (d2 * p_i + d1 * p_c) / (d1 + d2);
            (eps, eps)
        }
        InterfaceScheme::CellNeighbours => match variant.master {
            Master::Coarse => (p_c, p_c),
            Master::Fine => (p_i, p_i),
        },
    };
    WindowSolution {
        window,
        fine: SubdomainState {
            levels: vec![predicted.fine.clone(); k],
            pressure: Trace::fine(vec![fine_p; k], dt1),
            flux: Trace::fine(vec![flux; k], dt1),
        },
        coarse: SubdomainState {
            levels: vec![predicted.coarse.clone()],
            pressure: Trace::coarse(coarse_p, dt2),
            flux: Trace::coarse(flux, dt2),
        },
    }
}

/// Solve every time level of `side` in the window with the given interface closure.
fn solve_side(
    grid: &CompositeGrid,
    problem: &Problem,
    side: Side,
    window: usize,
    start: &[f64],
    closure: &Closure,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let levels = match side {
        Side::Fine => grid.ratio(),
        Side::Coarse => 1,
    };
    let mut out = Vec::with_capacity(levels);
    let mut fluxes = Vec::with_capacity(levels);
    let mut previous = start.to_vec();
    for level in 1..=levels {
        let sys = assemble_subdomain_step(grid, problem, side, window, level, &previous, closure)?;
        let cells = solve_linear(&sys)?;
        fluxes.push(closure_flux(grid, side, level, &cells, closure)?);
        previous.clone_from(&cells);
        out.push(cells);
    }
    Ok((out, fluxes))
}

/// Interface pressure of the master after its solve.
fn master_pressure(grid: &CompositeGrid, variant: Variant, levels: &[Vec<f64>], flux: &[f64]) -> Vec<f64> {
    match (variant.master, variant.scheme) {
        (Master::Fine, InterfaceScheme::InterfaceUnknowns) => {
            let d = grid.interface_distance(Side::Fine);
            levels.iter().zip(flux).map(|(l, u)| l[l.len() - 1] + d * u).collect()
        }
        (Master::Fine, InterfaceScheme::CellNeighbours) => {
            levels.iter().map(|l| l[l.len() - 1]).collect()
        }
        (Master::Coarse, InterfaceScheme::InterfaceUnknowns) => {
            let d = grid.interface_distance(Side::Coarse);
            vec![levels[0][0] - d * flux[0]]
        }
        (Master::Coarse, InterfaceScheme::CellNeighbours) => vec![levels[0][0]],
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// One multiplicative Dirichlet–Neumann sweep: the slave is solved with the master's
/// interface pressure, then the master with the slave's flux.
pub fn corrector_sweep(
    grid: &CompositeGrid,
    window: usize,
    state: &LevelState,
    iterate: &WindowSolution,
    variant: Variant,
    problem: &Problem,
) -> Result<(WindowSolution, CouplingResiduals)> {
    let k = grid.ratio();
    let (dt1, dt2) = (grid.dt_fine(), grid.dt_coarse());
    check_len(grid.fine().n_cells(), state.fine.len(), "fine state")?;
    check_len(grid.coarse().n_cells(), state.coarse.len(), "coarse state")?;
    let slave = variant.slave_side();
    let master = variant.master_side();

    let master_trace = &iterate.side(master).pressure;
    let slave_data = match master {
        Side::Coarse => inject_coarse_to_fine(master_trace, k)?,
        Side::Fine => project_fine_to_coarse(master_trace, k)?,
    };
    let slave_closure = match variant.scheme {
        InterfaceScheme::InterfaceUnknowns => Closure::InterfacePressure(slave_data.clone()),
        InterfaceScheme::CellNeighbours => Closure::NeighbourCell(slave_data.clone()),
    };
    let slave_start = match slave {
        Side::Fine => &state.fine,
        Side::Coarse => &state.coarse,
    };
    let (slave_levels, slave_flux) = solve_side(grid, problem, slave, window, slave_start, &slave_closure)?;
    let slave_flux = match slave {
        Side::Fine => Trace::fine(slave_flux, dt1),
        Side::Coarse => Trace::coarse(slave_flux[0], dt2),
    };

    let master_flux = match master {
        Side::Coarse => project_fine_to_coarse(&slave_flux, k)?,
        Side::Fine => inject_coarse_to_fine(&slave_flux, k)?,
    };
    let master_start = match master {
        Side::Fine => &state.fine,
        Side::Coarse => &state.coarse,
    };
    let (master_levels, _) = solve_side(
        grid,
        problem,
        master,
        window,
        master_start,
        &Closure::Flux(master_flux.clone()),
    )?;
    let mp = master_pressure(grid, variant, &master_levels, master_flux.values());
    let master_pressure = match master {
        Side::Fine => Trace::fine(mp, dt1),
        Side::Coarse => Trace::coarse(mp[0], dt2),
    };

    // Conditions on the new iterate, read in the slave's time resolution for the pressure
    // and in the master's for the flux.
    let projected_master = match master {
        Side::Coarse => inject_coarse_to_fine(&master_pressure, k)?,
        Side::Fine => project_fine_to_coarse(&master_pressure, k)?,
    };
    let projected_slave_flux = match master {
        Side::Coarse => project_fine_to_coarse(&slave_flux, k)?,
        Side::Fine => inject_coarse_to_fine(&slave_flux, k)?,
    };
    let residuals = CouplingResiduals {
        dirichlet: max_gap(slave_data.values(), projected_master.values()),
        neumann: max_gap(master_flux.values(), projected_slave_flux.values()),
    };

    let slave_state = SubdomainState {
        levels: slave_levels,
        pressure: slave_data,
        flux: slave_flux,
    };
    let master_state = SubdomainState {
        levels: master_levels,
        pressure: master_pressure,
        flux: master_flux,
    };
    let (fine, coarse) = match master {
        Side::Fine => (master_state, slave_state),
        Side::Coarse => (slave_state, master_state),
    };
    Ok((WindowSolution { window, fine, coarse }, residuals))
}

fn defect(grid: &CompositeGrid, sol: &WindowSolution) -> f64 {
    conservativity_defect(&sol.fine.flux, &sol.coarse.flux, grid.dt_fine(), grid.dt_coarse())
}

/// Advance one coarse window from `state` according to `mode`.
pub fn solve_window(
    grid: &CompositeGrid,
    window: usize,
    state: &LevelState,
    variant: Variant,
    mode: SolveMode,
    problem: &Problem,
) -> Result<(WindowSolution, WindowReport)> {
    mode.validate()?;
    if let SolveMode::Direct = mode {
        let sys = assemble_monolithic_window(grid, problem, variant, window, &state.fine, &state.coarse)?;
        let x = solve_linear(&sys)?;
        let sol = unpack_monolithic(grid, variant, window, &x)?;
        let report = WindowReport {
            iterations: 0,
            residual_history: Vec::new(),
            conservativity_defect: defect(grid, &sol),
            converged: true,
        };
        return Ok((sol, report));
    }

    let predicted = predictor_step(grid, window, state, problem)?;
    let mut iterate = initial_iterate(grid, window, &predicted, variant);
    let mut history = Vec::new();
    let (max_sweeps, eps) = match mode {
        SolveMode::PredictorOnly => (0, None),
        SolveMode::SingleIteration => (1, None),
        SolveMode::Converged { eps, max_iters } => (max_iters, Some(eps)),
        SolveMode::Direct => unreachable!(),
    };
    let mut converged = eps.is_none();
    for _ in 0..max_sweeps {
        let (next, res) = corrector_sweep(grid, window, state, &iterate, variant, problem)?;
        iterate = next;
        history.push((res.dirichlet, res.neumann));
        if let Some(eps) = eps {
            if res.dirichlet <= eps && res.neumann <= eps {
                converged = true;
                break;
            }
            if !(res.dirichlet.max(res.neumann) < DIVERGENCE_LIMIT) {
                break;
            }
        }
    }
    let report = WindowReport {
        iterations: history.len(),
        residual_history: history,
        conservativity_defect: defect(grid, &iterate),
        converged,
    };
    Ok((iterate, report))
}
