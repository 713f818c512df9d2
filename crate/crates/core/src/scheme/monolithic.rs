//! The fully coupled system of one coarse window: every fine sub-level, the coarse level
//! and (for interface unknowns) the interface pressures solved at once.

use super::assembly::{check_level, outer_face, step_times, Chain, Face};
use super::problem::{cell_average_source, Problem};
use super::system::{LinearSystem, Unknown};
use super::{InterfaceScheme, Master, Variant};
use crate::error::{check_len, Result};
use crate::grid::{CompositeGrid, Side};
use crate::projection::Trace;

/// Solution of one subdomain over one window.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainState {
    /// Cell values at each time level inside the window: `K` levels on the fine side,
    /// one on the coarse side.
    pub levels: Vec<Vec<f64>>,
    /// Interface pressure this side is coupled through. With interface unknowns it is the
    /// face pressure; otherwise the slave stores the across-interface value it used and
    /// the master stores its own interface cell value.
    pub pressure: Trace,
    /// Interface flux, oriented from fine to coarse.
    pub flux: Trace,
}

impl SubdomainState {
    /// Cell values at the end of the window.
    pub fn final_level(&self) -> &[f64] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSolution {
    pub window: usize,
    pub fine: SubdomainState,
    pub coarse: SubdomainState,
}

impl WindowSolution {
    pub fn side(&self, side: Side) -> &SubdomainState {
        match side {
            Side::Fine => &self.fine,
            Side::Coarse => &self.coarse,
        }
    }
}

/// Mismatch in the two interface conditions of a variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingResiduals {
    /// Largest gap between the slave's interface pressure and the (projected) master's.
    pub dirichlet: f64,
    /// Largest gap between the master's flux and the (projected) slave flux.
    pub neumann: f64,
}

struct Layout {
    n_fine: usize,
    ratio: usize,
    interface_unknowns: bool,
}

impl Layout {
    fn new(grid: &CompositeGrid, variant: Variant) -> Self {
        Layout {
            n_fine: grid.fine().n_cells(),
            ratio: grid.ratio(),
            interface_unknowns: variant.scheme == InterfaceScheme::InterfaceUnknowns,
        }
    }

    fn fine(&self, cell: usize, level: usize) -> usize {
        cell * self.ratio + level - 1
    }

    fn eps_fine(&self, level: usize) -> usize {
        self.n_fine * self.ratio + level - 1
    }

    fn eps_coarse(&self) -> usize {
        self.n_fine * self.ratio + self.ratio
    }

    fn coarse(&self, cell: usize) -> usize {
        let extra = if self.interface_unknowns { self.ratio + 1 } else { 0 };
        self.n_fine * self.ratio + extra + cell
    }
}

fn labels(grid: &CompositeGrid, layout: &Layout) -> Vec<Unknown> {
    let k = layout.ratio;
    let mut out = Vec::new();
    for cell in 0..layout.n_fine {
        for level in 1..=k {
            out.push(Unknown::Cell {
                side: Side::Fine,
                cell,
                level,
            });
        }
    }
    if layout.interface_unknowns {
        for level in 1..=k {
            out.push(Unknown::InterfacePressure {
                side: Side::Fine,
                level,
            });
        }
        out.push(Unknown::InterfacePressure {
            side: Side::Coarse,
            level: 1,
        });
    }
    for cell in 0..grid.coarse().n_cells() {
        out.push(Unknown::Cell {
            side: Side::Coarse,
            cell,
            level: 1,
        });
    }
    out
}

/// Coupled system for window `window` of `variant`, starting from the cell values at the
/// beginning of the window.
///
/// Unknowns are ordered cell-major on the fine side (all sub-levels of a cell together),
/// then the interface pressures if the variant has them, then the coarse cells. The
/// bandwidth is `O(K)`.
pub fn assemble_monolithic_window(
    grid: &CompositeGrid,
    problem: &Problem,
    variant: Variant,
    window: usize,
    fine_previous: &[f64],
    coarse_previous: &[f64],
) -> Result<LinearSystem> {
    check_level(grid, Side::Coarse, window, 1)?;
    let (fine, coarse) = (grid.fine(), grid.coarse());
    check_len(fine.n_cells(), fine_previous.len(), "fine previous values")?;
    check_len(coarse.n_cells(), coarse_previous.len(), "coarse previous values")?;

    let layout = Layout::new(grid, variant);
    let k = grid.ratio();
    let kf = k as f64;
    let last = fine.n_cells() - 1;
    let mut sys = LinearSystem::new(labels(grid, &layout));
    let zeros = vec![0.0; fine.n_cells()];

    for level in 1..=k {
        let time = step_times(grid, Side::Fine, window, level);
        let chain = Chain {
            widths: fine.widths(),
            faces: fine.faces(),
            dt: fine.dt(),
            time,
        };
        let previous = if level == 1 { fine_previous } else { &zeros };
        chain.assemble(
            &mut sys,
            &|j| layout.fine(j, level),
            previous,
            problem,
            outer_face(grid, problem, Side::Fine, time.1),
            Face::Flux(0.0),
        );
        if level > 1 {
            for j in 0..fine.n_cells() {
                sys.add(layout.fine(j, level), layout.fine(j, level - 1), -fine.widths()[j] / fine.dt());
            }
        }
    }

    let time = step_times(grid, Side::Coarse, window, 1);
    let chain = Chain {
        widths: coarse.widths(),
        faces: coarse.faces(),
        dt: coarse.dt(),
        time,
    };
    chain.assemble(
        &mut sys,
        &|j| layout.coarse(j),
        coarse_previous,
        problem,
        Face::Flux(0.0),
        outer_face(grid, problem, Side::Coarse, time.1),
    );

    let c0 = layout.coarse(0);
    let d_fine = grid.interface_distance(Side::Fine);
    let d_coarse = grid.interface_distance(Side::Coarse);
    let d_cells = grid.interface_cell_distance();

    // Interface fluxes: the fine row of cell `last` carries `−u`, the first coarse row `+u`.
    match variant.scheme {
        InterfaceScheme::InterfaceUnknowns => {
            for level in 1..=k {
                let r = layout.fine(last, level);
                sys.add(r, r, 1.0 / d_fine);
                sys.add(r, layout.eps_fine(level), -1.0 / d_fine);
            }
            sys.add(c0, c0, 1.0 / d_coarse);
            sys.add(c0, layout.eps_coarse(), -1.0 / d_coarse);

            let ec = layout.eps_coarse();
            match variant.master {
                Master::Coarse => {
                    // Pressure continuity per sub-level, flux balance on average.
                    for level in 1..=k {
                        let e = layout.eps_fine(level);
                        sys.add(e, e, 1.0);
                        sys.add(e, ec, -1.0);
                    }
                    sys.add(ec, c0, 1.0 / d_coarse);
                    sys.add(ec, ec, -1.0 / d_coarse);
                    for level in 1..=k {
                        sys.add(ec, layout.eps_fine(level), -1.0 / (kf * d_fine));
                        sys.add(ec, layout.fine(last, level), 1.0 / (kf * d_fine));
                    }
                }
                Master::Fine => {
                    // Flux continuity per sub-level, pressure balance on average.
                    for level in 1..=k {
                        let e = layout.eps_fine(level);
                        sys.add(e, e, 1.0 / d_fine);
                        sys.add(e, layout.fine(last, level), -1.0 / d_fine);
                        sys.add(e, c0, -1.0 / d_coarse);
                        sys.add(e, ec, 1.0 / d_coarse);
                    }
                    sys.add(ec, ec, 1.0);
                    for level in 1..=k {
                        sys.add(ec, layout.eps_fine(level), -1.0 / kf);
                    }
                }
            }
        }
        InterfaceScheme::CellNeighbours => {
            match variant.master {
                Master::Coarse => {
                    for level in 1..=k {
                        let r = layout.fine(last, level);
                        sys.add(r, r, 1.0 / d_cells);
                        sys.add(r, c0, -1.0 / d_cells);
                    }
                }
                Master::Fine => {
                    for level in 1..=k {
                        let r = layout.fine(last, level);
                        sys.add(r, c0, -1.0 / d_cells);
                        for m in 1..=k {
                            sys.add(r, layout.fine(last, m), 1.0 / (kf * d_cells));
                        }
                    }
                }
            }
            sys.add(c0, c0, 1.0 / d_cells);
            for level in 1..=k {
                sys.add(c0, layout.fine(last, level), -1.0 / (kf * d_cells));
            }
        }
    }
    Ok(sys)
}

/// Split the solution vector of [`assemble_monolithic_window`] into per-side states.
pub fn unpack_monolithic(
    grid: &CompositeGrid,
    variant: Variant,
    window: usize,
    x: &[f64],
) -> Result<WindowSolution> {
    let layout = Layout::new(grid, variant);
    let (fine, coarse) = (grid.fine(), grid.coarse());
    let k = grid.ratio();
    let expected = layout.coarse(coarse.n_cells());
    check_len(expected, x.len(), "monolithic solution")?;

    let fine_levels: Vec<Vec<f64>> = (1..=k)
        .map(|level| (0..fine.n_cells()).map(|j| x[layout.fine(j, level)]).collect())
        .collect();
    let coarse_level: Vec<f64> = (0..coarse.n_cells()).map(|j| x[layout.coarse(j)]).collect();
    let last = fine.n_cells() - 1;
    let p_fine: Vec<f64> = fine_levels.iter().map(|l| l[last]).collect();
    let p_c0 = coarse_level[0];
    let (dt1, dt2) = (grid.dt_fine(), grid.dt_coarse());

    let (fine_pressure, fine_flux, coarse_pressure, coarse_flux) = match variant.scheme {
        InterfaceScheme::InterfaceUnknowns => {
            let d1 = grid.interface_distance(Side::Fine);
            let d2 = grid.interface_distance(Side::Coarse);
            let eps: Vec<f64> = (1..=k).map(|l| x[layout.eps_fine(l)]).collect();
            let eps_c = x[layout.eps_coarse()];
            let flux: Vec<f64> = eps.iter().zip(&p_fine).map(|(e, p)| (e - p) / d1).collect();
            (eps, flux, eps_c, (p_c0 - eps_c) / d2)
        }
        InterfaceScheme::CellNeighbours => {
            let d = grid.interface_cell_distance();
            let p_mean = mean(&p_fine);
            match variant.master {
                Master::Coarse => {
                    let flux: Vec<f64> = p_fine.iter().map(|p| (p_c0 - p) / d).collect();
                    let u = mean(&flux);
                    (vec![p_c0; k], flux, p_c0, u)
                }
                Master::Fine => {
                    let u = (p_c0 - p_mean) / d;
                    (p_fine.clone(), vec![u; k], p_mean, u)
                }
            }
        }
    };

    Ok(WindowSolution {
        window,
        fine: SubdomainState {
            levels: fine_levels,
            pressure: Trace::fine(fine_pressure, dt1),
            flux: Trace::fine(fine_flux, dt1),
        },
        coarse: SubdomainState {
            levels: vec![coarse_level],
            pressure: Trace::coarse(coarse_pressure, dt2),
            flux: Trace::coarse(coarse_flux, dt2),
        },
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}


/// Check the interface conditions of `variant` on a window solution using only its cell
/// values: each side's interface flux is recovered from the finite-volume balance of its
/// interface cell, never from the stored traces.
pub fn coupling_residuals(
    grid: &CompositeGrid,
    problem: &Problem,
    variant: Variant,
    fine_previous: &[f64],
    coarse_previous: &[f64],
    solution: &WindowSolution,
) -> Result<CouplingResiduals> {
    let (fine, coarse) = (grid.fine(), grid.coarse());
    let k = grid.ratio();
    let n = solution.window;
    check_len(fine.n_cells(), fine_previous.len(), "fine previous values")?;
    check_len(coarse.n_cells(), coarse_previous.len(), "coarse previous values")?;
    check_len(k, solution.fine.levels.len(), "fine levels")?;
    check_len(1, solution.coarse.levels.len(), "coarse levels")?;

    let last = fine.n_cells() - 1;
    let h = fine.widths()[last];
    let mut u_fine = Vec::with_capacity(k);
    let mut p_fine = Vec::with_capacity(k);
    for level in 1..=k {
        let cur = &solution.fine.levels[level - 1];
        check_len(fine.n_cells(), cur.len(), "fine level")?;
        let old = if level == 1 {
            fine_previous
        } else {
            &solution.fine.levels[level - 2]
        };
        let time = step_times(grid, Side::Fine, n, level);
        let left_flux = if last > 0 {
            (cur[last] - cur[last - 1]) / fine.center_distance(last - 1)
        } else {
            (cur[0] - problem.boundary_lo(time.1)) / fine.half_width(0)
        };
        let f = cell_average_source(problem, (fine.faces()[last], fine.faces()[last + 1]), time);
        u_fine.push(h / fine.dt() * (cur[last] - old[last]) + left_flux - h * f);
        p_fine.push(cur[last]);
    }

    let cur = &solution.coarse.levels[0];
    check_len(coarse.n_cells(), cur.len(), "coarse level")?;
    let time = step_times(grid, Side::Coarse, n, 1);
    let hc = coarse.widths()[0];
    let right_flux = if coarse.n_cells() > 1 {
        (cur[1] - cur[0]) / coarse.center_distance(0)
    } else {
        (problem.boundary_hi(time.1) - cur[0]) / coarse.half_width(0)
    };
    let f = cell_average_source(problem, (coarse.faces()[0], coarse.faces()[1]), time);
    let u_coarse = right_flux + hc * f - hc / coarse.dt() * (cur[0] - coarse_previous[0]);
    let p_c0 = cur[0];

    let (slave_p, master_p): (Vec<f64>, Vec<f64>) = match variant.scheme {
        InterfaceScheme::InterfaceUnknowns => {
            let d1 = grid.interface_distance(Side::Fine);
            let d2 = grid.interface_distance(Side::Coarse);
            let eps_f: Vec<f64> = p_fine.iter().zip(&u_fine).map(|(p, u)| p + d1 * u).collect();
            let eps_c = p_c0 - d2 * u_coarse;
            match variant.master {
                Master::Coarse => (eps_f, vec![eps_c; k]),
                Master::Fine => (vec![eps_c], vec![mean(&eps_f)]),
            }
        }
        InterfaceScheme::CellNeighbours => {
            let d = grid.interface_cell_distance();
            match variant.master {
                Master::Coarse => {
                    let ghost: Vec<f64> = p_fine.iter().zip(&u_fine).map(|(p, u)| p + d * u).collect();
                    (ghost, vec![p_c0; k])
                }
                Master::Fine => (vec![p_c0 - d * u_coarse], vec![mean(&p_fine)]),
            }
        }
    };
    let dirichlet = slave_p
        .iter()
        .zip(&master_p)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let neumann = match variant.master {
        Master::Coarse => (u_coarse - mean(&u_fine)).abs(),
        Master::Fine => u_fine
            .iter()
            .fold(0.0_f64, |m, u| m.max((u - u_coarse).abs())),
    };
    Ok(CouplingResiduals { dirichlet, neumann })
}
