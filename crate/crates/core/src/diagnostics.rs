//! Discrete norms, conservativity defect, errors against an exact solution and observed
//! convergence orders.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::grid::{CompositeGrid, Side, Subdomain};
use crate::projection::Trace;
use crate::scheme::Problem;
use crate::solver::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub l2: f64,
    pub h1: f64,
}

/// Discrete L² norm and H¹ seminorm of a cell field on one subdomain.
///
/// `lo` and `hi` are the values on the two end faces (Dirichlet data or interface
/// pressure); `None` drops that face term. Every interior face is visited from both of
/// its cells, so it contributes twice.
pub fn discrete_norms(field: &[f64], sub: &Subdomain, lo: Option<f64>, hi: Option<f64>) -> Result<Norms> {
    let n = sub.n_cells();
    check_len(n, field.len(), "discrete_norms field")?;
    let w = sub.widths();
    let l2 = field.iter().zip(w).map(|(p, h)| p * p * h).sum::<f64>().sqrt();
    let mut h1 = 0.0;
    for j in 0..n.saturating_sub(1) {
        let dp = field[j + 1] - field[j];
        h1 += 2.0 * dp * dp / sub.center_distance(j);
    }
    if let Some(g) = lo {
        let dp = field[0] - g;
        h1 += dp * dp / sub.half_width(0);
    }
    if let Some(g) = hi {
        let dp = field[n - 1] - g;
        h1 += dp * dp / sub.half_width(n - 1);
    }
    Ok(Norms { l2, h1: h1.sqrt() })
}

/// Norms of one subdomain field of the composite grid; the interface value is required.
pub fn subdomain_norms(
    grid: &CompositeGrid,
    side: Side,
    field: &[f64],
    boundary: f64,
    interface: Option<f64>,
) -> Result<Norms> {
    let Some(interface) = interface else {
        return Err(Error::Dimension {
            expected: 1,
            actual: 0,
            context: "subdomain_norms: missing interface value",
        });
    };
    let sub = grid.subdomain(side);
    match side {
        Side::Fine => discrete_norms(field, sub, Some(boundary), Some(interface)),
        Side::Coarse => discrete_norms(field, sub, Some(interface), Some(boundary)),
    }
}

/// `|δt₂·u_c − Σₖ δt₁·u_f,k|`.
pub fn conservativity_defect(fine_flux: &Trace, coarse_flux: &Trace, dt1: f64, dt2: f64) -> f64 {
    let fine: f64 = fine_flux.values().iter().map(|u| dt1 * u).sum();
    let coarse: f64 = coarse_flux.values().iter().map(|u| dt2 * u).sum();
    (coarse - fine).abs()
}

/// Errors of a trajectory against the exact solution, sampled at cell centers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSeries {
    /// Signed error per cell at the final time, fine cells first.
    pub final_error: Vec<f64>,
    /// Cell centers matching `final_error`.
    pub centers: Vec<f64>,
    /// Coarse time levels `0..=N₂`.
    pub times: Vec<f64>,
    /// L² error over the whole domain at each coarse level.
    pub l2_per_level: Vec<f64>,
    pub final_l2: f64,
    pub final_l2_fine: f64,
    pub final_l2_coarse: f64,
    /// H¹ seminorm of the error at the final time, both subdomains.
    pub final_h1: f64,
    /// Space-time seminorm: root of `Σᵢ Σₙ δtᵢ |eⁱⁿ|²₁` over levels `1..=Nᵢ`.
    pub space_time_h1: f64,
}

/// Interface pressure implied by `side`'s flux at its level inside window `window`.
fn interface_value(grid: &CompositeGrid, side: Side, cells: &[f64], flux: f64) -> f64 {
    let d = grid.interface_distance(side);
    match side {
        Side::Fine => cells[cells.len() - 1] + d * flux,
        Side::Coarse => cells[0] - d * flux,
    }
}

/// Field on one side at time `t`, minus the exact solution when `subtract_exact` is set,
/// with its norms. Without a flux the interface term is left out and `h1` is NaN.
fn level_field(
    grid: &CompositeGrid,
    problem: &Problem,
    side: Side,
    cells: &[f64],
    t: f64,
    flux: Option<f64>,
    subtract_exact: bool,
) -> Result<(Vec<f64>, Norms)> {
    let sub = grid.subdomain(side);
    let exact = |x: f64| {
        if subtract_exact {
            problem.exact(x, t).unwrap_or(0.0)
        } else {
            0.0
        }
    };
    let err: Vec<f64> = cells
        .iter()
        .zip(sub.centers())
        .map(|(p, &x)| p - exact(x))
        .collect();
    let (x_b, g) = match side {
        Side::Fine => (sub.faces()[0], problem.boundary_lo(t)),
        Side::Coarse => (sub.faces()[sub.n_cells()], problem.boundary_hi(t)),
    };
    let boundary = g - exact(x_b);
    let interface = flux.map(|u| interface_value(grid, side, cells, u) - exact(grid.interface_x()));
    let norms = match interface {
        Some(_) => subdomain_norms(grid, side, &err, boundary, interface)?,
        None => {
            let l2 = discrete_norms(&err, sub, None, None)?.l2;
            Norms { l2, h1: f64::NAN }
        }
    };
    Ok((err, norms))
}

fn check_trajectory(trajectory: &Trajectory, grid: &CompositeGrid) -> Result<()> {
    let n2 = grid.windows();
    check_len(n2 * grid.ratio() + 1, trajectory.fine.len(), "trajectory fine levels")?;
    check_len(n2 + 1, trajectory.coarse.len(), "trajectory coarse levels")?;
    check_len(n2, trajectory.traces.len(), "trajectory traces")
}

/// Walk every computed level `1..=Nᵢ` of both sides, yielding `(side, dt, field, norms)`.
fn visit_levels(
    trajectory: &Trajectory,
    problem: &Problem,
    grid: &CompositeGrid,
    subtract_exact: bool,
    mut visit: impl FnMut(Side, f64, Vec<f64>, Norms),
) -> Result<()> {
    let k = grid.ratio();
    for n in 0..grid.windows() {
        for level in 1..=k {
            let u = trajectory.traces[n].fine_flux.at(level - 1);
            let t = grid.sublevel_time(n, level);
            let cells = &trajectory.fine[n * k + level];
            let (e, norms) = level_field(grid, problem, Side::Fine, cells, t, Some(u), subtract_exact)?;
            visit(Side::Fine, grid.dt_fine(), e, norms);
        }
        let u = trajectory.traces[n].coarse_flux.at(0);
        let t = grid.window_start(n + 1);
        let cells = &trajectory.coarse[n + 1];
        let (e, norms) = level_field(grid, problem, Side::Coarse, cells, t, Some(u), subtract_exact)?;
        visit(Side::Coarse, grid.dt_coarse(), e, norms);
    }
    Ok(())
}

pub fn error_report(trajectory: &Trajectory, problem: &Problem, grid: &CompositeGrid) -> Result<ErrorSeries> {
    if !problem.has_exact() {
        return Err(Error::Usage("error report needs a problem with an exact solution".into()));
    }
    check_trajectory(trajectory, grid)?;
    let k = grid.ratio();
    let n2 = grid.windows();
    if n2 == 0 {
        return Err(Error::Usage("trajectory has no time steps".into()));
    }

    let mut l2_per_level = Vec::with_capacity(n2 + 1);
    let mut times = Vec::with_capacity(n2 + 1);
    for n in 0..=n2 {
        let t = grid.window_start(n);
        let (_, ef) = level_field(grid, problem, Side::Fine, &trajectory.fine[n * k], t, None, true)?;
        let (_, ec) = level_field(grid, problem, Side::Coarse, &trajectory.coarse[n], t, None, true)?;
        times.push(t);
        l2_per_level.push((ef.l2 * ef.l2 + ec.l2 * ec.l2).sqrt());
    }

    let mut st_h1 = 0.0;
    let mut last_fine = (Vec::new(), Norms { l2: 0.0, h1: 0.0 });
    let mut last_coarse = last_fine.clone();
    visit_levels(trajectory, problem, grid, true, |side, dt, e, norms| {
        st_h1 += dt * norms.h1 * norms.h1;
        match side {
            Side::Fine => last_fine = (e, norms),
            Side::Coarse => last_coarse = (e, norms),
        }
    })?;
    let (ef, nf) = last_fine;
    let (ec, nc) = last_coarse;

    Ok(ErrorSeries {
        final_error: ef.into_iter().chain(ec).collect(),
        centers: grid.all_centers(),
        times,
        final_l2: (nf.l2 * nf.l2 + nc.l2 * nc.l2).sqrt(),
        final_l2_fine: nf.l2,
        final_l2_coarse: nc.l2,
        final_h1: (nf.h1 * nf.h1 + nc.h1 * nc.h1).sqrt(),
        space_time_h1: st_h1.sqrt(),
        l2_per_level,
    })
}

/// Terms of the discrete energy estimate for a trajectory:
/// `Σᵢ |pⁱ|²₁,δtᵢ + 2 Σᵢ ‖p^{i,Nᵢ}‖² ≤ 2 Σᵢ ‖p^{i,0}‖²` when the data vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBalance {
    /// `Σᵢ Σₙ δtᵢ |p^{i,n}|²₁` over levels `1..=Nᵢ`.
    pub dissipation: f64,
    pub final_l2_sq: f64,
    pub initial_l2_sq: f64,
}

impl EnergyBalance {
    pub fn lhs(&self) -> f64 {
        self.dissipation + 2.0 * self.final_l2_sq
    }

    pub fn rhs(&self) -> f64 {
        2.0 * self.initial_l2_sq
    }
}

/// Energy terms of the computed solution, boundary values taken from `problem`.
pub fn energy_balance(trajectory: &Trajectory, problem: &Problem, grid: &CompositeGrid) -> Result<EnergyBalance> {
    check_trajectory(trajectory, grid)?;
    let l2_sq = |fine: &[f64], coarse: &[f64]| -> Result<f64> {
        let a = discrete_norms(fine, grid.fine(), None, None)?.l2;
        let b = discrete_norms(coarse, grid.coarse(), None, None)?.l2;
        Ok(a * a + b * b)
    };
    let initial_l2_sq = l2_sq(&trajectory.fine[0], &trajectory.coarse[0])?;
    let final_l2_sq = l2_sq(
        &trajectory.fine[trajectory.fine.len() - 1],
        &trajectory.coarse[trajectory.coarse.len() - 1],
    )?;
    let mut dissipation = 0.0;
    visit_levels(trajectory, problem, grid, false, |_, dt, _, norms| {
        dissipation += dt * norms.h1 * norms.h1;
    })?;
    Ok(EnergyBalance {
        dissipation,
        final_l2_sq,
        initial_l2_sq,
    })
}

/// Orders `log(eₖ/eₖ₊₁)/log(r)` between consecutive levels; `None` where an error is zero.
/// Each level must refine the previous one in both `h` and `dt` by the same factor.
pub fn observed_order(levels: &[(f64, f64, f64)]) -> Result<Vec<Option<f64>>> {
    let mut out = Vec::with_capacity(levels.len().saturating_sub(1));
    for pair in levels.windows(2) {
        let (h0, dt0, e0) = pair[0];
        let (h1, dt1, e1) = pair[1];
        let r = h0 / h1;
        if !(r > 1.0) || ((dt0 / dt1) / r - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "levels must refine h and dt by the same factor > 1 (h ratio {r}, dt ratio {})",
                dt0 / dt1
            )));
        }
        out.push(if e0 > 0.0 && e1 > 0.0 {
            Some((e0 / e1).ln() / r.ln())
        } else {
            None
        });
    }
    Ok(out)
}
