//! One-dimensional composite space-time grid.
//!
//! The domain `[domain_lo, domain_hi]` is split at `interface_x` into a fine
//! subdomain on the left (small cells, time step `dt_fine`) and a coarse
//! subdomain on the right (time step `dt_coarse = K * dt_fine`). Both meshes
//! are cell-centered: one unknown per cell, located at the cell midpoint.

use crate::error::{Error, Result};

/// Relative tolerance used when checking that time-step ratios are integers.
pub const INTEGER_RATIO_TOL: f64 = 1e-12;

/// Which of the two subdomains an item belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Left subdomain, small time step.
    Fine,
    /// Right subdomain, large time step.
    Coarse,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Fine => Side::Coarse,
            Side::Coarse => Side::Fine,
        }
    }
}

/// User-facing grid description.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub domain_lo: f64,
    pub domain_hi: f64,
    pub interface_x: f64,
    pub n_cells_fine: usize,
    pub n_cells_coarse: usize,
    pub dt_fine: f64,
    pub dt_coarse: f64,
    pub t_end: f64,
    /// Explicit cell widths for the fine subdomain, left to right. Overrides `n_cells_fine`.
    pub widths_fine: Option<Vec<f64>>,
    /// Explicit cell widths for the coarse subdomain, left to right. Overrides `n_cells_coarse`.
    pub widths_coarse: Option<Vec<f64>>,
}

impl GridConfig {
    /// Uniform grid with the given cell counts.
    pub fn uniform(
        domain: (f64, f64),
        interface_x: f64,
        cells: (usize, usize),
        dt_fine: f64,
        dt_coarse: f64,
        t_end: f64,
    ) -> Self {
        GridConfig {
            domain_lo: domain.0,
            domain_hi: domain.1,
            interface_x,
            n_cells_fine: cells.0,
            n_cells_coarse: cells.1,
            dt_fine,
            dt_coarse,
            t_end,
            widths_fine: None,
            widths_coarse: None,
        }
    }

    /// The reference experiment: fine region `[0, 0.25]` with `dx = 0.01`, `dt = 0.002`;
    /// coarse region `[0.25, 1]` with `dx = 0.05`, `dt = 0.02`; final time `0.1`.
    pub fn reference() -> Self {
        GridConfig::uniform((0.0, 1.0), 0.25, (25, 15), 0.002, 0.02, 0.1)
    }

    /// Same geometry with every cell width and both time steps divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        let f = factor as f64;
        GridConfig {
            n_cells_fine: self.n_cells_fine * factor,
            n_cells_coarse: self.n_cells_coarse * factor,
            dt_fine: self.dt_fine / f,
            dt_coarse: self.dt_coarse / f,
            widths_fine: self.widths_fine.as_ref().map(|w| split_widths(w, factor)),
            widths_coarse: self.widths_coarse.as_ref().map(|w| split_widths(w, factor)),
            ..self.clone()
        }
    }
}

fn split_widths(widths: &[f64], factor: usize) -> Vec<f64> {
    widths
        .iter()
        .flat_map(|&w| std::iter::repeat(w / factor as f64).take(factor))
        .collect()
}

/// Cells of one subdomain together with its time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdomain {
    faces: Vec<f64>,
    widths: Vec<f64>,
    centers: Vec<f64>,
    dt: f64,
    steps: usize,
}

impl Subdomain {
    fn from_faces(faces: Vec<f64>, dt: f64, steps: usize) -> Self {
        let widths: Vec<f64> = faces.windows(2).map(|w| w[1] - w[0]).collect();
        let centers = faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Subdomain {
            faces,
            widths,
            centers,
            dt,
            steps,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.widths.len()
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Time step used in this subdomain.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of time steps to reach the final time.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn length(&self) -> f64 {
        self.faces[self.faces.len() - 1] - self.faces[0]
    }

    /// Distance between the centers of cells `j` and `j + 1`.
    pub fn center_distance(&self, j: usize) -> f64 {
        0.5 * (self.widths[j] + self.widths[j + 1])
    }

    /// Distance from the center of cell `j` to either of its faces.
    pub fn half_width(&self, j: usize) -> f64 {
        0.5 * self.widths[j]
    }
}

/// Validated composite grid. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeGrid {
    fine: Subdomain,
    coarse: Subdomain,
    interface_x: f64,
    ratio: usize,
    t_end: f64,
}

impl CompositeGrid {
    pub fn fine(&self) -> &Subdomain {
        &self.fine
    }

    pub fn coarse(&self) -> &Subdomain {
        &self.coarse
    }

    pub fn subdomain(&self, side: Side) -> &Subdomain {
        match side {
            Side::Fine => &self.fine,
            Side::Coarse => &self.coarse,
        }
    }

    pub fn interface_x(&self) -> f64 {
        self.interface_x
    }

    /// Number of fine steps per coarse step.
    pub fn ratio(&self) -> usize {
        self.ratio
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt_fine(&self) -> f64 {
        self.fine.dt
    }

    pub fn dt_coarse(&self) -> f64 {
        self.coarse.dt
    }

    /// Number of coarse windows.
    pub fn windows(&self) -> usize {
        self.coarse.steps
    }

    /// Distance from the interface to the center of the adjacent cell on `side`.
    pub fn interface_distance(&self, side: Side) -> f64 {
        match side {
            Side::Fine => self.fine.half_width(self.fine.n_cells() - 1),
            Side::Coarse => self.coarse.half_width(0),
        }
    }

    /// Distance between the two cell centers adjacent to the interface.
    pub fn interface_cell_distance(&self) -> f64 {
        self.interface_distance(Side::Fine) + self.interface_distance(Side::Coarse)
    }

    /// Start time of coarse window `n`.
    pub fn window_start(&self, window: usize) -> f64 {
        window as f64 * self.coarse.dt
    }

    /// Time of fine sub-level `k` (`0..=K`) inside window `n`.
    pub fn sublevel_time(&self, window: usize, k: usize) -> f64 {
        self.window_start(window) + k as f64 * self.fine.dt
    }

    /// All cell centers, fine subdomain first.
    pub fn all_centers(&self) -> Vec<f64> {
        self.fine
            .centers
            .iter()
            .chain(self.coarse.centers.iter())
            .copied()
            .collect()
    }
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite, got {v}")))
    }
}

/// Round `value` to a positive integer if it lies within [`INTEGER_RATIO_TOL`] of one.
fn integer_ratio(name: &str, value: f64) -> Result<usize> {
    let rounded = value.round();
    if rounded < 1.0 || (value - rounded).abs() > INTEGER_RATIO_TOL * rounded {
        return Err(Error::Config(format!(
            "{name} must be a positive integer, got {value}"
        )));
    }
    Ok(rounded as usize)
}

fn subdomain_faces(
    lo: f64,
    hi: f64,
    n_cells: usize,
    widths: Option<&[f64]>,
    label: &str,
) -> Result<Vec<f64>> {
    let length = hi - lo;
    match widths {
        None => {
            if n_cells == 0 {
                return Err(Error::Config(format!(
                    "{label} subdomain needs at least one cell"
                )));
            }
            let n = n_cells as f64;
            let mut faces: Vec<f64> = (0..=n_cells)
                .map(|i| lo + length * (i as f64 / n))
                .collect();
            faces[n_cells] = hi;
            Ok(faces)
        }
        Some(widths) => {
            if widths.is_empty() {
                return Err(Error::Config(format!(
                    "{label} subdomain needs at least one cell"
                )));
            }
            if let Some(w) = widths.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                return Err(Error::Config(format!(
                    "{label} cell widths must be positive, got {w}"
                )));
            }
            let total: f64 = widths.iter().sum();
            if (total - length).abs() > INTEGER_RATIO_TOL * length.abs() {
                return Err(Error::Config(format!(
                    "{label} cell widths sum to {total}, subdomain length is {length}"
                )));
            }
            let mut faces = Vec::with_capacity(widths.len() + 1);
            let mut x = lo;
            faces.push(x);
            for w in &widths[..widths.len() - 1] {
                x += w;
                faces.push(x);
            }
            faces.push(hi);
            if faces.windows(2).any(|f| f[1] <= f[0]) {
                return Err(Error::Config(format!(
                    "{label} faces are not strictly increasing"
                )));
            }
            Ok(faces)
        }
    }
}

/// Build and check the composite grid described by `config`.
pub fn build_composite_grid(config: &GridConfig) -> Result<CompositeGrid> {
    for (name, v) in [
        ("domain_lo", config.domain_lo),
        ("domain_hi", config.domain_hi),
        ("interface_x", config.interface_x),
        ("dt_fine", config.dt_fine),
        ("dt_coarse", config.dt_coarse),
        ("t_end", config.t_end),
    ] {
        require_finite(name, v)?;
    }
    if !(config.domain_lo < config.interface_x && config.interface_x < config.domain_hi) {
        return Err(Error::Config(format!(
            "interface_x = {} must lie strictly inside ({}, {})",
            config.interface_x, config.domain_lo, config.domain_hi
        )));
    }
    if config.dt_fine <= 0.0 || config.dt_coarse <= 0.0 || config.t_end <= 0.0 {
        return Err(Error::Config(
            "dt_fine, dt_coarse and t_end must be positive".into(),
        ));
    }
    let ratio = integer_ratio("dt_coarse / dt_fine", config.dt_coarse / config.dt_fine)?;
    let windows = integer_ratio("t_end / dt_coarse", config.t_end / config.dt_coarse)?;

    let fine_faces = subdomain_faces(
        config.domain_lo,
        config.interface_x,
        config.n_cells_fine,
        config.widths_fine.as_deref(),
        "fine",
    )?;
    let coarse_faces = subdomain_faces(
        config.interface_x,
        config.domain_hi,
        config.n_cells_coarse,
        config.widths_coarse.as_deref(),
        "coarse",
    )?;

    let dt_coarse = config.dt_coarse;
    let dt_fine = dt_coarse / ratio as f64;
    Ok(CompositeGrid {
        fine: Subdomain::from_faces(fine_faces, dt_fine, ratio * windows),
        coarse: Subdomain::from_faces(coarse_faces, dt_coarse, windows),
        interface_x: config.interface_x,
        ratio,
        t_end: config.t_end,
    })
}

/// Result of the interface mesh-quality checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub alpha_max: f64,
    /// `d_master / d_slave` with the coarse subdomain as master.
    pub stretch_coarse_master: f64,
    /// `d_master / d_slave` with the fine subdomain as master.
    pub stretch_fine_master: f64,
    pub coarse_master_ok: bool,
    pub fine_master_ok: bool,
    /// Faces are points in 1D, so the barycenter condition always holds.
    pub barycenter_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.coarse_master_ok && self.fine_master_ok && self.barycenter_ok
    }
}

/// Measure the interface stretch ratio for both master choices against `alpha_max`.
pub fn validate_grid(grid: &CompositeGrid, alpha_max: f64) -> ValidationReport {
    let d_fine = grid.interface_distance(Side::Fine);
    let d_coarse = grid.interface_distance(Side::Coarse);
    let stretch_coarse_master = d_coarse / d_fine;
    let stretch_fine_master = d_fine / d_coarse;
    ValidationReport {
        alpha_max,
        stretch_coarse_master,
        stretch_fine_master,
        coarse_master_ok: stretch_coarse_master <= alpha_max * (1.0 + INTEGER_RATIO_TOL),
        fine_master_ok: stretch_fine_master <= alpha_max * (1.0 + INTEGER_RATIO_TOL),
        barycenter_ok: true,
    }
}
