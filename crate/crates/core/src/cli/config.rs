//! Flat `section.key = value` run configuration.
//!
//! Blank lines and anything after `#` are ignored. Every key is optional; missing keys
//! take the reference experiment's values. Unknown or repeated keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{build_composite_grid, CompositeGrid, GridConfig};
use crate::scheme::{BoundaryMode, ExponentialBump, InterfaceScheme, Master, Problem, Variant};
use crate::solver::{SolveMode, DEFAULT_EPS, DEFAULT_MAX_ITERS};

/// Source term and exact solution of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemKind {
    /// The reference exponential bump.
    Manufactured,
    /// All data zero.
    Zero,
    /// Exponential bump `exp(a(t − t²) + b x² + c x + d)` with user coefficients.
    Custom(ExponentialBump),
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Manufactured => "manufactured",
            ProblemKind::Zero => "zero",
            ProblemKind::Custom(_) => "custom-coefficients",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub variant: Variant,
    pub mode: SolveMode,
    pub problem: ProblemKind,
    pub boundary_mode: BoundaryMode,
    pub output_dir: PathBuf,
    /// Number of factor-2 refinement levels for a convergence study, the first being `grid`.
    pub convergence_levels: usize,
    /// Replace computed solutions by the exact solution sampled on the grid. Test hook for
    /// the convergence report.
    pub inject_exact: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: GridConfig::reference(),
            variant: Variant::new(InterfaceScheme::CellNeighbours, Master::Fine),
            mode: SolveMode::default(),
            problem: ProblemKind::Manufactured,
            boundary_mode: BoundaryMode::Exact,
            output_dir: PathBuf::from("out"),
            convergence_levels: 4,
            inject_exact: false,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub variant: Option<Variant>,
    pub mode: Option<SolveMode>,
    pub eps: Option<f64>,
    pub max_iters: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}` as a number")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_num::<f64>(key, v.trim()))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{key}`: expected true or false, got `{value}`"))),
    }
}

/// Split the text into key/value pairs, line numbers kept for messages.
fn pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected `key = value`", i + 1)));
        };
        let key = key.trim().to_string();
        if out.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
            return Err(Error::Config(format!("line {}: key `{key}` given twice", i + 1)));
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut eps = None;
        let mut max_iters = None;
        let mut coefficients = None;
        let mut kind = None;
        for (key, (line, value)) in pairs(text)? {
            let v = value.as_str();
            let g = &mut cfg.grid;
            match key.as_str() {
                "grid.domain_lo" => g.domain_lo = parse_num(&key, v)?,
                "grid.domain_hi" => g.domain_hi = parse_num(&key, v)?,
                "grid.interface_x" => g.interface_x = parse_num(&key, v)?,
                "grid.n_cells_fine" => g.n_cells_fine = parse_num(&key, v)?,
                "grid.n_cells_coarse" => g.n_cells_coarse = parse_num(&key, v)?,
                "grid.widths_fine" => g.widths_fine = Some(parse_list(&key, v)?),
                "grid.widths_coarse" => g.widths_coarse = Some(parse_list(&key, v)?),
                "grid.dt_fine" => g.dt_fine = parse_num(&key, v)?,
                "grid.dt_coarse" => g.dt_coarse = parse_num(&key, v)?,
                "grid.t_end" => g.t_end = parse_num(&key, v)?,
                "solver.variant" => cfg.variant = v.parse()?,
                "solver.mode" => cfg.mode = v.parse()?,
                "solver.eps" => eps = Some(parse_num(&key, v)?),
                "solver.max_iters" => max_iters = Some(parse_num(&key, v)?),
                "problem.kind" => kind = Some(v.to_ascii_lowercase()),
                "problem.coefficients" => coefficients = Some(parse_list(&key, v)?),
                "problem.boundary" => {
                    cfg.boundary_mode = match v.to_ascii_lowercase().as_str() {
                        "exact" => BoundaryMode::Exact,
                        "homogeneous" => BoundaryMode::Homogeneous,
                        _ => return Err(Error::Config(format!("`{key}`: expected exact or homogeneous, got `{v}`"))),
                    }
                }
                "output.dir" => cfg.output_dir = PathBuf::from(v),
                "convergence.levels" => cfg.convergence_levels = parse_num(&key, v)?,
                "convergence.inject_exact" => cfg.inject_exact = parse_bool(&key, v)?,
                _ => return Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
            }
        }

        cfg.problem = match (kind.as_deref(), coefficients) {
            (None | Some("manufactured"), None) => ProblemKind::Manufactured,
            (Some("zero"), None) => ProblemKind::Zero,
            (Some("custom-coefficients"), Some(c)) => {
                let [a, b, c, d] = c[..] else {
                    return Err(Error::Config(format!(
                        "`problem.coefficients` needs 4 values a, b, c, d, got {}",
                        c.len()
                    )));
                };
                ProblemKind::Custom(ExponentialBump { a, b, c, d })
            }
            (Some("custom-coefficients"), None) => {
                return Err(Error::Config("`problem.kind = custom-coefficients` needs `problem.coefficients`".into()))
            }
            (_, Some(_)) => {
                return Err(Error::Config("`problem.coefficients` only applies to custom-coefficients".into()))
            }
            (Some(other), None) => return Err(Error::Config(format!("unknown problem kind `{other}`"))),
        };
        cfg.set_tolerances(eps, max_iters);
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    /// Tolerance and sweep limit only mean something for the converged mode.
    fn set_tolerances(&mut self, eps: Option<f64>, max_iters: Option<usize>) {
        if let SolveMode::Converged { eps: e, max_iters: m } = &mut self.mode {
            *e = eps.unwrap_or(*e);
            *m = max_iters.unwrap_or(*m);
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.variant {
            self.variant = v;
        }
        if let Some(m) = o.mode {
            // A mode given on the command line keeps the file's tolerances.
            let (eps, iters) = match self.mode {
                SolveMode::Converged { eps, max_iters } => (eps, max_iters),
                _ => (DEFAULT_EPS, DEFAULT_MAX_ITERS),
            };
            self.mode = m;
            self.set_tolerances(Some(eps), Some(iters));
        }
        self.set_tolerances(o.eps, o.max_iters);
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
    }

    /// Everything that can be checked before any work starts.
    pub fn validate(&self) -> Result<CompositeGrid> {
        self.mode.validate()?;
        if self.convergence_levels == 0 {
            return Err(Error::Config("`convergence.levels` must be at least 1".into()));
        }
        build_composite_grid(&self.grid)
    }

    pub fn problem(&self) -> Problem {
        let (lo, hi) = (self.grid.domain_lo, self.grid.domain_hi);
        let p = match self.problem {
            ProblemKind::Manufactured => ExponentialBump::REFERENCE.problem(lo, hi),
            ProblemKind::Zero => Problem::zero(),
            ProblemKind::Custom(bump) => bump.problem(lo, hi),
        };
        p.with_boundary_mode(self.boundary_mode)
    }
}
