use std::fmt;
use std::sync::Arc;

pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Data of the heat problem `∂ₜp − ∂ₓₓp = f` with Dirichlet boundary values.
#[derive(Clone)]
pub struct Problem {
    exact: Option<SpaceTimeFn>,
    source: SpaceTimeFn,
    boundary_lo: TimeFn,
    boundary_hi: TimeFn,
    initial: SpaceFn,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("has_exact_solution", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

/// How the outer Dirichlet values are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// `p = 0` on both ends of the domain.
    Homogeneous,
    /// Boundary values taken from the exact solution.
    Exact,
}

impl Problem {
    pub fn new(source: SpaceTimeFn, boundary_lo: TimeFn, boundary_hi: TimeFn, initial: SpaceFn) -> Self {
        Problem {
            exact: None,
            source,
            boundary_lo,
            boundary_hi,
            initial,
        }
    }

    /// Problem driven by a known solution: boundary and initial data are read off `exact`
    /// on the interval `[lo, hi]`.
    pub fn from_exact(exact: SpaceTimeFn, source: SpaceTimeFn, lo: f64, hi: f64) -> Self {
        let (e_lo, e_hi, e_0) = (exact.clone(), exact.clone(), exact.clone());
        Problem {
            exact: Some(exact),
            source,
            boundary_lo: Arc::new(move |t| e_lo(lo, t)),
            boundary_hi: Arc::new(move |t| e_hi(hi, t)),
            initial: Arc::new(move |x| e_0(x, 0.0)),
        }
    }

    /// Everything identically zero.
    pub fn zero() -> Self {
        Problem {
            exact: Some(Arc::new(|_, _| 0.0)),
            source: Arc::new(|_, _| 0.0),
            boundary_lo: Arc::new(|_| 0.0),
            boundary_hi: Arc::new(|_| 0.0),
            initial: Arc::new(|_| 0.0),
        }
    }

    /// Replace both boundary values by zero. The exact solution, if any, is kept for
    /// error measurement.
    pub fn with_homogeneous_boundary(mut self) -> Self {
        self.boundary_lo = Arc::new(|_| 0.0);
        self.boundary_hi = Arc::new(|_| 0.0);
        self
    }

    pub fn with_boundary_mode(self, mode: BoundaryMode) -> Self {
        match mode {
            BoundaryMode::Homogeneous => self.with_homogeneous_boundary(),
            BoundaryMode::Exact => self,
        }
    }

    pub fn with_initial(mut self, initial: SpaceFn) -> Self {
        self.initial = initial;
        self
    }

    pub fn exact(&self, x: f64, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|p| p(x, t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn source(&self, x: f64, t: f64) -> f64 {
        (self.source)(x, t)
    }

    pub fn boundary_lo(&self, t: f64) -> f64 {
        (self.boundary_lo)(t)
    }

    pub fn boundary_hi(&self, t: f64) -> f64 {
        (self.boundary_hi)(t)
    }

    pub fn initial(&self, x: f64) -> f64 {
        (self.initial)(x)
    }
}

/// `p(x, t) = exp(a(t − t²) + b x² + c x + d)` and its forcing for the heat equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialBump {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ExponentialBump {
    /// The bump peaking near `x = 0.11` used by the reference experiment.
    pub const REFERENCE: ExponentialBump = ExponentialBump {
        a: 20.0,
        b: -37.0,
        c: 8.0,
        d: -1.0,
    };

    pub fn value(&self, x: f64, t: f64) -> f64 {
        (self.a * (t - t * t) + self.b * x * x + self.c * x + self.d).exp()
    }

    /// `∂ₜp − ∂ₓₓp = p·(a(1 − 2t) − (2bx + c)² − 2b)`.
    pub fn forcing(&self, x: f64, t: f64) -> f64 {
        let slope = 2.0 * self.b * x + self.c;
        self.value(x, t) * (self.a * (1.0 - 2.0 * t) - slope * slope - 2.0 * self.b)
    }

    pub fn problem(self, lo: f64, hi: f64) -> Problem {
        Problem::from_exact(
            Arc::new(move |x, t| self.value(x, t)),
            Arc::new(move |x, t| self.forcing(x, t)),
            lo,
            hi,
        )
    }
}

/// The reference manufactured problem on `[0, 1]`, boundary values from the exact solution.
pub fn manufactured_problem() -> Problem {
    ExponentialBump::REFERENCE.problem(0.0, 1.0)
}

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    128.0 / 225.0,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Space-time average of the source over `cell × time`, 5-point Gauss–Legendre per axis.
pub fn cell_average_source(problem: &Problem, cell: (f64, f64), time: (f64, f64)) -> f64 {
    let (xm, xr) = (0.5 * (cell.0 + cell.1), 0.5 * (cell.1 - cell.0));
    let (tm, tr) = (0.5 * (time.0 + time.1), 0.5 * (time.1 - time.0));
    let mut acc = 0.0;
    for (wt, nt) in GAUSS_WEIGHTS.iter().zip(GAUSS_NODES) {
        let t = tm + tr * nt;
        for (wx, nx) in GAUSS_WEIGHTS.iter().zip(GAUSS_NODES) {
            acc += wt * wx * problem.source(xm + xr * nx, t);
        }
    }
    0.25 * acc
}
