use crate::error::{Error, Result};
use crate::scheme::LinearSystem;

/// Relative residual accepted after a direct solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Solve `A x = b` by banded LU with partial pivoting.
///
/// Row `i` of the working band holds columns `i − kl ..= i + kl + ku`, which is enough
/// room for the fill-in row swaps can create.
pub fn solve_linear(sys: &LinearSystem) -> Result<Vec<f64>> {
    let n = sys.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (kl, ku) = sys.bandwidths();
    let upper = kl + ku;
    let width = kl + upper + 1;
    let mut band = vec![0.0; n * width];
    let at = |i: usize, j: usize| i * width + j + kl - i;
    for i in 0..n {
        for &(j, v) in sys.row(i) {
            band[at(i, j)] += v;
        }
    }
    let mut b = sys.rhs().to_vec();
    let scale = sys.norm_inf();
    if !scale.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("system contains non-finite entries".into()));
    }
    let tiny = n as f64 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    for col in 0..n {
        let last_row = (col + kl).min(n - 1);
        let last_col = (col + upper).min(n - 1);
        let mut pivot = col;
        let mut best = band[at(col, col)].abs();
        for r in col + 1..=last_row {
            let v = band[at(r, col)].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best <= tiny {
            return Err(Error::Solver(format!(
                "matrix is numerically singular at column {col} (pivot {best:.3e})"
            )));
        }
        if pivot != col {
            for j in col..=last_col {
                band.swap(at(col, j), at(pivot, j));
            }
            b.swap(col, pivot);
        }
        let d = band[at(col, col)];
        for r in col + 1..=last_row {
            let factor = band[at(r, col)] / d;
            if factor == 0.0 {
                continue;
            }
            band[at(r, col)] = 0.0;
            for j in col + 1..=last_col {
                band[at(r, j)] -= factor * band[at(col, j)];
            }
            b[r] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let last_col = (i + upper).min(n - 1);
        let mut acc = b[i];
        for j in i + 1..=last_col {
            acc -= band[at(i, j)] * x[j];
        }
        x[i] = acc / band[at(i, i)];
    }

    let ax = sys.matvec(&x);
    let res = ax
        .iter()
        .zip(sys.rhs())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let x_norm = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let b_norm = sys.rhs().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let bound = RESIDUAL_TOL * (scale * x_norm + b_norm);
    if !(res <= bound) {
        return Err(Error::Solver(format!(
            "residual {res:.3e} exceeds {bound:.3e} after direct solve"
        )));
    }
    Ok(x)
}
