//! Piecewise-constant-in-time traces on the interface and the L² projections
//! between the fine and coarse time grids of one coarse window.

use crate::error::{check_len, Error, Result};

/// Time resolution of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// One value per fine sub-step (`K` values per window).
    Fine,
    /// One value per coarse step.
    Coarse,
}

/// Interface values over one coarse window, constant on each time sub-interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    values: Vec<f64>,
    resolution: Resolution,
    dt: f64,
}

impl Trace {
    /// Fine trace; one value per sub-step of length `dt`.
    pub fn fine(values: Vec<f64>, dt: f64) -> Self {
        Trace {
            values,
            resolution: Resolution::Fine,
            dt,
        }
    }

    pub fn coarse(value: f64, dt: f64) -> Self {
        Trace {
            values: vec![value],
            resolution: Resolution::Coarse,
            dt,
        }
    }

    pub fn zeros(resolution: Resolution, len: usize, dt: f64) -> Self {
        Trace {
            values: vec![0.0; len],
            resolution,
            dt,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Value on sub-interval `k`.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Time integral over the window, `Σ dt·v`.
    pub fn integral(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc + self.dt * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Check that this trace has the shape expected for `resolution` with ratio `ratio`.
    pub fn expect_shape(&self, resolution: Resolution, ratio: usize, context: &'static str) -> Result<()> {
        let expected = match resolution {
            Resolution::Fine => ratio,
            Resolution::Coarse => 1,
        };
        if self.resolution != resolution {
            return Err(Error::Dimension {
                expected,
                actual: self.values.len(),
                context,
            });
        }
        check_len(expected, self.values.len(), context)
    }
}

/// Q₂: average of the `K` fine values over the coarse interval.
pub fn project_fine_to_coarse(trace: &Trace, ratio: usize) -> Result<Trace> {
    trace.expect_shape(Resolution::Fine, ratio, "project_fine_to_coarse input")?;
    let sum = trace.values.iter().fold(0.0, |acc, v| acc + v);
    Ok(Trace::coarse(sum / ratio as f64, trace.dt * ratio as f64))
}

/// Q₁: replicate the coarse value on each of the `K` fine sub-intervals.
pub fn inject_coarse_to_fine(trace: &Trace, ratio: usize) -> Result<Trace> {
    trace.expect_shape(Resolution::Coarse, ratio, "inject_coarse_to_fine input")?;
    Ok(Trace::fine(
        vec![trace.values[0]; ratio],
        trace.dt / ratio as f64,
    ))
}

/// Discrete L² pairing on one interface face, `Σ dt·a·b·meas(face)`.
pub fn interface_pairing(a: &Trace, b: &Trace, face_measure: f64) -> Result<f64> {
    if a.resolution != b.resolution {
        return Err(Error::Dimension {
            expected: a.len(),
            actual: b.len(),
            context: "interface_pairing: mixed resolutions",
        });
    }
    check_len(a.len(), b.len(), "interface_pairing")?;
    let sum = a
        .values
        .iter()
        .zip(&b.values)
        .fold(0.0, |acc, (x, y)| acc + x * y);
    Ok(a.dt * sum * face_measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Neumaier summation, independent of the plain fold used above.
    fn compensated_mean(values: &[f64]) -> f64 {
        let mut sum = 0.0_f64;
        let mut c = 0.0_f64;
        for &v in values {
            let t = sum + v;
            if sum.abs() >= v.abs() {
                c += (sum - t) + v;
            } else {
                c += (v - t) + sum;
            }
            sum = t;
        }
        (sum + c) / values.len() as f64
    }

    #[test]
    fn mean_of_four() {
        let t = Trace::fine(vec![1.0, 2.0, 3.0, 4.0], 0.25);
        let c = project_fine_to_coarse(&t, 4).unwrap();
        assert_eq!(c.values(), &[2.5]);
        assert_eq!(c.resolution(), Resolution::Coarse);
        assert!((c.dt() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constants_preserved() {
        for k in [1, 2, 3, 7, 10] {
            let t = Trace::fine(vec![-3.25; k], 0.1);
            assert_eq!(project_fine_to_coarse(&t, k).unwrap().at(0), -3.25);
        }
    }

    #[test]
    fn mean_matches_compensated_sum() {
        let vals = [0.1, -0.3, 0.7];
        let t = Trace::fine(vals.to_vec(), 1.0);
        let got = project_fine_to_coarse(&t, 3).unwrap().at(0);
        let oracle = compensated_mean(&vals);
        assert!((got - oracle).abs() <= 2.0 * f64::EPSILON * oracle.abs());
        assert!((oracle - 0.5 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn wrong_length_is_dimension_error() {
        let t = Trace::fine(vec![1.0, 2.0], 0.1);
        assert!(matches!(
            project_fine_to_coarse(&t, 3),
            Err(Error::Dimension { expected: 3, actual: 2, .. })
        ));
        let c = Trace::coarse(1.0, 0.1);
        assert!(project_fine_to_coarse(&c, 1).is_err());
        assert!(inject_coarse_to_fine(&t, 2).is_err());
    }

    #[test]
    fn injection_replicates() {
        let c = Trace::coarse(7.0, 0.3);
        let f = inject_coarse_to_fine(&c, 3).unwrap();
        assert_eq!(f.values(), &[7.0, 7.0, 7.0]);
        assert!((f.dt() - 0.1).abs() < 1e-15);
        assert_eq!(project_fine_to_coarse(&f, 3).unwrap(), c);
    }

    #[test]
    fn pairing_of_unit_traces_is_window_length() {
        let one = Trace::fine(vec![1.0; 10], 0.002);
        let p = interface_pairing(&one, &one, 1.0).unwrap();
        assert!((p - 0.02).abs() < 1e-15);
        let zero = Trace::zeros(Resolution::Fine, 10, 0.002);
        assert_eq!(interface_pairing(&zero, &one, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn pairing_rejects_mixed_resolution() {
        let f = Trace::fine(vec![1.0], 0.1);
        let c = Trace::coarse(1.0, 0.1);
        assert!(interface_pairing(&f, &c, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn adjointness(
            k in prop::sample::select(vec![1usize, 2, 3, 10]),
            coarse in -10.0f64..10.0,
            fine in prop::collection::vec(-10.0f64..10.0, 10),
            dt in 1e-4f64..1.0,
        ) {
            let u2 = Trace::coarse(coarse, dt * k as f64);
            let u1 = Trace::fine(fine[..k].to_vec(), dt);
            let lhs = interface_pairing(&inject_coarse_to_fine(&u2, k).unwrap(), &u1, 1.0).unwrap();
            let rhs = interface_pairing(&u2, &project_fine_to_coarse(&u1, k).unwrap(), 1.0).unwrap();
            let scale = dt * k as f64 * coarse.abs() * u1.max_abs();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn projection_is_non_expansive(values in prop::collection::vec(-1e3f64..1e3, 1..12)) {
            let k = values.len();
            let t = Trace::fine(values, 0.5);
            let c = project_fine_to_coarse(&t, k).unwrap();
            prop_assert!(c.at(0).abs() <= t.max_abs() * (1.0 + 1e-15));
        }

        #[test]
        fn unit_ratio_is_identity(v in -1e6f64..1e6) {
            let f = Trace::fine(vec![v], 0.1);
            prop_assert_eq!(project_fine_to_coarse(&f, 1).unwrap().at(0), v);
            let c = Trace::coarse(v, 0.1);
            let injected = inject_coarse_to_fine(&c, 1).unwrap();
            prop_assert_eq!(injected.values(), &[v]);
        }
    }
}
