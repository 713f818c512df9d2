use crate::grid::Side;

/// What a row/column of an assembled system stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unknown {
    /// Cell average on `side`, at time level `level` of the current window
    /// (`1..=K` on the fine side, `1` on the coarse side).
    Cell { side: Side, cell: usize, level: usize },
    /// Interface pressure carried by `side` at `level`.
    InterfacePressure { side: Side, level: usize },
}

/// Square sparse system stored row-wise. Entries with the same column are summed.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    labels: Vec<Unknown>,
}

impl LinearSystem {
    pub fn new(labels: Vec<Unknown>) -> Self {
        let n = labels.len();
        LinearSystem {
            rows: vec![Vec::new(); n],
            rhs: vec![0.0; n],
            labels,
        }
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let entries = &mut self.rows[row];
        match entries.iter_mut().find(|(c, _)| *c == col) {
            Some(slot) => slot.1 += value,
            None => entries.push((col, value)),
        }
    }

    pub fn add_rhs(&mut self, row: usize, value: f64) {
        self.rhs[row] += value;
    }

    pub fn row(&self, row: usize) -> &[(usize, f64)] {
        &self.rows[row]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn labels(&self) -> &[Unknown] {
        &self.labels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.rows[row]
            .iter()
            .filter(|(c, _)| *c == col)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(c, v)| v * x[c]).sum())
            .collect()
    }

    /// Lower and upper bandwidths over the stored entries.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, _) in r {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = vec![vec![0.0; n]; n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                out[i][j] += v;
            }
        }
        out
    }

    /// Multiply row `row` and its right-hand side by `factor`.
    pub fn scale_row(&mut self, row: usize, factor: f64) {
        for e in &mut self.rows[row] {
            e.1 *= factor;
        }
        self.rhs[row] *= factor;
    }
}
