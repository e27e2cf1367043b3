//! Compressed-sparse-row operators and a triplet builder.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("dimension mismatch: operator is {rows}x{cols}, operand has length {len}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Assembled sparse bilinear form in CSR layout. Column indices are strictly
/// increasing within each row and duplicate triplets have been summed.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

/// Accumulates (row, col, value) triplets before compression.
#[derive(Clone, Debug)]
pub struct CooBuilder {
    nrows: usize,
    ncols: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl CooBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        CooBuilder {
            nrows,
            ncols,
            triplets: Vec::new(),
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.triplets.push((row, col, value));
    }

    /// Copies `op` (optionally scaled / transposed) into this builder at a
    /// block offset. Used to compose saddle-point and monolithic systems.
    pub fn add_block(
        &mut self,
        row_offset: usize,
        col_offset: usize,
        op: &SparseOperator,
        scale: f64,
        transpose: bool,
    ) {
        for row in 0..op.nrows {
            for idx in op.row_ptr[row]..op.row_ptr[row + 1] {
                let col = op.col_idx[idx];
                let v = scale * op.values[idx];
                if transpose {
                    self.add(row_offset + col, col_offset + row, v);
                } else {
                    self.add(row_offset + row, col_offset + col, v);
                }
            }
        }
    }

    pub fn build(mut self) -> SparseOperator {
        self.triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.triplets.len());
        let mut values = Vec::with_capacity(self.triplets.len());
        let mut cur_row = 0usize;
        for &(r, c, v) in &self.triplets {
            while cur_row < r {
                cur_row += 1;
                row_ptr[cur_row] = col_idx.len();
            }
            if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
            }
        }
        while cur_row < self.nrows {
            cur_row += 1;
            row_ptr[cur_row] = col_idx.len();
        }
        SparseOperator {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl SparseOperator {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseOperator {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        if x.len() != self.ncols {
            return Err(SparseError::DimensionMismatch {
                rows: self.nrows,
                cols: self.ncols,
                len: x.len(),
            });
        }
        let mut y = vec![0.0; self.nrows];
        for row in 0..self.nrows {
            let mut acc = 0.0;
            for idx in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.values[idx] * x[self.col_idx[idx]];
            }
            y[row] = acc;
        }
        Ok(y)
    }

    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        if x.len() != self.nrows {
            return Err(SparseError::DimensionMismatch {
                rows: self.ncols,
                cols: self.nrows,
                len: x.len(),
            });
        }
        let mut y = vec![0.0; self.ncols];
        for row in 0..self.nrows {
            let xr = x[row];
            for idx in self.row_ptr[row]..self.row_ptr[row + 1] {
                y[self.col_idx[idx]] += self.values[idx] * xr;
            }
        }
        Ok(y)
    }

    /// Quadratic form `xᵀ A y`.
    pub fn pairing(&self, x: &[f64], y: &[f64]) -> Result<f64, SparseError> {
        let ay = self.matvec(y)?;
        if x.len() != self.nrows {
            return Err(SparseError::DimensionMismatch {
                rows: self.nrows,
                cols: self.ncols,
                len: x.len(),
            });
        }
        Ok(dot(x, &ay))
    }

    pub fn transpose(&self) -> SparseOperator {
        let mut b = CooBuilder::new(self.ncols, self.nrows);
        b.add_block(0, 0, self, 1.0, true);
        b.build()
    }

    /// `self + scale · other`; the operators must have identical shape.
    pub fn add_scaled(
        &self,
        other: &SparseOperator,
        scale: f64,
    ) -> Result<SparseOperator, SparseError> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(SparseError::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut b = CooBuilder::new(self.nrows, self.ncols);
        b.add_block(0, 0, self, 1.0, false);
        b.add_block(0, 0, other, scale, false);
        Ok(b.build())
    }

    pub fn scaled(&self, scale: f64) -> SparseOperator {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= scale;
        }
        out
    }

    /// Largest absolute asymmetry `max |A_ij - A_ji|`; for symmetry checks.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in 0..self.nrows {
            for idx in self.row_ptr[row]..self.row_ptr[row + 1] {
                let col = self.col_idx[idx];
                worst = worst.max((self.values[idx] - self.get(col, row)).abs());
            }
        }
        worst
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `M · (α x + β y)`; pass an empty `y` to drop the second term. Used for the
/// discrete time-derivative history on step right-hand sides.
pub fn rhs_history(m: &SparseOperator, x: &[f64], alpha: f64, y: &[f64], beta: f64) -> Vec<f64> {
    let combo: Vec<f64> = if y.is_empty() {
        x.iter().map(|&v| alpha * v).collect()
    } else {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect()
    };
    m.matvec(&combo)
        .expect("history vector matches mass matrix")
}
