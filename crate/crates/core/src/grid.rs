//! Dense complex matrices with one contiguous column per OFDM symbol.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Complex64, Error, Result};

/// An `rows × cols` complex matrix stored column by column.
///
/// For symbol grids the rows are subcarriers `n` and the columns OFDM
/// symbols `m`; for range-Doppler maps the rows are delay bins `l` and the
/// columns Doppler bins `ν`. Either way a column is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Builds a grid from column-major data.
    pub fn from_columns(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: data.len(),
                cols: 1,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[col * self.rows + row] = value;
    }

    #[inline]
    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut Complex64 {
        debug_assert!(row < self.rows && col < self.cols);
        &mut self.data[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn column_mut(&mut self, col: usize) -> &mut [Complex64] {
        &mut self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// Errors unless the grid is `rows × cols`.
    pub fn check_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows != rows || self.cols != cols {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Σ |entry|².
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entrywise |a − b|.
    pub fn max_abs_diff(&self, other: &Grid) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Iterates `(row, col, value)` in storage order.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let rows = self.rows;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, z)| (i % rows, i / rows, *z))
    }
}
