//! Polynomial matrices in z (the unit-delay operator) and the
//! coefficient recursions that drive kernel and symbol propagation.

use crate::error::MatrixError;
use crate::gf::{Gf, Sym};

use super::mat::Mat;

/// Scalar polynomial helpers on coefficient vectors (index = power of z).
pub mod scalar {
    use super::*;

    pub fn trim(p: &mut Vec<Sym>) {
        while p.last() == Some(&0) {
            p.pop();
        }
    }

    pub fn add(a: &[Sym], b: &[Sym]) -> Vec<Sym> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, &v) in a.iter().enumerate() {
            out[i] ^= v;
        }
        for (i, &v) in b.iter().enumerate() {
            out[i] ^= v;
        }
        trim(&mut out);
        out
    }

    pub fn mul(gf: &Gf, a: &[Sym], b: &[Sym]) -> Vec<Sym> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x != 0 {
                gf.axpy(&mut out[i..i + b.len()], x, b);
            }
        }
        trim(&mut out);
        out
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(p: &[Sym]) -> isize {
        p.iter().rposition(|&v| v != 0).map_or(-1, |i| i as isize)
    }
}

/// A column of polynomials stored coefficient-major:
/// coefficient `t` is the length-`rows` vector `data[t*rows..(t+1)*rows]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSeries {
    rows: usize,
    data: Vec<Sym>,
}

impl ColumnSeries {
    pub fn new(rows: usize) -> Self {
        Self { rows, data: Vec::new() }
    }

    /// Constant column.
    pub fn constant(v: &[Sym]) -> Self {
        Self { rows: v.len(), data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of stored coefficients (times computed so far).
    pub fn len(&self) -> usize {
        if self.rows == 0 {
            0
        } else {
            self.data.len() / self.rows
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn coeff(&self, t: usize) -> Option<&[Sym]> {
        self.data.get(t * self.rows..(t + 1) * self.rows)
    }

    pub fn push(&mut self, c: &[Sym]) {
        assert_eq!(c.len(), self.rows);
        self.data.extend_from_slice(c);
    }

    /// Highest power with a nonzero coefficient, -1 if none.
    pub fn degree(&self) -> isize {
        (0..self.len()).rev().find(|&t| self.coeff(t).unwrap().iter().any(|&v| v != 0)).map_or(-1, |t| t as isize)
    }
}

/// Matrix of polynomials as a list of coefficient matrices `C_0..C_L`.
///
/// Trailing zero coefficients are trimmed, so the degree is canonical and
/// the zero matrix has degree -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    coeffs: Vec<Mat>,
}

impl PolyMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, coeffs: Vec::new() }
    }

    pub fn new(rows: usize, cols: usize, coeffs: Vec<Mat>) -> Result<Self, MatrixError> {
        if let Some(c) = coeffs.iter().find(|c| c.rows() != rows || c.cols() != cols) {
            return Err(MatrixError::Dimension(format!(
                "coefficient is {}x{}, expected {rows}x{cols}",
                c.rows(),
                c.cols()
            )));
        }
        let mut out = Self { rows, cols, coeffs };
        out.trim();
        Ok(out)
    }

    /// Builds from entry polynomials: `entries[i][j]` lists the
    /// coefficients of row i, column j in ascending powers of z.
    pub fn from_entries(entries: &[Vec<Vec<Sym>>]) -> Result<Self, MatrixError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Dimension("ragged entry rows".into()));
        }
        let len = entries.iter().flatten().map(Vec::len).max().unwrap_or(0);
        let mut coeffs = vec![Mat::zeros(rows, cols); len];
        for (i, row) in entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                for (t, &v) in p.iter().enumerate() {
                    coeffs[t].set(i, j, v);
                }
            }
        }
        Self::new(rows, cols, coeffs)
    }

    /// Collects a matrix whose columns are the given series; coefficients
    /// past a series' stored length are zero.
    pub fn from_columns(rows: usize, columns: &[&ColumnSeries]) -> Result<Self, MatrixError> {
        if let Some(c) = columns.iter().find(|c| c.rows() != rows) {
            return Err(MatrixError::Dimension(format!("column with {} rows, expected {rows}", c.rows())));
        }
        let len = columns.iter().map(|c| c.len()).max().unwrap_or(0);
        let coeffs = (0..len)
            .map(|t| {
                let mut m = Mat::zeros(rows, columns.len());
                for (j, c) in columns.iter().enumerate() {
                    if let Some(v) = c.coeff(t) {
                        for (i, &x) in v.iter().enumerate() {
                            m.set(i, j, x);
                        }
                    }
                }
                m
            })
            .collect();
        Self::new(rows, columns.len(), coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Mat::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    /// Coefficient of z^t (zero matrix past the degree).
    pub fn coeff(&self, t: usize) -> Mat {
        self.coeffs.get(t).cloned().unwrap_or_else(|| Mat::zeros(self.rows, self.cols))
    }

    /// Coefficients `C_0..C_t`, zero-padded.
    pub fn coeffs_through(&self, t: usize) -> Vec<Mat> {
        (0..=t).map(|i| self.coeff(i)).collect()
    }

    /// Drops all powers above `t`.
    pub fn truncated(&self, t: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(t + 1);
        out.trim();
        out
    }

    pub fn entry(&self, i: usize, j: usize) -> Vec<Sym> {
        let mut p: Vec<Sym> = self.coeffs.iter().map(|c| c.get(i, j)).collect();
        scalar::trim(&mut p);
        p
    }
}

/// One coefficient of an outgoing global kernel:
/// `sum over inputs e' of sum_{i<=t} k_{e',e,i} f_{e',t-i}`.
///
/// Input coefficients are only read where the kernel coefficient is
/// nonzero, so a lag-0 entry that is zero never needs `f_{e',t}`.
pub fn conv_step(
    gf: &Gf,
    f_in: &[&ColumnSeries],
    k_in: &[&[Sym]],
    t: usize,
) -> Result<Vec<Sym>, MatrixError> {
    let rows = f_in.first().map_or(0, |f| f.rows());
    let mut out = vec![0; rows];
    conv_step_into(gf, f_in, k_in, t, &mut out)?;
    Ok(out)
}

/// In-place form of [`conv_step`]; `out` is overwritten.
pub fn conv_step_into(
    gf: &Gf,
    f_in: &[&ColumnSeries],
    k_in: &[&[Sym]],
    t: usize,
    out: &mut [Sym],
) -> Result<(), MatrixError> {
    if f_in.len() != k_in.len() {
        return Err(MatrixError::Dimension(format!(
            "{} input kernels for {} kernel polynomials",
            f_in.len(),
            k_in.len()
        )));
    }
    out.fill(0);
    for (f, k) in f_in.iter().zip(k_in) {
        if f.rows() != out.len() {
            return Err(MatrixError::Dimension(format!("input has {} rows, expected {}", f.rows(), out.len())));
        }
        for (i, &c) in k.iter().enumerate().take(t + 1) {
            if c == 0 {
                continue;
            }
            match f.coeff(t - i) {
                Some(v) => gf.axpy(out, c, v),
                None => return Err(MatrixError::MissingHistory { needed: t - i, have: f.len() }),
            }
        }
    }
    Ok(())
}

/// Symbol sent on an edge at time t:
/// `sum over inputs e' of sum_{i<=t} k_{e',e,i} y_{e',t-i}`.
pub fn encode_symbol(gf: &Gf, y_hist: &[&[Sym]], k_in: &[&[Sym]], t: usize) -> Result<Sym, MatrixError> {
    if y_hist.len() != k_in.len() {
        return Err(MatrixError::Dimension(format!(
            "{} histories for {} kernels",
            y_hist.len(),
            k_in.len()
        )));
    }
    let mut acc = 0;
    for (y, k) in y_hist.iter().zip(k_in) {
        for (i, &c) in k.iter().enumerate().take(t + 1) {
            if c == 0 {
                continue;
            }
            match y.get(t - i) {
                Some(&v) => acc ^= gf.mul(c, v),
                None => return Err(MatrixError::MissingHistory { needed: t - i, have: y.len() }),
            }
        }
    }
    Ok(acc)
}

/// Determinant of a square polynomial matrix by cofactor expansion.
pub fn determinant(gf: &Gf, f: &PolyMatrix) -> Result<Vec<Sym>, MatrixError> {
    if f.rows() != f.cols() {
        return Err(MatrixError::NotSquare { rows: f.rows(), cols: f.cols() });
    }
    let n = f.rows();
    let entries: Vec<Vec<Vec<Sym>>> = (0..n).map(|i| (0..n).map(|j| f.entry(i, j)).collect()).collect();
    Ok(cofactor(gf, &entries))
}

fn cofactor(gf: &Gf, m: &[Vec<Vec<Sym>>]) -> Vec<Sym> {
    let n = m.len();
    if n == 0 {
        return vec![1];
    }
    let mut acc = Vec::new();
    for j in 0..n {
        if m[0][j].is_empty() {
            continue;
        }
        let minor: Vec<Vec<Vec<Sym>>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, p)| p.clone()).collect())
            .collect();
        // characteristic 2: signs vanish
        acc = scalar::add(&acc, &scalar::mul(gf, &m[0][j], &cofactor(gf, &minor)));
    }
    acc
}

/// Test oracle: is the determinant a nonzero polynomial?
pub fn det_nonzero_oracle(gf: &Gf, f: &PolyMatrix) -> Result<bool, MatrixError> {
    Ok(!determinant(gf, f)?.is_empty())
}
