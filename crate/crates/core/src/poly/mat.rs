//! Dense constant matrices over GF(2^k) and Gaussian elimination.

use std::fmt;

use crate::error::MatrixError;
use crate::gf::{Gf, Sym};

/// Row-major dense matrix of field symbols.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Sym>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Sym>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[&[Sym]]) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(MatrixError::Dimension(format!(
                    "column {j} has {} entries, expected {rows}",
                    col.len()
                )));
            }
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Sym {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Sym) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Sym] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Sym> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    pub fn mul(&self, gf: &Gf, rhs: &Mat) -> Result<Mat, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a != 0 {
                    let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                    gf.axpy(dst, a, rhs.row(l));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, gf: &Gf, v: &[Sym]) -> Result<Vec<Sym>, MatrixError> {
        if v.len() != self.rows {
            return Err(MatrixError::Dimension(format!(
                "vector of length {} times {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = vec![0; self.cols];
        for (i, &a) in v.iter().enumerate() {
            gf.axpy(&mut out, a, self.row(i));
        }
        Ok(out)
    }

    fn row_mut(&mut self, i: usize) -> &mut [Sym] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// `row[dst] += c * row[src]`
    fn add_scaled_row(&mut self, gf: &Gf, dst: usize, c: Sym, src: usize) {
        debug_assert_ne!(dst, src);
        let cols = self.cols;
        let (lo, hi) = self.data.split_at_mut(dst.max(src) * cols);
        let (d, s) = if dst < src {
            (&mut lo[dst * cols..(dst + 1) * cols], &hi[..cols])
        } else {
            (&mut hi[..cols], &lo[src * cols..(src + 1) * cols])
        };
        gf.axpy(d, c, s);
    }

    /// Reduces to reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self, gf: &Gf) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = gf.inv(self.get(r, c)).expect("pivot is nonzero");
            gf.scale(self.row_mut(r), inv);
            for i in 0..self.rows {
                let f = self.get(i, c);
                if i != r && f != 0 {
                    self.add_scaled_row(gf, i, f, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Rank over GF(q).
pub fn rank_gf(gf: &Gf, mat: &Mat) -> usize {
    let mut work = mat.clone();
    work.rref(gf).len()
}

/// Finds one `X` with `A X = B`, or reports that none exists.
/// Free variables are set to zero.
pub fn solve_right(gf: &Gf, a: &Mat, b: &Mat) -> Result<Mat, MatrixError> {
    if a.rows != b.rows {
        return Err(MatrixError::Dimension(format!(
            "A has {} rows, B has {}",
            a.rows, b.rows
        )));
    }
    let n = a.cols;
    let mut aug = Mat::zeros(a.rows, n + b.cols);
    for i in 0..a.rows {
        aug.row_mut(i)[..n].copy_from_slice(a.row(i));
        aug.row_mut(i)[n..].copy_from_slice(b.row(i));
    }
    let pivots = aug.rref(gf);
    if pivots.iter().any(|&c| c >= n) {
        return Err(MatrixError::NoSolution);
    }
    let mut x = Mat::zeros(n, b.cols);
    for (r, &c) in pivots.iter().enumerate() {
        x.row_mut(c).copy_from_slice(&aug.row(r)[n..]);
    }
    Ok(x)
}

/// Incrementally maintained basis of a column space.
///
/// Vectors may grow in length between insertions; entries past a stored
/// vector's end are zero.
#[derive(Clone, Debug, Default)]
pub struct ColumnBasis {
    basis: Vec<(usize, Vec<Sym>)>,
}

impl ColumnBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Reduces `v` against the basis; keeps it if independent.
    pub fn insert(&mut self, gf: &Gf, mut v: Vec<Sym>) -> bool {
        for (p, b) in &self.basis {
            if let Some(&c) = v.get(*p) {
                if c != 0 {
                    let len = b.len().min(v.len());
                    gf.axpy(&mut v[..len], c, &b[..len]);
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            Some(p) => {
                let inv = gf.inv(v[p]).expect("nonzero pivot");
                gf.scale(&mut v, inv);
                while v.last() == Some(&0) {
                    v.pop();
                }
                self.basis.push((p, v));
                true
            }
            None => false,
        }
    }
}
