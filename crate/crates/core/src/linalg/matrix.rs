use std::fmt;

use super::field::Field;
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// A vector over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    field: Field,
    entries: Vec<u32>,
}

impl Vector {
    pub fn new(field: &Field, entries: Vec<u32>) -> Result<Vector> {
        for &e in &entries {
            field.check_elem(e)?;
        }
        Ok(Vector {
            field: field.clone(),
            entries,
        })
    }

    /// Builds a vector from arbitrary integers, reducing each mod p.
    pub fn from_ints(field: &Field, entries: &[i64]) -> Vector {
        Vector {
            field: field.clone(),
            entries: entries.iter().map(|&e| field.elem(e)).collect(),
        }
    }

    pub(crate) fn from_raw(field: &Field, entries: Vec<u32>) -> Vector {
        debug_assert!(entries.iter().all(|&e| e < field.p()));
        Vector {
            field: field.clone(),
            entries,
        }
    }

    pub fn zeros(field: &Field, len: usize) -> Vector {
        Vector::from_raw(field, vec![0; len])
    }

    pub fn unit(field: &Field, len: usize, i: usize) -> Vector {
        let mut v = vec![0; len];
        v[i] = 1;
        Vector::from_raw(field, v)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries)
    }
}

/// Reduced row-echelon form together with rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Solution set `particular + span(nullspace)` of a consistent system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vector,
    pub nullspace: Subspace,
}

/// Dense row-major matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Mat {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Mat> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for &e in &data {
            field.check_elem(e)?;
        }
        Ok(Mat {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub(crate) fn from_raw(field: &Field, rows: usize, cols: usize, data: Vec<u32>) -> Mat {
        debug_assert_eq!(data.len(), rows * cols);
        Mat {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from rows of arbitrary integers (reduced mod p).
    /// Panics if the rows are ragged.
    pub fn from_rows(field: &Field, rows: &[Vec<i64>]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&e| field.elem(e)));
        }
        Mat::from_raw(field, rows.len(), cols, data)
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Mat {
        Mat::from_raw(field, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// `u · vᵀ`
    pub fn outer(u: &Vector, v: &Vector) -> Result<Mat> {
        u.field().check(v.field())?;
        let f = u.field();
        let mut data = Vec::with_capacity(u.len() * v.len());
        for &a in u.entries() {
            data.extend(v.entries().iter().map(|&b| f.mul(a, b)));
        }
        Ok(Mat::from_raw(f, u.len(), v.len(), data))
    }

    /// Reshapes a row-major flattening back into a `rows x cols` matrix.
    pub fn from_flat(v: &Vector, rows: usize, cols: usize) -> Result<Mat> {
        Mat::new(v.field(), rows, cols, v.entries().to_vec())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        debug_assert!(v < self.field.p());
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_raw(&self.field, (0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn flatten(&self) -> Vector {
        Vector::from_raw(&self.field, self.data.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Mat::from_raw(&self.field, self.cols, self.rows, data)
    }

    fn check_same_shape(&self, other: &Mat) -> Result<()> {
        self.field.check(&other.field)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Mat::from_raw(f, self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(Mat::from_raw(f, self.rows, self.cols, data))
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: u32, other: &Mat) -> Result<()> {
        self.check_same_shape(other)?;
        if c == 0 {
            return Ok(());
        }
        let f = self.field.clone();
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.mul_add(*a, c, b);
        }
        Ok(())
    }

    pub fn scale(&self, c: u32) -> Mat {
        let f = &self.field;
        Mat::from_raw(f, self.rows, self.cols, self.data.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        self.field.check(&other.field)?;
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let p = f.p() as u64;
        let mut data = vec![0u32; self.rows * other.cols];
        for i in 0..self.rows {
            let mut acc = vec![0u64; other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for (j, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + a * other.get(k, j) as u64) % p;
                }
            }
            for (j, v) in acc.into_iter().enumerate() {
                data[i * other.cols + j] = v as u32;
            }
        }
        Ok(Mat::from_raw(f, self.rows, other.cols, data))
    }

    /// Columns `cols` of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            data.extend(cols.iter().map(|&j| self.get(i, j)));
        }
        Mat::from_raw(&self.field, self.rows, cols.len(), data)
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        Rref {
            rank: pivots.len(),
            reduced: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place(self.cols).len()
    }

    /// Gauss-Jordan elimination restricted to pivot candidates in
    /// `0..pivot_limit`. Returns the pivot columns.
    pub(crate) fn rref_in_place(&mut self, pivot_limit: usize) -> Vec<usize> {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_limit.min(cols) {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]);
            if inv != 1 {
                for j in c..cols {
                    self.data[r * cols + j] = f.mul(self.data[r * cols + j], inv);
                }
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for j in c..cols {
                    let v = self.data[r * cols + j];
                    if v != 0 {
                        self.data[i * cols + j] = f.mul_add(self.data[i * cols + j], neg, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Solves `self · x = b`. Returns `None` when the system is inconsistent.
    pub fn solve_affine(&self, b: &Vector) -> Result<Option<AffineSolution>> {
        self.field.check(b.field())?;
        if b.len() != self.rows {
            return Err(Error::dim(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let n = self.cols;
        let mut aug = Vec::with_capacity(self.rows * (n + 1));
        for i in 0..self.rows {
            aug.extend_from_slice(self.row(i));
            aug.push(b.entries()[i]);
        }
        let mut aug = Mat::from_raw(&self.field, self.rows, n + 1, aug);
        let pivots = aug.rref_in_place(n + 1);
        if pivots.last() == Some(&n) {
            return Ok(None);
        }
        let f = &self.field;
        let mut particular = vec![0u32; n];
        for (r, &c) in pivots.iter().enumerate() {
            particular[c] = aug.get(r, n);
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut kernel = Vec::new();
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; n];
            v[free] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(aug.get(r, free));
            }
            kernel.push(Vector::from_raw(f, v));
        }
        Ok(Some(AffineSolution {
            particular: Vector::from_raw(f, particular),
            nullspace: Subspace::span(f, n, &kernel)?,
        }))
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat<{}>[", self.field)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}
