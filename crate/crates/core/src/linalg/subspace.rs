use std::fmt;

use num_bigint::BigUint;

use super::field::Field;
use super::matrix::{Mat, Vector};
use crate::error::{Error, Result};

/// A subspace of GF(p)^M kept as its reduced row-echelon basis.
///
/// The RREF basis of a subspace is unique, so structural equality and
/// hashing coincide with subspace equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: &Field, ambient: usize) -> Subspace {
        Subspace {
            field: field.clone(),
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &Field, ambient: usize) -> Subspace {
        let rows = (0..ambient)
            .map(|i| {
                let mut r = vec![0; ambient];
                r[i] = 1;
                r
            })
            .collect();
        Subspace {
            field: field.clone(),
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    /// Canonical basis of the span of `vectors`.
    pub fn span(field: &Field, ambient: usize, vectors: &[Vector]) -> Result<Subspace> {
        let mut s = Subspace::zero(field, ambient);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.rows.iter().map(|r| Vector::from_raw(&self.field, r.clone())).collect()
    }

    /// Basis rows stacked as a `dim x M` matrix.
    pub fn basis_matrix(&self) -> Mat {
        Mat::from_raw(&self.field, self.dim(), self.ambient, self.rows.concat())
    }

    /// Number of elements, `p^dim`.
    pub fn size(&self) -> BigUint {
        BigUint::from(self.field.p()).pow(self.dim() as u32)
    }

    fn check_vector(&self, v: &Vector) -> Result<()> {
        self.field.check(v.field())?;
        if v.len() != self.ambient {
            return Err(Error::dim(format!(
                "vector of length {} in ambient space of dimension {}",
                v.len(),
                self.ambient
            )));
        }
        Ok(())
    }

    /// Reduces `v` modulo the basis; the result is zero iff `v` lies in the span.
    fn reduce(&self, v: &mut [u32]) {
        let f = &self.field;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let a = v[c];
            if a == 0 {
                continue;
            }
            let neg = f.neg(a);
            for (x, &b) in v.iter_mut().zip(row).skip(c) {
                if b != 0 {
                    *x = f.mul_add(*x, neg, b);
                }
            }
        }
    }

    pub fn contains(&self, v: &Vector) -> Result<bool> {
        self.check_vector(v)?;
        Ok(self.contains_raw(v.entries()))
    }

    pub(crate) fn contains_raw(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span. Returns `true` if the dimension grew.
    pub fn insert(&mut self, v: &Vector) -> Result<bool> {
        self.check_vector(v)?;
        Ok(self.insert_raw(v.entries().to_vec()))
    }

    pub(crate) fn insert_raw(&mut self, mut v: Vec<u32>) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        self.reduce(&mut v);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = self.field.clone();
        let inv = f.inv(v[c]);
        for x in v.iter_mut().skip(c) {
            *x = f.mul(*x, inv);
        }
        for row in &mut self.rows {
            let a = row[c];
            if a == 0 {
                continue;
            }
            let neg = f.neg(a);
            for (x, &b) in row.iter_mut().zip(&v).skip(c) {
                if b != 0 {
                    *x = f.mul_add(*x, neg, b);
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, v);
        true
    }

    /// `self + other`
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.field.check(&other.field)?;
        if self.ambient != other.ambient {
            return Err(Error::dim(format!(
                "ambient dimensions {} and {}",
                self.ambient, other.ambient
            )));
        }
        let (mut big, small) = if self.dim() >= other.dim() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for r in &small.rows {
            big.insert_raw(r.clone());
        }
        Ok(big)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.field == other.field
            && self.ambient == other.ambient
            && self.rows.iter().all(|r| other.contains_raw(r))
    }

    /// Dimension of the affine slice `{w in self : w_j = prefix_j for j < i}`
    /// where `i = prefix.len()`, or `None` if the slice is empty.
    pub fn prefix_slice_dim(&self, prefix: &Vector) -> Result<Option<usize>> {
        self.field.check(prefix.field())?;
        let i = prefix.len();
        if i > self.ambient {
            return Err(Error::dim(format!(
                "prefix of length {i} exceeds ambient dimension {}",
                self.ambient
            )));
        }
        // w = c · B, so the constraint is B[:, ..i]ᵀ c = prefix.
        let mut data = Vec::with_capacity(i * self.dim());
        for j in 0..i {
            data.extend(self.rows.iter().map(|r| r[j]));
        }
        let system = Mat::from_raw(&self.field, i, self.dim(), data);
        Ok(system
            .solve_affine(prefix)?
            .map(|sol| sol.nullspace.dim()))
    }

    /// Number of elements of the prefix slice: `p^δ`, or 0 when empty.
    pub fn prefix_slice_size(&self, prefix: &Vector) -> Result<BigUint> {
        Ok(match self.prefix_slice_dim(prefix)? {
            Some(d) => BigUint::from(self.field.p()).pow(d as u32),
            None => BigUint::from(0u32),
        })
    }

    /// Enumerates every element of the subspace. Only sensible for tiny spans.
    pub fn elements(&self) -> Vec<Vector> {
        let p = self.field.p();
        let d = self.dim();
        let mut out = Vec::new();
        let mut coeffs = vec![0u32; d];
        loop {
            let mut v = vec![0u32; self.ambient];
            for (c, row) in coeffs.iter().zip(&self.rows) {
                if *c == 0 {
                    continue;
                }
                for (x, &b) in v.iter_mut().zip(row) {
                    *x = self.field.mul_add(*x, *c, b);
                }
            }
            out.push(Vector::from_raw(&self.field, v));
            let mut k = 0;
            loop {
                if k == d {
                    return out;
                }
                coeffs[k] += 1;
                if coeffs[k] < p {
                    break;
                }
                coeffs[k] = 0;
                k += 1;
            }
        }
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace<{}>(dim {} in {}: {:?})",
            self.field,
            self.dim(),
            self.ambient,
            self.rows
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn v(f: &Field, e: &[i64]) -> Vector {
        Vector::from_ints(f, e)
    }

    #[test]
    fn canonicalize_examples() {
        let f = gf(2);
        let s = Subspace::span(&f, 2, &[v(&f, &[1, 0]), v(&f, &[0, 1])]).unwrap();
        assert_eq!(s.basis(), &[vec![1, 0], vec![0, 1]]);

        let s = Subspace::span(&f, 2, &[v(&f, &[1, 1]), v(&f, &[1, 1])]).unwrap();
        assert_eq!(s.basis(), &[vec![1, 1]]);

        let s = Subspace::span(
            &f,
            3,
            &[v(&f, &[1, 1, 0]), v(&f, &[0, 1, 1]), v(&f, &[1, 0, 1])],
        )
        .unwrap();
        assert_eq!(s.basis(), &[vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(Subspace::span(&f, 3, &[]).unwrap(), Subspace::zero(&f, 3));
    }

    #[test]
    fn equal_spans_give_identical_bases() {
        let f = gf(3);
        let a = Subspace::span(&f, 3, &[v(&f, &[1, 2, 0]), v(&f, &[0, 1, 1])]).unwrap();
        let b = Subspace::span(&f, 3, &[v(&f, &[1, 0, 1]), v(&f, &[1, 1, 2])]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn contains_examples() {
        let f = gf(2);
        let s = Subspace::span(&f, 2, &[v(&f, &[1, 0])]).unwrap();
        assert!(s.contains(&v(&f, &[0, 0])).unwrap());
        assert!(!s.contains(&v(&f, &[0, 1])).unwrap());
        let s = Subspace::span(&f, 3, &[v(&f, &[1, 1, 0]), v(&f, &[0, 1, 1])]).unwrap();
        assert!(s.contains(&v(&f, &[1, 0, 1])).unwrap());
        assert!(s.contains(&v(&f, &[1, 0])).is_err());
    }

    #[test]
    fn prefix_slice_examples() {
        let f = gf(2);
        let s = Subspace::span(&f, 2, &[v(&f, &[1, 0])]).unwrap();
        assert_eq!(s.prefix_slice_dim(&v(&f, &[])).unwrap(), Some(1));
        assert_eq!(s.prefix_slice_dim(&v(&f, &[0])).unwrap(), Some(0));
        assert_eq!(s.prefix_slice_dim(&v(&f, &[1])).unwrap(), Some(0));
        assert_eq!(s.prefix_slice_dim(&v(&f, &[0, 1])).unwrap(), None);
        assert!(s.prefix_slice_dim(&v(&f, &[0, 0, 0])).is_err());
    }

    #[test]
    fn sum_and_inclusion() {
        let f = gf(2);
        let a = Subspace::span(&f, 3, &[v(&f, &[1, 0, 0])]).unwrap();
        let b = Subspace::span(&f, 3, &[v(&f, &[0, 1, 1])]).unwrap();
        let s = a.sum(&b).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(a.is_subspace_of(&s) && b.is_subspace_of(&s));
        assert!(!s.is_subspace_of(&a));
        assert_eq!(s.elements().len(), 4);
    }
}
