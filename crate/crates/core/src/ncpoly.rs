//! Noncommutative polynomials over GF(p).
//!
//! A polynomial is a finite map from words over `x_0..x_{n-1}` to nonzero
//! coefficients. Words are ordered by length first and lexicographically
//! within a length, which is also the serialization order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Field;

/// Default cap on the number of terms any single operation may materialize.
pub const DEFAULT_TERM_LIMIT: usize = 10_000_000;

/// A monomial in noncommuting variables; the empty word is the constant 1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>) -> Word {
        Word(letters)
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Splits into `(prefix, suffix)` with `prefix.len() == at`.
    pub fn split_at(&self, at: usize) -> (Word, Word) {
        let (a, b) = self.0.split_at(at);
        (Word(a.to_vec()), Word(b.to_vec()))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `n^len`, or a budget error on overflow.
pub fn num_words(n: usize, len: usize) -> Result<usize> {
    (0..len).try_fold(1usize, |acc, _| acc.checked_mul(n)).ok_or_else(|| {
        Error::budget(format!("{n}^{len} words do not fit in memory-addressable range"))
    })
}

/// Big-endian base-`n` index of a word among words of the same length.
pub fn word_index(w: &Word, n: usize) -> Result<usize> {
    let mut idx = 0usize;
    for &l in w.letters() {
        if l as usize >= n {
            return Err(Error::invalid(format!("letter x{l} out of range for {n} variables")));
        }
        idx = idx
            .checked_mul(n)
            .and_then(|v| v.checked_add(l as usize))
            .ok_or_else(|| Error::budget("word index overflow"))?;
    }
    Ok(idx)
}

/// Inverse of [`word_index`] for words of length `len`.
pub fn index_word(mut i: usize, len: usize, n: usize) -> Result<Word> {
    let total = num_words(n, len)?;
    if i >= total {
        return Err(Error::invalid(format!("index {i} out of range for {n}^{len} words")));
    }
    let mut letters = vec![0u32; len];
    for slot in letters.iter_mut().rev() {
        *slot = (i % n) as u32;
        i /= n;
    }
    Ok(Word(letters))
}

/// An element of GF(p)⟨x_0, …, x_{n-1}⟩.
#[derive(Clone, PartialEq, Eq)]
pub struct NCPoly {
    field: Field,
    n: usize,
    terms: BTreeMap<Word, u32>,
}

impl NCPoly {
    pub fn zero(field: &Field, n: usize) -> NCPoly {
        NCPoly {
            field: field.clone(),
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: &Field, n: usize) -> NCPoly {
        NCPoly::constant(field, n, 1)
    }

    pub fn constant(field: &Field, n: usize, c: u32) -> NCPoly {
        let mut p = NCPoly::zero(field, n);
        if !c.is_multiple_of(field.p()) {
            p.terms.insert(Word::empty(), c % field.p());
        }
        p
    }

    pub fn var(field: &Field, n: usize, i: u32) -> Result<NCPoly> {
        NCPoly::monomial(field, n, Word::new(vec![i]), 1)
    }

    pub fn monomial(field: &Field, n: usize, w: Word, c: u32) -> Result<NCPoly> {
        NCPoly::from_terms(field, n, [(w, c)])
    }

    /// Sums the given terms; repeated words accumulate.
    pub fn from_terms(
        field: &Field,
        n: usize,
        terms: impl IntoIterator<Item = (Word, u32)>,
    ) -> Result<NCPoly> {
        let mut p = NCPoly::zero(field, n);
        for (w, c) in terms {
            field.check_elem(c)?;
            if let Some(&l) = w.letters().iter().find(|&&l| l as usize >= n) {
                return Err(Error::invalid(format!("letter x{l} out of range for {n} variables")));
            }
            p.add_term(w, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, w: Word, c: u32) {
        if c == 0 {
            return;
        }
        let f = &self.field;
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = f.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, u32)> + '_ {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum word length in the support; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::len)
    }

    /// Minimum word length in the support; `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(Word::len)
    }

    /// Degree, treating the zero polynomial as an error.
    pub fn require_degree(&self) -> Result<usize> {
        self.degree()
            .ok_or_else(|| Error::pre("the zero polynomial has no degree"))
    }

    /// Nonzero and all terms of one length.
    pub fn is_homogeneous(&self) -> bool {
        !self.is_zero() && self.degree() == self.min_degree()
    }

    /// Every term has length `d` (the zero polynomial qualifies for every `d`).
    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|w| w.len() == d)
    }

    pub fn coefficient(&self, w: &Word) -> u32 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn homogeneous_part(&self, i: usize) -> NCPoly {
        NCPoly {
            field: self.field.clone(),
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == i)
                .map(|(w, &c)| (w.clone(), c))
                .collect(),
        }
    }

    fn check_compatible(&self, other: &NCPoly) -> Result<()> {
        self.field.check(&other.field)?;
        if self.n != other.n {
            return Err(Error::invalid(format!(
                "variable count mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check_compatible(other)?;
        let mut r = self.clone();
        for (w, &c) in &other.terms {
            r.add_term(w.clone(), c);
        }
        Ok(r)
    }

    pub fn sub(&self, other: &NCPoly) -> Result<NCPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCPoly {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, c: u32) -> NCPoly {
        let c = c % self.field.p();
        if c == 0 {
            return NCPoly::zero(&self.field, self.n);
        }
        NCPoly {
            field: self.field.clone(),
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(w, &a)| (w.clone(), self.field.mul(a, c)))
                .collect(),
        }
    }

    /// Noncommutative product under the default term limit.
    pub fn mul(&self, other: &NCPoly) -> Result<NCPoly> {
        self.mul_limited(other, DEFAULT_TERM_LIMIT)
    }

    /// Product: the coefficient of `w` is `Σ_{w = u·v} self(u)·other(v)`.
    pub fn mul_limited(&self, other: &NCPoly, max_terms: usize) -> Result<NCPoly> {
        self.check_compatible(other)?;
        let mut r = NCPoly::zero(&self.field, self.n);
        for (u, &a) in &self.terms {
            for (v, &b) in &other.terms {
                r.add_term(u.concat(v), self.field.mul(a, b));
                if r.terms.len() > max_terms {
                    return Err(Error::budget(format!(
                        "polynomial product exceeds {max_terms} terms"
                    )));
                }
            }
        }
        Ok(r)
    }

    /// Dense coefficient vector over all words of length `len`, indexed by
    /// [`word_index`]. Terms of other lengths are ignored.
    pub fn coefficient_vector(&self, len: usize) -> Result<Vec<u32>> {
        let mut v = vec![0u32; num_words(self.n, len)?];
        for (w, &c) in self.terms.iter().filter(|(w, _)| w.len() == len) {
            v[word_index(w, self.n)?] = c;
        }
        Ok(v)
    }
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn w(l: &[u32]) -> Word {
        Word::new(l.to_vec())
    }

    fn poly(f: &Field, n: usize, terms: &[(&[u32], u32)]) -> NCPoly {
        NCPoly::from_terms(f, n, terms.iter().map(|(l, c)| (w(l), *c))).unwrap()
    }

    #[test]
    fn word_index_examples() {
        let expect = [(&[0u32, 0][..], 0), (&[0, 1], 1), (&[1, 0], 2), (&[1, 1], 3)];
        for (l, i) in expect {
            assert_eq!(word_index(&w(l), 2).unwrap(), i);
            assert_eq!(index_word(i, 2, 2).unwrap(), w(l));
        }
        assert_eq!(word_index(&Word::empty(), 5).unwrap(), 0);
        assert_eq!(word_index(&w(&[2, 0, 1]), 3).unwrap(), 19);
        assert!(word_index(&w(&[2]), 2).is_err());
        assert!(index_word(4, 2, 2).is_err());
    }

    #[test]
    fn multiplication_is_noncommutative() {
        let f = gf(2);
        let x0 = NCPoly::var(&f, 2, 0).unwrap();
        let x1 = NCPoly::var(&f, 2, 1).unwrap();
        let a = x0.mul(&x1).unwrap();
        let b = x1.mul(&x0).unwrap();
        assert_eq!(a, poly(&f, 2, &[(&[0, 1], 1)]));
        assert_ne!(a, b);
        assert_eq!(a.mul(&NCPoly::one(&f, 2)).unwrap(), a);
    }

    #[test]
    fn square_of_sum_has_four_terms() {
        let f = gf(2);
        let s = poly(&f, 2, &[(&[0], 1), (&[1], 1)]);
        let sq = s.mul(&s).unwrap();
        assert_eq!(
            sq,
            poly(&f, 2, &[(&[0, 0], 1), (&[0, 1], 1), (&[1, 0], 1), (&[1, 1], 1)])
        );
    }

    #[test]
    fn homogeneous_parts_partition_support() {
        let f = gf(3);
        let g = poly(&f, 2, &[(&[], 1), (&[0], 1), (&[1, 0], 1)]);
        assert_eq!(g.homogeneous_part(0), NCPoly::one(&f, 2));
        assert_eq!(g.homogeneous_part(1), poly(&f, 2, &[(&[0], 1)]));
        assert_eq!(g.homogeneous_part(2), poly(&f, 2, &[(&[1, 0], 1)]));
        assert!(g.homogeneous_part(7).is_zero());
        let h = poly(&f, 2, &[(&[0, 1], 1), (&[0], 1)]);
        assert_eq!(h.homogeneous_part(2), poly(&f, 2, &[(&[0, 1], 1)]));
    }

    #[test]
    fn coefficients() {
        let f = gf(3);
        let g = poly(&f, 2, &[(&[0, 1], 1)]);
        assert_eq!(g.coefficient(&w(&[0, 1])), 1);
        assert_eq!(g.coefficient(&w(&[1, 0])), 0);
        let h = poly(&f, 2, &[(&[0], 2), (&[1], 1)]);
        assert_eq!(h.coefficient(&w(&[0])), 2);
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let f = gf(2);
        let z = NCPoly::zero(&f, 2);
        assert_eq!(z.degree(), None);
        assert!(z.require_degree().is_err());
        assert!(!z.is_homogeneous());
        assert!(z.is_homogeneous_of(3));
    }

    #[test]
    fn cancellation_removes_terms() {
        let f = gf(2);
        let a = poly(&f, 1, &[(&[0], 1)]);
        assert!(a.add(&a).unwrap().is_zero());
    }

    #[test]
    fn term_limit_trips() {
        let f = gf(2);
        let s = poly(&f, 3, &[(&[0], 1), (&[1], 1), (&[2], 1)]);
        let sq = s.mul(&s).unwrap();
        let err = sq.mul_limited(&sq, 20).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let f = gf(2);
        assert!(NCPoly::one(&f, 2).mul(&NCPoly::one(&f, 3)).is_err());
        assert!(NCPoly::one(&f, 2).add(&NCPoly::one(&gf(3), 2)).is_err());
    }
}
