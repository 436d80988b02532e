use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest modulus accepted (exclusive).
pub const MAX_MODULUS: u64 = 1 << 16;

/// The prime field GF(p), elements stored as least nonnegative residues.
///
/// Inverses are computed once per field by extended Euclid and shared between
/// clones, so passing a `Field` around by value is cheap.
#[derive(Clone)]
pub struct Field {
    p: u32,
    inverses: Arc<[u32]>,
}

impl Field {
    pub fn new(p: u64) -> Result<Field> {
        if p >= MAX_MODULUS {
            return Err(Error::FieldOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p = p as u32;
        let inverses: Vec<u32> = (0..p)
            .map(|a| if a == 0 { 0 } else { ext_euclid_inverse(a, p) })
            .collect();
        Ok(Field {
            p,
            inverses: inverses.into(),
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn elem(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0 && a < self.p, "no inverse for {a} in GF({})", self.p);
        self.inverses[a as usize]
    }

    /// `a + b * c`
    #[inline]
    pub fn mul_add(&self, a: u32, b: u32, c: u32) -> u32 {
        ((a as u64 + b as u64 * c as u64) % self.p as u64) as u32
    }

    pub fn check(&self, other: &Field) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.p, other.p))
        }
    }

    pub fn check_elem(&self, v: u32) -> Result<()> {
        if v < self.p {
            Ok(())
        } else {
            Err(Error::invalid(format!("{v} is not a residue mod {}", self.p)))
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn ext_euclid_inverse(a: u32, p: u32) -> u32 {
    let (mut old_r, mut r) = (a as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i64) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_large() {
        assert_eq!(Field::new(4).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(1).unwrap_err(), Error::NotPrime(1));
        assert!(matches!(Field::new(65537), Err(Error::FieldOutOfRange(_))));
        assert_eq!(Field::new(4).unwrap_err().to_string(), "4 is not prime");
    }

    #[test]
    fn inverses_are_inverses() {
        for p in [2u64, 3, 5, 7, 65521] {
            let f = Field::new(p).unwrap();
            let step = (p / 97).max(1) as u32;
            for a in (1..p as u32).step_by(step as usize) {
                assert_eq!(f.mul(a, f.inv(a)), 1, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn arithmetic_wraps() {
        let f = Field::new(7).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.neg(3), 4);
        assert_eq!(f.elem(-1), 6);
        assert_eq!(f.mul_add(1, 3, 5), 2);
    }
}
