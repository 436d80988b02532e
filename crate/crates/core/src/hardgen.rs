//! Explicit hard polynomials for ABPs with help polynomials.
//!
//! For a help set `H` and an even degree `d`, every cut matrix `M_{d/2}` of a
//! small homogeneous program over `H` lies at small rank distance from the
//! span of an obstruction set `𝒜` built from the helps alone. A remote point
//! `M_0` for that span therefore defines a polynomial `f` with
//! `M_{d/2}(f) = M_0` that no small program computes. [`generate_hard`] does
//! this and emits a [`Certificate`] that can be checked without regenerating
//! anything.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use sha2::{Digest, Sha256};

use crate::cutmatrix::{cross_product, cut_matrix_of_degree, elementary, side, CutMatrix};
use crate::error::{Error, Result};
use crate::format::write_helps;
use crate::linalg::{Field, Mat};
use crate::ncpoly::{index_word, NCPoly};
use crate::rmp::{
    min_span_distance, solve_improved, solve_simple, DistanceMode, ImprovedParams, RemoteInstance,
};

/// Largest number of matrix entries the obstruction set may hold before
/// deduplication.
pub const OBSTRUCTION_ENTRY_LIMIT: usize = 1 << 27;

/// A nonempty list of nonzero help polynomials over a common field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelpSet {
    field: Field,
    n: usize,
    polys: Vec<NCPoly>,
}

impl HelpSet {
    pub fn new(field: &Field, n: usize, polys: Vec<NCPoly>) -> Result<HelpSet> {
        if polys.is_empty() {
            return Err(Error::invalid("a help set needs at least one polynomial"));
        }
        for (j, h) in polys.iter().enumerate() {
            field.check(h.field())?;
            if h.n() != n {
                return Err(Error::invalid(format!("help h{j} has {} variables, expected {n}", h.n())));
            }
            if h.is_zero() {
                return Err(Error::invalid(format!("help h{j} is the zero polynomial")));
            }
        }
        Ok(HelpSet {
            field: field.clone(),
            n,
            polys,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polys(&self) -> &[NCPoly] {
        &self.polys
    }

    /// `m`
    pub fn m(&self) -> usize {
        self.polys.len()
    }

    /// `d(H)`, the largest degree.
    pub fn max_degree(&self) -> usize {
        self.polys.iter().filter_map(NCPoly::degree).max().unwrap_or(0)
    }

    /// `δ(H)`, the smallest degree.
    pub fn min_degree(&self) -> usize {
        self.polys.iter().filter_map(NCPoly::degree).min().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.polys.iter().all(NCPoly::is_homogeneous)
    }

    /// `H_{≤d}`
    pub fn restricted(&self, d: usize) -> Vec<NCPoly> {
        self.polys
            .iter()
            .filter(|h| h.degree().is_some_and(|e| e <= d))
            .cloned()
            .collect()
    }

    /// `H̃`: every nonzero part `h^{(i)}` with `i >= 2`, by help then degree.
    pub fn homogeneous_parts(&self) -> Vec<NCPoly> {
        crate::abp::split_helps(&self.polys)
            .into_iter()
            .map(|(_, _, h)| h)
            .collect()
    }

    /// SHA-256 of the canonical help-set file, in lowercase hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(write_helps(&self.field, self.n, &self.polys).as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The deduplicated obstruction set and how many matrices were built
/// before duplicates were dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionSet {
    pub matrices: Vec<Mat>,
    pub raw_count: usize,
}

/// `𝒜` for a homogeneous help set, restricted to helps of degree at most `d`.
///
/// For each help `h` of degree `e <= d`, each `i` from `max(1, e - d/2)` to
/// `min(d/2, e - 1)`, and each elementary matrix `E^{p,q}` of shape
/// `(d/2 - i, d/2 - e + i)`, the matrix `M_i(h) ⊗_{i, e-i}^{d/2} E^{p,q}` is
/// included. Duplicates are removed keeping first occurrences.
pub fn build_obstruction_set(h: &HelpSet, d: usize) -> Result<ObstructionSet> {
    if !h.is_homogeneous() {
        return Err(Error::pre(
            "obstruction sets need homogeneous helps; split them with homogeneous_parts first",
        ));
    }
    obstruction_over(&h.field, h.n, &h.restricted(d), d)
}

fn obstruction_over(field: &Field, n: usize, helps: &[NCPoly], d: usize) -> Result<ObstructionSet> {
    if d < 2 || d % 2 == 1 {
        return Err(Error::invalid(format!("degree must be even and at least 2, got {d}")));
    }
    let half = d / 2;
    let big_n = side(n, half)?;
    let mut raw_count = 0usize;
    for h in helps {
        let e = h.require_degree()?;
        let lo = 1.max(e.saturating_sub(half));
        let hi = half.min(e.saturating_sub(1));
        if lo <= hi {
            raw_count = raw_count.saturating_add((hi - lo + 1).saturating_mul(side(n, d - e)?));
        }
    }
    if raw_count.saturating_mul(big_n * big_n) > OBSTRUCTION_ENTRY_LIMIT {
        return Err(Error::budget(format!(
            "{raw_count} obstruction matrices of side {big_n} exceed the entry limit {OBSTRUCTION_ENTRY_LIMIT}"
        )));
    }

    let mut seen = HashSet::new();
    let mut matrices = Vec::new();
    for h in helps {
        let e = h.require_degree()?;
        let lo = 1.max(e.saturating_sub(half));
        let hi = half.min(e.saturating_sub(1));
        for i in lo..=hi {
            let mi = cut_matrix_of_degree(h, e, i)?;
            let (a, b) = (half - i, half + i - e);
            for p in 0..side(n, a)? {
                for q in 0..side(n, b)? {
                    let ep = elementary(field, n, a, b, p, q)?;
                    let m = cross_product(&mi, &ep, i, e - i, half, d)?.base;
                    if seen.insert(m.clone()) {
                        matrices.push(m);
                    }
                }
            }
        }
    }
    Ok(ObstructionSet { matrices, raw_count })
}

/// How the help set was prepared before the obstruction set was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preprocess {
    None,
    HomogeneousParts,
}

impl fmt::Display for Preprocess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preprocess::None => "none",
            Preprocess::HomogeneousParts => "homogeneous-parts",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Simple,
    Improved(ImprovedParams),
}

/// A self-contained claim that `remote` is at rank distance at least
/// `claimed_r` from the span of `obstruction`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub field: Field,
    pub n: usize,
    pub degree: usize,
    pub claimed_r: usize,
    pub solver: String,
    pub helps_hash: String,
    pub preprocess: Preprocess,
    /// An independent spanning set of the obstruction set.
    pub obstruction: Vec<Mat>,
    pub remote: Mat,
}

impl Certificate {
    /// `N = n^{d/2}`
    pub fn side(&self) -> Result<usize> {
        side(self.n, self.degree / 2)
    }

    /// `k`
    pub fn k(&self) -> usize {
        self.obstruction.len()
    }

    fn check_shape(&self) -> Result<usize> {
        if self.degree < 2 || self.degree % 2 == 1 {
            return Err(Error::invalid(format!("certificate degree {} is not even and positive", self.degree)));
        }
        if self.claimed_r == 0 {
            return Err(Error::invalid("certificate claims r = 0"));
        }
        let big_n = self.side()?;
        for m in self.obstruction.iter().chain(std::iter::once(&self.remote)) {
            self.field.check(m.field())?;
            if m.rows() != big_n || m.cols() != big_n {
                return Err(Error::dim(format!(
                    "certificate matrix is {}x{}, expected {big_n}x{big_n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(big_n)
    }

    /// True when `hash` names the help set this certificate was built from.
    pub fn matches_helps(&self, helps: &HelpSet) -> bool {
        self.helps_hash == helps.hash()
    }
}

/// A generated polynomial with its certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardPolynomial {
    pub f: NCPoly,
    pub certificate: Certificate,
    /// Size of the obstruction set before deduplication.
    pub raw_count: usize,
    /// Size after deduplication, before reduction to a basis.
    pub distinct: usize,
}

/// The polynomial `f` of degree `2 * half` with `M_{half}(f) = m`.
pub fn polynomial_from_matrix(m: &Mat, n: usize, half: usize) -> Result<NCPoly> {
    let big_n = side(n, half)?;
    if m.rows() != big_n || m.cols() != big_n {
        return Err(Error::dim(format!("expected a {big_n}x{big_n} matrix")));
    }
    let mut terms = Vec::new();
    for i in 0..big_n {
        let m1 = index_word(i, half, n)?;
        for j in 0..big_n {
            let c = m.get(i, j);
            if c != 0 {
                terms.push((m1.concat(&index_word(j, half, n)?), c));
            }
        }
    }
    NCPoly::from_terms(m.field(), n, terms)
}

/// A homogeneous degree-`d` polynomial that no homogeneous program over the
/// helps with fewer than `claimed_r` vertices computes.
///
/// Inhomogeneous help sets are replaced by their homogeneous parts first.
pub fn generate_hard(h: &HelpSet, d: usize, solver: Solver) -> Result<HardPolynomial> {
    if d % 2 == 1 {
        return Err(Error::invalid(format!("degree must be even, got {d}")));
    }
    let (preprocess, effective) = if h.is_homogeneous() {
        (Preprocess::None, h.restricted(d))
    } else {
        let parts: Vec<NCPoly> = h
            .homogeneous_parts()
            .into_iter()
            .filter(|p| p.degree().is_some_and(|e| e <= d))
            .collect();
        (Preprocess::HomogeneousParts, parts)
    };
    let obs = obstruction_over(&h.field, h.n, &effective, d)?;
    let big_n = side(h.n, d / 2)?;
    let inst = RemoteInstance::new(&h.field, big_n, &obs.matrices)?;
    let (remote, claimed_r, solver_name) = match solver {
        Solver::Simple => {
            let s = solve_simple(&inst)?;
            (s.point, s.guaranteed, "simple".to_string())
        }
        Solver::Improved(params) => {
            let s = solve_improved(&inst, params)?;
            let name = format!(
                "improved ell={} r={} c0={} c={} {}",
                params.ell, params.r, params.c0, params.c, s.construction
            );
            (s.point, s.guaranteed, name)
        }
    };
    let f = polynomial_from_matrix(&remote, h.n, d / 2)?;
    let certificate = Certificate {
        field: h.field.clone(),
        n: h.n,
        degree: d,
        claimed_r,
        solver: solver_name,
        helps_hash: h.hash(),
        preprocess,
        obstruction: inst.basis().to_vec(),
        remote,
    };
    Ok(HardPolynomial {
        f,
        certificate,
        raw_count: obs.raw_count,
        distinct: obs.matrices.len(),
    })
}

/// Outcome of checking a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub holds: bool,
    /// Smallest distance seen; exact when `exact` is set, otherwise an upper
    /// bound on the true minimum.
    pub distance: usize,
    pub exact: bool,
}

/// Checks `min_{Q in span(𝒜)} rank(M_0 - Q) >= claimed_r`.
///
/// Sampled mode can only refute a certificate, never prove it.
pub fn verify_certificate(cert: &Certificate, mode: DistanceMode) -> Result<Verification> {
    let big_n = cert.check_shape()?;
    let inst = RemoteInstance::new(&cert.field, big_n, &cert.obstruction)?;
    let sd = min_span_distance(&cert.remote, &inst, mode)?;
    Ok(Verification {
        holds: sd.distance >= cert.claimed_r,
        distance: sd.distance,
        exact: sd.exact,
    })
}

/// Recomputes `M_{d/2}(f)` and compares it with the certificate's remote point.
pub fn polynomial_matches(f: &NCPoly, cert: &Certificate) -> Result<bool> {
    let m: CutMatrix = cut_matrix_of_degree(f, cert.degree, cert.degree / 2)?;
    Ok(m.base == cert.remote)
}

// ------------------------------------------------------------------ bounds

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundVariant {
    /// `n^{εd/4} / sqrt(2md)`
    LowDeg,
    /// `floor(n^{εd/2} / (2md))`
    HighDeg,
    /// `n^{εd/4} / (sqrt(2m) d(d+1))`
    GenLow,
    /// `floor(n^{εd/2} / (2md^2)) / (d+1)`
    GenHigh,
}

impl BoundVariant {
    pub const ALL: [BoundVariant; 4] = [
        BoundVariant::LowDeg,
        BoundVariant::HighDeg,
        BoundVariant::GenLow,
        BoundVariant::GenHigh,
    ];
}

impl fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundVariant::LowDeg => "low",
            BoundVariant::HighDeg => "high",
            BoundVariant::GenLow => "gen-low",
            BoundVariant::GenHigh => "gen-high",
        })
    }
}

/// The nonnegative real `radicand^(1/index)`, held exactly.
#[derive(Clone, Debug)]
pub struct ExactValue {
    pub radicand: BigRational,
    pub index: u32,
}

impl ExactValue {
    pub fn rational(r: BigRational) -> ExactValue {
        ExactValue { radicand: r, index: 1 }
    }

    /// The value when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.index == 1 {
            return Some(self.radicand.clone());
        }
        let k = self.index;
        let num = self.radicand.numer().to_biguint()?;
        let den = self.radicand.denom().to_biguint()?;
        let (a, b) = (num.nth_root(k), den.nth_root(k));
        (a.pow(k) == num && b.pow(k) == den).then(|| BigRational::new(a.into(), b.into()))
    }

    pub fn floor(&self) -> BigUint {
        let num = self.radicand.numer().to_biguint().unwrap_or_default();
        let den = self.radicand.denom().to_biguint().unwrap_or_else(BigUint::one);
        (num / den).nth_root(self.index)
    }

    pub fn to_f64(&self) -> f64 {
        fn ln(x: &num_bigint::BigInt) -> f64 {
            let bits = x.bits();
            if bits < 1000 {
                return x.to_f64().unwrap_or(0.0).ln();
            }
            let shift = bits - 64;
            (x >> shift).to_f64().unwrap_or(0.0).ln() + shift as f64 * std::f64::consts::LN_2
        }
        if self.radicand.is_zero() {
            return 0.0;
        }
        ((ln(self.radicand.numer()) - ln(self.radicand.denom())) / f64::from(self.index)).exp()
    }
}

impl PartialEq for ExactValue {
    /// `x^(1/i) = y^(1/j)` exactly when `x^j = y^i`.
    fn eq(&self, other: &Self) -> bool {
        let lhs = num_traits::pow(self.radicand.clone(), other.index as usize);
        let rhs = num_traits::pow(other.radicand.clone(), self.index as usize);
        lhs == rhs
    }
}

impl Eq for ExactValue {}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "({})^(1/{}) ~ {:.6}", self.radicand, self.index, self.to_f64()),
        }
    }
}

/// A lower-bound value, with the hypothesis under which it holds checked
/// against a help set when one is given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub variant: BoundVariant,
    pub n: u64,
    pub m: u64,
    pub d: u64,
    pub eps: Ratio<u64>,
    pub value: ExactValue,
    pub hypothesis: String,
    pub applicable: Option<bool>,
}

/// Largest total bit length tolerated for intermediate powers.
const BOUND_BIT_LIMIT: u64 = 1 << 20;

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn checked_pow(base: u64, exp: u64) -> Result<BigUint> {
    let bits = 64 - base.leading_zeros() as u64;
    if bits.saturating_mul(exp) > BOUND_BIT_LIMIT {
        return Err(Error::budget(format!("{base}^{exp} is too large to evaluate exactly")));
    }
    Ok(big(base).pow(exp as u32))
}

/// Largest `z` with `z^b <= x`.
fn floor_root(x: &BigUint, b: u64) -> BigUint {
    x.nth_root(b as u32)
}

/// `floor(n^{a/b} / den)` as the largest `z` with `(z * den)^b <= n^a`.
fn floor_power_over(n: u64, a: u64, b: u64, den: &BigUint) -> Result<BigUint> {
    let top = checked_pow(n, a)?;
    // floor((n^a)^{1/b}) is floor(n^{a/b}); dividing its floor by an integer
    // keeps the floor.
    Ok(floor_root(&top, b) / den)
}

pub fn bound_report(
    n: u64,
    m: u64,
    d: u64,
    eps: Ratio<u64>,
    variant: BoundVariant,
    helps: Option<&HelpSet>,
) -> Result<BoundReport> {
    if eps.is_zero() || eps >= Ratio::one() {
        return Err(Error::invalid(format!("eps must lie strictly between 0 and 1, got {eps}")));
    }
    if n == 0 || m == 0 || d == 0 {
        return Err(Error::invalid("n, m and d must all be positive"));
    }
    let quarter = eps * Ratio::from_integer(d) / Ratio::from_integer(4);
    let (a, b) = (*quarter.numer(), *quarter.denom());
    let half = eps * Ratio::from_integer(d) / Ratio::from_integer(2);
    let (a2, b2) = (*half.numer(), *half.denom());
    let value = match variant {
        BoundVariant::LowDeg => {
            let num = checked_pow(n, 2 * a)?;
            let den = checked_pow(2 * m * d, b)?;
            ExactValue {
                radicand: ratio(num, den),
                index: (2 * b) as u32,
            }
        }
        BoundVariant::HighDeg => {
            let z = floor_power_over(n, a2, b2, &big(2 * m * d))?;
            ExactValue::rational(ratio(z, BigUint::one()))
        }
        BoundVariant::GenLow => {
            let num = checked_pow(n, 2 * a)?;
            let den = checked_pow(2 * m, b)? * checked_pow(d * (d + 1), 2 * b)?;
            ExactValue {
                radicand: ratio(num, den),
                index: (2 * b) as u32,
            }
        }
        BoundVariant::GenHigh => {
            let z = floor_power_over(n, a2, b2, &big(2 * m * d * d))?;
            ExactValue::rational(ratio(z, big(d + 1)))
        }
    };
    let one_minus = Ratio::one() - eps;
    let half_plus = Ratio::new(1, 2) + eps;
    let hypothesis = match variant {
        BoundVariant::LowDeg => format!("d(H_<=d) <= {}", one_minus * Ratio::from_integer(d)),
        BoundVariant::HighDeg => format!("min degree of H >= {}", half_plus * Ratio::from_integer(d)),
        BoundVariant::GenLow => format!("d(H~_<=d) <= {}", one_minus * Ratio::from_integer(d)),
        BoundVariant::GenHigh => format!("min degree of H~ >= {}", half_plus * Ratio::from_integer(d)),
    };
    let applicable = helps.map(|h| {
        let dd = d as usize;
        let degrees: Vec<u64> = match variant {
            BoundVariant::LowDeg => h.restricted(dd).iter().filter_map(NCPoly::degree).map(|e| e as u64).collect(),
            BoundVariant::HighDeg => h.polys.iter().filter_map(NCPoly::degree).map(|e| e as u64).collect(),
            BoundVariant::GenLow | BoundVariant::GenHigh => {
                let parts = h.homogeneous_parts();
                parts
                    .iter()
                    .filter_map(NCPoly::degree)
                    .map(|e| e as u64)
                    .filter(|&e| variant == BoundVariant::GenHigh || e <= d)
                    .collect()
            }
        };
        match variant {
            BoundVariant::LowDeg | BoundVariant::GenLow => degrees
                .iter()
                .max()
                .is_none_or(|&e| Ratio::from_integer(e) <= one_minus * Ratio::from_integer(d)),
            BoundVariant::HighDeg | BoundVariant::GenHigh => degrees
                .iter()
                .min()
                .is_none_or(|&e| Ratio::from_integer(e) >= half_plus * Ratio::from_integer(d)),
        }
    });
    Ok(BoundReport {
        variant,
        n,
        m,
        d,
        eps,
        value,
        hypothesis,
        applicable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::Word;
    use crate::rmp::rank_distance;

    fn gf(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn poly(f: &Field, n: usize, terms: &[(&[u32], u32)]) -> NCPoly {
        NCPoly::from_terms(f, n, terms.iter().map(|(l, c)| (Word::new(l.to_vec()), *c))).unwrap()
    }

    #[test]
    fn obstruction_for_single_quadratic() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0, 1], 1)])]).unwrap();
        let obs = build_obstruction_set(&h, 2).unwrap();
        assert_eq!(obs.raw_count, 1);
        assert_eq!(obs.matrices, vec![Mat::from_rows(&f, &[vec![0, 1], vec![0, 0]])]);
    }

    #[test]
    fn obstruction_counts_per_split() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0, 1, 1], 1), (&[1, 0, 0], 1)])]).unwrap();
        let obs = build_obstruction_set(&h, 4).unwrap();
        // i in {1, 2}, two elementary matrices each.
        assert_eq!(obs.raw_count, 4);
        assert!(obs.matrices.len() <= 4);
        assert!(obs.matrices.iter().all(|m| m.rows() == 4 && m.cols() == 4));
    }

    #[test]
    fn helps_above_degree_are_dropped() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0, 1, 1], 1)])]).unwrap();
        let obs = build_obstruction_set(&h, 2).unwrap();
        assert!(obs.matrices.is_empty());
        assert_eq!(obs.raw_count, 0);
        assert!(build_obstruction_set(&h, 3).is_err());
    }

    #[test]
    fn help_set_rejects_empty_and_zero() {
        let f = gf(3);
        assert!(HelpSet::new(&f, 1, vec![]).is_err());
        assert!(HelpSet::new(&f, 1, vec![NCPoly::zero(&f, 1)]).is_err());
        let h = HelpSet::new(&f, 1, vec![poly(&f, 1, &[(&[0], 1), (&[0, 0, 0], 2)])]).unwrap();
        assert_eq!((h.max_degree(), h.min_degree()), (3, 3));
        assert_eq!(h.homogeneous_parts(), vec![poly(&f, 1, &[(&[0, 0, 0], 2)])]);
        assert_eq!(h.hash().len(), 64);
    }

    #[test]
    fn generate_small_end_to_end() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0, 1], 1)])]).unwrap();
        let hard = generate_hard(&h, 2, Solver::Simple).unwrap();
        let cert = &hard.certificate;
        assert_eq!((cert.k(), cert.claimed_r), (1, 1));
        assert!(polynomial_matches(&hard.f, cert).unwrap());
        let v = verify_certificate(cert, DistanceMode::Exhaustive).unwrap();
        assert!(v.holds && v.exact);
        let m1 = &cert.obstruction[0];
        assert!(rank_distance(&cert.remote, m1).unwrap() >= 1);
    }

    #[test]
    fn no_effective_helps_gives_full_distance() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0, 1, 1, 0, 1], 1)])]).unwrap();
        let hard = generate_hard(&h, 2, Solver::Simple).unwrap();
        assert_eq!(hard.certificate.claimed_r, 2);
        assert_eq!(hard.certificate.remote.rank(), 2);
    }

    #[test]
    fn tampering_is_detected() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0, 1, 0, 1], 1)])]).unwrap();
        let cert = generate_hard(&h, 4, Solver::Simple).unwrap().certificate;
        assert!(verify_certificate(&cert, DistanceMode::Exhaustive).unwrap().holds);
        let mut bad = cert.clone();
        bad.remote = cert.obstruction[0].clone();
        assert!(!verify_certificate(&bad, DistanceMode::Exhaustive).unwrap().holds);
        let mut bad = cert.clone();
        bad.claimed_r += cert.side().unwrap();
        assert!(!verify_certificate(&bad, DistanceMode::Exhaustive).unwrap().holds);
    }

    #[test]
    fn odd_degree_rejected() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0, 1], 1)])]).unwrap();
        assert!(generate_hard(&h, 3, Solver::Simple).is_err());
    }

    #[test]
    fn inhomogeneous_helps_are_split() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0], 1), (&[0, 1], 1)])]).unwrap();
        let hard = generate_hard(&h, 2, Solver::Simple).unwrap();
        assert_eq!(hard.certificate.preprocess, Preprocess::HomogeneousParts);
        assert_eq!(hard.certificate.k(), 1);
    }

    #[test]
    fn low_degree_example() {
        let r = bound_report(4, 2, 8, Ratio::new(1, 4), BoundVariant::LowDeg, None).unwrap();
        let want = ExactValue {
            radicand: BigRational::new(1.into(), 8.into()),
            index: 2,
        };
        assert_eq!(r.value, want);
        assert!((r.value.to_f64() - 2f64.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn high_degree_is_trivial_at_desk_scale() {
        let r = bound_report(2, 1, 2, Ratio::new(1, 2), BoundVariant::HighDeg, None).unwrap();
        assert_eq!(r.value.as_rational(), Some(BigRational::zero()));
    }

    #[test]
    fn gen_high_relates_to_high() {
        let (n, m, d) = (1u64 << 10, 1, 4);
        let eps = Ratio::new(3, 4);
        let g = bound_report(n, m, d, eps, BoundVariant::GenHigh, None).unwrap();
        let h = bound_report(n, m * d, d, eps, BoundVariant::HighDeg, None).unwrap();
        let hv = h.value.as_rational().unwrap();
        assert_eq!(g.value.as_rational().unwrap(), hv / BigRational::from_integer((d + 1).into()));
    }

    #[test]
    fn eps_out_of_range() {
        for eps in [Ratio::new(0, 1), Ratio::new(1, 1), Ratio::new(3, 2)] {
            assert!(bound_report(2, 1, 2, eps, BoundVariant::LowDeg, None).is_err());
        }
    }

    #[test]
    fn applicability() {
        let f = gf(2);
        let h = HelpSet::new(&f, 2, vec![poly(&f, 2, &[(&[0, 1, 1], 1)])]).unwrap();
        let hi = bound_report(2, 1, 4, Ratio::new(1, 4), BoundVariant::HighDeg, Some(&h)).unwrap();
        assert_eq!(hi.applicable, Some(true));
        let lo = bound_report(2, 1, 4, Ratio::new(1, 2), BoundVariant::LowDeg, Some(&h)).unwrap();
        assert_eq!(lo.applicable, Some(false));
        let vacuous = bound_report(2, 1, 2, Ratio::new(1, 2), BoundVariant::LowDeg, Some(&h)).unwrap();
        assert_eq!(vacuous.applicable, Some(true));
    }
}
