//! The remote point problem in the rank metric.
//!
//! Given the span `L` of matrices `P_1, ..., P_k` in `GF(p)^{N x N}`, find a
//! matrix whose rank distance to every element of `L` is large. Two solvers
//! are provided: [`solve_simple`] reaches distance `floor(N/(k+1))`, and
//! [`solve_improved`] covers `L + B_r` by a union of subspaces built from a
//! [`GoodCollection`] and steps outside the union with [`avoid_union`].

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Field, Mat, Subspace, Vector};

/// Largest span enumerated by [`min_span_distance`] in exhaustive mode.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 24;

/// Largest number of members a good collection may have.
pub const MAX_MEMBERS: u64 = 1 << 18;

/// `rank(p - q)`
pub fn rank_distance(p: &Mat, q: &Mat) -> Result<usize> {
    Ok(p.sub(q)?.rank())
}

/// `|A| - rank(A)`
pub fn corank(field: &Field, vectors: &[Vector]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let s = Subspace::span(field, first.len(), vectors)?;
    Ok(vectors.len() - s.dim())
}

/// The matrices whose span is to be avoided, reduced to an independent set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemoteInstance {
    field: Field,
    n: usize,
    basis: Vec<Mat>,
    span: Subspace,
}

impl RemoteInstance {
    /// Keeps, in input order, each matrix that is independent of the ones
    /// kept before it.
    pub fn new(field: &Field, n: usize, mats: &[Mat]) -> Result<RemoteInstance> {
        let mut span = Subspace::zero(field, n * n);
        let mut basis = Vec::new();
        for m in mats {
            field.check(m.field())?;
            if m.rows() != n || m.cols() != n {
                return Err(Error::dim(format!(
                    "expected {n}x{n} matrices, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            if span.insert(&m.flatten())? {
                basis.push(m.clone());
            }
        }
        Ok(RemoteInstance {
            field: field.clone(),
            n,
            basis,
            span,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Matrix side `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `k`, the dimension of the span.
    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    /// The span, flattened row-major into `GF(p)^{N^2}`.
    pub fn span(&self) -> &Subspace {
        &self.span
    }

    fn combination(&self, coeffs: &[u32]) -> Mat {
        let mut m = Mat::zeros(&self.field, self.n, self.n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                m.add_scaled(*c, b).expect("shapes agree");
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

/// Smallest rank distance found, with the span coefficients attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanDistance {
    pub distance: usize,
    /// True when every span element was examined. Otherwise `distance` is
    /// only an upper bound on the true minimum.
    pub exact: bool,
    pub witness: Vec<u32>,
}

/// `min_{Q in span} rank(p - Q)`, either exactly or as a sampled upper bound.
pub fn min_span_distance(p: &Mat, inst: &RemoteInstance, mode: DistanceMode) -> Result<SpanDistance> {
    inst.field.check(p.field())?;
    if p.rows() != inst.n || p.cols() != inst.n {
        return Err(Error::dim(format!("point is {}x{}, expected {n}x{n}", p.rows(), p.cols(), n = inst.n)));
    }
    let k = inst.k();
    let q = inst.field.p();
    let mut best = SpanDistance {
        distance: p.rank(),
        exact: true,
        witness: vec![0; k],
    };
    match mode {
        DistanceMode::Exhaustive => {
            let total = BigUint::from(q).pow(k as u32);
            if total > BigUint::from(EXHAUSTIVE_LIMIT) {
                return Err(Error::budget(format!(
                    "span has {total} elements, exhaustive limit is {EXHAUSTIVE_LIMIT}; use sampling"
                )));
            }
            let mut coeffs = vec![0u32; k];
            'outer: loop {
                let mut i = 0;
                loop {
                    if i == k {
                        break 'outer;
                    }
                    coeffs[i] += 1;
                    if coeffs[i] < q {
                        break;
                    }
                    coeffs[i] = 0;
                    i += 1;
                }
                let d = rank_distance(p, &inst.combination(&coeffs))?;
                if d < best.distance {
                    best.distance = d;
                    best.witness = coeffs.clone();
                    if d == 0 {
                        break;
                    }
                }
            }
        }
        DistanceMode::Sampled { count, seed } => {
            best.exact = k == 0;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let coeffs: Vec<u32> = (0..k).map(|_| rng.gen_range(0..q)).collect();
                let d = rank_distance(p, &inst.combination(&coeffs))?;
                if d < best.distance {
                    best.distance = d;
                    best.witness = coeffs;
                }
            }
        }
    }
    Ok(best)
}

/// A point together with the distance it is guaranteed to keep from the span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemotePoint {
    pub point: Mat,
    pub guaranteed: usize,
}

/// Distance `r = floor(N/(k+1))` from the span.
///
/// The first `r` columns of every `P_i` are listed, then extended by `r`
/// standard basis vectors independent of everything before them; those
/// extension vectors become the first `r` columns of the result.
pub fn solve_simple(inst: &RemoteInstance) -> Result<RemotePoint> {
    let n = inst.n;
    let r = n / (inst.k() + 1);
    if r == 0 {
        return Err(Error::pre(format!(
            "N = {n} and k = {} give only the trivial bound r = 0; increase N or decrease k",
            inst.k()
        )));
    }
    let mut seen = Subspace::zero(&inst.field, n);
    for p in &inst.basis {
        for j in 0..r {
            seen.insert(&p.column(j))?;
        }
    }
    let mut point = Mat::zeros(&inst.field, n, n);
    let mut chosen = 0;
    for i in 0..n {
        if chosen == r {
            break;
        }
        if seen.insert(&Vector::unit(&inst.field, n, i))? {
            point.set(i, chosen, 1);
            chosen += 1;
        }
    }
    if chosen < r {
        return Err(Error::Internal("ran out of extension vectors".into()));
    }
    Ok(RemotePoint { point, guaranteed: r })
}

/// Per-subspace state while [`avoid_union`] fixes coordinates left to right.
///
/// With the basis in RREF, a pivot coordinate fixes one coefficient and a
/// non-pivot coordinate is a function of the coefficients fixed so far, so the
/// slice is either empty or has dimension `dim - (pivots passed)`.
struct SliceTracker<'a> {
    space: &'a Subspace,
    coeffs: Vec<u32>,
    next_pivot: usize,
    alive: bool,
}

impl SliceTracker<'_> {
    /// Dimension of the slice after setting coordinate `j` to `alpha`.
    fn dim_after(&self, field: &Field, j: usize, alpha: u32) -> Option<usize> {
        if !self.alive {
            return None;
        }
        let pivots = self.space.pivots();
        if pivots.get(self.next_pivot) == Some(&j) {
            return Some(self.space.dim() - self.next_pivot - 1);
        }
        (self.forced(field, j) == alpha).then_some(self.space.dim() - self.next_pivot)
    }

    fn forced(&self, field: &Field, j: usize) -> u32 {
        let rows = self.space.basis();
        (0..self.next_pivot).fold(0, |acc, r| field.mul_add(acc, self.coeffs[r], rows[r][j]))
    }

    fn fix(&mut self, field: &Field, j: usize, alpha: u32) {
        if !self.alive {
            return;
        }
        if self.space.pivots().get(self.next_pivot) == Some(&j) {
            self.coeffs[self.next_pivot] = alpha;
            self.next_pivot += 1;
        } else if self.forced(field, j) != alpha {
            self.alive = false;
        }
    }
}

/// A point of `GF(p)^M` outside every given subspace.
///
/// Coordinates are fixed one at a time, always taking the smallest value that
/// keeps the total size of the remaining slices below the size of the
/// remaining cube. Requires `Σ p^{dim V_j} < p^M`.
pub fn avoid_union(field: &Field, subspaces: &[Subspace], m: usize) -> Result<Vector> {
    for s in subspaces {
        field.check(s.field())?;
        if s.ambient_dim() != m {
            return Err(Error::dim(format!(
                "subspace of F^{} given for ambient dimension {m}",
                s.ambient_dim()
            )));
        }
    }
    let p = BigUint::from(field.p());
    let total: BigUint = subspaces.iter().map(Subspace::size).sum();
    let cube = p.pow(m as u32);
    if total >= cube {
        return Err(Error::pre(format!(
            "subspace sizes sum to {total}, which is not below |F|^{m} = {cube}"
        )));
    }
    let mut trackers: Vec<SliceTracker> = subspaces
        .iter()
        .map(|s| SliceTracker {
            space: s,
            coeffs: vec![0; s.dim()],
            next_pivot: 0,
            alive: true,
        })
        .collect();
    let mut u = Vec::with_capacity(m);
    let mut pow_cache: Vec<BigUint> = Vec::with_capacity(m + 1);
    let mut acc = BigUint::one();
    for _ in 0..=m {
        pow_cache.push(acc.clone());
        acc *= &p;
    }
    for j in 0..m {
        let bound = &pow_cache[m - j - 1];
        let alpha = (0..field.p())
            .find(|&alpha| {
                let sum: BigUint = trackers
                    .iter()
                    .filter_map(|t| t.dim_after(field, j, alpha))
                    .map(|d| pow_cache[d].clone())
                    .sum();
                &sum < bound
            })
            .ok_or_else(|| Error::Internal(format!("no admissible value at coordinate {j}")))?;
        for t in &mut trackers {
            t.fix(field, j, alpha);
        }
        u.push(alpha);
    }
    Vector::new(field, u)
}

/// `V(U)`: the span of all `u v^T` with `u` in `U`, flattened row-major into
/// `GF(p)^{N^2}`. Its dimension is `dim(U) * N`.
pub fn lift_to_matrix_space(u: &Subspace, n: usize) -> Result<Subspace> {
    if u.ambient_dim() != n {
        return Err(Error::dim(format!(
            "subspace of F^{} lifted with N = {n}",
            u.ambient_dim()
        )));
    }
    let f = u.field();
    let mut out = Subspace::zero(f, n * n);
    for b in u.basis() {
        for j in 0..n {
            let mut v = vec![0u32; n * n];
            for (i, &x) in b.iter().enumerate() {
                v[i * n + j] = x;
            }
            out.insert_raw(v);
        }
    }
    Ok(out)
}

/// How a [`GoodCollection`] was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// `V_A` for every `r`-subset `A` of `F^{2 d1}`.
    Case1,
    /// `V_{S,W}` for every `d_good`-subset `S` of the first `t` coordinates
    /// and every `(d_good - d1)`-dimensional `W` in `F^{d_good}`.
    Case2 { t: usize, d_good: usize, c0: Option<u64> },
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construction::Case1 => write!(f, "case1"),
            Construction::Case2 { t, d_good, .. } => write!(f, "case2 t={t} d={d_good}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum MemberKey {
    Case1(Vec<Vec<u32>>),
    Case2(Vec<usize>, Vec<Vec<u32>>),
}

/// Subspaces of `F^N` of dimension at most `N - d1` such that every set of
/// `d2` vectors lies inside one of them.
#[derive(Clone)]
pub struct GoodCollection {
    field: Field,
    n: usize,
    d1: usize,
    d2: usize,
    members: Vec<Subspace>,
    construction: Construction,
    index: HashMap<MemberKey, usize>,
}

impl fmt::Debug for GoodCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GoodCollection")
            .field("field", &self.field)
            .field("n", &self.n)
            .field("d1", &self.d1)
            .field("d2", &self.d2)
            .field("members", &self.members.len())
            .field("construction", &self.construction)
            .finish()
    }
}

fn binomial(n: &BigUint, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        let top = n - BigUint::from(i);
        if top.is_zero() {
            return BigUint::zero();
        }
        acc = acc * top / BigUint::from(i + 1);
    }
    acc
}

/// The `i`th vector of `F^len` in lexicographic order.
fn nth_vector(p: u32, len: usize, mut i: u64) -> Vec<u32> {
    let mut v = vec![0u32; len];
    for slot in v.iter_mut().rev() {
        *slot = (i % p as u64) as u32;
        i /= p as u64;
    }
    v
}

fn check_members(count: &BigUint) -> Result<()> {
    if count > &BigUint::from(MAX_MEMBERS) {
        return Err(Error::budget(format!(
            "collection would have {count} members, limit is {MAX_MEMBERS}"
        )));
    }
    Ok(())
}

/// All `k`-dimensional subspaces of `F^d`, as RREF bases.
fn subspaces_of_dim(field: &Field, d: usize, k: usize) -> Vec<Vec<Vec<u32>>> {
    let p = field.p();
    let mut out = Vec::new();
    for pivots in (0..d).combinations(k) {
        let mut free = Vec::new();
        for (r, &c) in pivots.iter().enumerate() {
            for j in c + 1..d {
                if !pivots.contains(&j) {
                    free.push((r, j));
                }
            }
        }
        let count = (p as u64).pow(free.len() as u32);
        for code in 0..count {
            let vals = nth_vector(p, free.len(), code);
            let mut rows = vec![vec![0u32; d]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            for (&(r, j), v) in free.iter().zip(vals) {
                rows[r][j] = v;
            }
            out.push(rows);
        }
    }
    out
}

fn subspace_count(p: u32, d: usize, k: usize) -> BigUint {
    let mut total = BigUint::zero();
    for pivots in (0..d).combinations(k) {
        let free: usize = pivots
            .iter()
            .enumerate()
            .map(|(r, &c)| (d - c - 1) - (k - r - 1))
            .sum();
        total += BigUint::from(p).pow(free as u32);
    }
    total
}

/// Smallest `q >= 0` with `q^2 * den >= num * log2(n)`, i.e. `ceil(sqrt(c log2 n))`
/// scaled by `scale`: the least `s` with `(s * scale)^2 * den >= factor * num * log2(n)`.
fn ceil_scaled_sqrt_log(n: usize, c: Ratio<u64>, scale: u64, factor: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid("N must be at least 2"));
    }
    if *c.numer() == 0 {
        return Ok(0);
    }
    // (s*scale)^2 * den >= factor*num*log2(n)  <=>  2^{(s*scale)^2 den} >= n^{factor num}
    let target = BigUint::from(n).pow(
        u32::try_from(factor * c.numer()).map_err(|_| Error::invalid("c is too large"))?,
    );
    let bits_needed = (target - 1u32).bits();
    let mut s = 0u64;
    loop {
        let e = (s * scale) as u128 * (s * scale) as u128 * *c.denom() as u128;
        if e >= bits_needed as u128 {
            return Ok(s);
        }
        s += 1;
    }
}

/// `t = p^{ceil((20/c0) sqrt(c log2 N))}` and `d_good = c0 ceil(sqrt(c log2 N))`.
pub fn case2_parameters(p: u32, n: usize, c0: u64, c: Ratio<u64>) -> Result<(BigUint, u64)> {
    if c0 == 0 {
        return Err(Error::invalid("c0 must be positive"));
    }
    let q = ceil_scaled_sqrt_log(n, c, 1, 1)?;
    // s*c0/20 >= sqrt(c log N)  <=>  (s*c0)^2 den >= 400 num log N
    let s = ceil_scaled_sqrt_log(n, c, c0, 400)?;
    let t = BigUint::from(p).pow(u32::try_from(s).map_err(|_| Error::invalid("exponent too large"))?);
    Ok((t, c0 * q))
}

impl GoodCollection {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    /// `V_A = span{x : x restricted to the first 2*d1 coordinates lies in A}`
    /// for every `A` of `d2` vectors in `F^{2 d1}`. Needs `d1 >= d2 >= 1` and
    /// `2 d1 <= N`.
    pub fn case1(field: &Field, n: usize, d1: usize, d2: usize) -> Result<GoodCollection> {
        if d2 == 0 || d1 < d2 {
            return Err(Error::invalid(format!(
                "case 1 needs d1 >= d2 >= 1, got d1 = {d1}, d2 = {d2}"
            )));
        }
        let w = 2 * d1;
        if w > n {
            return Err(Error::pre(format!(
                "case 1 needs 2*d1 = {w} <= N = {n}; increase N or lower the parameters"
            )));
        }
        let p = field.p();
        let points = BigUint::from(p).pow(w as u32);
        check_members(&binomial(&points, d2))?;
        let npoints = points.to_u64().expect("bounded by the member check");
        let mut members = Vec::new();
        let mut index = HashMap::new();
        for set in (0..npoints).combinations(d2) {
            let a: Vec<Vec<u32>> = set.iter().map(|&i| nth_vector(p, w, i)).collect();
            let mut s = Subspace::zero(field, n);
            for v in &a {
                let mut x = v.clone();
                x.resize(n, 0);
                s.insert_raw(x);
            }
            for j in w..n {
                let mut x = vec![0u32; n];
                x[j] = 1;
                s.insert_raw(x);
            }
            index.insert(MemberKey::Case1(a), members.len());
            members.push(s);
        }
        Ok(GoodCollection {
            field: field.clone(),
            n,
            d1,
            d2,
            members,
            construction: Construction::Case1,
            index,
        })
    }

    /// Case 2 with `t` and `d_good` derived from `c0` and `c` (logarithms base 2).
    pub fn case2(
        field: &Field,
        n: usize,
        d1: usize,
        d2: usize,
        c0: u64,
        c: Ratio<u64>,
    ) -> Result<GoodCollection> {
        let (t, d_good) = case2_parameters(field.p(), n, c0, c)?;
        if t > BigUint::from(n) {
            return Err(Error::pre(format!(
                "case-2 parameters infeasible at N = {n}: t = {t} exceeds N (the construction only applies for very large N)"
            )));
        }
        let t = t.to_usize().expect("t <= N");
        let d_good = usize::try_from(d_good).map_err(|_| Error::invalid("d_good too large"))?;
        let mut coll = GoodCollection::case2_explicit(field, n, d1, d2, t, d_good)?;
        coll.construction = Construction::Case2 { t, d_good, c0: Some(c0) };
        Ok(coll)
    }

    /// `V_{S,W}` for every `S` of `d_good` coordinates among the first `t` and
    /// every `W` of dimension `d_good - d1` in `F^{d_good}`.
    ///
    /// Sets `A` of `d_good - d1` vectors enter only through their span, and
    /// each such span lies inside some `W` of full dimension `d_good - d1`, so
    /// keeping just those `W` covers everything the set-indexed family covers.
    pub fn case2_explicit(
        field: &Field,
        n: usize,
        d1: usize,
        d2: usize,
        t: usize,
        d_good: usize,
    ) -> Result<GoodCollection> {
        if d1 == 0 || d1 > d2 {
            return Err(Error::invalid(format!(
                "case 2 needs 1 <= d1 <= d2, got d1 = {d1}, d2 = {d2}"
            )));
        }
        if d_good < d1 || d_good > t || t > n {
            return Err(Error::pre(format!(
                "case 2 needs d1 <= d_good <= t <= N, got d1 = {d1}, d_good = {d_good}, t = {t}, N = {n}"
            )));
        }
        let p = field.p();
        let k = d_good - d1;
        let per_s = subspace_count(p, d_good, k);
        check_members(&(binomial(&BigUint::from(t), d_good) * &per_s))?;
        let ws = subspaces_of_dim(field, d_good, k);
        let mut members = Vec::new();
        let mut index = HashMap::new();
        for s in (0..t).combinations(d_good) {
            for w in &ws {
                let mut sub = Subspace::zero(field, n);
                for row in w {
                    let mut x = vec![0u32; n];
                    for (&j, &v) in s.iter().zip(row) {
                        x[j] = v;
                    }
                    sub.insert_raw(x);
                }
                for j in (0..n).filter(|j| !s.contains(j)) {
                    let mut x = vec![0u32; n];
                    x[j] = 1;
                    sub.insert_raw(x);
                }
                index.insert(MemberKey::Case2(s.clone(), w.clone()), members.len());
                members.push(sub);
            }
        }
        Ok(GoodCollection {
            field: field.clone(),
            n,
            d1,
            d2,
            members,
            construction: Construction::Case2 { t, d_good, c0: None },
            index,
        })
    }

    /// A member containing every vector of `a1` (at most `d2` of them).
    pub fn find_cover(&self, a1: &[Vector]) -> Result<&Subspace> {
        if a1.len() > self.d2 {
            return Err(Error::invalid(format!(
                "{} vectors given, the collection covers sets of {}",
                a1.len(),
                self.d2
            )));
        }
        for v in a1 {
            self.field.check(v.field())?;
            if v.len() != self.n {
                return Err(Error::dim(format!("vector of length {}, expected {}", v.len(), self.n)));
            }
        }
        let key = match &self.construction {
            Construction::Case1 => self.case1_key(a1),
            Construction::Case2 { t, d_good, .. } => self.case2_key(a1, *t, *d_good)?,
        };
        let idx = self
            .index
            .get(&key)
            .ok_or_else(|| Error::Internal("no member covers the given vectors".into()))?;
        Ok(&self.members[*idx])
    }

    fn case1_key(&self, a1: &[Vector]) -> MemberKey {
        let w = 2 * self.d1;
        let mut set: Vec<Vec<u32>> = a1.iter().map(|v| v.entries()[..w].to_vec()).collect();
        set.sort();
        set.dedup();
        let mut i = 0u64;
        while set.len() < self.d2 {
            let cand = nth_vector(self.field.p(), w, i);
            if !set.contains(&cand) {
                set.push(cand);
            }
            i += 1;
        }
        set.sort();
        MemberKey::Case1(set)
    }

    fn case2_key(&self, a1: &[Vector], t: usize, d_good: usize) -> Result<MemberKey> {
        let k = d_good - self.d1;
        for s in (0..t).combinations(d_good) {
            let rows: Vec<Vector> = a1
                .iter()
                .map(|v| Vector::new(&self.field, s.iter().map(|&j| v.entries()[j]).collect()))
                .collect::<Result<_>>()?;
            let mut w = Subspace::span(&self.field, d_good, &rows)?;
            if w.dim() > k {
                continue;
            }
            for j in 0..d_good {
                if w.dim() == k {
                    break;
                }
                w.insert(&Vector::unit(&self.field, d_good, j))?;
            }
            return Ok(MemberKey::Case2(s, w.basis().to_vec()));
        }
        Err(Error::Internal(
            "no coordinate subset has enough corank; the collection is not good for these parameters".into(),
        ))
    }
}

/// Which good collection [`solve_improved`] used and how large the union was.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprovedSolution {
    pub point: Mat,
    /// The point is at rank distance at least this from the span.
    pub guaranteed: usize,
    pub construction: Construction,
    /// Distinct subspaces `L + V(U)` that were avoided.
    pub subspaces: usize,
    pub size_sum: BigUint,
}

/// Parameters of the improved solver beyond the instance itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImprovedParams {
    pub ell: usize,
    pub r: usize,
    pub c0: u64,
    pub c: Ratio<u64>,
}

impl Default for ImprovedParams {
    fn default() -> Self {
        ImprovedParams {
            ell: 1,
            r: 1,
            c0: 24,
            c: Ratio::new(1, 1),
        }
    }
}

/// A matrix at rank distance more than `r` from a span of dimension at most
/// `ell * N`.
///
/// Builds an `(ell + 1, r)`-good collection (case 1 when `ell + 1 >= r`),
/// lifts each member to matrix space, adds the span, and avoids the union.
/// The union must be smaller than the whole space; that is checked exactly.
pub fn solve_improved(inst: &RemoteInstance, params: ImprovedParams) -> Result<ImprovedSolution> {
    let ImprovedParams { ell, r, c0, c } = params;
    let n = inst.n;
    if r == 0 {
        return Err(Error::invalid("r must be at least 1"));
    }
    if inst.k() > ell * n {
        return Err(Error::pre(format!(
            "span has dimension {} > ell * N = {}",
            inst.k(),
            ell * n
        )));
    }
    let f = &inst.field;
    let d1 = ell + 1;
    let coll = if d1 >= r {
        GoodCollection::case1(f, n, d1, r)?
    } else {
        GoodCollection::case2(f, n, d1, r, c0, c)?
    };
    let mut seen = std::collections::HashSet::new();
    let mut spaces = Vec::new();
    for u in coll.members() {
        let v = lift_to_matrix_space(u, n)?.sum(inst.span())?;
        if seen.insert(v.clone()) {
            spaces.push(v);
        }
    }
    let size_sum: BigUint = spaces.iter().map(Subspace::size).sum();
    let cube = BigUint::from(f.p()).pow((n * n) as u32);
    if size_sum >= cube {
        return Err(Error::pre(format!(
            "size check failed: {} subspaces of total size {size_sum} do not fit below |F|^(N^2) = {cube}; increase N or lower ell and r",
            spaces.len()
        )));
    }
    let u = avoid_union(f, &spaces, n * n)?;
    Ok(ImprovedSolution {
        point: Mat::from_flat(&u, n, n)?,
        guaranteed: r + 1,
        construction: coll.construction.clone(),
        subspaces: spaces.len(),
        size_sum,
    })
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

    fn exhaustive(p: &Mat, inst: &RemoteInstance) -> usize {
        min_span_distance(p, inst, DistanceMode::Exhaustive).unwrap().distance
    }

    #[test]
    fn rank_distance_examples() {
        let f = gf(2);
        let i2 = Mat::identity(&f, 2);
        assert_eq!(rank_distance(&i2, &i2).unwrap(), 0);
        assert_eq!(rank_distance(&Mat::identity(&f, 3), &Mat::zeros(&f, 3, 3)).unwrap(), 3);
        let p = Mat::from_rows(&f, &[vec![1, 1], vec![0, 1]]);
        assert_eq!(rank_distance(&p, &i2).unwrap(), 1);
        assert!(rank_distance(&i2, &Mat::identity(&f, 3)).is_err());
    }

    #[test]
    fn span_distance_examples() {
        let f = gf(2);
        let p = Mat::from_rows(&f, &[vec![0, 0], vec![1, 0]]);
        let empty = RemoteInstance::new(&f, 2, &[]).unwrap();
        assert_eq!(exhaustive(&p, &empty), 1);
        let inst = RemoteInstance::new(&f, 2, &[Mat::identity(&f, 2)]).unwrap();
        assert_eq!(exhaustive(&p, &inst), 1);
        assert_eq!(exhaustive(&Mat::identity(&f, 2), &inst), 0);
        let s = min_span_distance(&p, &inst, DistanceMode::Sampled { count: 10, seed: 1 }).unwrap();
        assert!(!s.exact);
        assert_eq!(s.distance, 1);
    }

    #[test]
    fn instance_drops_dependent_matrices() {
        let f = gf(3);
        let a = Mat::identity(&f, 2);
        let b = Mat::from_rows(&f, &[vec![0, 1], vec![0, 0]]);
        let c = a.add(&b.scale(2)).unwrap();
        let inst = RemoteInstance::new(&f, 2, &[a.clone(), a.clone(), b, c, Mat::zeros(&f, 2, 2)]).unwrap();
        assert_eq!(inst.k(), 2);
    }

    #[test]
    fn simple_examples() {
        let f = gf(2);
        let inst = RemoteInstance::new(&f, 2, &[Mat::identity(&f, 2)]).unwrap();
        let sol = solve_simple(&inst).unwrap();
        assert_eq!(sol.guaranteed, 1);
        assert_eq!(sol.point, Mat::from_rows(&f, &[vec![0, 0], vec![1, 0]]));
        assert!(exhaustive(&sol.point, &inst) >= 1);

        let inst = RemoteInstance::new(&f, 4, &[Mat::zeros(&f, 4, 4)]).unwrap();
        let sol = solve_simple(&inst).unwrap();
        // the zero matrix is dropped, so k = 0 and r = N
        assert_eq!(sol.guaranteed, 4);
        assert_eq!(sol.point, Mat::identity(&f, 4));

        let mats: Vec<Mat> = (0..3)
            .map(|i| {
                let mut m = Mat::zeros(&f, 3, 3);
                m.set(i, i, 1);
                m
            })
            .collect();
        let inst = RemoteInstance::new(&f, 3, &mats).unwrap();
        assert!(solve_simple(&inst).is_err());
    }

    #[test]
    fn avoid_union_examples() {
        let f = gf(2);
        let v1 = Subspace::span(&f, 2, &[v(&f, &[1, 0])]).unwrap();
        assert_eq!(avoid_union(&f, std::slice::from_ref(&v1), 2).unwrap(), v(&f, &[0, 1]));
        assert_eq!(avoid_union(&f, &[], 3).unwrap(), v(&f, &[0, 0, 0]));
        let v2 = Subspace::span(&f, 2, &[v(&f, &[0, 1])]).unwrap();
        let err = avoid_union(&f, &[v1, v2], 2).unwrap_err();
        assert!(err.to_string().contains("sum to 4"), "{err}");
    }

    #[test]
    fn avoid_union_matches_prefix_slice_oracle() {
        // Recompute the greedy choice with prefix_slice_size and compare.
        let f = gf(3);
        let spaces = vec![
            Subspace::span(&f, 4, &[v(&f, &[1, 2, 0, 1]), v(&f, &[0, 0, 1, 1])]).unwrap(),
            Subspace::span(&f, 4, &[v(&f, &[0, 1, 1, 0])]).unwrap(),
            Subspace::span(&f, 4, &[v(&f, &[1, 0, 0, 0]), v(&f, &[0, 1, 0, 0])]).unwrap(),
        ];
        let u = avoid_union(&f, &spaces, 4).unwrap();
        let mut prefix: Vec<i64> = Vec::new();
        for j in 0..4 {
            let bound = BigUint::from(3u32).pow(3 - j as u32);
            let alpha = (0..3)
                .find(|&a| {
                    let mut cand = prefix.clone();
                    cand.push(a);
                    let s: BigUint = spaces
                        .iter()
                        .map(|s| s.prefix_slice_size(&v(&f, &cand)).unwrap())
                        .sum();
                    s < bound
                })
                .unwrap();
            prefix.push(alpha);
        }
        assert_eq!(u, v(&f, &prefix));
        for s in &spaces {
            assert!(!s.contains(&u).unwrap());
        }
    }

    #[test]
    fn lift_examples() {
        let f = gf(2);
        assert_eq!(lift_to_matrix_space(&Subspace::full(&f, 3), 3).unwrap().dim(), 9);
        let e1 = Subspace::span(&f, 2, &[v(&f, &[1, 0])]).unwrap();
        let l = lift_to_matrix_space(&e1, 2).unwrap();
        assert_eq!(l.basis(), &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        let u = Subspace::span(&f, 4, &[v(&f, &[1, 0, 0, 0]), v(&f, &[0, 1, 1, 0]), v(&f, &[0, 0, 0, 1])]).unwrap();
        assert_eq!(lift_to_matrix_space(&u, 4).unwrap().dim(), 12);
        assert!(lift_to_matrix_space(&u, 3).is_err());
    }

    #[test]
    fn corank_examples() {
        let f = gf(2);
        assert_eq!(corank(&f, &[v(&f, &[1, 0]), v(&f, &[0, 1])]).unwrap(), 0);
        assert_eq!(corank(&f, &vec![v(&f, &[1, 1]); 3]).unwrap(), 2);
        assert_eq!(corank(&f, &[v(&f, &[1, 0]), v(&f, &[0, 1]), v(&f, &[1, 1])]).unwrap(), 1);
    }

    #[test]
    fn case1_examples() {
        let f = gf(2);
        let coll = GoodCollection::case1(&f, 4, 1, 1).unwrap();
        assert_eq!(coll.members().len(), 4);
        let dims: Vec<usize> = coll.members().iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![2, 3, 3, 3]);
        let u = coll.find_cover(&[v(&f, &[1, 1, 0, 1])]).unwrap();
        assert!(u.contains(&v(&f, &[1, 1, 0, 1])).unwrap());
        assert_eq!(u, &coll.members()[3]);
        let z = coll.find_cover(&[v(&f, &[0, 0, 0, 0])]).unwrap();
        assert_eq!(z, &coll.members()[0]);
        assert!(GoodCollection::case1(&f, 4, 1, 2).is_err());
        assert!(GoodCollection::case1(&f, 2, 2, 1).is_err());
    }

    #[test]
    fn case2_explicit_covers() {
        let f = gf(2);
        let coll = GoodCollection::case2_explicit(&f, 5, 1, 2, 4, 3).unwrap();
        assert!(coll.members().iter().all(|m| m.dim() <= 4));
        let a1 = [v(&f, &[1, 0, 1, 1, 0]), v(&f, &[0, 1, 1, 0, 1])];
        let u = coll.find_cover(&a1).unwrap();
        assert!(a1.iter().all(|x| u.contains(x).unwrap()));
        assert!(GoodCollection::case2_explicit(&f, 5, 3, 2, 4, 3).is_err());
    }

    #[test]
    fn case2_parameters_are_exact() {
        // c = 1, N = 16: log2 N = 4, ceil(sqrt 4) = 2, d_good = 2*c0.
        // (20/c0) * 2 with c0 = 20 is exactly 2, so t = p^2.
        let (t, d) = case2_parameters(2, 16, 20, Ratio::new(1, 1)).unwrap();
        assert_eq!((t, d), (BigUint::from(4u32), 40));
        // c = 1/2, N = 8: sqrt(1.5) -> 2
        let (_, d) = case2_parameters(3, 8, 1, Ratio::new(1, 2)).unwrap();
        assert_eq!(d, 2);
        assert!(GoodCollection::case2(&f_two(), 64, 1, 3, 24, Ratio::new(1, 1)).is_err());
    }

    fn f_two() -> Field {
        gf(2)
    }

    #[test]
    fn improved_examples() {
        let f = gf(2);
        let inst = RemoteInstance::new(&f, 4, &[Mat::identity(&f, 4)]).unwrap();
        let sol = solve_improved(&inst, ImprovedParams { ell: 1, r: 1, ..Default::default() }).unwrap();
        assert_eq!(sol.guaranteed, 2);
        assert!(sol.point.rank() >= 2);
        assert!(rank_distance(&sol.point, &Mat::identity(&f, 4)).unwrap() >= 2);

        let empty = RemoteInstance::new(&f, 4, &[]).unwrap();
        let sol = solve_improved(&empty, ImprovedParams { ell: 1, r: 1, ..Default::default() }).unwrap();
        assert!(sol.point.rank() >= 2);

        let small = RemoteInstance::new(&f, 2, &[]).unwrap();
        assert!(solve_improved(&small, ImprovedParams { ell: 1, r: 1, ..Default::default() }).is_err());
    }

    #[test]
    fn improved_size_check_failure() {
        // N = 4, ell = 1, r = 2: case 1 with d1 = d2 = 2 has C(16, 2) members
        // of dimension up to 2, and a 4-dimensional span pushes the union past
        // 2^16.
        let f = gf(2);
        let mats: Vec<Mat> = (0..4)
            .map(|i| {
                let mut m = Mat::zeros(&f, 4, 4);
                m.set(i, (i + 1) % 4, 1);
                m
            })
            .collect();
        let inst = RemoteInstance::new(&f, 4, &mats).unwrap();
        let err = solve_improved(&inst, ImprovedParams { ell: 1, r: 2, ..Default::default() }).unwrap_err();
        assert!(err.to_string().contains("size check failed"), "{err}");
    }
}
