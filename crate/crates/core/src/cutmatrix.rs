//! Communication matrices of homogeneous polynomials and the cut
//! decomposition of homogeneous ABPs.
//!
//! For `f` homogeneous of degree `d`, `M_k(f)` has rows indexed by words of
//! length `k`, columns by words of length `d - k`, and entry `(m1, m2)` equal
//! to the coefficient of `m1 m2` in `f`. Words are indexed with
//! [`word_index`](crate::ncpoly::word_index).

use std::collections::BTreeMap;

use crate::abp::Abp;
use crate::error::{Error, Result};
use crate::linalg::{Field, Mat, Vector};
use crate::ncpoly::{num_words, word_index, NCPoly, Word, DEFAULT_TERM_LIMIT};

/// Largest row or column count a cut matrix may have.
pub const MAX_SIDE: usize = 4096;

/// An `n^a x n^b` matrix whose rows and columns are labeled by words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutMatrix {
    pub base: Mat,
    pub a: usize,
    pub b: usize,
    pub n: usize,
}

impl CutMatrix {
    pub fn new(base: Mat, a: usize, b: usize, n: usize) -> Result<CutMatrix> {
        let (r, c) = (side(n, a)?, side(n, b)?);
        if base.rows() != r || base.cols() != c {
            return Err(Error::dim(format!(
                "a ({a},{b})-matrix over {n} variables is {r}x{c}, got {}x{}",
                base.rows(),
                base.cols()
            )));
        }
        Ok(CutMatrix { base, a, b, n })
    }

    pub fn zeros(field: &Field, a: usize, b: usize, n: usize) -> Result<CutMatrix> {
        let base = Mat::zeros(field, side(n, a)?, side(n, b)?);
        Ok(CutMatrix { base, a, b, n })
    }

    pub fn field(&self) -> &Field {
        self.base.field()
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    fn check_shape(&self, other: &CutMatrix) -> Result<()> {
        if (self.a, self.b, self.n) != (other.a, other.b, other.n) {
            return Err(Error::dim(format!(
                "({},{}) over {} vs ({},{}) over {}",
                self.a, self.b, self.n, other.a, other.b, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &CutMatrix) -> Result<CutMatrix> {
        self.check_shape(other)?;
        Ok(CutMatrix {
            base: self.base.add(&other.base)?,
            ..self.clone()
        })
    }
}

pub(crate) fn side(n: usize, len: usize) -> Result<usize> {
    let s = num_words(n, len)?;
    if s > MAX_SIDE {
        return Err(Error::budget(format!(
            "{n}^{len} = {s} exceeds the cut-matrix side limit {MAX_SIDE}; use fewer variables or a smaller degree"
        )));
    }
    Ok(s)
}

/// `M_k(f)` for `f` homogeneous of its own degree.
pub fn cut_matrix(f: &NCPoly, k: usize) -> Result<CutMatrix> {
    let d = f.require_degree()?;
    cut_matrix_of_degree(f, d, k)
}

/// `M_k(f)` where `f` is homogeneous of degree `d`; the zero polynomial is
/// accepted for any `d`.
pub fn cut_matrix_of_degree(f: &NCPoly, d: usize, k: usize) -> Result<CutMatrix> {
    if !f.is_homogeneous_of(d) {
        return Err(Error::pre(format!("polynomial is not homogeneous of degree {d}")));
    }
    if k > d {
        return Err(Error::invalid(format!("cut position {k} exceeds degree {d}")));
    }
    let n = f.n();
    let (rows, cols) = (side(n, k)?, side(n, d - k)?);
    let mut base = Mat::zeros(f.field(), rows, cols);
    for (w, c) in f.terms() {
        let (m1, m2) = w.split_at(k);
        base.set(word_index(&m1, n)?, word_index(&m2, n)?, c);
    }
    Ok(CutMatrix { base, a: k, b: d - k, n })
}

/// `m1 ⊗_{l,m}^k m2`: the `(k, d-k)`-matrix with entry
/// `M(m11 m12, m21 m22) = m1(m12, m21) * m2(m11, m22)`, where `m12` is the
/// length-`l` suffix of the row word and `m21` the length-`m` prefix of the
/// column word.
pub fn cross_product(
    m1: &CutMatrix,
    m2: &CutMatrix,
    l: usize,
    m: usize,
    k: usize,
    d: usize,
) -> Result<CutMatrix> {
    m1.field().check(m2.field())?;
    if l > k || k > d || m > d - k {
        return Err(Error::dim(format!("bad split l={l}, m={m} for k={k}, d={d}")));
    }
    if m1.n != m2.n || (m1.a, m1.b) != (l, m) || (m2.a, m2.b) != (k - l, d - k - m) {
        return Err(Error::dim(format!(
            "factors are ({},{}) and ({},{}), expected ({l},{m}) and ({},{})",
            m1.a,
            m1.b,
            m2.a,
            m2.b,
            k - l,
            d - k - m
        )));
    }
    let n = m1.n;
    let f = m1.field();
    let (n11, n12) = (side(n, k - l)?, side(n, l)?);
    let (n21, n22) = (side(n, m)?, side(n, d - k - m)?);
    let mut out = Mat::zeros(f, n11 * n12, n21 * n22);
    for r11 in 0..n11 {
        for r12 in 0..n12 {
            let row = r11 * n12 + r12;
            for c21 in 0..n21 {
                let x = m1.base.get(r12, c21);
                if x == 0 {
                    continue;
                }
                for c22 in 0..n22 {
                    let y = m2.base.get(r11, c22);
                    if y != 0 {
                        out.set(row, c21 * n22 + c22, f.mul(x, y));
                    }
                }
            }
        }
    }
    Ok(CutMatrix { base: out, a: k, b: d - k, n })
}

/// `E_{a,b}^{p,q}`: the `(a,b)`-matrix with a single 1 at `(p, q)`.
pub fn elementary(field: &Field, n: usize, a: usize, b: usize, p: usize, q: usize) -> Result<CutMatrix> {
    let mut m = CutMatrix::zeros(field, a, b, n)?;
    if p >= m.base.rows() || q >= m.base.cols() {
        return Err(Error::invalid(format!(
            "entry ({p},{q}) outside a {}x{} matrix",
            m.base.rows(),
            m.base.cols()
        )));
    }
    m.base.set(p, q, 1);
    Ok(m)
}

/// `C_k`, by vertex and edge indices of the program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSet {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Vertices of path degree `k` and edges jumping strictly over `k`, among the
/// parts of `a` lying on source-to-sink paths.
pub fn compute_cut(a: &Abp, k: usize) -> Result<CutSet> {
    let report = a.require_homogeneous()?;
    let d = report
        .sink_degree(a)
        .ok_or_else(|| Error::pre("the sink is not reachable from the source"))?;
    if k > d {
        return Err(Error::invalid(format!("cut position {k} exceeds deg(t) = {d}")));
    }
    let deg = &report.vertex_degree;
    let vertices = (0..a.size()).filter(|&v| deg[v] == Some(k)).collect();
    let edges = a
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| match (deg[e.from], deg[e.to]) {
            (Some(du), Some(dv)) => du < k && k < dv,
            _ => false,
        })
        .map(|(i, _)| i)
        .collect();
    Ok(CutSet { vertices, edges })
}

/// One summand `M_i(h) ⊗ M'_{i,h}` of the decomposition, stored by its
/// second factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub help: usize,
    pub split: usize,
    pub factor: CutMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub k: usize,
    pub d: usize,
    pub m_prime: CutMatrix,
    pub pieces: Vec<Piece>,
}

fn coeff_vector(f: &Field, p: &NCPoly, len: usize) -> Result<Vector> {
    Vector::new(f, p.coefficient_vector(len)?)
}

/// Splits `M_k(f)` for the polynomial `f` computed by a homogeneous program
/// into a part of rank at most the number of cut vertices plus one summand
/// per `(help, split)` pair that some cut edge contributes to.
pub fn decompose(a: &Abp, k: usize) -> Result<Decomposition> {
    let cut = compute_cut(a, k)?;
    let report = a.homogeneity_report()?;
    let d = report.sink_degree(a).expect("checked by compute_cut");
    let field = a.field();
    let n = a.n();
    let fwd = a.forward_polys(DEFAULT_TERM_LIMIT)?;
    let bwd = a.backward_polys(DEFAULT_TERM_LIMIT)?;

    let mut m_prime = CutMatrix::zeros(field, k, d - k, n)?;
    for &v in &cut.vertices {
        let u = coeff_vector(field, &fwd[v], k)?;
        let w = coeff_vector(field, &bwd[v], d - k)?;
        m_prime.base.add_scaled(1, &Mat::outer(&u, &w)?)?;
    }

    let mut pieces: BTreeMap<(usize, usize), CutMatrix> = BTreeMap::new();
    for &ei in &cut.edges {
        let e = &a.edges()[ei];
        let du = report.vertex_degree[e.from].expect("cut edge lies on a path");
        let dv = report.vertex_degree[e.to].expect("cut edge lies on a path");
        let i = k - du;
        let left = coeff_vector(field, &fwd[e.from], du)?;
        let right = coeff_vector(field, &bwd[e.to], d - dv)?;
        let outer = Mat::outer(&left, &right)?;
        for (h, beta) in e.label.y_terms() {
            let h = h as usize;
            let slot = match pieces.entry((h, i)) {
                std::collections::btree_map::Entry::Occupied(o) => o.into_mut(),
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(CutMatrix::zeros(field, du, d - dv, n)?)
                }
            };
            slot.base.add_scaled(beta, &outer)?;
        }
    }
    let pieces = pieces
        .into_iter()
        .map(|((help, split), factor)| Piece { help, split, factor })
        .collect();
    Ok(Decomposition { k, d, m_prime, pieces })
}

/// The right-hand side `M' + Σ M_i(h) ⊗ M'_{i,h}` of a decomposition.
pub fn reconstruct(dec: &Decomposition, helps: &[NCPoly]) -> Result<CutMatrix> {
    let (k, d) = (dec.k, dec.d);
    if (dec.m_prime.a, dec.m_prime.b) != (k, d - k) {
        return Err(Error::dim("M' has the wrong shape for this cut"));
    }
    let mut sum = dec.m_prime.clone();
    for piece in &dec.pieces {
        let h = helps
            .get(piece.help)
            .ok_or_else(|| Error::dim(format!("piece refers to missing help h{}", piece.help)))?;
        let dh = h.require_degree()?;
        if piece.split > dh || piece.split > k {
            return Err(Error::dim(format!(
                "split {} out of range for a help of degree {dh}",
                piece.split
            )));
        }
        let mi = cut_matrix_of_degree(h, dh, piece.split)?;
        let term = cross_product(&mi, &piece.factor, piece.split, dh - piece.split, k, d)?;
        sum = sum.add(&term)?;
    }
    Ok(sum)
}

/// Checks the decomposition identity entrywise against `M_k(f)`.
pub fn verify_decomposition(
    dec: &Decomposition,
    f: &NCPoly,
    helps: &[NCPoly],
    d: usize,
) -> Result<bool> {
    if d != dec.d {
        return Err(Error::dim(format!("decomposition is for degree {}, not {d}", dec.d)));
    }
    let lhs = cut_matrix_of_degree(f, d, dec.k)?;
    Ok(lhs == reconstruct(dec, helps)?)
}

/// `Σ_{|m| = d/2} m m`, whose middle cut matrix is the identity.
pub fn full_rank_poly(field: &Field, n: usize, d: usize) -> Result<NCPoly> {
    if d < 2 || d % 2 == 1 {
        return Err(Error::invalid(format!("degree must be even and at least 2, got {d}")));
    }
    let half = d / 2;
    let count = num_words(n, half)?;
    if count > DEFAULT_TERM_LIMIT {
        return Err(Error::budget(format!("{count} terms exceed the term limit")));
    }
    let terms = (0..count)
        .map(|i| {
            let m = crate::ncpoly::index_word(i, half, n)?;
            Ok((m.concat(&m), 1))
        })
        .collect::<Result<Vec<(Word, u32)>>>()?;
    NCPoly::from_terms(field, n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abp::LinForm;

    fn gf(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn poly(f: &Field, n: usize, terms: &[(&[u32], u32)]) -> NCPoly {
        NCPoly::from_terms(f, n, terms.iter().map(|(l, c)| (Word::new(l.to_vec()), *c))).unwrap()
    }

    fn chain(f: &Field) -> Abp {
        let mut a = Abp::new(f, 2, vec![], "s", "t").unwrap();
        a.connect("s", "v", LinForm::var(0)).unwrap();
        a.connect("v", "t", LinForm::var(1)).unwrap();
        a
    }

    fn single_help(f: &Field) -> Abp {
        let h = poly(f, 2, &[(&[0, 1], 1)]);
        let mut a = Abp::new(f, 2, vec![h], "s", "t").unwrap();
        a.connect("s", "t", LinForm::help(0)).unwrap();
        a
    }

    #[test]
    fn cut_matrix_examples() {
        let f = gf(2);
        let p = poly(&f, 2, &[(&[0, 1], 1), (&[1, 0], 1)]);
        assert_eq!(cut_matrix(&p, 1).unwrap().base, Mat::from_rows(&f, &[vec![0, 1], vec![1, 0]]));
        let p = poly(&f, 2, &[(&[0, 0], 1), (&[1, 1], 1)]);
        assert_eq!(cut_matrix(&p, 1).unwrap().base, Mat::identity(&f, 2));
        let p = poly(&f, 2, &[(&[0, 1, 0, 1], 1)]);
        let m = cut_matrix(&p, 2).unwrap();
        assert_eq!((m.base.rows(), m.base.cols()), (4, 4));
        assert_eq!(m.base.get(1, 1), 1);
        assert_eq!(m.rank(), 1);
        assert!(cut_matrix(&poly(&f, 2, &[(&[0], 1), (&[0, 1], 1)]), 1).is_err());
        assert!(cut_matrix(&p, 5).is_err());
    }

    #[test]
    fn side_guardrail() {
        let f = gf(2);
        let p = poly(&f, 2, &[(&[0; 26], 1)]);
        assert!(cut_matrix(&p, 13).unwrap_err().is_budget());
    }

    #[test]
    fn cross_product_examples() {
        let f = gf(5);
        let m1 = cut_matrix(&poly(&f, 2, &[(&[0, 1], 3), (&[1, 1], 2)]), 1).unwrap();
        let scalar = CutMatrix::new(Mat::from_rows(&f, &[vec![4]]), 0, 0, 2).unwrap();
        let c = cross_product(&m1, &scalar, 1, 1, 1, 2).unwrap();
        assert_eq!(c.base, m1.base.scale(4));

        let f = gf(2);
        let e1 = elementary(&f, 2, 1, 1, 0, 1).unwrap();
        let e2 = elementary(&f, 2, 1, 1, 1, 1).unwrap();
        let c = cross_product(&e1, &e2, 1, 1, 2, 4).unwrap();
        let want = elementary(&f, 2, 2, 2, 2, 3).unwrap();
        assert_eq!(c, want);

        let z = CutMatrix::zeros(&f, 1, 1, 2).unwrap();
        assert!(cross_product(&z, &e2, 1, 1, 2, 4).unwrap().base.is_zero());
        assert!(cross_product(&e1, &e2, 1, 1, 1, 4).is_err());
    }

    #[test]
    fn elementary_examples() {
        let f = gf(2);
        assert_eq!(elementary(&f, 2, 0, 0, 0, 0).unwrap().base, Mat::identity(&f, 1));
        assert_eq!(
            elementary(&f, 2, 1, 1, 0, 1).unwrap().base,
            Mat::from_rows(&f, &[vec![0, 1], vec![0, 0]])
        );
        assert_eq!(elementary(&f, 3, 2, 1, 7, 2).unwrap().rank(), 1);
        assert!(elementary(&f, 2, 1, 1, 2, 0).is_err());
    }

    #[test]
    fn cut_examples() {
        let f = gf(2);
        let a = chain(&f);
        let v = a.vertex("v").unwrap();
        assert_eq!(compute_cut(&a, 1).unwrap(), CutSet { vertices: vec![v], edges: vec![] });
        assert_eq!(
            compute_cut(&a, 0).unwrap(),
            CutSet { vertices: vec![a.source()], edges: vec![] }
        );
        let b = single_help(&f);
        assert_eq!(compute_cut(&b, 1).unwrap(), CutSet { vertices: vec![], edges: vec![0] });
    }

    #[test]
    fn decompose_examples() {
        let f = gf(2);
        let a = chain(&f);
        let dec = decompose(&a, 1).unwrap();
        assert!(dec.pieces.is_empty());
        assert_eq!(dec.m_prime, cut_matrix(&poly(&f, 2, &[(&[0, 1], 1)]), 1).unwrap());
        assert_eq!(dec.m_prime.rank(), 1);

        let b = single_help(&f);
        let dec = decompose(&b, 1).unwrap();
        assert!(dec.m_prime.base.is_zero());
        assert_eq!(dec.pieces.len(), 1);
        assert_eq!((dec.pieces[0].help, dec.pieces[0].split), (0, 1));
        assert_eq!(dec.pieces[0].factor.base, Mat::identity(&f, 1));
        let fx = b.evaluate().unwrap();
        assert!(verify_decomposition(&dec, &fx, b.helps(), 2).unwrap());

        let dec0 = decompose(&a, 0).unwrap();
        assert!(dec0.pieces.is_empty());
        assert_eq!(dec0.m_prime, cut_matrix(&a.evaluate().unwrap(), 0).unwrap());
    }

    #[test]
    fn verify_rejects_perturbation() {
        let f = gf(3);
        let a = chain(&f);
        let fx = a.evaluate().unwrap();
        let mut dec = decompose(&a, 1).unwrap();
        assert!(verify_decomposition(&dec, &fx, a.helps(), 2).unwrap());
        let old = dec.m_prime.base.get(1, 1);
        dec.m_prime.base.set(1, 1, f.add(old, 1));
        assert!(!verify_decomposition(&dec, &fx, a.helps(), 2).unwrap());
    }

    #[test]
    fn hand_built_decomposition() {
        let f = gf(2);
        let h = poly(&f, 2, &[(&[0, 1], 1)]);
        let dec = Decomposition {
            k: 1,
            d: 2,
            m_prime: CutMatrix::zeros(&f, 1, 1, 2).unwrap(),
            pieces: vec![Piece {
                help: 0,
                split: 1,
                factor: CutMatrix::new(Mat::identity(&f, 1), 0, 0, 2).unwrap(),
            }],
        };
        assert!(verify_decomposition(&dec, &h, std::slice::from_ref(&h), 2).unwrap());
    }

    #[test]
    fn full_rank_examples() {
        let f = gf(2);
        let p = full_rank_poly(&f, 2, 2).unwrap();
        assert_eq!(p, poly(&f, 2, &[(&[0, 0], 1), (&[1, 1], 1)]));
        assert_eq!(cut_matrix(&p, 1).unwrap().base, Mat::identity(&f, 2));
        let p = full_rank_poly(&f, 2, 4).unwrap();
        assert_eq!(p.num_terms(), 4);
        assert_eq!(cut_matrix(&p, 2).unwrap().base, Mat::identity(&f, 4));
        assert_eq!(cut_matrix(&full_rank_poly(&f, 3, 2).unwrap(), 1).unwrap().rank(), 3);
        assert!(full_rank_poly(&f, 2, 3).is_err());
    }
}
