//! Test-side oracles and random instance generators. Nothing here calls the
//! library's arithmetic; results are computed from scratch on plain vectors
//! and maps so they can be compared against it.

#![allow(dead_code)]

use std::collections::BTreeMap;

use helpabp::abp::{Abp, Edge, LinForm};
use helpabp::linalg::{Field, Mat};
use helpabp::ncpoly::{NCPoly, Word};
use rand::Rng;

/// Word (as letters) to coefficient, zero coefficients absent.
pub type Poly = BTreeMap<Vec<u32>, u32>;

pub fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Rank over GF(p) by plain Gaussian elimination on a copy.
pub fn rank_mod(rows: &[Vec<u32>], p: u32) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    let p = p as u64;
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| !m[i][c].is_multiple_of(p)) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c] as u32, p as u32) as u64;
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c];
                let pivot = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn mat_rows(m: &Mat) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// `min over all coefficient vectors c of rank(point - Σ c_i span_i)`.
pub fn brute_distance(point: &[Vec<u32>], span: &[Vec<Vec<u32>>], p: u32) -> usize {
    let k = span.len();
    let total = (p as u64).pow(k as u32);
    let mut best = usize::MAX;
    for code in 0..total {
        let mut c = code;
        let mut m: Vec<Vec<u32>> = point.to_vec();
        for s in span {
            let a = (c % p as u64) as u32;
            c /= p as u64;
            for (row, srow) in m.iter_mut().zip(s) {
                for (x, y) in row.iter_mut().zip(srow) {
                    *x = ((*x as u64 + (p - a) as u64 * *y as u64) % p as u64) as u32;
                }
            }
        }
        best = best.min(rank_mod(&m, p));
    }
    best
}

pub fn poly_map(f: &NCPoly) -> Poly {
    f.terms().map(|(w, c)| (w.letters().to_vec(), c)).collect()
}

fn add_into(acc: &mut Poly, w: Vec<u32>, c: u32, p: u32) {
    let e = acc.entry(w.clone()).or_insert(0);
    *e = (*e + c) % p;
    if *e == 0 {
        acc.remove(&w);
    }
}

pub fn poly_mul(a: &Poly, b: &Poly, p: u32) -> Poly {
    let mut out = Poly::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            add_into(&mut out, w, (*ca as u64 * *cb as u64 % p as u64) as u32, p);
        }
    }
    out
}

fn label_poly(label: &LinForm, helps: &[Poly], p: u32) -> Poly {
    let mut out = Poly::new();
    if label.constant() != 0 {
        add_into(&mut out, vec![], label.constant(), p);
    }
    for (i, c) in label.x_terms() {
        add_into(&mut out, vec![i], c, p);
    }
    for (j, c) in label.y_terms() {
        for (w, hc) in &helps[j as usize] {
            add_into(&mut out, w.clone(), (c as u64 * *hc as u64 % p as u64) as u32, p);
        }
    }
    out
}

/// Sum over source-to-sink paths of the ordered label products, by a
/// forward sweep in a Kahn order computed here.
pub fn abp_oracle(a: &Abp) -> Poly {
    let p = a.field().p();
    let helps: Vec<Poly> = a.helps().iter().map(poly_map).collect();
    let nv = a.size();
    let mut indeg = vec![0usize; nv];
    for e in a.edges() {
        indeg[e.to] += 1;
    }
    let mut queue: Vec<usize> = (0..nv).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::new();
    while let Some(v) = queue.pop() {
        order.push(v);
        for e in a.edges().iter().filter(|e| e.from == v) {
            indeg[e.to] -= 1;
            if indeg[e.to] == 0 {
                queue.push(e.to);
            }
        }
    }
    assert_eq!(order.len(), nv, "oracle needs an acyclic program");
    let mut g: Vec<Poly> = vec![Poly::new(); nv];
    g[a.source()].insert(vec![], 1);
    for &u in &order {
        if g[u].is_empty() {
            continue;
        }
        for e in a.edges().iter().filter(|e| e.from == u) {
            let prod = poly_mul(&g[u], &label_poly(&e.label, &helps, p), p);
            let target = std::mem::take(&mut g[e.to]);
            let mut merged = target;
            for (w, c) in prod {
                add_into(&mut merged, w, c, p);
            }
            g[e.to] = merged;
        }
    }
    g.swap_remove(a.sink())
}

/// Big-endian index of a word over `n` letters.
pub fn word_index(w: &[u32], n: usize) -> usize {
    w.iter().fold(0, |acc, &l| acc * n + l as usize)
}

/// `M_k` of a polynomial homogeneous of degree `d`, as rows.
pub fn cut_oracle(f: &Poly, n: usize, k: usize, d: usize) -> Vec<Vec<u32>> {
    let mut m = vec![vec![0u32; n.pow((d - k) as u32)]; n.pow(k as u32)];
    for (w, c) in f {
        assert_eq!(w.len(), d);
        m[word_index(&w[..k], n)][word_index(&w[k..], n)] = *c;
    }
    m
}

pub fn random_poly(rng: &mut impl Rng, f: &Field, n: usize, degrees: &[usize], terms: usize) -> NCPoly {
    loop {
        let mut t = Vec::new();
        for _ in 0..terms {
            let e = degrees[rng.gen_range(0..degrees.len())];
            let w: Vec<u32> = (0..e).map(|_| rng.gen_range(0..n as u32)).collect();
            t.push((Word::new(w), rng.gen_range(1..f.p())));
        }
        let p = NCPoly::from_terms(f, n, t).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_label(rng: &mut impl Rng, f: &Field, n: usize, m: usize) -> LinForm {
    loop {
        let mut l = LinForm::zero();
        for _ in 0..rng.gen_range(1..=2) {
            l.add_x(f, rng.gen_range(0..n as u32), rng.gen_range(1..f.p()));
        }
        if m > 0 && rng.gen_bool(0.35) {
            l.add_y(f, rng.gen_range(0..m as u32), rng.gen_range(1..f.p()));
        }
        if !l.is_zero() {
            return l;
        }
    }
}

/// A program with at most 8 vertices, `n <= 3`, at most 2 helps, computing a
/// nonzero homogeneous polynomial of degree `d <= 4`.
///
/// A random DAG may compute an inhomogeneous `f`; then `h = f - f^{(d)}` is
/// appended as a help and an edge `s -> t` labeled `-y_h` cancels it.
pub struct Sample {
    pub abp: Abp,
    pub d: usize,
}

pub fn random_homogeneous_output_abp(rng: &mut impl Rng, p: u64) -> Sample {
    let f = Field::new(p).unwrap();
    loop {
        let n = rng.gen_range(1..=3);
        let nv = rng.gen_range(2..=8);
        let m0 = rng.gen_range(0..=1);
        let mut helps: Vec<NCPoly> = (0..m0)
            .map(|_| {
                let e = rng.gen_range(1..=3);
                let degrees: Vec<usize> = (0..=e).collect();
                random_poly(rng, &f, n, &degrees, 3)
            })
            .collect();
        let mut names = vec!["s".to_string()];
        names.extend((1..nv - 1).map(|i| format!("v{i}")));
        names.push("t".to_string());
        let mut edges = Vec::new();
        for a in 0..nv {
            for b in a + 1..nv {
                if rng.gen_bool(0.45) {
                    edges.push(Edge {
                        from: a,
                        to: b,
                        label: random_label(rng, &f, n, m0),
                    });
                }
            }
        }
        let abp = Abp::from_parts(&f, n, helps.clone(), names.clone(), edges.clone(), 0, nv - 1).unwrap();
        let g = abp.evaluate().unwrap();
        let Some(d) = g.degree() else { continue };
        if d == 0 || d > 4 {
            continue;
        }
        if g.is_homogeneous_of(d) {
            return Sample { abp, d };
        }
        let top = g.homogeneous_part(d);
        helps.push(g.sub(&top).unwrap());
        edges.push(Edge {
            from: 0,
            to: nv - 1,
            label: LinForm::from_parts(&f, [], [(m0 as u32, -1)], 0),
        });
        let abp = Abp::from_parts(&f, n, helps, names, edges, 0, nv - 1).unwrap();
        assert_eq!(abp.evaluate().unwrap(), top);
        return Sample { abp, d };
    }
}

/// A homogeneous program over `helps` (homogeneous, degrees at least 1):
/// vertices sit on levels `0..=d`, x-edges go up one level and a help edge
/// goes up by the help's degree.
pub fn random_layered_abp(rng: &mut impl Rng, f: &Field, n: usize, helps: &[NCPoly], d: usize, extra: usize) -> Abp {
    let mut names = vec!["s".to_string()];
    let mut level = vec![0usize];
    if d >= 2 {
        for i in 0..extra {
            names.push(format!("v{i}"));
            level.push(rng.gen_range(1..d));
        }
    }
    names.push("t".to_string());
    level.push(d);
    let nv = names.len();
    let mut edges = Vec::new();
    for a in 0..nv {
        for b in 0..nv {
            if a == b || level[b] <= level[a] || a == nv - 1 || b == 0 {
                continue;
            }
            let gap = level[b] - level[a];
            let mut label = LinForm::zero();
            if gap == 1 && rng.gen_bool(0.6) {
                label.add_x(f, rng.gen_range(0..n as u32), rng.gen_range(1..f.p()));
            }
            for (j, h) in helps.iter().enumerate() {
                if h.degree() == Some(gap) && rng.gen_bool(0.5) {
                    label.add_y(f, j as u32, rng.gen_range(1..f.p()));
                }
            }
            if !label.is_zero() {
                edges.push(Edge { from: a, to: b, label });
            }
        }
    }
    Abp::from_parts(f, n, helps.to_vec(), names, edges, 0, nv - 1).unwrap()
}
