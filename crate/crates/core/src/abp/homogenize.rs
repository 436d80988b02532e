use std::collections::BTreeMap;

use super::{Abp, Edge, LinForm};
use crate::error::{Error, Result};
use crate::ncpoly::{NCPoly, Word};

/// The nonzero parts `h_j^{(i)}` with `i >= 2`, listed by `(j, i)`.
///
/// This is the help set of a homogenized program; entry `k` of the result is
/// the polynomial behind the help symbol `y_k` there.
pub fn split_helps(helps: &[NCPoly]) -> Vec<(usize, usize, NCPoly)> {
    let mut out = Vec::new();
    for (j, h) in helps.iter().enumerate() {
        for i in 2..=h.degree().unwrap_or(0) {
            let part = h.homogeneous_part(i);
            if !part.is_zero() {
                out.push((j, i, part));
            }
        }
    }
    out
}

impl Abp {
    /// A homogeneous program over the split help set computing the same
    /// polynomial, with at most `size * (d + 1)` vertices.
    ///
    /// Vertex `(u, i)` is named `{u}_{i}` and carries the degree-`i` part of
    /// `f_{s,u}`. Edges whose label is a bare field element are eliminated in
    /// two passes, and vertices that end up off every source-to-sink path are
    /// dropped.
    pub fn homogenize(&self, d: usize) -> Result<Abp> {
        if d == 0 {
            return Err(Error::pre("homogenization needs d >= 1"));
        }
        let f = self.evaluate()?;
        if !f.is_homogeneous_of(d) {
            return Err(Error::pre(format!(
                "the program does not compute a homogeneous polynomial of degree {d}"
            )));
        }
        let field = &self.field;
        let parts = split_helps(&self.helps);
        let part_index: BTreeMap<(usize, usize), u32> = parts
            .iter()
            .enumerate()
            .map(|(k, (j, i, _))| ((*j, *i), k as u32))
            .collect();
        let linear: Vec<BTreeMap<u32, u32>> = self
            .helps
            .iter()
            .map(|h| {
                h.homogeneous_part(1)
                    .terms()
                    .map(|(w, c)| (w.letters()[0], c))
                    .collect()
            })
            .collect();

        // Stage 1. Vertex (u, i) gets index i * V + pos(u), where pos is a
        // topological position, so index order is a topological order of the
        // new graph and the edge map iterates in lexicographic edge order.
        let order = self.topological_order()?;
        let nv = self.vertices.len();
        let mut pos = vec![0usize; nv];
        for (k, &u) in order.iter().enumerate() {
            pos[u] = k;
        }
        let idx = |u: usize, i: usize| i * nv + pos[u];
        let total = nv * (d + 1);
        let source = idx(self.source, 0);
        let sink = idx(self.sink, d);

        let mut edges: BTreeMap<(usize, usize), LinForm> = BTreeMap::new();
        for e in &self.edges {
            for j in 0..=d {
                for k in j..=d {
                    let label = self.label_part(&e.label, k - j, &linear, &part_index);
                    if label.is_zero() {
                        continue;
                    }
                    let slot = edges.entry((idx(e.from, j), idx(e.to, k))).or_default();
                    slot.add_scaled(field, 1, &label);
                    if slot.is_zero() {
                        edges.remove(&(idx(e.from, j), idx(e.to, k)));
                    }
                }
            }
        }

        // Stage 2, first pass: constant edges (a, b) with b not the sink.
        let cap = total * total;
        let mut steps = 0usize;
        let mut cursor: Option<(usize, usize)> = None;
        loop {
            let next = match cursor {
                None => edges.iter().find(|(k, l)| k.1 != sink && l.is_constant()),
                Some(c) => edges
                    .range((std::ops::Bound::Excluded(c), std::ops::Bound::Unbounded))
                    .find(|(k, l)| k.1 != sink && l.is_constant()),
            };
            let Some((&(a, b), label)) = next else { break };
            steps += 1;
            if steps > cap {
                return Err(Error::Internal(format!(
                    "constant-edge elimination exceeded {cap} steps"
                )));
            }
            let c = label.constant();
            edges.remove(&(a, b));
            let outs: Vec<(usize, LinForm)> = edges
                .range((b, 0)..(b + 1, 0))
                .map(|(&(_, w), l)| (w, l.clone()))
                .collect();
            for (w, l) in outs {
                let slot = edges.entry((a, w)).or_default();
                slot.add_scaled(field, c, &l);
                if slot.is_zero() {
                    edges.remove(&(a, w));
                }
            }
            cursor = Some((a, b));
        }

        // Second pass: a constant edge (a, sink) is the only way out of a, so
        // a can be bypassed by scaling its in-edges onto the sink.
        let into_sink: Vec<(usize, u32)> = edges
            .iter()
            .filter(|(k, l)| k.1 == sink && l.is_constant())
            .map(|(k, l)| (k.0, l.constant()))
            .collect();
        for (a, c) in into_sink {
            if a == source {
                return Err(Error::Internal("source joined to sink by a constant".into()));
            }
            let ins: Vec<(usize, LinForm)> = edges
                .iter()
                .filter(|(k, _)| k.1 == a)
                .map(|(k, l)| (k.0, l.clone()))
                .collect();
            edges.retain(|k, _| k.0 != a && k.1 != a);
            for (v, l) in ins {
                let slot = edges.entry((v, sink)).or_default();
                slot.add_scaled(field, c, &l);
                if slot.is_zero() {
                    edges.remove(&(v, sink));
                }
            }
        }
        if let Some((k, _)) = edges.iter().find(|(_, l)| l.constant() != 0) {
            return Err(Error::Internal(format!("constant survived on edge {k:?}")));
        }

        // Keep only vertices on a source-to-sink path (plus s and t).
        let mut fwd = vec![false; total];
        let mut bwd = vec![false; total];
        fwd[source] = true;
        bwd[sink] = true;
        for &(a, b) in edges.keys() {
            if fwd[a] {
                fwd[b] = true;
            }
        }
        for &(a, b) in edges.keys().rev() {
            if bwd[b] {
                bwd[a] = true;
            }
        }
        let keep: Vec<bool> = (0..total)
            .map(|v| v == source || v == sink || (fwd[v] && bwd[v]))
            .collect();
        let mut new_index = vec![usize::MAX; total];
        let mut names = Vec::new();
        for i in 0..=d {
            for &u in &order {
                let v = idx(u, i);
                if keep[v] {
                    new_index[v] = names.len();
                    names.push(format!("{}_{}", self.vertices[u], i));
                }
            }
        }
        let new_edges = edges
            .into_iter()
            .filter(|((a, b), _)| keep[*a] && keep[*b])
            .map(|((a, b), label)| Edge {
                from: new_index[a],
                to: new_index[b],
                label,
            })
            .collect();
        Abp::from_parts(
            field,
            self.n,
            parts.into_iter().map(|(_, _, h)| h).collect(),
            names,
            new_edges,
            new_index[source],
            new_index[sink],
        )
    }

    /// `L(e)_i`: the part of the edge polynomial of degree exactly `i`,
    /// written over the split help set.
    fn label_part(
        &self,
        label: &LinForm,
        i: usize,
        linear: &[BTreeMap<u32, u32>],
        part_index: &BTreeMap<(usize, usize), u32>,
    ) -> LinForm {
        let field = &self.field;
        let mut out = LinForm::zero();
        match i {
            0 => {
                for (j, b) in label.y_terms() {
                    let c = self.helps[j as usize].coefficient(&Word::empty());
                    out.add_constant(field, field.mul(b, c));
                }
                out.add_constant(field, label.constant());
            }
            1 => {
                for (x, a) in label.x_terms() {
                    out.add_x(field, x, a);
                }
                for (j, b) in label.y_terms() {
                    for (&x, &c) in &linear[j as usize] {
                        out.add_x(field, x, field.mul(b, c));
                    }
                }
            }
            _ => {
                for (j, b) in label.y_terms() {
                    if let Some(&k) = part_index.get(&(j as usize, i)) {
                        out.add_y(field, k, b);
                    }
                }
            }
        }
        out
    }
}
