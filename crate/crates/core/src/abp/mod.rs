//! Algebraic branching programs whose edge labels may mention help
//! polynomials.
//!
//! An [`Abp`] is a DAG with a designated source and sink. Each edge carries a
//! [`LinForm`] over the variables `x_i` and help symbols `y_j`; substituting
//! `h_j` for `y_j` gives the edge polynomial, and the program computes the sum
//! over source-to-sink paths of the ordered product of edge polynomials.

mod homogenize;
mod linform;

use std::collections::BTreeSet;
use std::fmt;

pub use homogenize::split_helps;
pub use linform::LinForm;

use crate::error::{Error, Result};
use crate::linalg::Field;
use crate::ncpoly::{NCPoly, DEFAULT_TERM_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: LinForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abp {
    field: Field,
    n: usize,
    helps: Vec<NCPoly>,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    source: usize,
    sink: usize,
}

/// A broken structural invariant, as reported by [`Abp::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Cycle { vertices: Vec<String> },
    SourceIsSink,
    SourceHasInEdge { edge: usize },
    SinkHasOutEdge { edge: usize },
    UndefinedHelp { edge: usize, help: u32 },
    VariableOutOfRange { edge: usize, var: u32 },
    ConstantInLabel { edge: usize },
    IncompatibleHelp { help: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle { vertices } => write!(f, "cycle through {}", vertices.join(" -> ")),
            Violation::SourceIsSink => write!(f, "source and sink coincide"),
            Violation::SourceHasInEdge { edge } => write!(f, "edge #{edge} enters the source"),
            Violation::SinkHasOutEdge { edge } => write!(f, "edge #{edge} leaves the sink"),
            Violation::UndefinedHelp { edge, help } => {
                write!(f, "edge #{edge} uses undefined help symbol y{help}")
            }
            Violation::VariableOutOfRange { edge, var } => {
                write!(f, "edge #{edge} uses variable x{var} outside the declared range")
            }
            Violation::ConstantInLabel { edge } => {
                write!(f, "edge #{edge} has a bare constant in its label")
            }
            Violation::IncompatibleHelp { help } => {
                write!(f, "help polynomial h{help} has a different field or variable count")
            }
        }
    }
}

/// Why an ABP failed the homogeneity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Offense {
    /// The edge mixes polynomials of different degrees (or uses the zero help).
    MixedLabel { edge: usize },
    /// Two paths reach `vertex` with different total degrees.
    PathDegree {
        vertex: usize,
        first: usize,
        second: usize,
        edge: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub is_homogeneous: bool,
    /// Path degree of every vertex lying on some source-to-sink path.
    pub vertex_degree: Vec<Option<usize>>,
    /// `d(e)` for edges on some source-to-sink path, when well defined.
    pub edge_degree: Vec<Option<usize>>,
    pub offending: Option<Offense>,
}

impl HomogeneityReport {
    pub fn sink_degree(&self, abp: &Abp) -> Option<usize> {
        self.vertex_degree[abp.sink]
    }
}

/// Vertices and edges lying on at least one source-to-sink path.
#[derive(Clone, Debug)]
pub(crate) struct Trim {
    pub vertices: Vec<bool>,
    pub edges: Vec<bool>,
}

impl Abp {
    /// An ABP with just a source and a sink and no edges.
    pub fn new(
        field: &Field,
        n: usize,
        helps: Vec<NCPoly>,
        source: &str,
        sink: &str,
    ) -> Result<Abp> {
        let mut a = Abp {
            field: field.clone(),
            n,
            helps,
            vertices: Vec::new(),
            edges: Vec::new(),
            source: 0,
            sink: 0,
        };
        a.source = a.add_vertex(source)?;
        a.sink = if sink == source { a.source } else { a.add_vertex(sink)? };
        Ok(a)
    }

    /// Assembles an ABP from raw parts. Only index ranges and vertex-name
    /// uniqueness are checked here; see [`Abp::validate`] for the rest.
    pub fn from_parts(
        field: &Field,
        n: usize,
        helps: Vec<NCPoly>,
        vertices: Vec<String>,
        edges: Vec<Edge>,
        source: usize,
        sink: usize,
    ) -> Result<Abp> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            check_identifier(v)?;
            if !seen.insert(v.as_str()) {
                return Err(Error::invalid(format!("duplicate vertex {v}")));
            }
        }
        let nv = vertices.len();
        if source >= nv || sink >= nv {
            return Err(Error::invalid("source or sink index out of range"));
        }
        for e in &edges {
            if e.from >= nv || e.to >= nv {
                return Err(Error::invalid("edge endpoint out of range"));
            }
        }
        Ok(Abp {
            field: field.clone(),
            n,
            helps,
            vertices,
            edges,
            source,
            sink,
        })
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize> {
        check_identifier(name)?;
        if self.vertex(name).is_some() {
            return Err(Error::invalid(format!("duplicate vertex {name}")));
        }
        self.vertices.push(name.to_string());
        Ok(self.vertices.len() - 1)
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: LinForm) -> Result<usize> {
        if from >= self.vertices.len() || to >= self.vertices.len() {
            return Err(Error::invalid("edge endpoint out of range"));
        }
        self.edges.push(Edge { from, to, label });
        Ok(self.edges.len() - 1)
    }

    /// Convenience for building by vertex name; unknown names are created.
    pub fn connect(&mut self, from: &str, to: &str, label: LinForm) -> Result<usize> {
        let u = match self.vertex(from) {
            Some(u) => u,
            None => self.add_vertex(from)?,
        };
        let v = match self.vertex(to) {
            Some(v) => v,
            None => self.add_vertex(to)?,
        };
        self.add_edge(u, v, label)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn helps(&self) -> &[NCPoly] {
        &self.helps
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// Number of vertices.
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (j, h) in self.helps.iter().enumerate() {
            if h.field() != &self.field || h.n() != self.n {
                out.push(Violation::IncompatibleHelp { help: j });
            }
        }
        if self.source == self.sink {
            out.push(Violation::SourceIsSink);
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.to == self.source {
                out.push(Violation::SourceHasInEdge { edge: k });
            }
            if e.from == self.sink {
                out.push(Violation::SinkHasOutEdge { edge: k });
            }
            for (i, _) in e.label.x_terms() {
                if i as usize >= self.n {
                    out.push(Violation::VariableOutOfRange { edge: k, var: i });
                }
            }
            for (j, _) in e.label.y_terms() {
                if j as usize >= self.helps.len() {
                    out.push(Violation::UndefinedHelp { edge: k, help: j });
                }
            }
            if e.label.constant() != 0 {
                out.push(Violation::ConstantInLabel { edge: k });
            }
        }
        if let Some(cycle) = self.find_cycle() {
            out.push(Violation::Cycle {
                vertices: cycle.into_iter().map(|v| self.vertices[v].clone()).collect(),
            });
        }
        out
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
            Err(Error::pre(format!("invalid ABP: {}", msgs.join("; "))))
        }
    }

    fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.from].push(k);
        }
        adj
    }

    fn find_cycle(&self) -> Option<Vec<usize>> {
        let adj = self.out_adjacency();
        let nv = self.vertices.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; nv];
        let mut parent = vec![usize::MAX; nv];
        for root in 0..nv {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                if *next < adj[u].len() {
                    let v = self.edges[adj[u][*next]].to;
                    *next += 1;
                    match state[v] {
                        0 => {
                            state[v] = 1;
                            parent[v] = u;
                            stack.push((v, 0));
                        }
                        1 => {
                            // parent chain runs u -> ... -> v; flip it to v -> ... -> u -> v
                            let mut back = Vec::new();
                            let mut w = u;
                            while w != v {
                                back.push(w);
                                w = parent[w];
                            }
                            let mut cycle = vec![v];
                            cycle.extend(back.into_iter().rev());
                            cycle.push(v);
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[u] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Kahn's algorithm with smallest-index tie-breaking. Errors on cycles.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let nv = self.vertices.len();
        let mut indeg = vec![0usize; nv];
        for e in &self.edges {
            indeg[e.to] += 1;
        }
        let adj = self.out_adjacency();
        let mut ready: BTreeSet<usize> = (0..nv).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(nv);
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for &k in &adj[u] {
                let v = self.edges[k].to;
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.insert(v);
                }
            }
        }
        if order.len() != nv {
            return Err(Error::pre("the graph has a cycle"));
        }
        Ok(order)
    }

    /// `L'(e)`: the label with each `y_j` replaced by `h_j`.
    pub fn edge_polynomial(&self, edge: usize) -> Result<NCPoly> {
        let l = &self.edges[edge].label;
        let f = &self.field;
        let mut terms = Vec::new();
        for (i, c) in l.x_terms() {
            terms.push((crate::ncpoly::Word::new(vec![i]), c));
        }
        let mut p = NCPoly::from_terms(f, self.n, terms)?;
        for (j, c) in l.y_terms() {
            let h = self
                .helps
                .get(j as usize)
                .ok_or_else(|| Error::pre(format!("undefined help symbol y{j}")))?;
            p = p.add(&h.scale(c))?;
        }
        p.add(&NCPoly::constant(f, self.n, l.constant()))
    }

    /// `f_{s,v}` for every vertex `v`, by forward dynamic programming.
    pub(crate) fn forward_polys(&self, max_terms: usize) -> Result<Vec<NCPoly>> {
        let order = self.topological_order()?;
        let labels: Vec<NCPoly> = (0..self.edges.len())
            .map(|k| self.edge_polynomial(k))
            .collect::<Result<_>>()?;
        let mut incoming = vec![Vec::new(); self.vertices.len()];
        for (k, e) in self.edges.iter().enumerate() {
            incoming[e.to].push(k);
        }
        let mut g = vec![NCPoly::zero(&self.field, self.n); self.vertices.len()];
        g[self.source] = NCPoly::one(&self.field, self.n);
        for &v in &order {
            if v == self.source {
                continue;
            }
            let mut acc = NCPoly::zero(&self.field, self.n);
            for &k in &incoming[v] {
                let u = self.edges[k].from;
                if g[u].is_zero() {
                    continue;
                }
                acc = acc.add(&g[u].mul_limited(&labels[k], max_terms)?)?;
                if acc.num_terms() > max_terms {
                    return Err(Error::budget(format!("evaluation exceeds {max_terms} terms")));
                }
            }
            g[v] = acc;
        }
        Ok(g)
    }

    /// `f_{v,t}` for every vertex `v`, by backward dynamic programming.
    pub(crate) fn backward_polys(&self, max_terms: usize) -> Result<Vec<NCPoly>> {
        let order = self.topological_order()?;
        let labels: Vec<NCPoly> = (0..self.edges.len())
            .map(|k| self.edge_polynomial(k))
            .collect::<Result<_>>()?;
        let adj = self.out_adjacency();
        let mut g = vec![NCPoly::zero(&self.field, self.n); self.vertices.len()];
        g[self.sink] = NCPoly::one(&self.field, self.n);
        for &u in order.iter().rev() {
            if u == self.sink {
                continue;
            }
            let mut acc = NCPoly::zero(&self.field, self.n);
            for &k in &adj[u] {
                let v = self.edges[k].to;
                if g[v].is_zero() {
                    continue;
                }
                acc = acc.add(&labels[k].mul_limited(&g[v], max_terms)?)?;
                if acc.num_terms() > max_terms {
                    return Err(Error::budget(format!("evaluation exceeds {max_terms} terms")));
                }
            }
            g[u] = acc;
        }
        Ok(g)
    }

    /// The polynomial computed by the program, `f_{s,t}`.
    pub fn evaluate(&self) -> Result<NCPoly> {
        self.evaluate_limited(DEFAULT_TERM_LIMIT)
    }

    pub fn evaluate_limited(&self, max_terms: usize) -> Result<NCPoly> {
        self.ensure_valid()?;
        let mut g = self.forward_polys(max_terms)?;
        Ok(g.swap_remove(self.sink))
    }

    pub(crate) fn trim(&self) -> Trim {
        let nv = self.vertices.len();
        let mut fwd = vec![false; nv];
        let mut bwd = vec![false; nv];
        fwd[self.source] = true;
        bwd[self.sink] = true;
        // Fixed-point sweeps; the graph is small and may be unordered.
        let mut changed = true;
        while changed {
            changed = false;
            for e in &self.edges {
                if fwd[e.from] && !fwd[e.to] {
                    fwd[e.to] = true;
                    changed = true;
                }
                if bwd[e.to] && !bwd[e.from] {
                    bwd[e.from] = true;
                    changed = true;
                }
            }
        }
        let vertices: Vec<bool> = (0..nv).map(|v| fwd[v] && bwd[v]).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| vertices[e.from] && vertices[e.to])
            .collect();
        Trim { vertices, edges }
    }

    /// `d(e)` if the edge is homogeneously labeled; an empty label has degree 0.
    pub fn edge_degree(&self, edge: usize) -> Option<usize> {
        let l = &self.edges[edge].label;
        let mut deg: Option<usize> = None;
        let mut merge = |d: usize| -> bool {
            match deg {
                None => {
                    deg = Some(d);
                    true
                }
                Some(x) => x == d,
            }
        };
        if l.constant() != 0 && !merge(0) {
            return None;
        }
        if l.x_terms().next().is_some() && !merge(1) {
            return None;
        }
        for (j, _) in l.y_terms() {
            let h = self.helps.get(j as usize)?;
            if !h.is_homogeneous() || !merge(h.degree()?) {
                return None;
            }
        }
        Some(deg.unwrap_or(0))
    }

    /// Checks homogeneous labeling and path-degree consistency on the part of
    /// the program that lies on source-to-sink paths.
    pub fn homogeneity_report(&self) -> Result<HomogeneityReport> {
        self.ensure_valid()?;
        let trim = self.trim();
        let nv = self.vertices.len();
        let mut edge_degree = vec![None; self.edges.len()];
        let mut vertex_degree = vec![None; nv];
        let report = |offense: Option<Offense>, vd, ed| HomogeneityReport {
            is_homogeneous: offense.is_none(),
            vertex_degree: vd,
            edge_degree: ed,
            offending: offense,
        };
        for k in (0..self.edges.len()).filter(|&k| trim.edges[k]) {
            match self.edge_degree(k) {
                Some(d) => edge_degree[k] = Some(d),
                None => {
                    return Ok(report(
                        Some(Offense::MixedLabel { edge: k }),
                        vertex_degree,
                        edge_degree,
                    ))
                }
            }
        }
        if trim.vertices[self.source] {
            vertex_degree[self.source] = Some(0);
        }
        let mut incoming = vec![Vec::new(); nv];
        for (k, e) in self.edges.iter().enumerate() {
            if trim.edges[k] {
                incoming[e.to].push(k);
            }
        }
        for v in self.topological_order()? {
            if !trim.vertices[v] || v == self.source {
                continue;
            }
            for &k in &incoming[v] {
                let u = self.edges[k].from;
                let cand = vertex_degree[u].expect("trimmed predecessor has a degree")
                    + edge_degree[k].expect("trimmed edge has a degree");
                match vertex_degree[v] {
                    None => vertex_degree[v] = Some(cand),
                    Some(prev) if prev != cand => {
                        let offense = Offense::PathDegree {
                            vertex: v,
                            first: prev,
                            second: cand,
                            edge: k,
                        };
                        return Ok(report(Some(offense), vertex_degree, edge_degree));
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(report(None, vertex_degree, edge_degree))
    }

    pub(crate) fn require_homogeneous(&self) -> Result<HomogeneityReport> {
        let r = self.homogeneity_report()?;
        match &r.offending {
            None => Ok(r),
            Some(Offense::MixedLabel { edge }) => Err(Error::pre(format!(
                "ABP is not homogeneous: edge #{edge} is not homogeneously labeled"
            ))),
            Some(Offense::PathDegree { vertex, first, second, .. }) => Err(Error::pre(format!(
                "ABP is not homogeneous: vertex {} is reached with path degrees {first} and {second}",
                self.vertices[*vertex]
            ))),
        }
    }

    /// Drops every edge of degree greater than `d`.
    ///
    /// Every edge on a source-to-sink path must be homogeneously labeled.
    /// Path-degree consistency is not required: parallel branches of different
    /// degrees are allowed, and pruning is what removes the high ones.
    pub fn prune_high_degree(&self, d: usize) -> Result<Abp> {
        self.ensure_valid()?;
        let trim = self.trim();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            match self.edge_degree(k) {
                Some(x) if x > d => {}
                Some(_) => edges.push(e.clone()),
                None if trim.edges[k] => {
                    return Err(Error::pre(format!(
                        "edge #{k} is not homogeneously labeled"
                    )))
                }
                None => edges.push(e.clone()),
            }
        }
        Ok(Abp {
            edges,
            ..self.clone()
        })
    }
}

pub(crate) fn check_identifier(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name:?} is not an ASCII identifier")))
    }
}
