//! Line-oriented text formats for matrices, polynomials, programs, help sets
//! and certificates.
//!
//! Every file starts with `<kind> 1` and ends with `end`. Serialization is
//! canonical: LF line endings, single spaces, no trailing whitespace, so
//! writing a parsed canonical file reproduces it byte for byte.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::abp::{Abp, Edge, LinForm};
use crate::cutmatrix::CutMatrix;
use crate::error::{Error, Result};
use crate::hardgen::{Certificate, Preprocess};
use crate::linalg::{Field, Mat};
use crate::ncpoly::{NCPoly, Word};

/// One input line split into whitespace-separated tokens with 1-based columns.
struct Line<'a> {
    no: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn err(&self, col: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.no,
            col,
            msg: msg.into(),
        }
    }

    fn keyword(&self) -> &'a str {
        self.tokens.first().map(|t| t.1).unwrap_or("")
    }

    fn expect(&self, kw: &str, args: usize) -> Result<()> {
        if self.keyword() != kw {
            return Err(self.err(1, format!("expected `{kw}`, found `{}`", self.keyword())));
        }
        if self.tokens.len() != args + 1 {
            let col = self.tokens.get(args + 1).map_or(1, |t| t.0);
            return Err(self.err(
                col,
                format!("`{kw}` takes {args} argument(s), found {}", self.tokens.len() - 1),
            ));
        }
        Ok(())
    }

    fn arg(&self, i: usize) -> Result<(usize, &'a str)> {
        self.tokens
            .get(i + 1)
            .copied()
            .ok_or_else(|| self.err(1, format!("`{}` is missing argument {}", self.keyword(), i + 1)))
    }

    fn usize_arg(&self, i: usize) -> Result<usize> {
        let (col, tok) = self.arg(i)?;
        parse_usize(tok).ok_or_else(|| self.err(col, format!("expected a natural number, found `{tok}`")))
    }
}

fn parse_usize(tok: &str) -> Option<usize> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    tok.parse().ok()
}

struct Cursor<'a> {
    lines: Vec<&'a str>,
    next: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        let mut lines: Vec<&str> = text.split('\n').collect();
        if lines.last() == Some(&"") {
            lines.pop();
        }
        Cursor { lines, next: 0 }
    }

    fn eof_error(&self, what: &str) -> Error {
        Error::Parse {
            line: self.lines.len() + 1,
            col: 1,
            msg: format!("unexpected end of input, expected {what}"),
        }
    }

    fn peek(&self) -> Option<Line<'a>> {
        let raw = *self.lines.get(self.next)?;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in raw.char_indices() {
            if ch.is_ascii_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push((s + 1, &raw[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            tokens.push((s + 1, &raw[s..]));
        }
        Some(Line {
            no: self.next + 1,
            tokens,
        })
    }

    fn line(&mut self, what: &str) -> Result<Line<'a>> {
        loop {
            let l = self.peek().ok_or_else(|| self.eof_error(what))?;
            self.next += 1;
            if !l.tokens.is_empty() {
                return Ok(l);
            }
        }
    }

    fn peek_keyword(&mut self) -> Option<&'a str> {
        while let Some(l) = self.peek() {
            if l.tokens.is_empty() {
                self.next += 1;
                continue;
            }
            return Some(l.keyword());
        }
        None
    }

    fn header(&mut self, kind: &str) -> Result<()> {
        let l = self.line(&format!("`{kind} 1`"))?;
        if l.keyword() != kind {
            return Err(l.err(1, format!("expected a `{kind}` file, found `{}`", l.keyword())));
        }
        let (col, v) = l.arg(0)?;
        if v != "1" {
            return Err(l.err(col, format!("unsupported {kind} format version `{v}`")));
        }
        l.expect(kind, 1)
    }

    fn kv(&mut self, key: &str) -> Result<(Line<'a>, usize)> {
        let l = self.line(&format!("`{key}`"))?;
        l.expect(key, 1)?;
        let v = l.usize_arg(0)?;
        Ok((l, v))
    }

    fn field(&mut self) -> Result<Field> {
        let (l, p) = self.kv("field")?;
        Field::new(p as u64).map_err(|e| l.err(7, e.to_string()))
    }

    fn finish(&mut self) -> Result<()> {
        let l = self.line("`end`")?;
        l.expect("end", 0)?;
        if let Some(kw) = self.peek_keyword() {
            let l = self.peek().expect("peeked");
            return Err(l.err(1, format!("unexpected `{kw}` after `end`")));
        }
        Ok(())
    }
}

fn residue(l: &Line, col: usize, tok: &str, field: &Field) -> Result<u32> {
    let v = parse_usize(tok).ok_or_else(|| l.err(col, format!("expected a field element, found `{tok}`")))?;
    if v >= field.p() as usize {
        return Err(l.err(col, format!("{v} is not a residue mod {}", field.p())));
    }
    Ok(v as u32)
}

fn coefficient(l: &Line, col: usize, tok: &str, field: &Field) -> Result<u32> {
    let v: i64 = tok
        .parse()
        .map_err(|_| l.err(col, format!("expected an integer coefficient, found `{tok}`")))?;
    Ok(field.elem(v))
}

// ---------------------------------------------------------------- matrices

fn read_mat_body(c: &mut Cursor, cut: bool) -> Result<(Mat, Option<(usize, usize)>)> {
    c.header("mat")?;
    let field = c.field()?;
    let (_, rows) = c.kv("rows")?;
    let (_, cols) = c.kv("cols")?;
    let lens = if cut {
        let (_, a) = c.kv("rowlen")?;
        let (_, b) = c.kv("collen")?;
        Some((a, b))
    } else {
        None
    };
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..if cols == 0 { 0 } else { rows } {
        let l = c.line(&format!("matrix row {}", i + 1))?;
        if l.tokens.len() != cols {
            return Err(l.err(1, format!("row has {} entries, expected {cols}", l.tokens.len())));
        }
        for &(col, tok) in &l.tokens {
            data.push(residue(&l, col, tok, &field)?);
        }
    }
    let l = c.line("`end`")?;
    l.expect("end", 0)?;
    Ok((Mat::new(&field, rows, cols, data)?, lens))
}

pub fn parse_mat(text: &str) -> Result<Mat> {
    let mut c = Cursor::new(text);
    let (m, _) = read_mat_body(&mut c, false)?;
    if let Some(kw) = c.peek_keyword() {
        let l = c.peek().expect("peeked");
        return Err(l.err(1, format!("unexpected `{kw}` after `end`")));
    }
    Ok(m)
}

fn write_mat_body(out: &mut String, m: &Mat, lens: Option<(usize, usize)>) {
    let _ = writeln!(out, "mat 1");
    let _ = writeln!(out, "field {}", m.field().p());
    let _ = writeln!(out, "rows {}", m.rows());
    let _ = writeln!(out, "cols {}", m.cols());
    if let Some((a, b)) = lens {
        let _ = writeln!(out, "rowlen {a}");
        let _ = writeln!(out, "collen {b}");
    }
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let _ = writeln!(out, "end");
}

pub fn write_mat(m: &Mat) -> String {
    let mut s = String::new();
    write_mat_body(&mut s, m, None);
    s
}

fn integer_root(x: usize, k: usize) -> Option<usize> {
    (1..=x).find(|&n| n.checked_pow(k as u32) == Some(x))
}

/// Parses a cut matrix. The variable count is recovered from the shape; for
/// a `1 x 1` matrix with `rowlen 0` and `collen 0` it must be supplied.
pub fn parse_cutmatrix(text: &str, vars: Option<usize>) -> Result<CutMatrix> {
    let mut c = Cursor::new(text);
    let (m, lens) = read_mat_body(&mut c, true)?;
    let (a, b) = lens.expect("cut header present");
    let n = match (a, b, vars) {
        (_, _, Some(n)) => Some(n),
        (0, 0, None) => None,
        (0, b, None) => integer_root(m.cols(), b),
        (a, _, None) => integer_root(m.rows(), a),
    }
    .ok_or_else(|| Error::Parse {
        line: 5,
        col: 1,
        msg: "cannot determine the variable count from rowlen/collen".into(),
    })?;
    CutMatrix::new(m, a, b, n)
}

pub fn write_cutmatrix(m: &CutMatrix) -> String {
    let mut s = String::new();
    write_mat_body(&mut s, &m.base, Some((m.a, m.b)));
    s
}

// ------------------------------------------------------------- polynomials

fn parse_word(l: &Line, col: usize, tok: &str, n: usize) -> Result<Word> {
    if tok == "e" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    let mut offset = 0;
    for part in tok.split('.') {
        let idx = part
            .strip_prefix('x')
            .and_then(parse_usize)
            .ok_or_else(|| l.err(col + offset, format!("bad variable `{part}` in word")))?;
        if idx >= n {
            return Err(l.err(col + offset, format!("variable x{idx} out of range for {n} variables")));
        }
        letters.push(idx as u32);
        offset += part.len() + 1;
    }
    Ok(Word::new(letters))
}

/// Reads `term` lines until `stop` and builds the polynomial.
fn read_terms(c: &mut Cursor, field: &Field, n: usize, stop: &str) -> Result<NCPoly> {
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    loop {
        let l = c.line(&format!("`term` or `{stop}`"))?;
        if l.keyword() == stop {
            l.expect(stop, 0)?;
            break;
        }
        l.expect("term", 2)?;
        let (cc, ct) = l.arg(0)?;
        let coeff = residue(&l, cc, ct, field)?;
        if coeff == 0 {
            return Err(l.err(cc, "zero coefficients are not written"));
        }
        let (wc, wt) = l.arg(1)?;
        let w = parse_word(&l, wc, wt, n)?;
        if !seen.insert(w.clone()) {
            return Err(l.err(wc, format!("word {w} appears twice")));
        }
        terms.push((w, coeff));
    }
    NCPoly::from_terms(field, n, terms)
}

fn write_terms(out: &mut String, p: &NCPoly) {
    for (w, c) in p.terms() {
        let _ = writeln!(out, "term {c} {w}");
    }
}

pub fn parse_ncpoly(text: &str) -> Result<NCPoly> {
    let mut c = Cursor::new(text);
    c.header("ncpoly")?;
    let field = c.field()?;
    let (_, n) = c.kv("vars")?;
    let p = read_terms(&mut c, &field, n, "end")?;
    if let Some(kw) = c.peek_keyword() {
        let l = c.peek().expect("peeked");
        return Err(l.err(1, format!("unexpected `{kw}` after `end`")));
    }
    Ok(p)
}

pub fn write_ncpoly(p: &NCPoly) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ncpoly 1");
    let _ = writeln!(s, "field {}", p.field().p());
    let _ = writeln!(s, "vars {}", p.n());
    write_terms(&mut s, p);
    let _ = writeln!(s, "end");
    s
}

fn read_help_blocks(c: &mut Cursor, field: &Field, n: usize) -> Result<Vec<NCPoly>> {
    let mut helps = Vec::new();
    while c.peek_keyword() == Some("help") {
        let l = c.line("`help`")?;
        l.expect("help", 1)?;
        let (col, name) = l.arg(0)?;
        if name != format!("h{}", helps.len()) {
            return Err(l.err(col, format!("expected help h{}, found `{name}`", helps.len())));
        }
        helps.push(read_terms(c, field, n, "endhelp")?);
    }
    Ok(helps)
}

fn write_help_blocks(out: &mut String, helps: &[NCPoly]) {
    for (j, h) in helps.iter().enumerate() {
        let _ = writeln!(out, "help h{j}");
        write_terms(out, h);
        let _ = writeln!(out, "endhelp");
    }
}

/// A help set file: `helps 1`, `field`, `vars`, `help h<j>` blocks, `end`.
pub fn parse_helps(text: &str) -> Result<(Field, usize, Vec<NCPoly>)> {
    let mut c = Cursor::new(text);
    c.header("helps")?;
    let field = c.field()?;
    let (_, n) = c.kv("vars")?;
    let helps = read_help_blocks(&mut c, &field, n)?;
    c.finish()?;
    Ok((field, n, helps))
}

pub fn write_helps(field: &Field, n: usize, helps: &[NCPoly]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "helps 1");
    let _ = writeln!(s, "field {}", field.p());
    let _ = writeln!(s, "vars {n}");
    write_help_blocks(&mut s, helps);
    let _ = writeln!(s, "end");
    s
}

// ---------------------------------------------------------------- programs

fn parse_label(l: &Line, from: usize, field: &Field) -> Result<LinForm> {
    let mut label = LinForm::zero();
    let toks = &l.tokens[from..];
    if toks.is_empty() {
        return Ok(label);
    }
    for (k, &(col, tok)) in toks.iter().enumerate() {
        if k % 2 == 1 {
            if tok != "+" {
                return Err(l.err(col, format!("expected `+`, found `{tok}`")));
            }
            continue;
        }
        let (c, sym) = tok
            .split_once('*')
            .ok_or_else(|| l.err(col, format!("expected `<coeff>*<symbol>`, found `{tok}`")))?;
        let coeff = coefficient(l, col, c, field)?;
        let scol = col + c.len() + 1;
        if sym == "1" {
            label.add_constant(field, coeff);
        } else if let Some(i) = sym.strip_prefix('x').and_then(parse_usize) {
            label.add_x(field, i as u32, coeff);
        } else if let Some(j) = sym.strip_prefix('y').and_then(parse_usize) {
            label.add_y(field, j as u32, coeff);
        } else {
            return Err(l.err(scol, format!("unknown symbol `{sym}`")));
        }
    }
    if toks.len().is_multiple_of(2) {
        let (col, _) = toks[toks.len() - 1];
        return Err(l.err(col, "label ends with `+`"));
    }
    Ok(label)
}

fn write_label(label: &LinForm) -> String {
    let mut parts: Vec<String> = Vec::new();
    if label.constant() != 0 {
        parts.push(format!("{}*1", label.constant()));
    }
    parts.extend(label.x_terms().map(|(i, c)| format!("{c}*x{i}")));
    parts.extend(label.y_terms().map(|(j, c)| format!("{c}*y{j}")));
    parts.join(" + ")
}

/// Parses an ABP file. Structural checks beyond syntax (acyclicity, label
/// ranges) are left to [`Abp::validate`].
pub fn parse_abp(text: &str) -> Result<Abp> {
    let mut c = Cursor::new(text);
    c.header("abp")?;
    let field = c.field()?;
    let (_, n) = c.kv("vars")?;
    let helps = read_help_blocks(&mut c, &field, n)?;
    let mut names: Vec<String> = Vec::new();
    while c.peek_keyword() == Some("vertex") {
        let l = c.line("`vertex`")?;
        l.expect("vertex", 1)?;
        let (col, name) = l.arg(0)?;
        if names.iter().any(|v| v == name) {
            return Err(l.err(col, format!("duplicate vertex `{name}`")));
        }
        crate::abp::check_identifier(name).map_err(|e| l.err(col, e.to_string()))?;
        names.push(name.to_string());
    }
    let lookup = |l: &Line, col: usize, name: &str| -> Result<usize> {
        names
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| l.err(col, format!("unknown vertex `{name}`")))
    };
    let l = c.line("`source`")?;
    l.expect("source", 1)?;
    let (col, name) = l.arg(0)?;
    let source = lookup(&l, col, name)?;
    let l = c.line("`sink`")?;
    l.expect("sink", 1)?;
    let (col, name) = l.arg(0)?;
    let sink = lookup(&l, col, name)?;
    let mut edges = Vec::new();
    while c.peek_keyword() == Some("edge") {
        let l = c.line("`edge`")?;
        if l.tokens.len() < 4 {
            return Err(l.err(1, "expected `edge <u> <v> : <label>`"));
        }
        let (uc, u) = l.arg(0)?;
        let (vc, v) = l.arg(1)?;
        let (cc, colon) = l.arg(2)?;
        if colon != ":" {
            return Err(l.err(cc, format!("expected `:`, found `{colon}`")));
        }
        edges.push(Edge {
            from: lookup(&l, uc, u)?,
            to: lookup(&l, vc, v)?,
            label: parse_label(&l, 4, &field)?,
        });
    }
    c.finish()?;
    Abp::from_parts(&field, n, helps, names, edges, source, sink)
}

pub fn write_abp(a: &Abp) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "abp 1");
    let _ = writeln!(s, "field {}", a.field().p());
    let _ = writeln!(s, "vars {}", a.n());
    write_help_blocks(&mut s, a.helps());
    for v in a.vertices() {
        let _ = writeln!(s, "vertex {v}");
    }
    let _ = writeln!(s, "source {}", a.vertices()[a.source()]);
    let _ = writeln!(s, "sink {}", a.vertices()[a.sink()]);
    for e in a.edges() {
        let label = write_label(&e.label);
        let sep = if label.is_empty() { "" } else { " " };
        let _ = writeln!(
            s,
            "edge {} {} :{sep}{label}",
            a.vertices()[e.from],
            a.vertices()[e.to]
        );
    }
    let _ = writeln!(s, "end");
    s
}

// ------------------------------------------------------------ certificates

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut c = Cursor::new(text);
    c.header("cert")?;
    let field = c.field()?;
    let (_, n) = c.kv("n")?;
    let (_, degree) = c.kv("degree")?;
    let (_, claimed_r) = c.kv("claimed-r")?;

    let l = c.line("`solver`")?;
    if l.keyword() != "solver" || l.tokens.len() < 2 {
        return Err(l.err(1, "expected `solver <description>`"));
    }
    let solver = l.tokens[1..].iter().map(|t| t.1).collect::<Vec<_>>().join(" ");

    let l = c.line("`helps`")?;
    l.expect("helps", 1)?;
    let (col, hash) = l.arg(0)?;
    if hash.len() != 64 || !hash.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()) {
        return Err(l.err(col, "expected a lowercase hex SHA-256 digest"));
    }
    let helps_hash = hash.to_string();

    let l = c.line("`preprocess`")?;
    l.expect("preprocess", 1)?;
    let (col, pre) = l.arg(0)?;
    let preprocess = match pre {
        "none" => Preprocess::None,
        "homogeneous-parts" => Preprocess::HomogeneousParts,
        other => return Err(l.err(col, format!("unknown preprocessing `{other}`"))),
    };

    let (_, count) = c.kv("obstruction")?;
    let mut obstruction = Vec::with_capacity(count);
    for _ in 0..count {
        let start = c.next + 1;
        let (m, _) = read_mat_body(&mut c, false)?;
        if m.field() != &field {
            return Err(Error::Parse {
                line: start,
                col: 1,
                msg: format!("matrix over GF({}) in a certificate over GF({})", m.field().p(), field.p()),
            });
        }
        obstruction.push(m);
    }
    let l = c.line("`remote`")?;
    l.expect("remote", 0)?;
    let start = c.next + 1;
    let (remote, _) = read_mat_body(&mut c, false)?;
    if remote.field() != &field {
        return Err(Error::Parse {
            line: start,
            col: 1,
            msg: "remote matrix is over a different field".into(),
        });
    }
    c.finish()?;
    Ok(Certificate {
        field,
        n,
        degree,
        claimed_r,
        solver,
        helps_hash,
        preprocess,
        obstruction,
        remote,
    })
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "cert 1");
    let _ = writeln!(s, "field {}", cert.field.p());
    let _ = writeln!(s, "n {}", cert.n);
    let _ = writeln!(s, "degree {}", cert.degree);
    let _ = writeln!(s, "claimed-r {}", cert.claimed_r);
    let _ = writeln!(s, "solver {}", cert.solver);
    let _ = writeln!(s, "helps {}", cert.helps_hash);
    let _ = writeln!(s, "preprocess {}", cert.preprocess);
    let _ = writeln!(s, "obstruction {}", cert.obstruction.len());
    for m in &cert.obstruction {
        write_mat_body(&mut s, m, None);
    }
    let _ = writeln!(s, "remote");
    write_mat_body(&mut s, &cert.remote, None);
    let _ = writeln!(s, "end");
    s
}

/// The kind named on the first non-empty line, e.g. `"mat"` or `"abp"`.
pub fn detect_kind(text: &str) -> Option<&str> {
    text.lines()
        .find(|l| !l.trim().is_empty())
        .and_then(|l| l.split_whitespace().next())
}
