use helpabp::abp::Abp;
use helpabp::cutmatrix::{cut_matrix, cut_matrix_of_degree, decompose, verify_decomposition};
use helpabp::format;
use helpabp::hardgen::{
    bound_report, generate_hard, polynomial_matches, verify_certificate, BoundVariant, Solver,
};
use helpabp::linalg::Mat;
use helpabp::rmp::{
    min_span_distance, solve_improved, solve_simple, DistanceMode, ImprovedParams, RemoteInstance,
};
use helpabp::Error;

use crate::io::{
    load_abp, load_certificate, load_helps, load_mats, load_ncpoly, read_text, write_file,
    CliError, CliResult, Output,
};
use crate::{
    AbpCmd, CutCmd, FmtCmd, Global, HardgenCmd, ModeArgs, RmpCmd, SolverName, VariantName,
};

fn mode(g: &Global, m: &ModeArgs) -> DistanceMode {
    match m.samples {
        Some(count) => DistanceMode::Sampled { count, seed: g.seed },
        None => DistanceMode::Exhaustive,
    }
}

fn describe_mode(mode: DistanceMode) -> String {
    match mode {
        DistanceMode::Exhaustive => "exhaustive".into(),
        DistanceMode::Sampled { count, seed } => format!("sampled ({count} samples, seed {seed})"),
    }
}

fn budget(g: &Global) -> usize {
    usize::try_from(g.budget).unwrap_or(usize::MAX)
}

/// `d` for a program that must be homogeneous.
fn sink_degree(a: &Abp) -> CliResult<usize> {
    let report = a.homogeneity_report()?;
    if !report.is_homogeneous {
        let why = report
            .offending
            .map(|o| format!(" ({o:?})"))
            .unwrap_or_default();
        return Err(CliError::Usage(format!("program is not homogeneous{why}")));
    }
    report
        .sink_degree(a)
        .ok_or_else(|| CliError::Usage("the sink is not reachable from the source".into()))
}

pub fn abp(g: &Global, cmd: AbpCmd) -> CliResult<()> {
    let out = Output::new(g);
    match cmd {
        AbpCmd::Eval { input } => {
            let a = load_abp(g, &input)?;
            let f = a.evaluate_limited(budget(g))?;
            out.report(format!(
                "program: {} vertices, {} edges, {} helps over {}",
                a.size(),
                a.edges().len(),
                a.helps().len(),
                a.field()
            ));
            out.report(format!(
                "polynomial: {} terms, degree {}",
                f.num_terms(),
                f.degree().map_or("-".into(), |d| d.to_string())
            ));
            out.emit(&format::write_ncpoly(&f))
        }
        AbpCmd::Homogenize { input, degree } => {
            let a = load_abp(g, &input)?;
            let d = match degree {
                Some(d) => d,
                None => a
                    .evaluate_limited(budget(g))?
                    .degree()
                    .ok_or_else(|| CliError::Usage("program computes 0; pass --degree".into()))?,
            };
            let h = a.homogenize(d)?;
            out.report(format!(
                "homogenized to degree {d}: {} vertices (input {}, bound {})",
                h.size(),
                a.size(),
                a.size() * (d + 1)
            ));
            out.report(format!("split helps: {}", h.helps().len()));
            out.emit(&format::write_abp(&h))
        }
    }
}

pub fn cut(g: &Global, cmd: CutCmd) -> CliResult<()> {
    let out = Output::new(g);
    match cmd {
        CutCmd::Matrix { input, k } => {
            let text = read_text(&input)?;
            let m = match format::detect_kind(&text) {
                Some("abp") => {
                    let a = load_abp(g, &input)?;
                    let d = sink_degree(&a)?;
                    cut_matrix_of_degree(&a.evaluate_limited(budget(g))?, d, k)?
                }
                _ => cut_matrix(&load_ncpoly(g, &input)?, k)?,
            };
            out.report(format!(
                "M_{k}: {}x{}, rank {}",
                m.base.rows(),
                m.base.cols(),
                m.rank()
            ));
            out.emit(&format::write_cutmatrix(&m))
        }
        CutCmd::Decompose { input, k } => {
            let a = load_abp(g, &input)?;
            let d = sink_degree(&a)?;
            let dec = decompose(&a, k)?;
            println!("k={k} d={d} S={}", a.size());
            println!("rank(M′)={}", dec.m_prime.rank());
            for p in &dec.pieces {
                println!(
                    "piece h{} i={}: {}x{} rank {}",
                    p.help,
                    p.split,
                    p.factor.base.rows(),
                    p.factor.base.cols(),
                    p.factor.rank()
                );
            }
            let f = a.evaluate_limited(budget(g))?;
            if verify_decomposition(&dec, &f, a.helps(), d)? {
                println!("identity: holds");
                Ok(())
            } else {
                Err(CliError::Failed(format!("decomposition identity fails at k={k}")))
            }
        }
        CutCmd::Verify { input, k } => {
            let a = load_abp(g, &input)?;
            let d = sink_degree(&a)?;
            let f = a.evaluate_limited(budget(g))?;
            let s = a.size();
            let ks: Vec<usize> = match k {
                Some(k) => vec![k],
                None => (0..=d).collect(),
            };
            let mut failures = Vec::new();
            for k in ks {
                let dec = decompose(&a, k)?;
                let identity = verify_decomposition(&dec, &f, a.helps(), d)?;
                let r = dec.m_prime.rank();
                let worst = dec.pieces.iter().map(|p| p.factor.rank()).max().unwrap_or(0);
                let ok = identity && r <= s && worst <= s * s;
                println!(
                    "k={k}: identity {}, rank(M′)={r} <= S={s}, max piece rank {worst} <= S²={}: {}",
                    if identity { "holds" } else { "FAILS" },
                    s * s,
                    if ok { "ok" } else { "FAIL" }
                );
                if !ok {
                    failures.push(k);
                }
            }
            if failures.is_empty() {
                Ok(())
            } else {
                Err(CliError::Failed(format!("cuts {failures:?}")))
            }
        }
    }
}

fn square_side(mats: &[Mat]) -> CliResult<usize> {
    let n = mats.first().map_or(0, Mat::rows);
    if let Some(m) = mats.iter().find(|m| m.rows() != n || m.cols() != n) {
        return Err(CliError::Usage(format!(
            "matrices must all be {n}x{n}, found {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(n)
}

pub fn rmp(g: &Global, cmd: RmpCmd) -> CliResult<()> {
    let out = Output::new(g);
    match cmd {
        RmpCmd::Simple { input } => {
            let mats = load_mats(g, &input)?;
            let n = square_side(&mats)?;
            let inst = RemoteInstance::new(mats[0].field(), n, &mats)?;
            let p = solve_simple(&inst)?;
            out.report(format!("N={n} inputs={} k={}", mats.len(), inst.k()));
            out.report(format!("r={}", p.guaranteed));
            out.emit(&format::write_mat(&p.point))
        }
        RmpCmd::Improved {
            span,
            ell,
            r,
            c0,
            c,
            fallback,
        } => {
            let mats = load_mats(g, &span)?;
            let n = square_side(&mats)?;
            let inst = RemoteInstance::new(mats[0].field(), n, &mats)?;
            out.report(format!("N={n} k={} ell={ell} r={r} c0={c0} c={c}", inst.k()));
            let params = ImprovedParams { ell, r, c0, c };
            match solve_improved(&inst, params) {
                Ok(s) => {
                    out.report(format!(
                        "construction {}: {} subspaces, total size {}",
                        s.construction, s.subspaces, s.size_sum
                    ));
                    out.report(format!("distance >= {}", s.guaranteed));
                    out.emit(&format::write_mat(&s.point))
                }
                Err(e @ Error::Precondition(_)) if fallback => {
                    out.report(format!("improved solver not applicable: {e}"));
                    let p = solve_simple(&inst)?;
                    out.report(format!("fallback simple solver: distance >= {}", p.guaranteed));
                    out.emit(&format::write_mat(&p.point))
                }
                Err(e) => Err(e.into()),
            }
        }
        RmpCmd::Verify {
            point,
            span,
            min,
            mode: m,
        } => {
            let mut all = load_mats(g, std::slice::from_ref(&point))?;
            let p = all.remove(0);
            let mats = load_mats(g, &span)?;
            if let Some(q) = mats.first() {
                if q.field() != p.field() {
                    return Err(CliError::Usage("point and span are over different fields".into()));
                }
            }
            let n = square_side(std::slice::from_ref(&p))?;
            square_side(&mats)?;
            let inst = RemoteInstance::new(p.field(), n, &mats)?;
            let mode = mode(g, &m);
            let sd = min_span_distance(&p, &inst, mode)?;
            println!("N={n} k={} mode={}", inst.k(), describe_mode(mode));
            if !sd.exact {
                println!("warning: sampling only upper-bounds the distance; a pass is not a proof");
            }
            println!("min distance{}: {}", if sd.exact { "" } else { " (upper bound)" }, sd.distance);
            if sd.distance >= min {
                println!("verified: distance >= {min}");
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "span element {:?} is at distance {} < {min}",
                    sd.witness, sd.distance
                )))
            }
        }
    }
}

pub fn hardgen(g: &Global, cmd: HardgenCmd) -> CliResult<()> {
    match cmd {
        HardgenCmd::Gen {
            helps,
            degree,
            solver,
            ell,
            r,
            c0,
            c,
            cert,
        } => {
            let h = load_helps(g, &helps)?;
            let solver = match solver {
                SolverName::Simple => Solver::Simple,
                SolverName::Improved => Solver::Improved(ImprovedParams { ell, r, c0, c }),
            };
            let hard = generate_hard(&h, degree, solver)?;
            let ct = &hard.certificate;
            let out = Output::new(g);
            out.report(format!(
                "helps: m={} n={} over {}, degrees {}..{}, sha256 {}",
                h.m(),
                h.n(),
                h.field(),
                h.min_degree(),
                h.max_degree(),
                ct.helps_hash
            ));
            out.report(format!("preprocess: {}", ct.preprocess));
            out.report(format!(
                "obstruction: {} built, {} distinct, k={} independent",
                hard.raw_count,
                hard.distinct,
                ct.k()
            ));
            out.report(format!("N={} solver={} r={}", ct.side()?, ct.solver, ct.claimed_r));
            out.report(format!(
                "every homogeneous ABP over these helps computing f has at least {} vertices",
                ct.claimed_r
            ));
            write_file(&cert, &format::write_certificate(ct))?;
            out.emit(&format::write_ncpoly(&hard.f))
        }
        HardgenCmd::Verify {
            cert,
            mode: m,
            helps,
            poly,
        } => {
            let ct = load_certificate(g, &cert)?;
            let mode = mode(g, &m);
            let v = verify_certificate(&ct, mode)?;
            println!(
                "N={} k={} claimed-r={} solver={} mode={}",
                ct.side()?,
                ct.k(),
                ct.claimed_r,
                ct.solver,
                describe_mode(mode)
            );
            if !v.exact {
                println!("warning: sampling only upper-bounds the distance; a pass is not a proof");
            }
            println!("min distance{}: {}", if v.exact { "" } else { " (upper bound)" }, v.distance);
            let mut failures = Vec::new();
            if !v.holds {
                failures.push(format!("distance {} < claimed {}", v.distance, ct.claimed_r));
            }
            if !helps.is_empty() {
                let h = load_helps(g, &helps)?;
                let ok = ct.matches_helps(&h);
                println!("helps hash: {}", if ok { "matches" } else { "MISMATCH" });
                if !ok {
                    failures.push("help-set hash mismatch".into());
                }
            }
            if let Some(path) = poly {
                let f = load_ncpoly(g, &path)?;
                let ok = polynomial_matches(&f, &ct)?;
                println!("polynomial: {}", if ok { "matches remote" } else { "MISMATCH" });
                if !ok {
                    failures.push("polynomial does not match the remote point".into());
                }
            }
            if failures.is_empty() {
                println!("verified");
                Ok(())
            } else {
                Err(CliError::Failed(failures.join("; ")))
            }
        }
        HardgenCmd::Bound {
            variant,
            n,
            m,
            d,
            eps,
            helps,
        } => {
            let variant = match variant {
                VariantName::Low => BoundVariant::LowDeg,
                VariantName::High => BoundVariant::HighDeg,
                VariantName::GenLow => BoundVariant::GenLow,
                VariantName::GenHigh => BoundVariant::GenHigh,
            };
            let h = if helps.is_empty() {
                None
            } else {
                Some(load_helps(g, &helps)?)
            };
            let r = bound_report(n, m, d, eps, variant, h.as_ref())?;
            println!("variant={} n={n} m={m} d={d} eps={eps}", r.variant);
            println!("value: {}", r.value);
            println!("floor: {}", r.value.floor());
            println!("hypothesis: {}", r.hypothesis);
            match r.applicable {
                Some(true) => println!("applicable: yes"),
                Some(false) => println!("applicable: no"),
                None => println!("applicable: not checked (no helps given)"),
            }
            Ok(())
        }
    }
}

pub fn fmt(g: &Global, cmd: FmtCmd) -> CliResult<()> {
    let FmtCmd::Check { files, strict } = cmd;
    let mut non_canonical = Vec::new();
    for path in &files {
        let text = read_text(path)?;
        let input = |r: helpabp::Result<String>| {
            r.map_err(|source| CliError::Input {
                path: path.clone(),
                source,
            })
        };
        let (kind, canonical) = match format::detect_kind(&text) {
            Some("mat") if text.lines().any(|l| l.starts_with("rowlen")) => (
                "cutmatrix",
                input(format::parse_cutmatrix(&text, None).map(|m| format::write_cutmatrix(&m)))?,
            ),
            Some("mat") => ("mat", input(format::parse_mat(&text).map(|m| format::write_mat(&m)))?),
            Some("ncpoly") => (
                "ncpoly",
                input(format::parse_ncpoly(&text).map(|p| format::write_ncpoly(&p)))?,
            ),
            Some("abp") => ("abp", input(format::parse_abp(&text).map(|a| format::write_abp(&a)))?),
            Some("helps") => (
                "helps",
                input(format::parse_helps(&text).map(|(f, n, h)| format::write_helps(&f, n, &h)))?,
            ),
            Some("cert") => (
                "cert",
                input(format::parse_certificate(&text).map(|c| format::write_certificate(&c)))?,
            ),
            other => {
                return Err(CliError::Usage(format!(
                    "{}: unknown file kind `{}`",
                    path.display(),
                    other.unwrap_or("")
                )))
            }
        };
        if let Some(p) = g.field {
            let field_line = format!("field {p}\n");
            if !canonical.contains(&field_line) {
                return Err(CliError::Usage(format!(
                    "{}: not over GF({p})",
                    path.display()
                )));
            }
        }
        let is_canonical = canonical == text;
        println!(
            "{}: {kind} ok{}",
            path.display(),
            if is_canonical { "" } else { " (not canonical)" }
        );
        if !is_canonical {
            non_canonical.push(path.display().to_string());
        }
    }
    if strict && !non_canonical.is_empty() {
        return Err(CliError::Failed(format!("not canonical: {}", non_canonical.join(", "))));
    }
    Ok(())
}
