use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use helpabp::abp::Abp;
use helpabp::format;
use helpabp::hardgen::{Certificate, HelpSet};
use helpabp::linalg::{Field, Mat};
use helpabp::ncpoly::NCPoly;
use thiserror::Error;

use crate::Global;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] helpabp::Error),

    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        source: helpabp::Error,
    },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Core(e) | CliError::Input { source: e, .. } if e.is_budget() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn parsed<T>(path: &Path, r: helpabp::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

/// Checks a field read from `path` against `--field` and an earlier input.
pub fn check_field(g: &Global, seen: &mut Option<Field>, path: &Path, f: &Field) -> CliResult<()> {
    if let Some(p) = g.field {
        if u64::from(f.p()) != p {
            return Err(CliError::Usage(format!(
                "{}: file is over {f}, but --field {p} was given",
                path.display()
            )));
        }
    }
    match seen {
        Some(prev) if prev != f => Err(CliError::Usage(format!(
            "{}: file is over {f}, earlier inputs are over {prev}",
            path.display()
        ))),
        _ => {
            *seen = Some(f.clone());
            Ok(())
        }
    }
}

pub fn load_abp(g: &Global, path: &Path) -> CliResult<Abp> {
    let a = parsed(path, format::parse_abp(&read_text(path)?))?;
    check_field(g, &mut None, path, a.field())?;
    Ok(a)
}

pub fn load_ncpoly(g: &Global, path: &Path) -> CliResult<NCPoly> {
    let p = parsed(path, format::parse_ncpoly(&read_text(path)?))?;
    check_field(g, &mut None, path, p.field())?;
    Ok(p)
}

pub fn load_mats(g: &Global, paths: &[PathBuf]) -> CliResult<Vec<Mat>> {
    let mut seen = None;
    paths
        .iter()
        .map(|path| {
            let m = parsed(path, format::parse_mat(&read_text(path)?))?;
            check_field(g, &mut seen, path, m.field())?;
            Ok(m)
        })
        .collect()
}

pub fn load_certificate(g: &Global, path: &Path) -> CliResult<Certificate> {
    let c = parsed(path, format::parse_certificate(&read_text(path)?))?;
    check_field(g, &mut None, path, &c.field)?;
    Ok(c)
}

/// Helps from a `helps` file, an ABP file, or several `ncpoly` files.
pub fn load_helps(g: &Global, paths: &[PathBuf]) -> CliResult<HelpSet> {
    let mut seen = None;
    let mut n = None;
    let mut polys = Vec::new();
    for path in paths {
        let text = read_text(path)?;
        let (field, vars, mut hs) = match format::detect_kind(&text) {
            Some("helps") => parsed(path, format::parse_helps(&text))?,
            Some("abp") => {
                let a = parsed(path, format::parse_abp(&text))?;
                (a.field().clone(), a.n(), a.helps().to_vec())
            }
            _ => {
                let p = parsed(path, format::parse_ncpoly(&text))?;
                (p.field().clone(), p.n(), vec![p])
            }
        };
        check_field(g, &mut seen, path, &field)?;
        if *n.get_or_insert(vars) != vars {
            return Err(CliError::Usage(format!(
                "{}: {vars} variables, earlier helps use {}",
                path.display(),
                n.unwrap_or(0)
            )));
        }
        polys.append(&mut hs);
    }
    let field = seen.ok_or_else(|| CliError::Usage("no help files given".into()))?;
    Ok(HelpSet::new(&field, n.unwrap_or(0), polys)?)
}

/// Routes the primary output to `--out` or stdout, and human-readable
/// report lines to stdout, or to stderr when stdout carries the output.
pub struct Output<'a> {
    out: Option<&'a Path>,
}

impl<'a> Output<'a> {
    pub fn new(g: &'a Global) -> Output<'a> {
        Output {
            out: g.out.as_deref(),
        }
    }

    pub fn report(&self, line: impl AsRef<str>) {
        if self.out.is_some() {
            println!("{}", line.as_ref());
        } else {
            eprintln!("{}", line.as_ref());
        }
    }

    pub fn emit(&self, text: &str) -> CliResult<()> {
        match self.out {
            Some(path) => write_file(path, text),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Write {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })
            }
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
