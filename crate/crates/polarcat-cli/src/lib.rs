//! Library side of the `polarcat` command-line tool: expression parsing and
//! the subcommand implementations, kept separate from argument handling so
//! they can be tested directly.

pub mod parse;

use std::collections::HashMap;
use std::io::Write;
use std::sync::mpsc;
use std::thread;

use serde_json::{json, Value};

use polarcat::brauer::double_factorial_count;
use polarcat::polar::Engine;
use polarcat::ptl::{binomial, ptl_rank, verma_oracle};
use polarcat::scalars::{fmt_rational, parse_rational, Rational, Var};
use polarcat::suites::{run_criterion, suite_criteria, Check, SuiteConfig};
use polarcat::superlin::{DensePole, Module, Oracle, Osp};
use polarcat::linalg::Mat;

pub use parse::{parse_elem, parse_morphism, MorphismAst};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("rank mismatch: {left} vs {right} in {context}")]
    RankMismatch { left: usize, right: usize, context: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("bad argument: {0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] polarcat::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = Result<T, CliError>;

/// Contents of a `--config` file. Missing keys keep their defaults.
pub fn load_config(text: &str, base: SuiteConfig) -> CliResult<SuiteConfig> {
    let v: Value = serde_json::from_str(text)?;
    let get = |k: &str| v.get(k).and_then(Value::as_u64);
    let mut cfg = base;
    if let Some(x) = get("seed") {
        cfg.seed = x;
    }
    if let Some(x) = get("words") {
        cfg.words = x as usize;
    }
    if let Some(x) = get("pairs") {
        cfg.pairs = x as usize;
    }
    if let Some(x) = get("budget") {
        cfg.budget = x as usize;
    }
    Ok(cfg)
}

/// Run a suite, writing one JSON object per check. Criteria run on separate
/// threads; lines are written by the calling thread only. Returns whether
/// every check passed.
pub fn verify(suite: &str, cfg: &SuiteConfig, out: &mut dyn Write) -> CliResult<bool> {
    let criteria = suite_criteria(suite)?;
    let (tx, rx) = mpsc::channel::<(u8, polarcat::Result<Vec<Check>>)>();
    for n in criteria.iter().copied() {
        let tx = tx.clone();
        let cfg = cfg.clone();
        thread::spawn(move || {
            let _ = tx.send((n, run_criterion(n, &cfg)));
        });
    }
    drop(tx);
    let mut ok = true;
    for (n, res) in rx {
        match res {
            Ok(checks) => {
                for c in checks {
                    ok &= c.pass;
                    writeln!(out, "{}", c.to_json())?;
                }
            }
            Err(e) => {
                ok = false;
                let line = json!({"criterion": n, "name": "error", "anchor": "", "pass": false, "detail": e.to_string()});
                writeln!(out, "{line}")?;
            }
        }
        out.flush()?;
    }
    Ok(ok)
}

/// Normal form of `expr`, optionally with `δ` specialised.
pub fn normalize_cmd(expr: &str, delta: Option<&str>, as_json: bool, budget: usize) -> CliResult<String> {
    let a = parse_elem(expr)?;
    let nf = Engine::new(budget).normalize(&a)?;
    let bind = match delta {
        None | Some("symbolic") => None,
        Some(q) => Some(HashMap::from([(Var::Delta, parse_rational(q)?)])),
    };
    let mut terms = Vec::new();
    for (d, c) in nf.terms() {
        let c = match &bind {
            Some(b) => c.specialize(b)?,
            None => c,
        };
        if !c.is_zero() {
            terms.push((d, c));
        }
    }
    if as_json {
        let list: Vec<Value> = terms
            .iter()
            .map(|(d, c)| {
                let mut v = d.to_json();
                if let Value::Object(m) = &mut v {
                    m.insert("coeff".into(), Value::String(c.to_string()));
                }
                v
            })
            .collect();
        return Ok(json!({"src": nf.src(), "tgt": nf.tgt(), "terms": list}).to_string());
    }
    if terms.is_empty() {
        return Ok("0".into());
    }
    let parts: Vec<String> = terms.iter().map(|(d, c)| if c.is_one() { d.to_string() } else { format!("({c})·{d}") }).collect();
    Ok(parts.join(" + "))
}

/// Hom-space sizes between ranks `r` and `s`.
pub fn rank_cmd(r: usize, s: usize, ptl: bool, max_degree: u32) -> CliResult<Value> {
    if (r + s) % 2 == 1 {
        return Err(polarcat::Error::OddBoundary(r + s).into());
    }
    if ptl {
        return Ok(json!({"r": r, "s": s, "ptl_rank": ptl_rank(r, s)?}));
    }
    let arcs = (r + s) / 2;
    let brauer = double_factorial_count(r + s);
    // dots distributed over the arcs, ignoring bubble monomials
    let by_degree: Vec<Value> = (0..=max_degree as usize)
        .map(|d| {
            let ways = if arcs == 0 { u128::from(d == 0) } else { binomial((d + arcs - 1) as u64, (arcs - 1) as u64) };
            json!({"degree": d, "diagrams": (brauer * ways).to_string()})
        })
        .collect();
    Ok(json!({"r": r, "s": s, "brauer": brauer.to_string(), "dotted": by_degree}))
}

/// Which pole module to evaluate on.
#[derive(Clone, Debug)]
pub enum PoleChoice {
    Natural,
    Adjoint,
    Trivial,
    Verma { lambda: Rational, cutoff: usize },
}

impl PoleChoice {
    pub fn parse(module: &str) -> CliResult<PoleChoice> {
        Ok(match module {
            "V" | "natural" => PoleChoice::Natural,
            "ad" | "adjoint" => PoleChoice::Adjoint,
            "trivial" | "C" => PoleChoice::Trivial,
            other => return Err(CliError::Usage(format!("unknown module {other}; use V, ad or trivial"))),
        })
    }
}

/// `m,n` → the space `(m|2n)`.
pub fn parse_rep(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("expected --rep m,n, got {s}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn matrix_json(keys: &[Vec<usize>], m: &Mat, cols: usize) -> Value {
    let rows: Vec<Vec<String>> =
        (0..keys.len()).map(|i| (0..cols).map(|j| fmt_rational(&m[(i, j)])).collect()).collect();
    json!({"rows": keys, "matrix": rows})
}

/// Matrix of `expr` under the functor into `(m|2n)`-modules.
pub fn eval_cmd(expr: &str, rep: (usize, usize), pole: PoleChoice, window: usize) -> CliResult<Value> {
    let a = parse_elem(expr)?;
    let (keys, m, inputs) = match pole {
        PoleChoice::Verma { lambda, cutoff } => {
            if rep != (0, 1) {
                return Err(CliError::Usage("Verma modules are available for --rep 0,1 only".into()));
            }
            let o = verma_oracle(lambda, cutoff, window)?;
            let (k, m) = o.matrix(&a)?;
            (k, m, o.basis_inputs(a.src()))
        }
        other => {
            let osp = Osp::build(rep.0, rep.1)?;
            let module = match other {
                PoleChoice::Natural => Module::natural(&osp),
                PoleChoice::Adjoint => Module::adjoint(&osp)?,
                _ => Module::trivial(&osp),
            };
            let pole = DensePole::new(&osp, module);
            let o = Oracle::new(osp, pole);
            let (k, m) = o.matrix(&a)?;
            (k, m, o.basis_inputs(a.src()))
        }
    };
    let mut v = matrix_json(&keys, &m, inputs.len());
    if let Value::Object(obj) = &mut v {
        obj.insert("cols".into(), json!(inputs));
        obj.insert("src".into(), json!(a.src()));
        obj.insert("tgt".into(), json!(a.tgt()));
    }
    Ok(v)
}
