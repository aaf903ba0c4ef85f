//! Command-line specifications for growth functions, trees and box unions.
//!
//! Growth functions:
//!
//! ```text
//! growth  := '@' PATH | [ 'prefix:' INTS ';' ] rule
//! rule    := 'poly:' D [',' SCALE]      ⌈SCALE·n^D⌉
//!          | 'exp:' B                   ⌈B^n⌉
//!          | 'const:' V
//!          | 'polylog:' D ',' E         ⌈n^D·ln(n+1)^E⌉
//!          | 'table:' INTS              finite table f(1), f(2), …
//!          | 'alt:' TERM ',' TERM       f(2j-1) from the first, f(2j) from the second
//! TERM    := V | 'n' | 'n^' D | B '^n'  (evaluated at j)
//! ```
//!
//! Trees: `figure1-gamma`, `figure1-gamma-prime`, `paths:N,K`,
//! `sphere:F1,F2,…` (every vertex at depth i-1 has Fi children),
//! `height2:P1,P2,…` (root children with Pj children each), or `@PATH`.
//!
//! Sets: `counterexample`, `empty:N`, `full:N`, `witness:R,EPS`,
//! `box:BOX|BOX|…` where `BOX` is `[a,b]^N` or `[a,b]x[c,d]x…`, or `@PATH`.

use std::fs;

use treedom::domination::boxes::parse_rational;
use treedom::domination::{counterexample_d, height2_tree, witness_set_height2, AxisBox, BoxUnion};
use treedom::tree::{build_paths_tree, build_spherical, figure1_trees, GrowthFunction, Partition, RootedTree, Tail};

use crate::CliError;

/// A parsed input together with the bytes it was read from, for hashing.
pub struct Loaded<T> {
    pub value: T,
    pub source: Vec<u8>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_file(spec: &str) -> Result<Option<Vec<u8>>, CliError> {
    match spec.strip_prefix('@') {
        Some(path) => fs::read(path)
            .map(Some)
            .map_err(|e| usage(format!("cannot read `{path}`: {e}"))),
        None => Ok(None),
    }
}

fn utf8(bytes: &[u8]) -> Result<&str, CliError> {
    std::str::from_utf8(bytes).map_err(|e| usage(format!("input is not UTF-8: {e}")))
}

fn ints(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("`{t}` is not a nonnegative integer")))
        })
        .collect()
}

fn real(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("`{s}` is not a number")))
}

fn term(s: &str) -> Result<Tail, CliError> {
    let s = s.trim();
    if s == "n" {
        return Ok(Tail::Polynomial { degree: 1.0, scale: 1.0 });
    }
    if let Some(d) = s.strip_prefix("n^") {
        return Ok(Tail::Polynomial {
            degree: real(d)?,
            scale: 1.0,
        });
    }
    if let Some(b) = s.strip_suffix("^n") {
        return Ok(Tail::Exponential { base: real(b)? });
    }
    let value = s
        .parse::<u64>()
        .map_err(|_| usage(format!("`{s}` is not a term (V, n, n^D or B^n)")))?;
    Ok(Tail::Constant { value })
}

fn rule(s: &str) -> Result<(Vec<u64>, Tail), CliError> {
    let (kind, args) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("growth rule `{s}` needs the form KIND:ARGS")))?;
    let tail = match kind {
        "poly" => {
            let mut parts = args.split(',');
            let degree = real(parts.next().unwrap_or(""))?;
            let scale = parts.next().map(real).transpose()?.unwrap_or(1.0);
            Tail::Polynomial { degree, scale }
        }
        "exp" => Tail::Exponential { base: real(args)? },
        "const" => Tail::Constant { value: ints(args)?[0] },
        "polylog" => {
            let (d, e) = args
                .split_once(',')
                .ok_or_else(|| usage("polylog needs D,E"))?;
            Tail::PolyLog {
                degree: real(d)?,
                scale: 1.0,
                log_power: real(e)?,
            }
        }
        "table" => return Ok((ints(args)?, Tail::Table)),
        "alt" => {
            let (odd, even) = args
                .split_once(',')
                .ok_or_else(|| usage("alt needs two terms separated by a comma"))?;
            Tail::Interleaved {
                odd: Box::new(term(odd)?),
                even: Box::new(term(even)?),
            }
        }
        other => return Err(usage(format!("unknown growth kind `{other}`"))),
    };
    Ok((Vec::new(), tail))
}

pub fn growth(spec: &str) -> Result<Loaded<GrowthFunction>, CliError> {
    if let Some(bytes) = read_file(spec)? {
        let value = treedom::json::from_str::<GrowthFunction>(utf8(&bytes)?)?;
        return Ok(Loaded { value, source: bytes });
    }
    let (prefix, rest) = match spec.strip_prefix("prefix:") {
        Some(r) => {
            let (p, rest) = r
                .split_once(';')
                .ok_or_else(|| usage("prefix form is `prefix:INTS;RULE`"))?;
            (ints(p)?, rest)
        }
        None => (Vec::new(), spec),
    };
    let (table, tail) = rule(rest)?;
    let value = match (prefix.is_empty(), table.is_empty()) {
        (true, true) => GrowthFunction::from_rule(tail)?,
        (true, false) => GrowthFunction::table(table)?,
        (false, true) => GrowthFunction::new(prefix, tail)?,
        (false, false) => GrowthFunction::table([prefix, table].concat())?,
    };
    Ok(Loaded {
        value,
        source: spec.as_bytes().to_vec(),
    })
}

pub fn tree(spec: &str) -> Result<Loaded<RootedTree>, CliError> {
    if let Some(bytes) = read_file(spec)? {
        let value = RootedTree::from_json(utf8(&bytes)?)?;
        return Ok(Loaded { value, source: bytes });
    }
    let value = match spec.split_once(':') {
        None if spec == "figure1-gamma" => figure1_trees().0,
        None if spec == "figure1-gamma-prime" => figure1_trees().1,
        Some(("paths", args)) => match ints(args)?.as_slice() {
            &[n, k] if n >= 1 && k >= 1 => build_paths_tree(n as usize, k as usize),
            _ => return Err(usage("paths:N,K needs two positive integers")),
        },
        Some(("sphere", args)) => {
            let f = ints(args)?;
            let depth = f.len();
            build_spherical(&GrowthFunction::table(f)?, depth)?
        }
        Some(("height2", args)) => height2_tree(&Partition::new(ints(args)?))?,
        _ => {
            return Err(usage(format!(
                "unknown tree `{spec}`; expected figure1-gamma, figure1-gamma-prime, paths:N,K, sphere:F.., height2:P.. or @FILE"
            )))
        }
    };
    Ok(Loaded {
        value,
        source: spec.as_bytes().to_vec(),
    })
}

/// Parses `[a,b]^N` or `[a,b]x[c,d]x…`.
fn axis_box(s: &str) -> Result<AxisBox, CliError> {
    let s = s.trim();
    let interval = |t: &str| -> Result<(_, _), CliError> {
        let inner = t
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| usage(format!("`{t}` is not an interval [a,b]")))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| usage(format!("`{t}` is not an interval [a,b]")))?;
        Ok((parse_rational(a).map_err(usage)?, parse_rational(b).map_err(usage)?))
    };
    if let Some((iv, power)) = s.rsplit_once("]^") {
        let n: usize = power
            .trim()
            .parse()
            .map_err(|_| usage(format!("`{power}` is not a dimension")))?;
        let (a, b) = interval(&format!("{iv}]"))?;
        return Ok(AxisBox::cube(n, a, b)?);
    }
    let (lo, hi) = s.split('x').map(interval).collect::<Result<Vec<_>, _>>()?.into_iter().unzip();
    Ok(AxisBox::new(lo, hi)?)
}

pub fn set(spec: &str) -> Result<Loaded<BoxUnion>, CliError> {
    if let Some(bytes) = read_file(spec)? {
        let value = BoxUnion::from_json(utf8(&bytes)?)?;
        return Ok(Loaded { value, source: bytes });
    }
    let dim = |args: &str| -> Result<usize, CliError> {
        match ints(args)?.as_slice() {
            &[n] if n >= 1 => Ok(n as usize),
            _ => Err(usage("dimension must be a positive integer")),
        }
    };
    let value = match spec.split_once(':') {
        None if spec == "counterexample" => counterexample_d(),
        Some(("empty", args)) => BoxUnion::empty(dim(args)?),
        Some(("full", args)) => BoxUnion::full(dim(args)?),
        Some(("witness", args)) => {
            let (r, eps) = args.split_once(',').ok_or_else(|| usage("witness:R,EPS"))?;
            let r: u32 = r.trim().parse().map_err(|_| usage(format!("`{r}` is not a positive integer")))?;
            witness_set_height2(r, &parse_rational(eps).map_err(usage)?)?
        }
        Some(("box", args)) => {
            let boxes = args.split('|').map(axis_box).collect::<Result<Vec<_>, _>>()?;
            let dim = boxes[0].dim();
            BoxUnion::new(dim, boxes)?
        }
        _ => {
            return Err(usage(format!(
                "unknown set `{spec}`; expected counterexample, empty:N, full:N, witness:R,EPS, box:… or @FILE"
            )))
        }
    };
    Ok(Loaded {
        value,
        source: spec.as_bytes().to_vec(),
    })
}
