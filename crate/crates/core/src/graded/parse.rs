//! Line-oriented algebra files.
//!
//! ```text
//! # comments run to the end of the line
//! algebra m0
//! horizon 10
//! dim 0 2                            # optional, default 1 on degrees 1..=N
//! bracket 1 0 2 0 -> 3 0 1/1         # [basis(1,0), basis(2,0)] has 1 on basis(3,0)
//! ```
//!
//! Several lines for the same pair accumulate distinct targets. A pair may
//! be given in either orientation, but not in both.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{AlgebraSpec, BasisIndex, Element};
use crate::error::{Error, Result};
use crate::scalar::{format_scalar, parse_scalar, Scalar};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn at(line: usize, source: Error) -> Error {
    Error::AtLine {
        line,
        source: Box::new(source),
    }
}

fn int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

struct PairEntry {
    forward: bool,
    line: usize,
    targets: BTreeMap<BasisIndex, Scalar>,
}

pub fn parse_algebra_file(text: &str) -> Result<AlgebraSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (n, first) = lines.next().ok_or_else(|| syntax(1, "empty file"))?;
    let name = match first.split_whitespace().collect::<Vec<_>>()[..] {
        ["algebra", name] => name.to_string(),
        _ => return Err(syntax(n, "expected `algebra <name>`")),
    };
    let (n, second) = lines
        .next()
        .ok_or_else(|| syntax(n + 1, "expected `horizon <N>`"))?;
    let horizon: i32 = match second.split_whitespace().collect::<Vec<_>>()[..] {
        ["horizon", h] => int(n, h, "a horizon")?,
        _ => return Err(syntax(n, "expected `horizon <N>`")),
    };
    if horizon < 0 {
        return Err(syntax(n, "horizon must be non-negative"));
    }

    let mut dims: BTreeMap<i32, u8> = (1..=horizon).map(|d| (d, 1)).collect();
    let mut pairs: BTreeMap<(BasisIndex, BasisIndex), PairEntry> = BTreeMap::new();

    for (n, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[..] {
            ["dim", d, c] => {
                let d: i32 = int(n, d, "a degree")?;
                if d < 0 || d > horizon {
                    return Err(syntax(n, format!("degree {d} outside 0..={horizon}")));
                }
                dims.insert(d, int(n, c, "a count")?);
            }
            ["bracket", d1, s1, d2, s2, "->", d3, s3, coeff] => {
                let a = BasisIndex::new(int(n, d1, "a degree")?, int(n, s1, "a slot")?);
                let b = BasisIndex::new(int(n, d2, "a degree")?, int(n, s2, "a slot")?);
                let t = BasisIndex::new(int(n, d3, "a degree")?, int(n, s3, "a slot")?);
                let coeff = parse_scalar(coeff).map_err(|e| at(n, e))?;
                if t.degree != a.degree + b.degree {
                    return Err(at(
                        n,
                        Error::GradingViolation {
                            a,
                            b,
                            target: t,
                            got: t.degree,
                            expected: a.degree + b.degree,
                        },
                    ));
                }
                if a == b {
                    return Err(at(
                        n,
                        Error::ConflictingBracket {
                            a,
                            b,
                            reason: "the bracket of a vector with itself must vanish".into(),
                        },
                    ));
                }
                let forward = a < b;
                let key = if forward { (a, b) } else { (b, a) };
                let entry = pairs.entry(key).or_insert_with(|| PairEntry {
                    forward,
                    line: n,
                    targets: BTreeMap::new(),
                });
                if entry.forward != forward {
                    return Err(at(
                        n,
                        Error::ConflictingBracket {
                            a,
                            b,
                            reason: format!(
                                "reversed-order entry; pair first given on line {}",
                                entry.line
                            ),
                        },
                    ));
                }
                if let Some(prev) = entry.targets.get(&t) {
                    if *prev != coeff {
                        return Err(at(
                            n,
                            Error::ConflictingBracket {
                                a,
                                b,
                                reason: format!("target {t} given twice with different coefficients"),
                            },
                        ));
                    }
                }
                entry.targets.insert(t, coeff);
            }
            _ => return Err(syntax(n, format!("unrecognized line `{line}`"))),
        }
    }

    let mut spec = AlgebraSpec::new(name, horizon, dims)?;
    for ((a, b), entry) in pairs {
        let value = Element::from_terms(entry.targets);
        let (x, y) = if entry.forward { (a, b) } else { (b, a) };
        spec.set_bracket(x, y, value).map_err(|e| at(entry.line, e))?;
    }
    Ok(spec)
}

pub fn write_algebra_file(spec: &AlgebraSpec) -> String {
    let mut out = String::new();
    let h = spec.horizon();
    writeln!(out, "algebra {}", spec.name()).unwrap();
    writeln!(out, "horizon {h}").unwrap();
    for d in 0..=h {
        let default = if d >= 1 { 1 } else { 0 };
        if spec.dim(d) != default {
            writeln!(out, "dim {d} {}", spec.dim(d)).unwrap();
        }
    }
    for (a, b, value) in spec.table_entries() {
        for (t, c) in value.iter() {
            writeln!(
                out,
                "bracket {} {} {} {} -> {} {} {}",
                a.degree,
                a.slot,
                b.degree,
                b.slot,
                t.degree,
                t.slot,
                format_scalar(c)
            )
            .unwrap();
        }
    }
    out
}
