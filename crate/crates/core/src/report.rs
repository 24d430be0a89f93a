//! Solve reports and their two serializations: a human table and a
//! one-line JSON record per report.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{BasisIndex, Element};
use crate::maps::{BilinearForm, GradedMap};
use crate::scalar::{format_scalar, parse_scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveKind {
    Derivation,
    Biderivation,
    Commuting,
    LocalOverapprox,
    TwoLocalOverapprox,
}

impl SolveKind {
    pub fn name(self) -> &'static str {
        match self {
            SolveKind::Derivation => "derivation",
            SolveKind::Biderivation => "biderivation",
            SolveKind::Commuting => "commuting",
            SolveKind::LocalOverapprox => "local-overapprox",
            SolveKind::TwoLocalOverapprox => "two-local-overapprox",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReportBasis {
    Maps(Vec<GradedMap>),
    Forms(Vec<BilinearForm>),
}

impl ReportBasis {
    pub fn len(&self) -> usize {
        match self {
            ReportBasis::Maps(v) => v.len(),
            ReportBasis::Forms(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn maps(&self) -> &[GradedMap] {
        match self {
            ReportBasis::Maps(v) => v,
            ReportBasis::Forms(_) => &[],
        }
    }

    pub fn forms(&self) -> &[BilinearForm] {
        match self {
            ReportBasis::Forms(v) => v,
            ReportBasis::Maps(_) => &[],
        }
    }
}

/// The outcome of one constraint solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub algebra: String,
    pub kind: SolveKind,
    pub weight: i32,
    pub horizon: i32,
    /// Source degrees for maps; pair-degree sums for forms.
    pub window: (i32, i32),
    pub dimension: usize,
    pub basis: ReportBasis,
    pub closed_form_match: Option<bool>,
    pub stability: Option<bool>,
}

impl SolveReport {
    /// Whether none of the attached checks failed.
    pub fn ok(&self) -> bool {
        self.closed_form_match != Some(false) && self.stability != Some(false)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireSource {
    Single((i32, u8)),
    Pair([(i32, u8); 2]),
}

#[derive(Serialize, Deserialize)]
struct WireEntry {
    source: WireSource,
    target: (i32, u8),
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct WireReport {
    algebra: String,
    kind: SolveKind,
    weight: i32,
    horizon: i32,
    window: (i32, i32),
    dimension: usize,
    basis: Vec<Vec<WireEntry>>,
    closed_form_match: Option<bool>,
    stability: Option<bool>,
}

fn pair(i: BasisIndex) -> (i32, u8) {
    (i.degree, i.slot)
}

fn index((degree, slot): (i32, u8)) -> BasisIndex {
    BasisIndex::new(degree, slot)
}

fn wire_entries<'a>(
    sources: impl Iterator<Item = (WireSourceRef, &'a Element)>,
) -> Vec<WireEntry> {
    let mut out = Vec::new();
    for (src, img) in sources {
        for (t, c) in img.iter() {
            out.push(WireEntry {
                source: match src {
                    WireSourceRef::Single(a) => WireSource::Single(pair(a)),
                    WireSourceRef::Pair(a, b) => WireSource::Pair([pair(a), pair(b)]),
                },
                target: pair(*t),
                coeff: format_scalar(c),
            });
        }
    }
    out
}

#[derive(Clone, Copy)]
enum WireSourceRef {
    Single(BasisIndex),
    Pair(BasisIndex, BasisIndex),
}

fn to_wire(r: &SolveReport) -> WireReport {
    let basis = match &r.basis {
        ReportBasis::Maps(maps) => maps
            .iter()
            .map(|m| wire_entries(m.entries().map(|(s, v)| (WireSourceRef::Single(*s), v))))
            .collect(),
        ReportBasis::Forms(forms) => forms
            .iter()
            .map(|f| {
                wire_entries(
                    f.entries()
                        .map(|((a, b), v)| (WireSourceRef::Pair(*a, *b), v)),
                )
            })
            .collect(),
    };
    WireReport {
        algebra: r.algebra.clone(),
        kind: r.kind,
        weight: r.weight,
        horizon: r.horizon,
        window: r.window,
        dimension: r.dimension,
        basis,
        closed_form_match: r.closed_form_match,
        stability: r.stability,
    }
}

pub fn write_report(r: &SolveReport, format: Format) -> String {
    match format {
        Format::Machine => serde_json::to_string(&to_wire(r)).expect("serializable"),
        Format::Text => text(r),
    }
}

fn flag(v: Option<bool>, yes: &str, no: &str) -> String {
    match v {
        Some(true) => yes.into(),
        Some(false) => no.into(),
        None => "n/a".into(),
    }
}

fn text(r: &SolveReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<6} {:<20} k={:<4} N={:<3} window={}..{:<4} dim={}  closed-form={}  stable={}",
        r.algebra,
        r.kind.name(),
        r.weight,
        r.horizon,
        r.window.0,
        r.window.1,
        r.dimension,
        flag(r.closed_form_match, "match", "MISMATCH"),
        flag(r.stability, "yes", "NO"),
    )
    .unwrap();
    const SHOWN: usize = 6;
    let lines: Vec<(usize, Vec<String>)> = match &r.basis {
        ReportBasis::Maps(maps) => maps
            .iter()
            .map(|m| {
                let terms: Vec<String> = m
                    .entries()
                    .map(|(s, v)| format!("{} -> {}", Element::basis(*s), v))
                    .collect();
                (terms.len(), terms)
            })
            .collect(),
        ReportBasis::Forms(forms) => forms
            .iter()
            .map(|f| {
                let terms: Vec<String> = f
                    .entries()
                    .map(|((a, b), v)| {
                        format!("({}, {}) -> {}", Element::basis(*a), Element::basis(*b), v)
                    })
                    .collect();
                (terms.len(), terms)
            })
            .collect(),
    };
    for (i, (count, terms)) in lines.iter().enumerate() {
        let mut shown = terms.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
        if *count > SHOWN {
            write!(shown, ", ... ({count} entries)").unwrap();
        }
        writeln!(out, "    [{i}] {shown}").unwrap();
    }
    out
}

/// Parses one machine-format record.
pub fn parse_report(line: &str) -> Result<SolveReport> {
    let w: WireReport =
        serde_json::from_str(line).map_err(|e| Error::BadReport(e.to_string()))?;
    let basis = match w.kind {
        SolveKind::Biderivation => {
            let mut forms = Vec::new();
            for entries in &w.basis {
                let mut f = BilinearForm::zero(w.weight, w.window.1);
                for en in entries {
                    let WireSource::Pair([a, b]) = en.source else {
                        return Err(Error::BadReport("form entry needs a source pair".into()));
                    };
                    let (a, b) = (index(a), index(b));
                    let mut v = f.eval_basis(a, b)?;
                    v.add_term(index(en.target), parse_scalar(&en.coeff)?);
                    f.set(a, b, v)?;
                }
                forms.push(f);
            }
            ReportBasis::Forms(forms)
        }
        _ => {
            let mut maps = Vec::new();
            for entries in &w.basis {
                let mut m = GradedMap::zero(w.weight, w.window);
                for en in entries {
                    let WireSource::Single(s) = en.source else {
                        return Err(Error::BadReport("map entry needs a single source".into()));
                    };
                    m.add_to(index(s), &Element::term(index(en.target), parse_scalar(&en.coeff)?))?;
                }
                maps.push(m);
            }
            ReportBasis::Maps(maps)
        }
    };
    if basis.len() != w.dimension {
        return Err(Error::BadReport(format!(
            "dimension {} but {} basis elements",
            w.dimension,
            basis.len()
        )));
    }
    Ok(SolveReport {
        algebra: w.algebra,
        kind: w.kind,
        weight: w.weight,
        horizon: w.horizon,
        window: w.window,
        dimension: w.dimension,
        basis,
        closed_form_match: w.closed_form_match,
        stability: w.stability,
    })
}
