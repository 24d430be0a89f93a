//! Weight-homogeneous linear and bilinear maps on a truncated algebra, and
//! the unknown layouts the solvers use to parametrize them.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graded::{AlgebraSpec, BasisIndex, Element};
use crate::linalg::{SparseVec, Vector};
use crate::scalar::Scalar;

/// A linear map of weight `k`: the image of a degree-`d` basis vector is
/// homogeneous of degree `d + k`. Defined on the source degrees in `window`;
/// basis vectors in the window without an entry map to zero.
///
/// The elementary map `e_i^j` is a single-entry instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    weight: i32,
    window: (i32, i32),
    entries: BTreeMap<BasisIndex, Element>,
}

impl GradedMap {
    pub fn zero(weight: i32, window: (i32, i32)) -> Self {
        Self {
            weight,
            window,
            entries: BTreeMap::new(),
        }
    }

    /// `e_src^tgt` (with coefficient) on the given window.
    pub fn elementary(src: BasisIndex, tgt: BasisIndex, window: (i32, i32)) -> Result<Self> {
        let mut m = Self::zero(tgt.degree - src.degree, window);
        m.set(src, Element::basis(tgt))?;
        Ok(m)
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn window(&self) -> (i32, i32) {
        self.window
    }

    pub fn in_window(&self, degree: i32) -> bool {
        self.window.0 <= degree && degree <= self.window.1
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BasisIndex, &Element)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn set(&mut self, src: BasisIndex, image: Element) -> Result<()> {
        if !self.in_window(src.degree) {
            return Err(Error::OutsideWindow(src));
        }
        if let Some(d) = image.degree()? {
            if d != src.degree + self.weight {
                return Err(Error::WrongDegree {
                    expected: src.degree + self.weight,
                    got: d,
                });
            }
        }
        if image.is_zero() {
            self.entries.remove(&src);
        } else {
            self.entries.insert(src, image);
        }
        Ok(())
    }

    /// Adds `image` to the current value at `src`.
    pub fn add_to(&mut self, src: BasisIndex, image: &Element) -> Result<()> {
        let current = self.image(src)?;
        self.set(src, &current + image)
    }

    pub fn image(&self, src: BasisIndex) -> Result<Element> {
        if !self.in_window(src.degree) {
            return Err(Error::OutsideWindow(src));
        }
        Ok(self.entries.get(&src).cloned().unwrap_or_default())
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (i, c) in x.iter() {
            if !self.in_window(i.degree) {
                return Err(Error::OutsideWindow(*i));
            }
            if let Some(img) = self.entries.get(i) {
                out.add_scaled(c, img);
            }
        }
        Ok(out)
    }

    /// Restriction to the source degrees in `window ∩ self.window`.
    pub fn restricted(&self, window: (i32, i32)) -> GradedMap {
        let window = (window.0.max(self.window.0), window.1.min(self.window.1));
        GradedMap {
            weight: self.weight,
            window,
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| window.0 <= i.degree && i.degree <= window.1)
                .map(|(i, v)| (*i, v.clone()))
                .collect(),
        }
    }

    /// Drops the entries whose source fails `keep`; the window is unchanged.
    pub fn restricted_to(&self, keep: impl Fn(BasisIndex) -> bool) -> GradedMap {
        GradedMap {
            weight: self.weight,
            window: self.window,
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, v)| (*i, v.clone()))
                .collect(),
        }
    }

    pub fn scaled(&self, c: &Scalar) -> GradedMap {
        let mut out = GradedMap::zero(self.weight, self.window);
        out.add_scaled(c, self);
        out
    }

    /// `self += c * other`, over the union of entries.
    pub fn add_scaled(&mut self, c: &Scalar, other: &GradedMap) {
        for (src, img) in &other.entries {
            let mut v = self.entries.remove(src).unwrap_or_default();
            v.add_scaled(c, img);
            if !v.is_zero() {
                self.entries.insert(*src, v);
            }
        }
    }

    pub fn render(&self, spec: &AlgebraSpec) -> String {
        if self.entries.is_empty() {
            return "0".into();
        }
        self.entries
            .iter()
            .map(|(src, img)| format!("{} -> {}", spec.label(*src), spec.render(img)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// A skew-symmetric bilinear map of weight `k`, stored on ordered pairs
/// `a < b` whose degree sum is at most `max_pair_degree`. `f(b, a)` is
/// `-f(a, b)` and `f(a, a)` is zero.
///
/// The elementary form `e^{i,j}_k` is a single-entry instance and the
/// inner biderivation `λ[·,·]` is the table scaled by `λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    weight: i32,
    max_pair_degree: i32,
    entries: BTreeMap<(BasisIndex, BasisIndex), Element>,
}

impl BilinearForm {
    pub fn zero(weight: i32, max_pair_degree: i32) -> Self {
        Self {
            weight,
            max_pair_degree,
            entries: BTreeMap::new(),
        }
    }

    /// `e^{a,b}_target`.
    pub fn elementary(
        a: BasisIndex,
        b: BasisIndex,
        target: BasisIndex,
        max_pair_degree: i32,
    ) -> Result<Self> {
        let mut f = Self::zero(target.degree - a.degree - b.degree, max_pair_degree);
        f.set(a, b, Element::basis(target))?;
        Ok(f)
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn max_pair_degree(&self) -> i32 {
        self.max_pair_degree
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored entries with `a < b`.
    pub fn entries(&self) -> impl Iterator<Item = (&(BasisIndex, BasisIndex), &Element)> {
        self.entries.iter()
    }

    /// Sets `f(a, b) = value` (and so `f(b, a) = -value`).
    pub fn set(&mut self, a: BasisIndex, b: BasisIndex, value: Element) -> Result<()> {
        if a == b {
            if value.is_zero() {
                return Ok(());
            }
            return Err(Error::Precondition(format!(
                "a skew form vanishes on the diagonal ({a}, {a})"
            )));
        }
        if a.degree + b.degree > self.max_pair_degree {
            return Err(Error::OutsideWindow(if a > b { a } else { b }));
        }
        let expected = a.degree + b.degree + self.weight;
        if let Some(d) = value.degree()? {
            if d != expected {
                return Err(Error::WrongDegree { expected, got: d });
            }
        }
        let (key, value) = if a < b { ((a, b), value) } else { ((b, a), -value) };
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    pub fn eval_basis(&self, a: BasisIndex, b: BasisIndex) -> Result<Element> {
        if a.degree + b.degree > self.max_pair_degree {
            return Err(Error::OutsideWindow(if a > b { a } else { b }));
        }
        Ok(match a.cmp(&b) {
            std::cmp::Ordering::Equal => Element::zero(),
            std::cmp::Ordering::Less => self.entries.get(&(a, b)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => -self.entries.get(&(b, a)).cloned().unwrap_or_default(),
        })
    }

    pub fn eval(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                out.add_scaled(&(ca * cb), &self.eval_basis(*a, *b)?);
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &Scalar) -> BilinearForm {
        let mut out = BilinearForm::zero(self.weight, self.max_pair_degree);
        out.add_scaled(c, self);
        out
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &BilinearForm) {
        for (key, v) in &other.entries {
            let mut cur = self.entries.remove(key).unwrap_or_default();
            cur.add_scaled(c, v);
            if !cur.is_zero() {
                self.entries.insert(*key, cur);
            }
        }
    }

    /// Keeps the pairs accepted by `keep`.
    pub fn restricted_to(&self, keep: impl Fn(BasisIndex, BasisIndex) -> bool) -> BilinearForm {
        BilinearForm {
            weight: self.weight,
            max_pair_degree: self.max_pair_degree,
            entries: self
                .entries
                .iter()
                .filter(|((a, b), _)| keep(*a, *b))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn render(&self, spec: &AlgebraSpec) -> String {
        if self.entries.is_empty() {
            return "0".into();
        }
        self.entries
            .iter()
            .map(|((a, b), v)| format!("({},{}) -> {}", spec.label(*a), spec.label(*b), spec.render(v)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// An element whose coefficients are linear forms in solver unknowns.
#[derive(Clone, Debug, Default)]
pub(crate) struct LinearElement {
    terms: BTreeMap<BasisIndex, SparseVec>,
}

fn add_form(dst: &mut SparseVec, c: &Scalar, src: &SparseVec) {
    for (col, v) in src {
        let delta = c * v;
        let entry = dst.entry(*col).or_insert_with(Scalar::zero);
        *entry += delta;
        if entry.is_zero() {
            dst.remove(col);
        }
    }
}

impl LinearElement {
    pub fn add_unknown(&mut self, target: BasisIndex, col: usize, c: &Scalar) {
        add_form(
            self.terms.entry(target).or_default(),
            c,
            &SparseVec::from([(col, Scalar::from_integer(1.into()))]),
        );
    }

    /// `self += c * [other, b]`
    pub fn add_bracket_right(
        &mut self,
        spec: &AlgebraSpec,
        c: &Scalar,
        other: &LinearElement,
        b: BasisIndex,
    ) -> Result<()> {
        for (t, form) in &other.terms {
            let mut v = Element::zero();
            spec.accumulate_bracket(*t, b, c, &mut v)?;
            for (s, coeff) in v.iter() {
                add_form(self.terms.entry(*s).or_default(), coeff, form);
            }
        }
        Ok(())
    }

    /// Nonzero coefficient forms, one per target basis vector.
    pub fn into_rows(self) -> impl Iterator<Item = SparseVec> {
        self.terms.into_values().filter(|r| !r.is_empty())
    }

    pub fn into_terms(self) -> BTreeMap<BasisIndex, SparseVec> {
        self.terms
    }
}

/// Unknowns `D(src)_tgt` of a weight-`k` map, ordered by
/// (source degree, source slot, target slot).
pub(crate) struct MapUnknowns {
    pub weight: i32,
    pub window: (i32, i32),
    cols: Vec<(BasisIndex, BasisIndex)>,
    index: HashMap<BasisIndex, Vec<(BasisIndex, usize)>>,
}

impl MapUnknowns {
    /// Sources are the basis vectors with degree in `window`; targets whose
    /// component is empty (or past the horizon) are omitted.
    pub fn new(spec: &AlgebraSpec, weight: i32, window: (i32, i32)) -> Self {
        let mut cols = Vec::new();
        let mut index: HashMap<BasisIndex, Vec<(BasisIndex, usize)>> = HashMap::new();
        for src in spec.basis_in(window.0, window.1) {
            for tgt in spec.component(src.degree + weight) {
                index.entry(src).or_default().push((tgt, cols.len()));
                cols.push((src, tgt));
            }
        }
        Self {
            weight,
            window,
            cols,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    /// `D(src)` as a symbolic element.
    pub fn image(&self, src: BasisIndex) -> LinearElement {
        let mut out = LinearElement::default();
        self.add_image(&mut out, &Scalar::from_integer(1.into()), src);
        out
    }

    /// `out += c * D(src)`
    pub fn add_image(&self, out: &mut LinearElement, c: &Scalar, src: BasisIndex) {
        if let Some(targets) = self.index.get(&src) {
            for (tgt, col) in targets {
                out.add_unknown(*tgt, *col, c);
            }
        }
    }

    pub fn image_of(&self, x: &Element) -> LinearElement {
        let mut out = LinearElement::default();
        for (i, c) in x.iter() {
            self.add_image(&mut out, c, *i);
        }
        out
    }

    pub fn to_map(&self, v: &SparseVec) -> GradedMap {
        let mut m = GradedMap::zero(self.weight, self.window);
        for (col, c) in v {
            let (src, tgt) = self.cols[*col];
            m.add_to(src, &Element::term(tgt, c.clone())).expect("in window");
        }
        m
    }

    /// Coordinates of `m` in this layout; entries outside the layout are
    /// ignored (restriction).
    pub fn project(&self, m: &GradedMap) -> Vector {
        let mut out = vec![Scalar::zero(); self.cols.len()];
        for (src, img) in m.entries() {
            if let Some(targets) = self.index.get(src) {
                for (tgt, col) in targets {
                    out[*col] = img.coeff(*tgt);
                }
            }
        }
        out
    }
}

/// Unknowns `f(a, b)_tgt` of a weight-`k` skew form, `a < b`, ordered by
/// (a, b, target slot).
pub(crate) struct FormUnknowns {
    pub weight: i32,
    pub max_pair_degree: i32,
    cols: Vec<(BasisIndex, BasisIndex, BasisIndex)>,
    index: HashMap<(BasisIndex, BasisIndex), Vec<(BasisIndex, usize)>>,
}

impl FormUnknowns {
    pub fn new(spec: &AlgebraSpec, weight: i32, max_pair_degree: i32) -> Self {
        let basis = spec.basis();
        let mut cols = Vec::new();
        let mut index: HashMap<_, Vec<_>> = HashMap::new();
        for (i, &a) in basis.iter().enumerate() {
            for &b in &basis[i + 1..] {
                if a.degree + b.degree > max_pair_degree {
                    break;
                }
                for tgt in spec.component(a.degree + b.degree + weight) {
                    index.entry((a, b)).or_default().push((tgt, cols.len()));
                    cols.push((a, b, tgt));
                }
            }
        }
        Self {
            weight,
            max_pair_degree,
            cols,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    /// `out += c * f(a, b)`
    pub fn add_value(&self, out: &mut LinearElement, c: &Scalar, a: BasisIndex, b: BasisIndex) {
        let (key, c) = match a.cmp(&b) {
            std::cmp::Ordering::Equal => return,
            std::cmp::Ordering::Less => ((a, b), c.clone()),
            std::cmp::Ordering::Greater => ((b, a), -c),
        };
        if let Some(targets) = self.index.get(&key) {
            for (tgt, col) in targets {
                out.add_unknown(*tgt, *col, &c);
            }
        }
    }

    pub fn to_form(&self, v: &SparseVec) -> BilinearForm {
        let mut f = BilinearForm::zero(self.weight, self.max_pair_degree);
        let mut values: BTreeMap<(BasisIndex, BasisIndex), Element> = BTreeMap::new();
        for (col, c) in v {
            let (a, b, tgt) = self.cols[*col];
            values.entry((a, b)).or_default().add_term(tgt, c.clone());
        }
        for ((a, b), value) in values {
            f.set(a, b, value).expect("in window");
        }
        f
    }

    pub fn project(&self, f: &BilinearForm) -> Vector {
        let mut out = vec![Scalar::zero(); self.cols.len()];
        for (key, v) in f.entries() {
            if let Some(targets) = self.index.get(key) {
                for (tgt, col) in targets {
                    out[*col] = v.coeff(*tgt);
                }
            }
        }
        out
    }
}
