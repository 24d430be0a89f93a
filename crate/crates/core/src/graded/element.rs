use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::BasisIndex;
use crate::error::{Error, Result};
use crate::scalar::{display_scalar, Scalar};

/// A finitely supported rational combination of basis vectors. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<BasisIndex, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(index: BasisIndex) -> Self {
        Self::term(index, Scalar::one())
    }

    pub fn term(index: BasisIndex, coeff: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(index, coeff);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisIndex, Scalar)>) -> Self {
        let mut out = Self::zero();
        for (index, coeff) in terms {
            out.add_term(index, coeff);
        }
        out
    }

    /// Sum of the given basis vectors with coefficient one.
    pub fn sum_of(indices: impl IntoIterator<Item = BasisIndex>) -> Self {
        Self::from_terms(indices.into_iter().map(|i| (i, Scalar::one())))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, index: BasisIndex) -> Scalar {
        self.terms.get(&index).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        self.terms.keys().copied()
    }

    pub fn add_term(&mut self, index: BasisIndex, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&index) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&index);
                }
            }
            None => {
                self.terms.insert(index, coeff);
            }
        }
    }

    /// `self += coeff * other`
    pub fn add_scaled(&mut self, coeff: &Scalar, other: &Element) {
        if coeff.is_zero() {
            return;
        }
        for (index, c) in &other.terms {
            self.add_term(*index, coeff * c);
        }
    }

    pub fn scaled(&self, coeff: &Scalar) -> Element {
        if coeff.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(i, c)| (*i, c * coeff)).collect(),
        }
    }

    /// The common degree of all terms; `None` for zero.
    pub fn degree(&self) -> Result<Option<i32>> {
        let mut degrees = self.terms.keys().map(|i| i.degree);
        let Some(first) = degrees.next() else {
            return Ok(None);
        };
        if degrees.all(|d| d == first) {
            Ok(Some(first))
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().map(|i| i.degree).max()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().map(|i| i.degree).min()
    }

    /// Keeps only the terms whose index satisfies `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(BasisIndex) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    /// Renders with a custom basis labelling, e.g. `e1 - 1/2*x4`.
    pub fn render(&self, label: impl Fn(BasisIndex) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, (index, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if n == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let magnitude = c.abs();
            if !magnitude.is_one() {
                out.push_str(&display_scalar(&magnitude));
                out.push('*');
            }
            out.push_str(&label(*index));
        }
        out
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|i| {
            if i.slot == 0 {
                format!("e{}", i.degree)
            } else {
                format!("e{}.{}", i.degree, i.slot)
            }
        }))
    }
}

impl From<BasisIndex> for Element {
    fn from(index: BasisIndex) -> Self {
        Element::basis(index)
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), rhs);
        out
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(&-Scalar::one(), rhs);
        out
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scaled(&-Scalar::one())
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

impl Mul<&Element> for &Scalar {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scaled(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::e;
    use crate::scalar::{frac, int};

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut a = Element::term(e(3), int(2));
        a.add_term(e(3), int(-2));
        assert!(a.is_zero());
        assert_eq!(a.degree().unwrap(), None);
        assert!(Element::term(e(1), int(0)).is_zero());
    }

    #[test]
    fn degree_of_mixed_element_is_an_error() {
        let a = Element::sum_of([e(1), e(2)]);
        assert!(a.degree().is_err());
        assert_eq!(Element::basis(e(4)).degree().unwrap(), Some(4));
    }

    #[test]
    fn render() {
        let a = Element::from_terms([(e(1), int(1)), (e(2), frac(-1, 2)), (e(3), int(-1))]);
        assert_eq!(a.to_string(), "e1 - 1/2*e2 - e3");
    }
}
