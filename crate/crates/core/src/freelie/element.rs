use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num::{One, Zero};

use super::assoc::cache;
use super::word::{HallWord, Multidegree};
use crate::ratlin::{fmt_scalar, Scalar};

/// A finite rational combination of Hall–Reutenauer words.
#[derive(Clone, PartialEq, Eq)]
pub struct LieElement {
    alphabet: usize,
    terms: BTreeMap<HallWord, Scalar>,
}

impl LieElement {
    pub fn zero(alphabet: usize) -> Self {
        LieElement {
            alphabet,
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(index: usize, alphabet: usize) -> Self {
        Self::from_word(HallWord::letter(index, alphabet))
    }

    pub fn from_word(w: HallWord) -> Self {
        let alphabet = w.alphabet();
        let mut terms = BTreeMap::new();
        terms.insert(w, Scalar::one());
        LieElement { alphabet, terms }
    }

    /// Sums repeated words and drops zero coefficients.
    pub fn from_terms<I: IntoIterator<Item = (HallWord, Scalar)>>(
        alphabet: usize,
        terms: I,
    ) -> Self {
        let mut out = LieElement::zero(alphabet);
        for (w, c) in terms {
            assert_eq!(w.alphabet(), alphabet, "word over a different alphabet");
            out.add_term(w, c);
        }
        out
    }

    fn add_term(&mut self, w: HallWord, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HallWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &HallWord) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return LieElement::zero(self.alphabet);
        }
        LieElement {
            alphabet: self.alphabet,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, &Scalar::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, &-Scalar::one())
    }

    pub fn add_scaled(&self, other: &Self, c: &Scalar) -> Self {
        assert_eq!(
            self.alphabet, other.alphabet,
            "elements over different alphabets"
        );
        let mut out = self.clone();
        for (w, v) in &other.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    /// Largest total degree of a term, or 0 for the zero element.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(HallWord::degree).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> u32 {
        self.terms.keys().map(HallWord::degree).min().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.max_degree() == self.min_degree()
    }

    /// Whether every term has the same multidegree.
    pub fn is_multihomogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(HallWord::multidegree);
        match it.next() {
            None => true,
            Some(first) => it.all(|m| m == first),
        }
    }

    pub fn multidegree(&self) -> Option<Multidegree> {
        if self.is_multihomogeneous() {
            self.terms.keys().next().map(|w| w.multidegree().clone())
        } else {
            None
        }
    }

    /// The component of total degree `k`.
    pub fn component(&self, k: u32) -> Self {
        self.filter(|w| w.degree() == k)
    }

    /// Drops the terms of total degree above `cap`.
    pub fn truncate(&self, cap: u32) -> Self {
        self.filter(|w| w.degree() <= cap)
    }

    pub fn filter<F: Fn(&HallWord) -> bool>(&self, keep: F) -> Self {
        LieElement {
            alphabet: self.alphabet,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn bracket(&self, other: &Self) -> Self {
        self.bracket_capped(other, None)
    }

    /// `[self, other]` with every product of total degree above `cap` skipped.
    pub fn bracket_truncated(&self, other: &Self, cap: u32) -> Self {
        self.bracket_capped(other, Some(cap))
    }

    fn bracket_capped(&self, other: &Self, cap: Option<u32>) -> Self {
        assert_eq!(
            self.alphabet, other.alphabet,
            "elements over different alphabets"
        );
        let ctx = cache(self.alphabet);
        let mut out = LieElement::zero(self.alphabet);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if cap.is_some_and(|c| u.degree() + v.degree() > c) {
                    continue;
                }
                let ab = a * b;
                for (w, c) in ctx.bracket_words(u, v).terms {
                    out.add_term(w, c * &ab);
                }
            }
        }
        out
    }

    /// Left-normed bracket `[e1, e2, ..., ek] = [[..[e1, e2], ..], ek]`.
    pub fn left_normed(elements: &[LieElement]) -> Self {
        let mut it = elements.iter();
        let first = it
            .next()
            .expect("left-normed bracket of no elements")
            .clone();
        it.fold(first, |acc, e| acc.bracket(e))
    }

    /// Renders as a signed sum of left-normed brackets, e.g.
    /// `[x,[x,y]] - 2*[x,y,y]`. Terms appear in degree order, then Hall order.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut words: Vec<(&HallWord, &Scalar)> = self.terms.iter().collect();
        words.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.cmp(b.0)));
        let mut s = String::new();
        for (k, (w, c)) in words.into_iter().enumerate() {
            let negative = *c < Scalar::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            if k == 0 {
                if negative {
                    s.push('-');
                }
            } else {
                s.push_str(if negative { " - " } else { " + " });
            }
            if !mag.is_one() {
                s.push_str(&fmt_scalar(&mag));
                s.push('*');
            }
            s.push_str(&w.render(names));
        }
        s
    }
}

impl std::fmt::Debug for LieElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = (1..=self.alphabet).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}
