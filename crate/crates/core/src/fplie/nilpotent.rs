use std::collections::{BTreeMap, HashMap};

use num::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freelie::{HallWord, LieElement};
use crate::ratlin::{fmt_scalar, Scalar, SparseVec};

/// A finite-dimensional nilpotent Lie algebra on a weighted basis, given by
/// exact structure constants `[b_i, b_j] = sum_k c_ij^k b_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentLieAlgebra {
    labels: Vec<String>,
    weights: Vec<u32>,
    /// Nonzero brackets `[b_i, b_j]` for `i < j`.
    brackets: BTreeMap<(usize, usize), SparseVec>,
}

impl NilpotentLieAlgebra {
    /// Builds the algebra from brackets `[b_i, b_j]` with `i < j`, checking
    /// the weight filtration and the Jacobi identity.
    pub fn new(
        labels: Vec<String>,
        weights: Vec<u32>,
        brackets: BTreeMap<(usize, usize), SparseVec>,
    ) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::Invalid("labels and weights differ in length".into()));
        }
        let n = labels.len();
        for (&(i, j), v) in &brackets {
            if i >= j || j >= n {
                return Err(Error::Invalid(format!(
                    "bracket key ({i}, {j}) is not an ordered pair of basis indices"
                )));
            }
            for (k, _) in v.iter() {
                if *k >= n {
                    return Err(Error::Invalid(format!(
                        "bracket [{i},{j}] has a component outside the basis"
                    )));
                }
                if weights[*k] < weights[i] + weights[j] {
                    return Err(Error::Invalid(format!(
                        "[{}, {}] has a component on {} of weight {} below {}",
                        labels[i],
                        labels[j],
                        labels[*k],
                        weights[*k],
                        weights[i] + weights[j]
                    )));
                }
            }
        }
        let g = NilpotentLieAlgebra {
            labels,
            weights,
            brackets: brackets.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        };
        g.check_jacobi()?;
        Ok(g)
    }

    pub fn abelian(dim: usize) -> Self {
        NilpotentLieAlgebra {
            labels: (1..=dim).map(|i| format!("x{i}")).collect(),
            weights: vec![1; dim],
            brackets: BTreeMap::new(),
        }
    }

    /// The three-dimensional Heisenberg algebra `[x1, x2] = x3`.
    pub fn heisenberg() -> Self {
        let mut b = BTreeMap::new();
        b.insert((0, 1), SparseVec::unit(2));
        NilpotentLieAlgebra {
            labels: vec!["x1".into(), "x2".into(), "x3".into()],
            weights: vec![1, 1, 2],
            brackets: b,
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// `[b_i, b_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseVec {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => SparseVec::new(),
            Less => self.brackets.get(&(i, j)).cloned().unwrap_or_default(),
            Greater => self
                .brackets
                .get(&(j, i))
                .map(SparseVec::neg)
                .unwrap_or_default(),
        }
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.bracket_basis(i, j)
            .get(k)
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Nonzero brackets `[b_i, b_j]`, `i < j`.
    pub fn brackets(&self) -> impl Iterator<Item = (&(usize, usize), &SparseVec)> {
        self.brackets.iter()
    }

    pub fn bracket(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                if i != j {
                    out = out.add_scaled(&self.bracket_basis(*i, *j), &(a * b));
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.is_empty()
    }

    /// Whether every bracket is homogeneous for the weights.
    pub fn is_graded(&self) -> bool {
        self.brackets.iter().all(|(&(i, j), v)| {
            v.iter()
                .all(|(k, _)| self.weights[*k] == self.weights[i] + self.weights[j])
        })
    }

    /// Number of basis elements of each weight.
    pub fn graded_dims(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for w in &self.weights {
            *out.entry(*w).or_insert(0) += 1;
        }
        out
    }

    pub fn check_jacobi(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (SparseVec::unit(i), SparseVec::unit(j), SparseVec::unit(k));
                    let s = self
                        .bracket(&ei, &self.bracket_basis(j, k))
                        .add(&self.bracket(&ej, &self.bracket_basis(k, i)))
                        .add(&self.bracket(&ek, &self.bracket_basis(i, j)));
                    if !s.is_zero() {
                        return Err(Error::Invalid(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Image of a free Lie element under the morphism sending generator `i`
    /// to `images[i]`.
    pub fn evaluate(&self, e: &LieElement, images: &[SparseVec]) -> SparseVec {
        let mut memo: HashMap<HallWord, SparseVec> = HashMap::new();
        let mut out = SparseVec::new();
        for (w, c) in e.terms() {
            out = out.add_scaled(&self.evaluate_word(w, images, &mut memo), c);
        }
        out
    }

    fn evaluate_word(
        &self,
        w: &HallWord,
        images: &[SparseVec],
        memo: &mut HashMap<HallWord, SparseVec>,
    ) -> SparseVec {
        if let Some(i) = w.as_letter() {
            return images[i].clone();
        }
        if let Some(v) = memo.get(w) {
            return v.clone();
        }
        let children = w.children();
        let mut acc = self.evaluate_word(&children[0], images, memo);
        for c in &children[1..] {
            if acc.is_zero() {
                break;
            }
            let cv = self.evaluate_word(c, images, memo);
            acc = self.bracket(&acc, &cv);
        }
        memo.insert(w.clone(), acc.clone());
        acc
    }

    /// Renders a vector over the basis labels, e.g. `x1 - 1/2*x3`.
    pub fn render_vec(&self, v: &SparseVec) -> String {
        render_combination(v, &self.labels)
    }

    pub fn to_report(&self) -> AlgebraReport {
        AlgebraReport {
            dim: self.dim(),
            basis: self.labels.clone(),
            weights: self.weights.clone(),
            brackets: self
                .brackets
                .iter()
                .map(|(&(i, j), v)| {
                    (
                        format!("[{},{}]", self.labels[i], self.labels[j]),
                        self.render_vec(v),
                    )
                })
                .collect(),
        }
    }
}

/// Serializable summary of a nilpotent Lie algebra.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub dim: usize,
    pub basis: Vec<String>,
    pub weights: Vec<u32>,
    pub brackets: Vec<(String, String)>,
}

pub(crate) fn render_combination(v: &SparseVec, labels: &[String]) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (i, c)) in v.iter().enumerate() {
        let neg = *c < Scalar::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        if mag != Scalar::from_integer(1.into()) {
            s.push_str(&fmt_scalar(&mag));
            s.push('*');
        }
        s.push_str(&labels[*i]);
    }
    s
}
