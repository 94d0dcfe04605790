use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};

use super::ideal::{ideal_closure, WordIndex};
use super::{GradedDims, LiePresentation, NilpotentLieAlgebra, RelatorScheme};
use crate::error::{Error, Result};
use crate::freelie::{HallWord, LieElement};
use crate::ratlin::{Scalar, SparseVec, Subspace};

/// A presentation with the generators that occur linearly in the relators
/// eliminated, valid modulo terms of degree above `cap`.
pub(crate) struct Reduced {
    /// Indices of the surviving generators in the original alphabet.
    pub kept: Vec<usize>,
    pub names: Vec<String>,
    /// Relators over the surviving generators, truncated at `cap`.
    pub relators: Vec<LieElement>,
    /// Image of each original generator, over the surviving generators.
    pub images: Vec<LieElement>,
}

/// Substitutes `images[i]` for generator `i`, discarding degrees above `cap`.
pub(crate) fn substitute(
    e: &LieElement,
    images: &[LieElement],
    target_alphabet: usize,
    cap: u32,
) -> LieElement {
    fn word(
        w: &HallWord,
        images: &[LieElement],
        cap: u32,
        memo: &mut HashMap<HallWord, LieElement>,
    ) -> LieElement {
        if let Some(i) = w.as_letter() {
            return images[i].truncate(cap);
        }
        if let Some(v) = memo.get(w) {
            return v.clone();
        }
        let children = w.children();
        let mut acc = word(&children[0], images, cap, memo);
        for c in &children[1..] {
            if acc.is_zero() {
                break;
            }
            acc = acc.bracket_truncated(&word(c, images, cap, memo), cap);
        }
        memo.insert(w.clone(), acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    let mut out = LieElement::zero(target_alphabet);
    for (w, c) in e.terms() {
        out = out.add_scaled(&word(w, images, cap, &mut memo), c);
    }
    out
}

pub(crate) fn reduce_presentation(p: &LiePresentation, cap: u32) -> Reduced {
    let n = p.alphabet();
    // Gauss-Jordan on the linear parts, applied to whole relators.
    let mut rows: Vec<LieElement> = p.relators().iter().map(|r| r.truncate(cap)).collect();
    let linear = |r: &LieElement, j: usize| r.coefficient(&HallWord::letter(j, n));
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; rows.len()];
    for col in 0..n {
        let Some(r) = (0..rows.len()).find(|&r| !used[r] && !linear(&rows[r], col).is_zero())
        else {
            continue;
        };
        let inv = Scalar::one() / linear(&rows[r], col);
        rows[r] = rows[r].scale(&inv);
        for other in 0..rows.len() {
            if other != r {
                let c = linear(&rows[other], col);
                if !c.is_zero() {
                    rows[other] = rows[other].add_scaled(&rows[r].clone(), &-c);
                }
            }
        }
        used[r] = true;
        pivots.push((col, r));
    }
    let pivot_of: HashMap<usize, usize> = pivots.iter().copied().collect();
    let kept: Vec<usize> = (0..n).filter(|j| !pivot_of.contains_key(j)).collect();
    let m = kept.len();
    let position: HashMap<usize, usize> = kept.iter().enumerate().map(|(k, j)| (*j, k)).collect();

    // x_p = -(rest of its row); iterate the substitution to a fixed point
    // modulo degree > cap.
    let mut images: Vec<LieElement> = (0..n)
        .map(|j| match position.get(&j) {
            Some(&k) => LieElement::generator(k, m),
            None => LieElement::zero(m),
        })
        .collect();
    for _ in 0..cap.max(1) {
        let mut next = images.clone();
        for &(col, r) in &pivots {
            let rest = rows[r].sub(&LieElement::generator(col, n));
            next[col] = substitute(&rest, &images, m, cap).neg();
        }
        images = next;
    }
    let relators: Vec<LieElement> = rows
        .iter()
        .enumerate()
        .filter(|(r, _)| !used[*r])
        .map(|(_, e)| substitute(e, &images, m, cap))
        .filter(|e| !e.is_zero())
        .collect();
    Reduced {
        names: kept.iter().map(|&j| p.generators()[j].clone()).collect(),
        kept,
        relators,
        images,
    }
}

/// The nilpotent quotient `L/Γ_n` together with the images of the original
/// generators.
#[derive(Clone, Debug)]
pub struct NilpotentQuotient {
    pub algebra: NilpotentLieAlgebra,
    /// Image of each generator of the presentation, in basis coordinates.
    pub generator_images: Vec<SparseVec>,
    /// Hall words (over the surviving generators) representing the basis.
    pub representatives: Vec<HallWord>,
    /// Names of the generators that survive elimination.
    pub reduced_generators: Vec<String>,
    index: WordIndex,
    ideal: Subspace,
    rep_position: HashMap<usize, usize>,
}

impl NilpotentQuotient {
    /// Coordinates of an element over the surviving generators.
    pub fn project(&self, e: &LieElement) -> SparseVec {
        let v = self.ideal.reduce(&self.index.to_vec(e));
        v.reindex(|i| self.rep_position.get(&i).copied())
    }
}

/// `L/Γ_n`: the free Lie algebra modulo the relators and all brackets of
/// length `n` or more.
///
/// The basis consists of the Hall words that are not pivots of the reduced
/// echelon form of the truncated ideal, with columns ordered by degree and
/// then by the word order. Because that order is degree-first, the basis for
/// `n` is the weight `< n` part of the basis for `n + 1`, with identical
/// structure constants.
pub fn lcs_quotient(p: &LiePresentation, class_bound: u32) -> Result<NilpotentQuotient> {
    if class_bound == 0 {
        return Err(Error::Precondition("class bound must be at least 1".into()));
    }
    let cap = class_bound - 1;
    let (reduced, relators_ideal): (Reduced, Option<u32>) = match p.scheme() {
        RelatorScheme::Finite(_) => (reduce_presentation(p, cap), None),
        RelatorScheme::Derived(k) => {
            if *k >= 2 && (p.alphabet() > 2 || class_bound > 8) {
                return Err(Error::Precondition(format!(
                    "nilpotent quotients of a derived scheme with k >= 2 are limited to 2 generators and class bound 8 (got {} generators, class bound {class_bound})",
                    p.alphabet()
                )));
            }
            let n = p.alphabet();
            let images = (0..n).map(|i| LieElement::generator(i, n)).collect();
            (
                Reduced {
                    kept: (0..n).collect(),
                    names: p.generators().to_vec(),
                    relators: Vec::new(),
                    images,
                },
                Some(*k),
            )
        }
    };
    let m = reduced.kept.len();
    let index = WordIndex::new(m, cap);
    let ideal = match relators_ideal {
        None => ideal_closure(&index, &reduced.relators),
        Some(k) => Subspace::spanned_by(
            index.len(),
            index
                .words()
                .iter()
                .enumerate()
                .filter(|(_, w)| w.level() >= k)
                .map(|(i, _)| SparseVec::unit(i)),
        ),
    };
    let reps: Vec<usize> = (0..index.len()).filter(|c| !ideal.is_pivot(*c)).collect();
    let rep_position: HashMap<usize, usize> =
        reps.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let representatives: Vec<HallWord> = reps.iter().map(|&c| index.words()[c].clone()).collect();
    let project = |e: &LieElement| {
        ideal
            .reduce(&index.to_vec(e))
            .reindex(|i| rep_position.get(&i).copied())
    };

    let mut brackets = BTreeMap::new();
    for a in 0..reps.len() {
        for b in a + 1..reps.len() {
            let (u, v) = (&representatives[a], &representatives[b]);
            if u.degree() + v.degree() > cap {
                continue;
            }
            let e = LieElement::from_word(u.clone()).bracket(&LieElement::from_word(v.clone()));
            let coords = project(&e);
            if !coords.is_zero() {
                brackets.insert((a, b), coords);
            }
        }
    }
    let labels = representatives
        .iter()
        .map(|w| w.render(&reduced.names))
        .collect();
    let weights = representatives.iter().map(HallWord::degree).collect();
    let algebra = NilpotentLieAlgebra::new(labels, weights, brackets)
        .map_err(|e| Error::Consistency(format!("nilpotent quotient: {e}")))?;
    let generator_images = reduced.images.iter().map(project).collect();
    Ok(NilpotentQuotient {
        algebra,
        generator_images,
        representatives,
        reduced_generators: reduced.names,
        index,
        ideal,
        rep_position,
    })
}

/// `dim Γ_k/Γ_{k+1}` for `1 <= k < n`.
pub fn lcs_graded_dims(p: &LiePresentation, class_bound: u32) -> Result<GradedDims> {
    let q = lcs_quotient(p, class_bound)?;
    let mut out: GradedDims = (1..class_bound).map(|k| (k, 0)).collect();
    for w in q.algebra.weights() {
        *out.get_mut(w).unwrap() += 1;
    }
    Ok(out)
}

/// `dim H_2(L/Γ_n)` by the Hopf formula on the reduced presentation:
/// `((J + Λ_n) ∩ Λ^{≥2}) / [Λ, J]`, computed in `Λ^{≤n}`.
pub fn hopf_h2_of_quotient(p: &LiePresentation, class_bound: u32) -> Result<usize> {
    if class_bound < 2 {
        return Err(Error::Precondition("class bound must be at least 2".into()));
    }
    let cap = class_bound;
    let (m, relators) = match p.scheme() {
        RelatorScheme::Finite(_) => {
            let r = reduce_presentation(p, cap);
            (r.kept.len(), r.relators)
        }
        RelatorScheme::Derived(_) => {
            let (index, s) = super::ideal_span(p, cap);
            (
                p.alphabet(),
                s.basis().map(|v| index.to_element(v)).collect(),
            )
        }
    };
    let index = WordIndex::new(m, cap);
    let ideal = ideal_closure(&index, &relators);
    let mut numerator = ideal.clone();
    for c in index.degree_range(cap) {
        numerator.insert(SparseVec::unit(c));
    }
    let gens: Vec<LieElement> = (0..m).map(|i| LieElement::generator(i, m)).collect();
    let mut commutator = Subspace::zero(index.len());
    for v in ideal.basis() {
        let e = index.to_element(v);
        for x in &gens {
            commutator.insert(index.to_vec(&x.bracket_truncated(&e, cap)));
        }
    }
    let above_linear = index.degree_range(2).start;
    Ok(numerator.dim_with_pivot_at_least(above_linear) - commutator.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::witt_dim;

    fn heis() -> LiePresentation {
        LiePresentation::parse(&["x1", "x2", "x3"], &["x3 + [x1,x2]", "[x1,x3]", "[x2,x3]"])
            .unwrap()
    }

    #[test]
    fn free_quotient_matches_witt() {
        let p = LiePresentation::free(vec!["x".into(), "y".into()]);
        let d = lcs_graded_dims(&p, 6).unwrap();
        for k in 1..6 {
            assert_eq!(d[&k] as u128, witt_dim(2, k));
        }
        assert_eq!(lcs_quotient(&p, 4).unwrap().algebra.dim(), 5);
    }

    #[test]
    fn heisenberg_holonomy_quotient() {
        let q = lcs_quotient(&heis(), 4).unwrap();
        assert_eq!(q.algebra.graded_dims(), GradedDims::from([(1, 2), (2, 1)]));
        // x3 maps to -[x1,x2]
        let x3 = &q.generator_images[2];
        let x12 = q
            .algebra
            .bracket(&q.generator_images[0], &q.generator_images[1]);
        assert_eq!(*x3, x12.neg());
        assert_eq!(
            lcs_graded_dims(&heis(), 5).unwrap(),
            GradedDims::from([(1, 2), (2, 1), (3, 0), (4, 0)])
        );
    }

    #[test]
    fn abelian_presentation() {
        let p = LiePresentation::parse(&["a", "b", "c"], &["[a,b]", "[a,c]", "[b,c]"]).unwrap();
        assert_eq!(
            lcs_graded_dims(&p, 4).unwrap(),
            GradedDims::from([(1, 3), (2, 0), (3, 0)])
        );
    }

    #[test]
    fn tower_is_compatible() {
        let p = LiePresentation::parse(&["x", "y"], &["[x,[x,y]] + 2*[y,[x,y]]"]).unwrap();
        let mut prev = lcs_quotient(&p, 2).unwrap();
        for n in 3..=6 {
            let q = lcs_quotient(&p, n).unwrap();
            assert_eq!(
                &q.representatives[..prev.representatives.len()],
                &prev.representatives[..]
            );
            let d = prev.algebra.dim();
            for i in 0..d {
                for j in i + 1..d {
                    let restricted = q.algebra.bracket_basis(i, j).filter_indices(|k| k < d);
                    assert_eq!(prev.algebra.bracket_basis(i, j), restricted, "n={n}");
                }
            }
            prev = q;
        }
    }

    #[test]
    fn hopf_on_heisenberg_quotients() {
        assert_eq!(hopf_h2_of_quotient(&heis(), 2).unwrap(), 1);
        assert_eq!(hopf_h2_of_quotient(&heis(), 3).unwrap(), 2);
        assert_eq!(hopf_h2_of_quotient(&heis(), 5).unwrap(), 2);
    }

    #[test]
    fn derived_quotients_are_limited() {
        let p =
            LiePresentation::new(vec!["x".into(), "y".into()], RelatorScheme::Derived(2)).unwrap();
        assert!(lcs_quotient(&p, 8).is_ok());
        assert!(matches!(lcs_quotient(&p, 9), Err(Error::Precondition(_))));
    }
}
