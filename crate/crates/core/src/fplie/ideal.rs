use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use super::{GradedDims, LiePresentation, RelatorScheme};
use crate::error::{Error, Result};
use crate::freelie::{hall_basis_derived, HallWord, LieElement, Multidegree};
use crate::ratlin::{SparseVec, Subspace};

/// Coordinates on the free Lie algebra in degrees `<= cap`: Hall words sorted
/// by degree, then by the word order.
#[derive(Clone, Debug)]
pub struct WordIndex {
    alphabet: usize,
    cap: u32,
    words: Vec<HallWord>,
    index: HashMap<HallWord, usize>,
    degree_start: Vec<usize>,
}

impl WordIndex {
    pub fn new(alphabet: usize, cap: u32) -> Self {
        let mut words = hall_basis_derived(alphabet, 0, cap);
        words.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let degree_start = (0..=cap + 1)
            .map(|k| words.partition_point(|w| w.degree() < k))
            .collect();
        WordIndex {
            alphabet,
            cap,
            words,
            index,
            degree_start,
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[HallWord] {
        &self.words
    }

    pub fn position(&self, w: &HallWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Column range of the words of degree `k`.
    pub fn degree_range(&self, k: u32) -> std::ops::Range<usize> {
        if k > self.cap {
            return self.words.len()..self.words.len();
        }
        self.degree_start[k as usize]..self.degree_start[k as usize + 1]
    }

    /// Coordinates of `e`, ignoring terms of degree above the cap.
    pub fn to_vec(&self, e: &LieElement) -> SparseVec {
        SparseVec::from_entries(
            e.terms()
                .filter_map(|(w, c)| self.position(w).map(|i| (i, c.clone()))),
        )
    }

    pub fn to_element(&self, v: &SparseVec) -> LieElement {
        LieElement::from_terms(
            self.alphabet,
            v.iter().map(|(i, c)| (self.words[*i].clone(), c.clone())),
        )
    }
}

fn letters(alphabet: usize) -> Vec<LieElement> {
    (0..alphabet)
        .map(|i| LieElement::generator(i, alphabet))
        .collect()
}

/// The ideal generated by `relators` in the free Lie algebra truncated above
/// degree `cap`: the span of all iterated `ad` of generators applied to the
/// relators, with every term of degree above `cap` discarded.
pub(crate) fn ideal_closure(index: &WordIndex, relators: &[LieElement]) -> Subspace {
    let cap = index.cap();
    let gens = letters(index.alphabet());
    let mut s = Subspace::zero(index.len());
    let mut queue: VecDeque<LieElement> = relators.iter().map(|r| r.truncate(cap)).collect();
    while let Some(v) = queue.pop_front() {
        if v.is_zero() || !s.insert(index.to_vec(&v)) {
            continue;
        }
        if v.min_degree() >= cap {
            continue;
        }
        for x in &gens {
            let w = x.bracket_truncated(&v, cap);
            if !w.is_zero() {
                queue.push_back(w);
            }
        }
    }
    s
}

/// The ideal generated by the relators of `p`, in degrees `<= cap`.
pub fn ideal_span(p: &LiePresentation, cap: u32) -> (WordIndex, Subspace) {
    let index = WordIndex::new(p.alphabet(), cap);
    let s = match p.scheme() {
        RelatorScheme::Finite(rs) => ideal_closure(&index, rs),
        RelatorScheme::Derived(k) => Subspace::spanned_by(
            index.len(),
            index
                .words()
                .iter()
                .enumerate()
                .filter(|(_, w)| w.level() >= *k)
                .map(|(i, _)| SparseVec::unit(i)),
        ),
    };
    (index, s)
}

/// Closure of the relators under brackets with every basis word, not just
/// generators. Used to cross-check [`ideal_span`].
pub fn brute_force_ideal(p: &LiePresentation, cap: u32) -> (WordIndex, Subspace) {
    let index = WordIndex::new(p.alphabet(), cap);
    let basis: Vec<LieElement> = index
        .words()
        .iter()
        .map(|w| LieElement::from_word(w.clone()))
        .collect();
    let mut s = Subspace::spanned_by(index.len(), p.relators().iter().map(|r| index.to_vec(r)));
    loop {
        let current: Vec<LieElement> = s.basis().map(|v| index.to_element(v)).collect();
        let mut grew = false;
        for v in &current {
            for u in &basis {
                let w = u.bracket_truncated(v, cap);
                if !w.is_zero() {
                    grew |= s.insert(index.to_vec(&w));
                }
                let w = v.bracket_truncated(u, cap);
                if !w.is_zero() {
                    grew |= s.insert(index.to_vec(&w));
                }
            }
        }
        if !grew {
            return (index, s);
        }
    }
}

/// Dimensions of one graded piece of `J` and of `[Λ, J]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SliceDims {
    pub ideal: usize,
    pub commutator: usize,
    pub h2: usize,
}

struct HopfTable {
    /// Keyed by total degree, then by multidegree when the relators are
    /// multihomogeneous (otherwise the multidegree key is empty).
    slices: BTreeMap<(u32, Multidegree), SliceDims>,
    multigraded: bool,
}

fn hopf_table(p: &LiePresentation, cap: u32) -> Result<HopfTable> {
    let n = p.alphabet();
    let (relators_by_degree, multigraded): (BTreeMap<u32, Vec<LieElement>>, bool) = match p.scheme()
    {
        RelatorScheme::Finite(rs) => {
            if !rs.iter().all(LieElement::is_homogeneous) {
                return Err(Error::Inhomogeneous);
            }
            let mut by = BTreeMap::new();
            for r in rs {
                by.entry(r.min_degree())
                    .or_insert_with(Vec::new)
                    .push(r.clone());
            }
            (by, rs.iter().all(LieElement::is_multihomogeneous))
        }
        RelatorScheme::Derived(k) => {
            let mut by = BTreeMap::new();
            for w in hall_basis_derived(n, *k, cap) {
                by.entry(w.degree())
                    .or_insert_with(Vec::new)
                    .push(LieElement::from_word(w));
            }
            (by, true)
        }
    };
    let key_of = |w: &HallWord| -> (u32, Multidegree) {
        (
            w.degree(),
            if multigraded {
                w.multidegree().clone()
            } else {
                Vec::new()
            },
        )
    };
    let mut columns: BTreeMap<(u32, Multidegree), HashMap<HallWord, usize>> = BTreeMap::new();
    for w in hall_basis_derived(n, 0, cap) {
        let slot = columns.entry(key_of(&w)).or_default();
        let next = slot.len();
        slot.insert(w, next);
    }
    let gens = letters(n);
    let mut slices = BTreeMap::new();
    let mut previous: Vec<LieElement> = Vec::new();
    for k in 1..=cap {
        let mut spaces: BTreeMap<(u32, Multidegree), Subspace> = BTreeMap::new();
        let add = |e: &LieElement, spaces: &mut BTreeMap<(u32, Multidegree), Subspace>| {
            // every term of e shares a key, since e is (multi)homogeneous
            let Some((w, _)) = e.terms().next() else {
                return;
            };
            let key = key_of(w);
            let cols = &columns[&key];
            let v = SparseVec::from_entries(e.terms().map(|(w, c)| (cols[w], c.clone())));
            spaces
                .entry(key)
                .or_insert_with(|| Subspace::zero(cols.len()))
                .insert(v);
        };
        for b in &previous {
            for x in &gens {
                add(&x.bracket(b), &mut spaces);
            }
        }
        let commutator: BTreeMap<(u32, Multidegree), usize> =
            spaces.iter().map(|(k, s)| (k.clone(), s.dim())).collect();
        for r in relators_by_degree.get(&k).into_iter().flatten() {
            add(r, &mut spaces);
        }
        previous.clear();
        for (key, s) in &spaces {
            let words: Vec<&HallWord> = {
                let mut ws: Vec<(&HallWord, &usize)> = columns[key].iter().collect();
                ws.sort_by_key(|(_, i)| **i);
                ws.into_iter().map(|(w, _)| w).collect()
            };
            for v in s.basis() {
                previous.push(LieElement::from_terms(
                    n,
                    v.iter().map(|(i, c)| (words[*i].clone(), c.clone())),
                ));
            }
            let c = commutator.get(key).copied().unwrap_or(0);
            slices.insert(
                key.clone(),
                SliceDims {
                    ideal: s.dim(),
                    commutator: c,
                    h2: s.dim() - c,
                },
            );
        }
    }
    Ok(HopfTable {
        slices,
        multigraded,
    })
}

/// `dim (J/[Λ, J])_k` for `1 <= k <= cap`, by the Hopf formula.
pub fn h2_graded(p: &LiePresentation, cap: u32) -> Result<GradedDims> {
    let table = hopf_table(p, cap)?;
    let mut out: GradedDims = (1..=cap).map(|k| (k, 0)).collect();
    for ((k, _), d) in table.slices {
        *out.get_mut(&k).unwrap() += d.h2;
    }
    Ok(out)
}

/// Per-multidegree dimensions of `J`, `[Λ, J]` and `H_2`; `None` when some
/// relator is not multihomogeneous.
pub fn h2_multigraded(
    p: &LiePresentation,
    cap: u32,
) -> Result<Option<BTreeMap<Multidegree, SliceDims>>> {
    let table = hopf_table(p, cap)?;
    if !table.multigraded {
        return Ok(None);
    }
    Ok(Some(
        table.slices.into_iter().map(|((_, m), d)| (m, d)).collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundedSoFar,
    Growing,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinitenessReport {
    pub degree_cap: u32,
    /// `dim (J/[Λ, J])_k` per degree.
    pub h2: GradedDims,
    /// `dim J_k` per degree.
    pub ideal: GradedDims,
    #[serde(skip)]
    pub by_multidegree: Option<BTreeMap<Multidegree, SliceDims>>,
    /// Degrees inspected for persistence of nonzero `H_2`.
    pub window: (u32, u32),
    pub verdict: Verdict,
    pub heuristic: bool,
}

/// Graded `H_2` through degree `cap` with a growth verdict. The verdict is a
/// heuristic over a bounded range: "growing" means some degree in the top
/// third of `[1, cap]` still carries nonzero `H_2`.
pub fn finiteness_scan(p: &LiePresentation, cap: u32) -> Result<FinitenessReport> {
    let table = hopf_table(p, cap)?;
    let mut h2: GradedDims = (1..=cap).map(|k| (k, 0)).collect();
    let mut ideal: GradedDims = h2.clone();
    for ((k, _), d) in &table.slices {
        *h2.get_mut(k).unwrap() += d.h2;
        *ideal.get_mut(k).unwrap() += d.ideal;
    }
    let window = (cap - cap / 3 + 1).max(1)..=cap;
    let verdict = if window.clone().any(|k| h2[&k] > 0) {
        Verdict::Growing
    } else {
        Verdict::BoundedSoFar
    };
    let by_multidegree = table.multigraded.then(|| {
        table
            .slices
            .iter()
            .map(|((_, m), d)| (m.clone(), *d))
            .collect()
    });
    Ok(FinitenessReport {
        degree_cap: cap,
        h2,
        ideal,
        by_multidegree,
        window: (*window.start(), *window.end()),
        verdict,
        heuristic: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_span_examples() {
        let free = LiePresentation::free(vec!["x".into(), "y".into()]);
        assert_eq!(ideal_span(&free, 4).1.dim(), 0);
        let p = LiePresentation::parse(&["x", "y"], &["[x,y]"]).unwrap();
        let (index, s) = ideal_span(&p, 3);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.codim(), 2);
        assert_eq!(index.len(), 5);
    }

    #[test]
    fn metabelian_slice_in_bidegree_2_3() {
        let p =
            LiePresentation::new(vec!["x".into(), "y".into()], RelatorScheme::Derived(2)).unwrap();
        let m = h2_multigraded(&p, 5).unwrap().unwrap();
        assert_eq!(m[&vec![2, 3]].ideal, 1);
    }

    #[test]
    fn hopf_examples() {
        let free = LiePresentation::free(vec!["x".into(), "y".into()]);
        assert!(h2_graded(&free, 5).unwrap().values().all(|d| *d == 0));
        let p = LiePresentation::parse(&["x", "y"], &["[x,y]"]).unwrap();
        assert_eq!(
            h2_graded(&p, 5).unwrap(),
            GradedDims::from([(1, 0), (2, 1), (3, 0), (4, 0), (5, 0)])
        );
        let heis = LiePresentation::parse(&["x1", "x2", "x3"], &["x3 + [x1,x2]"]).unwrap();
        assert!(matches!(h2_graded(&heis, 3), Err(Error::Inhomogeneous)));
    }

    #[test]
    fn killing_the_derived_algebra() {
        let p =
            LiePresentation::new(vec!["x".into(), "y".into()], RelatorScheme::Derived(1)).unwrap();
        let r = finiteness_scan(&p, 8).unwrap();
        assert_eq!(r.h2[&2], 1);
        assert!((3..=8).all(|k| r.h2[&k] == 0));
        assert_eq!(r.verdict, Verdict::BoundedSoFar);
    }

    #[test]
    fn quadratic_relators_are_bounded() {
        let p = LiePresentation::parse(&["x", "y", "z"], &["[x,y]", "[x,z] + [y,z]"]).unwrap();
        let r = finiteness_scan(&p, 6).unwrap();
        assert_eq!(r.h2[&2], 2);
        assert_eq!(r.h2.values().sum::<usize>(), 2);
        assert_eq!(r.verdict, Verdict::BoundedSoFar);
    }
}
