use std::collections::BTreeMap;

use super::{LiePresentation, RelatorScheme};
use crate::error::{Error, Result};
use crate::freelie::{HallWord, LieElement, Multidegree};
use crate::ratlin::{Scalar, SparseVec, Subspace};

/// Right-normed `[x_{j1}, [x_{j2}, ..., x_{jk}]]`.
fn beta(seq: &[usize], alphabet: usize) -> LieElement {
    let mut it = seq.iter().rev();
    let last = LieElement::generator(*it.next().expect("nonempty sequence"), alphabet);
    it.fold(last, |acc, &i| {
        LieElement::generator(i, alphabet).bracket(&acc)
    })
}

/// All sequences with the given letter content, in lexicographic order.
fn sequences_with_content(md: &[u32]) -> Vec<Vec<usize>> {
    fn go(remaining: &mut Vec<u32>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.iter().all(|r| *r == 0) {
            out.push(prefix.clone());
            return;
        }
        for i in 0..remaining.len() {
            if remaining[i] > 0 {
                remaining[i] -= 1;
                prefix.push(i);
                go(remaining, prefix, out);
                prefix.pop();
                remaining[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut md.to_vec(), &mut Vec::new(), &mut out);
    out
}

fn all_sequences(alphabet: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..alphabet).map(move |i| {
                    let mut t = s.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Writes a multihomogeneous element as `sum_J c_J β(J)`, using a basis of
/// the `β(J)` chosen greedily in lexicographic order of `J`.
fn beta_coefficients(e: &LieElement, md: &Multidegree) -> Vec<(Vec<usize>, Scalar)> {
    let n = e.alphabet();
    let seqs = sequences_with_content(md);
    let betas: Vec<LieElement> = seqs.iter().map(|s| beta(s, n)).collect();
    let mut words: Vec<HallWord> = betas
        .iter()
        .flat_map(|b| b.terms().map(|(w, _)| w.clone()))
        .chain(e.terms().map(|(w, _)| w.clone()))
        .collect();
    words.sort();
    words.dedup();
    let col = |w: &HallWord| words.binary_search(w).expect("word indexed");
    let to_vec =
        |x: &LieElement| SparseVec::from_entries(x.terms().map(|(w, c)| (col(w), c.clone())));
    let mut span = Subspace::zero(words.len());
    let mut chosen = Vec::new();
    for (k, b) in betas.iter().enumerate() {
        if span.insert(to_vec(b)) {
            chosen.push(k);
        }
    }
    // Augment each chosen β(J) with a unit tag; reducing (e, 0) leaves (0, -c).
    let width = words.len();
    let mut aug = Subspace::zero(width + chosen.len());
    for (t, &k) in chosen.iter().enumerate() {
        aug.insert(to_vec(&betas[k]).add(&SparseVec::unit(width + t)));
    }
    let residual = aug.reduce(&to_vec(e));
    debug_assert!(
        residual.iter().all(|(i, _)| *i >= width),
        "element outside the span of the β(J)"
    );
    residual
        .iter()
        .map(|(i, c)| (seqs[chosen[i - width]].clone(), -c.clone()))
        .collect()
}

fn y_name(seq: &[usize], names: &[String]) -> String {
    let parts: Vec<&str> = seq.iter().map(|&i| names[i].as_str()).collect();
    format!("y_{}", parts.join("_"))
}

/// Rewrites a presentation with relators of degree `<= max_degree` into one
/// whose relators are linear plus quadratic: a generator `y_J` for every
/// sequence `J` of length `1..=max_degree`, relators `y_J - [y_{j1}, y_{J'}]`
/// where `J = (j1, J')`, and for each original relator the linear form
/// `sum_J c_J y_J` obtained from writing it as `sum_J c_J β(J)`.
pub fn linearize_presentation(p: &LiePresentation, max_degree: u32) -> Result<LiePresentation> {
    let RelatorScheme::Finite(relators) = p.scheme() else {
        return Err(Error::Precondition(
            "linearization needs an explicit relator list".into(),
        ));
    };
    if max_degree == 0 {
        return Err(Error::Precondition(
            "maximal relator degree must be at least 1".into(),
        ));
    }
    let n = p.alphabet();
    let names = p.generators();
    let mut seqs: Vec<Vec<usize>> = Vec::new();
    for len in 1..=max_degree as usize {
        seqs.extend(all_sequences(n, len));
    }
    let position: BTreeMap<Vec<usize>, usize> = seqs
        .iter()
        .enumerate()
        .map(|(k, s)| (s.clone(), k))
        .collect();
    let m = seqs.len();
    let y = |s: &[usize]| LieElement::generator(position[s], m);

    let mut out = Vec::new();
    for s in seqs.iter().filter(|s| s.len() >= 2) {
        out.push(y(s).sub(&y(&s[..1]).bracket(&y(&s[1..]))));
    }
    for r in relators {
        let mut by_md: BTreeMap<Multidegree, LieElement> = BTreeMap::new();
        for (w, c) in r.terms() {
            if w.degree() > max_degree {
                let (top, _) = r.terms().max_by_key(|(w, _)| w.degree()).unwrap();
                return Err(Error::DegreeExceeded {
                    monomial: top.render(names),
                    degree: top.degree() as usize,
                    max: max_degree as usize,
                });
            }
            let slot = by_md
                .entry(w.multidegree().clone())
                .or_insert_with(|| LieElement::zero(n));
            *slot = slot.add(&LieElement::from_terms(n, [(w.clone(), c.clone())]));
        }
        let mut rho = LieElement::zero(m);
        for (md, e) in &by_md {
            for (s, c) in beta_coefficients(e, md) {
                rho = rho.add_scaled(&y(&s), &c);
            }
        }
        if !rho.is_zero() {
            out.push(rho);
        }
    }
    let new_names = seqs.iter().map(|s| y_name(s, names)).collect();
    LiePresentation::new(new_names, RelatorScheme::Finite(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fplie::lcs_graded_dims;

    #[test]
    fn cubic_relator_becomes_a_generator() {
        let p = LiePresentation::parse(&["x1", "x2"], &["[x1,[x1,x2]]"]).unwrap();
        let q = linearize_presentation(&p, 3).unwrap();
        assert_eq!(q.alphabet(), 2 + 4 + 8);
        assert!(q.is_linear_plus_quadratic());
        assert_eq!(q.relator_strings().last().unwrap(), "y_x1_x1_x2");
        assert_eq!(
            lcs_graded_dims(&p, 6).unwrap(),
            lcs_graded_dims(&q, 6).unwrap()
        );
    }

    #[test]
    fn too_high_degree_names_the_monomial() {
        let p = LiePresentation::parse(&["x", "y"], &["[x,[x,y]]"]).unwrap();
        let e = linearize_presentation(&p, 2).unwrap_err();
        assert!(e.to_string().contains("[x,y,x]"), "{e}");
    }

    #[test]
    fn empty_relators_reencode_the_free_algebra() {
        let p = LiePresentation::free(vec!["x".into(), "y".into()]);
        let q = linearize_presentation(&p, 2).unwrap();
        assert_eq!(q.alphabet(), 6);
        assert_eq!(q.relators().len(), 4);
        assert_eq!(
            lcs_graded_dims(&q, 6).unwrap(),
            lcs_graded_dims(&p, 6).unwrap()
        );
    }
}
