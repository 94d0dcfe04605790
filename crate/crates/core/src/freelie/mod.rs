//! Free Lie algebras on a finite ordered alphabet, in the Hall–Reutenauer
//! basis stratified by derived-series level.

mod assoc;
mod element;
mod parse;
mod word;

use std::collections::BTreeMap;

pub use element::LieElement;
pub use parse::parse_element;
pub use word::{enumerate_levels, DegreeBound, HallWord, Multidegree};

/// Words of level `level` and total degree at most `degree_cap`, in order.
pub fn hall_level(alphabet: usize, level: u32, degree_cap: u32) -> Vec<HallWord> {
    enumerate_levels(alphabet, &DegreeBound::total(degree_cap))
        .into_iter()
        .nth(level as usize)
        .unwrap_or_default()
}

/// Basis of the `derived_level`-th derived subalgebra in degrees at most
/// `degree_cap`: all words of level at least `derived_level`. Deeper levels
/// come first, following the word order.
pub fn hall_basis_derived(alphabet: usize, derived_level: u32, degree_cap: u32) -> Vec<HallWord> {
    hall_basis_within(alphabet, derived_level, &DegreeBound::total(degree_cap))
}

pub fn hall_basis_within(
    alphabet: usize,
    derived_level: u32,
    bound: &DegreeBound,
) -> Vec<HallWord> {
    let mut out: Vec<HallWord> = enumerate_levels(alphabet, bound)
        .into_iter()
        .skip(derived_level as usize)
        .flatten()
        .collect();
    out.sort();
    out
}

/// Dimension of each multigraded piece of the `derived_level`-th derived
/// subalgebra within `bound`.
pub fn multigraded_dims(
    alphabet: usize,
    derived_level: u32,
    bound: &DegreeBound,
) -> BTreeMap<Multidegree, usize> {
    let mut out = BTreeMap::new();
    for w in hall_basis_within(alphabet, derived_level, bound) {
        *out.entry(w.multidegree().clone()).or_insert(0) += 1;
    }
    out
}

/// Bigraded dimensions over the alphabet `{x, y}`, keyed by (x-degree, y-degree).
pub fn bigraded_dims(derived_level: u32, degree_cap: u32) -> BTreeMap<(u32, u32), usize> {
    multigraded_dims(2, derived_level, &DegreeBound::total(degree_cap))
        .into_iter()
        .map(|(m, d)| ((m[0], m[1]), d))
        .collect()
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn divisors(n: u64) -> impl Iterator<Item = u64> {
    (1..=n).filter(move |d| n % d == 0)
}

/// Dimension of the degree `k` part of the free Lie algebra on `alphabet`
/// generators, by the necklace formula.
pub fn witt_dim(alphabet: usize, k: u32) -> u128 {
    let n = alphabet as i128;
    let k = k as u64;
    let total: i128 = divisors(k)
        .map(|d| mobius(d) as i128 * n.pow((k / d) as u32))
        .sum();
    (total / k as i128) as u128
}

/// Dimension of the multidegree `md` part of the free Lie algebra.
pub fn witt_multidim(md: &[u32]) -> u128 {
    let k: u64 = md.iter().map(|&m| m as u64).sum();
    if k == 0 {
        return 0;
    }
    let g = md.iter().fold(0u64, |g, &m| num::integer::gcd(g, m as u64));
    let multinomial = |parts: &[u64]| -> i128 {
        let mut acc: i128 = 1;
        let mut seen = 0u64;
        for &p in parts {
            for j in 1..=p {
                seen += 1;
                acc = acc * seen as i128 / j as i128;
            }
        }
        acc
    };
    let total: i128 = divisors(g)
        .map(|d| {
            let parts: Vec<u64> = md.iter().map(|&m| m as u64 / d).collect();
            mobius(d) as i128 * multinomial(&parts)
        })
        .sum();
    (total / k as i128) as u128
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::Scalar;
    use std::collections::HashMap;

    #[test]
    fn hall_level_examples() {
        let names = vec!["x".to_string(), "y".to_string()];
        let l1: Vec<String> = hall_level(2, 1, 3)
            .iter()
            .map(|w| w.render(&names))
            .collect();
        assert_eq!(l1, vec!["[x,y]", "[x,y,x]", "[x,y,y]"]);
        let l0: Vec<String> = hall_level(2, 0, 1)
            .iter()
            .map(|w| w.render(&names))
            .collect();
        assert_eq!(l0, vec!["x", "y"]);
        assert!(hall_level(2, 2, 3).is_empty());
        assert!(hall_level(2, 2, 4).is_empty());
        assert_eq!(hall_level(2, 2, 5).len(), 2);
    }

    #[test]
    fn hall_basis_derived_examples() {
        let b = hall_basis_derived(2, 0, 3);
        let mut per_degree = [0; 3];
        for w in &b {
            per_degree[w.degree() as usize - 1] += 1;
        }
        assert_eq!(per_degree, [2, 1, 2]);
        assert!(hall_basis_derived(2, 2, 4).is_empty());
        assert!(hall_basis_derived(1, 1, 10).is_empty());
    }

    #[test]
    fn witt_examples() {
        assert_eq!(witt_dim(2, 1), 2);
        assert_eq!(witt_dim(2, 3), 2);
        assert_eq!(witt_dim(3, 2), 3);
        assert_eq!(
            (1..=6).map(|k| witt_dim(2, k)).collect::<Vec<_>>(),
            vec![2, 1, 2, 3, 6, 9]
        );
        assert_eq!(witt_multidim(&[2, 2]), 1);
        assert_eq!(witt_multidim(&[3, 3]), 3);
    }

    #[test]
    fn level_sums_match_necklace_counts() {
        for n in 1..=3usize {
            let mut counts = vec![0u128; 9];
            for w in hall_basis_derived(n, 0, 8) {
                counts[w.degree() as usize] += 1;
            }
            for k in 1..=8u32 {
                assert_eq!(counts[k as usize], witt_dim(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn multidegree_counts_match_oracle() {
        for (m, d) in multigraded_dims(3, 0, &DegreeBound::total(6)) {
            assert_eq!(d as u128, witt_multidim(&m), "{m:?}");
        }
    }

    #[test]
    fn x_degree_grows_with_level() {
        for (i, level) in enumerate_levels(2, &DegreeBound::total(12))
            .iter()
            .enumerate()
            .skip(1)
        {
            for w in level {
                assert!(w.multidegree()[0] >= 1 << (i - 1), "{w:?}");
            }
        }
    }

    #[test]
    fn metabelian_slices_follow_parity() {
        let dims = multigraded_dims(
            2,
            2,
            &DegreeBound {
                total: 14,
                per_letter: Some(vec![2, 12]),
            },
        );
        for i in 3..=12u32 {
            let expected = if i % 2 == 1 { (i - 1) / 2 } else { i / 2 - 1 };
            assert_eq!(
                dims.get(&vec![2, i]).copied().unwrap_or(0),
                expected as usize,
                "i={i}"
            );
        }
        assert_eq!(bigraded_dims(2, 5).get(&(2, 3)), Some(&1));
        assert_eq!(bigraded_dims(1, 2).get(&(1, 1)), Some(&1));
    }

    // Independent associative expansion, used to check bracket normal forms.
    fn expand(e: &LieElement) -> HashMap<Vec<usize>, Scalar> {
        fn word(w: &HallWord) -> HashMap<Vec<usize>, Scalar> {
            if let Some(i) = w.as_letter() {
                return HashMap::from([(vec![i], Scalar::from_integer(1.into()))]);
            }
            let mut acc = word(&w.children()[0]);
            for c in &w.children()[1..] {
                acc = comm(&acc, &word(c));
            }
            acc
        }
        let mut out: HashMap<Vec<usize>, Scalar> = HashMap::new();
        for (w, c) in e.terms() {
            for (u, k) in word(w) {
                *out.entry(u).or_default() += k * c;
            }
        }
        out.retain(|_, v| *v != Scalar::from_integer(0.into()));
        out
    }

    fn comm(
        a: &HashMap<Vec<usize>, Scalar>,
        b: &HashMap<Vec<usize>, Scalar>,
    ) -> HashMap<Vec<usize>, Scalar> {
        let mut out: HashMap<Vec<usize>, Scalar> = HashMap::new();
        for (u, x) in a {
            for (v, y) in b {
                *out.entry([u.clone(), v.clone()].concat()).or_default() += x * y;
                *out.entry([v.clone(), u.clone()].concat()).or_default() -= x * y;
            }
        }
        out.retain(|_, v| *v != Scalar::from_integer(0.into()));
        out
    }

    #[test]
    fn brackets_agree_with_associative_oracle() {
        for (n, cap) in [(2usize, 7u32), (3, 5)] {
            let words = hall_basis_derived(n, 0, cap - 1);
            for u in &words {
                for v in &words {
                    if u.degree() + v.degree() > cap {
                        continue;
                    }
                    let (eu, ev) = (
                        LieElement::from_word(u.clone()),
                        LieElement::from_word(v.clone()),
                    );
                    let b = eu.bracket(&ev);
                    assert_eq!(
                        expand(&b),
                        comm(&expand(&eu), &expand(&ev)),
                        "[{u:?},{v:?}]"
                    );
                    assert_eq!(b, ev.bracket(&eu).neg());
                }
            }
        }
    }

    #[test]
    fn jacobi_on_random_elements() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let words = hall_basis_derived(3, 0, 3);
        let mut random = || {
            LieElement::from_terms(
                3,
                (0..3).map(|_| {
                    (
                        words[rng.gen_range(0..words.len())].clone(),
                        Scalar::from_integer(rng.gen_range(-3..=3).into()),
                    )
                }),
            )
        };
        for _ in 0..20 {
            let (a, b, c) = (random(), random(), random());
            let j = a
                .bracket(&b.bracket(&c))
                .add(&b.bracket(&c.bracket(&a)))
                .add(&c.bracket(&a.bracket(&b)));
            assert!(j.is_zero(), "{j:?}");
        }
    }
}
