use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lieobstruct_core::ce::lie_homology_by_weight;
use lieobstruct_core::fplie::{
    brute_force_ideal, h2_graded, ideal_span, lcs_graded_dims, lcs_quotient,
    linearize_presentation, LiePresentation, RelatorScheme,
};
use lieobstruct_core::freelie::{hall_basis_within, DegreeBound, LieElement};
use lieobstruct_core::ratlin::scalar;

fn presentation(name: &str) -> LiePresentation {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(format!("{name}.json"));
    LiePresentation::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn hopf_formula_matches_weight_graded_lie_homology() {
    for name in ["free-metabelian", "quadratic", "free2", "cubic"] {
        let p = presentation(name);
        let h2 = h2_graded(&p, 6).unwrap();
        for k in 2..=6u32 {
            let g = lcs_quotient(&p, k + 1).unwrap().algebra;
            let by_weight = lie_homology_by_weight(&g, 2).unwrap();
            assert_eq!(
                h2[&k],
                by_weight.get(&k).copied().unwrap_or(0),
                "{name}, degree {k}"
            );
        }
    }
}

fn random_presentation(rng: &mut ChaCha8Rng) -> LiePresentation {
    let n = rng.gen_range(2..=3usize);
    let words = hall_basis_within(n, 0, &DegreeBound::total(4));
    let mut relators = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let mut r = LieElement::zero(n);
        for _ in 0..rng.gen_range(1..=3) {
            let w = words[rng.gen_range(0..words.len())].clone();
            if w.degree() < 2 {
                continue;
            }
            r = r.add_scaled(&LieElement::from_word(w), &scalar(rng.gen_range(-2..=2)));
        }
        if !r.is_zero() {
            relators.push(r);
        }
    }
    let names = (1..=n).map(|i| format!("x{i}")).collect();
    LiePresentation::new(names, RelatorScheme::Finite(relators)).unwrap()
}

#[test]
fn ideal_spanning_matches_brute_force_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..10 {
        let p = random_presentation(&mut rng);
        let (_, fast) = ideal_span(&p, 6);
        let (_, slow) = brute_force_ideal(&p, 6);
        assert_eq!(fast, slow, "case {case}: {:?}", p.relator_strings());
    }
}

#[test]
fn linearization_preserves_nilpotent_quotients() {
    for name in ["cubic", "heis-holonomy", "quadratic"] {
        let p = presentation(name);
        let top = p
            .relators()
            .iter()
            .map(LieElement::max_degree)
            .max()
            .unwrap_or(1);
        let q = linearize_presentation(&p, top.max(1)).unwrap();
        assert!(q.is_linear_plus_quadratic(), "{name}");
        assert_eq!(
            lcs_graded_dims(&p, 7).unwrap(),
            lcs_graded_dims(&q, 7).unwrap(),
            "{name}"
        );
    }
}
