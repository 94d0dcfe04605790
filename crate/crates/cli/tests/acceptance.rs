//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use lieobstruct_core::cdga::{resonance_dim, FiniteCdga, ResonancePoint};
use lieobstruct_core::ce::lie_homology_by_weight;
use lieobstruct_core::fplie::{
    brute_force_ideal, h2_graded, ideal_span, lcs_quotient, LiePresentation, RelatorScheme,
};
use lieobstruct_core::freelie::{enumerate_levels, hall_basis_within, DegreeBound, LieElement};
use lieobstruct_core::ratlin::{ratio, scalar, Scalar};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lieobstruct"))
        .args(args)
        .current_dir(root())
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn report(args: &[&str]) -> Value {
    let (code, out) = cli(args);
    assert_eq!(code, 0, "lieobstruct {args:?} exited with {code}");
    serde_json::from_str::<Value>(&out).unwrap()["results"].clone()
}

fn timed<T>(limit: Duration, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let r = f();
    assert!(
        t.elapsed() < limit,
        "took {:?}, limit {limit:?}",
        t.elapsed()
    );
    r
}

fn data(name: &str) -> String {
    std::fs::read_to_string(root().join("data").join(name)).unwrap()
}

fn dims(v: &Value) -> BTreeMap<u32, u64> {
    v.as_object()
        .unwrap()
        .iter()
        .map(|(k, x)| (k.parse().unwrap(), x.as_u64().unwrap()))
        .collect()
}

const MODELS: [&str; 4] = ["heis.json", "noncarnot.json", "torus.json", "wedge2.json"];
const GRADED: [&str; 4] = [
    "free-metabelian.json",
    "quadratic.json",
    "free2.json",
    "cubic.json",
];

fn parity_table() {
    let r = timed(Duration::from_secs(10), || {
        report(&["hall", "--gens", "2", "--level", "2", "--deg", "12"])
    });
    let strip: Vec<u64> = r["x_degree_two"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["y_degree"].as_u64().unwrap() >= 3)
        .map(|e| e["dim"].as_u64().unwrap())
        .collect();
    assert_eq!(strip, vec![1, 1, 2, 2, 3, 3, 4, 4, 5, 5]);
}

fn free_metabelian_scan() {
    let r = timed(Duration::from_secs(30), || {
        report(&["h2scan", "data/free-metabelian.json", "--deg", "12"])
    });
    let h2 = dims(&r["h2"]);
    for k in [5, 7, 9, 11] {
        assert!(h2[&k] > 0, "H2 vanishes in degree {k}: {h2:?}");
    }
    assert_eq!(r["verdict"], "growing");
}

fn mobius(n: u64) -> i64 {
    let (mut m, mut n, mut p) = (1i64, n, 2u64);
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

fn necklaces(n: u64, k: u64) -> u64 {
    let s: i64 = (1..=k)
        .filter(|d| k % d == 0)
        .map(|d| mobius(d) * (n.pow((k / d) as u32) as i64))
        .sum();
    (s / k as i64) as u64
}

fn hall_witt_consistency() {
    for n in [2usize, 3] {
        let levels = enumerate_levels(n, &DegreeBound::total(8));
        let mut counts = BTreeMap::new();
        for w in levels.iter().flatten() {
            *counts.entry(w.degree() as u64).or_insert(0u64) += 1;
        }
        for k in 1..=8u64 {
            assert_eq!(
                counts.get(&k).copied().unwrap_or(0),
                necklaces(n as u64, k),
                "n = {n}, degree {k}"
            );
        }
    }
}

fn heisenberg_example() {
    let r = report(&["holonomy", "data/heis.json", "--lcs", "5"]);
    let mut rels: Vec<String> = r["relators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    rels.sort();
    assert_eq!(rels, vec!["[x1,x3]", "[x2,x3]", "x3 + [x1,x2]"]);
    assert_eq!(
        dims(&r["lcs_dims"]).into_values().collect::<Vec<_>>(),
        vec![2, 1, 0, 0]
    );
}

fn classify_all() -> Vec<Value> {
    MODELS
        .iter()
        .map(|m| report(&["classify", &format!("data/{m}"), "--stage", "4"]))
        .collect()
}

fn one_equivalence() {
    let reports = timed(Duration::from_secs(60), classify_all);
    for (m, r) in MODELS.iter().zip(&reports) {
        let stages: Vec<u64> = r["one_equivalence"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["stage"].as_u64().unwrap())
            .collect();
        assert_eq!(stages, vec![2, 3, 4], "{m}");
        for e in r["one_equivalence"].as_array().unwrap() {
            assert!(
                e["h1_iso"] == true && e["h2_kernel_inclusion"] == true,
                "{m}: {e}"
            );
        }
    }
}

fn stability_and_filtration() {
    for (m, r) in MODELS.iter().zip(classify_all()) {
        let pairs = r["stability"].as_array().unwrap();
        assert_eq!(pairs.len(), 6, "{m}: pairs 2 <= n < m <= 5");
        for e in pairs {
            assert!(e["prop_i"] == true && e["prop_ii"] == true, "{m}: {e}");
        }
        let stages = r["canonical_filtration"]["stages"].as_array().unwrap();
        assert_eq!(stages.len(), 4, "{m}");
        assert!(stages.iter().all(|s| s["equal"] == true), "{m}: {stages:?}");
    }
}

fn maurer_cartan() {
    for (m, r) in MODELS.iter().zip(classify_all()) {
        let flat = r["canonical_connection_flat"].as_array().unwrap();
        let stages: Vec<u64> = flat.iter().map(|e| e["stage"].as_u64().unwrap()).collect();
        assert_eq!(stages, vec![2, 3, 4, 5], "{m}");
        assert!(flat.iter().all(|e| e["flat"] == true), "{m}");
    }
}

fn hopf_cross_check() {
    for name in GRADED {
        let p = LiePresentation::from_json(&data(name)).unwrap();
        let h2 = h2_graded(&p, 6).unwrap();
        for k in 2..=6u32 {
            let g = lcs_quotient(&p, k + 1).unwrap().algebra;
            let ce = lie_homology_by_weight(&g, 2)
                .unwrap()
                .get(&k)
                .copied()
                .unwrap_or(0);
            assert_eq!(h2[&k], ce, "{name}, degree {k}");
        }
    }
}

fn linearization() {
    for name in ["cubic.json", "heis-holonomy.json", "quadratic.json"] {
        let r = report(&["linearize", &format!("data/{name}"), "--class", "6"]);
        assert_eq!(r["linear_plus_quadratic"], true, "{name}");
        assert_eq!(r["dims_agree"], true, "{name}");
        assert_eq!(dims(&r["lcs_dims_input"]).len(), 6, "{name}");
    }
}

fn random_point(rng: &mut ChaCha8Rng, len: usize) -> Vec<Scalar> {
    (0..len)
        .map(|_| ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3)))
        .collect()
}

fn resonance() {
    let t = report(&[
        "resonance",
        "data/torus.json",
        "--trials",
        "50",
        "--seed",
        "1",
    ]);
    assert_eq!(t["probe"]["verdict"], "no-witness-found");
    let w = report(&[
        "resonance",
        "data/wedge2.json",
        "--trials",
        "50",
        "--seed",
        "1",
    ]);
    assert_eq!(w["probe"]["verdict"], "nontrivial");
    let witness: Vec<String> = w["probe"]["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert!(witness.iter().any(|c| c != "0"));
    let certified = report(&[
        "resonance",
        "data/wedge2.json",
        "--omega",
        &witness.join(","),
    ]);
    assert!(certified["dim"].as_u64().unwrap() >= 1);

    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let models: Vec<FiniteCdga> = MODELS
        .iter()
        .map(|m| FiniteCdga::from_json(&data(m)).unwrap())
        .collect();
    let mut checked = 0;
    while checked < 20 {
        let a = &models[checked % models.len()];
        let w = ResonancePoint::from_cohomology_coordinates(
            a,
            &random_point(&mut rng, a.cohomology(1).0),
        )
        .unwrap();
        let lambda = random_point(&mut rng, 1).remove(0);
        if lambda == scalar(0) {
            continue;
        }
        for i in 0..=a.top_degree() {
            assert_eq!(
                resonance_dim(a, &w, i).unwrap(),
                resonance_dim(a, &w.scale(&lambda), i).unwrap()
            );
        }
        checked += 1;
    }
}

fn ideal_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..10 {
        let n = rng.gen_range(2..=3usize);
        let words = hall_basis_within(n, 0, &DegreeBound::total(4));
        let mut relators = Vec::new();
        let wanted = rng.gen_range(1..=2);
        while relators.len() < wanted {
            let mut r = LieElement::zero(n);
            for _ in 0..3 {
                let w = words[rng.gen_range(0..words.len())].clone();
                if w.degree() >= 2 {
                    r = r.add_scaled(&LieElement::from_word(w), &scalar(rng.gen_range(-2..=2)));
                }
            }
            if !r.is_zero() {
                relators.push(r);
            }
        }
        let names = (1..=n).map(|i| format!("x{i}")).collect();
        let p = LiePresentation::new(names, RelatorScheme::Finite(relators)).unwrap();
        assert_eq!(
            ideal_span(&p, 6).1,
            brute_force_ideal(&p, 6).1,
            "case {case}: {:?}",
            p.relator_strings()
        );
    }
}

fn cli_suite() -> Vec<Vec<&'static str>> {
    vec![
        vec!["hall", "--gens", "2", "--level", "2", "--deg", "12"],
        vec![
            "hall", "--gens", "3", "--level", "1", "--deg", "5", "--words",
        ],
        vec!["h2scan", "data/free-metabelian.json", "--deg", "12"],
        vec!["h2scan", "data/quadratic.json", "--deg", "8"],
        vec!["holonomy", "data/heis.json", "--lcs", "5"],
        vec!["holonomy", "data/noncarnot.json", "--lcs", "5"],
        vec!["holonomy", "data/torus.json"],
        vec!["resonance", "data/torus.json", "--seed", "3"],
        vec!["resonance", "data/wedge2.json", "--seed", "3"],
        vec![
            "resonance",
            "data/heis.json",
            "--omega",
            "1,-1/2,0",
            "--deg",
            "2",
        ],
        vec!["classify", "data/heis.json", "--stage", "4"],
        vec!["classify", "data/noncarnot.json", "--stage", "4"],
        vec!["linearize", "data/cubic.json"],
        vec!["fixed", "data/wedge2.json", "data/swap.json"],
        vec!["fixed", "data/line.json", "data/sign.json"],
    ]
}

fn determinism() {
    let run = || cli_suite().iter().map(|args| cli(args)).collect::<Vec<_>>();
    let (first, second) = (run(), run());
    for ((args, a), b) in cli_suite().iter().zip(&first).zip(&second) {
        assert_eq!(a.0, 0, "{args:?}");
        assert!(a == b, "{args:?} differs between runs");
    }
}

fn main() {
    let criteria: [(&str, fn()); 12] = [
        (
            "parity table of the second derived subalgebra in x-degree two",
            parity_table,
        ),
        ("free metabelian H2 scan to degree 12", free_metabelian_scan),
        (
            "Hall counts match the necklace formula",
            hall_witt_consistency,
        ),
        (
            "Heisenberg holonomy relators and LCS dimensions",
            heisenberg_example,
        ),
        (
            "classifying maps are 1-equivalences at stages 2..4",
            one_equivalence,
        ),
        (
            "stability and canonical filtration through stage 5",
            stability_and_filtration,
        ),
        (
            "canonical connections are flat through stage 5",
            maurer_cartan,
        ),
        (
            "Hopf formula agrees with Chevalley-Eilenberg H2 through degree 6",
            hopf_cross_check,
        ),
        (
            "linearization keeps LCS dimensions through class 6",
            linearization,
        ),
        ("resonance probe verdicts and scale invariance", resonance),
        ("ideal spanning matches brute-force closure", ideal_oracle),
        ("CLI reports are byte-identical across runs", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut stdout = std::io::stdout();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => {
                writeln!(stdout, "criterion {:>2}: PASS  {name} ({secs:.2}s)", k + 1).unwrap()
            }
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                writeln!(
                    stdout,
                    "criterion {:>2}: FAIL  {name} ({secs:.2}s): {msg}",
                    k + 1
                )
                .unwrap();
            }
        }
    }
    writeln!(stdout, "{} of 12 criteria passed", 12 - failed).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
