use std::path::PathBuf;
use std::time::Instant;

use lieobstruct_core::cdga::{holonomy, FiniteCdga};
use lieobstruct_core::ce::{
    canonical_filtration, canonical_flatness, check_stability, homology_image_inclusion,
    verify_one_equivalence_in, HirschTower,
};

fn model(name: &str) -> FiniteCdga {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(format!("{name}.json"));
    FiniteCdga::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bundled_models_pass_the_tower_checks() {
    for name in ["heis", "noncarnot", "torus", "wedge2"] {
        let t0 = Instant::now();
        let a = model(name);
        let tower = HirschTower::build(&holonomy(&a).unwrap(), 5).unwrap();
        for n in 2..=4 {
            let r = verify_one_equivalence_in(&a, &tower, n).unwrap();
            assert!(r.h1_iso && r.h2_kernel_inclusion, "{name} stage {n}: {r:?}");
        }
        for n in 2..5 {
            for m in n + 1..=5 {
                let s = check_stability(&tower, m, n).unwrap();
                assert!(s.prop_i && s.prop_ii, "{name} n={n} m={m}: {s:?}");
                assert!(
                    homology_image_inclusion(&tower, n, m).unwrap(),
                    "{name} n={n} m={m}"
                );
            }
        }
        let f = canonical_filtration(&tower);
        assert!(f.all_equal(), "{name}: {f:?}");
        assert!(canonical_flatness(&a, &tower).iter().all(|b| *b), "{name}");
        assert!(tower.hirsch_steps().iter().all(|b| *b), "{name}");
        eprintln!("{name}: {:?}", t0.elapsed());
    }
}
