use serde::Serialize;

use crate::cdga::{holonomy, truncate, CdgaMorphism, FiniteCdga};
use crate::error::{Error, Result};
use crate::fplie::{lcs_quotient, LiePresentation, NilpotentLieAlgebra, NilpotentQuotient};
use crate::freelie::LieElement;
use crate::ratlin::{column_space, kernel, SparseMatrix, SparseVec, Subspace};

use super::complex::{ce_chain_boundary, ce_cochain, CeComplex};
use super::flat::{extend_multiplicatively, flat_to_morphism, is_flat, FlatConnection};

/// Cochains of `L/Γ_k` through degree 3.
#[derive(Clone, Debug)]
pub struct TowerStage {
    pub class_bound: u32,
    pub quotient: NilpotentQuotient,
    pub complex: CeComplex,
    pub cochains: FiniteCdga,
}

/// The stages `C(L/Γ_k)`, `2 <= k <= n`, with the inclusions induced by the
/// projections `L/Γ_{k+1} -> L/Γ_k`.
#[derive(Clone, Debug)]
pub struct HirschTower {
    stages: Vec<TowerStage>,
    /// `projections[k]`: `g_{k+3} -> g_{k+2}` as a matrix.
    projections: Vec<SparseMatrix>,
    inclusions: Vec<CdgaMorphism>,
}

/// `v` in `L/Γ_k` coordinates for each basis element of `L/Γ_{k+1}`.
fn projection(
    upper: &NilpotentQuotient,
    lower: &NilpotentQuotient,
    lower_bound: u32,
) -> Result<SparseMatrix> {
    if upper.reduced_generators != lower.reduced_generators {
        return Err(Error::Consistency(
            "consecutive quotients eliminated different generators".into(),
        ));
    }
    let cols: Vec<SparseVec> = upper
        .representatives
        .iter()
        .map(|w| {
            if w.degree() >= lower_bound {
                SparseVec::new()
            } else {
                lower.project(&LieElement::from_word(w.clone()))
            }
        })
        .collect();
    Ok(SparseMatrix::from_columns(lower.algebra.dim(), &cols))
}

/// `{v : m v ∈ s}`.
fn preimage(m: &SparseMatrix, s: &Subspace) -> Subspace {
    let n = m.ncols();
    let basis: Vec<SparseVec> = s.basis().cloned().collect();
    let mut cols = m.columns();
    cols.extend(basis.iter().map(SparseVec::neg));
    let k = kernel(&SparseMatrix::from_columns(m.nrows(), &cols));
    Subspace::spanned_by(n, k.basis().map(|v| v.filter_indices(|i| i < n)))
}

impl HirschTower {
    /// Builds stages `2..=n` for the presentation.
    pub fn build(p: &LiePresentation, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition("tower stages start at 2".into()));
        }
        let mut stages: Vec<TowerStage> = Vec::new();
        for k in 2..=n {
            let quotient = lcs_quotient(p, k)?;
            let complex = ce_cochain(&quotient.algebra, 3)?;
            let cochains = complex.to_cdga()?;
            stages.push(TowerStage {
                class_bound: k,
                quotient,
                complex,
                cochains,
            });
        }
        let mut projections = Vec::new();
        let mut inclusions = Vec::new();
        for w in stages.windows(2) {
            let pi = projection(&w[1].quotient, &w[0].quotient, w[0].class_bound)?;
            let images: Vec<SparseVec> = pi.rows().to_vec();
            let inc = extend_multiplicatively(&w[0].complex, &w[1].cochains, &images, 3);
            inc.check(&w[0].cochains, &w[1].cochains).map_err(|e| {
                Error::Consistency(format!("stage inclusion {}: {e}", w[0].class_bound))
            })?;
            projections.push(pi);
            inclusions.push(inc);
        }
        Ok(HirschTower {
            stages,
            projections,
            inclusions,
        })
    }

    pub fn top(&self) -> u32 {
        self.stages.last().map_or(1, |s| s.class_bound)
    }

    pub fn stage(&self, n: u32) -> &TowerStage {
        &self.stages[(n - 2) as usize]
    }

    pub fn stages(&self) -> &[TowerStage] {
        &self.stages
    }

    /// Composite inclusion `C(L/Γ_n) -> C(L/Γ_m)` for `n <= m`.
    pub fn inclusion(&self, n: u32, m: u32) -> CdgaMorphism {
        let mut f = CdgaMorphism::identity(&self.stage(n).cochains);
        for k in n..m {
            let next = &self.inclusions[(k - 2) as usize];
            f = CdgaMorphism {
                maps: next
                    .maps
                    .iter()
                    .zip(&f.maps)
                    .map(|(a, b)| a.mul(b))
                    .collect(),
            };
        }
        f
    }

    /// Composite projection `L/Γ_m -> L/Γ_n` for `n <= m`.
    pub fn projection(&self, m: u32, n: u32) -> SparseMatrix {
        let mut p = SparseMatrix::identity(self.stage(m).quotient.algebra.dim());
        for k in (n..m).rev() {
            p = self.projections[(k - 2) as usize].mul(&p);
        }
        p
    }

    /// Whether each step adjoins degree-one generators whose differentials
    /// lie in the image of the previous stage's `∧^2`.
    pub fn hirsch_steps(&self) -> Vec<bool> {
        self.inclusions
            .iter()
            .enumerate()
            .map(|(k, inc)| {
                let (lower, upper) = (&self.stages[k].cochains, &self.stages[k + 1].cochains);
                let injective = column_space(&inc.maps[1]).dim() == lower.dim(1);
                let image2 = column_space(&inc.maps[2]);
                let d1 = upper.d(1);
                injective && (0..upper.dim(1)).all(|x| image2.contains(&d1.column(x)))
            })
            .collect()
    }
}

fn h2_kernel(f: &CdgaMorphism, source: &FiniteCdga, target: &FiniteCdga) -> Subspace {
    let f2 = f
        .map(2)
        .cloned()
        .unwrap_or_else(|| SparseMatrix::zero(target.dim(2), source.dim(2)));
    preimage(&f2, &target.coboundaries(2)).intersection(&source.cocycles(2))
}

/// The classifying map `f_n: C(h(A)/Γ_n) -> A[1]` of the canonical flat
/// connection `ω_n = sum_i a_i ⊗ x_i`.
#[derive(Clone, Debug)]
pub struct ClassifyingStage {
    pub target: FiniteCdga,
    pub connection: FlatConnection,
    pub source: FiniteCdga,
    pub morphism: CdgaMorphism,
}

pub fn canonical_connection(q: &NilpotentQuotient) -> FlatConnection {
    FlatConnection {
        components: q.generator_images.clone(),
    }
}

pub fn classifying_stage(a: &FiniteCdga, n: u32) -> Result<ClassifyingStage> {
    let tower = HirschTower::build(&holonomy(a)?, n)?;
    classifying_stage_in(a, &tower, n)
}

/// The classifying map at stage `n` of a tower built from `holonomy(a)`.
pub fn classifying_stage_in(
    a: &FiniteCdga,
    tower: &HirschTower,
    n: u32,
) -> Result<ClassifyingStage> {
    let (target, _) = truncate(a, 1)?;
    let stage = tower.stage(n);
    let connection = canonical_connection(&stage.quotient);
    let (source, morphism) = flat_to_morphism(&target, &stage.quotient.algebra, &connection)?;
    Ok(ClassifyingStage {
        target,
        connection,
        source,
        morphism,
    })
}

/// Whether the canonical connection of each stage `2..=n` is flat on `A`.
pub fn canonical_flatness(a: &FiniteCdga, tower: &HirschTower) -> Vec<bool> {
    tower
        .stages()
        .iter()
        .map(|s| is_flat(a, &s.quotient.algebra, &canonical_connection(&s.quotient)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OneEquivalence {
    pub h1_iso: bool,
    pub h2_kernel_inclusion: bool,
}

/// `H^1(f_n)` bijective, and `ker H^2(f_n)` inside the kernel of the stage
/// inclusion `H^2 C(h/Γ_n) -> H^2 C(h/Γ_{n+1})`.
pub fn verify_one_equivalence(a: &FiniteCdga, n: u32) -> Result<OneEquivalence> {
    let tower = HirschTower::build(&holonomy(a)?, n + 1)?;
    verify_one_equivalence_in(a, &tower, n)
}

/// As `verify_one_equivalence`, reusing a tower that reaches stage `n + 1`.
pub fn verify_one_equivalence_in(
    a: &FiniteCdga,
    tower: &HirschTower,
    n: u32,
) -> Result<OneEquivalence> {
    if n < 2 || n + 1 > tower.top() {
        return Err(Error::Precondition(format!(
            "stage {n} needs a tower reaching stage {}",
            n + 1
        )));
    }
    let c = classifying_stage_in(a, tower, n)?;
    let r1 = c.morphism.cohomology_rank(&c.source, &c.target, 1);
    let h1_iso = r1 == c.source.betti(1) && r1 == c.target.betti(1);
    let kf = h2_kernel(&c.morphism, &c.source, &c.target);
    let next = &tower.stage(n + 1).cochains;
    let kt = h2_kernel(&tower.inclusion(n, n + 1), &c.source, next);
    Ok(OneEquivalence {
        h1_iso,
        h2_kernel_inclusion: kf.is_subspace_of(&kt),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Stability {
    pub prop_i: bool,
    pub prop_ii: bool,
}

/// (i): `H^1` of stage `n` maps isomorphically to stage `m`. (ii): the
/// kernels of `H^2` stage `n -> m` and stage `n -> n + 1` agree.
pub fn check_stability(tower: &HirschTower, m: u32, n: u32) -> Result<Stability> {
    if !(m > n && n >= 2 && m <= tower.top()) {
        return Err(Error::Precondition(format!(
            "stability needs 2 <= n < m <= {}, got n = {n}, m = {m}",
            tower.top()
        )));
    }
    let (src, dst, next) = (
        &tower.stage(n).cochains,
        &tower.stage(m).cochains,
        &tower.stage(n + 1).cochains,
    );
    let f = tower.inclusion(n, m);
    let r1 = f.cohomology_rank(src, dst, 1);
    let prop_i = r1 == src.betti(1) && r1 == dst.betti(1);
    let prop_ii = h2_kernel(&f, src, dst) == h2_kernel(&tower.inclusion(n, n + 1), src, next);
    Ok(Stability { prop_i, prop_ii })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationStage {
    pub stage: u32,
    pub dim_v: usize,
    pub dim_w: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationReport {
    pub stages: Vec<FiltrationStage>,
}

impl FiltrationReport {
    pub fn all_equal(&self) -> bool {
        self.stages.iter().all(|s| s.equal)
    }
}

/// Computes `W^1 = 0`, `W^{k+1} = d|_V^{-1}(∧^2 W^k)` inside the top stage
/// `V = C^1(L/Γ_n)` and compares with `V^k = (L/Γ_k)^*`.
pub fn canonical_filtration(tower: &HirschTower) -> FiltrationReport {
    let top = tower.top();
    let c = &tower.stage(top).cochains;
    let v = c.dim(1);
    let d1 = c.d(1);
    let mut w = Subspace::zero(v);
    let mut stages = Vec::new();
    for k in 2..=top {
        let wedge = Subspace::spanned_by(
            c.dim(2),
            w.basis()
                .flat_map(|x| w.basis().map(move |y| (x.clone(), y.clone())))
                .map(|(x, y)| c.mul(1, &x, 1, &y)),
        );
        w = preimage(&d1, &wedge);
        let vk = column_space(&tower.inclusion(k, top).maps[1]);
        stages.push(FiltrationStage {
            stage: k,
            dim_v: vk.dim(),
            dim_w: w.dim(),
            equal: vk == w,
        });
    }
    FiltrationReport { stages }
}

fn homology_image(
    g_src: &NilpotentLieAlgebra,
    g_dst: &NilpotentLieAlgebra,
    pi: &SparseMatrix,
) -> Subspace {
    use super::complex::ExteriorBasis;
    let (bs, bd) = (
        ExteriorBasis::new(g_src.dim(), 2),
        ExteriorBasis::new(g_dst.dim(), 2),
    );
    let wedge_pi: Vec<SparseVec> = bs
        .tuples(2)
        .iter()
        .map(|t| {
            let (u, v) = (pi.column(t[0]), pi.column(t[1]));
            let mut out = SparseVec::new();
            for (i, x) in u.iter() {
                for (j, y) in v.iter() {
                    out = out.add_scaled(&bd.monomial(&[*i, *j]), &(x * y));
                }
            }
            out
        })
        .collect();
    let wedge_pi = SparseMatrix::from_columns(bd.dim(2), &wedge_pi);
    let cycles = kernel(&ce_chain_boundary(g_src, 2));
    let boundaries = column_space(&ce_chain_boundary(g_dst, 3));
    boundaries.sum(&cycles.image_under(&wedge_pi))
}

/// `im(H_2(L/Γ_{n+1}) -> H_2(L/Γ_n)) ⊆ im(H_2(L/Γ_m) -> H_2(L/Γ_n))`.
pub fn homology_image_inclusion(tower: &HirschTower, n: u32, m: u32) -> Result<bool> {
    if !(m > n && n >= 2 && m <= tower.top()) {
        return Err(Error::Precondition(format!(
            "needs 2 <= n < m <= {}, got n = {n}, m = {m}",
            tower.top()
        )));
    }
    let g_n = &tower.stage(n).quotient.algebra;
    let near = homology_image(
        &tower.stage(n + 1).quotient.algebra,
        g_n,
        &tower.projection(n + 1, n),
    );
    let far = homology_image(
        &tower.stage(m).quotient.algebra,
        g_n,
        &tower.projection(m, n),
    );
    Ok(near.is_subspace_of(&far))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS: &str = r#"{"degrees": {"1": ["a1","a2","a3"], "2": ["b12","b13","b23"], "3": ["c"]},
        "d": {"a3": "a1*a2"},
        "mu": {"a1*a2": "b12", "a1*a3": "b13", "a2*a3": "b23", "a1*b23": "c", "a2*b13": "-c", "a3*b12": "c"}}"#;
    const TORUS: &str = r#"{"degrees": {"1": ["a1","a2"], "2": ["b"]}, "mu": {"a1*a2": "b"}}"#;

    #[test]
    fn heisenberg_classifying_maps() {
        let a = FiniteCdga::from_json(HEIS).unwrap();
        let f2 = classifying_stage(&a, 2).unwrap();
        assert_eq!(f2.source.dim(1), 2);
        assert_eq!(
            f2.morphism.maps[1],
            SparseMatrix::from_dense_i64(&[vec![1, 0], vec![0, 1], vec![0, 0]])
        );
        let tower = HirschTower::build(&holonomy(&a).unwrap(), 3).unwrap();
        let f3 = classifying_stage_in(&a, &tower, 3).unwrap();
        assert_eq!(f3.source.dim(1), 3);
        let composite = f3.morphism.maps[1].mul(&tower.inclusion(2, 3).maps[1]);
        assert_eq!(composite, f2.morphism.maps[1]);
        assert_eq!(tower.hirsch_steps(), vec![true]);
    }

    #[test]
    fn torus_stages_are_constant() {
        let a = FiniteCdga::from_json(TORUS).unwrap();
        let f2 = classifying_stage(&a, 2).unwrap();
        assert_eq!(f2.morphism.maps[1], SparseMatrix::identity(2));
        let tower = HirschTower::build(&holonomy(&a).unwrap(), 4).unwrap();
        assert!(tower.stages().iter().all(|s| s.quotient.algebra.dim() == 2));
        let report = canonical_filtration(&tower);
        assert!(report.all_equal());
        assert_eq!(report.stages[0].dim_w, 2);
    }

    #[test]
    fn heisenberg_passes_every_check() {
        let a = FiniteCdga::from_json(HEIS).unwrap();
        let tower = HirschTower::build(&holonomy(&a).unwrap(), 5).unwrap();
        for n in 2..=4 {
            assert_eq!(
                verify_one_equivalence_in(&a, &tower, n).unwrap(),
                OneEquivalence {
                    h1_iso: true,
                    h2_kernel_inclusion: true
                }
            );
        }
        for n in 2..5 {
            for m in n + 1..=5 {
                assert_eq!(
                    check_stability(&tower, m, n).unwrap(),
                    Stability {
                        prop_i: true,
                        prop_ii: true
                    }
                );
                assert!(homology_image_inclusion(&tower, n, m).unwrap());
            }
        }
        assert!(canonical_filtration(&tower).all_equal());
        assert!(canonical_flatness(&a, &tower).iter().all(|b| *b));
    }
}
