use crate::cdga::{holonomy, CdgaMorphism, FiniteCdga};
use crate::error::{Error, Result};
use crate::fplie::NilpotentLieAlgebra;
use crate::ratlin::{SparseMatrix, SparseVec};

use super::complex::{ce_cochain, CeComplex};

/// `ω = sum_a a ⊗ ω_a` in `A^1 ⊗ g`, one vector of `g` per basis element
/// of `A^1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatConnection {
    pub components: Vec<SparseVec>,
}

impl FlatConnection {
    pub fn zero(a: &FiniteCdga) -> Self {
        FlatConnection {
            components: vec![SparseVec::new(); a.dim(1)],
        }
    }

    /// Reads `ω` back from the degree-one part of a morphism `C(g) -> A`.
    pub fn from_morphism(f: &CdgaMorphism) -> Self {
        let m = f.maps[1].transpose();
        FlatConnection {
            components: m.columns(),
        }
    }

    /// `dω + ½[ω, ω]` as one element of `A^2` per basis element of `g`.
    pub fn curvature(&self, a: &FiniteCdga, g: &NilpotentLieAlgebra) -> Vec<SparseVec> {
        let mut out = vec![SparseVec::new(); g.dim()];
        if a.top_degree() < 2 {
            return out;
        }
        for (x, w) in self.components.iter().enumerate() {
            let dx = a.apply_d(1, &SparseVec::unit(x));
            for (k, c) in w.iter() {
                out[*k] = out[*k].add_scaled(&dx, c);
            }
            for (y, v) in self.components.iter().enumerate().skip(x + 1) {
                let xy = a.mul_basis(1, x, 1, y);
                for (k, c) in g.bracket(w, v).iter() {
                    out[*k] = out[*k].add_scaled(&xy, c);
                }
            }
        }
        out
    }
}

/// Whether `ω` satisfies the Maurer–Cartan equation in `A^2 ⊗ g`.
pub fn is_flat(a: &FiniteCdga, g: &NilpotentLieAlgebra, omega: &FlatConnection) -> bool {
    omega.components.len() == a.dim(1) && omega.curvature(a, g).iter().all(SparseVec::is_zero)
}

/// The multiplicative extension to `C(g)` of a degree-one assignment
/// `e^k ↦ images[k]`, through `min(top, target top degree)`.
pub(crate) fn extend_multiplicatively(
    source: &CeComplex,
    target: &FiniteCdga,
    images: &[SparseVec],
    top: usize,
) -> CdgaMorphism {
    let top = top.min(target.top_degree()).min(source.cap());
    let mut maps = vec![SparseMatrix::identity(1)];
    for p in 1..=top {
        let cols: Vec<SparseVec> = source
            .basis()
            .tuples(p)
            .iter()
            .map(|t| {
                t[1..]
                    .iter()
                    .enumerate()
                    .fold(images[t[0]].clone(), |acc, (k, &i)| {
                        target.mul(k + 1, &acc, 1, &images[i])
                    })
            })
            .collect();
        maps.push(SparseMatrix::from_columns(target.dim(p), &cols));
    }
    CdgaMorphism { maps }
}

/// The cdga map `C(g) -> A` of a flat connection, with its source (the
/// cochains of `g` through degree 3).
pub fn flat_to_morphism(
    a: &FiniteCdga,
    g: &NilpotentLieAlgebra,
    omega: &FlatConnection,
) -> Result<(FiniteCdga, CdgaMorphism)> {
    if !is_flat(a, g, omega) {
        return Err(Error::NotFlat(
            "the connection does not satisfy the Maurer–Cartan equation".into(),
        ));
    }
    let ce = ce_cochain(g, 3)?;
    let source = ce.to_cdga()?;
    let images: Vec<SparseVec> = (0..g.dim())
        .map(|k| {
            SparseVec::from_entries(
                omega
                    .components
                    .iter()
                    .enumerate()
                    .filter_map(|(x, w)| w.get(k).map(|c| (x, c.clone()))),
            )
        })
        .collect();
    let f = extend_multiplicatively(&ce, a, &images, 3);
    f.check(&source, a)
        .map_err(|e| Error::Consistency(format!("classifying morphism: {e}")))?;
    Ok((source, f))
}

/// The Lie map `h(A) -> g` of a flat connection, as images of the holonomy
/// generators; every holonomy relator is checked to vanish in `g`.
pub fn flat_to_lie_map(
    a: &FiniteCdga,
    g: &NilpotentLieAlgebra,
    omega: &FlatConnection,
) -> Result<Vec<SparseVec>> {
    if !is_flat(a, g, omega) {
        return Err(Error::NotFlat(
            "the connection does not satisfy the Maurer–Cartan equation".into(),
        ));
    }
    let p = holonomy(a)?;
    for (k, r) in p.relators().iter().enumerate() {
        let v = g.evaluate(r, &omega.components);
        if !v.is_zero() {
            return Err(Error::Consistency(format!(
                "holonomy relator {k} ({}) maps to {} in g",
                r.render(p.generators()),
                g.render_vec(&v)
            )));
        }
    }
    Ok(omega.components.clone())
}
