use std::collections::BTreeMap;

use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CdgaMorphism, FiniteCdga};
use crate::error::{Error, Result};
use crate::fplie::{LiePresentation, RelatorScheme};
use crate::freelie::LieElement;
use crate::ratlin::{column_space, fmt_scalar, rank, Scalar, SparseMatrix, SparseVec, Subspace};

/// The sub-cdga `A[q]`: the quotient by `A^{>q+1}` with degree `q+1`
/// restricted to `dA^q + sum A^i A^j` over `i + j = q + 1`, `i, j <= q`.
/// The morphism is its inclusion into `A^{<=q+1}`.
pub fn truncate(a: &FiniteCdga, q: usize) -> Result<(FiniteCdga, CdgaMorphism)> {
    if q < 1 {
        return Err(Error::Precondition(
            "truncation level must be at least 1".into(),
        ));
    }
    let quotient = a.truncate_top(q + 1);
    let top = quotient.top_degree();
    let mut subspaces: Vec<Subspace> = (0..=top.min(q))
        .map(|i| Subspace::full(quotient.dim(i)))
        .collect();
    if top == q + 1 {
        let mut s = column_space(&quotient.d(q));
        for i in 1..=q {
            let j = q + 1 - i;
            if j < 1 || j > q {
                continue;
            }
            for x in 0..quotient.dim(i) {
                for y in 0..quotient.dim(j) {
                    s.insert(quotient.mul_basis(i, x, j, y));
                }
            }
        }
        subspaces.push(s);
    }
    quotient.subalgebra(&subspaces)
}

impl CdgaMorphism {
    /// Whether the map is an isomorphism on `H^i` for `i <= q` and injective
    /// on `H^{q+1}`.
    pub fn is_q_equivalence(&self, source: &FiniteCdga, target: &FiniteCdga, q: usize) -> bool {
        (0..=q).all(|i| {
            let r = self.cohomology_rank(source, target, i);
            r == source.betti(i) && r == target.betti(i)
        }) && (q + 1 > source.top_degree()
            || self.cohomology_rank(source, target, q + 1) == source.betti(q + 1))
    }
}

/// Holonomy presentation: generators `x1..xm` dual to the basis of `A^1`
/// and, for each basis element `λ` of `A[1]^2`, the relator
/// `sum_i <λ, d a_i> x_i + sum_{i<j} <λ, a_i a_j> [x_i, x_j]`.
pub fn holonomy(a: &FiniteCdga) -> Result<LiePresentation> {
    let (t, _) = truncate(a, 1)?;
    let m = t.dim(1);
    let names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    let x = |i: usize| LieElement::generator(i, m);
    let mut rel: Vec<LieElement> = vec![LieElement::zero(m); t.dim(2)];
    for i in 0..m {
        for (l, c) in t.apply_d(1, &SparseVec::unit(i)).iter() {
            rel[*l] = rel[*l].add_scaled(&x(i), c);
        }
        for j in i + 1..m {
            let b = x(i).bracket(&x(j));
            for (l, c) in t.mul_basis(1, i, 1, j).iter() {
                rel[*l] = rel[*l].add_scaled(&b, c);
            }
        }
    }
    rel.retain(|r| !r.is_zero());
    LiePresentation::new(names, RelatorScheme::Finite(rel))
}

/// A degree-one cocycle, stored in coordinates over the basis of `A^1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonancePoint {
    omega: SparseVec,
}

impl ResonancePoint {
    /// From coordinates over `A^1`; the cochain must be closed.
    pub fn from_cochain(a: &FiniteCdga, omega: SparseVec) -> Result<Self> {
        if omega.last_index().is_some_and(|i| i >= a.dim(1)) {
            return Err(Error::Invalid(
                "resonance point has more coordinates than dim A^1".into(),
            ));
        }
        let d = a.apply_d(1, &omega);
        if !d.is_zero() {
            return Err(Error::NotClosed(a.render(2, &d)));
        }
        Ok(ResonancePoint { omega })
    }

    /// From coordinates over the cocycle basis returned by `cohomology(1)`.
    pub fn from_cohomology_coordinates(a: &FiniteCdga, coords: &[Scalar]) -> Result<Self> {
        let (b1, reps) = a.cohomology(1);
        if coords.len() != b1 {
            return Err(Error::Invalid(format!(
                "expected {b1} cohomology coordinates, got {}",
                coords.len()
            )));
        }
        let omega = reps
            .iter()
            .zip(coords)
            .fold(SparseVec::new(), |acc, (z, c)| acc.add_scaled(z, c));
        Ok(ResonancePoint { omega })
    }

    pub fn cochain(&self) -> &SparseVec {
        &self.omega
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        ResonancePoint {
            omega: self.omega.scale(c),
        }
    }
}

/// `d_ω = d + ω·(-): A^i -> A^{i+1}`.
fn twisted_d(a: &FiniteCdga, omega: &SparseVec, i: usize) -> SparseMatrix {
    a.d(i).add(&a.left_mul_matrix(1, omega, i))
}

/// `dim H^i(A, d_ω)`. Degree `T` is allowed, where `d_ω` vanishes.
pub fn resonance_dim(a: &FiniteCdga, omega: &ResonancePoint, i: usize) -> Result<usize> {
    if i > a.top_degree() {
        return Err(Error::Precondition(format!(
            "degree {i} exceeds the top degree {}",
            a.top_degree()
        )));
    }
    let w = omega.cochain();
    let d = a.apply_d(1, w);
    if !d.is_zero() {
        return Err(Error::NotClosed(a.render(2, &d)));
    }
    let out = twisted_d(a, w, i);
    let into = (i > 0).then(|| twisted_d(a, w, i - 1));
    if let Some(m) = &into {
        if !out.mul(m).is_zero() {
            return Err(Error::Consistency(format!(
                "d_ω∘d_ω is nonzero on degree {}",
                i - 1
            )));
        }
    }
    if i + 1 < a.top_degree() && !twisted_d(a, w, i + 1).mul(&out).is_zero() {
        return Err(Error::Consistency(format!(
            "d_ω∘d_ω is nonzero on degree {i}"
        )));
    }
    Ok(a.dim(i) - rank(&out) - into.map_or(0, |m| rank(&m)))
}

pub fn resonance_membership(
    a: &FiniteCdga,
    omega: &ResonancePoint,
    i: usize,
    r: usize,
) -> Result<bool> {
    Ok(resonance_dim(a, omega, i)? >= r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    /// `witness` is a nonzero closed cochain over `A^1`, rendered per
    /// coordinate; `dim` is `dim H^1(A, d_ω)` there.
    Nontrivial {
        witness: Vec<String>,
        dim: usize,
        candidates_tried: usize,
    },
    /// Inconclusive: no candidate lies in the first resonance variety.
    NoWitnessFound { candidates_tried: usize },
}

/// Seed schedule for random probe points: coefficient `k` of trial `t`
/// has numerator in `-5..=5` and denominator in `1..=3`, drawn from
/// `ChaCha8Rng::seed_from_u64(seed)` in order.
fn random_point(rng: &mut ChaCha8Rng, len: usize) -> Vec<Scalar> {
    (0..len)
        .map(|_| {
            let n: i64 = rng.gen_range(-5..=5);
            let d: i64 = rng.gen_range(1..=3);
            Scalar::new(BigInt::from(n), BigInt::from(d))
        })
        .collect()
}

/// Searches for a nonzero `ω ∈ H^1(A)` with `dim H^1(A, d_ω) >= 1`: the
/// cohomology basis, then pairwise sums, then `trials` seeded random points.
pub fn resonance_trivial_probe(a: &FiniteCdga, trials: usize, seed: u64) -> Result<ProbeVerdict> {
    let (b1, _) = a.cohomology(1);
    if b1 == 0 {
        return Err(Error::Precondition(
            "b1 = 0, so the first resonance variety is {0}".into(),
        ));
    }
    let unit = |k: usize| -> Vec<Scalar> {
        (0..b1)
            .map(|i| {
                if i == k {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            })
            .collect()
    };
    let mut candidates: Vec<Vec<Scalar>> = (0..b1).map(unit).collect();
    for i in 0..b1 {
        for j in i + 1..b1 {
            candidates.push(unit(i).iter().zip(unit(j)).map(|(x, y)| x + y).collect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.extend((0..trials).map(|_| random_point(&mut rng, b1)));
    let mut tried = 0;
    for c in candidates {
        if c.iter().all(Zero::is_zero) {
            continue;
        }
        tried += 1;
        let p = ResonancePoint::from_cohomology_coordinates(a, &c)?;
        let dim = resonance_dim(a, &p, 1)?;
        if dim >= 1 {
            let witness = p
                .cochain()
                .to_dense(a.dim(1))
                .iter()
                .map(fmt_scalar)
                .collect();
            return Ok(ProbeVerdict::Nontrivial {
                witness,
                dim,
                candidates_tried: tried,
            });
        }
    }
    Ok(ProbeVerdict::NoWitnessFound {
        candidates_tried: tried,
    })
}

/// A finite group acting on a cdga by automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    elements: Vec<String>,
    /// `table[g][h]` is the index of `g h`.
    table: Vec<Vec<usize>>,
    maps: Vec<CdgaMorphism>,
}

impl GroupAction {
    pub fn new(
        a: &FiniteCdga,
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
        maps: Vec<CdgaMorphism>,
    ) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::Invalid("group has no elements".into()));
        }
        if table.len() != n
            || table
                .iter()
                .any(|r| r.len() != n || r.iter().any(|&k| k >= n))
            || maps.len() != n
        {
            return Err(Error::Invalid(
                "composition table and maps must match the element list".into(),
            ));
        }
        let Some(e) = (0..n).find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g)) else {
            return Err(Error::Invalid(
                "composition table has no identity element".into(),
            ));
        };
        for g in 0..n {
            if !(0..n).any(|h| table[g][h] == e) {
                return Err(Error::Invalid(format!(
                    "element {} has no inverse",
                    elements[g]
                )));
            }
        }
        for (g, m) in maps.iter().enumerate() {
            if m.maps.len() != a.top_degree() + 1 {
                return Err(Error::Invalid(format!(
                    "map of {} does not cover every degree",
                    elements[g]
                )));
            }
            m.check(a, a)
                .map_err(|err| Error::Invalid(format!("action of {}: {err}", elements[g])))?;
            for (i, mi) in m.maps.iter().enumerate() {
                if rank(mi) != a.dim(i) {
                    return Err(Error::Invalid(format!(
                        "action of {} is not invertible in degree {i}",
                        elements[g]
                    )));
                }
            }
        }
        for g in 0..n {
            for h in 0..n {
                let gh = &maps[table[g][h]];
                for i in 0..=a.top_degree() {
                    if maps[g].maps[i].mul(&maps[h].maps[i]) != gh.maps[i] {
                        return Err(Error::Invalid(format!(
                            "action does not respect {} * {} = {}",
                            elements[g], elements[h], elements[table[g][h]]
                        )));
                    }
                }
            }
        }
        Ok(GroupAction {
            elements,
            table,
            maps,
        })
    }

    pub fn trivial(a: &FiniteCdga) -> Self {
        GroupAction {
            elements: vec!["e".into()],
            table: vec![vec![0]],
            maps: vec![CdgaMorphism::identity(a)],
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    /// Loads `{"elements": [..], "table": [[..]], "maps": {"g": {"a1": "a2"}}}`.
    /// Table entries are element names; unlisted basis elements are fixed.
    pub fn from_json(a: &FiniteCdga, src: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            elements: Vec<String>,
            table: Vec<Vec<String>>,
            #[serde(default)]
            maps: BTreeMap<String, BTreeMap<String, String>>,
        }
        let raw: Raw = serde_json::from_str(src)?;
        let index = |name: &str| {
            raw.elements
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| Error::Parse(format!("unknown group element '{name}'")))
        };
        let table = raw
            .table
            .iter()
            .map(|row| row.iter().map(|s| index(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        for g in raw.maps.keys() {
            index(g)?;
        }
        let mut maps = Vec::new();
        for g in &raw.elements {
            let mut cols: Vec<Vec<SparseVec>> = (0..=a.top_degree())
                .map(|i| (0..a.dim(i)).map(SparseVec::unit).collect())
                .collect();
            for (src_name, image) in raw.maps.get(g).into_iter().flatten() {
                let (i, v) = a.parse_element(src_name)?;
                let [(k, c)] = v.entries() else {
                    return Err(Error::Parse(format!(
                        "map key '{src_name}' must be a basis element"
                    )));
                };
                if !c.is_one() || i == 0 {
                    return Err(Error::Parse(format!(
                        "map key '{src_name}' must be a basis element"
                    )));
                }
                let (j, w) = a.parse_element(image)?;
                if j != i && !w.is_zero() {
                    return Err(Error::Invalid(format!(
                        "{g} sends {src_name} to '{image}' of a different degree"
                    )));
                }
                cols[i][*k] = w;
            }
            let matrices = cols
                .iter()
                .enumerate()
                .map(|(i, c)| SparseMatrix::from_columns(a.dim(i), c))
                .collect();
            maps.push(CdgaMorphism { maps: matrices });
        }
        GroupAction::new(a, raw.elements, table, maps)
    }

    /// `(1/|Φ|) sum_g g` on `A^i`.
    pub fn averaging_projector(&self, i: usize) -> SparseMatrix {
        let n = self.maps[0].maps[i].nrows();
        let sum = self
            .maps
            .iter()
            .fold(SparseMatrix::zero(n, n), |acc, m| acc.add(&m.maps[i]));
        sum.scale(&Scalar::new(BigInt::one(), BigInt::from(self.order())))
    }
}

/// `A^Φ` with its inclusion into `A`. Checks that `H(A^Φ)` has the
/// dimension of the fixed part of `H(A)`.
pub fn fixed_subcdga(a: &FiniteCdga, action: &GroupAction) -> Result<(FiniteCdga, CdgaMorphism)> {
    let projectors: Vec<SparseMatrix> = (0..=a.top_degree())
        .map(|i| action.averaging_projector(i))
        .collect();
    let subspaces: Vec<Subspace> = projectors.iter().map(column_space).collect();
    let (fixed, inclusion) = a.subalgebra(&subspaces)?;
    for (i, p) in projectors.iter().enumerate() {
        let b = a.coboundaries(i);
        let invariant_classes = b.sum(&a.cocycles(i).image_under(p)).dim() - b.dim();
        if fixed.betti(i) != invariant_classes {
            return Err(Error::Consistency(format!(
                "H^{i} of the fixed algebra has dimension {}, the fixed part of H^{i} has {invariant_classes}",
                fixed.betti(i)
            )));
        }
    }
    Ok((fixed, inclusion))
}
