use std::collections::{BTreeMap, HashMap};

use num::One;

use crate::cdga::FiniteCdga;
use crate::error::{Error, Result};
use crate::fplie::NilpotentLieAlgebra;
use crate::ratlin::{rank, Scalar, SparseMatrix, SparseVec};

/// Strictly increasing index tuples of each length, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorBasis {
    dim: usize,
    tuples: Vec<Vec<Vec<usize>>>,
    position: Vec<HashMap<Vec<usize>, usize>>,
}

impl ExteriorBasis {
    pub fn new(dim: usize, cap: usize) -> Self {
        let mut tuples: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
        for p in 1..=cap {
            let mut next = Vec::new();
            for t in &tuples[p - 1] {
                let start = t.last().map_or(0, |l| l + 1);
                for i in start..dim {
                    let mut u = t.clone();
                    u.push(i);
                    next.push(u);
                }
            }
            tuples.push(next);
        }
        let position = tuples
            .iter()
            .map(|ts| ts.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect())
            .collect();
        ExteriorBasis {
            dim,
            tuples,
            position,
        }
    }

    pub fn cap(&self) -> usize {
        self.tuples.len() - 1
    }

    pub fn dim(&self, p: usize) -> usize {
        self.tuples.get(p).map_or(0, Vec::len)
    }

    pub fn tuples(&self, p: usize) -> &[Vec<usize>] {
        &self.tuples[p]
    }

    pub fn position(&self, t: &[usize]) -> usize {
        self.position[t.len()][t]
    }

    /// Sorts `seq` and returns the sign of the sorting permutation, or
    /// `None` if an index repeats.
    pub fn sort_signed(seq: &[usize]) -> Option<(Scalar, Vec<usize>)> {
        let mut v = seq.to_vec();
        let mut odd = false;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((if odd { -Scalar::one() } else { Scalar::one() }, v))
    }

    /// Coordinates of `sign * e_seq` for an arbitrary index sequence.
    pub fn monomial(&self, seq: &[usize]) -> SparseVec {
        match Self::sort_signed(seq) {
            Some((s, t)) => SparseVec::unit(self.position(&t)).scale(&s),
            None => SparseVec::new(),
        }
    }

    pub fn generator_count(&self) -> usize {
        self.dim
    }
}

/// The cochain complex `∧^{<=cap} g*` with `d e^k = -sum_{i<j} c_ij^k e^i e^j`.
#[derive(Clone, Debug)]
pub struct CeComplex {
    algebra: NilpotentLieAlgebra,
    basis: ExteriorBasis,
    /// `d[p]: ∧^p -> ∧^{p+1}` for `p < cap`.
    d: Vec<SparseMatrix>,
}

/// Builds the cochain complex through degree `cap` and checks `d∘d = 0`.
pub fn ce_cochain(g: &NilpotentLieAlgebra, cap: usize) -> Result<CeComplex> {
    if cap < 2 {
        return Err(Error::Precondition(
            "cochain degree cap must be at least 2".into(),
        ));
    }
    g.check_jacobi()?;
    let m = g.dim();
    let basis = ExteriorBasis::new(m, cap);
    let mut d_gen: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); m];
    for (&(i, j), v) in g.brackets() {
        for (k, c) in v.iter() {
            d_gen[*k].push((i, j, -c.clone()));
        }
    }
    let mut d = Vec::new();
    for p in 0..cap {
        let cols: Vec<SparseVec> = basis
            .tuples(p)
            .iter()
            .map(|t| {
                let mut out = SparseVec::new();
                for (s, &k) in t.iter().enumerate() {
                    let sign = if s % 2 == 1 {
                        -Scalar::one()
                    } else {
                        Scalar::one()
                    };
                    for (i, j, c) in &d_gen[k] {
                        let mut seq = t[..s].to_vec();
                        seq.extend([*i, *j]);
                        seq.extend(&t[s + 1..]);
                        out = out.add_scaled(&basis.monomial(&seq), &(c * &sign));
                    }
                }
                out
            })
            .collect();
        d.push(SparseMatrix::from_columns(basis.dim(p + 1), &cols));
    }
    for p in 1..cap {
        if !d[p].mul(&d[p - 1]).is_zero() {
            return Err(Error::Consistency(format!(
                "Chevalley–Eilenberg d∘d is nonzero on degree {}",
                p - 1
            )));
        }
    }
    Ok(CeComplex {
        algebra: g.clone(),
        basis,
        d,
    })
}

impl CeComplex {
    pub fn algebra(&self) -> &NilpotentLieAlgebra {
        &self.algebra
    }

    pub fn basis(&self) -> &ExteriorBasis {
        &self.basis
    }

    pub fn cap(&self) -> usize {
        self.basis.cap()
    }

    /// `d: ∧^p -> ∧^{p+1}`; zero out of the top degree.
    pub fn d(&self, p: usize) -> SparseMatrix {
        self.d
            .get(p)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(self.basis.dim(p + 1), self.basis.dim(p)))
    }

    pub fn betti(&self, p: usize) -> usize {
        let into = if p == 0 { 0 } else { rank(&self.d(p - 1)) };
        let out = if p < self.cap() { rank(&self.d(p)) } else { 0 };
        self.basis.dim(p) - out - into
    }

    /// The complex as a finite cdga with top degree `cap`. Degree-one
    /// basis elements are named `e1, e2, ...` and products `e1e2`.
    pub fn to_cdga(&self) -> Result<FiniteCdga> {
        let cap = self.cap();
        let names: Vec<Vec<String>> = (0..=cap)
            .map(|p| {
                if p == 0 {
                    return vec!["1".to_string()];
                }
                self.basis
                    .tuples(p)
                    .iter()
                    .map(|t| t.iter().map(|i| format!("e{}", i + 1)).collect::<String>())
                    .collect()
            })
            .collect();
        let mut products = HashMap::new();
        for i in 1..=cap {
            for j in 1..=cap - i {
                for (a, s) in self.basis.tuples(i).iter().enumerate() {
                    for (b, t) in self.basis.tuples(j).iter().enumerate() {
                        let mut seq = s.clone();
                        seq.extend(t);
                        let v = self.basis.monomial(&seq);
                        if !v.is_zero() {
                            products.insert((i, a, j, b), v);
                        }
                    }
                }
            }
        }
        let mut d = self.d.clone();
        d.push(SparseMatrix::zero(0, self.basis.dim(cap)));
        FiniteCdga::new(names, d, products)
    }
}

/// `∂_n: ∧^n g -> ∧^{n-1} g`,
/// `x_{i1}...x_{in} ↦ sum_{s<t} (-1)^{s+t} [x_is, x_it] x_{i1}..^..^..x_{in}`.
pub fn ce_chain_boundary(g: &NilpotentLieAlgebra, n: usize) -> SparseMatrix {
    let basis = ExteriorBasis::new(g.dim(), n);
    if n == 0 {
        return SparseMatrix::zero(0, 1);
    }
    let cols: Vec<SparseVec> = basis
        .tuples(n)
        .iter()
        .map(|t| {
            let mut out = SparseVec::new();
            for s in 0..n {
                for u in s + 1..n {
                    let br = g.bracket_basis(t[s], t[u]);
                    if br.is_zero() {
                        continue;
                    }
                    // 1-based positions s+1, u+1 give the same parity as s+u.
                    let sign = if (s + u) % 2 == 1 {
                        -Scalar::one()
                    } else {
                        Scalar::one()
                    };
                    let rest: Vec<usize> = t
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != s && *k != u)
                        .map(|(_, &x)| x)
                        .collect();
                    for (k, c) in br.iter() {
                        let mut seq = vec![*k];
                        seq.extend(&rest);
                        out = out.add_scaled(&basis.monomial(&seq), &(c * &sign));
                    }
                }
            }
            out
        })
        .collect();
    SparseMatrix::from_columns(basis.dim(n - 1), &cols)
}

/// `dim H_n(g) = dim ker ∂_n - rank ∂_{n+1}`.
pub fn lie_homology(g: &NilpotentLieAlgebra, n: usize) -> usize {
    let dim = ExteriorBasis::new(g.dim(), n).dim(n);
    let out = if n == 0 {
        0
    } else {
        rank(&ce_chain_boundary(g, n))
    };
    dim - out - rank(&ce_chain_boundary(g, n + 1))
}

fn tuple_weight(g: &NilpotentLieAlgebra, t: &[usize]) -> u32 {
    t.iter().map(|&i| g.weights()[i]).sum()
}

/// `H_n(g)` split by weight, for a graded `g`.
pub fn lie_homology_by_weight(g: &NilpotentLieAlgebra, n: usize) -> Result<BTreeMap<u32, usize>> {
    if !g.is_graded() {
        return Err(Error::Precondition(
            "weight-graded homology needs a graded Lie algebra".into(),
        ));
    }
    let basis = ExteriorBasis::new(g.dim(), n + 1);
    let weights_of =
        |p: usize| -> Vec<u32> { basis.tuples(p).iter().map(|t| tuple_weight(g, t)).collect() };
    let (w_n, w_next, w_prev) = (
        weights_of(n),
        weights_of(n + 1),
        if n > 0 { weights_of(n - 1) } else { Vec::new() },
    );
    let restrict = |m: &SparseMatrix, rows: &[u32], cols: &[u32], w: u32| -> SparseMatrix {
        let r: Vec<usize> = (0..rows.len()).filter(|&i| rows[i] == w).collect();
        let c: Vec<usize> = (0..cols.len()).filter(|&i| cols[i] == w).collect();
        let rpos: HashMap<usize, usize> = r.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let columns: Vec<SparseVec> = c
            .iter()
            .map(|&j| m.column(j).reindex(|i| rpos.get(&i).copied()))
            .collect();
        SparseMatrix::from_columns(r.len(), &columns)
    };
    let out_map = (n > 0).then(|| ce_chain_boundary(g, n));
    let in_map = ce_chain_boundary(g, n + 1);
    let mut result = BTreeMap::new();
    let mut ws: Vec<u32> = w_n.clone();
    ws.sort_unstable();
    ws.dedup();
    for w in ws {
        let dim = w_n.iter().filter(|&&x| x == w).count();
        let out = out_map
            .as_ref()
            .map_or(0, |m| rank(&restrict(m, &w_prev, &w_n, w)));
        let inn = rank(&restrict(&in_map, &w_n, &w_next, w));
        result.insert(w, dim - out - inn);
    }
    Ok(result)
}
