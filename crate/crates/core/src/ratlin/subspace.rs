use std::collections::BTreeMap;

use num::One;

use super::sparse::{Scalar, SparseMatrix, SparseVec};

/// A linear subspace of `Q^ambient`, stored as the rows of its reduced row
/// echelon form keyed by pivot column. Every row has a unit pivot and is zero
/// in every other pivot column, so two subspaces are equal exactly when their
/// stored rows are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    rows: BTreeMap<usize, SparseVec>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: BTreeMap::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: (0..ambient).map(|i| (i, SparseVec::unit(i))).collect(),
        }
    }

    pub fn spanned_by<I: IntoIterator<Item = SparseVec>>(ambient: usize, vectors: I) -> Self {
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Echelon basis, in increasing pivot order.
    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }

    pub fn basis_with_pivots(&self) -> impl Iterator<Item = (usize, &SparseVec)> {
        self.rows.iter().map(|(p, r)| (*p, r))
    }

    /// Residual of `v` after subtracting its component along the echelon
    /// rows; the result vanishes on every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        for (i, c) in v.iter() {
            if let Some(row) = self.rows.get(i) {
                out = out.add_scaled(row, &-c);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coordinates of `v` along the echelon basis (indexed by basis position),
    /// or `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        if !self.contains(v) {
            return None;
        }
        Some(SparseVec::from_entries(
            self.rows
                .keys()
                .enumerate()
                .filter_map(|(k, p)| v.get(*p).map(|c| (k, c.clone()))),
        ))
    }

    /// Adds `v` to the spanning set. Returns `true` when the dimension grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        debug_assert!(v.last_index().map_or(true, |i| i < self.ambient));
        let r = self.reduce(&v);
        let Some((q, lead)) = r.first().cloned() else {
            return false;
        };
        let r = r.scale(&(Scalar::one() / lead));
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(q).cloned() {
                *row = row.add_scaled(&r, &-c);
            }
        }
        self.rows.insert(q, r);
        true
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.values().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in other.rows.values() {
            s.insert(r.clone());
        }
        s
    }

    /// Intersection by the Zassenhaus construction.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let n = self.ambient;
        let mut big = Subspace::zero(2 * n);
        for r in self.rows.values() {
            let shifted = r.reindex(|i| Some(i + n));
            big.insert(r.add(&shifted));
        }
        for r in other.rows.values() {
            big.insert(r.clone());
        }
        Subspace::spanned_by(
            n,
            big.rows
                .range(n..)
                .map(|(_, r)| r.reindex(|i| i.checked_sub(n))),
        )
    }

    /// The subspace as a `dim x ambient` matrix in reduced echelon form.
    pub fn to_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_rows(self.ambient, self.rows.values().cloned().collect())
    }

    pub fn image_under(&self, map: &SparseMatrix) -> Subspace {
        Subspace::spanned_by(map.nrows(), self.rows.values().map(|r| map.mul_vec(r)))
    }

    /// Number of echelon rows whose pivot is `>= col`.
    pub fn dim_with_pivot_at_least(&self, col: usize) -> usize {
        self.rows.range(col..).count()
    }

    #[cfg(test)]
    pub(crate) fn leading_coefficient_is_one(&self) -> bool {
        self.rows
            .iter()
            .all(|(p, r)| r.first().map_or(false, |(i, c)| i == p && c.is_one()))
            && self.rows.iter().all(|(p, _)| {
                self.rows
                    .iter()
                    .all(|(q, r)| q == p || r.get(*p).map_or(true, num::Zero::is_zero))
            })
    }
}
