//! Exact linear algebra over the rationals.
//!
//! Everything above this module reduces to echelon forms of sparse rational
//! matrices. Pivots are always the first nonzero column of a row, so the
//! reduced echelon form of a row space is canonical and results do not depend
//! on insertion order.

mod sparse;
mod subspace;

pub use sparse::{fmt_scalar, ratio, scalar, Scalar, SparseMatrix, SparseVec};
pub use subspace::Subspace;

/// Reduced row echelon form, keeping the row count (zero rows at the bottom),
/// together with the pivot columns.
pub fn rref(m: &SparseMatrix) -> (SparseMatrix, Vec<usize>) {
    let s = row_space(m);
    let pivots: Vec<usize> = s.pivots().collect();
    let mut rows: Vec<SparseVec> = s.basis().cloned().collect();
    rows.resize(m.nrows(), SparseVec::new());
    (SparseMatrix::from_rows(m.ncols(), rows), pivots)
}

pub fn row_space(m: &SparseMatrix) -> Subspace {
    Subspace::spanned_by(m.ncols(), m.rows().iter().cloned())
}

pub fn column_space(m: &SparseMatrix) -> Subspace {
    Subspace::spanned_by(m.nrows(), m.columns())
}

pub fn rank(m: &SparseMatrix) -> usize {
    row_space(m).dim()
}

/// Right null space `{x : m x = 0}`.
pub fn kernel(m: &SparseMatrix) -> Subspace {
    let s = row_space(m);
    let pivots: Vec<(usize, &SparseVec)> = s.basis_with_pivots().collect();
    let free = (0..m.ncols()).filter(|c| !s.is_pivot(*c));
    let vectors: Vec<SparseVec> = free
        .map(|f| {
            SparseVec::from_entries(
                std::iter::once((f, scalar(1))).chain(
                    pivots
                        .iter()
                        .filter_map(|(p, row)| row.get(f).map(|c| (*p, -c.clone()))),
                ),
            )
        })
        .collect();
    Subspace::spanned_by(m.ncols(), vectors)
}

/// Coset representatives for `Q^ambient / s` and the projection onto them.
///
/// The representatives are the non-pivot coordinates of `s`. The projection
/// is a `reps x ambient` matrix sending `e_j` to the coordinates of
/// `e_j mod s` on the representatives.
pub fn quotient_basis(ambient: usize, s: &Subspace) -> (Vec<usize>, SparseMatrix) {
    assert_eq!(
        ambient,
        s.ambient(),
        "subspace lives in a different ambient space"
    );
    let reps: Vec<usize> = (0..ambient).filter(|c| !s.is_pivot(*c)).collect();
    let mut position = vec![usize::MAX; ambient];
    for (k, r) in reps.iter().enumerate() {
        position[*r] = k;
    }
    let columns: Vec<SparseVec> = (0..ambient)
        .map(|j| {
            s.reduce(&SparseVec::unit(j)).reindex(|i| {
                let k = position[i];
                (k != usize::MAX).then_some(k)
            })
        })
        .collect();
    (
        reps.clone(),
        SparseMatrix::from_columns(reps.len(), &columns),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use proptest::prelude::*;

    /// Dense Gauss-Jordan elimination, used only as an oracle.
    fn dense_rref(mut a: Vec<Vec<Scalar>>, ncols: usize) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = scalar(1) / a[r][c].clone();
            for x in a[r].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..ncols {
                        let t = &a[r][j] * &f;
                        a[i][j] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    fn to_dense(m: &SparseMatrix) -> Vec<Vec<Scalar>> {
        m.rows().iter().map(|r| r.to_dense(m.ncols())).collect()
    }

    #[test]
    fn rref_of_empty_matrix() {
        let (r, p) = rref(&SparseMatrix::zero(0, 0));
        assert_eq!(r, SparseMatrix::zero(0, 0));
        assert!(p.is_empty());
    }

    #[test]
    fn rref_of_identity_is_identity() {
        let (r, p) = rref(&SparseMatrix::identity(3));
        assert_eq!(r, SparseMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn rref_of_rank_one_block() {
        let m = SparseMatrix::from_dense_i64(&[vec![2, 4], vec![1, 2]]);
        let (r, p) = rref(&m);
        assert_eq!(r, SparseMatrix::from_dense_i64(&[vec![1, 2], vec![0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&SparseMatrix::identity(4)).dim(), 0);
        assert_eq!(kernel(&SparseMatrix::zero(2, 3)), Subspace::full(3));
        let k = kernel(&SparseMatrix::from_dense_i64(&[
            vec![1, 1, 0],
            vec![0, 0, 1],
        ]));
        assert_eq!(k.dim(), 1);
        let v = SparseVec::from_dense(&[scalar(1), scalar(-1), scalar(0)]);
        assert!(k.contains(&v));
    }

    #[test]
    fn quotient_basis_examples() {
        let (reps, proj) = quotient_basis(3, &Subspace::zero(3));
        assert_eq!(reps, vec![0, 1, 2]);
        assert_eq!(proj, SparseMatrix::identity(3));

        let (reps, proj) = quotient_basis(3, &Subspace::full(3));
        assert!(reps.is_empty());
        assert!(proj.is_zero());
        assert_eq!((proj.nrows(), proj.ncols()), (0, 3));

        let s = Subspace::spanned_by(
            3,
            [SparseVec::from_dense(&[scalar(1), scalar(0), scalar(-1)])],
        );
        let (reps, proj) = quotient_basis(3, &s);
        assert_eq!(reps, vec![1, 2]);
        // e0 maps to e2, which is representative number 1
        assert_eq!(proj.mul_vec(&SparseVec::unit(0)), SparseVec::unit(1));
    }

    #[test]
    fn intersection_of_planes() {
        let a = Subspace::spanned_by(3, [SparseVec::unit(0), SparseVec::unit(1)]);
        let b = Subspace::spanned_by(3, [SparseVec::unit(1), SparseVec::unit(2)]);
        assert_eq!(
            a.intersection(&b),
            Subspace::spanned_by(3, [SparseVec::unit(1)])
        );
    }

    fn small_matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                proptest::collection::vec(prop_oneof![4 => Just(0i64), 3 => -4i64..5], c),
                r,
            )
            .prop_map(|rows| SparseMatrix::from_dense_i64(&rows))
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(m in small_matrix()) {
            let (r, p) = rref(&m);
            let (rr, pp) = rref(&r);
            prop_assert_eq!(r, rr);
            prop_assert_eq!(p, pp);
        }

        #[test]
        fn rank_nullity(m in small_matrix()) {
            prop_assert_eq!(rank(&m) + kernel(&m).dim(), m.ncols());
            for v in kernel(&m).basis() {
                prop_assert!(m.mul_vec(v).is_zero());
            }
        }

        #[test]
        fn echelon_rows_are_normalized(m in small_matrix()) {
            prop_assert!(row_space(&m).leading_coefficient_is_one());
        }
    }

    #[test]
    fn sparse_rref_matches_dense_oracle_up_to_50x50() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..12 {
            let nrows = rng.gen_range(1..=50);
            let ncols = rng.gen_range(1..=50);
            let density = if trial % 2 == 0 { 0.15 } else { 0.6 };
            let rows: Vec<Vec<i64>> = (0..nrows)
                .map(|_| {
                    (0..ncols)
                        .map(|_| {
                            if rng.gen_bool(density) {
                                rng.gen_range(-5..=5)
                            } else {
                                0
                            }
                        })
                        .collect()
                })
                .collect();
            let m = SparseMatrix::from_dense_i64(&rows);
            let (sparse, sp) = rref(&m);
            let (dense, dp) = dense_rref(to_dense(&m), ncols);
            assert_eq!(sp, dp, "pivots differ in trial {trial}");
            assert_eq!(to_dense(&sparse), dense, "rref differs in trial {trial}");
        }
    }
}
