use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator by `num`.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a scalar as `p` or `p/q`.
pub fn fmt_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec {
            entries: Vec::new(),
        }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, Scalar::one())],
        }
    }

    /// Builds a vector from arbitrary `(index, value)` pairs, summing repeats.
    pub fn from_entries<I: IntoIterator<Item = (usize, Scalar)>>(iter: I) -> Self {
        let mut entries: Vec<(usize, Scalar)> = iter.into_iter().collect();
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Scalar)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVec { entries: out }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn first(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    pub fn last_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn to_dense(&self, len: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect(),
        }
    }

    /// `self + c * other`
    pub fn add_scaled(&self, other: &SparseVec, c: &Scalar) -> SparseVec {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + y * c;
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.add_scaled(other, &Scalar::one())
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.add_scaled(other, &-Scalar::one())
    }

    pub fn dot(&self, other: &SparseVec) -> Scalar {
        let mut acc = Scalar::zero();
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        while let (Some((i, x)), Some((j, y))) = (a.peek(), b.peek()) {
            if i < j {
                a.next();
            } else if j < i {
                b.next();
            } else {
                acc += x * y;
                a.next();
                b.next();
            }
        }
        acc
    }

    /// Keeps the entries whose index satisfies `keep`.
    pub fn filter_indices<F: Fn(usize) -> bool>(&self, keep: F) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| keep(*i))
                .cloned()
                .collect(),
        }
    }

    /// Re-indexes through `map`; entries mapped to `None` are dropped.
    pub fn reindex<F: Fn(usize) -> Option<usize>>(&self, map: F) -> SparseVec {
        SparseVec::from_entries(
            self.entries
                .iter()
                .filter_map(|(i, v)| map(*i).map(|j| (j, v.clone()))),
        )
    }

    /// Multiplies through by the lcm of denominators and divides by the gcd of
    /// numerators, making the leading entry positive.
    pub fn primitive(&self) -> SparseVec {
        use num::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for (_, v) in &self.entries {
            l = l.lcm(v.denom());
        }
        let mut g = BigInt::zero();
        for (_, v) in &self.entries {
            g = g.gcd(&(v.numer() * (&l / v.denom())));
        }
        let mut c = BigRational::new(l, g);
        if self.entries[0].1.is_negative() {
            c = -c;
        }
        self.scale(&c)
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", i, fmt_scalar(v))?;
        }
        write!(f, "}}")
    }
}

/// Row-major sparse matrix. Matrices act on column vectors, so a linear map
/// `V -> W` is stored as a `dim W x dim V` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            rows: vec![SparseVec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            rows: (0..n).map(SparseVec::unit).collect(),
        }
    }

    /// Builds a matrix from `(row, column, value)` triplets. Repeated
    /// positions are summed; zeros are not stored.
    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, Scalar)>>(
        nrows: usize,
        ncols: usize,
        triplets: I,
    ) -> Self {
        let mut buckets: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            assert!(
                r < nrows && c < ncols,
                "triplet ({r}, {c}) outside {nrows}x{ncols}"
            );
            buckets[r].push((c, v));
        }
        SparseMatrix {
            nrows,
            ncols,
            rows: buckets.into_iter().map(SparseVec::from_entries).collect(),
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows
            .iter()
            .all(|r| r.last_index().map_or(true, |i| i < ncols)));
        SparseMatrix {
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(nrows: usize, columns: &[SparseVec]) -> Self {
        let triplets = columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, v.clone())));
        SparseMatrix::from_triplets(nrows, columns.len(), triplets)
    }

    pub fn from_dense_i64(values: &[Vec<i64>]) -> Self {
        let nrows = values.len();
        let ncols = values.first().map_or(0, |r| r.len());
        SparseMatrix {
            nrows,
            ncols,
            rows: values
                .iter()
                .map(|r| SparseVec::from_dense(&r.iter().map(|&x| scalar(x)).collect::<Vec<_>>()))
                .collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.rows[r].get(c).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(SparseVec::is_zero)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseVec::nnz).sum()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Scalar)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v.clone())))
            .collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let triplets = self.triplets().into_iter().map(|(r, c, v)| (c, r, v));
        SparseMatrix::from_triplets(self.ncols, self.nrows, triplets)
    }

    pub fn column(&self, c: usize) -> SparseVec {
        SparseVec::from_entries(
            self.rows
                .iter()
                .enumerate()
                .filter_map(|(r, row)| row.get(c).map(|v| (r, v.clone()))),
        )
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let t = self.transpose();
        t.rows
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        SparseVec::from_entries(
            self.rows
                .iter()
                .enumerate()
                .map(|(r, row)| (r, row.dot(x)))
                .filter(|(_, v)| !v.is_zero()),
        )
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(
            self.ncols, other.nrows,
            "dimension mismatch in matrix product"
        );
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter().fold(SparseVec::new(), |acc, (k, v)| {
                    acc.add_scaled(&other.rows[*k], v)
                })
            })
            .collect();
        SparseMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            rows,
        }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> SparseMatrix {
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self.rows.iter().map(|r| r.scale(c)).collect(),
        }
    }
}
