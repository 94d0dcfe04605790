//! Normal forms through the embedding of the free Lie algebra into the free
//! associative algebra. A Lie element is determined by its associative
//! expansion, and in a fixed multidegree the Hall–Reutenauer words expand to
//! linearly independent polynomials. Choosing one associative word per basis
//! element whose minor is invertible turns rewriting into a small linear solve.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::{BigInt, One, Zero};

use super::element::LieElement;
use super::word::{enumerate_levels, DegreeBound, HallWord, Multidegree};
use crate::ratlin::{Scalar, SparseVec, Subspace};

pub(crate) type AssocWord = Vec<u16>;
pub(crate) type AssocPoly = HashMap<AssocWord, i64>;

fn commutator(a: &AssocPoly, b: &AssocPoly) -> AssocPoly {
    let mut out: AssocPoly = HashMap::with_capacity(2 * a.len() * b.len());
    for (u, cu) in a {
        for (v, cv) in b {
            let c = cu.checked_mul(*cv).expect("coefficient overflow");
            let mut uv = Vec::with_capacity(u.len() + v.len());
            uv.extend_from_slice(u);
            uv.extend_from_slice(v);
            *out.entry(uv).or_insert(0) += c;
            let mut vu = Vec::with_capacity(u.len() + v.len());
            vu.extend_from_slice(v);
            vu.extend_from_slice(u);
            *out.entry(vu).or_insert(0) -= c;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Basis of one multidegree slice, with the data needed to read off
/// coordinates from an associative polynomial.
pub(crate) struct SliceBasis {
    pub words: Vec<HallWord>,
    pivot_words: Vec<AssocWord>,
    /// `inverse[b][a]`: coordinate `a` receives `v[pivot_words[b]] * inverse[b][a]`.
    inverse: Vec<Vec<Scalar>>,
}

pub(crate) struct FreeLieCache {
    alphabet: usize,
    expansions: Mutex<HashMap<HallWord, Arc<AssocPoly>>>,
    slices: Mutex<HashMap<Multidegree, Arc<SliceBasis>>>,
    brackets: Mutex<HashMap<(HallWord, HallWord), LieElement>>,
}

/// Shared per-alphabet caches. Entries are pure functions of their keys, so
/// sharing them across threads and callers cannot change any result.
pub(crate) fn cache(alphabet: usize) -> Arc<FreeLieCache> {
    static REGISTRY: OnceLock<Mutex<HashMap<usize, Arc<FreeLieCache>>>> = OnceLock::new();
    let mut reg = REGISTRY.get_or_init(Default::default).lock().unwrap();
    reg.entry(alphabet)
        .or_insert_with(|| {
            Arc::new(FreeLieCache {
                alphabet,
                expansions: Mutex::new(HashMap::new()),
                slices: Mutex::new(HashMap::new()),
                brackets: Mutex::new(HashMap::new()),
            })
        })
        .clone()
}

impl FreeLieCache {
    pub fn expansion(&self, w: &HallWord) -> Arc<AssocPoly> {
        if let Some(e) = self.expansions.lock().unwrap().get(w) {
            return e.clone();
        }
        let e = match w.as_letter() {
            Some(i) => {
                let mut p = HashMap::new();
                p.insert(vec![i as u16], 1);
                p
            }
            None => {
                let children = w.children();
                let mut acc = (*self.expansion(&children[0])).clone();
                for c in &children[1..] {
                    acc = commutator(&acc, &self.expansion(c));
                }
                acc
            }
        };
        let e = Arc::new(e);
        self.expansions.lock().unwrap().insert(w.clone(), e.clone());
        e
    }

    pub fn slice(&self, md: &Multidegree) -> Arc<SliceBasis> {
        if let Some(s) = self.slices.lock().unwrap().get(md) {
            return s.clone();
        }
        let s = Arc::new(self.build_slice(md));
        self.slices.lock().unwrap().insert(md.clone(), s.clone());
        s
    }

    fn build_slice(&self, md: &Multidegree) -> SliceBasis {
        let words: Vec<HallWord> = enumerate_levels(self.alphabet, &DegreeBound::below(md))
            .into_iter()
            .flatten()
            .filter(|w| w.multidegree() == md)
            .collect();
        if words.is_empty() {
            return SliceBasis {
                words,
                pivot_words: Vec::new(),
                inverse: Vec::new(),
            };
        }
        let expansions: Vec<Arc<AssocPoly>> = words.iter().map(|w| self.expansion(w)).collect();
        let mut columns: Vec<AssocWord> =
            expansions.iter().flat_map(|e| e.keys().cloned()).collect();
        columns.sort();
        columns.dedup();
        let col_index: HashMap<&AssocWord, usize> =
            columns.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let rows: Vec<Vec<(usize, i64)>> = expansions
            .iter()
            .map(|e| {
                let mut r: Vec<(usize, i64)> = e.iter().map(|(w, c)| (col_index[w], *c)).collect();
                r.sort();
                r
            })
            .collect();

        let pivots = pivot_columns_mod_p(&rows, columns.len())
            .filter(|p| p.len() == words.len())
            .and_then(|p| invert_minor(&rows, &p).map(|inv| (p, inv)))
            .unwrap_or_else(|| {
                let p = pivot_columns_exact(&rows, columns.len());
                assert_eq!(
                    p.len(),
                    words.len(),
                    "Hall-Reutenauer words of multidegree {md:?} are linearly dependent"
                );
                let inv = invert_minor(&rows, &p).expect("pivot minor is invertible");
                (p, inv)
            });
        let (pivot_cols, inverse) = pivots;
        SliceBasis {
            words,
            pivot_words: pivot_cols.into_iter().map(|c| columns[c].clone()).collect(),
            inverse,
        }
    }

    /// Expresses a Lie polynomial of multidegree `md`, given by its
    /// associative expansion, in the Hall–Reutenauer basis.
    pub fn solve(&self, md: &Multidegree, poly: &AssocPoly) -> LieElement {
        let slice = self.slice(md);
        let mut coords = vec![Scalar::zero(); slice.words.len()];
        for (b, pw) in slice.pivot_words.iter().enumerate() {
            if let Some(&v) = poly.get(pw) {
                let v = Scalar::from_integer(BigInt::from(v));
                for (a, e) in slice.inverse[b].iter().enumerate() {
                    if !e.is_zero() {
                        coords[a] += &v * e;
                    }
                }
            }
        }
        let out = LieElement::from_terms(
            self.alphabet,
            slice
                .words
                .iter()
                .cloned()
                .zip(coords)
                .filter(|(_, c)| !c.is_zero()),
        );
        debug_assert!(
            self.expand_element(&out) == *poly,
            "polynomial is not a Lie element"
        );
        out
    }

    pub fn expand_element(&self, e: &LieElement) -> AssocPoly {
        let mut acc: HashMap<AssocWord, Scalar> = HashMap::new();
        for (w, c) in e.terms() {
            for (u, k) in self.expansion(w).iter() {
                *acc.entry(u.clone()).or_insert_with(Scalar::zero) +=
                    c * Scalar::from_integer(BigInt::from(*k));
            }
        }
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(u, c)| {
                assert!(c.is_integer(), "non-integral expansion");
                (
                    u,
                    i64::try_from(c.to_integer()).expect("coefficient overflow"),
                )
            })
            .collect()
    }

    pub fn bracket_words(&self, u: &HallWord, v: &HallWord) -> LieElement {
        if u == v {
            return LieElement::zero(self.alphabet);
        }
        if let Some(r) = self.brackets.lock().unwrap().get(&(u.clone(), v.clone())) {
            return r.clone();
        }
        let r = self.bracket_words_uncached(u, v);
        self.brackets
            .lock()
            .unwrap()
            .insert((u.clone(), v.clone()), r.clone());
        r
    }

    fn bracket_words_uncached(&self, u: &HallWord, v: &HallWord) -> LieElement {
        let one = Scalar::one();
        if u.level() == v.level() {
            return if u < v {
                LieElement::from_word(HallWord::bracket_unchecked(vec![u.clone(), v.clone()]))
            } else {
                LieElement::from_word(HallWord::bracket_unchecked(vec![v.clone(), u.clone()]))
                    .scale(&-one)
            };
        }
        // [u, v] where u = [c1..ck] one level above v and v <= ck is itself a word.
        if let Some(w) = append_word(u, v) {
            return LieElement::from_word(w);
        }
        if let Some(w) = append_word(v, u) {
            return LieElement::from_word(w).scale(&-one);
        }
        let md: Multidegree = u
            .multidegree()
            .iter()
            .zip(v.multidegree())
            .map(|(a, b)| a + b)
            .collect();
        let poly = commutator(&self.expansion(u), &self.expansion(v));
        self.solve(&md, &poly)
    }
}

fn append_word(u: &HallWord, v: &HallWord) -> Option<HallWord> {
    if u.level() != v.level() + 1 {
        return None;
    }
    let children = u.children();
    if v <= children.last().unwrap() {
        let mut c = children.to_vec();
        c.push(v.clone());
        Some(HallWord::bracket_unchecked(c))
    } else {
        None
    }
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(c: i64) -> u64 {
    (c as i128).rem_euclid(PRIME as i128) as u64
}

/// Pivot columns of the row space, found modulo a large prime. A set of
/// columns whose minor is invertible mod p is invertible over the rationals.
fn pivot_columns_mod_p(rows: &[Vec<(usize, i64)>], ncols: usize) -> Option<Vec<usize>> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut pivots = Vec::new();
    for row in rows {
        let mut dense = vec![0u64; ncols];
        for (c, v) in row {
            dense[*c] = to_mod(*v);
        }
        for (p, b) in &basis {
            let f = dense[*p];
            if f != 0 {
                for (x, y) in dense.iter_mut().zip(b) {
                    *x = (*x + PRIME - mulmod(f, *y)) % PRIME;
                }
            }
        }
        let p = dense.iter().position(|&x| x != 0)?;
        let inv = powmod(dense[p], PRIME - 2);
        for x in dense.iter_mut() {
            *x = mulmod(*x, inv);
        }
        for (_, b) in basis.iter_mut() {
            let f = b[p];
            if f != 0 {
                for (x, y) in b.iter_mut().zip(&dense) {
                    *x = (*x + PRIME - mulmod(f, *y)) % PRIME;
                }
            }
        }
        basis.push((p, dense));
        pivots.push(p);
    }
    Some(pivots)
}

fn pivot_columns_exact(rows: &[Vec<(usize, i64)>], ncols: usize) -> Vec<usize> {
    let mut s = Subspace::zero(ncols);
    for r in rows {
        s.insert(SparseVec::from_entries(
            r.iter()
                .map(|(c, v)| (*c, Scalar::from_integer(BigInt::from(*v)))),
        ));
    }
    s.pivots().collect()
}

/// Inverse of the square minor `rows x cols`, transposed so that
/// `result[b][a]` multiplies the entry of column `cols[b]`.
fn invert_minor(rows: &[Vec<(usize, i64)>], cols: &[usize]) -> Option<Vec<Vec<Scalar>>> {
    let r = cols.len();
    let pos: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    // m[a][b] = coefficient of pivot word b in basis element a
    let mut m: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|row| {
            let mut d = vec![Scalar::zero(); r];
            for (c, v) in row {
                if let Some(&b) = pos.get(c) {
                    d[b] = Scalar::from_integer(BigInt::from(*v));
                }
            }
            d
        })
        .collect();
    let mut inv: Vec<Vec<Scalar>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    if i == j {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..r {
        let p = (c..r).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        inv.swap(c, p);
        let f = Scalar::one() / m[c][c].clone();
        for j in 0..r {
            m[c][j] = &m[c][j] * &f;
            inv[c][j] = &inv[c][j] * &f;
        }
        for i in 0..r {
            if i != c && !m[i][c].is_zero() {
                let g = m[i][c].clone();
                for j in 0..r {
                    let t = &m[c][j] * &g;
                    m[i][j] -= t;
                    let t = &inv[c][j] * &g;
                    inv[i][j] -= t;
                }
            }
        }
    }
    // inv = m^{-1}; coordinates c = v_P * inv, so result[b][a] = inv[b][a].
    Some(inv)
}
