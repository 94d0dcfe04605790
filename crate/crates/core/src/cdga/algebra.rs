use std::collections::{BTreeMap, HashMap};

use num::{BigInt, One, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fplie::render_combination;
use crate::ratlin::{column_space, kernel, Scalar, SparseMatrix, SparseVec, Subspace};

/// Highest degree accepted from input files.
pub const MAX_LOAD_DEGREE: usize = 3;

/// A connected finite cdga `A^0 ⊕ ... ⊕ A^T` with `A^0` spanned by the unit.
///
/// Products of elements of positive degree are stored on basis pairs for
/// every pair of degrees with sum at most `T`; the unit acts implicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCdga {
    names: Vec<Vec<String>>,
    /// `d[i]: A^i -> A^{i+1}` as a `dim A^{i+1} x dim A^i` matrix.
    d: Vec<SparseMatrix>,
    products: HashMap<(usize, usize, usize, usize), SparseVec>,
}

impl FiniteCdga {
    /// Builds and validates a cdga. `names[0]` must be the single unit.
    pub fn new(
        names: Vec<Vec<String>>,
        d: Vec<SparseMatrix>,
        products: HashMap<(usize, usize, usize, usize), SparseVec>,
    ) -> Result<Self> {
        let a = FiniteCdga { names, d, products };
        a.validate()?;
        Ok(a)
    }

    pub fn top_degree(&self) -> usize {
        self.names.len() - 1
    }

    pub fn dim(&self, i: usize) -> usize {
        self.names.get(i).map_or(0, Vec::len)
    }

    pub fn names(&self, i: usize) -> &[String] {
        self.names.get(i).map_or(&[], |v| v.as_slice())
    }

    /// `d: A^i -> A^{i+1}`; the zero map beyond the top degree.
    pub fn d(&self, i: usize) -> SparseMatrix {
        self.d
            .get(i)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(self.dim(i + 1), self.dim(i)))
    }

    pub fn apply_d(&self, i: usize, v: &SparseVec) -> SparseVec {
        match self.d.get(i) {
            Some(m) => m.mul_vec(v),
            None => SparseVec::new(),
        }
    }

    /// Product of basis element `a` of degree `i` with `b` of degree `j`.
    pub fn mul_basis(&self, i: usize, a: usize, j: usize, b: usize) -> SparseVec {
        if i == 0 {
            return SparseVec::unit(b);
        }
        if j == 0 {
            return SparseVec::unit(a);
        }
        self.products
            .get(&(i, a, j, b))
            .cloned()
            .unwrap_or_default()
    }

    pub fn mul(&self, i: usize, u: &SparseVec, j: usize, v: &SparseVec) -> SparseVec {
        if i + j > self.top_degree() {
            return SparseVec::new();
        }
        let mut out = SparseVec::new();
        for (a, x) in u.iter() {
            for (b, y) in v.iter() {
                out = out.add_scaled(&self.mul_basis(i, *a, j, *b), &(x * y));
            }
        }
        out
    }

    /// Matrix of `u · -: A^j -> A^{i+j}` for `u` in degree `i`.
    pub fn left_mul_matrix(&self, i: usize, u: &SparseVec, j: usize) -> SparseMatrix {
        let cols: Vec<SparseVec> = (0..self.dim(j))
            .map(|b| self.mul(i, u, j, &SparseVec::unit(b)))
            .collect();
        SparseMatrix::from_columns(self.dim(i + j), &cols)
    }

    fn validate(&self) -> Result<()> {
        if self.names.first().map(Vec::len) != Some(1) {
            return Err(Error::Invalid(
                "degree 0 must be spanned by the unit alone".into(),
            ));
        }
        let t = self.top_degree();
        for i in 0..=t {
            let m = self.d(i);
            if m.nrows() != self.dim(i + 1) || m.ncols() != self.dim(i) {
                return Err(Error::Invalid(format!(
                    "differential in degree {i} has the wrong shape"
                )));
            }
        }
        if !self.d(0).is_zero() {
            return Err(Error::Invalid("the unit must be closed".into()));
        }
        for i in 0..t {
            let dd = self.d(i + 1).mul(&self.d(i));
            if !dd.is_zero() {
                return Err(Error::Invalid(format!("d∘d is nonzero on degree {i}")));
            }
        }
        let sign = |i: usize, j: usize| {
            if (i * j) % 2 == 1 {
                -Scalar::one()
            } else {
                Scalar::one()
            }
        };
        for i in 1..=t {
            for j in 1..=t - i {
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let ab = self.mul_basis(i, a, j, b);
                        let ba = self.mul_basis(j, b, i, a);
                        if ab != ba.scale(&sign(i, j)) {
                            return Err(Error::Invalid(format!(
                                "graded commutativity fails for {}*{}",
                                self.names[i][a], self.names[j][b]
                            )));
                        }
                    }
                }
            }
        }
        for i in 1..=t {
            for j in 1..=t - i {
                if i + j + 1 > t {
                    continue;
                }
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let (ea, eb) = (SparseVec::unit(a), SparseVec::unit(b));
                        let lhs = self.apply_d(i + j, &self.mul(i, &ea, j, &eb));
                        let s = if i % 2 == 1 {
                            -Scalar::one()
                        } else {
                            Scalar::one()
                        };
                        let rhs = self
                            .mul(i + 1, &self.apply_d(i, &ea), j, &eb)
                            .add_scaled(&self.mul(i, &ea, j + 1, &self.apply_d(j, &eb)), &s);
                        if lhs != rhs {
                            return Err(Error::Invalid(format!(
                                "Leibniz rule fails for {}*{}",
                                self.names[i][a], self.names[j][b]
                            )));
                        }
                    }
                }
            }
        }
        for i in 1..=t {
            for j in 1..=t {
                for k in 1..=t {
                    if i + j + k > t {
                        continue;
                    }
                    for a in 0..self.dim(i) {
                        for b in 0..self.dim(j) {
                            for c in 0..self.dim(k) {
                                let (ea, eb, ec) =
                                    (SparseVec::unit(a), SparseVec::unit(b), SparseVec::unit(c));
                                let l = self.mul(i + j, &self.mul(i, &ea, j, &eb), k, &ec);
                                let r = self.mul(i, &ea, j + k, &self.mul(j, &eb, k, &ec));
                                if l != r {
                                    return Err(Error::Invalid(format!(
                                        "associativity fails for {}, {}, {}",
                                        self.names[i][a], self.names[j][b], self.names[k][c]
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Cocycles `Z^i`.
    pub fn cocycles(&self, i: usize) -> Subspace {
        kernel(&self.d(i))
    }

    /// Coboundaries `B^i`.
    pub fn coboundaries(&self, i: usize) -> Subspace {
        if i == 0 {
            return Subspace::zero(self.dim(0));
        }
        column_space(&self.d(i - 1))
    }

    /// `b_i` and cocycles representing a basis of `H^i`.
    pub fn cohomology(&self, i: usize) -> (usize, Vec<SparseVec>) {
        let mut span = self.coboundaries(i);
        let mut reps = Vec::new();
        for z in self.cocycles(i).basis() {
            if span.insert(z.clone()) {
                reps.push(z.clone());
            }
        }
        (reps.len(), reps)
    }

    pub fn betti(&self, i: usize) -> usize {
        self.cocycles(i).dim() - self.coboundaries(i).dim()
    }

    pub fn render(&self, i: usize, v: &SparseVec) -> String {
        render_combination(v, self.names(i))
    }

    /// Drops every degree above `top`.
    pub fn truncate_top(&self, top: usize) -> FiniteCdga {
        if top >= self.top_degree() {
            return self.clone();
        }
        let names = self.names[..=top].to_vec();
        let mut d: Vec<SparseMatrix> = self.d[..top].to_vec();
        d.push(SparseMatrix::zero(0, self.dim(top)));
        let products = self
            .products
            .iter()
            .filter(|((i, _, j, _), _)| i + j <= top)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        FiniteCdga { names, d, products }
    }

    /// The sub-cdga with `subspaces[i]` in degree `i`, together with its
    /// inclusion. A unit-vector basis row keeps its name; other rows are
    /// named by the combination they represent.
    pub fn subalgebra(&self, subspaces: &[Subspace]) -> Result<(FiniteCdga, CdgaMorphism)> {
        let t = subspaces.len() - 1;
        let bases: Vec<Vec<SparseVec>> = subspaces
            .iter()
            .map(|s| s.basis().cloned().collect())
            .collect();
        let names: Vec<Vec<String>> = bases
            .iter()
            .enumerate()
            .map(|(i, b)| {
                b.iter()
                    .map(|v| match v.entries() {
                        [(k, c)] if c.is_one() => self.names[i][*k].clone(),
                        _ => self.render(i, v),
                    })
                    .collect()
            })
            .collect();
        let coords = |i: usize, v: &SparseVec, what: &str| -> Result<SparseVec> {
            if i > t {
                return if v.is_zero() {
                    Ok(SparseVec::new())
                } else {
                    Err(Error::Consistency(format!(
                        "{what} leaves the subalgebra above its top degree"
                    )))
                };
            }
            subspaces[i].coordinates(v).ok_or_else(|| {
                Error::Consistency(format!(
                    "{what} of a degree {} element leaves the subalgebra",
                    i.saturating_sub(1)
                ))
            })
        };
        let mut d = Vec::new();
        for i in 0..=t {
            let cols = bases[i]
                .iter()
                .map(|v| coords(i + 1, &self.apply_d(i, v), "d"))
                .collect::<Result<Vec<_>>>()?;
            let rows = if i < t { bases[i + 1].len() } else { 0 };
            d.push(SparseMatrix::from_columns(rows, &cols));
        }
        let mut products = HashMap::new();
        for i in 1..=t {
            for j in 1..=t - i {
                for (a, u) in bases[i].iter().enumerate() {
                    for (b, v) in bases[j].iter().enumerate() {
                        let p = coords(i + j, &self.mul(i, u, j, v), "a product")?;
                        if !p.is_zero() {
                            products.insert((i, a, j, b), p);
                        }
                    }
                }
            }
        }
        let sub = FiniteCdga::new(names, d, products)?;
        let maps = bases
            .iter()
            .enumerate()
            .map(|(i, b)| SparseMatrix::from_columns(self.dim(i), b))
            .collect();
        Ok((sub, CdgaMorphism { maps }))
    }

    /// Loads the JSON format
    /// `{"degrees": {"1": [..], ..}, "d": {"a3": "a1*a2"}, "mu": {"a1*a2": "b1"}}`.
    pub fn from_json(src: &str) -> Result<FiniteCdga> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            degrees: BTreeMap<String, Vec<String>>,
            #[serde(default)]
            d: BTreeMap<String, String>,
            #[serde(default)]
            mu: BTreeMap<String, String>,
        }
        let raw: Raw = serde_json::from_str(src)?;
        let mut by_degree: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (k, v) in raw.degrees {
            let deg: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("degree key '{k}' is not an integer")))?;
            if deg == 0 || deg > MAX_LOAD_DEGREE {
                return Err(Error::Invalid(format!(
                    "degree {deg} is outside the supported range 1..={MAX_LOAD_DEGREE} (degree 0 is the implicit unit)"
                )));
            }
            by_degree.insert(deg, v);
        }
        let top = by_degree
            .iter()
            .rev()
            .find(|(_, v)| !v.is_empty())
            .map_or(0, |(k, _)| *k);
        let mut names: Vec<Vec<String>> = vec![vec!["1".to_string()]];
        for i in 1..=top {
            names.push(by_degree.remove(&i).unwrap_or_default());
        }
        let mut lookup: HashMap<String, (usize, usize)> = HashMap::new();
        for (i, ns) in names.iter().enumerate().skip(1) {
            for (a, n) in ns.iter().enumerate() {
                if !n
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_alphabetic() || c == '_')
                    || !n.chars().all(|c| c.is_alphanumeric() || c == '_')
                {
                    return Err(Error::Parse(format!(
                        "basis name '{n}' is not an identifier"
                    )));
                }
                if lookup.insert(n.clone(), (i, a)).is_some() {
                    return Err(Error::Invalid(format!("basis name '{n}' is used twice")));
                }
            }
        }
        let mut a = FiniteCdga {
            d: (0..=top)
                .map(|i| SparseMatrix::zero(names.get(i + 1).map_or(0, Vec::len), names[i].len()))
                .collect(),
            names,
            products: HashMap::new(),
        };
        let sign = |i: usize, j: usize| {
            if (i * j) % 2 == 1 {
                -Scalar::one()
            } else {
                Scalar::one()
            }
        };
        for (key, value) in &raw.mu {
            let factors: Vec<&str> = key.split('*').map(str::trim).collect();
            let [l, r] = factors[..] else {
                return Err(Error::Parse(format!(
                    "product key '{key}' must have the form 'u*v'"
                )));
            };
            let &(i, x) = lookup.get(l).ok_or_else(|| {
                Error::Parse(format!(
                    "unknown basis element '{l}' in product key '{key}'"
                ))
            })?;
            let &(j, y) = lookup.get(r).ok_or_else(|| {
                Error::Parse(format!(
                    "unknown basis element '{r}' in product key '{key}'"
                ))
            })?;
            let (deg, v) = a.parse_expr(value, &lookup, false)?;
            if v.is_zero() {
                continue;
            }
            if deg != i + j {
                return Err(Error::Invalid(format!(
                    "product {key} must have degree {}, got '{value}'",
                    i + j
                )));
            }
            let swapped = v.scale(&sign(i, j));
            for (k, val) in [((i, x, j, y), v.clone()), ((j, y, i, x), swapped)] {
                if let Some(prev) = a.products.get(&k) {
                    if *prev != val {
                        return Err(Error::Invalid(format!(
                            "product {key} conflicts with its graded-commutative partner"
                        )));
                    }
                }
                a.products.insert(k, val);
            }
        }
        for (key, value) in &raw.d {
            let &(i, x) = lookup.get(key.trim()).ok_or_else(|| {
                Error::Parse(format!("unknown basis element '{key}' in differential"))
            })?;
            let (deg, v) = a.parse_expr(value, &lookup, true)?;
            if v.is_zero() {
                continue;
            }
            if deg != i + 1 {
                return Err(Error::Invalid(format!(
                    "d({key}) must have degree {}, got '{value}'",
                    i + 1
                )));
            }
            let mut cols = a.d[i].columns();
            cols[x] = v;
            a.d[i] = SparseMatrix::from_columns(a.dim(i + 1), &cols);
        }
        a.validate()?;
        Ok(a)
    }

    fn lookup(&self) -> HashMap<String, (usize, usize)> {
        let mut out = HashMap::new();
        for (i, ns) in self.names.iter().enumerate().skip(1) {
            for (a, n) in ns.iter().enumerate() {
                out.insert(n.clone(), (i, a));
            }
        }
        out
    }

    /// Parses a homogeneous expression such as `a1*a2 - 2*b1`, returning its
    /// degree and coordinates.
    pub fn parse_element(&self, src: &str) -> Result<(usize, SparseVec)> {
        self.parse_expr(src, &self.lookup(), true)
    }

    /// Parses `c1*u*v + c2*w - ...`, returning the common degree. Products
    /// are evaluated only when `allow_products` is set.
    fn parse_expr(
        &self,
        src: &str,
        lookup: &HashMap<String, (usize, usize)>,
        allow_products: bool,
    ) -> Result<(usize, SparseVec)> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok((0, SparseVec::new()));
        }
        let mut terms: Vec<(bool, &str)> = Vec::new();
        let mut start = 0;
        let mut negative = false;
        let bytes = s.as_bytes();
        for (k, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && k > 0 && bytes[k - 1] != b'*' {
                terms.push((negative, &s[start..k]));
                negative = ch == '-';
                start = k + 1;
            } else if (ch == '+' || ch == '-') && k == 0 {
                negative = ch == '-';
                start = 1;
            }
        }
        terms.push((negative, &s[start..]));
        let mut degree = None;
        let mut total = SparseVec::new();
        for (neg, t) in terms {
            if t.is_empty() {
                return Err(Error::Parse(format!("empty term in '{src}'")));
            }
            let mut coef = if neg { -Scalar::one() } else { Scalar::one() };
            let mut deg = 0usize;
            let mut value: Option<SparseVec> = None;
            for f in t.split('*') {
                if f.is_empty() {
                    return Err(Error::Parse(format!("dangling '*' in '{src}'")));
                }
                if f.starts_with(|c: char| c.is_ascii_digit()) {
                    coef *= parse_rational(f)
                        .ok_or_else(|| Error::Parse(format!("bad coefficient '{f}' in '{src}'")))?;
                    continue;
                }
                let &(i, x) = lookup.get(f).ok_or_else(|| {
                    Error::Parse(format!("unknown basis element '{f}' in '{src}'"))
                })?;
                value = Some(match value {
                    None => SparseVec::unit(x),
                    Some(_) if !allow_products => {
                        return Err(Error::Parse(format!(
                            "product values must be linear, got '{src}'"
                        )))
                    }
                    Some(v) => self.mul(deg, &v, i, &SparseVec::unit(x)),
                });
                deg += i;
            }
            let Some(v) = value else {
                return Err(Error::Parse(format!(
                    "term '{t}' in '{src}' has no basis element"
                )));
            };
            if *degree.get_or_insert(deg) != deg {
                return Err(Error::Invalid(format!("'{src}' is not homogeneous")));
            }
            total = total.add_scaled(&v, &coef);
        }
        Ok((degree.unwrap_or(0), total))
    }
}

fn parse_rational(s: &str) -> Option<Scalar> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Scalar::new(n, d))
}

/// Degreewise linear maps between finite cdgas; `maps[i]` is
/// `dim target^i x dim source^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaMorphism {
    pub maps: Vec<SparseMatrix>,
}

impl CdgaMorphism {
    pub fn identity(a: &FiniteCdga) -> Self {
        CdgaMorphism {
            maps: (0..=a.top_degree())
                .map(|i| SparseMatrix::identity(a.dim(i)))
                .collect(),
        }
    }

    pub fn map(&self, i: usize) -> Option<&SparseMatrix> {
        self.maps.get(i)
    }

    /// Checks `f∘d = d∘f` and `f(uv) = f(u)f(v)` on basis elements in the
    /// degrees where the map is defined.
    pub fn check(&self, source: &FiniteCdga, target: &FiniteCdga) -> Result<()> {
        let top = self.maps.len() - 1;
        for (i, m) in self.maps.iter().enumerate() {
            if m.nrows() != target.dim(i) || m.ncols() != source.dim(i) {
                return Err(Error::Invalid(format!(
                    "morphism has the wrong shape in degree {i}"
                )));
            }
        }
        if self.maps[0] != SparseMatrix::identity(1) {
            return Err(Error::Invalid("morphism must preserve the unit".into()));
        }
        for i in 0..top {
            if self.maps[i + 1].mul(&source.d(i)) != target.d(i).mul(&self.maps[i]) {
                return Err(Error::Invalid(format!(
                    "morphism does not commute with d in degree {i}"
                )));
            }
        }
        for i in 1..=top {
            for j in 1..=top.saturating_sub(i) {
                for a in 0..source.dim(i) {
                    for b in 0..source.dim(j) {
                        let lhs = self.maps[i + j].mul_vec(&source.mul_basis(i, a, j, b));
                        let rhs =
                            target.mul(i, &self.maps[i].column(a), j, &self.maps[j].column(b));
                        if lhs != rhs {
                            return Err(Error::Invalid(format!(
                                "morphism is not multiplicative on {}*{}",
                                source.names(i)[a],
                                source.names(j)[b]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Rank of the induced map `H^i(source) -> H^i(target)`.
    pub fn cohomology_rank(&self, source: &FiniteCdga, target: &FiniteCdga, i: usize) -> usize {
        let (_, reps) = source.cohomology(i);
        let b = target.coboundaries(i);
        let images =
            Subspace::spanned_by(target.dim(i), reps.iter().map(|z| self.maps[i].mul_vec(z)));
        b.sum(&images).dim() - b.dim()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const HEIS: &str = r#"{"degrees": {"1": ["a1","a2","a3"], "2": ["b12","b13","b23"], "3": ["c"]},
        "d": {"a3": "a1*a2"},
        "mu": {"a1*a2": "b12", "a1*a3": "b13", "a2*a3": "b23", "a1*b23": "c", "a2*b13": "-c", "a3*b12": "c"}}"#;

    #[test]
    fn heisenberg_model_loads() {
        let a = FiniteCdga::from_json(HEIS).unwrap();
        assert_eq!(a.top_degree(), 3);
        assert_eq!(
            (0..=3).map(|i| a.betti(i)).collect::<Vec<_>>(),
            vec![1, 2, 2, 1]
        );
    }

    #[test]
    fn broken_models_are_rejected() {
        let not_closed = r#"{"degrees": {"1": ["a","b","c"], "2": ["ab","ac","bc"], "3": ["abc"]},
            "d": {"a": "a*b"}, "mu": {"a*b": "ab", "a*c": "ac", "b*c": "bc", "a*bc": "abc", "b*ac": "-abc", "c*ab": "abc"}}"#;
        let e = FiniteCdga::from_json(not_closed).unwrap_err().to_string();
        assert!(e.contains("Leibniz") || e.contains("d∘d"), "{e}");
        let conflict =
            r#"{"degrees": {"1": ["a","b"], "2": ["ab"]}, "mu": {"a*b": "ab", "b*a": "ab"}}"#;
        assert!(FiniteCdga::from_json(conflict)
            .unwrap_err()
            .to_string()
            .contains("conflicts"));
        let square = r#"{"degrees": {"1": ["a"], "2": ["s"]}, "mu": {"a*a": "s"}}"#;
        assert!(FiniteCdga::from_json(square).is_err());
        let unknown = r#"{"degrees": {"1": ["a"]}, "d": {"a": "q"}}"#;
        assert!(FiniteCdga::from_json(unknown).unwrap_err().is_parse());
    }

    #[test]
    fn zero_differential_betti_numbers_are_dimensions() {
        let torus = r#"{"degrees": {"1": ["a1","a2"], "2": ["b"]}, "mu": {"a1*a2": "b"}}"#;
        let a = FiniteCdga::from_json(torus).unwrap();
        assert_eq!((a.betti(0), a.betti(1), a.betti(2)), (1, 2, 1));
    }
}
