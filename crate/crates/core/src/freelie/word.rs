use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Degree in each generator.
pub type Multidegree = Vec<u32>;

/// An element of the Hall–Reutenauer basis.
///
/// Level 0 words are letters. A level `i` word is the left-normed bracket
/// `[h1, ..., hk]` (k >= 2) of level `i - 1` words with `h1 < h2 >= ... >= hk`.
///
/// The total order puts higher levels first (every level `i - 1` word exceeds
/// every level `i` word); within a level words are compared by degree and then
/// lexicographically by their child sequences.
#[derive(Clone)]
pub struct HallWord(Arc<Node>);

struct Node {
    level: u32,
    degree: u32,
    multidegree: Multidegree,
    kind: Kind,
    hash: u64,
}

enum Kind {
    Letter(usize),
    Bracket(Vec<HallWord>),
}

impl HallWord {
    pub fn letter(index: usize, alphabet: usize) -> HallWord {
        assert!(
            index < alphabet,
            "letter {index} outside alphabet of size {alphabet}"
        );
        let mut md = vec![0; alphabet];
        md[index] = 1;
        let mut h = DefaultHasher::new();
        (0u32, index).hash(&mut h);
        HallWord(Arc::new(Node {
            level: 0,
            degree: 1,
            multidegree: md,
            kind: Kind::Letter(index),
            hash: h.finish(),
        }))
    }

    /// Builds `[children...]`, returning `None` unless the children form a
    /// valid Hall–Reutenauer sequence of a common level.
    pub fn bracket(children: Vec<HallWord>) -> Option<HallWord> {
        if !Self::is_valid_sequence(&children) {
            return None;
        }
        Some(Self::bracket_unchecked(children))
    }

    pub fn is_valid_sequence(children: &[HallWord]) -> bool {
        if children.len() < 2 {
            return false;
        }
        let level = children[0].level();
        if children.iter().any(|c| c.level() != level) {
            return false;
        }
        if children[0] >= children[1] {
            return false;
        }
        children[1..].windows(2).all(|w| w[0] >= w[1])
    }

    pub(crate) fn bracket_unchecked(children: Vec<HallWord>) -> HallWord {
        debug_assert!(Self::is_valid_sequence(&children));
        let level = children[0].level() + 1;
        let n = children[0].0.multidegree.len();
        let mut md = vec![0; n];
        let mut h = DefaultHasher::new();
        level.hash(&mut h);
        for c in &children {
            for (a, b) in md.iter_mut().zip(&c.0.multidegree) {
                *a += b;
            }
            c.0.hash.hash(&mut h);
        }
        HallWord(Arc::new(Node {
            level,
            degree: md.iter().sum(),
            multidegree: md,
            kind: Kind::Bracket(children),
            hash: h.finish(),
        }))
    }

    pub fn level(&self) -> u32 {
        self.0.level
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn multidegree(&self) -> &Multidegree {
        &self.0.multidegree
    }

    pub fn alphabet(&self) -> usize {
        self.0.multidegree.len()
    }

    pub fn as_letter(&self) -> Option<usize> {
        match &self.0.kind {
            Kind::Letter(i) => Some(*i),
            Kind::Bracket(_) => None,
        }
    }

    /// Children of a bracket word; empty for letters.
    pub fn children(&self) -> &[HallWord] {
        match &self.0.kind {
            Kind::Letter(_) => &[],
            Kind::Bracket(c) => c,
        }
    }

    /// Renders the word as a nested bracket expression over `names`.
    pub fn render(&self, names: &[String]) -> String {
        match &self.0.kind {
            Kind::Letter(i) => names[*i].clone(),
            Kind::Bracket(c) => {
                let parts: Vec<String> = c.iter().map(|w| w.render(names)).collect();
                format!("[{}]", parts.join(","))
            }
        }
    }
}

impl PartialEq for HallWord {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.cmp(other) == Ordering::Equal)
    }
}

impl Eq for HallWord {}

impl Hash for HallWord {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state);
    }
}

impl PartialOrd for HallWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HallWord {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        other
            .level()
            .cmp(&self.level())
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| match (&self.0.kind, &other.0.kind) {
                (Kind::Letter(a), Kind::Letter(b)) => a.cmp(b),
                (Kind::Bracket(a), Kind::Bracket(b)) => a.cmp(b),
                _ => unreachable!("words of equal level have the same shape"),
            })
    }
}

impl fmt::Debug for HallWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Letter(i) => write!(f, "x{}", i + 1),
            Kind::Bracket(c) => {
                write!(f, "[")?;
                for (k, w) in c.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w:?}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Which words an enumeration should produce: total degree at most `total`,
/// and optionally a cap on the degree in each letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeBound {
    pub total: u32,
    pub per_letter: Option<Vec<u32>>,
}

impl DegreeBound {
    pub fn total(total: u32) -> Self {
        DegreeBound {
            total,
            per_letter: None,
        }
    }

    /// Exactly the words of multidegree at most `md` componentwise.
    pub fn below(md: &[u32]) -> Self {
        DegreeBound {
            total: md.iter().sum(),
            per_letter: Some(md.to_vec()),
        }
    }

    fn admits(&self, md: &[u32]) -> bool {
        md.iter().sum::<u32>() <= self.total
            && self
                .per_letter
                .as_ref()
                .map_or(true, |caps| md.iter().zip(caps).all(|(a, b)| a <= b))
    }
}

fn add_md(a: &[u32], b: &[u32]) -> Multidegree {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// All Hall–Reutenauer words within `bound`, grouped by level, each level in
/// increasing order.
pub fn enumerate_levels(alphabet: usize, bound: &DegreeBound) -> Vec<Vec<HallWord>> {
    let mut levels: Vec<Vec<HallWord>> = Vec::new();
    let letters: Vec<HallWord> = (0..alphabet)
        .map(|i| HallWord::letter(i, alphabet))
        .filter(|w| bound.admits(w.multidegree()))
        .collect();
    if letters.is_empty() {
        return levels;
    }
    levels.push(letters);
    loop {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for j2 in 0..prev.len() {
            for j1 in 0..j2 {
                let md = add_md(prev[j1].multidegree(), prev[j2].multidegree());
                if md.iter().sum::<u32>() > bound.total {
                    break;
                }
                if !bound.admits(&md) {
                    continue;
                }
                let mut children = vec![prev[j1].clone(), prev[j2].clone()];
                extend_tail(prev, &mut children, &md, j2, bound, &mut next);
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        levels.push(next);
    }
    levels
}

fn extend_tail(
    prev: &[HallWord],
    children: &mut Vec<HallWord>,
    md: &Multidegree,
    max_index: usize,
    bound: &DegreeBound,
    out: &mut Vec<HallWord>,
) {
    out.push(HallWord::bracket_unchecked(children.clone()));
    for j in 0..=max_index {
        let next_md = add_md(md, prev[j].multidegree());
        if next_md.iter().sum::<u32>() > bound.total {
            break;
        }
        if !bound.admits(&next_md) {
            continue;
        }
        children.push(prev[j].clone());
        extend_tail(prev, children, &next_md, j, bound, out);
        children.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_level_reversing_and_degree_compatible() {
        let x = HallWord::letter(0, 2);
        let y = HallWord::letter(1, 2);
        assert!(x < y);
        let xy = HallWord::bracket(vec![x.clone(), y.clone()]).unwrap();
        let xyy = HallWord::bracket(vec![x.clone(), y.clone(), y.clone()]).unwrap();
        let xyx = HallWord::bracket(vec![x.clone(), y.clone(), x.clone()]).unwrap();
        assert!(xy < xyy && xy < xyx);
        assert!(xyx < xyy);
        // level 1 words exceed level 0? no: level 0 words exceed level 1 words
        assert!(xyy < x);
        let deep = HallWord::bracket(vec![xy.clone(), xyy.clone()]).unwrap();
        assert!(deep < xy);
    }

    #[test]
    fn invalid_sequences_are_rejected() {
        let x = HallWord::letter(0, 2);
        let y = HallWord::letter(1, 2);
        assert!(HallWord::bracket(vec![y.clone(), x.clone()]).is_none());
        assert!(HallWord::bracket(vec![x.clone(), x.clone()]).is_none());
        assert!(HallWord::bracket(vec![x.clone(), y.clone(), x.clone(), y.clone()]).is_none());
        assert!(HallWord::bracket(vec![x.clone()]).is_none());
    }

    #[test]
    fn rendering_is_left_normed() {
        let names = vec!["x".to_string(), "y".to_string()];
        let x = HallWord::letter(0, 2);
        let y = HallWord::letter(1, 2);
        let w = HallWord::bracket(vec![x.clone(), y.clone(), y]).unwrap();
        assert_eq!(w.render(&names), "[x,y,y]");
    }
}
