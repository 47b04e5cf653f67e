use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::presentation::{TreePresentation, Word};
use super::CantorError;

/// A clopen subset of a presented Cantor space: a finite union of cylinders.
///
/// The word list is kept sorted and is a prefix antichain. Clopen sets carry
/// no reference to their presentation; every operation that needs the tree
/// takes it explicitly.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClopenSet {
    words: Vec<Word>,
}

fn is_prefix(a: &[u32], b: &[u32]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

fn common_prefix_len(words: &[Word]) -> usize {
    let Some(first) = words.first() else {
        return 0;
    };
    let mut n = first.len();
    for w in &words[1..] {
        n = n.min(first.iter().zip(w).take_while(|(a, b)| a == b).count());
    }
    n
}

impl ClopenSet {
    /// Validates that every word is a path of `pres` and that the list is an
    /// antichain.
    pub fn new(pres: &TreePresentation, words: Vec<Word>) -> Result<Self, CantorError> {
        for w in &words {
            if !pres.accepts(w) {
                return Err(CantorError::Structure(format!("word {w:?} is not a path from the root")));
            }
        }
        let set = Self::from_sorted(words);
        for pair in set.words.windows(2) {
            if is_prefix(&pair[0], &pair[1]) {
                return Err(CantorError::Structure(format!("{:?} is a prefix of {:?}", pair[0], pair[1])));
            }
        }
        Ok(set)
    }

    /// Sorts and dedups without checking paths or the antichain property.
    pub(crate) fn from_sorted(mut words: Vec<Word>) -> Self {
        words.sort();
        words.dedup();
        Self { words }
    }

    pub fn whole() -> Self {
        Self { words: vec![Vec::new()] }
    }

    pub fn cylinder(word: Word) -> Self {
        Self { words: vec![word] }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether the cylinder of `word` lies inside the set. Exact once `word`
    /// is at least as long as [`max_len`](Self::max_len).
    pub fn covers(&self, word: &[u32]) -> bool {
        self.words.iter().any(|w| is_prefix(w, word))
    }

    /// All paths of length `depth` inside the set. `depth` is raised to
    /// [`max_len`](Self::max_len) if smaller.
    pub fn expand(&self, pres: &TreePresentation, depth: usize) -> BTreeSet<Word> {
        let depth = depth.max(self.max_len());
        self.words.iter().flat_map(|w| pres.extensions(w, depth)).collect()
    }

    /// Merges complete sibling groups into their parent, giving the
    /// canonical list of maximal cylinders.
    pub fn compact(&self, pres: &TreePresentation) -> Self {
        let mut cur: BTreeSet<Word> = self.words.iter().cloned().collect();
        for len in (1..=self.max_len()).rev() {
            let parents: BTreeSet<Word> = cur.iter().filter(|w| w.len() == len).map(|w| w[..len - 1].to_vec()).collect();
            for parent in parents {
                let Some(state) = pres.run(&parent) else { continue };
                let children: Vec<Word> = pres
                    .labels(state)
                    .map(|(l, _)| {
                        let mut c = parent.clone();
                        c.push(l);
                        c
                    })
                    .collect();
                if children.iter().all(|c| cur.contains(c)) {
                    for c in &children {
                        cur.remove(c);
                    }
                    cur.insert(parent);
                }
            }
        }
        Self { words: cur.into_iter().collect() }
    }

    fn binary(&self, other: &Self, pres: &TreePresentation, op: impl Fn(bool, bool) -> bool) -> Self {
        let depth = self.max_len().max(other.max_len());
        let a = self.expand(pres, depth);
        let b = other.expand(pres, depth);
        let words: Vec<Word> = a.union(&b).filter(|w| op(a.contains(*w), b.contains(*w))).cloned().collect();
        Self { words }.compact(pres)
    }

    pub fn union(&self, other: &Self, pres: &TreePresentation) -> Self {
        self.binary(other, pres, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self, pres: &TreePresentation) -> Self {
        self.binary(other, pres, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self, pres: &TreePresentation) -> Self {
        self.binary(other, pres, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &Self, pres: &TreePresentation) -> bool {
        self.difference(other, pres).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self, pres: &TreePresentation) -> bool {
        self.intersection(other, pres).is_empty()
    }

    pub fn same_set(&self, other: &Self, pres: &TreePresentation) -> bool {
        self.compact(pres) == other.compact(pres)
    }

    /// Length of the longest prefix shared by every point of the set, so that
    /// the diameter is `2^-lcp`. `None` for the empty set; `usize::MAX` for
    /// a single point.
    pub fn lcp(&self, pres: &TreePresentation) -> Option<usize> {
        match self.words.len() {
            0 => None,
            1 => {
                let w = &self.words[0];
                Some(pres.forced_run(w).map_or(usize::MAX, |f| w.len() + f))
            }
            _ => Some(common_prefix_len(&self.words)),
        }
    }

    /// Diameter in the cylinder ultrametric.
    pub fn diameter(&self, pres: &TreePresentation) -> f64 {
        match self.lcp(pres) {
            None | Some(usize::MAX) => 0.0,
            Some(n) => 0.5f64.powi(n.min(1000) as i32),
        }
    }

    /// Canonical split into two non-empty clopen pieces: find the first
    /// position where points of the set disagree and divide the labels seen
    /// there into a lower and an upper half.
    pub fn split(&self, pres: &TreePresentation) -> Result<(Self, Self), CantorError> {
        let list: Vec<Word> = if self.words.len() == 1 {
            let w = &self.words[0];
            let forced = pres
                .forced_run(w)
                .ok_or_else(|| CantorError::NotPerfect(pres.run(w).unwrap_or(pres.root())))?;
            let state = pres.run(w).ok_or_else(|| CantorError::Structure(format!("{w:?} is not a path")))?;
            let mut stem = w.clone();
            let mut s = state;
            for _ in 0..forced {
                let (l, t) = pres.labels(s).next().expect("forced state has one label");
                stem.push(l);
                s = t;
            }
            pres.extensions(&stem, stem.len() + 1)
        } else if self.words.is_empty() {
            return Err(CantorError::Precondition("cannot split the empty set".into()));
        } else {
            self.words.clone()
        };
        let at = common_prefix_len(&list);
        let symbols: BTreeSet<u32> = list.iter().map(|w| w[at]).collect();
        let cut = symbols.len().div_ceil(2);
        let low: BTreeSet<u32> = symbols.into_iter().take(cut).collect();
        let (a, b): (Vec<Word>, Vec<Word>) = list.into_iter().partition(|w| low.contains(&w[at]));
        Ok((Self::from_sorted(a), Self::from_sorted(b)))
    }

    /// Intersection with a sub-presentation `sub`, whose paths are a subset of
    /// the ambient paths: `[w] ∩ sub` is `[w]` in `sub` when `w` is a `sub`
    /// path and empty otherwise.
    pub fn restrict_to(&self, sub: &TreePresentation) -> Self {
        Self { words: self.words.iter().filter(|w| sub.accepts(w)).cloned().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift() -> TreePresentation {
        TreePresentation::full_shift(2)
    }

    #[test]
    fn rejects_non_antichain() {
        assert!(ClopenSet::new(&shift(), vec![vec![0], vec![0, 1]]).is_err());
        assert!(ClopenSet::new(&shift(), vec![vec![2]]).is_err());
    }

    #[test]
    fn compact_merges_full_sibling_groups() {
        let p = shift();
        let s = ClopenSet::new(&p, vec![vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(s.compact(&p).words(), &[vec![0], vec![1, 0]]);
        let all = ClopenSet::new(&p, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(all.compact(&p), ClopenSet::whole());
    }

    #[test]
    fn set_algebra() {
        let p = shift();
        let a = ClopenSet::cylinder(vec![0]);
        let b = ClopenSet::new(&p, vec![vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(a.intersection(&b, &p).words(), &[vec![0, 1]]);
        assert_eq!(a.difference(&b, &p).words(), &[vec![0, 0]]);
        assert!(a.difference(&b, &p).is_disjoint(&b, &p));
        assert!(a.union(&b, &p).same_set(&ClopenSet::new(&p, vec![vec![0], vec![1, 1]]).unwrap(), &p));
    }

    #[test]
    fn split_halves_labels() {
        let p = TreePresentation::full_shift(3);
        let (a, b) = ClopenSet::whole().split(&p).unwrap();
        assert_eq!(a.words(), &[vec![0], vec![1]]);
        assert_eq!(b.words(), &[vec![2]]);
        let (c, d) = a.split(&p).unwrap();
        assert_eq!((c.words(), d.words()), (&[vec![0]][..], &[vec![1]][..]));
        assert_eq!(a.lcp(&p), Some(0));
        assert_eq!(c.lcp(&p), Some(1));
        assert_eq!(c.diameter(&p), 0.5);
    }
}
