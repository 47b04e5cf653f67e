//! Pairs `C ⊆ D` of presented Cantor spaces, entwinement, and clopen extension.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::clopen::ClopenSet;
use super::presentation::{TreePresentation, Word};
use super::CantorError;

/// Deepest cylinder level the extension routines will unfold to.
pub const MAX_UNFOLD: usize = 48;
/// Largest word list a single hull may produce.
pub const MAX_HULL_WORDS: u128 = 1 << 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SubPresentationFile {
    ambient: TreePresentation,
    sub: TreePresentation,
}

/// Synchronous product of `sub` and `ambient`, restricted to pairs reachable
/// from the two roots along `sub` edges.
#[derive(Debug, Clone)]
struct Product {
    index: HashMap<(usize, usize), usize>,
    /// The ambient state has a label the sub state lacks.
    bad: Vec<bool>,
    /// Number of sub steps to the nearest bad pair.
    escape: Vec<Option<usize>>,
}

impl Product {
    fn build(sub: &TreePresentation, ambient: &TreePresentation) -> Result<Self, CantorError> {
        let mut index = HashMap::new();
        let mut pairs = vec![(sub.root(), ambient.root())];
        index.insert(pairs[0], 0);
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (c, d) = pairs[i];
            let mut out = Vec::new();
            for (l, c2) in sub.labels(c) {
                let d2 = ambient
                    .step(d, l)
                    .ok_or_else(|| CantorError::Structure(format!("sub edge ({c}, {l}) has no ambient counterpart at state {d}")))?;
                let next = *index.entry((c2, d2)).or_insert_with(|| {
                    pairs.push((c2, d2));
                    pairs.len() - 1
                });
                out.push(next);
            }
            succ.push(out);
            i += 1;
        }
        let bad: Vec<bool> = pairs
            .iter()
            .map(|&(c, d)| ambient.labels(d).any(|(l, _)| sub.step(c, l).is_none()))
            .collect();
        let mut reverse = vec![Vec::new(); pairs.len()];
        for (from, outs) in succ.iter().enumerate() {
            for &to in outs {
                reverse[to].push(from);
            }
        }
        let mut escape: Vec<Option<usize>> = bad.iter().map(|&b| b.then_some(0)).collect();
        let mut queue: VecDeque<usize> = (0..pairs.len()).filter(|&p| bad[p]).collect();
        while let Some(p) = queue.pop_front() {
            let d = escape[p].expect("queued pairs have a distance");
            for &q in &reverse[p] {
                if escape[q].is_none() {
                    escape[q] = Some(d + 1);
                    queue.push_back(q);
                }
            }
        }
        Ok(Self { index, bad, escape })
    }
}

/// A Cantor space `sub` sitting inside `ambient`, both presented by trees
/// over a shared label alphabet: every `sub` path is an `ambient` path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SubPresentationFile", into = "SubPresentationFile")]
pub struct SubPresentation {
    ambient: TreePresentation,
    sub: TreePresentation,
    #[serde(skip)]
    product: Option<Product>,
}

impl TryFrom<SubPresentationFile> for SubPresentation {
    type Error = CantorError;

    fn try_from(f: SubPresentationFile) -> Result<Self, Self::Error> {
        SubPresentation::new(f.ambient, f.sub)
    }
}

impl From<SubPresentation> for SubPresentationFile {
    fn from(s: SubPresentation) -> Self {
        SubPresentationFile { ambient: s.ambient, sub: s.sub }
    }
}

/// Answer of [`SubPresentation::is_entwined`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entwinement {
    pub entwined: bool,
    /// An ambient cylinder contained in the sub space, when not entwined.
    pub witness: Option<Word>,
}

/// The five conclusions of the clopen extension, each checked on cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendClopenReport {
    pub restricts_to_pieces: bool,
    pub disjoint: bool,
    pub proper: bool,
    pub within_epsilon: bool,
    pub pieces_entwined: bool,
}

impl ExtendClopenReport {
    pub fn all_hold(&self) -> bool {
        self.restricts_to_pieces && self.disjoint && self.proper && self.within_epsilon && self.pieces_entwined
    }
}

/// Number of paths of length `depth - word.len()` leaving the end of `word`.
pub(crate) fn count_extensions(pres: &TreePresentation, word: &[u32], depth: usize) -> u128 {
    let Some(state) = pres.run(word) else { return 0 };
    let steps = depth.saturating_sub(word.len());
    let mut counts = vec![1u128; pres.num_states()];
    for _ in 0..steps {
        counts = (0..pres.num_states())
            .map(|s| pres.labels(s).map(|(_, t)| counts[t]).fold(0u128, u128::saturating_add))
            .collect();
    }
    counts[state]
}

impl SubPresentation {
    pub fn new(ambient: TreePresentation, sub: TreePresentation) -> Result<Self, CantorError> {
        ambient.ensure_cantor()?;
        sub.ensure_cantor()?;
        let product = Product::build(&sub, &ambient)?;
        Ok(Self { ambient, sub, product: Some(product) })
    }

    pub fn ambient(&self) -> &TreePresentation {
        &self.ambient
    }

    pub fn sub(&self) -> &TreePresentation {
        &self.sub
    }

    fn product(&self) -> Product {
        match &self.product {
            Some(p) => p.clone(),
            None => Product::build(&self.sub, &self.ambient).expect("validated on construction"),
        }
    }

    fn pair_of(&self, product: &Product, word: &[u32]) -> Option<usize> {
        let c = self.sub.run(word)?;
        let d = self.ambient.run(word)?;
        product.index.get(&(c, d)).copied()
    }

    /// Whether the sub space is all of the ambient space.
    pub fn is_equal(&self) -> bool {
        let product = self.product();
        !product.bad.iter().any(|&b| b)
    }

    /// Shortest ambient cylinder inside `within` that is contained in the sub
    /// space, found by breadth-first search over the product automaton. An
    /// ambient cylinder lies in the sub space iff no product pair reachable
    /// from it has an ambient label missing from the sub state.
    pub fn interior_witness(&self, within: &ClopenSet) -> Option<Word> {
        let product = self.product();
        let mut sources: Vec<&Word> = within.words().iter().filter(|w| self.sub.accepts(w)).collect();
        sources.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let mut frontier: BTreeSet<(usize, Word)> = sources.into_iter().map(|w| (w.len(), w.clone())).collect();
        let mut seen = vec![false; product.bad.len()];
        while let Some((_, word)) = frontier.pop_first() {
            let Some(p) = self.pair_of(&product, &word) else { continue };
            if seen[p] {
                continue;
            }
            seen[p] = true;
            if product.escape[p].is_none() {
                return Some(word);
            }
            let c = self.sub.run(&word).expect("sources are sub paths");
            for (l, _) in self.sub.labels(c) {
                let mut next = word.clone();
                next.push(l);
                frontier.insert((next.len(), next));
            }
        }
        None
    }

    /// The sub space is entwined iff it has empty interior in the ambient
    /// space. Errors when the two spaces coincide.
    pub fn is_entwined(&self) -> Result<Entwinement, CantorError> {
        if self.is_equal() {
            return Err(CantorError::Precondition("entwinement needs a proper subspace; sub equals ambient".into()));
        }
        let witness = self.interior_witness(&ClopenSet::whole());
        Ok(Entwinement { entwined: witness.is_none(), witness })
    }

    /// Least depth at which some ambient path through `within` leaves the sub
    /// space.
    pub fn escape_depth(&self, within: &ClopenSet) -> Option<usize> {
        let product = self.product();
        within
            .words()
            .iter()
            .filter_map(|w| match self.pair_of(&product, w) {
                None => Some(w.len()),
                Some(p) => product.escape[p].map(|d| w.len() + d + 1),
            })
            .min()
    }

    /// Union of the ambient cylinders at `depth` over sub paths in `piece`.
    pub fn hull(&self, piece: &ClopenSet, depth: usize) -> Result<ClopenSet, CantorError> {
        let depth = depth.max(piece.max_len());
        if depth > MAX_UNFOLD {
            return Err(CantorError::Resolution { depth, limit: MAX_UNFOLD });
        }
        let count: u128 = piece.words().iter().map(|w| count_extensions(&self.sub, w, depth)).sum();
        if count > MAX_HULL_WORDS {
            return Err(CantorError::HullSize { depth, words: count, limit: MAX_HULL_WORDS });
        }
        Ok(ClopenSet::from_sorted(piece.expand(&self.sub, depth).into_iter().collect()))
    }

    /// Extends a clopen partition `c0 ⊔ c1` of the whole sub space to
    /// disjoint clopen sets of the ambient space; see
    /// [`extend_clopen_within`](Self::extend_clopen_within).
    pub fn extend_clopen(&self, c0: &ClopenSet, c1: &ClopenSet, epsilon_exp: usize) -> Result<(ClopenSet, ClopenSet), CantorError> {
        self.extend_clopen_within(&ClopenSet::whole(), c0, c1, epsilon_exp)
    }

    /// Given an ambient clopen `within` with `within ∩ C = c0 ⊔ c1`, returns
    /// `(d0, d1)` inside `within` with `d_i ∩ C = c_i`, `d0 ∩ d1 = ∅`,
    /// `d0 ∪ d1 ⊊ within` and `d_i` inside the open `2^-epsilon_exp`
    /// neighbourhood of `c_i`.
    ///
    /// In the cylinder ultrametric every neighbourhood of a clopen set is
    /// itself clopen, so `d_i` is the hull of `c_i` at a depth past both the
    /// neighbourhood radius and the first level where `within` escapes `C`.
    pub fn extend_clopen_within(
        &self,
        within: &ClopenSet,
        c0: &ClopenSet,
        c1: &ClopenSet,
        epsilon_exp: usize,
    ) -> Result<(ClopenSet, ClopenSet), CantorError> {
        if c0.is_empty() || c1.is_empty() {
            return Err(CantorError::Precondition("both pieces of the partition must be non-empty".into()));
        }
        if !c0.is_disjoint(c1, &self.sub) {
            return Err(CantorError::Precondition("partition pieces overlap".into()));
        }
        if !c0.union(c1, &self.sub).same_set(&within.restrict_to(&self.sub), &self.sub) {
            return Err(CantorError::Precondition("pieces do not partition the sub space inside the ambient set".into()));
        }
        let escape = self.escape_depth(within).ok_or_else(|| CantorError::NotEntwined {
            witness: self.interior_witness(within).unwrap_or_default(),
        })?;
        let depth = (epsilon_exp + 1).max(c0.max_len()).max(c1.max_len()).max(within.max_len()).max(escape);
        Ok((self.hull(c0, depth)?, self.hull(c1, depth)?))
    }

    /// Checks the five extension conclusions by cylinder algebra.
    pub fn check_extend_clopen(
        &self,
        within: &ClopenSet,
        pieces: [&ClopenSet; 2],
        extended: [&ClopenSet; 2],
        epsilon_exp: usize,
    ) -> ExtendClopenReport {
        let d = &self.ambient;
        let c = &self.sub;
        let restricts_to_pieces = (0..2).all(|i| extended[i].restrict_to(c).same_set(pieces[i], c));
        let disjoint = extended[0].is_disjoint(extended[1], d);
        let both = extended[0].union(extended[1], d);
        let proper = both.is_subset(within, d) && !both.same_set(within, d);
        let radius = epsilon_exp + 1;
        let within_epsilon = (0..2).all(|i| {
            let near: BTreeSet<Word> = pieces[i]
                .expand(c, radius)
                .into_iter()
                .map(|w| w[..radius].to_vec())
                .collect();
            extended[i]
                .expand(d, radius)
                .iter()
                .all(|w| near.contains(&w[..radius]))
        });
        let pieces_entwined = extended.iter().all(|e| self.interior_witness(e).is_none());
        ExtendClopenReport { restricts_to_pieces, disjoint, proper, within_epsilon, pieces_entwined }
    }
}

#[cfg(test)]
mod tests {
    use super::super::examples::{binary_tree, glued_tree};
    use super::*;

    #[test]
    fn cylinder_inside_full_shift_is_not_entwined() {
        let d = TreePresentation::full_shift(2);
        let c = TreePresentation::new(2, 0, &[(0, 0, 1), (1, 0, 1), (1, 1, 1)]).unwrap();
        let s = SubPresentation::new(d, c).unwrap();
        let e = s.is_entwined().unwrap();
        assert!(!e.entwined);
        assert_eq!(e.witness, Some(vec![0]));
    }

    #[test]
    fn binary_tree_is_entwined_in_glued_tree() {
        let s = SubPresentation::new(glued_tree(), binary_tree()).unwrap();
        assert_eq!(s.is_entwined().unwrap(), Entwinement { entwined: true, witness: None });
    }

    #[test]
    fn equal_spaces_are_rejected() {
        let s = SubPresentation::new(TreePresentation::full_shift(2), TreePresentation::full_shift(2)).unwrap();
        assert!(matches!(s.is_entwined(), Err(CantorError::Precondition(_))));
    }

    #[test]
    fn sub_must_follow_ambient_edges() {
        let r = SubPresentation::new(TreePresentation::full_shift(2), TreePresentation::full_shift(3));
        assert!(matches!(r, Err(CantorError::Structure(_))));
    }

    #[test]
    fn extend_label_split_in_glued_tree() {
        let s = SubPresentation::new(glued_tree(), binary_tree()).unwrap();
        let c0 = ClopenSet::cylinder(vec![0]);
        let c1 = ClopenSet::cylinder(vec![1]);
        let (d0, d1) = s.extend_clopen(&c0, &c1, 2).unwrap();
        assert_eq!(d0.max_len(), 3);
        let report = s.check_extend_clopen(&ClopenSet::whole(), [&c0, &c1], [&d0, &d1], 2);
        assert!(report.all_hold(), "{report:?}");
    }

    #[test]
    fn extension_preconditions() {
        let s = SubPresentation::new(glued_tree(), binary_tree()).unwrap();
        let c0 = ClopenSet::cylinder(vec![0]);
        assert!(matches!(s.extend_clopen(&c0, &ClopenSet::empty(), 1), Err(CantorError::Precondition(_))));
        assert!(matches!(s.extend_clopen(&c0, &c0, 1), Err(CantorError::Precondition(_))));
        let c1 = ClopenSet::cylinder(vec![1]);
        assert!(matches!(s.extend_clopen(&c0, &c1, 60), Err(CantorError::Resolution { .. })));
    }

    #[test]
    fn extension_counts_paths() {
        assert_eq!(count_extensions(&glued_tree(), &[], 2), 4 * 4 - 4);
    }
}
