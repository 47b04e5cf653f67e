//! Homeomorphisms as refining streams of paired clopen partitions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::EntwinedChain;
use super::clopen::ClopenSet;
use super::entwine::SubPresentation;
use super::presentation::TreePresentation;
use super::system::NestedClopenSystem;
use super::CantorError;

/// A bijection between a clopen partition of `X` and one of `X'`, every piece
/// of diameter at most `2^-depth`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceAtDepth {
    pub depth: usize,
    pub pairs: Vec<(ClopenSet, ClopenSet)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub pieces: usize,
    pub bijection: bool,
    pub left_partition: bool,
    pub right_partition: bool,
    pub mesh: bool,
}

impl CorrespondenceReport {
    pub fn all_hold(&self) -> bool {
        self.bijection && self.left_partition && self.right_partition && self.mesh
    }
}

fn is_partition<'a>(pieces: impl Iterator<Item = &'a ClopenSet>, pres: &TreePresentation) -> bool {
    let mut words: Vec<&Vec<u32>> = pieces.flat_map(|p| p.words()).collect();
    words.sort();
    // In sorted order a prefix is immediately followed by one of its extensions.
    let antichain = words.windows(2).all(|w| !(w[0].len() <= w[1].len() && w[1][..w[0].len()] == *w[0]));
    antichain && ClopenSet::from_sorted(words.into_iter().cloned().collect()).compact(pres) == ClopenSet::whole()
}

fn refine_side(set: &ClopenSet, pres: &TreePresentation, k: usize) -> Vec<ClopenSet> {
    let mut out = Vec::new();
    let mut stack = vec![set.clone()];
    while let Some(piece) = stack.pop() {
        if piece.lcp(pres).is_none_or(|l| l >= k) {
            out.push(piece);
        } else {
            let (a, b) = piece.split(pres).expect("perfect spaces split");
            stack.push(a);
            stack.push(b);
        }
    }
    out.sort();
    out
}

/// Splits the coarsest piece (lexicographically first among ties).
fn split_coarsest(pieces: &mut Vec<ClopenSet>, pres: &TreePresentation) {
    let (at, _) = pieces
        .iter()
        .enumerate()
        .min_by_key(|(i, p)| (p.lcp(pres).unwrap_or(usize::MAX), *i))
        .expect("non-empty piece list");
    let (a, b) = pieces.remove(at).split(pres).expect("perfect spaces split");
    pieces.push(a);
    pieces.push(b);
    pieces.sort();
}

/// Pairs two non-empty clopen sets piece by piece at mesh `2^-k`: both sides
/// are cut to mesh `2^-k`, the side with fewer pieces keeps splitting its
/// coarsest piece until the counts agree, and pieces are matched in
/// lexicographic order.
pub fn free_refine(
    a: &ClopenSet,
    b: &ClopenSet,
    left: &TreePresentation,
    right: &TreePresentation,
    k: usize,
) -> Vec<(ClopenSet, ClopenSet)> {
    assert!(!a.is_empty() && !b.is_empty(), "free refinement needs two non-empty sets");
    let mut l = refine_side(a, left, k);
    let mut r = refine_side(b, right, k);
    while l.len() != r.len() {
        if l.len() < r.len() {
            split_coarsest(&mut l, left);
        } else {
            split_coarsest(&mut r, right);
        }
    }
    l.into_iter().zip(r).collect()
}

fn compact_pairs(pairs: impl IntoIterator<Item = (ClopenSet, ClopenSet)>, left: &TreePresentation, right: &TreePresentation) -> Vec<(ClopenSet, ClopenSet)> {
    let mut out: Vec<_> = pairs.into_iter().map(|(a, b)| (a.compact(left), b.compact(right))).collect();
    out.sort();
    out
}

impl CorrespondenceAtDepth {
    /// The single pair `(X, X')`.
    pub fn trivial() -> Self {
        Self { depth: 0, pairs: vec![(ClopenSet::whole(), ClopenSet::whole())] }
    }

    pub fn check(&self, left: &TreePresentation, right: &TreePresentation) -> CorrespondenceReport {
        let nonempty = self.pairs.iter().all(|(a, b)| !a.is_empty() && !b.is_empty());
        let mesh = self
            .pairs
            .iter()
            .all(|(a, b)| a.lcp(left).is_some_and(|l| l >= self.depth) && b.lcp(right).is_some_and(|l| l >= self.depth));
        CorrespondenceReport {
            pieces: self.pairs.len(),
            bijection: nonempty,
            left_partition: is_partition(self.pairs.iter().map(|p| &p.0), left),
            right_partition: is_partition(self.pairs.iter().map(|p| &p.1), right),
            mesh,
        }
    }

    /// Every pair sits componentwise inside a single pair of `coarser`.
    pub fn refines(&self, coarser: &Self, left: &TreePresentation, right: &TreePresentation) -> bool {
        self.pairs.iter().all(|(a, b)| {
            let hits: Vec<&(ClopenSet, ClopenSet)> = coarser.pairs.iter().filter(|(ca, _)| a.is_subset(ca, left)).collect();
            hits.len() == 1 && b.is_subset(&hits[0].1, right)
        })
    }

    /// Intersecting every pair with the sub spaces gives exactly the pairs of
    /// `inner` (pairs meeting neither sub space are dropped).
    pub fn restricts_to(
        &self,
        inner: &Self,
        left_sub: &TreePresentation,
        right_sub: &TreePresentation,
    ) -> bool {
        let mut restricted = Vec::new();
        for (a, b) in &self.pairs {
            let (ra, rb) = (a.restrict_to(left_sub), b.restrict_to(right_sub));
            match (ra.is_empty(), rb.is_empty()) {
                (true, true) => {}
                (false, false) => restricted.push((ra, rb)),
                _ => return false,
            }
        }
        compact_pairs(restricted, left_sub, right_sub) == compact_pairs(inner.pairs.iter().cloned(), left_sub, right_sub)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("correspondences serialize")
    }
}

fn word_label(w: &[u32]) -> String {
    if w.is_empty() {
        return "e".into();
    }
    let sep = if w.iter().any(|&l| l > 9) { "." } else { "" };
    w.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

fn set_label(s: &ClopenSet) -> String {
    s.words().iter().map(|w| word_label(w)).collect::<Vec<_>>().join(",")
}

/// DOT digraph of a refining stream: one node per pair, an edge from each
/// pair to the pairs refining it at the next depth.
pub fn stream_to_dot(stream: &[CorrespondenceAtDepth], left: &TreePresentation) -> String {
    let mut out = String::from("digraph refinement {\n  rankdir=TB;\n  node [shape=box, fontsize=9];\n");
    for (level, corr) in stream.iter().enumerate() {
        for (i, (a, b)) in corr.pairs.iter().enumerate() {
            let _ = writeln!(out, "  n{level}_{i} [label=\"{} | {}\"];", set_label(a), set_label(b));
        }
        if level == 0 {
            continue;
        }
        for (i, (a, _)) in corr.pairs.iter().enumerate() {
            if let Some(j) = stream[level - 1].pairs.iter().position(|(ca, _)| a.is_subset(ca, left)) {
                let _ = writeln!(out, "  n{}_{j} -> n{level}_{i};", level - 1);
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Pairs for two systems of the same shape whose leaves correspond by index.
fn extend_over(
    sys: &NestedClopenSystem,
    sys2: &NestedClopenSystem,
    s: &SubPresentation,
    s2: &SubPresentation,
    k: usize,
) -> Result<Vec<(ClopenSet, ClopenSet)>, CantorError> {
    if !sys.same_shape(sys2) {
        return Err(CantorError::Structure("nested systems have different index sets".into()));
    }
    let (d, d2) = (s.ambient(), s2.ambient());
    let mut pairs = Vec::new();
    for ((_, n), (_, n2)) in sys.nodes().iter().zip(sys2.nodes()) {
        match (&n.k, &n2.k) {
            (Some(kw), Some(kw2)) => pairs.extend(free_refine(kw, kw2, d, d2, k)),
            _ => {
                let hull_depth = |sp: &SubPresentation, node: &super::system::SystemNode| -> Result<usize, CantorError> {
                    let escape = sp.escape_depth(&node.d).ok_or_else(|| CantorError::NotEntwined {
                        witness: sp.interior_witness(&node.d).unwrap_or_default(),
                    })?;
                    Ok(k.max(node.d.max_len()).max(node.c.max_len()).max(escape))
                };
                let h = s.hull(&n.c, hull_depth(s, n)?)?;
                let h2 = s2.hull(&n2.c, hull_depth(s2, n2)?)?;
                let rest = n.d.difference(&h, d);
                let rest2 = n2.d.difference(&h2, d2);
                pairs.push((h, h2));
                pairs.extend(free_refine(&rest, &rest2, d, d2, k));
            }
        }
    }
    Ok(pairs)
}

/// Extends a correspondence `phi` on `C → C'` to `D → D'`.
///
/// The leaves of `sys` and `sys2` must be the two sides of `phi`, pair by
/// pair. Each leaf hull is paired with its partner hull, and the pieces
/// `K_ω`, together with what the hulls leave of each leaf `D_ω`, are freely
/// refined to the depth of `phi`.
pub fn extend_homeo(
    phi: &CorrespondenceAtDepth,
    sys: &NestedClopenSystem,
    sys2: &NestedClopenSystem,
    s: &SubPresentation,
    s2: &SubPresentation,
) -> Result<CorrespondenceAtDepth, CantorError> {
    if !sys.same_shape(sys2) {
        return Err(CantorError::Structure("nested systems have different index sets".into()));
    }
    let leaves: Vec<(ClopenSet, ClopenSet)> = sys
        .leaves()
        .into_iter()
        .map(|w| (sys.node(w).expect("leaf").c.clone(), sys2.node(w).expect("same shape").c.clone()))
        .collect();
    if compact_pairs(leaves, s.sub(), s2.sub()) != compact_pairs(phi.pairs.iter().cloned(), s.sub(), s2.sub()) {
        return Err(CantorError::Precondition("correspondence does not pair the leaves of the two systems".into()));
    }
    let pairs = extend_over(sys, sys2, s, s2, phi.depth)?;
    Ok(CorrespondenceAtDepth { depth: phi.depth, pairs })
}

/// Extends the pairs `inner` of a partition of `U ∩ C` and `U' ∩ C'` to a
/// paired partition of `U` and `U'`.
fn extend_local(
    inner: &[(ClopenSet, ClopenSet)],
    within: &ClopenSet,
    within2: &ClopenSet,
    s: &SubPresentation,
    s2: &SubPresentation,
    k: usize,
) -> Result<Vec<(ClopenSet, ClopenSet)>, CantorError> {
    let left: Vec<ClopenSet> = inner.iter().map(|p| p.0.clone()).collect();
    let right: Vec<ClopenSet> = inner.iter().map(|p| p.1.clone()).collect();
    let sys = NestedClopenSystem::from_partition(s, within, &left)?;
    let sys2 = NestedClopenSystem::from_partition(s2, within2, &right)?;
    extend_over(&sys, &sys2, s, s2, k)
}

/// Refining streams for every stage of two chains: entry `[n][j]` pairs
/// `X_n` with `X'_n` at mesh `2^-j`, refines `[n][j-1]`, and restricts to
/// `[n-1][j]` on `X_{n-1}`.
pub fn omega_homeo_stream(
    x: &EntwinedChain,
    x2: &EntwinedChain,
    depth: usize,
) -> Result<Vec<Vec<CorrespondenceAtDepth>>, CantorError> {
    if x.len() != x2.len() {
        return Err(CantorError::Precondition(format!("chains have lengths {} and {}", x.len(), x2.len())));
    }
    let mut stages: Vec<Vec<CorrespondenceAtDepth>> = Vec::with_capacity(x.len());
    let mut base = vec![CorrespondenceAtDepth::trivial()];
    for j in 1..=depth {
        let prev = &base[j - 1];
        let pairs = prev
            .pairs
            .par_iter()
            .map(|(a, b)| free_refine(a, b, x.space(0), x2.space(0), j))
            .collect::<Vec<_>>()
            .concat();
        base.push(CorrespondenceAtDepth { depth: j, pairs });
    }
    stages.push(base);
    for n in 0..x.len() - 1 {
        let (s, s2) = (x.link(n), x2.link(n));
        let below = &stages[n];
        let mut row = vec![CorrespondenceAtDepth::trivial()];
        for j in 1..=depth {
            let finer_below = &below[j];
            let pairs = row[j - 1]
                .pairs
                .par_iter()
                .map(|(a, b)| {
                    let restricted = a.restrict_to(s.sub());
                    let inner: Vec<(ClopenSet, ClopenSet)> = finer_below
                        .pairs
                        .iter()
                        .filter(|(q, _)| !restricted.is_empty() && q.is_subset(&restricted, s.sub()))
                        .cloned()
                        .collect();
                    if inner.is_empty() {
                        Ok(free_refine(a, b, s.ambient(), s2.ambient(), j))
                    } else {
                        extend_local(&inner, a, b, s, s2, j)
                    }
                })
                .collect::<Result<Vec<_>, CantorError>>()?
                .concat();
            row.push(CorrespondenceAtDepth { depth: j, pairs });
        }
        stages.push(row);
    }
    Ok(stages)
}

/// One correspondence per chain stage at mesh `2^-depth`, each extending the
/// one before it.
pub fn omega_homeo(x: &EntwinedChain, x2: &EntwinedChain, depth: usize) -> Result<Vec<CorrespondenceAtDepth>, CantorError> {
    Ok(omega_homeo_stream(x, x2, depth)?
        .into_iter()
        .map(|mut row| row.pop().expect("stream has depth 0"))
        .collect())
}

/// Pieces per side, keyed by depth, for a stream.
pub fn stream_sizes(stream: &[CorrespondenceAtDepth]) -> BTreeMap<usize, usize> {
    stream.iter().map(|c| (c.depth, c.pairs.len())).collect()
}

#[cfg(test)]
mod tests {
    use super::super::examples::{alternate_chain, binary_tree, glued_chain, glued_tree};
    use super::*;

    #[test]
    fn free_refine_balances_counts() {
        let two = TreePresentation::full_shift(2);
        let three = TreePresentation::full_shift(3);
        let pairs = free_refine(&ClopenSet::whole(), &ClopenSet::whole(), &two, &three, 1);
        let corr = CorrespondenceAtDepth { depth: 1, pairs };
        assert_eq!(corr.pairs.len(), 3);
        assert!(corr.check(&two, &three).all_hold());
    }

    #[test]
    fn identity_extension_restricts_to_identity() {
        let s = SubPresentation::new(glued_tree(), binary_tree()).unwrap();
        let sys = NestedClopenSystem::build(&s, 3).unwrap();
        let phi = CorrespondenceAtDepth {
            depth: 3,
            pairs: sys.leaves().iter().map(|w| (sys.node(w).unwrap().c.clone(), sys.node(w).unwrap().c.clone())).collect(),
        };
        let ext = extend_homeo(&phi, &sys, &sys, &s, &s).unwrap();
        assert!(ext.check(s.ambient(), s.ambient()).all_hold());
        assert!(ext.restricts_to(&phi, s.sub(), s.sub()));
    }

    #[test]
    fn mismatched_systems_are_rejected() {
        let s = SubPresentation::new(glued_tree(), binary_tree()).unwrap();
        let a = NestedClopenSystem::build(&s, 1).unwrap();
        let b = NestedClopenSystem::build(&s, 2).unwrap();
        let phi = CorrespondenceAtDepth::trivial();
        assert!(matches!(extend_homeo(&phi, &a, &b, &s, &s), Err(CantorError::Structure(_))));
    }

    #[test]
    fn small_cross_chain_stream() {
        let x = EntwinedChain::new(glued_chain(1)).unwrap();
        let y = EntwinedChain::new(alternate_chain(1)).unwrap();
        let stream = omega_homeo_stream(&x, &y, 2).unwrap();
        for (n, row) in stream.iter().enumerate() {
            for (j, corr) in row.iter().enumerate() {
                assert!(corr.check(x.space(n), y.space(n)).all_hold(), "stage {n} depth {j}");
                if j > 0 {
                    assert!(corr.refines(&row[j - 1], x.space(n), y.space(n)));
                }
                if n > 0 {
                    assert!(corr.restricts_to(&stream[n - 1][j], x.space(n - 1), y.space(n - 1)));
                }
            }
        }
        let dot = stream_to_dot(&stream[1], x.space(1));
        assert!(dot.starts_with("digraph") && dot.contains("->"));
    }
}
