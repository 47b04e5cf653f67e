use std::collections::BTreeMap;

use serde::Serialize;

use super::clopen::ClopenSet;
use super::entwine::SubPresentation;
use super::CantorError;

/// One indexed node `ω` of a nested system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemNode {
    pub c: ClopenSet,
    pub d: ClopenSet,
    /// `D_ω − (D_ω0 ∪ D_ω1)`; present exactly when `ω` has children.
    pub k: Option<ClopenSet>,
}

/// Clopen sets `C_ω ⊆ D_ω` indexed by binary words `ω`, with
/// `C_ω = C_ω0 ⊔ C_ω1`, `D_ω0, D_ω1 ⊆ D_ω` disjoint and `D_ω ∩ C = C_ω`.
///
/// Index words are strings over `'0'`, `'1'`; the root is the empty string.
/// The index tree is a full binary tree, not necessarily complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestedClopenSystem {
    nodes: BTreeMap<String, SystemNode>,
    /// Each run of this many splits is guaranteed to lengthen the common
    /// prefix of `C_ω` by one.
    schedule_step: usize,
}

/// Invariant sweep of a [`NestedClopenSystem`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SystemReport {
    pub nodes: usize,
    pub failures: Vec<String>,
}

impl SystemReport {
    pub fn all_hold(&self) -> bool {
        self.failures.is_empty()
    }
}

fn schedule_step(s: &SubPresentation) -> usize {
    let deg = s.sub().max_out_degree().max(2);
    (usize::BITS - (deg - 1).leading_zeros()) as usize
}

impl NestedClopenSystem {
    /// Canonical system over the whole ambient space: every `C_ω` with
    /// `|ω| < depth` is halved by [`ClopenSet::split`] and the halves
    /// extended to the ambient space.
    pub fn build(s: &SubPresentation, depth: usize) -> Result<Self, CantorError> {
        let mut nodes = BTreeMap::new();
        let mut stack = vec![(String::new(), ClopenSet::whole(), ClopenSet::whole())];
        while let Some((omega, c, d)) = stack.pop() {
            let k = if omega.len() < depth {
                let (c0, c1) = c.split(s.sub())?;
                let (d0, d1) = s.extend_clopen_within(&d, &c0, &c1, 0)?;
                let k = d.difference(&d0.union(&d1, s.ambient()), s.ambient());
                stack.push((format!("{omega}1"), c1, d1));
                stack.push((format!("{omega}0"), c0, d0));
                Some(k)
            } else {
                None
            };
            nodes.insert(omega, SystemNode { c, d, k });
        }
        Ok(Self { nodes, schedule_step: schedule_step(s) })
    }

    /// System inside the ambient clopen `within` whose leaves are exactly
    /// `pieces`, in order. The pieces must partition `within ∩ C`.
    pub fn from_partition(s: &SubPresentation, within: &ClopenSet, pieces: &[ClopenSet]) -> Result<Self, CantorError> {
        if pieces.is_empty() || pieces.iter().any(ClopenSet::is_empty) {
            return Err(CantorError::Precondition("partition pieces must be non-empty".into()));
        }
        let sub = s.sub();
        let all = pieces.iter().fold(ClopenSet::empty(), |acc, p| acc.union(p, sub));
        if !all.same_set(&within.restrict_to(sub), sub) {
            return Err(CantorError::Precondition("pieces do not cover the sub space inside the ambient set".into()));
        }
        let mut nodes = BTreeMap::new();
        let mut stack = vec![(String::new(), 0, pieces.len(), within.clone())];
        while let Some((omega, lo, hi, d)) = stack.pop() {
            let c = pieces[lo..hi].iter().fold(ClopenSet::empty(), |acc, p| acc.union(p, sub));
            let k = if hi - lo >= 2 {
                let mid = lo + (hi - lo).div_ceil(2);
                let c0 = pieces[lo..mid].iter().fold(ClopenSet::empty(), |acc, p| acc.union(p, sub));
                let c1 = pieces[mid..hi].iter().fold(ClopenSet::empty(), |acc, p| acc.union(p, sub));
                let (d0, d1) = s.extend_clopen_within(&d, &c0, &c1, 0)?;
                let k = d.difference(&d0.union(&d1, s.ambient()), s.ambient());
                stack.push((format!("{omega}1"), mid, hi, d1));
                stack.push((format!("{omega}0"), lo, mid, d0));
                Some(k)
            } else {
                None
            };
            nodes.insert(omega, SystemNode { c, d, k });
        }
        Ok(Self { nodes, schedule_step: schedule_step(s) })
    }

    pub fn nodes(&self) -> &BTreeMap<String, SystemNode> {
        &self.nodes
    }

    pub fn node(&self, omega: &str) -> Option<&SystemNode> {
        self.nodes.get(omega)
    }

    /// Leaf indices in left-to-right order.
    pub fn leaves(&self) -> Vec<&str> {
        // Leaves form a prefix antichain, so map order is left to right.
        self.nodes.iter().filter(|(_, n)| n.k.is_none()).map(|(w, _)| w.as_str()).collect()
    }

    pub fn schedule_step(&self) -> usize {
        self.schedule_step
    }

    /// Same index tree as `other`.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.nodes.iter().zip(&other.nodes).all(|((a, x), (b, y))| a == b && x.k.is_some() == y.k.is_some())
    }

    /// Checks every nested-system identity by cylinder algebra, plus the
    /// diameter schedule when `canonical` (systems from [`build`](Self::build)).
    pub fn check(&self, s: &SubPresentation, canonical: bool) -> SystemReport {
        let (cp, dp) = (s.sub(), s.ambient());
        let mut failures = Vec::new();
        for (omega, node) in &self.nodes {
            let tag = if omega.is_empty() { "e" } else { omega.as_str() };
            if !node.d.restrict_to(cp).same_set(&node.c, cp) {
                failures.push(format!("{tag}: D ∩ C differs from C"));
            }
            if canonical && omega.is_empty() && !(node.c == ClopenSet::whole() && node.d == ClopenSet::whole()) {
                failures.push("e: root is not the whole space".into());
            }
            if canonical {
                let floor = omega.len() / self.schedule_step;
                if node.c.lcp(cp).is_some_and(|l| l < floor) {
                    failures.push(format!("{tag}: diameter exceeds 2^-{floor}"));
                }
            }
            let Some(k) = &node.k else { continue };
            let (Some(n0), Some(n1)) = (self.nodes.get(&format!("{omega}0")), self.nodes.get(&format!("{omega}1"))) else {
                failures.push(format!("{tag}: missing child"));
                continue;
            };
            if !n0.c.is_disjoint(&n1.c, cp) || !n0.c.union(&n1.c, cp).same_set(&node.c, cp) {
                failures.push(format!("{tag}: children do not partition C"));
            }
            if !n0.d.is_disjoint(&n1.d, dp) || !n0.d.is_subset(&node.d, dp) || !n1.d.is_subset(&node.d, dp) {
                failures.push(format!("{tag}: children D not disjoint inside D"));
            }
            let expected = node.d.difference(&n0.d.union(&n1.d, dp), dp);
            if k.is_empty() || !k.same_set(&expected, dp) {
                failures.push(format!("{tag}: K empty or inconsistent"));
            }
        }
        SystemReport { nodes: self.nodes.len(), failures }
    }
}

#[cfg(test)]
mod tests {
    use super::super::examples::{binary_tree, glued_tree};
    use super::*;

    fn pair() -> SubPresentation {
        SubPresentation::new(glued_tree(), binary_tree()).unwrap()
    }

    #[test]
    fn depth_zero_is_the_root_only() {
        let sys = NestedClopenSystem::build(&pair(), 0).unwrap();
        assert_eq!(sys.nodes().len(), 1);
        assert_eq!(sys.node("").unwrap().c, ClopenSet::whole());
        assert!(sys.check(&pair(), true).all_hold());
    }

    #[test]
    fn depth_one_splits_by_label() {
        let s = pair();
        let sys = NestedClopenSystem::build(&s, 1).unwrap();
        assert_eq!(sys.node("0").unwrap().c, ClopenSet::cylinder(vec![0]));
        assert_eq!(sys.node("1").unwrap().c, ClopenSet::cylinder(vec![1]));
        assert!(!sys.node("").unwrap().k.as_ref().unwrap().is_empty());
        assert_eq!(sys.leaves(), vec!["0", "1"]);
    }

    #[test]
    fn depth_three_sweep() {
        let s = pair();
        let sys = NestedClopenSystem::build(&s, 3).unwrap();
        assert_eq!(sys.nodes().len(), 15);
        let report = sys.check(&s, true);
        assert!(report.all_hold(), "{:?}", report.failures);
    }

    #[test]
    fn partition_leaves_keep_order() {
        let s = pair();
        let pieces = [vec![0, 0], vec![0, 1], vec![1]].map(ClopenSet::cylinder);
        let sys = NestedClopenSystem::from_partition(&s, &ClopenSet::whole(), &pieces).unwrap();
        let leaves: Vec<_> = sys.leaves().iter().map(|w| sys.node(w).unwrap().c.clone()).collect();
        assert_eq!(leaves, pieces.to_vec());
        assert!(sys.check(&s, false).all_hold());
    }
}
