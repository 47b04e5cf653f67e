//! Standard presentations: the binary tree and two families of glued trees.

use super::presentation::TreePresentation;

pub fn binary_tree() -> TreePresentation {
    TreePresentation::full_shift(2)
}

/// Binary tree (labels 0, 1) with a fresh binary tree hung off every vertex
/// through labels 2 and 3.
pub fn glued_tree() -> TreePresentation {
    iterated_glued(1)
}

/// Generation `n` of the iterated gluing: state `i` is a vertex of a binary
/// tree glued in at stage `i`; labels 0, 1 stay in that tree and labels 2, 3
/// enter a copy glued at stage `i + 1`.
pub fn iterated_glued(n: usize) -> TreePresentation {
    let mut edges = Vec::new();
    for i in 0..=n {
        edges.push((i, 0, i));
        edges.push((i, 1, i));
        if i < n {
            edges.push((i, 2, i + 1));
            edges.push((i, 3, i + 1));
        }
    }
    TreePresentation::new(n + 1, 0, &edges).expect("glued tree is well formed")
}

/// Generation `n` of the alternate gluing: copies are glued only at vertices
/// of even depth inside their own tree. State `2i + p` is stage `i`, depth
/// parity `p`.
pub fn alternate_glued(n: usize) -> TreePresentation {
    let id = |i: usize, p: usize| 2 * i + p;
    let mut edges = Vec::new();
    for i in 0..=n {
        for p in 0..2 {
            edges.push((id(i, p), 0, id(i, 1 - p)));
            edges.push((id(i, p), 1, id(i, 1 - p)));
            if p == 0 && i < n {
                edges.push((id(i, 0), 2, id(i + 1, 1)));
                edges.push((id(i, 0), 3, id(i + 1, 1)));
            }
        }
    }
    TreePresentation::new(2 * (n + 1), 0, &edges).expect("alternate gluing is well formed")
}

/// Generations `0..=len` of the iterated gluing.
pub fn glued_chain(len: usize) -> Vec<TreePresentation> {
    (0..=len).map(iterated_glued).collect()
}

/// Generations `0..=len` of the alternate gluing.
pub fn alternate_chain(len: usize) -> Vec<TreePresentation> {
    (0..=len).map(alternate_glued).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generations_are_cantor() {
        for n in 0..4 {
            assert!(iterated_glued(n).validate().unwrap().is_cantor());
            assert!(alternate_glued(n).validate().unwrap().is_cantor());
        }
    }

    #[test]
    fn glued_tree_counts() {
        // depth 1: 4 words; depth 2: two binary vertices with 4 children, two glued with 2.
        assert_eq!(glued_tree().words_at_depth(1).len(), 4);
        assert_eq!(glued_tree().words_at_depth(2).len(), 12);
        assert_eq!(alternate_glued(1).words_at_depth(2).len(), 4 * 2);
    }
}
