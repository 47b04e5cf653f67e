use omega_core::raag::{all_graphs, classify, classify_batch_csv, is_join, BoundaryClass, DefiningGraph};
use proptest::prelude::*;

/// Some split of the vertices into two non-empty sides with every cross pair
/// adjacent, found by trying all of them.
fn brute_join(g: &DefiningGraph) -> Option<u32> {
    let n = g.num_vertices();
    (1..(1u32 << n) - 1).find(|&mask| {
        (0..n).all(|i| (0..n).all(|j| (mask >> i & 1) == (mask >> j & 1) || g.adjacent(i, j)))
    })
}

fn oracle(g: &DefiningGraph) -> BoundaryClass {
    match g.num_vertices() {
        0 => BoundaryClass::Empty,
        1 => BoundaryClass::TwoPoints,
        _ if brute_join(g).is_some() => BoundaryClass::Empty,
        _ if g.edges().is_empty() => BoundaryClass::Cantor,
        _ => BoundaryClass::OmegaCantor,
    }
}

#[test]
fn agrees_with_bipartition_oracle() {
    let mut count = 0;
    let mut tally = std::collections::BTreeMap::new();
    for n in 1..=5 {
        for g in all_graphs(n) {
            let got = classify(&g).class;
            assert_eq!(got, oracle(&g), "{:?}", g.edges());
            *tally.entry(got).or_insert(0) += 1;
            count += 1;
        }
    }
    assert_eq!(count, 1099);
    assert!(tally.len() == 4, "{tally:?}");
}

#[test]
fn join_sides_are_complete_bipartite() {
    for n in 2..=5 {
        for g in all_graphs(n) {
            let w = is_join(&g).unwrap();
            assert_eq!(w.is_join, brute_join(&g).is_some());
            if let Some((a, b)) = w.sides {
                assert_eq!(a.len() + b.len(), n);
                assert!(a.iter().all(|&i| b.iter().all(|&j| g.adjacent(i, j))));
            }
        }
    }
}

#[test]
fn named_regressions() {
    let cases = [
        ("1:", BoundaryClass::TwoPoints),
        ("2:", BoundaryClass::Cantor),
        ("4: 0-1 1-2 2-3 3-0", BoundaryClass::Empty),
        ("3: 0-1 1-2", BoundaryClass::Empty),
        ("4: 0-1 1-2 2-3", BoundaryClass::OmegaCantor),
        ("5: 0-1 1-2 2-3 3-4 4-0", BoundaryClass::OmegaCantor),
        ("3: 0-1", BoundaryClass::OmegaCantor),
    ];
    for (text, want) in cases {
        let g: DefiningGraph = text.parse().unwrap();
        assert_eq!(classify(&g).class, want, "{text}");
    }
}

#[test]
fn batch_rows_keep_their_ids() {
    let graphs: Vec<(String, DefiningGraph)> = all_graphs(4).enumerate().map(|(i, g)| (format!("g{i}"), g)).collect();
    let csv = classify_batch_csv(&graphs);
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 64);
    for (row, (id, g)) in rows.iter().zip(&graphs) {
        assert_eq!(&row[0], id);
        assert_eq!(row[1].to_string(), classify(g).class.to_string());
    }
}

fn graph(n: usize, mask: u32) -> DefiningGraph {
    let pairs: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
    DefiningGraph::new(n, &edges).unwrap()
}

proptest! {
    #[test]
    fn invariant_under_relabeling(n in 1usize..9, mask: u32, perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()) {
        let g = graph(n, mask);
        let p: Vec<usize> = perm.into_iter().filter(|&v| v < n).collect();
        prop_assert_eq!(classify(&g.relabel(&p)).class, classify(&g).class);
    }

    #[test]
    fn json_round_trip(n in 1usize..7, mask: u32) {
        let g = graph(n, mask);
        let back: DefiningGraph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        prop_assert_eq!(classify(&back), classify(&g));
    }
}
