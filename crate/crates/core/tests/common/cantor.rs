//! Brute-force checks on Cantor presentations by listing every path of a
//! fixed length.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use omega_core::cantor::{ClopenSet, CorrespondenceAtDepth, SubPresentation, TreePresentation, Word};
use rand::seq::SliceRandom;
use rand::Rng;

/// All label paths of length `len` from the root, built from the edge list.
pub fn paths(p: &TreePresentation, len: usize) -> Vec<Word> {
    let mut out: BTreeMap<usize, Vec<(u32, usize)>> = BTreeMap::new();
    for (s, l, t) in p.edges() {
        out.entry(s).or_default().push((l, t));
    }
    let mut layer = vec![(Vec::new(), p.root())];
    for _ in 0..len {
        let mut next = Vec::new();
        for (w, s) in layer {
            for &(l, t) in out.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
                let mut w2 = w.clone();
                w2.push(l);
                next.push((w2, t));
            }
        }
        layer = next;
    }
    let mut words: Vec<Word> = layer.into_iter().map(|(w, _)| w).collect();
    words.sort();
    words
}

pub fn covers(set: &ClopenSet, w: &[u32]) -> bool {
    set.words().iter().any(|u| w.starts_with(u))
}

/// The paths of `universe` inside `set`.
pub fn cells(set: &ClopenSet, universe: &[Word]) -> BTreeSet<Word> {
    universe.iter().filter(|w| covers(set, w)).cloned().collect()
}

fn lcp(words: &BTreeSet<Word>) -> usize {
    let (Some(a), Some(b)) = (words.first(), words.last()) else { return 0 };
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub fn resolution(c: &CorrespondenceAtDepth) -> usize {
    c.pairs.iter().flat_map(|(a, b)| a.words().iter().chain(b.words())).map(Vec::len).max().unwrap_or(0).max(c.depth) + 1
}

/// `[bijection, left partition, right partition, mesh]` by enumeration.
pub fn correspondence_verdict(c: &CorrespondenceAtDepth, left: &TreePresentation, right: &TreePresentation) -> [bool; 4] {
    let len = resolution(c);
    let (ul, ur) = (paths(left, len), paths(right, len));
    let sides: Vec<(BTreeSet<Word>, BTreeSet<Word>)> = c.pairs.iter().map(|(a, b)| (cells(a, &ul), cells(b, &ur))).collect();
    let partition = |universe: &[Word], right: bool| {
        universe.iter().all(|w| sides.iter().filter(|s| if right { &s.1 } else { &s.0 }.contains(w)).count() == 1)
    };
    [
        sides.iter().all(|(a, b)| !a.is_empty() && !b.is_empty()),
        partition(&ul, false),
        partition(&ur, true),
        sides.iter().all(|(a, b)| lcp(a) >= c.depth && lcp(b) >= c.depth),
    ]
}

/// Each fine pair lies inside exactly one coarse pair, on both sides.
pub fn refines(fine: &CorrespondenceAtDepth, coarse: &CorrespondenceAtDepth, left: &TreePresentation, right: &TreePresentation) -> bool {
    let len = resolution(fine).max(resolution(coarse));
    let (ul, ur) = (paths(left, len), paths(right, len));
    let coarse: Vec<_> = coarse.pairs.iter().map(|(a, b)| (cells(a, &ul), cells(b, &ur))).collect();
    fine.pairs.iter().all(|(a, b)| {
        let (a, b) = (cells(a, &ul), cells(b, &ur));
        let hits: Vec<_> = coarse.iter().filter(|(ca, _)| a.is_subset(ca)).collect();
        hits.len() == 1 && b.is_subset(&hits[0].1)
    })
}

/// Cutting `outer` down to the two sub spaces gives the pairs of `inner`.
pub fn restricts(
    outer: &CorrespondenceAtDepth,
    inner: &CorrespondenceAtDepth,
    left_sub: &TreePresentation,
    right_sub: &TreePresentation,
) -> bool {
    let len = resolution(outer).max(resolution(inner));
    let (ul, ur) = (paths(left_sub, len), paths(right_sub, len));
    let mut cut = BTreeSet::new();
    for (a, b) in &outer.pairs {
        let (a, b) = (cells(a, &ul), cells(b, &ur));
        if a.is_empty() != b.is_empty() {
            return false;
        }
        if !a.is_empty() {
            cut.insert((a, b));
        }
    }
    let want: BTreeSet<_> = inner.pairs.iter().map(|(a, b)| (cells(a, &ul), cells(b, &ur))).collect();
    cut == want
}

fn product_reach(s: &SubPresentation, from: (usize, usize)) -> (BTreeSet<(usize, usize)>, bool) {
    let (d, c) = (s.ambient(), s.sub());
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    let mut leaves = false;
    while let Some((a, q)) = queue.pop_front() {
        for (l, a2) in d.labels(a) {
            match c.step(q, l) {
                None => leaves = true,
                Some(q2) => {
                    if seen.insert((a2, q2)) {
                        queue.push_back((a2, q2));
                    }
                }
            }
        }
    }
    (seen, leaves)
}

/// No ambient cylinder below `word` lies inside the sub tree: every state
/// pair reachable from `word` can still reach an ambient label the sub tree
/// lacks.
pub fn always_escapes(s: &SubPresentation, word: &[u32]) -> bool {
    let (Some(a0), Some(c0)) = (s.ambient().run(word), s.sub().run(word)) else { return true };
    let (reach, _) = product_reach(s, (a0, c0));
    reach.into_iter().all(|x| product_reach(s, x).1)
}

/// `[restricts, disjoint, proper, within epsilon, entwined]` for a clopen
/// extension of `pieces` inside the whole ambient space.
pub fn extension_verdict(s: &SubPresentation, pieces: [&ClopenSet; 2], extended: [&ClopenSet; 2], epsilon_exp: usize) -> [bool; 5] {
    let len = [pieces[0], pieces[1], extended[0], extended[1]]
        .iter()
        .flat_map(|p| p.words())
        .map(Vec::len)
        .max()
        .unwrap_or(0)
        .max(epsilon_exp + 1);
    let ud = paths(s.ambient(), len);
    let uc = paths(s.sub(), len);
    let ext = [cells(extended[0], &ud), cells(extended[1], &ud)];
    let restricts = (0..2).all(|i| {
        let mine: BTreeSet<Word> = uc.iter().filter(|w| ext[i].contains(*w)).cloned().collect();
        mine == cells(pieces[i], &uc)
    });
    let disjoint = ext[0].is_disjoint(&ext[1]);
    let proper = ext[0].len() + ext[1].len() < ud.len();
    let r = epsilon_exp + 1;
    let within_epsilon = (0..2).all(|i| {
        let near: BTreeSet<Word> = cells(pieces[i], &uc).iter().map(|w| w[..r].to_vec()).collect();
        ext[i].iter().all(|w| near.contains(&w[..r]))
    });
    let entwined = ext.iter().all(|e| e.iter().all(|w| always_escapes(s, w)));
    [restricts, disjoint, proper, within_epsilon, entwined]
}

/// A random entwined pair on at most `max_states` states: the ambient tree
/// has two or three labels per state, and the sub tree keeps two of them
/// wherever there are three.
pub fn random_entwined<R: Rng>(rng: &mut R, max_states: usize) -> SubPresentation {
    loop {
        let n = rng.random_range(1..=max_states);
        let mut amb = Vec::new();
        let mut sub = Vec::new();
        for s in 0..n {
            let degree = rng.random_range(2..=3u32);
            let mut keep: Vec<u32> = (0..degree).collect();
            keep.shuffle(rng);
            keep.truncate(2);
            for l in 0..degree {
                let t = rng.random_range(0..n);
                amb.push((s, l, t));
                if keep.contains(&l) {
                    sub.push((s, l, t));
                }
            }
        }
        let (Ok(d), Ok(c)) = (TreePresentation::new(n, 0, &amb), TreePresentation::new(n, 0, &sub)) else { continue };
        let Ok(s) = SubPresentation::new(d, c) else { continue };
        if matches!(s.is_entwined(), Ok(e) if e.entwined) {
            return s;
        }
    }
}

/// Splits the sub space into two non-empty clopen sets of cylinders at a
/// random depth.
pub fn random_split<R: Rng>(rng: &mut R, s: &SubPresentation) -> (ClopenSet, ClopenSet) {
    let depth = rng.random_range(1..=3);
    let mut words = paths(s.sub(), depth);
    words.shuffle(rng);
    let cut = rng.random_range(1..words.len());
    let right = words.split_off(cut);
    (ClopenSet::new(s.sub(), words).unwrap(), ClopenSet::new(s.sub(), right).unwrap())
}
