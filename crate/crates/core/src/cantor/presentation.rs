//! Cantor spaces presented as boundaries of finite-state rooted trees.
//!
//! A point of the space is an infinite label sequence accepted from the root.
//! The metric is the cylinder ultrametric: two points sharing a prefix of
//! length `n` (and no longer) are at distance `2^-n`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::CantorError;

/// A finite path from the root, as a sequence of edge labels.
pub type Word = Vec<u32>;

/// Serialized form: `{"states": n, "root": r, "edges": [[from, label, to], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PresentationFile {
    states: usize,
    root: usize,
    edges: Vec<(usize, u32, usize)>,
}

/// A label-deterministic finite automaton whose infinite runs from `root`
/// form a Cantor space (when [`TreePresentation::validate`] says so).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PresentationFile", into = "PresentationFile")]
pub struct TreePresentation {
    root: usize,
    transitions: Vec<BTreeMap<u32, usize>>,
}

impl TryFrom<PresentationFile> for TreePresentation {
    type Error = CantorError;

    fn try_from(file: PresentationFile) -> Result<Self, Self::Error> {
        TreePresentation::new(file.states, file.root, &file.edges)
    }
}

impl From<TreePresentation> for PresentationFile {
    fn from(p: TreePresentation) -> Self {
        PresentationFile {
            states: p.transitions.len(),
            root: p.root,
            edges: p.edges(),
        }
    }
}

/// Outcome of [`TreePresentation::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub non_empty: bool,
    pub perfect: bool,
    /// For each state, a shortest label path to a branching state.
    pub branching_paths: BTreeMap<usize, Word>,
    /// A state from which no branching state is reachable.
    pub violating_state: Option<usize>,
}

impl ValidationReport {
    pub fn is_cantor(&self) -> bool {
        self.non_empty && self.perfect
    }
}

impl TreePresentation {
    /// Builds a presentation, rejecting out-of-range states and
    /// non-deterministic labels. Reachability and dead ends are checked by
    /// [`validate`](Self::validate).
    pub fn new(states: usize, root: usize, edges: &[(usize, u32, usize)]) -> Result<Self, CantorError> {
        if states == 0 || root >= states {
            return Err(CantorError::Structure(format!("root {root} outside {states} states")));
        }
        let mut transitions = vec![BTreeMap::new(); states];
        for &(from, label, to) in edges {
            if from >= states || to >= states {
                return Err(CantorError::Structure(format!("edge ({from}, {label}, {to}) references a missing state")));
            }
            if transitions[from].insert(label, to).is_some() {
                return Err(CantorError::Structure(format!("state {from} has two edges labelled {label}")));
            }
        }
        Ok(Self { root, transitions })
    }

    /// The full shift on `k` symbols: one state with `k` loops.
    pub fn full_shift(k: u32) -> Self {
        let edges: Vec<_> = (0..k).map(|l| (0, l, 0)).collect();
        Self::new(1, 0, &edges).expect("full shift is well formed")
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn edges(&self) -> Vec<(usize, u32, usize)> {
        self.transitions
            .iter()
            .enumerate()
            .flat_map(|(s, m)| m.iter().map(move |(&l, &t)| (s, l, t)))
            .collect()
    }

    pub fn step(&self, state: usize, label: u32) -> Option<usize> {
        self.transitions[state].get(&label).copied()
    }

    pub fn labels(&self, state: usize) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.transitions[state].iter().map(|(&l, &t)| (l, t))
    }

    pub fn out_degree(&self, state: usize) -> usize {
        self.transitions[state].len()
    }

    pub fn max_out_degree(&self) -> usize {
        self.transitions.iter().map(BTreeMap::len).max().unwrap_or(0)
    }

    /// State reached by reading `word` from `from`, if the path exists.
    pub fn run_from(&self, from: usize, word: &[u32]) -> Option<usize> {
        word.iter().try_fold(from, |s, &l| self.step(s, l))
    }

    pub fn run(&self, word: &[u32]) -> Option<usize> {
        self.run_from(self.root, word)
    }

    pub fn accepts(&self, word: &[u32]) -> bool {
        self.run(word).is_some()
    }

    /// All words of length exactly `depth - word.len()` appended to `word`,
    /// in lexicographic order. `word` must be a valid path.
    pub fn extensions(&self, word: &[u32], depth: usize) -> Vec<Word> {
        let Some(state) = self.run(word) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut buf = word.to_vec();
        self.extend_into(state, depth, &mut buf, &mut out);
        out
    }

    fn extend_into(&self, state: usize, depth: usize, buf: &mut Word, out: &mut Vec<Word>) {
        if buf.len() >= depth {
            out.push(buf.clone());
            return;
        }
        for (l, t) in self.labels(state) {
            buf.push(l);
            self.extend_into(t, depth, buf, out);
            buf.pop();
        }
    }

    /// Every accepted word of length `depth`.
    pub fn words_at_depth(&self, depth: usize) -> Vec<Word> {
        self.extensions(&[], depth)
    }

    /// Number of labels a point in the cylinder of `word` is forced to read
    /// before the first branching state. `None` when no branching state is
    /// reachable (the cylinder is a single point).
    pub fn forced_run(&self, word: &[u32]) -> Option<usize> {
        let mut state = self.run(word)?;
        for n in 0..=self.num_states() {
            match self.out_degree(state) {
                0 => return None,
                1 => state = self.labels(state).next().map(|(_, t)| t)?,
                _ => return Some(n),
            }
        }
        None
    }

    fn structural_check(&self) -> Result<(), CantorError> {
        for (s, m) in self.transitions.iter().enumerate() {
            if m.is_empty() {
                return Err(CantorError::DeadEnd(s));
            }
        }
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(s) = queue.pop_front() {
            for (_, t) in self.labels(s) {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if let Some(s) = seen.iter().position(|&r| !r) {
            return Err(CantorError::Unreachable(s));
        }
        Ok(())
    }

    /// Decides non-emptiness and perfectness of the boundary.
    ///
    /// Non-emptiness follows from the structural checks (every state has an
    /// outgoing edge, so the root has an infinite run). The boundary is
    /// perfect iff every state reaches a state with two or more labels;
    /// otherwise the cylinder leading to a violating state is a single point.
    pub fn validate(&self) -> Result<ValidationReport, CantorError> {
        self.structural_check()?;
        // Reverse BFS from branching states gives shortest certificates.
        let n = self.num_states();
        let mut reverse: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for (s, l, t) in self.edges() {
            reverse[t].push((s, l));
        }
        let mut next_hop: Vec<Option<(u32, usize)>> = vec![None; n];
        let mut done = vec![false; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if self.out_degree(s) >= 2 {
                done[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(t) = queue.pop_front() {
            for &(s, l) in &reverse[t] {
                if !done[s] {
                    done[s] = true;
                    next_hop[s] = Some((l, t));
                    queue.push_back(s);
                }
            }
        }
        let mut branching_paths = BTreeMap::new();
        let mut violating_state = None;
        for s in 0..n {
            if !done[s] {
                violating_state.get_or_insert(s);
                continue;
            }
            let mut path = Vec::new();
            let mut cur = s;
            while let Some((l, t)) = next_hop[cur] {
                path.push(l);
                cur = t;
            }
            branching_paths.insert(s, path);
        }
        Ok(ValidationReport {
            non_empty: true,
            perfect: violating_state.is_none(),
            branching_paths,
            violating_state,
        })
    }

    /// Errors unless the presentation is a valid Cantor space.
    pub fn ensure_cantor(&self) -> Result<(), CantorError> {
        let report = self.validate()?;
        match report.violating_state {
            Some(s) => Err(CantorError::NotPerfect(s)),
            None => Ok(()),
        }
    }

    /// Labels used anywhere in the presentation.
    pub fn alphabet(&self) -> BTreeSet<u32> {
        self.transitions.iter().flat_map(|m| m.keys().copied()).collect()
    }
}
