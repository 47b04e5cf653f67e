//! Morse boundary type of a right-angled Artin group from its defining graph.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RaagError {
    #[error("edge {0}-{0} is a self-loop")]
    SelfLoop(String),
    #[error("edge {0}-{1} listed twice")]
    DuplicateEdge(String, String),
    #[error("vertex {0} listed twice")]
    DuplicateVertex(String),
    #[error("edge references unknown vertex {0}")]
    UnknownVertex(String),
    #[error("cannot parse graph: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum VertexName {
    Index(u64),
    Name(String),
}

impl VertexName {
    fn into_string(self) -> String {
        match self {
            VertexName::Index(i) => i.to_string(),
            VertexName::Name(s) => s,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<VertexName>,
    #[serde(default)]
    edges: Vec<(VertexName, VertexName)>,
}

/// A finite simple graph. Vertices are indexed `0..n` and carry names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct DefiningGraph {
    names: Vec<String>,
    adj: Vec<Vec<bool>>,
}

impl TryFrom<GraphFile> for DefiningGraph {
    type Error = RaagError;

    fn try_from(f: GraphFile) -> Result<Self, RaagError> {
        let names: Vec<String> = f.vertices.into_iter().map(VertexName::into_string).collect();
        let edges: Vec<(String, String)> = f.edges.into_iter().map(|(a, b)| (a.into_string(), b.into_string())).collect();
        DefiningGraph::from_names(names, &edges)
    }
}

impl From<DefiningGraph> for GraphFile {
    fn from(g: DefiningGraph) -> Self {
        let edges = g
            .edges()
            .into_iter()
            .map(|(i, j)| (VertexName::Name(g.names[i].clone()), VertexName::Name(g.names[j].clone())))
            .collect();
        GraphFile { vertices: g.names.into_iter().map(VertexName::Name).collect(), edges }
    }
}

impl DefiningGraph {
    /// Graph on vertices `0..n`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, RaagError> {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let named: Vec<(String, String)> = edges.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect();
        Self::from_names(names, &named)
    }

    pub fn from_names(names: Vec<String>, edges: &[(String, String)]) -> Result<Self, RaagError> {
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(RaagError::DuplicateVertex(name.clone()));
            }
        }
        let n = names.len();
        let mut adj = vec![vec![false; n]; n];
        for (a, b) in edges {
            let i = *index.get(a).ok_or_else(|| RaagError::UnknownVertex(a.clone()))?;
            let j = *index.get(b).ok_or_else(|| RaagError::UnknownVertex(b.clone()))?;
            if i == j {
                return Err(RaagError::SelfLoop(a.clone()));
            }
            if adj[i][j] {
                return Err(RaagError::DuplicateEdge(a.clone(), b.clone()));
            }
            adj[i][j] = true;
            adj[j][i] = true;
        }
        Ok(Self { names, adj })
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    /// Edges as index pairs `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.num_vertices();
        (0..n).flat_map(|i| (i + 1..n).filter(move |&j| self.adj[i][j]).map(move |j| (i, j))).collect()
    }

    /// The graph with vertex `v` renamed to position `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.num_vertices();
        let mut names = vec![String::new(); n];
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            names[perm[i]] = self.names[i].clone();
            for j in 0..n {
                adj[perm[i]][perm[j]] = self.adj[i][j];
            }
        }
        Self { names, adj }
    }

    /// Connected components of the complement graph, each sorted, ordered by
    /// least vertex.
    pub fn complement_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                for w in 0..n {
                    if w != v && !self.adj[v][w] && comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// `"n: a-b c-d ..."` with vertices `0..n`.
impl FromStr for DefiningGraph {
    type Err = RaagError;

    fn from_str(line: &str) -> Result<Self, RaagError> {
        let (head, tail) = line.split_once(':').ok_or_else(|| RaagError::Parse(format!("missing ':' in {line:?}")))?;
        let n: usize = head.trim().parse().map_err(|_| RaagError::Parse(format!("bad vertex count {head:?}")))?;
        let mut edges = Vec::new();
        for tok in tail.split_whitespace() {
            let (a, b) = tok.split_once('-').ok_or_else(|| RaagError::Parse(format!("bad edge {tok:?}")))?;
            let parse = |s: &str| s.parse::<usize>().map_err(|_| RaagError::Parse(format!("bad vertex {s:?}")));
            let (a, b) = (parse(a)?, parse(b)?);
            if a >= n || b >= n {
                return Err(RaagError::UnknownVertex(a.max(b).to_string()));
            }
            edges.push((a, b));
        }
        DefiningGraph::new(n, &edges)
    }
}

impl fmt::Display for DefiningGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.num_vertices())?;
        for (i, j) in self.edges() {
            write!(f, " {i}-{j}")?;
        }
        Ok(())
    }
}

/// Outcome of [`is_join`]: the two sides are unions of complement
/// components, and every vertex of one side is adjacent to every vertex of
/// the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinWitness {
    pub is_join: bool,
    pub sides: Option<(Vec<usize>, Vec<usize>)>,
}

pub fn is_join(g: &DefiningGraph) -> Result<JoinWitness, RaagError> {
    if g.num_vertices() < 2 {
        return Err(RaagError::Precondition("join test needs at least two vertices".into()));
    }
    let comps = g.complement_components();
    if comps.len() < 2 {
        return Ok(JoinWitness { is_join: false, sides: None });
    }
    let a = comps[0].clone();
    let mut b: Vec<usize> = comps[1..].concat();
    b.sort_unstable();
    Ok(JoinWitness { is_join: true, sides: Some((a, b)) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundaryClass {
    Empty,
    TwoPoints,
    Cantor,
    OmegaCantor,
}

impl fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryClass::Empty => "Empty",
            BoundaryClass::TwoPoints => "TwoPoints",
            BoundaryClass::Cantor => "Cantor",
            BoundaryClass::OmegaCantor => "OmegaCantor",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: BoundaryClass,
    /// Short human-readable reason: the join sides, or the case that applied.
    pub witness: String,
}

fn names(g: &DefiningGraph, vs: &[usize]) -> String {
    vs.iter().map(|&v| g.name(v)).collect::<Vec<_>>().join(" ")
}

pub fn classify(g: &DefiningGraph) -> Classification {
    let n = g.num_vertices();
    let (class, witness) = match n {
        0 => (BoundaryClass::Empty, "trivial group".to_string()),
        1 => (BoundaryClass::TwoPoints, "infinite cyclic".to_string()),
        _ => match is_join(g).expect("two or more vertices") {
            JoinWitness { sides: Some((a, b)), .. } => (BoundaryClass::Empty, format!("join {{{}}} * {{{}}}", names(g, &a), names(g, &b))),
            _ if g.edges().is_empty() => (BoundaryClass::Cantor, format!("free group of rank {n}")),
            _ => (BoundaryClass::OmegaCantor, "connected complement, not discrete".to_string()),
        },
    };
    Classification { class, witness }
}

/// Classifies `(id, graph)` pairs in parallel and returns CSV with header
/// `id,class,witness`, rows in input order.
pub fn classify_batch_csv(graphs: &[(String, DefiningGraph)]) -> String {
    let rows: Vec<Classification> = graphs.par_iter().map(|(_, g)| classify(g)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "class", "witness"]).expect("in-memory csv");
    for ((id, _), c) in graphs.iter().zip(rows) {
        w.write_record([id.as_str(), &c.class.to_string(), &c.witness]).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

/// Every labelled simple graph on `n` vertices, in edge-mask order.
pub fn all_graphs(n: usize) -> impl Iterator<Item = DefiningGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 1u64 << pairs.len();
    (0..total).map(move |mask| {
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
        DefiningGraph::new(n, &edges).expect("distinct pairs")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> DefiningGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        DefiningGraph::new(n, &edges).unwrap()
    }

    #[test]
    fn regression_cases() {
        assert_eq!(classify(&DefiningGraph::new(1, &[]).unwrap()).class, BoundaryClass::TwoPoints);
        assert_eq!(classify(&DefiningGraph::new(2, &[]).unwrap()).class, BoundaryClass::Cantor);
        assert_eq!(classify(&"4: 0-1 1-2 2-3 3-0".parse().unwrap()).class, BoundaryClass::Empty);
        assert_eq!(classify(&path(3)).class, BoundaryClass::Empty);
        assert_eq!(classify(&path(4)).class, BoundaryClass::OmegaCantor);
        assert_eq!(classify(&DefiningGraph::new(0, &[]).unwrap()).class, BoundaryClass::Empty);
    }

    #[test]
    fn join_witness_for_c4() {
        let c4: DefiningGraph = "4: 0-1 1-2 2-3 3-0".parse().unwrap();
        let w = is_join(&c4).unwrap();
        assert_eq!(w.sides, Some((vec![0, 2], vec![1, 3])));
        assert!(!is_join(&path(4)).unwrap().is_join);
        assert!(is_join(&path(2)).unwrap().is_join);
        assert!(is_join(&path(1)).is_err());
    }

    #[test]
    fn structural_errors() {
        assert!(matches!("2: 0-0".parse::<DefiningGraph>(), Err(RaagError::SelfLoop(_))));
        assert!(matches!("2: 0-1 1-0".parse::<DefiningGraph>(), Err(RaagError::DuplicateEdge(..))));
        assert!(matches!("2: 0-2".parse::<DefiningGraph>(), Err(RaagError::UnknownVertex(_))));
        assert!(matches!("x".parse::<DefiningGraph>(), Err(RaagError::Parse(_))));
    }

    #[test]
    fn json_accepts_numbers_and_names() {
        let g: DefiningGraph = serde_json::from_str(r#"{"vertices":[0,1,"c"],"edges":[[0,1],[1,"c"]]}"#).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(classify(&g).class, BoundaryClass::Empty);
        let back: DefiningGraph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn csv_rows_follow_input() {
        let csv = classify_batch_csv(&[("p4".into(), path(4)), ("k1".into(), path(1))]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "id,class,witness");
        assert!(lines[1].starts_with("p4,OmegaCantor,"));
        assert!(lines[2].starts_with("k1,TwoPoints,"));
    }

    #[test]
    fn graph_counts() {
        let total: usize = (0..=5).map(|n| all_graphs(n).count()).sum();
        assert_eq!(total, 1 + 1 + 2 + 8 + 64 + 1024);
    }
}
