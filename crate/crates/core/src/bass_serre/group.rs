//! Two-vertex graphs of free abelian groups and their normal forms.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BassSerreError;

const ZZ: &str = include_str!("../../presets/z_free_z.json");
const Z2Z2: &str = include_str!("../../presets/z2_free_z2.json");
const Z2_AMALGAM: &str = include_str!("../../presets/z2_amalgam_z2.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexGroup {
    /// One name per free abelian generator; at most two.
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    /// Pairs of generators identified by the edge group, one pair per edge
    /// group generator.
    #[serde(default)]
    pub inclusions: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable_letter: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphOfGroupsPreset {
    pub name: String,
    pub vertices: Vec<VertexGroup>,
    pub edges: Vec<EdgeSpec>,
}

/// How a generator acts on normal forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GenKind {
    /// Coordinate `coord` of the quotient of vertex group `side` by the
    /// edge group.
    Quotient { side: u8, coord: u8 },
    /// Generator `k` of the edge group, which is central.
    Central { k: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub kind: GenKind,
}

impl Generator {
    pub fn in_vertex(&self, side: u8) -> bool {
        match self.kind {
            GenKind::Quotient { side: s, .. } => s == side,
            GenKind::Central { .. } => true,
        }
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub gen: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Self {
        Self { gen: self.gen, inverse: !self.inverse }
    }

    fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

pub type Word = Vec<Letter>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub side: u8,
    pub v: [i32; 2],
}

/// `c · s_1 ⋯ s_k`: a central part and syllables alternating between the
/// two vertex quotients, each nonzero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Element {
    pub syllables: Vec<Syllable>,
    pub center: [i32; 2],
}

impl Element {
    pub fn identity() -> Self {
        Self::default()
    }

    fn push(&mut self, s: Syllable) {
        match self.syllables.last_mut() {
            Some(last) if last.side == s.side => {
                last.v[0] += s.v[0];
                last.v[1] += s.v[1];
                if last.v == [0, 0] {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push(s),
        }
    }

    pub fn mul_letter(&mut self, group: &Group, l: Letter) {
        match group.generators[l.gen as usize].kind {
            GenKind::Central { k } => self.center[k as usize] += l.sign(),
            GenKind::Quotient { side, coord } => {
                let mut v = [0, 0];
                v[coord as usize] = l.sign();
                self.push(Syllable { side, v });
            }
        }
    }

    pub fn mul(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for s in &other.syllables {
            out.push(*s);
        }
        out.center[0] += other.center[0];
        out.center[1] += other.center[1];
        out
    }

    pub fn inverse(&self) -> Element {
        Element {
            syllables: self.syllables.iter().rev().map(|s| Syllable { side: s.side, v: [-s.v[0], -s.v[1]] }).collect(),
            center: [-self.center[0], -self.center[1]],
        }
    }

    /// Word length for the vertex generators: the group is the edge group
    /// times the free product of the quotients, each free abelian on the
    /// remaining generators.
    pub fn length(&self) -> usize {
        let l1 = |v: &[i32; 2]| (v[0].unsigned_abs() + v[1].unsigned_abs()) as usize;
        self.syllables.iter().map(|s| l1(&s.v)).sum::<usize>() + l1(&self.center)
    }

    /// Distance in the tree between the midpoints of the edges `g·G_e` and
    /// `h·G_e`.
    pub fn tree_distance(&self, other: &Element) -> usize {
        self.inverse().mul(other).syllables.len()
    }

    /// Compact key: the central part, then side and vector per syllable.
    pub fn key(&self) -> Box<[i8]> {
        let mut k = Vec::with_capacity(2 + 3 * self.syllables.len());
        k.extend(self.center.iter().map(|&c| c as i8));
        for s in &self.syllables {
            k.extend([s.side as i8, s.v[0] as i8, s.v[1] as i8]);
        }
        k.into_boxed_slice()
    }

    /// Key of the vertex `g·G_side` of the tree.
    pub fn coset_key(&self, side: u8) -> Vec<i8> {
        let n = match self.syllables.last() {
            Some(s) if s.side == side => self.syllables.len() - 1,
            _ => self.syllables.len(),
        };
        let mut k = vec![side as i8];
        for s in &self.syllables[..n] {
            k.extend([s.side as i8, s.v[0] as i8, s.v[1] as i8]);
        }
        k
    }
}

/// The fundamental group of a preset with its generating set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    pub name: String,
    pub generators: Vec<Generator>,
    /// Name to generator index, including names identified by the edge.
    #[serde(skip)]
    aliases: Vec<(String, u8)>,
}

impl GraphOfGroupsPreset {
    pub fn from_json(s: &str) -> Result<Self, BassSerreError> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let p: Self = serde_path_to_error::deserialize(de).map_err(|e| BassSerreError::Preset(format!("{}: {}", e.path(), e.inner())))?;
        p.group()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, BassSerreError> {
        let s = std::fs::read_to_string(path).map_err(|e| BassSerreError::Preset(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn z_free_z() -> Self {
        Self::from_json(ZZ).expect("shipped preset parses")
    }

    pub fn z2_free_z2() -> Self {
        Self::from_json(Z2Z2).expect("shipped preset parses")
    }

    pub fn z2_amalgam_z2() -> Self {
        Self::from_json(Z2_AMALGAM).expect("shipped preset parses")
    }

    pub fn resolve(name_or_path: &str) -> Result<Self, BassSerreError> {
        match name_or_path {
            "z_free_z" => Ok(Self::z_free_z()),
            "z2_free_z2" => Ok(Self::z2_free_z2()),
            "z2_amalgam_z2" => Ok(Self::z2_amalgam_z2()),
            path => Self::load(Path::new(path)),
        }
    }

    /// Checks the shape (two vertices, one tree edge, generators mapped to
    /// generators injectively) and builds the generating set.
    pub fn group(&self) -> Result<Group, BassSerreError> {
        let bad = |m: String| Err(BassSerreError::Preset(m));
        if self.vertices.len() != 2 || self.edges.len() != 1 {
            return bad("supported presets have two vertices joined by one edge".into());
        }
        let e = &self.edges[0];
        if (e.from, e.to) != (0, 1) {
            return bad("the edge must run from vertex 0 to vertex 1".into());
        }
        if e.stable_letter.is_some() {
            return bad("stable letters are not supported; the edge lies in the maximal tree".into());
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.generators.len() > 2 {
                return bad(format!("vertex {i}: rank {} exceeds 2", v.generators.len()));
            }
        }
        let mut names: Vec<&String> = self.vertices.iter().flat_map(|v| &v.generators).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) || names.iter().any(|n| n.chars().count() != 1 || !n.chars().all(|c| c.is_ascii_lowercase())) {
            return bad("generator names must be distinct single lowercase letters".into());
        }
        if e.inclusions.len() > 2 {
            return bad("edge group rank exceeds 2".into());
        }
        let find = |side: usize, n: &str| self.vertices[side].generators.iter().position(|g| g == n);
        let mut central: Vec<(usize, usize)> = Vec::new();
        for (a, b) in &e.inclusions {
            let (Some(i), Some(j)) = (find(0, a), find(1, b)) else {
                return bad(format!("inclusion {a} -> {b} does not map a generator of vertex 0 to one of vertex 1"));
            };
            if central.iter().any(|&(x, y)| x == i || y == j) {
                return bad(format!("inclusion {a} -> {b} is not injective"));
            }
            central.push((i, j));
        }
        let mut generators = Vec::new();
        let mut aliases = Vec::new();
        for (k, &(i, j)) in central.iter().enumerate() {
            aliases.push((self.vertices[0].generators[i].clone(), generators.len() as u8));
            aliases.push((self.vertices[1].generators[j].clone(), generators.len() as u8));
            generators.push(Generator { name: self.vertices[0].generators[i].clone(), kind: GenKind::Central { k: k as u8 } });
        }
        for side in 0..2u8 {
            let mut coord = 0;
            for (i, n) in self.vertices[side as usize].generators.iter().enumerate() {
                let identified = central.iter().any(|&(x, y)| if side == 0 { x == i } else { y == i });
                if !identified {
                    aliases.push((n.clone(), generators.len() as u8));
                    generators.push(Generator { name: n.clone(), kind: GenKind::Quotient { side, coord } });
                    coord += 1;
                }
            }
        }
        Ok(Group { name: self.name.clone(), generators, aliases })
    }
}

impl Group {
    /// Every letter, generators before inverses.
    pub fn letters(&self) -> Vec<Letter> {
        let n = self.generators.len() as u8;
        (0..n).map(|gen| Letter { gen, inverse: false }).chain((0..n).map(|gen| Letter { gen, inverse: true })).collect()
    }

    /// Lowercase letters are generators, uppercase their inverses;
    /// whitespace is ignored.
    pub fn parse_word(&self, s: &str) -> Result<Word, BassSerreError> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                let lower = c.to_ascii_lowercase().to_string();
                self.aliases
                    .iter()
                    .find(|(n, _)| *n == lower)
                    .map(|&(_, gen)| Letter { gen, inverse: c.is_ascii_uppercase() })
                    .ok_or(BassSerreError::Letter(c))
            })
            .collect()
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        w.iter()
            .map(|l| {
                let c = self.generators[l.gen as usize].name.chars().next().unwrap_or('?');
                if l.inverse {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }

    pub fn evaluate(&self, w: &[Letter]) -> Element {
        let mut g = Element::identity();
        for &l in w {
            g.mul_letter(self, l);
        }
        g
    }

    /// The elements along the path of `w` from the identity.
    pub fn path(&self, w: &[Letter]) -> Vec<Element> {
        let mut g = Element::identity();
        let mut out = vec![g.clone()];
        for &l in w {
            g.mul_letter(self, l);
            out.push(g.clone());
        }
        out
    }

    pub fn commute(&self, a: Letter, b: Letter) -> bool {
        let (ga, gb) = (&self.generators[a.gen as usize], &self.generators[b.gen as usize]);
        (0..2).any(|side| ga.in_vertex(side) && gb.in_vertex(side))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.gen, if self.inverse { "'" } else { "" })
    }
}
