use std::path::Path;

use serde::{Deserialize, Serialize};

use super::horoball::Horoball;
use super::lattice::Lattice;
use super::mobius::MobiusMap;
use super::KleinianError;

const PSL2_ZI: &str = include_str!("../../presets/psl2_zi.json");
const FIGURE_EIGHT: &str = include_str!("../../presets/figure_eight.json");

fn default_slack() -> f64 {
    0.25
}

/// A finitely generated Kleinian group with one cusp class and the
/// horoball chosen at one cusp; the others are its orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupPreset {
    pub name: String,
    pub generators: Vec<MobiusMap>,
    pub cusp: Horoball,
    /// Set when the cusp set is `P¹` over this ring with the horoball at
    /// `a/c` of diameter `1/(h|c|²)`; enables the arithmetic enumerator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Lattice>,
    /// Orbit search keeps horoballs with `r ≥ slack · r_min` so that paths
    /// through slightly smaller shadows are not cut.
    #[serde(default = "default_slack")]
    pub slack: f64,
}

impl GroupPreset {
    pub fn from_json(s: &str) -> Result<Self, KleinianError> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let p: GroupPreset = serde_path_to_error::deserialize(de).map_err(|e| KleinianError::Preset(format!("{}: {}", e.path(), e.inner())))?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, KleinianError> {
        let s = std::fs::read_to_string(path).map_err(|e| KleinianError::Preset(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn psl2_zi() -> Self {
        Self::from_json(PSL2_ZI).expect("shipped preset parses")
    }

    pub fn figure_eight() -> Self {
        Self::from_json(FIGURE_EIGHT).expect("shipped preset parses")
    }

    /// A shipped preset by name, or a JSON file.
    pub fn resolve(name_or_path: &str) -> Result<Self, KleinianError> {
        match name_or_path {
            "psl2_zi" => Ok(Self::psl2_zi()),
            "figure_eight" => Ok(Self::figure_eight()),
            other => Self::load(Path::new(other)),
        }
    }

    pub fn validate(&self) -> Result<(), KleinianError> {
        if self.generators.is_empty() {
            return Err(KleinianError::Preset("no generators".into()));
        }
        if let Some(i) = self.generators.iter().position(|g| !g.is_normalized()) {
            return Err(KleinianError::Preset(format!("generator {i} is not normalized")));
        }
        if !(self.cusp.size > 0.0 && self.cusp.size.is_finite()) {
            return Err(KleinianError::Preset(format!("cusp size must be positive, got {}", self.cusp.size)));
        }
        if !(self.slack > 0.0 && self.slack <= 1.0) {
            return Err(KleinianError::Preset(format!("slack must lie in (0, 1], got {}", self.slack)));
        }
        Ok(())
    }

    /// The conjugate `u G u⁻¹` with horoballs moved by `u`. The lattice tag
    /// is dropped since cusps no longer sit at `a/c`.
    pub fn conjugate(&self, u: &MobiusMap) -> Self {
        let ui = u.inverse();
        Self {
            name: format!("{}_conj", self.name),
            generators: self.generators.iter().map(|g| *u * *g * ui).collect(),
            cusp: self.cusp.image(u),
            lattice: None,
            slack: self.slack,
        }
    }

    /// All generators followed by their inverses.
    pub fn letters(&self) -> Vec<MobiusMap> {
        self.generators.iter().copied().chain(self.generators.iter().map(MobiusMap::inverse)).collect()
    }
}
