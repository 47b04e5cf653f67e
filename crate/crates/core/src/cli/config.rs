use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Command {
    #[serde(rename = "cantor homeo")]
    CantorHomeo,
    #[serde(rename = "cantor check")]
    CantorCheck,
    #[serde(rename = "raag classify")]
    RaagClassify,
    #[serde(rename = "kleinian shadows")]
    KleinianShadows,
    #[serde(rename = "sierpinski build")]
    SierpinskiBuild,
    #[serde(rename = "sierpinski entwine")]
    SierpinskiEntwine,
    #[serde(rename = "bass-serre probe")]
    BassSerreProbe,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::CantorHomeo,
        Command::CantorCheck,
        Command::RaagClassify,
        Command::KleinianShadows,
        Command::SierpinskiBuild,
        Command::SierpinskiEntwine,
        Command::BassSerreProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CantorHomeo => "cantor homeo",
            Command::CantorCheck => "cantor check",
            Command::RaagClassify => "raag classify",
            Command::KleinianShadows => "kleinian shadows",
            Command::SierpinskiBuild => "sierpinski build",
            Command::SierpinskiEntwine => "sierpinski entwine",
            Command::BassSerreProbe => "bass-serre probe",
        }
    }

    /// Directory name used when the config names no output directory.
    pub fn slug(self) -> String {
        self.name().replace(' ', "-")
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Numerical tolerances. `s` and `S` are the quasi-arc constants, `eps` the
/// comparison tolerance for sampled geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub eps: f64,
    pub s: f64,
    #[serde(rename = "S")]
    pub big_s: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eps: 1e-6, s: 0.5, big_s: 8.0 }
    }
}

fn default_pixels() -> u32 {
    800
}

/// One run, as read from a JSON file or assembled from command-line flags.
/// Fields a subcommand does not use are rejected by [`RunConfig::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub subcommand: Command,
    /// Kleinian or graph-of-groups preset: a shipped name or a JSON path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PathBuf>,
    /// `glued:N`, `alternate:N`, or a chain JSON path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_bounds: Option<Vec<usize>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Side length of rendered figures.
    #[serde(default = "default_pixels")]
    pub pixels: u32,
    /// Output directory; relative paths sit under the output root.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn field(path: &str, message: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), message: message.into() }
}

impl RunConfig {
    pub fn new(subcommand: Command) -> Self {
        Self {
            version: CONFIG_VERSION,
            subcommand,
            preset: None,
            graph: None,
            presentation: None,
            chain: None,
            chain2: None,
            lambda: None,
            lambda2: None,
            depth: None,
            r_min: None,
            radius: None,
            d_bounds: None,
            tolerances: Tolerances::default(),
            pixels: default_pixels(),
            output: None,
            seed: 0,
        }
    }

    /// Parses and validates, reporting the path of the offending field.
    pub fn from_json(s: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| field(&e.path().to_string(), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != CONFIG_VERSION {
            return Err(field("version", format!("unsupported version {}, expected {CONFIG_VERSION}", self.version)));
        }
        let t = &self.tolerances;
        for (name, v) in [("tolerances.eps", t.eps), ("tolerances.s", t.s), ("tolerances.S", t.big_s)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(field(name, format!("must be positive, got {v}")));
            }
        }
        if t.big_s <= t.s {
            return Err(field("tolerances.S", format!("must exceed s = {}", t.s)));
        }
        for (name, v) in [("lambda", self.lambda), ("lambda2", self.lambda2), ("r_min", self.r_min)] {
            if let Some(v) = v {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(field(name, format!("must lie in (0, 1], got {v}")));
                }
            }
        }
        if self.pixels == 0 {
            return Err(field("pixels", "must be positive"));
        }

        use Command::*;
        let c = self.subcommand;
        let allowed: &[&str] = match c {
            CantorHomeo => &["chain", "chain2", "depth"],
            CantorCheck => &["presentation", "depth"],
            RaagClassify => &["graph"],
            KleinianShadows => &["preset", "lambda", "r_min"],
            SierpinskiBuild => &["preset", "lambda", "depth", "r_min"],
            SierpinskiEntwine => &["preset", "lambda", "lambda2", "depth", "r_min"],
            BassSerreProbe => &["preset", "radius", "d_bounds"],
        };
        let set = [
            ("preset", self.preset.is_some()),
            ("graph", self.graph.is_some()),
            ("presentation", self.presentation.is_some()),
            ("chain", self.chain.is_some()),
            ("chain2", self.chain2.is_some()),
            ("lambda", self.lambda.is_some()),
            ("lambda2", self.lambda2.is_some()),
            ("depth", self.depth.is_some()),
            ("r_min", self.r_min.is_some()),
            ("radius", self.radius.is_some()),
            ("d_bounds", self.d_bounds.is_some()),
        ];
        if let Some((name, _)) = set.iter().find(|(name, on)| *on && !allowed.contains(name)) {
            return Err(field(name, format!("not used by {c}")));
        }
        match c {
            RaagClassify if self.graph.is_none() => return Err(field("graph", format!("required by {c}"))),
            CantorCheck if self.presentation.is_none() => return Err(field("presentation", format!("required by {c}"))),
            _ => {}
        }
        if let Some(d) = self.depth {
            let range = match c {
                CantorHomeo | CantorCheck => 1..=8,
                _ => 1..=4,
            };
            if !range.contains(&d) {
                return Err(field("depth", format!("must lie in {}..={} for {c}, got {d}", range.start(), range.end())));
            }
        }
        if let Some(ds) = &self.d_bounds {
            if ds.is_empty() || ds.contains(&0) {
                return Err(field("d_bounds", "must be a non-empty list of positive bounds"));
            }
        }
        if self.radius == Some(0) {
            return Err(field("radius", "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(s: &str) -> String {
        match RunConfig::from_json(s).unwrap_err() {
            CliError::Config { path, .. } => path,
            e => panic!("{e}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(path_of("{}"), ".");
        assert_eq!(path_of(""), ".");
        assert_eq!(path_of(r#"{"version":1,"subcommand":"raag classify","graph":"g.json","tolerances":{"eps":"x"}}"#), "tolerances.eps");
        assert_eq!(path_of(r#"{"version":1,"subcommand":"kleinian shadows","lambda":1.5}"#), "lambda");
        assert_eq!(path_of(r#"{"version":2,"subcommand":"kleinian shadows"}"#), "version");
        assert_eq!(path_of(r#"{"version":1,"subcommand":"raag classify"}"#), "graph");
        assert_eq!(path_of(r#"{"version":1,"subcommand":"kleinian shadows","depth":2}"#), "depth");
        assert_eq!(path_of(r#"{"version":1,"subcommand":"nope"}"#), "subcommand");
        assert_eq!(path_of(r#"{"version":1,"subcommand":"kleinian shadows","colour":1}"#), "colour");
    }

    #[test]
    fn round_trips_without_the_output() {
        let mut c = RunConfig::new(Command::SierpinskiBuild);
        c.lambda = Some(0.001);
        c.output = Some("x".into());
        let back = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, RunConfig { output: None, ..c });
        for cmd in Command::ALL {
            let s = serde_json::to_string(&cmd).unwrap();
            assert_eq!(s, format!("\"{}\"", cmd.name()));
        }
    }
}
