use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{RunConfig, Tolerances};
use super::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const WITNESS: &str = "witness.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Svg,
    Csv,
    Json,
    Dot,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Svg => "svg",
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Dot => "dot",
        }
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "svg" => Ok(Format::Svg),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            _ => Err(CliError::Usage(format!("unknown export format {s:?}; expected svg, csv, json or dot"))),
        }
    }
}

/// A named output file and its bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub stem: String,
    pub format: Format,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(stem: &str, format: Format, contents: impl Into<Vec<u8>>) -> Self {
        Self { stem: stem.into(), format, bytes: contents.into() }
    }

    pub fn json<T: Serialize>(stem: &str, value: &T) -> Self {
        let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
        s.push('\n');
        Self::new(stem, Format::Json, s)
    }

    pub fn file_name(&self) -> String {
        format!("{}.{}", self.stem, self.format.extension())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub field: String,
    pub path: String,
    pub sha256: String,
}

impl InputRecord {
    pub fn read(field: &str, path: &Path) -> Result<(Self, String), CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input { field: field.into(), message: format!("{}: {e}", path.display()) })?;
        let sha256 = format!("{:x}", Sha256::digest(text.as_bytes()));
        Ok((Self { field: field.into(), path: path.display().to_string(), sha256 }, text))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateLine {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub format: Format,
    pub sha256: String,
}

/// Everything needed to replay a run: the config, input digests, the
/// resolved settings and tolerances, and each certificate's verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub tolerances: Tolerances,
    pub settings: serde_json::Value,
    pub certificates: Vec<CertificateLine>,
    pub passed: bool,
    pub artifacts: Vec<ArtifactRecord>,
}

impl Manifest {
    pub fn load(bundle: &Path) -> Result<Self, CliError> {
        let path = bundle.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| CliError::Input { field: "bundle".into(), message: format!("{}: {e}", path.display()) })?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| CliError::Config { path: format!("manifest.{}", e.path()), message: e.inner().to_string() })
    }
}

pub(crate) fn manifest(
    cfg: &RunConfig,
    inputs: Vec<InputRecord>,
    settings: serde_json::Value,
    certificates: Vec<CertificateLine>,
    artifacts: &[Artifact],
) -> Manifest {
    Manifest {
        tool: "omega".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: cfg.subcommand.name().into(),
        seed: cfg.seed,
        config: serde_json::to_value(cfg).expect("config serializes"),
        inputs,
        tolerances: cfg.tolerances,
        settings,
        passed: certificates.iter().all(|c| c.holds),
        certificates,
        artifacts: artifacts
            .iter()
            .map(|a| ArtifactRecord { file: a.file_name(), format: a.format, sha256: format!("{:x}", Sha256::digest(&a.bytes)) })
            .collect(),
    }
}

/// Writes the artifacts, then the manifest, into `dir`.
pub(crate) fn write_bundle(dir: &Path, artifacts: &[Artifact], manifest: &Manifest) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let stale = dir.join(WITNESS);
    if stale.exists() && !artifacts.iter().any(|a| a.file_name() == WITNESS) {
        fs::remove_file(stale)?;
    }
    let mut written = Vec::with_capacity(artifacts.len() + 1);
    for a in artifacts {
        let p = dir.join(a.file_name());
        fs::write(&p, &a.bytes)?;
        written.push(p);
    }
    let p = dir.join(MANIFEST);
    fs::write(&p, serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n")?;
    written.push(p);
    Ok(written)
}

/// Copies the bundle's artifacts of one format into `out` under their
/// recorded names. A directory without a manifest is an empty bundle.
pub fn export(bundle: &Path, format: &str, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let format: Format = format.parse()?;
    if !bundle.is_dir() {
        return Err(CliError::Input { field: "bundle".into(), message: format!("{} is not a directory", bundle.display()) });
    }
    if !bundle.join(MANIFEST).exists() {
        return Ok(Vec::new());
    }
    let m = Manifest::load(bundle)?;
    let mut written = Vec::new();
    for a in m.artifacts.iter().filter(|a| a.format == format) {
        let bytes = fs::read(bundle.join(&a.file))?;
        let digest = format!("{:x}", Sha256::digest(&bytes));
        if digest != a.sha256 {
            return Err(CliError::Input { field: "bundle".into(), message: format!("{} does not match its recorded digest", a.file) });
        }
        fs::create_dir_all(out)?;
        let p = out.join(&a.file);
        fs::write(&p, bytes)?;
        written.push(p);
    }
    Ok(written)
}
