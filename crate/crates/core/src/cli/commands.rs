use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use super::bundle::{Artifact, CertificateLine, Format, InputRecord};
use super::config::{Command, RunConfig};
use super::CliError;
use crate::bass_serre::{self, fit_quasi_geodesic, fits_csv, geodesic_family, BassSerreError, CayleyBall, FitOptions, GraphOfGroupsPreset};
use crate::cantor::{self, omega_homeo_stream, stream_to_dot, CantorError, EntwinedChain, NestedClopenSystem, SubPresentation};
use crate::kleinian::{check_disjoint, check_separation, enumerate_parabolics, find_lambda_sep, parabolics_csv, render_shadows_svg};
use crate::kleinian::{EnumerationLimits, GroupPreset, KleinianError, ParabolicPoint, SEPARATION_RATIO};
use crate::raag::{self, classify, classify_batch_csv, is_join, DefiningGraph};
use crate::sierpinski::{self, build_sierpinski, check_entwined, render_strata_svg, verify_decomposition, SierpinskiApprox, SierpinskiError};
use crate::sierpinski::{CircleSettings, ParabolicSource, QuasiArcParams, STAGE_RATIO};

/// Shadows at least this large fix the separation constant.
pub const SEPARATION_R_MIN: f64 = 0.005;
/// Half-width of the plane square drawn in figures.
const HALF_WIDTH: f64 = 1.0;

/// What a subcommand hands back before the bundle is written.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub inputs: Vec<InputRecord>,
    pub settings: Value,
    pub certificates: Vec<CertificateLine>,
    pub artifacts: Vec<Artifact>,
    /// Details of every failing certificate.
    pub witness: Vec<Value>,
}

impl Outcome {
    fn certify(&mut self, name: impl Into<String>, holds: bool, witness: impl FnOnce() -> Value) {
        let name = name.into();
        if !holds {
            self.witness.push(json!({ "certificate": name, "witness": witness() }));
        }
        self.certificates.push(CertificateLine { name, holds });
    }

    /// A module error that is not a precondition: the run fails with the
    /// error as its witness.
    fn failed(mut self, name: &str, err: impl std::fmt::Display) -> Self {
        self.certify(name, false, || json!(err.to_string()));
        self
    }
}

fn parse_file<T: DeserializeOwned>(field: &str, text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Input { field: field.into(), message: format!("at {}: {}", e.path(), e.inner()) })
}

pub(crate) fn run_command(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.subcommand {
        Command::CantorHomeo => cantor_homeo(cfg),
        Command::CantorCheck => cantor_check(cfg),
        Command::RaagClassify => raag_classify(cfg),
        Command::KleinianShadows => kleinian_shadows(cfg),
        Command::SierpinskiBuild => sierpinski_build(cfg),
        Command::SierpinskiEntwine => sierpinski_entwine(cfg),
        Command::BassSerreProbe => bass_serre_probe(cfg),
    }
}

// Cantor

fn cantor_precondition(e: &CantorError) -> bool {
    !matches!(e, CantorError::Resolution { .. } | CantorError::HullSize { .. } | CantorError::NotEntwined { .. })
}

/// Builtin chains are `glued:N` and `alternate:N`; anything else is a file.
fn load_chain(field: &str, spec: &str, inputs: &mut Vec<InputRecord>) -> Result<EntwinedChain, CliError> {
    let builtin = |n: &str, make: fn(usize) -> Vec<cantor::TreePresentation>| -> Result<EntwinedChain, CliError> {
        let n: usize = n.parse().ok().filter(|&n| n <= 6).ok_or_else(|| CliError::Config { path: field.into(), message: format!("bad chain length in {spec:?}; expected 0..=6") })?;
        EntwinedChain::new(make(n)).map_err(|e| CliError::Precondition(e.to_string()))
    };
    if let Some(n) = spec.strip_prefix("glued:") {
        return builtin(n, cantor::glued_chain);
    }
    if let Some(n) = spec.strip_prefix("alternate:") {
        return builtin(n, cantor::alternate_chain);
    }
    let (rec, text) = InputRecord::read(field, Path::new(spec))?;
    inputs.push(rec);
    parse_file(field, &text)
}

fn cantor_homeo(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let depth = cfg.depth.unwrap_or(3);
    let (c1, c2) = (cfg.chain.as_deref().unwrap_or("glued:1"), cfg.chain2.as_deref().unwrap_or("alternate:1"));
    let x = load_chain("chain", c1, &mut out.inputs)?;
    let x2 = load_chain("chain2", c2, &mut out.inputs)?;
    out.settings = json!({ "chain": c1, "chain2": c2, "depth": depth, "mesh": format!("2^-{depth}") });
    let stream = match omega_homeo_stream(&x, &x2, depth) {
        Ok(s) => s,
        Err(e) => {
            if cantor_precondition(&e) {
                return Err(CliError::Precondition(e.to_string()));
            }
            return Ok(out.failed("correspondence", e));
        }
    };
    let mut stages = Vec::new();
    for (n, row) in stream.iter().enumerate() {
        let (l, r) = (x.space(n), x2.space(n));
        let report = row[depth].check(l, r);
        let refines: Vec<usize> = (1..=depth).filter(|&j| !row[j].refines(&row[j - 1], l, r)).collect();
        let restricts: Vec<usize> = if n == 0 {
            Vec::new()
        } else {
            (0..=depth).filter(|&j| !row[j].restricts_to(&stream[n - 1][j], x.space(n - 1), x2.space(n - 1))).collect()
        };
        out.certify(format!("stage {n} correspondence"), report.all_hold(), || json!(report));
        out.certify(format!("stage {n} refinement"), refines.is_empty(), || json!({ "failing_depths": refines }));
        out.certify(format!("stage {n} restriction"), restricts.is_empty(), || json!({ "failing_depths": restricts }));
        stages.push(json!({ "stage": n, "report": report, "pieces_by_depth": row.iter().map(|c| c.pairs.len()).collect::<Vec<_>>() }));
    }
    let last = stream.len() - 1;
    let finals: Vec<_> = stream.iter().map(|row| &row[depth]).collect();
    out.artifacts.push(Artifact::json("homeo", &finals));
    out.artifacts.push(Artifact::json("report", &stages));
    out.artifacts.push(Artifact::new("refinement", Format::Dot, stream_to_dot(&stream[last], x.space(last))));
    Ok(out)
}

fn cantor_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let depth = cfg.depth.unwrap_or(3);
    let path = cfg.presentation.as_ref().expect("validated");
    let (rec, text) = InputRecord::read("presentation", path)?;
    out.inputs.push(rec);
    let s: SubPresentation = parse_file("presentation", &text)?;
    out.settings = json!({ "depth": depth });
    let e = s.is_entwined().map_err(|e| CliError::Precondition(e.to_string()))?;
    out.certify("entwined", e.entwined, || json!({ "interior_cylinder": e.witness }));
    out.artifacts.push(Artifact::json("entwinement", &e));
    if !e.entwined {
        return Ok(out);
    }
    match NestedClopenSystem::build(&s, depth) {
        Ok(sys) => {
            let report = sys.check(&s, true);
            out.certify("nested clopen system", report.all_hold(), || json!(report.failures));
            out.artifacts.push(Artifact::json("system", &sys));
            out.artifacts.push(Artifact::json("system-report", &report));
            Ok(out)
        }
        Err(e) => Ok(out.failed("nested clopen system", e)),
    }
}

// RAAG

/// Every vertex lies on one side and every cross pair is an edge.
fn join_holds(g: &DefiningGraph, a: &[usize], b: &[usize]) -> bool {
    !a.is_empty() && !b.is_empty() && a.len() + b.len() == g.num_vertices() && a.iter().all(|&i| b.iter().all(|&j| g.adjacent(i, j)))
}

fn raag_classify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let path = cfg.graph.as_ref().expect("validated");
    let (rec, text) = InputRecord::read("graph", path)?;
    out.inputs.push(rec);
    let g: DefiningGraph = parse_file("graph", &text)?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "graph".into());
    let c = classify(&g);
    if g.num_vertices() >= 2 {
        let w = is_join(&g).map_err(|e: raag::RaagError| CliError::Precondition(e.to_string()))?;
        if let Some((a, b)) = &w.sides {
            out.certify("join witness", join_holds(&g, a, b), || json!({ "sides": [a, b] }));
        }
    }
    out.settings = json!({ "vertices": g.num_vertices(), "edges": g.edges().len() });
    out.artifacts.push(Artifact::new("classification", Format::Csv, classify_batch_csv(&[(id.clone(), g)])));
    out.artifacts.push(Artifact::json("classification", &json!({ "id": id, "class": c.class, "witness": c.witness })));
    Ok(out)
}

// Kleinian

fn kleinian_precondition(e: &KleinianError) -> bool {
    matches!(e, KleinianError::Precondition(_) | KleinianError::Preset(_) | KleinianError::Degenerate(_))
}

fn load_preset(cfg: &RunConfig, inputs: &mut Vec<InputRecord>) -> Result<GroupPreset, CliError> {
    let name = cfg.preset.as_deref().unwrap_or("psl2_zi");
    if !matches!(name, "psl2_zi" | "figure_eight") {
        inputs.push(InputRecord::read("preset", Path::new(name))?.0);
    }
    GroupPreset::resolve(name).map_err(|e| CliError::Input { field: "preset".into(), message: e.to_string() })
}

fn kleinian_shadows(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let preset = load_preset(cfg, &mut out.inputs)?;
    let r_min = cfg.r_min.unwrap_or(0.05);
    let ps = match enumerate_parabolics(&preset, r_min, EnumerationLimits::default()) {
        Ok(ps) => ps,
        Err(e) if kleinian_precondition(&e) => return Err(CliError::Precondition(e.to_string())),
        Err(e) => return Ok(out.failed("enumeration", e)),
    };
    let lambda_sep = find_lambda_sep(&ps);
    let lambda = cfg.lambda.unwrap_or(lambda_sep);
    out.settings = json!({
        "preset": preset.name, "r_min": r_min, "limits": EnumerationLimits::default(), "parabolics": ps.len(),
        "lambda": lambda, "lambda_sep": lambda_sep, "ratio": SEPARATION_RATIO,
    });
    let sep = check_separation(&ps, lambda);
    out.certify("separation", sep.passed(), || json!(sep.failures));
    let overlap = check_disjoint(&ps);
    out.certify("horoballs disjoint", overlap.is_none(), || json!(overlap));
    out.artifacts.push(Artifact::new("parabolics", Format::Csv, parabolics_csv(&ps)));
    out.artifacts.push(Artifact::json("separation", &sep));
    out.artifacts.push(Artifact::new("shadows", Format::Svg, render_shadows_svg(&ps, lambda, HALF_WIDTH, cfg.pixels)));
    Ok(out)
}

// Sierpiński

fn sierpinski_precondition(e: &SierpinskiError) -> bool {
    match e {
        SierpinskiError::Precondition(_) | SierpinskiError::Schedule { .. } => true,
        SierpinskiError::Kleinian(k) => kleinian_precondition(k),
        _ => false,
    }
}

struct Setup {
    name: String,
    source: ParabolicSource,
    lambda0: f64,
}

fn sierpinski_setup(cfg: &RunConfig, inputs: &mut Vec<InputRecord>) -> Result<Setup, CliError> {
    let preset = load_preset(cfg, inputs)?;
    let r_min = cfg.r_min.unwrap_or(0.2);
    let source = match ParabolicSource::from_preset(&preset) {
        Ok(s) => s,
        Err(_) => {
            let floor = r_min.min(SEPARATION_R_MIN);
            let ps = enumerate_parabolics(&preset, floor, EnumerationLimits::default()).map_err(|e| CliError::Precondition(e.to_string()))?;
            ParabolicSource::Listed { parabolics: ps, r_min: floor }
        }
    };
    let ps: Vec<ParabolicPoint> = source.all(SEPARATION_R_MIN);
    let lambda0 = find_lambda_sep(&ps) / 100.0;
    Ok(Setup { name: preset.name, source, lambda0 })
}

fn circle_settings(cfg: &RunConfig, lambda: f64, lambda0: f64) -> Result<CircleSettings, CliError> {
    let t = cfg.tolerances;
    let settings = CircleSettings { lambda, lambda0, depth: cfg.depth.unwrap_or(2), params: QuasiArcParams { s: t.s, big_s: t.big_s, eps: t.eps } };
    settings.validate().map_err(|e| CliError::Precondition(e.to_string()))?;
    Ok(settings)
}

fn build(setup: &Setup, settings: &CircleSettings, r_min: f64) -> Result<Result<SierpinskiApprox, SierpinskiError>, CliError> {
    match build_sierpinski(&setup.name, &setup.source, settings, r_min) {
        Err(e) if sierpinski_precondition(&e) => Err(CliError::Precondition(e.to_string())),
        r => Ok(r),
    }
}

fn certify_stratum(out: &mut Outcome, tag: &str, s: &SierpinskiApprox) {
    let c = &s.containment;
    out.certify(format!("{tag} containment"), c.holds(), || json!(c));
    out.certify(format!("{tag} diameters decreasing"), s.diameters_decreasing(), || json!(s.level_diameters));
    let bad: Vec<usize> = s.excluded.iter().map(|d| d.circle).filter(|&i| !s.peripherals[i].certified()).collect();
    out.certify(format!("{tag} peripheral circles"), bad.is_empty(), || {
        json!(bad.iter().take(16).map(|&i| &s.peripherals[i]).collect::<Vec<_>>())
    });
}

fn exact_certificates(out: &mut Outcome) {
    let certs = sierpinski::certificate::all_certificates(STAGE_RATIO as i64);
    for c in &certs {
        out.certify(format!("exact {}", c.name), c.holds, || json!(c));
    }
    out.artifacts.push(Artifact::json("certificates", &certs));
}

fn sierpinski_build(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let setup = sierpinski_setup(cfg, &mut out.inputs)?;
    let r_min = cfg.r_min.unwrap_or(0.2);
    let settings = circle_settings(cfg, cfg.lambda.unwrap_or(setup.lambda0), setup.lambda0)?;
    out.settings = json!({ "preset": setup.name, "r_min": r_min, "circle": settings, "stage_ratio": STAGE_RATIO });
    exact_certificates(&mut out);
    let s = match build(&setup, &settings, r_min)? {
        Ok(s) => s,
        Err(e) => return Ok(out.failed("construction", e)),
    };
    certify_stratum(&mut out, "stratum", &s);
    out.artifacts.push(Artifact::json("sierpinski", &s));
    out.artifacts.push(Artifact::new("strata", Format::Svg, render_strata_svg(&s, HALF_WIDTH, cfg.pixels)));
    Ok(out)
}

fn sierpinski_entwine(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let setup = sierpinski_setup(cfg, &mut out.inputs)?;
    let r_min = cfg.r_min.unwrap_or(0.2);
    let l1 = cfg.lambda.unwrap_or(setup.lambda0);
    let l2 = cfg.lambda2.unwrap_or(l1 / 5.0);
    if l2 > l1 / 4.0 {
        return Err(CliError::Precondition(SierpinskiError::Schedule { lambda1: l1, lambda2: l2 }.to_string()));
    }
    let (a, b) = (circle_settings(cfg, l1, setup.lambda0)?, circle_settings(cfg, l2, setup.lambda0)?);
    out.settings = json!({ "preset": setup.name, "r_min": r_min, "coarse": a, "fine": b, "stage_ratio": STAGE_RATIO });
    let s1 = match build(&setup, &a, r_min)? {
        Ok(s) => s,
        Err(e) => return Ok(out.failed("coarse construction", e)),
    };
    let s2 = match build(&setup, &b, r_min)? {
        Ok(s) => s,
        Err(e) => return Ok(out.failed("fine construction", e)),
    };
    certify_stratum(&mut out, "coarse", &s1);
    certify_stratum(&mut out, "fine", &s2);
    let e = check_entwined(&s1, &s2).map_err(|e| CliError::Precondition(e.to_string()))?;
    out.certify("entwined", e.entwined, || json!(e));
    match verify_decomposition(&s2, &s1) {
        Ok(d) => {
            out.certify("decomposition", d.holds(), || json!({ "stray_outer_disks": d.stray_outer_disks, "covering_violations": d.covering_violations, "level_diameters": d.level_diameters }));
            out.artifacts.push(Artifact::json("entwine", &json!({ "entwined": e, "decomposition": d })));
        }
        Err(err) => {
            out.artifacts.push(Artifact::json("entwine", &json!({ "entwined": e })));
            out = out.failed("decomposition", err);
        }
    }
    out.artifacts.push(Artifact::new("strata-coarse", Format::Svg, render_strata_svg(&s1, HALF_WIDTH, cfg.pixels)));
    out.artifacts.push(Artifact::new("strata-fine", Format::Svg, render_strata_svg(&s2, HALF_WIDTH, cfg.pixels)));
    Ok(out)
}

// Bass–Serre

fn bass_serre_probe(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let name = cfg.preset.as_deref().unwrap_or("z_free_z");
    if !matches!(name, "z_free_z" | "z2_free_z2" | "z2_amalgam_z2") {
        out.inputs.push(InputRecord::read("preset", Path::new(name))?.0);
    }
    let input = |e: BassSerreError| CliError::Input { field: "preset".into(), message: e.to_string() };
    let group = GraphOfGroupsPreset::resolve(name).map_err(input)?.group().map_err(input)?;
    let radius = cfg.radius.unwrap_or(8);
    let bounds = cfg.d_bounds.clone().unwrap_or_else(|| vec![1, 2, 3]);
    let ball = CayleyBall::new(&group, radius).map_err(|e| CliError::Config { path: "radius".into(), message: e.to_string() })?;
    let proj = ball.check_projection();
    out.certify("projection", proj.passed(), || json!(proj));
    let mut fits = Vec::new();
    for &d in &bounds {
        let family = geodesic_family(&ball, radius, d);
        let opts = FitOptions { seed: cfg.seed, ..FitOptions::new(d) };
        match fit_quasi_geodesic(&family, &ball, &opts) {
            Ok(f) => {
                out.certify(format!("K finite at D = {d}"), f.k.is_finite(), || json!(f.extremal));
                fits.push(f);
            }
            Err(bass_serre::BassSerreError::EmptyFamily) => out.certify(format!("family at D = {d}"), false, || json!("empty family")),
            Err(e) => return Err(CliError::Precondition(e.to_string())),
        }
    }
    let mut sorted = fits.clone();
    sorted.sort_by_key(|f| f.d_bound);
    let monotone = sorted.windows(2).all(|w| w[0].k <= w[1].k);
    out.certify("K monotone in D", monotone, || json!(sorted.iter().map(|f| (f.d_bound, f.k)).collect::<Vec<_>>()));
    out.settings = json!({
        "preset": group.name, "radius": radius, "d_bounds": bounds, "ball": ball.len(),
        "probe": FitOptions { seed: cfg.seed, ..FitOptions::new(0) },
    });
    out.artifacts.push(Artifact::new("fits", Format::Csv, fits_csv(&fits)));
    out.artifacts.push(Artifact::json("fits", &fits));
    out.artifacts.push(Artifact::json("projection", &proj));
    Ok(out)
}
