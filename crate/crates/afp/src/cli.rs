//! Experiment plumbing: one validated config in, one machine-readable
//! artifact out.
//!
//! Every run is described by an [`ExperimentConfig`] (buildable from
//! command-line flags or a JSON file), dispatched by [`run`], and lands as
//! either a JSON report or a CSV series. Reports echo their config, so any
//! artifact can be reproduced from itself; numeric inputs are exact "p/q"
//! strings and every float in an artifact is a rendering of an exact
//! rational, never an input to further computation.
//!
//! File formats all carry a "schema" field. Errors map to distinct exit
//! codes: 2 for configuration problems, 3 when an orbit or image leaves
//! its domain, 4 when a search exhausts its depth budget.

use crate::affine::{cesaro_sequence, AffineError};
use crate::delta::{
    compose_pipeline, delta_distance, e1_bounds_check, estimate_lipschitz,
    estimate_min_displacement, nearest_point_retraction, parse_delta_point, CertifyParams,
    DeltaError, E1Constants, NearestPointRetraction, Region,
};
use crate::domain::{Domain, DomainError};
use crate::kkm::{find_epsilon_fixed_point, FinderOutcome, FinderParams, KkmError};
use crate::maps::{self, MapError};
use crate::measure::{
    no_fixed_point_certificate, orbit_displacement, Ex2Map, FiniteMeasureModel, MeasureError,
};
use crate::rational::{
    format_rational, parse_rational, rat_int, rational_to_f64, Rational,
};
use crate::seminorm::PolyhedralSeminorm;
use crate::spaces::{
    greedy_separated_sequence, span_separated_sequence, verify_pairwise_separation,
    verify_span_separation, SeparationParams, SpaceError,
};
use crate::vector::{parse_vector_literal, Index, SparseVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

pub const CONFIG_SCHEMA: &str = "afp-config/1";
pub const REPORT_SCHEMA: &str = "afp-report/1";
pub const DOMAIN_SCHEMA: &str = "afp-domain/1";
pub const SEMINORM_SCHEMA: &str = "afp-seminorm/1";
pub const MEASURE_SCHEMA: &str = "afp-measure/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("domain escape: {0}")]
    DomainEscape(String),
    #[error("depth exhausted: {0}")]
    DepthExhausted(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::DomainEscape(_) => 3,
            CliError::DepthExhausted(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<KkmError> for CliError {
    fn from(e: KkmError) -> Self {
        match e {
            KkmError::MapEscapesDomain { .. } => CliError::DomainEscape(e.to_string()),
            KkmError::ImproperLabeling(_) => CliError::Internal(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<AffineError> for CliError {
    fn from(e: AffineError) -> Self {
        match e {
            AffineError::DomainEscape { .. } => CliError::DomainEscape(e.to_string()),
            AffineError::NotAffine(_) => CliError::Internal(e.to_string()),
            AffineError::InvalidParams(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DeltaError> for CliError {
    fn from(e: DeltaError) -> Self {
        match e {
            DeltaError::ImageEscapedCodomain(_) => CliError::DomainEscape(e.to_string()),
            DeltaError::NotARetraction(_) => CliError::Internal(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub const SUBCOMMANDS: &[&str] = &["kkm", "cesaro", "ex2", "delta", "separate"];

/// A complete experiment description. Everything numeric travels as exact
/// "p/q" strings; map/domain/seminorm fields take builtin names, inline
/// descriptors, or file paths depending on the field (see each
/// subcommand's handler). Unknown keys are rejected when loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub subcommand: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seminorm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_bound: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

impl ExperimentConfig {
    pub fn new(subcommand: &str) -> Self {
        ExperimentConfig {
            schema: CONFIG_SCHEMA.to_string(),
            subcommand: subcommand.to_string(),
            map: None,
            domain: None,
            seminorm: None,
            epsilon: None,
            max_order: None,
            resolution: None,
            steps: None,
            start: None,
            support_bound: None,
            op: None,
            region: None,
            samples: None,
            pairs: None,
            points: None,
            delta: None,
            norm_bound: None,
            count: None,
            seed: 0,
            report: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != CONFIG_SCHEMA {
            return Err(CliError::Config(format!(
                "config schema must be {CONFIG_SCHEMA:?}, got {:?}",
                self.schema
            )));
        }
        if !SUBCOMMANDS.contains(&self.subcommand.as_str()) {
            return Err(CliError::Config(format!(
                "unknown subcommand {:?} (expected one of {})",
                self.subcommand,
                SUBCOMMANDS.join(", ")
            )));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub results: Value,
    pub timing_ms: u128,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The deterministic part of the report: everything except timing.
    /// Reruns with identical config and seed must reproduce these bytes
    /// exactly.
    pub fn payload_json(&self) -> String {
        #[derive(Serialize)]
        struct Payload<'a> {
            schema: &'a str,
            version: &'a str,
            config: &'a ExperimentConfig,
            results: &'a Value,
        }
        let mut s = serde_json::to_string_pretty(&Payload {
            schema: &self.schema,
            version: &self.version,
            config: &self.config,
            results: &self.results,
        })
        .expect("payload serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    /// Exact bytes destined for the report file.
    pub artifact: String,
    pub kind: ArtifactKind,
}

/// Validates, applies the `AFP_SEED` override, dispatches, and packages
/// the artifact.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let started = Instant::now();
    let mut config = config.clone();
    config.validate()?;
    if let Some(seed) = seed_override()? {
        config.seed = seed;
    }
    let (results, csv) = match config.subcommand.as_str() {
        "kkm" => run_kkm(&config)?,
        "cesaro" => run_cesaro(&config)?,
        "ex2" => run_ex2(&config)?,
        "delta" => run_delta(&config)?,
        "separate" => run_separate(&config)?,
        _ => unreachable!("validated above"),
    };
    let report = Report {
        schema: REPORT_SCHEMA.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        results,
        timing_ms: started.elapsed().as_millis(),
    };
    let (artifact, kind) = match csv {
        Some(text) => (text, ArtifactKind::Csv),
        None => (report.to_json(), ArtifactKind::Json),
    };
    Ok(RunOutput {
        report,
        artifact,
        kind,
    })
}

fn seed_override() -> Result<Option<u64>, CliError> {
    match std::env::var("AFP_SEED") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("AFP_SEED must be a u64, got {raw:?}"))),
        Err(_) => Ok(None),
    }
}

fn required<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    field
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("missing required field {name:?}")))
}

fn parse_rat(text: &str, name: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Config(format!("field {name:?}: {e}")))
}

fn rational_entry(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// Domain spec: `box:N` (unit box), `simplex`, `ball`, or a path to a JSON
/// file `{"schema": "afp-domain/1", "domain": {...}}`.
pub fn parse_domain_spec(spec: &str) -> Result<Domain, CliError> {
    if let Some(dim) = spec.strip_prefix("box:") {
        let dim: usize = dim
            .parse()
            .map_err(|_| CliError::Config(format!("bad box dimension {dim:?}")))?;
        if dim == 0 {
            return Err(CliError::Config("box dimension must be >= 1".into()));
        }
        return Ok(Domain::unit_box(dim));
    }
    match spec {
        "simplex" => return Ok(Domain::ProbabilitySimplex),
        "ball" => return Ok(Domain::PositiveUnitBall),
        _ => {}
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct DomainFile {
        schema: String,
        domain: Domain,
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Config(format!("cannot read domain {spec:?}: {e}")))?;
    let file: DomainFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse domain {spec:?}: {e}")))?;
    if file.schema != DOMAIN_SCHEMA {
        return Err(CliError::Config(format!(
            "domain schema must be {DOMAIN_SCHEMA:?}, got {:?}",
            file.schema
        )));
    }
    file.domain.validate()?;
    Ok(file.domain)
}

/// Seminorm spec: `l1`, `linf`, or a path to a JSON file
/// `{"schema": "afp-seminorm/1", "seminorm": {...}}`.
pub fn parse_seminorm_spec(spec: &str) -> Result<PolyhedralSeminorm, CliError> {
    match spec {
        "l1" => return Ok(PolyhedralSeminorm::L1),
        "linf" => return Ok(PolyhedralSeminorm::LInf),
        _ => {}
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct SeminormFile {
        schema: String,
        seminorm: PolyhedralSeminorm,
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Config(format!("cannot read seminorm {spec:?}: {e}")))?;
    let file: SeminormFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse seminorm {spec:?}: {e}")))?;
    if file.schema != SEMINORM_SCHEMA {
        return Err(CliError::Config(format!(
            "seminorm schema must be {SEMINORM_SCHEMA:?}, got {:?}",
            file.schema
        )));
    }
    Ok(file.seminorm)
}

fn seminorm_or_default(config: &ExperimentConfig) -> Result<PolyhedralSeminorm, CliError> {
    match &config.seminorm {
        Some(spec) => parse_seminorm_spec(spec),
        None => Ok(PolyhedralSeminorm::L1),
    }
}

fn domain_for_map(config: &ExperimentConfig, map_spec: &str) -> Result<Domain, CliError> {
    match &config.domain {
        Some(spec) => parse_domain_spec(spec),
        None => maps::default_domain(map_spec).map_err(|_| {
            CliError::Config(format!(
                "map {map_spec:?} has no default domain; pass one explicitly"
            ))
        }),
    }
}

/// Start point: a bare rational means coordinate 1 of a one-dimensional
/// point; anything with `index:value` pairs is a sparse vector literal.
fn parse_start_vector(text: &str) -> Result<SparseVector, CliError> {
    if text.contains(':') {
        return parse_vector_literal(text)
            .map_err(|e| CliError::Config(format!("bad start vector: {e}")));
    }
    let r = parse_rat(text, "start")?;
    Ok(SparseVector::single(1, r))
}

fn run_kkm(config: &ExperimentConfig) -> Result<(Value, Option<String>), CliError> {
    let map_spec = required(&config.map, "map")?;
    let map = maps::resolve(map_spec)?;
    let domain = domain_for_map(config, map_spec)?;
    let rho = seminorm_or_default(config)?;
    let epsilon = parse_rat(required(&config.epsilon, "epsilon")?, "epsilon")?;
    let mut params = FinderParams::new(epsilon)?;
    if let Some(m) = config.max_order {
        params.max_order = m;
    }
    if let Some(r) = config.resolution {
        params.resolution = r;
    }
    match find_epsilon_fixed_point(map.as_ref(), &domain, &rho, &params)? {
        FinderOutcome::Witness(w) => Ok((
            json!({
                "outcome": "witness",
                "witness": serde_json::to_value(&w.point).map_err(internal)?,
                "residual": format_rational(&w.residual),
                "residual_float": rational_to_f64(&w.residual),
                "epsilon": format_rational(&w.epsilon),
                "order": w.order,
                "net_size": w.net_size,
                "lattice_vertices_scanned": w.lattice_vertices_scanned,
            }),
            None,
        )),
        FinderOutcome::DepthExhausted {
            max_order,
            net_size,
            lattice_vertices_scanned,
        } => Err(CliError::DepthExhausted(format!(
            "no witness up to order {max_order} over {net_size} centers \
             ({lattice_vertices_scanned} vertices scanned)"
        ))),
    }
}

fn run_cesaro(config: &ExperimentConfig) -> Result<(Value, Option<String>), CliError> {
    let map_spec = required(&config.map, "map")?;
    let map = maps::resolve(map_spec)?;
    let domain = domain_for_map(config, map_spec)?;
    let rho = seminorm_or_default(config)?;
    let start = parse_start_vector(config.start.as_deref().unwrap_or("0"))?;
    let steps = config.steps.unwrap_or(100);
    let rows = cesaro_sequence(map, domain, rho, start, steps)?;
    let mut csv = String::from("k,residual,residual_float\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            row.k,
            format_rational(&row.residual),
            rational_to_f64(&row.residual)
        ));
    }
    let last = rows.last().expect("steps >= 1");
    let results = json!({
        "steps": steps,
        "final_k": last.k,
        "final_residual": format_rational(&last.residual),
        "final_residual_float": rational_to_f64(&last.residual),
        "series": "csv",
    });
    Ok((results, Some(csv)))
}

/// Measure start: `diffuse`, `atom:N`, or a path to a JSON file
/// `{"schema": "afp-measure/1", "atoms": {...}, "diffuse": "p/q"}`.
fn parse_measure_start(text: &str) -> Result<FiniteMeasureModel, CliError> {
    if text == "diffuse" {
        return Ok(FiniteMeasureModel::pure_diffuse(rat_int(1))?);
    }
    if let Some(n) = text.strip_prefix("atom:") {
        let n: Index = n
            .parse()
            .map_err(|_| CliError::Config(format!("bad atom index {n:?}")))?;
        return Ok(FiniteMeasureModel::dirac(n));
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct MeasureFile {
        schema: String,
        atoms: SparseVector,
        diffuse: String,
    }
    let raw = std::fs::read_to_string(text)
        .map_err(|e| CliError::Config(format!("cannot read measure {text:?}: {e}")))?;
    let file: MeasureFile = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("cannot parse measure {text:?}: {e}")))?;
    if file.schema != MEASURE_SCHEMA {
        return Err(CliError::Config(format!(
            "measure schema must be {MEASURE_SCHEMA:?}, got {:?}",
            file.schema
        )));
    }
    let diffuse = parse_rat(&file.diffuse, "diffuse")?;
    Ok(FiniteMeasureModel::new(file.atoms, diffuse)?)
}

fn run_ex2(config: &ExperimentConfig) -> Result<(Value, Option<String>), CliError> {
    let start = parse_measure_start(config.start.as_deref().unwrap_or("diffuse"))?;
    let steps = config.steps.unwrap_or(10) as usize;
    let support_bound = config.support_bound.unwrap_or(64) as Index;
    let map = Ex2Map::dyadic();
    let residuals = orbit_displacement(&map, &start, steps)?;
    let certificate = no_fixed_point_certificate(&map, support_bound)?;
    let results = json!({
        "start": {
            "atoms": serde_json::to_value(start.atoms()).map_err(internal)?,
            "diffuse": format_rational(start.diffuse()),
        },
        "residuals": residuals
            .iter()
            .map(|(k, r)| {
                json!({
                    "k": k,
                    "residual": format_rational(r),
                    "residual_float": rational_to_f64(r),
                })
            })
            .collect::<Vec<_>>(),
        "certificate": serde_json::to_value(&certificate).map_err(internal)?,
    });
    Ok((results, None))
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn run_delta(config: &ExperimentConfig) -> Result<(Value, Option<String>), CliError> {
    let op = required(&config.op, "op")?.as_str();
    match op {
        "distance" => {
            let points = required(&config.points, "points")?;
            if points.len() != 2 {
                return Err(CliError::Config(format!(
                    "distance needs exactly two points, got {}",
                    points.len()
                )));
            }
            let p = parse_delta_point(&points[0])?;
            let q = parse_delta_point(&points[1])?;
            let d = delta_distance(&p, &q);
            Ok((
                json!({
                    "points": [p.to_string(), q.to_string()],
                    "distance": format_rational(&d),
                    "distance_float": rational_to_f64(&d),
                }),
                None,
            ))
        }
        "retract" => {
            let start = required(&config.start, "start")?;
            let x = parse_vector_literal(start)
                .map_err(|e| CliError::Config(format!("bad start vector: {e}")))?;
            let p = nearest_point_retraction(&x);
            let dist = (&x - &p.embed()).l1_norm();
            Ok((
                json!({
                    "input": serde_json::to_value(&x).map_err(internal)?,
                    "retracted": {
                        "triangle": p.triangle(),
                        "a": format_rational(p.weight_a()),
                        "b": format_rational(p.weight_b()),
                    },
                    "embedded": serde_json::to_value(&p.embed()).map_err(internal)?,
                    "distance": format_rational(&dist),
                    "distance_float": rational_to_f64(&dist),
                }),
                None,
            ))
        }
        "certify" => {
            let map_spec = config.map.as_deref().unwrap_or("shift");
            let map = maps::resolve(map_spec)?;
            let region = delta_region(config, map_spec)?;
            let samples = config.samples.unwrap_or(200);
            let pairs = config.pairs.unwrap_or(200);
            let lipschitz = estimate_lipschitz(map.as_ref(), &region, pairs, config.seed)?;
            let eta = estimate_min_displacement(map.as_ref(), &region, samples, config.seed)?;
            let epsilon = &eta / (&lipschitz + rat_int(2));
            Ok((
                json!({
                    "map": map.name(),
                    "region": region.to_string(),
                    "samples": samples,
                    "pairs": pairs,
                    "seed": config.seed,
                    "lipschitz_estimate": format_rational(&lipschitz),
                    "lipschitz_float": rational_to_f64(&lipschitz),
                    "min_displacement_estimate": format_rational(&eta),
                    "min_displacement_float": rational_to_f64(&eta),
                    "epsilon_bound": format_rational(&epsilon),
                    "epsilon_float": rational_to_f64(&epsilon),
                }),
                None,
            ))
        }
        "e1" => {
            let delta = parse_rat(config.delta.as_deref().unwrap_or("9/10"), "delta")?;
            let norm_bound = parse_rat(config.norm_bound.as_deref().unwrap_or("1"), "norm_bound")?;
            let count = config.count.unwrap_or(16);
            let trials = config.samples.unwrap_or(1000);
            let params = SeparationParams::new(delta, norm_bound)?;
            let constants = E1Constants::new(&params);
            let rho = seminorm_or_default(config)?;
            let points: Vec<SparseVector> =
                (1..=count as Index).map(SparseVector::basis).collect();
            let check = e1_bounds_check(&points, &rho, &constants, trials, config.seed)?;
            Ok((
                json!({
                    "delta": format_rational(&constants.delta),
                    "norm_bound": format_rational(&constants.norm_bound),
                    "coefficients": constants
                        .coefficients
                        .iter()
                        .map(rational_entry)
                        .collect::<Vec<_>>(),
                    "lower_factor": format_rational(&constants.lower_factor),
                    "points": count,
                    "check": serde_json::to_value(&check).map_err(internal)?,
                }),
                None,
            ))
        }
        "pipeline" => {
            let map_spec = config.map.as_deref().unwrap_or("shift");
            let map = maps::resolve(map_spec)?;
            let region: Region = config
                .region
                .as_deref()
                .unwrap_or("delta,min-norm=1/2")
                .parse()?;
            let params = CertifyParams {
                samples: config.samples.unwrap_or(200),
                pairs: config.pairs.unwrap_or(200),
                seed: config.seed,
            };
            let (_, report) =
                compose_pipeline(map, Arc::new(NearestPointRetraction), &region, &params)?;
            Ok((serde_json::to_value(&report).map_err(internal)?, None))
        }
        other => Err(CliError::Config(format!(
            "unknown delta op {other:?} (distance, retract, certify, e1, pipeline)"
        ))),
    }
}

fn delta_region(config: &ExperimentConfig, map_spec: &str) -> Result<Region, CliError> {
    match &config.region {
        Some(spec) => Ok(spec.parse()?),
        None => {
            let default = match map_spec {
                "baker" => "ball",
                _ => "delta",
            };
            Ok(default.parse()?)
        }
    }
}

fn run_separate(config: &ExperimentConfig) -> Result<(Value, Option<String>), CliError> {
    let mode = config.op.as_deref().unwrap_or("greedy");
    let delta = parse_rat(required(&config.delta, "delta")?, "delta")?;
    let count = config.count.unwrap_or(8);
    let rho = seminorm_or_default(config)?;
    let stream: Vec<SparseVector> = match &config.domain {
        Some(spec) => {
            let domain = parse_domain_spec(spec)?;
            domain.grid(config.resolution.unwrap_or(4))?
        }
        None => (1..=(count as Index).saturating_mul(8).max(8))
            .map(SparseVector::basis)
            .collect(),
    };
    let accepted = match mode {
        "greedy" => {
            let accepted = greedy_separated_sequence(stream, &rho, &delta, count);
            if !verify_pairwise_separation(&accepted, &rho, &delta) {
                return Err(CliError::Internal(
                    "greedy output failed its own re-verification".into(),
                ));
            }
            accepted
        }
        "span" => {
            let accepted = span_separated_sequence(stream, &rho, &delta, count)?;
            if !verify_span_separation(&accepted, &rho, &delta)? {
                return Err(CliError::Internal(
                    "span output failed its own re-verification".into(),
                ));
            }
            accepted
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown separation mode {other:?} (greedy, span)"
            )))
        }
    };
    let results = json!({
        "mode": mode,
        "delta": format_rational(&delta),
        "requested": count,
        "accepted": accepted
            .iter()
            .map(|v| serde_json::to_value(v).map_err(internal))
            .collect::<Result<Vec<_>, _>>()?,
        "accepted_count": accepted.len(),
        "verified": true,
    });
    Ok((results, None))
}
