//! Distinguishability experiments on families of strongly regular graphs.
//!
//! Every pair of graphs inside a family is non-isomorphic, so the failure
//! rate of a method is the fraction of pairs it cannot tell apart.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{lift, BoundaryMode, ComplexKind, HigherOrderComplex, LiftError, LiftSpec};
use crate::graph::{parse_graph6_file, GraphError, SimpleGraph, SrgParameters};
use crate::network::{
    embedding_distance, forward_depths, init_features, Aggregation, Architecture, BaseFeature,
    NetworkError, NetworkParams,
};
use crate::refine::{
    distinguishes, pairwise_verdicts, refine_many, refine_pair, wl1_refine_many, wl1_refine_pair,
    UpdateRule,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path} line {line}: {source}")]
    Graph {
        path: PathBuf,
        line: usize,
        source: GraphError,
    },
    #[error("{path}: graph {index} is not {expected} (found {found})")]
    Validation {
        path: PathBuf,
        index: usize,
        expected: SrgParameters,
        found: String,
    },
    #[error("graph {index}: {source}")]
    Lift { index: usize, source: LiftError },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// One family of the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub path: PathBuf,
    pub params: SrgParameters,
}

/// Parses `name path n k lambda mu` lines; `#` starts a comment. Relative
/// paths are resolved against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<FamilySpec>, BenchError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let fail = |message: String| BenchError::Manifest {
            line: i + 1,
            message,
        };
        if fields.len() != 6 {
            return Err(fail(format!("expected 6 fields, found {}", fields.len())));
        }
        let mut nums = [0usize; 4];
        for (slot, text) in nums.iter_mut().zip(&fields[2..]) {
            *slot = text
                .parse()
                .map_err(|_| fail(format!("{text:?} is not a non-negative integer")))?;
        }
        let path = Path::new(fields[1]);
        out.push(FamilySpec {
            name: fields[0].to_string(),
            path: if path.is_absolute() {
                path.to_path_buf()
            } else {
                base.join(path)
            },
            params: SrgParameters {
                n: nums[0],
                k: nums[1],
                lambda: nums[2],
                mu: nums[3],
            },
        });
    }
    Ok(out)
}

/// Reads the family file and checks every graph against the family parameters.
pub fn load_family(spec: &FamilySpec) -> Result<Vec<SimpleGraph>, BenchError> {
    let text = std::fs::read_to_string(&spec.path).map_err(|e| BenchError::Io {
        path: spec.path.clone(),
        message: e.to_string(),
    })?;
    let graphs = parse_graph6_file(&text).map_err(|(line, source)| BenchError::Graph {
        path: spec.path.clone(),
        line,
        source,
    })?;
    for (index, g) in graphs.iter().enumerate() {
        let found = g.srg_parameters();
        if found != Some(spec.params) {
            return Err(BenchError::Validation {
                path: spec.path.clone(),
                index,
                expected: spec.params,
                found: found.map_or_else(
                    || format!("a non-strongly-regular graph on {} vertices", g.n()),
                    |p| p.to_string(),
                ),
            });
        }
    }
    Ok(graphs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pwl,
    Swl,
    Cwl,
    Wl1,
    Pcn,
    Cwn,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Pwl,
        Method::Swl,
        Method::Cwl,
        Method::Wl1,
        Method::Pcn,
        Method::Cwn,
    ];

    pub fn is_network(self) -> bool {
        matches!(self, Method::Pcn | Method::Cwn)
    }

    /// Complex the method runs on, `None` for 1-WL.
    pub fn kind(self) -> Option<ComplexKind> {
        match self {
            Method::Pwl | Method::Pcn => Some(ComplexKind::Path),
            Method::Swl => Some(ComplexKind::Simplex),
            Method::Cwl | Method::Cwn => Some(ComplexKind::Cell),
            Method::Wl1 => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pwl => "pwl",
            Method::Swl => "swl",
            Method::Cwl => "cwl",
            Method::Wl1 => "wl1",
            Method::Pcn => "pcn",
            Method::Cwn => "cwn",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

/// One experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub method: Method,
    /// Maximum dimension for path and clique lifts, ring-size cap for cell lifts.
    pub lift_size: usize,
    pub layers: usize,
    pub seeds: Vec<u64>,
    pub epsilon: f64,
    pub boundary_mode: BoundaryMode,
    pub member_cap: usize,
    pub rule: UpdateRule,
    pub hidden_dim: usize,
    pub embed_dim: usize,
    pub aggregation: Aggregation,
    pub base: BaseFeature,
    pub use_coboundaries: bool,
    /// Refine a whole family in one run instead of pair by pair.
    pub joint: bool,
}

impl RunConfig {
    pub fn new(method: Method, lift_size: usize) -> Self {
        Self {
            method,
            lift_size,
            layers: 4,
            seeds: (0..10).collect(),
            epsilon: 0.01,
            boundary_mode: BoundaryMode::Incidence,
            member_cap: crate::complex::DEFAULT_MEMBER_CAP,
            rule: UpdateRule::Reduced,
            hidden_dim: 16,
            embed_dim: 32,
            aggregation: Aggregation::Sum,
            base: BaseFeature::Ones,
            use_coboundaries: true,
            joint: true,
        }
    }

    pub fn with_layers(mut self, layers: usize) -> Self {
        self.layers = layers;
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(BenchError::Config("epsilon must be positive".into()));
        }
        if self.method.is_network() && self.seeds.is_empty() {
            return Err(BenchError::Config(
                "network methods need at least one seed".into(),
            ));
        }
        if self.method.kind() == Some(ComplexKind::Cell) && self.lift_size < 3 {
            return Err(BenchError::Config(
                "ring-size cap must be at least 3".into(),
            ));
        }
        Ok(())
    }

    /// Lifting used by this configuration, `None` for 1-WL.
    pub fn lift_spec(&self) -> Option<LiftSpec> {
        let spec = match self.method.kind()? {
            ComplexKind::Path => {
                LiftSpec::path(self.lift_size).with_boundary_mode(self.boundary_mode)
            }
            ComplexKind::Simplex => LiftSpec::clique(self.lift_size),
            ComplexKind::Cell => LiftSpec::ring(self.lift_size),
        };
        Some(spec.with_member_cap(self.member_cap))
    }

    pub fn architecture(&self, max_dim: usize) -> Architecture {
        Architecture {
            hidden_dim: self.hidden_dim,
            embed_dim: self.embed_dim,
            use_coboundaries: self.use_coboundaries,
            ..Architecture::new(self.layers, max_dim)
        }
    }

    /// Short label such as `pcn(3)` or `cwn(4-IC)`.
    pub fn label(&self) -> String {
        match self.method.kind() {
            Some(ComplexKind::Cell) => format!("{}({}-IC)", self.method, self.lift_size),
            Some(_) => format!("{}({})", self.method, self.lift_size),
            None => self.method.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    /// `None` for deterministic methods.
    pub seed: Option<u64>,
    pub failure_rate: f64,
    pub pairs: usize,
    pub indistinguishable: usize,
    pub forward_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Skipped { reason: String },
    Error { message: String },
}

/// Statistics of skipped cells are NaN, written to JSON as `null`.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub family: String,
    pub config: RunConfig,
    pub graphs: usize,
    pub results: Vec<SeedResult>,
    #[serde(with = "nan_as_null")]
    pub mean: f64,
    /// Population standard deviation over seeds.
    #[serde(with = "nan_as_null")]
    pub std: f64,
    #[serde(with = "nan_as_null")]
    pub min: f64,
    #[serde(with = "nan_as_null")]
    pub max: f64,
    pub lift_ms: f64,
    pub status: CellStatus,
}

impl FailureReport {
    fn empty(family: &str, config: &RunConfig, status: CellStatus) -> Self {
        Self {
            family: family.to_string(),
            config: config.clone(),
            graphs: 0,
            results: Vec::new(),
            mean: f64::NAN,
            std: f64::NAN,
            min: f64::NAN,
            max: f64::NAN,
            lift_ms: 0.0,
            status,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == CellStatus::Ok
    }
}

/// Lifted complexes of one family, keyed by lifting settings.
#[derive(Default)]
pub struct ComplexCache {
    entries: HashMap<LiftSpec, (Vec<HigherOrderComplex>, f64)>,
}

impl ComplexCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Complexes for every graph plus the wall-clock milliseconds the lift took.
    pub fn get_or_lift(
        &mut self,
        graphs: &[SimpleGraph],
        spec: &LiftSpec,
    ) -> Result<(&[HigherOrderComplex], f64), BenchError> {
        if !self.entries.contains_key(spec) {
            let start = Instant::now();
            let complexes = graphs
                .par_iter()
                .enumerate()
                .map(|(index, g)| {
                    lift(g, spec).map_err(|source| BenchError::Lift { index, source })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            self.entries.insert(*spec, (complexes, ms));
        }
        let (complexes, ms) = &self.entries[spec];
        Ok((complexes, *ms))
    }
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn rate(indistinguishable: usize, pairs: usize) -> f64 {
    if pairs == 0 {
        0.0
    } else {
        indistinguishable as f64 / pairs as f64
    }
}

fn deterministic_result(
    graphs: &[SimpleGraph],
    complexes: Option<&[HigherOrderComplex]>,
    cfg: &RunConfig,
) -> SeedResult {
    let start = Instant::now();
    let n = graphs.len();
    let same = match (complexes, cfg.joint) {
        (Some(cxs), true) => {
            let refs: Vec<&HigherOrderComplex> = cxs.iter().collect();
            let r = refine_many(&refs, cfg.rule, None).expect("one lifting kind");
            pairwise_verdicts(&r).iter().filter(|v| !v.2).count()
        }
        (None, true) => {
            let refs: Vec<&SimpleGraph> = graphs.iter().collect();
            pairwise_verdicts(&wl1_refine_many(&refs, None))
                .iter()
                .filter(|v| !v.2)
                .count()
        }
        (cxs, false) => {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect();
            pairs
                .par_iter()
                .filter(|&&(a, b)| match cxs {
                    Some(cxs) => {
                        let (x, y, _) =
                            refine_pair(&cxs[a], &cxs[b], cfg.rule, None).expect("one kind");
                        !distinguishes(&x, &y)
                    }
                    None => {
                        let (x, y, _) = wl1_refine_pair(&graphs[a], &graphs[b]);
                        !distinguishes(&x, &y)
                    }
                })
                .count()
        }
    };
    let pairs = pair_count(n);
    SeedResult {
        seed: None,
        failure_rate: rate(same, pairs),
        pairs,
        indistinguishable: same,
        forward_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Embeddings of every complex under one seed.
pub fn embed_family(
    complexes: &[HigherOrderComplex],
    cfg: &RunConfig,
    seed: u64,
) -> Result<Vec<Vec<f64>>, NetworkError> {
    Ok(
        embed_family_depths(complexes, std::slice::from_ref(cfg), seed)?
            .pop()
            .unwrap(),
    )
}

/// Like [`embed_family`] for configurations that differ only in depth, with
/// one shared message-passing run. Indexed `[config][graph]`.
pub fn embed_family_depths(
    complexes: &[HigherOrderComplex],
    cfgs: &[RunConfig],
    seed: u64,
) -> Result<Vec<Vec<Vec<f64>>>, NetworkError> {
    let Some(first) = cfgs.first() else {
        return Ok(Vec::new());
    };
    let max_dim = complexes
        .first()
        .map_or(first.lift_size, HigherOrderComplex::max_dim);
    let params: Vec<NetworkParams> = cfgs
        .iter()
        .map(|c| NetworkParams::new(seed, c.architecture(max_dim)))
        .collect();
    let per_graph = complexes
        .par_iter()
        .map(|cx| {
            let f = init_features(cx, first.hidden_dim, first.aggregation, first.base);
            forward_depths(cx, &f, &params)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = vec![Vec::with_capacity(complexes.len()); cfgs.len()];
    for embeddings in per_graph {
        for (slot, e) in out.iter_mut().zip(embeddings) {
            slot.push(e);
        }
    }
    Ok(out)
}

fn network_results(
    complexes: &[HigherOrderComplex],
    cfgs: &[RunConfig],
    seed: u64,
) -> Result<Vec<SeedResult>, NetworkError> {
    let start = Instant::now();
    let per_cfg = embed_family_depths(complexes, cfgs, seed)?;
    let forward_ms = start.elapsed().as_secs_f64() * 1e3;
    per_cfg
        .iter()
        .zip(cfgs)
        .map(|(emb, cfg)| {
            let n = emb.len();
            let mut same = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if embedding_distance(&emb[a], &emb[b])? < cfg.epsilon {
                        same += 1;
                    }
                }
            }
            let pairs = pair_count(n);
            Ok(SeedResult {
                seed: Some(seed),
                failure_rate: rate(same, pairs),
                pairs,
                indistinguishable: same,
                forward_ms,
            })
        })
        .collect()
}

fn lift_for<'c>(
    family: &str,
    graphs: &[SimpleGraph],
    cfg: &RunConfig,
    cache: &'c mut ComplexCache,
) -> Result<(Option<&'c [HigherOrderComplex]>, f64), FailureReport> {
    match cfg.lift_spec() {
        None => Ok((None, 0.0)),
        Some(spec) => match cache.get_or_lift(graphs, &spec) {
            Ok((cxs, ms)) => Ok((Some(cxs), ms)),
            Err(
                e @ BenchError::Lift {
                    source: LiftError::MemberCap { .. },
                    ..
                },
            ) => Err(FailureReport::empty(
                family,
                cfg,
                CellStatus::Skipped {
                    reason: e.to_string(),
                },
            )),
            Err(e) => Err(FailureReport::empty(
                family,
                cfg,
                CellStatus::Error {
                    message: e.to_string(),
                },
            )),
        },
    }
}

fn summarize(
    family: &str,
    graphs: usize,
    cfg: &RunConfig,
    results: Vec<SeedResult>,
    lift_ms: f64,
) -> FailureReport {
    let rates: Vec<f64> = results.iter().map(|r| r.failure_rate).collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let std =
        (rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / rates.len() as f64).sqrt();
    FailureReport {
        family: family.to_string(),
        config: cfg.clone(),
        graphs,
        mean,
        std,
        min: rates.iter().copied().fold(f64::INFINITY, f64::min),
        max: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        results,
        lift_ms,
        status: CellStatus::Ok,
    }
}

/// True when two configurations differ at most in their layer count.
pub fn same_but_depth(a: &RunConfig, b: &RunConfig) -> bool {
    a == &RunConfig {
        layers: a.layers,
        ..b.clone()
    }
}

/// Runs network configurations that differ only in depth, sharing the lift
/// and the message passing. Each report's `forward_ms` is the time of the
/// shared pass. Falls back to [`run_family`] per configuration otherwise.
pub fn run_family_depths(
    family: &str,
    graphs: &[SimpleGraph],
    cfgs: &[RunConfig],
    cache: &mut ComplexCache,
) -> Vec<FailureReport> {
    let groupable = cfgs.first().is_some_and(|first| {
        first.method.is_network() && cfgs.iter().all(|c| same_but_depth(first, c))
    });
    if !groupable || cfgs.len() == 1 {
        return cfgs
            .iter()
            .map(|c| run_family(family, graphs, c, cache))
            .collect();
    }
    let mut reports: Vec<Option<FailureReport>> = vec![None; cfgs.len()];
    let mut valid = Vec::new();
    for (i, cfg) in cfgs.iter().enumerate() {
        match cfg.validate() {
            Ok(()) => valid.push(i),
            Err(e) => {
                reports[i] = Some(FailureReport::empty(
                    family,
                    cfg,
                    CellStatus::Error {
                        message: e.to_string(),
                    },
                ))
            }
        }
    }
    if let Some(&lead) = valid.first() {
        let group: Vec<RunConfig> = valid.iter().map(|&i| cfgs[i].clone()).collect();
        match lift_for(family, graphs, &cfgs[lead], cache) {
            Err(report) => {
                for &i in &valid {
                    reports[i] = Some(FailureReport {
                        config: cfgs[i].clone(),
                        ..report.clone()
                    });
                }
            }
            Ok((complexes, lift_ms)) => {
                let complexes = complexes.expect("network methods lift");
                let mut per_cfg = vec![Vec::new(); group.len()];
                let mut failure = None;
                for &seed in &cfgs[lead].seeds {
                    match network_results(complexes, &group, seed) {
                        Ok(rs) => {
                            for (slot, r) in per_cfg.iter_mut().zip(rs) {
                                slot.push(r);
                            }
                        }
                        Err(e) => {
                            failure = Some(e.to_string());
                            break;
                        }
                    }
                }
                for (k, &i) in valid.iter().enumerate() {
                    reports[i] = Some(match &failure {
                        Some(message) => FailureReport::empty(
                            family,
                            &cfgs[i],
                            CellStatus::Error {
                                message: message.clone(),
                            },
                        ),
                        None => summarize(
                            family,
                            graphs.len(),
                            &cfgs[i],
                            std::mem::take(&mut per_cfg[k]),
                            lift_ms,
                        ),
                    });
                }
            }
        }
    }
    reports.into_iter().map(Option::unwrap).collect()
}

/// Runs one configuration on one loaded family.
pub fn run_family(
    family: &str,
    graphs: &[SimpleGraph],
    cfg: &RunConfig,
    cache: &mut ComplexCache,
) -> FailureReport {
    if let Err(e) = cfg.validate() {
        return FailureReport::empty(
            family,
            cfg,
            CellStatus::Error {
                message: e.to_string(),
            },
        );
    }
    let (complexes, lift_ms) = match lift_for(family, graphs, cfg, cache) {
        Ok(lifted) => lifted,
        Err(report) => return report,
    };
    let results = if cfg.method.is_network() {
        let complexes = complexes.expect("network methods lift");
        let mut out = Vec::with_capacity(cfg.seeds.len());
        for &seed in &cfg.seeds {
            match network_results(complexes, std::slice::from_ref(cfg), seed) {
                Ok(mut r) => out.push(r.pop().unwrap()),
                Err(e) => {
                    return FailureReport::empty(
                        family,
                        cfg,
                        CellStatus::Error {
                            message: e.to_string(),
                        },
                    )
                }
            }
        }
        out
    } else {
        vec![deterministic_result(graphs, complexes, cfg)]
    };
    summarize(family, graphs.len(), cfg, results, lift_ms)
}

/// Where a measurement was taken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub cpu_model: String,
    pub threads: usize,
    pub os: String,
}

impl Environment {
    pub fn detect() -> Self {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|text| {
                text.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split_once(':'))
                    .map(|(_, v)| v.trim().to_string())
            })
            .unwrap_or_else(|| "unknown".to_string());
        Self {
            cpu_model,
            threads: rayon::current_num_threads(),
            os: std::env::consts::OS.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub environment: Environment,
    pub reports: Vec<FailureReport>,
}

/// Every configuration on every family. A family that fails to load marks
/// all its cells as errored; other families still run.
pub fn sweep(families: &[FamilySpec], configs: &[RunConfig]) -> SweepReport {
    let mut reports = Vec::new();
    for spec in families {
        match load_family(spec) {
            Ok(graphs) => {
                let mut cache = ComplexCache::new();
                let mut done = vec![false; configs.len()];
                for i in 0..configs.len() {
                    if done[i] {
                        continue;
                    }
                    let members: Vec<usize> = (i..configs.len())
                        .filter(|&j| {
                            !done[j]
                                && (j == i
                                    || configs[i].method.is_network()
                                        && same_but_depth(&configs[i], &configs[j]))
                        })
                        .collect();
                    let group: Vec<RunConfig> =
                        members.iter().map(|&j| configs[j].clone()).collect();
                    for &j in &members {
                        done[j] = true;
                    }
                    reports.extend(run_family_depths(&spec.name, &graphs, &group, &mut cache));
                }
            }
            Err(e) => {
                for cfg in configs {
                    reports.push(FailureReport::empty(
                        &spec.name,
                        cfg,
                        CellStatus::Error {
                            message: e.to_string(),
                        },
                    ));
                }
            }
        }
    }
    reports.sort_by(|a, b| {
        (
            &a.family,
            a.config.method,
            a.config.lift_size,
            a.config.layers,
        )
            .cmp(&(
                &b.family,
                b.config.method,
                b.config.lift_size,
                b.config.layers,
            ))
    });
    SweepReport {
        environment: Environment::detect(),
        reports,
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "family",
    "method",
    "max_dim",
    "layers",
    "seed",
    "failure_rate",
    "pairs",
    "indistinguishable",
    "lift_ms",
    "forward_ms",
];

/// One row per seed (one per cell for deterministic methods, and one with
/// empty measurements for skipped or failed cells).
pub fn write_csv<W: std::io::Write>(reports: &[FailureReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        let layers = if r.config.method.is_network() {
            r.config.layers.to_string()
        } else {
            String::new()
        };
        let head = [
            r.family.clone(),
            r.config.method.to_string(),
            r.config.lift_size.to_string(),
            layers,
        ];
        if r.results.is_empty() {
            let blank = [String::new(), String::new(), String::new(), String::new()];
            w.write_record(
                head.iter()
                    .chain(&blank)
                    .chain(&[format!("{:.3}", r.lift_ms), String::new()]),
            )?;
        }
        for s in &r.results {
            w.write_record([
                head[0].clone(),
                head[1].clone(),
                head[2].clone(),
                head[3].clone(),
                s.seed.map(|x| x.to_string()).unwrap_or_default(),
                s.failure_rate.to_string(),
                s.pairs.to_string(),
                s.indistinguishable.to_string(),
                format!("{:.3}", r.lift_ms),
                format!("{:.3}", s.forward_ms),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Family x configuration matrix of mean failure rates (with std for networks).
pub fn format_matrix(reports: &[FailureReport]) -> String {
    let mut columns: Vec<String> = Vec::new();
    let mut rows: Vec<String> = Vec::new();
    let column = |r: &FailureReport| {
        if r.config.method.is_network() {
            format!("{} L={}", r.config.label(), r.config.layers)
        } else {
            r.config.label()
        }
    };
    for r in reports {
        let c = column(r);
        if !columns.contains(&c) {
            columns.push(c);
        }
        if !rows.contains(&r.family) {
            rows.push(r.family.clone());
        }
    }
    let cell = |family: &str, col: &str| -> String {
        match reports
            .iter()
            .find(|r| r.family == family && column(r) == col)
        {
            None => "-".into(),
            Some(r) => match &r.status {
                CellStatus::Ok if r.config.method.is_network() => {
                    format!("{:.5} ± {:.5}", r.mean, r.std)
                }
                CellStatus::Ok => format!("{:.5}", r.mean),
                CellStatus::Skipped { .. } => "skipped".into(),
                CellStatus::Error { .. } => "error".into(),
            },
        }
    };
    let first = rows.iter().map(String::len).max().unwrap_or(6).max(6);
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| {
            rows.iter()
                .map(|f| cell(f, c).chars().count())
                .chain([c.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = format!("{:<first$}", "family");
    for (c, w) in columns.iter().zip(&widths) {
        out.push_str(&format!("  {c:>w$}"));
    }
    out.push('\n');
    for f in &rows {
        out.push_str(&format!("{f:<first$}"));
        for (c, w) in columns.iter().zip(&widths) {
            out.push_str(&format!("  {:>w$}", cell(f, c)));
        }
        out.push('\n');
    }
    out
}

/// Wall-clock statistics for lifting a set of graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub spec: LiftSpec,
    pub graphs: usize,
    pub samples_ms: Vec<f64>,
    pub mean_ms: f64,
    /// Sample standard deviation; zero for a single sample.
    pub std_ms: f64,
    /// Member count per dimension summed over the graphs.
    pub members: Vec<usize>,
    pub environment: Environment,
}

/// Lifts all graphs `repeats` times, timing each full pass.
pub fn time_lifting(
    graphs: &[SimpleGraph],
    spec: &LiftSpec,
    repeats: usize,
) -> Result<TimingStats, BenchError> {
    if repeats == 0 {
        return Err(BenchError::Config("repeats must be at least 1".into()));
    }
    let mut samples_ms = Vec::with_capacity(repeats);
    let mut members = Vec::new();
    for _ in 0..repeats {
        let start = Instant::now();
        let mut counts = Vec::new();
        for (index, g) in graphs.iter().enumerate() {
            let cx = lift(g, spec).map_err(|source| BenchError::Lift { index, source })?;
            let c = cx.counts();
            if counts.len() < c.len() {
                counts.resize(c.len(), 0);
            }
            for (a, b) in counts.iter_mut().zip(c) {
                *a += b;
            }
        }
        samples_ms.push(start.elapsed().as_secs_f64() * 1e3);
        members = counts;
    }
    let k = samples_ms.len() as f64;
    let mean_ms = samples_ms.iter().sum::<f64>() / k;
    let std_ms = if samples_ms.len() > 1 {
        (samples_ms
            .iter()
            .map(|s| (s - mean_ms).powi(2))
            .sum::<f64>()
            / (k - 1.0))
            .sqrt()
    } else {
        0.0
    };
    Ok(TimingStats {
        spec: *spec,
        graphs: graphs.len(),
        samples_ms,
        mean_ms,
        std_ms,
        members,
        environment: Environment::detect(),
    })
}
