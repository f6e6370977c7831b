//! Config-driven experiment runs with versioned JSON output.
//!
//! A run is a pure function of its [`RunConfig`]: the same config and seed
//! always produce byte-identical JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{
    braiding_experiment, fusion_experiment, prep_experiment, run_experiment, BackendKind, BraidLayout,
    ExperimentResult, FusionVariant, GateBook, LatticeSpec, PrepMethod, Protocol,
};
use crate::resources::{assess, count_resources, Assessment, GateCostModel};
use crate::theory::{algebra_check, AlgebraReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Largest register the dense backend accepts.
pub const STATEVECTOR_MAX_QUDITS: usize = 16;
/// Analytic values must match across backends and against expectations to this.
pub const ANALYTIC_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Prep,
    Fusion,
    Braiding,
    AlgebraCheck,
    Resources,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    #[default]
    Tableau,
    Statevector,
    Both,
}

impl BackendChoice {
    pub fn kinds(self) -> Vec<BackendKind> {
        match self {
            BackendChoice::Tableau => vec![BackendKind::Tableau],
            BackendChoice::Statevector => vec![BackendKind::Statevector],
            BackendChoice::Both => vec![BackendKind::Tableau, BackendKind::Statevector],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendChoice::Tableau => "tableau",
            BackendChoice::Statevector => "statevector",
            BackendChoice::Both => "both",
        }
    }
}

/// Settings for the `resources` experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceSettings {
    /// Which protocol to count.
    #[serde(default = "default_counted")]
    pub protocol: ExperimentKind,
    #[serde(default = "default_target")]
    pub target_fidelity: f64,
    /// Cost-model TOML; the bundled model when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_model: Option<String>,
}

impl Default for ResourceSettings {
    fn default() -> Self {
        ResourceSettings { protocol: default_counted(), target_fidelity: default_target(), cost_model: None }
    }
}

fn default_counted() -> ExperimentKind {
    ExperimentKind::Prep
}

fn default_target() -> f64 {
    0.90
}

fn default_shots() -> u64 {
    10_000
}

fn default_retry_cap() -> u64 {
    1_000_000
}

fn default_braid() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    /// Defaults to 3×4; fusion only runs on 3×4.
    #[serde(default = "default_lattice")]
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub backend: BackendChoice,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    /// Aggregate trial attempts allowed across all shots.
    #[serde(default = "default_retry_cap")]
    pub postselect_retry_cap: u64,
    #[serde(default)]
    pub prep: PrepMethod,
    #[serde(default)]
    pub variant: FusionVariant,
    /// `false` runs the no-braid control.
    #[serde(default = "default_braid")]
    pub braid: bool,
    #[serde(default)]
    pub resources: ResourceSettings,
}

fn default_lattice() -> LatticeSpec {
    LatticeSpec::new(3, 4, 3, Default::default())
}

impl RunConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        RunConfig {
            experiment,
            lattice: default_lattice(),
            backend: BackendChoice::default(),
            shots: default_shots(),
            seed: 0,
            postselect_retry_cap: default_retry_cap(),
            prep: PrepMethod::default(),
            variant: FusionVariant::default(),
            braid: true,
            resources: ResourceSettings::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].lines().count().max(1));
            Error::Parse { line, msg: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.lattice.d != 3 {
            return Err(Error::Config(format!("the gate library is qutrit-only; d = {} is not supported", self.lattice.d)));
        }
        let fixed = self.experiment == ExperimentKind::Fusion
            || (self.experiment == ExperimentKind::Resources && self.resources.protocol == ExperimentKind::Fusion);
        if fixed && (self.lattice.rows, self.lattice.cols) != (3, 4) {
            return Err(Error::Config("the fusion script is laid out for a 3x4 lattice".into()));
        }
        if !(self.resources.target_fidelity > 0.0 && self.resources.target_fidelity < 1.0) {
            return Err(Error::Config("target_fidelity must lie in (0, 1)".into()));
        }
        if matches!(self.resources.protocol, ExperimentKind::AlgebraCheck | ExperimentKind::Resources) {
            return Err(Error::Config("resources.protocol must be prep, fusion or braiding".into()));
        }
        Ok(())
    }

    /// The script this config describes, for protocol experiments.
    pub fn protocol(&self, book: &GateBook, kind: ExperimentKind) -> Result<Protocol> {
        match kind {
            ExperimentKind::Prep => prep_experiment(book, self.lattice.build()?, self.prep),
            ExperimentKind::Fusion => fusion_experiment(book, self.variant),
            ExperimentKind::Braiding => {
                let layout = BraidLayout::for_lattice(self.lattice.rows, self.lattice.cols)?;
                braiding_experiment(book, self.lattice.build()?, &layout, self.braid)
            }
            ExperimentKind::AlgebraCheck | ExperimentKind::Resources => {
                Err(Error::Config("this experiment has no protocol".into()))
            }
        }
    }
}

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    UsageOrConfig,
    PhysicsFailure,
    BackendDisagreement,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::UsageOrConfig => 1,
            Status::PhysicsFailure => 2,
            Status::BackendDisagreement => 3,
        }
    }

    /// Exit status for an error that stopped a run.
    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::RetryExhausted { .. } | Error::ZeroProbability { .. } => Status::PhysicsFailure,
            _ => Status::UsageOrConfig,
        }
    }
}

/// Expected analytic value of one readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub label: String,
    pub expected: f64,
    pub backend: String,
    pub analytic: f64,
    pub pass: bool,
}

/// One analytic quantity that differs between backends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub tableau: f64,
    pub statevector: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendComparison {
    pub max_difference: f64,
    pub tolerance: f64,
    pub discrepancies: Vec<Discrepancy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Protocol {
        results: Vec<ExperimentResult>,
        expectations: Vec<Expectation>,
        #[serde(skip_serializing_if = "Option::is_none")]
        comparison: Option<BackendComparison>,
    },
    AlgebraCheck {
        report: AlgebraReport,
    },
    Resources {
        assessment: Assessment,
    },
}

/// The versioned result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub schema_version: u32,
    pub code_version: String,
    pub config: RunConfig,
    pub seed: u64,
    pub backend: String,
    pub status: Status,
    pub payload: Payload,
}

impl RunOutput {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result documents serialize");
        s.push('\n');
        s
    }
}

/// Analytic readout values a correct run must produce.
fn expected_values(cfg: &RunConfig, protocol: &Protocol) -> Vec<(String, f64)> {
    let d = protocol.lattice.d;
    match cfg.experiment {
        ExperimentKind::Prep => protocol.readouts().map(|(l, _, _)| (l.to_string(), 1.0)).collect(),
        ExperimentKind::Fusion => protocol
            .readouts()
            .map(|(l, _, _)| {
                let after = l.starts_with("post.") && cfg.variant != FusionVariant::Control;
                (l.to_string(), if after { 1.0 } else { 0.0 })
            })
            .collect(),
        ExperimentKind::Braiding => protocol
            .readouts()
            .map(|(l, _, _)| (l.to_string(), if cfg.braid { 1.0 / d as f64 } else { 1.0 }))
            .collect(),
        _ => Vec::new(),
    }
}

fn compare(a: &ExperimentResult, b: &ExperimentResult) -> BackendComparison {
    let mut pairs: Vec<(String, f64, f64)> = Vec::new();
    let (pa, pb) = (&a.postselection.step_probabilities, &b.postselection.step_probabilities);
    for i in 0..pa.len().max(pb.len()) {
        pairs.push((format!("postselect[{i}]"), pa.get(i).copied().unwrap_or(f64::NAN), pb.get(i).copied().unwrap_or(f64::NAN)));
    }
    for (oa, ob) in a.observables.iter().zip(&b.observables) {
        for (k, (x, y)) in oa.distribution.iter().zip(&ob.distribution).enumerate() {
            pairs.push((format!("{}[{k}]", oa.label), *x, *y));
        }
    }
    if a.observables.len() != b.observables.len() {
        pairs.push(("observable count".into(), a.observables.len() as f64, b.observables.len() as f64));
    }
    let diff = |x: f64, y: f64| if x.is_nan() || y.is_nan() { f64::INFINITY } else { (x - y).abs() };
    let max_difference = pairs.iter().map(|(_, x, y)| diff(*x, *y)).fold(0.0, f64::max);
    let discrepancies = pairs
        .into_iter()
        .filter(|(_, x, y)| diff(*x, *y) > ANALYTIC_TOLERANCE)
        .map(|(quantity, tableau, statevector)| Discrepancy { quantity, tableau, statevector })
        .collect();
    BackendComparison { max_difference, tolerance: ANALYTIC_TOLERANCE, discrepancies }
}

fn run_protocol(cfg: &RunConfig, book: &GateBook) -> Result<(Status, Payload)> {
    let protocol = cfg.protocol(book, cfg.experiment)?;
    let kinds = cfg.backend.kinds();
    if kinds.contains(&BackendKind::Statevector) && protocol.qudits > STATEVECTOR_MAX_QUDITS {
        return Err(Error::CapacityExceeded { n: protocol.qudits, cap: STATEVECTOR_MAX_QUDITS });
    }
    let results = kinds
        .into_iter()
        .map(|k| run_experiment(&protocol, book, k, cfg.shots, cfg.seed, cfg.postselect_retry_cap).map(|(_, r)| r))
        .collect::<Result<Vec<_>>>()?;
    let expectations: Vec<Expectation> = results
        .iter()
        .flat_map(|r| {
            expected_values(cfg, &protocol).into_iter().map(move |(label, expected)| {
                let analytic = r.observable(&label).map_or(f64::NAN, |o| o.analytic);
                Expectation {
                    pass: (analytic - expected).abs() <= ANALYTIC_TOLERANCE,
                    label,
                    expected,
                    backend: r.backend.clone(),
                    analytic,
                }
            })
        })
        .collect();
    let comparison = (results.len() == 2).then(|| compare(&results[0], &results[1]));
    let status = if comparison.as_ref().is_some_and(|c| !c.discrepancies.is_empty()) {
        Status::BackendDisagreement
    } else if expectations.iter().any(|e| !e.pass) {
        Status::PhysicsFailure
    } else {
        Status::Success
    };
    Ok((status, Payload::Protocol { results, expectations, comparison }))
}

fn run_resources(cfg: &RunConfig, book: &GateBook, base: Option<&Path>) -> Result<(Status, Payload)> {
    let model = match &cfg.resources.cost_model {
        Some(p) => {
            let path = base.map_or_else(|| Path::new(p).to_path_buf(), |b| b.join(p));
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            GateCostModel::from_toml(&text)?
        }
        None => GateCostModel::default(),
    };
    let protocol = cfg.protocol(book, cfg.resources.protocol)?;
    let assessment = assess(&count_resources(&protocol), &model, cfg.resources.target_fidelity)?;
    Ok((Status::Success, Payload::Resources { assessment }))
}

/// Run `cfg`; `base` resolves relative paths inside the config.
pub fn run(cfg: &RunConfig, book: &GateBook, base: Option<&Path>) -> Result<RunOutput> {
    cfg.validate()?;
    let (status, payload) = match cfg.experiment {
        ExperimentKind::AlgebraCheck => {
            let report = algebra_check()?;
            let status = if report.all_pass() { Status::Success } else { Status::PhysicsFailure };
            (status, Payload::AlgebraCheck { report })
        }
        ExperimentKind::Resources => run_resources(cfg, book, base)?,
        _ => run_protocol(cfg, book)?,
    };
    Ok(RunOutput {
        schema_version: SCHEMA_VERSION,
        code_version: CODE_VERSION.to_string(),
        config: cfg.clone(),
        seed: cfg.seed,
        backend: cfg.backend.name().to_string(),
        status,
        payload,
    })
}
