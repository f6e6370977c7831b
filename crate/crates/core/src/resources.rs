//! Gate counting and hardware feasibility arithmetic.
//!
//! Counts come from a replay of a [`Protocol`]. Fidelities use a product
//! model and durations a layer-synchronous schedule: every ASAP layer lasts
//! as long as its slowest gate. Readouts are analysis probes and cost nothing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Color, PlaquetteKind};
use crate::protocols::{Protocol, Step};

/// Counting key for each non-identity factor of a scripted Pauli.
pub const PAULI_KEY: &str = "pauli";
pub const POSTSELECT_KEY: &str = "postselect";
pub const ROTATE_KEY: &str = "rotate";
pub const READOUT_KEY: &str = "readout";

const DEFAULT_MODEL: &str = include_str!("../data/cost_model.toml");

/// `[min, max]`.
pub type Range = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTable {
    pub single_qudit: f64,
    pub two_qudit: f64,
    /// Overrides by gate name.
    #[serde(default)]
    pub gates: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationTable {
    pub single_qudit: Range,
    pub two_qudit: Range,
}

/// Coherence times in µs keyed by level pair (`"01"`, `"12"`, `"02"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceTable {
    pub t1: BTreeMap<String, f64>,
    pub t2: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCostModel {
    pub fidelity: FidelityTable,
    pub duration_ns: DurationTable,
    pub coherence_us: CoherenceTable,
}

impl Default for GateCostModel {
    fn default() -> Self {
        GateCostModel::from_toml(DEFAULT_MODEL).expect("bundled cost model is valid")
    }
}

impl GateCostModel {
    pub fn from_toml(text: &str) -> Result<Self> {
        let model: GateCostModel = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.fidelity;
        let fids = [("single_qudit", f.single_qudit), ("two_qudit", f.two_qudit)]
            .into_iter()
            .chain(f.gates.iter().map(|(k, &v)| (k.as_str(), v)));
        for (name, v) in fids {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("fidelity of {name} must lie in (0, 1], got {v}")));
            }
        }
        for (name, [lo, hi]) in [("single_qudit", self.duration_ns.single_qudit), ("two_qudit", self.duration_ns.two_qudit)] {
            if !(lo > 0.0 && hi >= lo) {
                return Err(Error::Config(format!("duration of {name} must satisfy 0 < min <= max, got [{lo}, {hi}]")));
            }
        }
        let times: Vec<f64> = self.coherence_us.t1.values().chain(self.coherence_us.t2.values()).copied().collect();
        if times.is_empty() || times.iter().any(|&t| t <= 0.0) {
            return Err(Error::Config("coherence times must be present and positive".into()));
        }
        Ok(())
    }

    pub fn gate_fidelity(&self, name: &str, arity: usize) -> f64 {
        if let Some(&f) = self.fidelity.gates.get(name) {
            return f;
        }
        if arity >= 2 {
            self.fidelity.two_qudit
        } else {
            self.fidelity.single_qudit
        }
    }

    /// `min(T₁, T₂)` over all level pairs, in µs.
    pub fn min_coherence_us(&self) -> f64 {
        self.coherence_us.t1.values().chain(self.coherence_us.t2.values()).copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    /// Occurrences by gate name (or by one of the step keys).
    pub counts: BTreeMap<String, u64>,
    pub single_qudit: u64,
    pub two_qudit: u64,
}

impl Tally {
    fn add(&mut self, name: &str, arity: usize) {
        *self.counts.entry(name.to_string()).or_default() += 1;
        match arity {
            0 => {}
            1 => self.single_qudit += 1,
            _ => self.two_qudit += 1,
        }
    }

    fn merge(&mut self, other: &Tally) {
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_default() += v;
        }
        self.single_qudit += other.single_qudit;
        self.two_qudit += other.two_qudit;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentTally {
    pub name: String,
    pub tally: Tally,
}

/// ASAP layers by their slowest member.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerProfile {
    pub two_qudit: u64,
    pub single_qudit: u64,
    /// Layers holding only measurements or logical rotations; untimed.
    pub other: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub protocol: String,
    pub tally: Tally,
    /// Gates, Pauli factors, post-selections and rotations on the qudit DAG.
    pub depth: u64,
    pub layers: LayerProfile,
    pub fragments: Vec<FragmentTally>,
    /// `(name, arity)` for every timed operation, used by the fidelity product.
    #[serde(skip)]
    operations: Vec<(String, usize)>,
    pub dark_plaquettes: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Other,
    Single,
    Two,
}

struct Scheduler {
    level: Vec<u64>,
    layers: Vec<Kind>,
}

impl Scheduler {
    fn place(&mut self, sites: &[usize], kind: Kind) {
        if sites.is_empty() {
            return;
        }
        let at = sites.iter().map(|&q| self.level[q]).max().unwrap_or(0);
        for &q in sites {
            self.level[q] = at + 1;
        }
        let at = at as usize;
        if self.layers.len() <= at {
            self.layers.resize(at + 1, Kind::Other);
        }
        self.layers[at] = self.layers[at].max(kind);
    }
}

fn kind_of(arity: usize) -> Kind {
    if arity >= 2 {
        Kind::Two
    } else {
        Kind::Single
    }
}

fn tally_steps(steps: &[Step], tally: &mut Tally, mut each: impl FnMut(&str, usize, &[usize], Kind)) {
    for step in steps {
        match step {
            Step::Gate { gate, targets } => {
                tally.add(gate, targets.len());
                each(gate, targets.len(), targets, kind_of(targets.len()));
            }
            Step::Move { gate, targets } => {
                tally.add(gate, 2);
                each(gate, 2, targets, Kind::Two);
            }
            Step::Pauli { pauli, .. } => {
                for q in pauli.support() {
                    tally.add(PAULI_KEY, 1);
                    each(PAULI_KEY, 1, &[q], Kind::Single);
                }
            }
            Step::Postselect { pauli, .. } => {
                tally.add(POSTSELECT_KEY, 0);
                each(POSTSELECT_KEY, 0, &pauli.support(), Kind::Other);
            }
            Step::Rotate { rotation } => {
                tally.add(ROTATE_KEY, 0);
                each(ROTATE_KEY, 0, &rotation.lambda.support(), Kind::Other);
            }
            Step::Readout { .. } => tally.add(READOUT_KEY, 0),
        }
    }
}

/// Exact counts and depth from a replay of `protocol`.
pub fn count_resources(protocol: &Protocol) -> ResourceReport {
    let mut tally = Tally::default();
    let mut sched = Scheduler { level: vec![0; protocol.qudits], layers: Vec::new() };
    let mut operations = Vec::new();
    tally_steps(&protocol.steps, &mut tally, |name, arity, sites, kind| {
        sched.place(sites, kind);
        if kind != Kind::Other {
            operations.push((name.to_string(), arity));
        }
    });
    let fragments = protocol
        .fragments
        .iter()
        .map(|f| {
            let mut t = Tally::default();
            tally_steps(&protocol.steps[f.start..f.end], &mut t, |_, _, _, _| {});
            FragmentTally { name: f.name.clone(), tally: t }
        })
        .collect();
    let mut layers = LayerProfile::default();
    for k in &sched.layers {
        match k {
            Kind::Two => layers.two_qudit += 1,
            Kind::Single => layers.single_qudit += 1,
            Kind::Other => layers.other += 1,
        }
    }
    let dark_plaquettes = protocol
        .lattice
        .build()
        .map(|l| l.plaquettes().iter().filter(|p| p.color == Color::Dark && p.kind != PlaquetteKind::Boundary).count())
        .unwrap_or(0);
    ResourceReport {
        protocol: protocol.name.clone(),
        tally,
        depth: sched.layers.len() as u64,
        layers,
        fragments,
        operations,
        dark_plaquettes,
    }
}

impl ResourceReport {
    /// Sum of the per-fragment tallies.
    pub fn fragment_total(&self) -> Tally {
        let mut t = Tally::default();
        for f in &self.fragments {
            t.merge(&f.tally);
        }
        t
    }
}

/// Per-gate fidelity needed for `n_gates` gates to reach `target` together.
pub fn fidelity_threshold(target: f64, n_gates: u64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Config(format!("target fidelity must lie in (0, 1), got {target}")));
    }
    if n_gates == 0 {
        return Err(Error::Config("fidelity threshold needs at least one gate".into()));
    }
    Ok(target.powf(1.0 / n_gates as f64))
}

pub fn fidelity_product(per_gate: f64, n_gates: u64) -> f64 {
    per_gate.powf(n_gates as f64)
}

/// Protocol duration range in ns under the layer-synchronous schedule.
pub fn duration_ns(report: &ResourceReport, model: &GateCostModel) -> Range {
    let l = &report.layers;
    let d = &model.duration_ns;
    [0, 1].map(|i| l.two_qudit as f64 * d.two_qudit[i] + l.single_qudit as f64 * d.single_qudit[i])
}

/// Protocol duration over `min(T₁, T₂)`, for the fastest and slowest gates.
pub fn coherence_margin(report: &ResourceReport, model: &GateCostModel) -> Range {
    let t = model.min_coherence_us() * 1e3;
    duration_ns(report, model).map(|ns| ns / t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    WholeProtocol,
    PerPlaquette,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub scope: Scope,
    /// Two-qudit gates in scope; per plaquette this is an average over dark plaquettes.
    pub two_qudit_gates: f64,
    /// Product over every timed gate in scope.
    pub fidelity: f64,
    /// Product over the two-qudit gates in scope.
    pub two_qudit_fidelity: f64,
    pub target: f64,
    /// Uniform two-qudit fidelity reaching `target`; `None` without two-qudit gates.
    pub required_two_qudit_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub report: ResourceReport,
    pub fidelity: Vec<FidelityEstimate>,
    pub duration_ns: Range,
    pub min_coherence_us: f64,
    pub coherence_margin: Range,
    /// Post-selections and rotations carry no duration or error in the model.
    pub untimed_operations: u64,
}

/// Fidelity, duration and coherence figures for `report` under `model`.
pub fn assess(report: &ResourceReport, model: &GateCostModel, target: f64) -> Result<Assessment> {
    let mut all = 1.0;
    let mut two = 1.0;
    for (name, arity) in &report.operations {
        let f = model.gate_fidelity(name, *arity);
        all *= f;
        if *arity >= 2 {
            two *= f;
        }
    }
    let n2 = report.tally.two_qudit;
    let whole = FidelityEstimate {
        scope: Scope::WholeProtocol,
        two_qudit_gates: n2 as f64,
        fidelity: all,
        two_qudit_fidelity: two,
        target,
        required_two_qudit_fidelity: (n2 > 0).then(|| fidelity_threshold(target, n2)).transpose()?,
    };
    let mut fidelity = vec![whole];
    if report.dark_plaquettes > 0 {
        let k = report.dark_plaquettes as f64;
        let per = n2 as f64 / k;
        let required = if per > 0.0 {
            if !(target > 0.0 && target < 1.0) {
                return Err(Error::Config(format!("target fidelity must lie in (0, 1), got {target}")));
            }
            Some(target.powf(1.0 / per))
        } else {
            None
        };
        fidelity.push(FidelityEstimate {
            scope: Scope::PerPlaquette,
            two_qudit_gates: per,
            fidelity: all.powf(1.0 / k),
            two_qudit_fidelity: two.powf(1.0 / k),
            target,
            required_two_qudit_fidelity: required,
        });
    }
    let untimed = report.tally.counts.get(POSTSELECT_KEY).copied().unwrap_or(0)
        + report.tally.counts.get(ROTATE_KEY).copied().unwrap_or(0);
    Ok(Assessment {
        report: report.clone(),
        fidelity,
        duration_ns: duration_ns(report, model),
        min_coherence_us: model.min_coherence_us(),
        coherence_margin: coherence_margin(report, model),
        untimed_operations: untimed,
    })
}
