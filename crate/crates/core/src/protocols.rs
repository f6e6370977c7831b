//! Experiment scripts: ground-state preparation, pair creation, defect moves,
//! fusion and full braiding, plus their execution on either backend.
//!
//! A [`Protocol`] is a flat list of [`Step`]s. Construction is pure and
//! tracks the deformed code in a [`Lattice`], so every move in a script is
//! known to keep the live stabilizers commuting. Execution runs the steps on
//! a [`Backend`] and returns exact readout distributions. Shots are then drawn
//! from those distributions with a counter-keyed RNG, see [`sample`].
//!
//! # Script text format
//!
//! One item per line, `#` starts a comment:
//!
//! ```text
//! protocol fusion
//! lattice 3 4 3 full-plaquettes-only
//! qudits 12
//! fragment prep
//! gate H q(0,1)
//! move Uv q(1,1) q(2,1)
//! pauli dyon | X1.Z2 @q(1,3)
//! postselect 0 | X1.Z2 @q(1,1)
//! rotate 0 1 1 | Z1 @q(1,1)
//! readout post.P(1,1) 1 | Z1 @q(1,1) * X1 @q(1,2) * Z2 @q(2,2) * X2 @q(2,1)
//! ```
//!
//! Sites use the Pauli text syntax; qudits past the grid (ancillas) are
//! written as plain indices. `fragment` opens a named block that runs to the
//! next `fragment` line.

use crate::deform::{
    conjugate_ops, find_parity_operator, pair_operators, register_measured_pair, retrace, walk_defect, MoveSet, MoveStep,
    PairHandle, ParityRotation,
};
use crate::error::{Error, Result};
use crate::gates::{GateMatrix, QutritLibrary};
use crate::lattice::{BoundaryMode, Color, Lattice, PlaquetteKind};
use crate::pauli::{GeneralizedPauli, SiteLabels};
use crate::statevector::StateVector;
use crate::tableau::{derive_clifford_action, CliffordAction, StabilizerTableau};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Probabilities below this are treated as zero when branching.
const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "qutrit")]
    pub d: u32,
    #[serde(default)]
    pub boundary_mode: BoundaryMode,
}

fn qutrit() -> u32 {
    3
}

impl LatticeSpec {
    pub fn new(rows: usize, cols: usize, d: u32, boundary_mode: BoundaryMode) -> Self {
        LatticeSpec { rows, cols, d, boundary_mode }
    }

    pub fn build(&self) -> Result<Lattice> {
        Lattice::new(self.rows, self.cols, self.d, self.boundary_mode)
    }

    fn of(l: &Lattice) -> Self {
        LatticeSpec::new(l.rows(), l.cols(), l.dim(), l.boundary_mode())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Step {
    /// A library gate; for controlled gates the control comes first.
    Gate { gate: String, targets: Vec<usize> },
    /// A code-deformation gate (`Uv`, `Uh` or an adjoint) on `[i, j]`.
    Move { gate: String, targets: [usize; 2] },
    Pauli { label: String, pauli: GeneralizedPauli },
    /// Project onto the `ω^outcome` eigenspace of `pauli`.
    Postselect { outcome: u32, pauli: GeneralizedPauli },
    Rotate { rotation: ParityRotation },
    /// Non-destructive read of the charge distribution of `pauli`;
    /// the headline value is `⟨Π^lambda⟩`.
    Readout { label: String, lambda: u32, pauli: GeneralizedPauli },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub name: String,
    pub lattice: LatticeSpec,
    /// Grid qudits plus any ancillas.
    pub qudits: usize,
    pub steps: Vec<Step>,
    pub fragments: Vec<Fragment>,
}

impl Protocol {
    pub fn new(name: impl Into<String>, lattice: LatticeSpec, qudits: usize) -> Self {
        Protocol { name: name.into(), lattice, qudits, steps: Vec::new(), fragments: Vec::new() }
    }

    /// Open a fragment; it extends to the end until the next call.
    pub fn begin_fragment(&mut self, name: impl Into<String>) {
        let at = self.steps.len();
        if let Some(last) = self.fragments.last_mut() {
            last.end = at;
        }
        self.fragments.push(Fragment { name: name.into(), start: at, end: at });
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
        if let Some(last) = self.fragments.last_mut() {
            last.end = self.steps.len();
        }
    }

    pub fn extend(&mut self, other: &Protocol) {
        for f in &other.fragments {
            self.begin_fragment(f.name.clone());
            for s in &other.steps[f.start..f.end] {
                self.push(s.clone());
            }
        }
    }

    pub fn fragment(&self, name: &str) -> Option<&[Step]> {
        self.fragments.iter().find(|f| f.name == name).map(|f| &self.steps[f.start..f.end])
    }

    pub fn readouts(&self) -> impl Iterator<Item = (&str, u32, &GeneralizedPauli)> {
        self.steps.iter().filter_map(|s| match s {
            Step::Readout { label, lambda, pauli } => Some((label.as_str(), *lambda, pauli)),
            _ => None,
        })
    }

    fn site_text(&self, q: usize) -> String {
        let cols = self.lattice.cols;
        if q < self.lattice.rows * cols {
            format!("q({},{})", q / cols, q % cols)
        } else {
            q.to_string()
        }
    }

    fn labels(&self) -> SiteLabels {
        SiteLabels::Grid { cols: self.lattice.cols }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mode = match self.lattice.boundary_mode {
            BoundaryMode::FullPlaquettesOnly => "full-plaquettes-only",
            BoundaryMode::WithBoundaryStabilizers => "with-boundary-stabilizers",
        };
        let _ = writeln!(out, "protocol {}", self.name);
        let _ = writeln!(out, "lattice {} {} {} {mode}", self.lattice.rows, self.lattice.cols, self.lattice.d);
        let _ = writeln!(out, "qudits {}", self.qudits);
        let starts: BTreeMap<usize, Vec<&str>> = self.fragments.iter().fold(BTreeMap::new(), |mut m, f| {
            m.entry(f.start).or_insert_with(Vec::new).push(f.name.as_str());
            m
        });
        let labels = self.labels();
        for (i, step) in self.steps.iter().enumerate() {
            for name in starts.get(&i).into_iter().flatten() {
                let _ = writeln!(out, "fragment {name}");
            }
            let sites = |ts: &[usize]| ts.iter().map(|&q| self.site_text(q)).collect::<Vec<_>>().join(" ");
            let line = match step {
                Step::Gate { gate, targets } => format!("gate {gate} {}", sites(targets)),
                Step::Move { gate, targets } => format!("move {gate} {}", sites(targets)),
                Step::Pauli { label, pauli } => format!("pauli {label} | {}", pauli.to_text(labels)),
                Step::Postselect { outcome, pauli } => format!("postselect {outcome} | {}", pauli.to_text(labels)),
                Step::Rotate { rotation } => {
                    let e: Vec<String> = rotation.coeff_exps.iter().map(|e| e.to_string()).collect();
                    format!("rotate {} | {}", e.join(" "), rotation.lambda.to_text(labels))
                }
                Step::Readout { label, lambda, pauli } => {
                    format!("readout {label} {lambda} | {}", pauli.to_text(labels))
                }
            };
            out.push_str(&line);
            out.push('\n');
        }
        // fragments that start at the very end are empty
        for name in starts.get(&self.steps.len()).into_iter().flatten() {
            let _ = writeln!(out, "fragment {name}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut lattice = None;
        let mut qudits = None;
        let mut steps_raw: Vec<(usize, String)> = Vec::new();
        let mut frag_marks: Vec<(usize, String)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match head {
                "protocol" => name = Some(rest.to_string()),
                "lattice" => {
                    let f: Vec<&str> = rest.split_whitespace().collect();
                    if f.len() != 4 {
                        return Err(Error::parse_at(line_no, "expected 'lattice ROWS COLS D MODE'"));
                    }
                    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse_at(line_no, format!("bad number '{s}'")));
                    let mode = match f[3] {
                        "full-plaquettes-only" => BoundaryMode::FullPlaquettesOnly,
                        "with-boundary-stabilizers" => BoundaryMode::WithBoundaryStabilizers,
                        m => return Err(Error::parse_at(line_no, format!("unknown boundary mode '{m}'"))),
                    };
                    lattice = Some(LatticeSpec::new(num(f[0])?, num(f[1])?, num(f[2])? as u32, mode));
                }
                "qudits" => {
                    qudits = Some(rest.parse::<usize>().map_err(|_| Error::parse_at(line_no, "bad qudit count"))?)
                }
                "fragment" => frag_marks.push((steps_raw.len(), rest.to_string())),
                _ => steps_raw.push((line_no, line.to_string())),
            }
        }
        let lattice = lattice.ok_or_else(|| Error::parse("missing 'lattice' line"))?;
        let mut p = Protocol::new(
            name.ok_or_else(|| Error::parse("missing 'protocol' line"))?,
            lattice,
            qudits.unwrap_or(lattice.rows * lattice.cols),
        );
        let mut marks = frag_marks.into_iter().peekable();
        for (i, (line_no, line)) in steps_raw.iter().enumerate() {
            while let Some((_, n)) = marks.next_if(|(at, _)| *at == i) {
                p.begin_fragment(n);
            }
            let step = p.parse_step(line).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::parse_at(*line_no, msg),
                other => other,
            })?;
            p.push(step);
        }
        for (_, n) in marks {
            p.begin_fragment(n);
        }
        Ok(p)
    }

    fn parse_site(&self, s: &str) -> Result<usize> {
        let q = GeneralizedPauli::parse(&format!("X1 @{s}"), self.lattice.d, self.labels())?
            .support()
            .first()
            .copied()
            .ok_or_else(|| Error::parse(format!("bad site '{s}'")))?;
        if q >= self.qudits {
            return Err(Error::parse(format!("site '{s}' is beyond the {} qudits", self.qudits)));
        }
        Ok(q)
    }

    fn parse_step(&self, line: &str) -> Result<Step> {
        let (lhs, pauli) = match line.split_once('|') {
            Some((l, r)) => (l.trim(), Some(GeneralizedPauli::parse(r, self.lattice.d, self.labels())?)),
            None => (line, None),
        };
        let f: Vec<&str> = lhs.split_whitespace().collect();
        let need_pauli = || pauli.clone().ok_or_else(|| Error::parse(format!("'{}' needs '| <pauli>'", f[0])));
        let num = |s: &str| s.parse::<u32>().map_err(|_| Error::parse(format!("bad number '{s}'")));
        Ok(match f[0] {
            "gate" if f.len() >= 3 => Step::Gate {
                gate: f[1].to_string(),
                targets: f[2..].iter().map(|s| self.parse_site(s)).collect::<Result<_>>()?,
            },
            "move" if f.len() == 4 => {
                Step::Move { gate: f[1].to_string(), targets: [self.parse_site(f[2])?, self.parse_site(f[3])?] }
            }
            "pauli" if f.len() == 2 => Step::Pauli { label: f[1].to_string(), pauli: need_pauli()? },
            "postselect" if f.len() == 2 => Step::Postselect { outcome: num(f[1])?, pauli: need_pauli()? },
            "rotate" if f.len() == 1 + self.lattice.d as usize => Step::Rotate {
                rotation: ParityRotation {
                    lambda: need_pauli()?,
                    coeff_exps: f[1..].iter().map(|s| num(s)).collect::<Result<_>>()?,
                },
            },
            "readout" if f.len() == 3 => {
                Step::Readout { label: f[1].to_string(), lambda: num(f[2])?, pauli: need_pauli()? }
            }
            _ => return Err(Error::parse(format!("unrecognised step '{line}'"))),
        })
    }
}

/// A gate resolved for both backends.
#[derive(Debug, Clone)]
pub struct ResolvedGate {
    pub matrix: GateMatrix,
    pub action: CliffordAction,
}

/// Named gates used by scripts, with their Clifford tables.
#[derive(Debug, Clone)]
pub struct GateBook {
    gates: BTreeMap<String, ResolvedGate>,
    moves: MoveSet,
}

/// Every gate name a script may use.
pub const GATE_NAMES: [&str; 14] =
    ["H", "H†", "K", "Z", "Z†", "CZ", "CZ†", "CX", "CX†", "Uv", "Uv†", "Uh", "Uh†", "SWAP"];

impl GateBook {
    pub fn new(lib: &QutritLibrary) -> Result<Self> {
        let mut gates = BTreeMap::new();
        for name in GATE_NAMES {
            let matrix = lib.get(name).ok_or_else(|| Error::Config(format!("gate '{name}' missing")))?;
            let action = derive_clifford_action(&matrix)?;
            gates.insert(name.to_string(), ResolvedGate { matrix, action });
        }
        Ok(GateBook { gates, moves: MoveSet::new(lib)? })
    }

    pub fn build() -> Result<Self> {
        Self::new(&QutritLibrary::build()?)
    }

    pub fn get(&self, name: &str) -> Result<&ResolvedGate> {
        self.gates.get(name).ok_or_else(|| Error::Config(format!("unknown gate '{name}'")))
    }

    pub fn moves(&self) -> &MoveSet {
        &self.moves
    }
}

/// Operations a simulator must support to run a [`Protocol`].
pub trait Backend {
    fn name(&self) -> &'static str;
    fn apply_gate(&mut self, gate: &ResolvedGate, targets: &[usize]) -> Result<()>;
    fn apply_pauli(&mut self, p: &GeneralizedPauli) -> Result<()>;
    fn postselect(&mut self, p: &GeneralizedPauli, outcome: u32) -> Result<f64>;
    fn rotate(&mut self, r: &ParityRotation) -> Result<()>;
    /// `P(ω^k)` for `k = 0..d`.
    fn outcome_probabilities(&self, p: &GeneralizedPauli) -> Result<Vec<f64>>;
    fn boxed_clone(&self) -> Box<dyn Backend>;
}

impl Backend for StabilizerTableau {
    fn name(&self) -> &'static str {
        "tableau"
    }
    fn apply_gate(&mut self, gate: &ResolvedGate, targets: &[usize]) -> Result<()> {
        self.apply_clifford(&gate.action, targets)
    }
    fn apply_pauli(&mut self, p: &GeneralizedPauli) -> Result<()> {
        StabilizerTableau::apply_pauli(self, p)
    }
    fn postselect(&mut self, p: &GeneralizedPauli, outcome: u32) -> Result<f64> {
        StabilizerTableau::postselect(self, p, outcome)
    }
    fn rotate(&mut self, r: &ParityRotation) -> Result<()> {
        r.apply_tableau(self)
    }
    fn outcome_probabilities(&self, p: &GeneralizedPauli) -> Result<Vec<f64>> {
        StabilizerTableau::outcome_probabilities(self, p)
    }
    fn boxed_clone(&self) -> Box<dyn Backend> {
        Box::new(self.clone())
    }
}

impl Backend for StateVector {
    fn name(&self) -> &'static str {
        "statevector"
    }
    fn apply_gate(&mut self, gate: &ResolvedGate, targets: &[usize]) -> Result<()> {
        StateVector::apply_gate(self, &gate.matrix, targets)
    }
    fn apply_pauli(&mut self, p: &GeneralizedPauli) -> Result<()> {
        StateVector::apply_pauli(self, p)
    }
    fn postselect(&mut self, p: &GeneralizedPauli, outcome: u32) -> Result<f64> {
        StateVector::postselect(self, p, outcome)
    }
    fn rotate(&mut self, r: &ParityRotation) -> Result<()> {
        r.apply_statevector(self)
    }
    fn outcome_probabilities(&self, p: &GeneralizedPauli) -> Result<Vec<f64>> {
        StateVector::outcome_probabilities(self, p)
    }
    fn boxed_clone(&self) -> Box<dyn Backend> {
        Box::new(self.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Tableau,
    Statevector,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Tableau => "tableau",
            BackendKind::Statevector => "statevector",
        }
    }

    /// Fresh all-zero state for `protocol`.
    pub fn init(self, protocol: &Protocol) -> Result<Box<dyn Backend>> {
        let (n, d) = (protocol.qudits, protocol.lattice.d);
        Ok(match self {
            BackendKind::Tableau => Box::new(StabilizerTableau::new(n, d)?),
            BackendKind::Statevector => Box::new(StateVector::zero(d, n)?),
        })
    }
}

/// Exact outcome of one readout step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutValue {
    pub label: String,
    pub lambda: u32,
    pub operator: String,
    /// `⟨Π^k⟩` for `k = 0..d`.
    pub distribution: Vec<f64>,
}

impl ReadoutValue {
    pub fn value(&self) -> f64 {
        self.distribution[self.lambda as usize]
    }
}

/// Joint outcome distribution of a run of consecutive readouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutBlock {
    pub readouts: Vec<usize>,
    pub outcomes: Vec<(Vec<u32>, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub postselect_probabilities: Vec<f64>,
    pub readouts: Vec<ReadoutValue>,
    pub blocks: Vec<ReadoutBlock>,
}

impl Execution {
    pub fn joint_postselect_probability(&self) -> f64 {
        self.postselect_probabilities.iter().product()
    }

    pub fn readout(&self, label: &str) -> Option<&ReadoutValue> {
        self.readouts.iter().find(|r| r.label == label)
    }
}

fn joint_distribution(
    state: &dyn Backend,
    ops: &[&GeneralizedPauli],
    prefix: &mut Vec<u32>,
    weight: f64,
    out: &mut Vec<(Vec<u32>, f64)>,
) -> Result<()> {
    let Some((first, rest)) = ops.split_first() else {
        out.push((prefix.clone(), weight));
        return Ok(());
    };
    let probs = state.outcome_probabilities(first)?;
    // a certain outcome leaves the state unchanged, so skip the copy
    if let Some(k) = probs.iter().position(|&p| p >= 1.0 - PROB_FLOOR) {
        prefix.push(k as u32);
        joint_distribution(state, rest, prefix, weight, out)?;
        prefix.pop();
        return Ok(());
    }
    for (k, p) in probs.into_iter().enumerate() {
        if p < PROB_FLOOR {
            continue;
        }
        let mut branch = state.boxed_clone();
        branch.postselect(first, k as u32)?;
        prefix.push(k as u32);
        joint_distribution(branch.as_ref(), rest, prefix, weight * p, out)?;
        prefix.pop();
    }
    Ok(())
}

/// Run `protocol` on `state`, which must start in the all-zero state.
pub fn execute(protocol: &Protocol, book: &GateBook, state: &mut dyn Backend) -> Result<Execution> {
    let mut exec = Execution { postselect_probabilities: Vec::new(), readouts: Vec::new(), blocks: Vec::new() };
    let labels = protocol.labels();
    let mut i = 0;
    while i < protocol.steps.len() {
        match &protocol.steps[i] {
            Step::Gate { gate, targets } => state.apply_gate(book.get(gate)?, targets)?,
            Step::Move { gate, targets } => state.apply_gate(book.get(gate)?, targets)?,
            Step::Pauli { pauli, .. } => state.apply_pauli(pauli)?,
            Step::Postselect { outcome, pauli } => exec.postselect_probabilities.push(state.postselect(pauli, *outcome)?),
            Step::Rotate { rotation } => state.rotate(rotation)?,
            Step::Readout { .. } => {
                let mut ops = Vec::new();
                let mut idx = Vec::new();
                while let Some(Step::Readout { label, lambda, pauli }) = protocol.steps.get(i) {
                    idx.push(exec.readouts.len());
                    exec.readouts.push(ReadoutValue {
                        label: label.clone(),
                        lambda: *lambda,
                        operator: pauli.to_text(labels),
                        distribution: vec![0.0; protocol.lattice.d as usize],
                    });
                    ops.push(pauli);
                    i += 1;
                }
                let mut outcomes = Vec::new();
                joint_distribution(&*state, &ops, &mut Vec::new(), 1.0, &mut outcomes)?;
                // marginals of the joint distribution
                for (ks, w) in &outcomes {
                    for (&r, &k) in idx.iter().zip(ks) {
                        exec.readouts[r].distribution[k as usize] += w;
                    }
                }
                exec.blocks.push(ReadoutBlock { readouts: idx, outcomes });
                continue;
            }
        }
        i += 1;
    }
    Ok(exec)
}

/// Per-readout outcome counts from seeded trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub shots: u64,
    pub attempts: u64,
    /// `counts[r][k]`: trials where readout `r` gave `ω^k`.
    pub counts: Vec<Vec<u64>>,
}

fn draw(rng: &mut ChaCha8Rng, weights: impl Iterator<Item = f64>, total: f64) -> Option<usize> {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (k, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(k);
        if u < acc {
            return last;
        }
    }
    last
}

/// Draw `shots` independent realisations of `exec`.
///
/// Trial `t` uses a ChaCha8 stream keyed by `(seed, t)`, so results do not
/// depend on thread count. A trial repeats until every post-selection
/// succeeds; the attempts of all trials together may not exceed `retry_cap`.
pub fn sample(exec: &Execution, d: u32, shots: u64, seed: u64, retry_cap: u64) -> Result<SampleSummary> {
    let ps = &exec.postselect_probabilities;
    let trial = |t: u64| -> Result<(u64, Vec<u32>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let mut attempts = 0u64;
        loop {
            attempts += 1;
            if attempts > retry_cap {
                return Err(Error::RetryExhausted { cap: retry_cap });
            }
            if ps.iter().all(|&p| p >= 1.0 - PROB_FLOOR || rng.random::<f64>() < p) {
                break;
            }
        }
        let mut outcome = vec![0u32; exec.readouts.len()];
        for block in &exec.blocks {
            let total: f64 = block.outcomes.iter().map(|(_, w)| w).sum();
            let k = draw(&mut rng, block.outcomes.iter().map(|(_, w)| *w), total).unwrap_or(0);
            for (&r, &v) in block.readouts.iter().zip(&block.outcomes[k].0) {
                outcome[r] = v;
            }
        }
        Ok((attempts, outcome))
    };
    let trials: Vec<(u64, Vec<u32>)> = (0..shots).into_par_iter().map(trial).collect::<Result<_>>()?;
    let attempts: u64 = trials.iter().map(|(a, _)| a).sum();
    if attempts > retry_cap {
        return Err(Error::RetryExhausted { cap: retry_cap });
    }
    let mut counts = vec![vec![0u64; d as usize]; exec.readouts.len()];
    for (_, outcome) in &trials {
        for (r, &k) in outcome.iter().enumerate() {
            counts[r][k as usize] += 1;
        }
    }
    Ok(SampleSummary { shots, attempts, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub label: String,
    pub operator: String,
    pub lambda: u32,
    pub analytic: f64,
    pub sampled_mean: f64,
    pub standard_error: f64,
    pub distribution: Vec<f64>,
    pub sampled_distribution: Vec<f64>,
}

impl Observable {
    /// `|sampled − analytic| ≤ k·σ`, with exact agreement required when σ = 0.
    pub fn within_sigma(&self, k: f64) -> bool {
        (self.sampled_mean - self.analytic).abs() <= k * self.standard_error + 1e-12
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostselectionReport {
    pub step_probabilities: Vec<f64>,
    pub joint_probability: f64,
    pub attempts: u64,
    pub empirical_success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub protocol: String,
    pub backend: String,
    pub lattice: LatticeSpec,
    pub qudits: usize,
    pub seed: u64,
    pub shots: u64,
    pub postselection: PostselectionReport,
    pub observables: Vec<Observable>,
}

impl ExperimentResult {
    pub fn observable(&self, label: &str) -> Option<&Observable> {
        self.observables.iter().find(|o| o.label == label)
    }
}

/// Execute `protocol` on `backend` and sample `shots` trials.
pub fn run_experiment(
    protocol: &Protocol,
    book: &GateBook,
    backend: BackendKind,
    shots: u64,
    seed: u64,
    retry_cap: u64,
) -> Result<(Execution, ExperimentResult)> {
    let mut state = backend.init(protocol)?;
    let exec = execute(protocol, book, state.as_mut())?;
    let samples = sample(&exec, protocol.lattice.d, shots, seed, retry_cap)?;
    let n = shots as f64;
    let observables = exec
        .readouts
        .iter()
        .zip(&samples.counts)
        .map(|(r, counts)| {
            let hits = counts[r.lambda as usize] as f64;
            let mean = hits / n;
            // standard error of a Bernoulli mean
            let se = if shots > 1 { (mean * (1.0 - mean) / (n - 1.0)).sqrt() } else { 0.0 };
            Observable {
                label: r.label.clone(),
                operator: r.operator.clone(),
                lambda: r.lambda,
                analytic: r.value(),
                sampled_mean: mean,
                standard_error: se,
                distribution: r.distribution.clone(),
                sampled_distribution: counts.iter().map(|&c| c as f64 / n).collect(),
            }
        })
        .collect();
    let result = ExperimentResult {
        protocol: protocol.name.clone(),
        backend: backend.name().to_string(),
        lattice: protocol.lattice,
        qudits: protocol.qudits,
        seed,
        shots,
        postselection: PostselectionReport {
            step_probabilities: exec.postselect_probabilities.clone(),
            joint_probability: exec.joint_postselect_probability(),
            attempts: samples.attempts,
            empirical_success_rate: shots as f64 / samples.attempts as f64,
        },
        observables,
    };
    Ok((exec, result))
}

/// Plaquette label `P(r,c)`.
pub fn plaquette_label(l: &Lattice, id: usize) -> String {
    let (r, c) = l.plaquette(id).anchor;
    format!("P({r},{c})")
}

/// `Π^0` readouts of every plaquette.
pub fn ground_state_readouts(l: &Lattice, prefix: &str) -> Vec<Step> {
    (0..l.plaquettes().len())
        .map(|id| Step::Readout { label: format!("{prefix}{}", plaquette_label(l, id)), lambda: 0, pauli: l.stabilizer(id) })
        .collect()
}

fn check_ground_state(l: &Lattice, book: &GateBook, p: &Protocol) -> Result<()> {
    let mut t = StabilizerTableau::new(p.qudits, l.dim())?;
    execute(p, book, &mut t)?;
    for s in l.live_stabilizers() {
        if t.expectation_phase(&s.op)? != Some(0) {
            return Err(Error::Synthesis(format!("stabilizer {} is not fixed to 1", s.label)));
        }
    }
    Ok(())
}

/// Unitary preparation of the plaquette ground state from `|0…0⟩`.
///
/// Light plaquettes need their X-type corners (NE, SW) in the X eigenbasis,
/// so those qudits get an `H`. Each dark plaquette then uses its NE corner as
/// a control: `H` on it, followed by `CZ†→NW`, `CZ→SE`, `CX→SW`. Dark
/// plaquettes are processed in reverse raster order, which keeps every
/// control untouched until its own gates fire. The result is checked on a
/// tableau and a failure is a [`Error::Synthesis`] error.
///
/// Truncated boundary stabilizers are not covered: dark ones on the top row
/// and right column lack the NE control. Use measurement preparation there.
pub fn prep_ground_state_circuit(l: &Lattice, book: &GateBook) -> Result<Protocol> {
    if l.boundary_mode() == BoundaryMode::WithBoundaryStabilizers {
        return Err(Error::Synthesis(
            "the preparation circuit covers full plaquettes only; use measurement preparation with boundary stabilizers"
                .into(),
        ));
    }
    let mut p = Protocol::new("prep-circuit", LatticeSpec::of(l), l.num_qudits());
    p.begin_fragment("prep");
    let normal = |c: Color| {
        l.plaquettes().iter().filter(move |pl| pl.color == c && pl.kind != PlaquetteKind::Boundary)
    };
    let mut light_x: Vec<usize> = normal(Color::Light).flat_map(|pl| [pl.corners[1], pl.corners[3]]).flatten().collect();
    light_x.sort_unstable();
    light_x.dedup();
    for q in light_x {
        p.push(Step::Gate { gate: "H".into(), targets: vec![q] });
    }
    let dark: Vec<_> = normal(Color::Dark).collect();
    for pl in &dark {
        let ctrl = pl.corners[1].ok_or_else(|| Error::Synthesis("dark plaquette without NE corner".into()))?;
        p.push(Step::Gate { gate: "H".into(), targets: vec![ctrl] });
    }
    for pl in dark.iter().rev() {
        let ctrl = pl.corners[1].expect("checked above");
        for (gate, slot) in [("CZ†", 0), ("CZ", 2), ("CX", 3)] {
            let t = pl.corners[slot].ok_or_else(|| Error::Synthesis("dark plaquette corner missing".into()))?;
            p.push(Step::Gate { gate: gate.into(), targets: vec![ctrl, t] });
        }
    }
    check_ground_state(l, book, &p)?;
    Ok(p)
}

/// Preparation by projecting each plaquette with a Hadamard test.
///
/// A single ancilla (the qudit after the grid) is reused: `H`, controlled
/// corner Paulis, `H`, then post-selection of `Z_anc` on `ω^0`, which also
/// resets the ancilla to `|0⟩`.
pub fn prep_ground_state_measurement(l: &Lattice, book: &GateBook) -> Result<Protocol> {
    let anc = l.num_qudits();
    let mut p = Protocol::new("prep-measurement", LatticeSpec::of(l), anc + 1);
    p.begin_fragment("prep");
    for s in l.live_stabilizers() {
        p.push(Step::Gate { gate: "H".into(), targets: vec![anc] });
        for (q, op) in s.op.sites() {
            let gate = match (op.x, op.z) {
                (0, 1) => "CZ",
                (0, 2) => "CZ†",
                (1, 0) => "CX",
                (2, 0) => "CX†",
                _ => return Err(Error::Synthesis(format!("corner operator of {} is not a single X or Z power", s.label))),
            };
            p.push(Step::Gate { gate: gate.into(), targets: vec![anc, q] });
        }
        p.push(Step::Gate { gate: "H".into(), targets: vec![anc] });
        p.push(Step::Postselect { outcome: 0, pauli: GeneralizedPauli::z(l.dim(), anc) });
    }
    check_ground_state(l, book, &p)?;
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PrepMethod {
    #[default]
    Circuit,
    Measurement,
}

/// Incremental script construction that keeps the deformed code in sync.
pub struct ProtocolBuilder<'a> {
    pub lattice: Lattice,
    pub protocol: Protocol,
    book: &'a GateBook,
}

impl<'a> ProtocolBuilder<'a> {
    pub fn new(name: &str, lattice: Lattice, book: &'a GateBook) -> Self {
        let protocol = Protocol::new(name, LatticeSpec::of(&lattice), lattice.num_qudits());
        ProtocolBuilder { lattice, protocol, book }
    }

    pub fn prep(&mut self, method: PrepMethod) -> Result<()> {
        let frag = match method {
            PrepMethod::Circuit => prep_ground_state_circuit(&self.lattice, self.book)?,
            PrepMethod::Measurement => prep_ground_state_measurement(&self.lattice, self.book)?,
        };
        self.protocol.qudits = self.protocol.qudits.max(frag.qudits);
        self.protocol.extend(&frag);
        Ok(())
    }

    pub fn fragment(&mut self, name: &str) {
        self.protocol.begin_fragment(name);
    }

    /// Measure `a` and `b` (top-to-bottom or left-to-right neighbours) and
    /// post-select both on `ω^0`; the code is rewritten around the new pair.
    pub fn create_pair(&mut self, a: (usize, usize), b: (usize, usize), tag: &str) -> Result<PairHandle> {
        for m in pair_operators(&self.lattice, a, b)? {
            self.protocol.push(Step::Postselect { outcome: 0, pauli: m });
        }
        register_measured_pair(&mut self.lattice, a, b, tag)
    }

    fn push_moves(&mut self, steps: &[MoveStep]) {
        for s in steps {
            self.protocol.push(Step::Move { gate: s.gate.clone(), targets: s.targets });
        }
    }

    /// Walk one end of a dislocation along `path` (one cell per step).
    pub fn walk(&mut self, dislocation: usize, end: usize, path: &[(usize, usize)]) -> Result<Vec<MoveStep>> {
        let steps = walk_defect(&mut self.lattice, self.book.moves(), dislocation, end, path)?;
        self.push_moves(&steps);
        Ok(steps)
    }

    /// Undo `steps` of a walk, returning the defect to `origin`.
    pub fn retrace(&mut self, dislocation: usize, end: usize, steps: &[MoveStep], origin: (usize, usize)) -> Result<()> {
        let inv = retrace(&mut self.lattice, self.book.moves(), dislocation, end, steps, origin)?;
        self.push_moves(&inv);
        Ok(())
    }

    /// Apply a fixed two-qudit deformation gate and conjugate the code with it.
    pub fn literal_move(&mut self, gate: &str, i: usize, j: usize) -> Result<()> {
        let action = &self.book.get(gate)?.action;
        self.lattice.conjugate(action, &[i, j]);
        self.protocol.push(Step::Move { gate: gate.into(), targets: [i, j] });
        Ok(())
    }

    pub fn pauli(&mut self, label: &str, p: GeneralizedPauli) {
        self.protocol.push(Step::Pauli { label: label.into(), pauli: p });
    }

    pub fn rotate(&mut self, r: ParityRotation) {
        self.protocol.push(Step::Rotate { rotation: r });
    }

    pub fn readout(&mut self, label: impl Into<String>, lambda: u32, p: GeneralizedPauli) {
        self.protocol.push(Step::Readout { label: label.into(), lambda, pauli: p });
    }

    pub fn finish(self) -> Protocol {
        self.protocol
    }
}

/// Which fusion script to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FusionVariant {
    /// `e·m̄` dyon, expect `Π^1_p = Π^{d−1}_{p′} = 1` after fusion.
    #[default]
    Standard,
    /// `ē·m` dyon, conjugate charges.
    Mirror,
    /// No dyon.
    Control,
}

/// Fixed coordinates of the 3×4 fusion script.
pub mod fusion_layout {
    /// Light plaquette `p` below the merged edge.
    pub const LIGHT: (i64, i64) = (1, 1);
    /// Dark plaquette `p′` above it.
    pub const DARK: (i64, i64) = (0, 1);
    /// Qudits of the vertical move `U_v(i, j)`.
    pub const MOVE: [(usize, usize); 2] = [(1, 1), (2, 1)];
    /// Boundary qudit carrying the `X Z†` dyon.
    pub const DYON: (usize, usize) = (1, 3);
}

/// Smallest completion `C` (weight ≤ 3, off the dyon site) such that `D·C`
/// commutes with `code` and has exponents `(want_p, want_q)` against `p`, `q`.
fn completion_string(
    l: &Lattice,
    code: &[GeneralizedPauli],
    dyon: &GeneralizedPauli,
    targets: [&GeneralizedPauli; 2],
    want: [u32; 2],
) -> Option<GeneralizedPauli> {
    let d = l.dim() as usize;
    let sites: Vec<usize> = (0..l.num_qudits()).filter(|q| !dyon.support().contains(q)).collect();
    let per_site = d * d - 1;
    let fits = |s: &GeneralizedPauli| {
        code.iter().all(|g| g.commutes_with(s))
            && targets.iter().zip(want).all(|(t, w)| t.commutation_exponent(s).ok() == Some(w))
    };
    for w in 1..=3usize {
        let mut subset: Vec<usize> = (0..w).collect();
        loop {
            for code_word in 0..per_site.pow(w as u32) {
                let mut rest = code_word;
                let factors: Vec<(usize, i64, i64)> = subset
                    .iter()
                    .map(|&i| {
                        let v = rest % per_site + 1;
                        rest /= per_site;
                        (sites[i], (v / d) as i64, (v % d) as i64)
                    })
                    .collect();
                let c = GeneralizedPauli::from_factors(l.dim(), 0, factors);
                if fits(&dyon.mul(&c).ok()?) {
                    return Some(c);
                }
            }
            // next w-subset of the sites, lexicographic
            let n = sites.len();
            let Some(i) = (0..w).rev().find(|&i| subset[i] < n - w + i) else { break };
            subset[i] += 1;
            for j in i + 1..w {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }
    None
}

/// Fusion of a parafermion pair with an `e·m̄` dyon on 3×4.
///
/// The pair is the merged edge between dark `p′` and light `p`; merging is
/// pure bookkeeping on the ground state, so `O_p` and `O_{p′}` both stay at 1
/// and the pre-fusion readouts `Π^1_p`, `Π^{d−1}_{p′}` vanish. After a
/// vertical move the dyon is created at the boundary together with the
/// string that drags its charge around the moved defect; the move is then
/// undone and both readouts become 1.
pub fn fusion_experiment(book: &GateBook, variant: FusionVariant) -> Result<Protocol> {
    let l = Lattice::new(3, 4, 3, BoundaryMode::FullPlaquettesOnly)?;
    let name = match variant {
        FusionVariant::Standard => "fusion",
        FusionVariant::Mirror => "fusion-mirror",
        FusionVariant::Control => "fusion-control",
    };
    let mut b = ProtocolBuilder::new(name, l, book);
    b.prep(PrepMethod::Circuit)?;
    let lat = &b.lattice;
    let p = lat.plaquette_at(fusion_layout::LIGHT.0, fusion_layout::LIGHT.1).expect("3x4 has this plaquette");
    let p2 = lat.plaquette_at(fusion_layout::DARK.0, fusion_layout::DARK.1).expect("3x4 has this plaquette");
    let (op_p, op_p2) = (lat.stabilizer(p), lat.stabilizer(p2));
    let (lab_p, lab_p2) = (plaquette_label(lat, p), plaquette_label(lat, p2));
    let d = lat.dim();
    let (lam_p, lam_p2) = match variant {
        FusionVariant::Mirror => (d - 1, 1),
        _ => (1, d - 1),
    };
    let [i, j] = fusion_layout::MOVE.map(|(r, c)| lat.qudit(r, c));
    let dyon_site = lat.qudit(fusion_layout::DYON.0, fusion_layout::DYON.1);

    b.fragment("create");
    b.lattice.merge_plaquettes(p, p2)?;
    b.readout(format!("pre.{lab_p}"), lam_p, op_p.clone());
    b.readout(format!("pre.{lab_p2}"), lam_p2, op_p2.clone());

    b.fragment("move");
    b.literal_move("Uv", i, j)?;

    b.fragment("dyon");
    if variant != FusionVariant::Control {
        let moved = conjugate_ops(&[op_p.clone(), op_p2.clone()], &book.get("Uv")?.action, &[i, j]);
        let (mp, mp2) = (&moved[0], &moved[1]);
        let dyon = GeneralizedPauli::single(d, dyon_site, 1, -1);
        let code = b.lattice.live_ops();
        let string = completion_string(&b.lattice, &code, &dyon, [mp, mp2], [1, d - 1])
            .ok_or_else(|| Error::Lattice("no dyon string found for the fusion script".into()))?;
        let (dyon, string) = match variant {
            FusionVariant::Mirror => (dyon.adjoint(), string.adjoint()),
            _ => (dyon, string),
        };
        b.pauli("dyon", dyon);
        b.pauli("string", string);
    }

    b.fragment("move-back");
    b.literal_move("Uv†", i, j)?;

    b.fragment("readout");
    b.readout(format!("post.{lab_p}"), lam_p, op_p);
    b.readout(format!("post.{lab_p2}"), lam_p2, op_p2);
    Ok(b.finish())
}

/// Pair coordinates and legs for a braiding layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidLayout {
    /// Vertical pair `(γ1, γ2)`, upper qudit first; `γ2` is its lower defect.
    pub vertical: [(usize, usize); 2],
    /// Horizontal pair `(γ3, γ4)`, left qudit first; `γ3` is its left defect.
    pub horizontal: [(usize, usize); 2],
    /// Path of `γ3`, moving down.
    pub leg3: Vec<(usize, usize)>,
    /// Path of `γ2`, moving right.
    pub leg2: Vec<(usize, usize)>,
}

impl BraidLayout {
    /// Adjacent pairs with no legs; fits any lattice from 4×4 up.
    pub fn compact() -> Self {
        BraidLayout { vertical: [(0, 2), (1, 2)], horizontal: [(2, 0), (2, 1)], leg3: vec![], leg2: vec![] }
    }

    /// Distant pairs brought together by legs of the given lengths (at most 3
    /// each); needs at least 12×12.
    pub fn with_legs(leg3: usize, leg2: usize) -> Self {
        BraidLayout {
            vertical: [(3, 3), (4, 3)],
            horizontal: [(2, 8), (2, 9)],
            leg3: (3..3 + leg3.min(3)).map(|r| (r, 7)).collect(),
            leg2: (4..4 + leg2.min(3)).map(|c| (5, c)).collect(),
        }
    }

    /// The committed layout for a lattice size.
    pub fn for_lattice(rows: usize, cols: usize) -> Result<Self> {
        match (rows, cols) {
            (r, c) if r >= 12 && c >= 12 => Ok(Self::with_legs(3, 3)),
            (r, c) if r >= 4 && c >= 4 => Ok(Self::compact()),
            _ => Err(Error::Config(format!("braiding needs at least a 4x4 lattice, got {rows}x{cols}"))),
        }
    }
}

/// Full braid of `γ2` and `γ3`, or the no-braid control.
///
/// Both pairs are created by measurement, the legs bring `γ3` down and `γ2`
/// right, the double exchange `R(Λ)²` acts on the parity operator linking
/// them, and the legs are retraced. The channel operator of each pair is then
/// read out; after a braid each fusion channel has probability 1/d.
pub fn braiding_experiment(
    book: &GateBook,
    lattice: Lattice,
    layout: &BraidLayout,
    braid: bool,
) -> Result<Protocol> {
    let name = if braid { "braiding" } else { "braiding-control" };
    let mut b = ProtocolBuilder::new(name, lattice, book);
    b.prep(PrepMethod::Circuit)?;
    b.fragment("create");
    let a = b.create_pair(layout.vertical[0], layout.vertical[1], "A")?;
    let h = b.create_pair(layout.horizontal[0], layout.horizontal[1], "B")?;
    let origin3 = b.lattice.dislocations()[h.dislocation].parafermion_positions[0];
    let origin2 = b.lattice.dislocations()[a.dislocation].parafermion_positions[1];
    b.fragment("legs");
    let s3 = b.walk(h.dislocation, 0, &layout.leg3)?;
    let s2 = b.walk(a.dislocation, 1, &layout.leg2)?;
    let g3 = b.lattice.dislocations()[h.dislocation].parafermion_positions[0];
    let g2 = b.lattice.dislocations()[a.dislocation].parafermion_positions[1];
    b.fragment("exchange");
    if braid {
        let channels = [a.channel_label.as_str(), h.channel_label.as_str()]
            .map(|lab| b.lattice.live_index(lab).ok_or_else(|| Error::Lattice(format!("channel {lab} lost"))));
        let channels = [channels[0].clone()?, channels[1].clone()?];
        let lambda = find_parity_operator(&b.lattice, &channels, &[g2, g3])
            .ok_or_else(|| Error::Lattice("no parity operator links the two pairs".into()))?;
        let r = ParityRotation::exchange(lambda);
        b.rotate(r.clone());
        b.rotate(r);
    }
    b.fragment("retrace");
    b.retrace(a.dislocation, 1, &s2, origin2)?;
    b.retrace(h.dislocation, 0, &s3, origin3)?;
    b.fragment("readout");
    for (handle, tag) in [(&a, "A"), (&h, "B")] {
        let idx = b
            .lattice
            .live_index(&handle.channel_label)
            .ok_or_else(|| Error::Lattice(format!("channel {} lost", handle.channel_label)))?;
        let op = b.lattice.live_stabilizers()[idx].op.clone();
        b.readout(format!("{tag}.channel"), 0, op);
    }
    Ok(b.finish())
}

/// Ground-state preparation followed by `Π^0` readouts of every plaquette.
pub fn prep_experiment(book: &GateBook, lattice: Lattice, method: PrepMethod) -> Result<Protocol> {
    let mut b = ProtocolBuilder::new(
        match method {
            PrepMethod::Circuit => "prep-circuit",
            PrepMethod::Measurement => "prep-measurement",
        },
        lattice,
        book,
    );
    b.prep(method)?;
    b.fragment("readout");
    for s in ground_state_readouts(&b.lattice, "") {
        b.protocol.push(s);
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    pub(crate) fn book() -> &'static GateBook {
        static BOOK: OnceLock<GateBook> = OnceLock::new();
        BOOK.get_or_init(|| GateBook::build().unwrap())
    }

    #[test]
    fn circuit_prep_fixes_every_plaquette() {
        for (r, c) in [(3, 4), (4, 4), (5, 6)] {
            let l = Lattice::new(r, c, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
            let p = prep_experiment(book(), l, PrepMethod::Circuit).unwrap();
            let mut t = StabilizerTableau::new(p.qudits, 3).unwrap();
            let ex = execute(&p, book(), &mut t).unwrap();
            assert!(ex.readouts.iter().all(|r| r.value() == 1.0));
        }
    }

    #[test]
    fn script_text_round_trips() {
        let p = fusion_experiment(book(), FusionVariant::Standard).unwrap();
        let text = p.to_text();
        let back = Protocol::parse(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "protocol x\nlattice 3 4 3 full-plaquettes-only\ngate H q(0,0)\nbogus 1\n";
        match Protocol::parse(text) {
            Err(Error::Parse { line: Some(4), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fusion_signatures() {
        for (variant, pre, post) in
            [(FusionVariant::Standard, 0.0, 1.0), (FusionVariant::Mirror, 0.0, 1.0), (FusionVariant::Control, 0.0, 0.0)]
        {
            let p = fusion_experiment(book(), variant).unwrap();
            let mut t = StabilizerTableau::new(p.qudits, 3).unwrap();
            let ex = execute(&p, book(), &mut t).unwrap();
            for r in &ex.readouts {
                let want = if r.label.starts_with("pre.") { pre } else { post };
                assert_eq!(r.value(), want, "{variant:?} {}", r.label);
            }
        }
    }

    #[test]
    fn braid_and_control_on_4x4() {
        for braid in [true, false] {
            let l = Lattice::new(4, 4, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
            let p = braiding_experiment(book(), l, &BraidLayout::compact(), braid).unwrap();
            let mut t = StabilizerTableau::new(p.qudits, 3).unwrap();
            let ex = execute(&p, book(), &mut t).unwrap();
            let want = if braid { 1.0 / 3.0 } else { 1.0 };
            for r in &ex.readouts {
                assert!((r.value() - want).abs() < 1e-12, "{}", r.label);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_thread_independent() {
        let l = Lattice::new(4, 4, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        let p = braiding_experiment(book(), l, &BraidLayout::compact(), true).unwrap();
        let (_, a) = run_experiment(&p, book(), BackendKind::Tableau, 500, 7, 1_000_000).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let (_, b) = pool.install(|| run_experiment(&p, book(), BackendKind::Tableau, 500, 7, 1_000_000)).unwrap();
        assert_eq!(a, b);
        assert!(a.observables.iter().all(|o| o.within_sigma(5.0)));
    }

    #[test]
    fn retry_cap_is_enforced() {
        let l = Lattice::new(4, 4, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        let p = braiding_experiment(book(), l, &BraidLayout::compact(), false).unwrap();
        let err = run_experiment(&p, book(), BackendKind::Tableau, 100, 1, 50).unwrap_err();
        assert_eq!(err, Error::RetryExhausted { cap: 50 });
    }
}
