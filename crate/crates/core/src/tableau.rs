//! Stabilizer tableau over ℤ_d.
//!
//! The state is described by `n` commuting generators `g_i` with
//! `g_i |ψ⟩ = |ψ⟩`. A measurement outcome `k` of an order-`d` Pauli `M` means
//! eigenvalue `ω^k`, after which `ω^{-k} M` is a stabilizer.

use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::modular::{self, inv, omega_pow, reduce};
use crate::pauli::{projector_weights, reduce_against, row_echelon, ChargeProjectorSpec, Column, GeneralizedPauli, SiteLabels};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use std::sync::OnceLock;

const PHASE_TOL: f64 = 1e-9;

/// Images of `X_t` and `Z_t` under `P ↦ U P U†` for the local sites `t` of a gate.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordAction {
    name: String,
    d: u32,
    arity: usize,
    images: Vec<[GeneralizedPauli; 2]>,
}

impl CliffordAction {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Image of `X_t` (`z = false`) or `Z_t` (`z = true`) on local sites.
    pub fn image(&self, t: usize, z: bool) -> &GeneralizedPauli {
        &self.images[t][z as usize]
    }

    /// Conjugate a Pauli supported on local sites `0..arity`.
    pub fn conjugate_local(&self, p: &GeneralizedPauli) -> GeneralizedPauli {
        let mut out = GeneralizedPauli::scalar(self.d, p.phase_exp() as i64);
        for (t, op) in p.sites() {
            out = out
                .mul_unchecked(&self.images[t][0].pow(op.x as i64))
                .mul_unchecked(&self.images[t][1].pow(op.z as i64));
        }
        out
    }

    /// The inverse action `P ↦ U† P U`.
    pub fn inverse(&self) -> CliffordAction {
        // U† X_t U is the local Pauli Q with U Q U† = X_t; search the image space.
        let d = self.d;
        let k = self.arity;
        let mut images = vec![[GeneralizedPauli::identity(d), GeneralizedPauli::identity(d)]; k];
        for q in all_paulis(d, k) {
            let img = self.conjugate_local(&q);
            if img.weight() != 1 {
                continue;
            }
            let (site, op) = img.sites().next().expect("weight one");
            let q = q.with_phase(-(img.phase_exp() as i64));
            match (op.x, op.z) {
                (1, 0) => images[site][0] = q,
                (0, 1) => images[site][1] = q,
                _ => {}
            }
        }
        let name = match self.name.strip_suffix('†') {
            Some(b) => b.to_string(),
            None => format!("{}†", self.name),
        };
        CliffordAction { name, d, arity: k, images }
    }

    /// Lines `X@t -> image` and `Z@t -> image`, in local site order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (t, [x, z]) in self.images.iter().enumerate() {
            s.push_str(&format!("X1 @{t} -> {}\n", x.to_text(SiteLabels::Index)));
            s.push_str(&format!("Z1 @{t} -> {}\n", z.to_text(SiteLabels::Index)));
        }
        s
    }
}

/// All unphased Paulis on `k` sites.
fn all_paulis(d: u32, k: usize) -> impl Iterator<Item = GeneralizedPauli> {
    let total = (d as usize).pow(2 * k as u32);
    (0..total).map(move |mut idx| {
        let mut x = vec![0u32; k];
        let mut z = vec![0u32; k];
        for t in 0..k {
            x[t] = (idx % d as usize) as u32;
            idx /= d as usize;
            z[t] = (idx % d as usize) as u32;
            idx /= d as usize;
        }
        GeneralizedPauli::from_dense(d, 0, &x, &z)
    })
}

/// Express a matrix as `ω^s Q` for a Pauli `Q` on `k` sites, if possible.
fn match_pauli(m: &crate::gates::CMatrix, d: u32, k: usize) -> Option<GeneralizedPauli> {
    let order: Vec<usize> = (0..k).collect();
    let dim = (d as usize).pow(k as u32) as f64;
    for q in all_paulis(d, k) {
        let qm = q.local_matrix(&order).ok()?;
        let c: Complex64 = qm.iter().zip(m.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() / dim;
        if (c.norm() - 1.0).abs() > PHASE_TOL {
            continue;
        }
        let s = (c.arg() / (2.0 * std::f64::consts::PI) * d as f64).round() as i64;
        if (c - omega_pow(s, d)).norm() > PHASE_TOL {
            return None;
        }
        let cand = qm * omega_pow(s, d);
        let err = cand.iter().zip(m.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        return (err < PHASE_TOL).then(|| q.with_phase(s));
    }
    None
}

/// Conjugation table of a gate, derived from its matrix.
pub fn derive_clifford_action(gate: &GateMatrix) -> Result<CliffordAction> {
    let d = gate.dim();
    let k = gate.arity();
    let order: Vec<usize> = (0..k).collect();
    let u = gate.matrix();
    let mut images = Vec::with_capacity(k);
    for t in 0..k {
        let mut pair = [GeneralizedPauli::identity(d), GeneralizedPauli::identity(d)];
        for (slot, p) in [GeneralizedPauli::x(d, t), GeneralizedPauli::z(d, t)].into_iter().enumerate() {
            let m = u * p.local_matrix(&order)? * u.adjoint();
            pair[slot] = match_pauli(&m, d, k).ok_or_else(|| Error::NotClifford(gate.name().to_string()))?;
        }
        images.push(pair);
    }
    Ok(CliffordAction { name: gate.name().to_string(), d, arity: k, images })
}

#[derive(Debug, Clone)]
struct Echelon {
    rows: Vec<GeneralizedPauli>,
    pivots: Vec<Column>,
}

#[derive(Debug, Clone)]
pub struct StabilizerTableau {
    d: u32,
    n: usize,
    gens: Vec<GeneralizedPauli>,
    echelon: OnceLock<Echelon>,
}

impl PartialEq for StabilizerTableau {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.n == other.n && self.gens == other.gens
    }
}

impl StabilizerTableau {
    /// `|0…0⟩`, stabilized by every `Z_i`.
    pub fn new(n: usize, d: u32) -> Result<Self> {
        if !modular::is_odd_prime(d) {
            return Err(Error::InvalidDimension(d));
        }
        let gens = (0..n).map(|i| GeneralizedPauli::z(d, i)).collect();
        Ok(StabilizerTableau { d, n, gens, echelon: OnceLock::new() })
    }

    /// Tableau from explicit generators; the invariants are checked.
    pub fn from_generators(d: u32, n: usize, gens: Vec<GeneralizedPauli>) -> Result<Self> {
        let t = StabilizerTableau { d, n, gens, echelon: OnceLock::new() };
        t.check_invariants()?;
        Ok(t)
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[GeneralizedPauli] {
        &self.gens
    }

    fn touched(&mut self) {
        self.echelon = OnceLock::new();
    }

    fn check_site(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(())
    }

    fn check_pauli(&self, p: &GeneralizedPauli) -> Result<()> {
        if p.dim() != self.d {
            return Err(Error::DimensionMismatch { left: self.d, right: p.dim() });
        }
        if let Some(m) = p.max_site() {
            self.check_site(m)?;
        }
        Ok(())
    }

    /// Generators pairwise commute and are independent with `n` of them.
    pub fn check_invariants(&self) -> Result<()> {
        for g in &self.gens {
            self.check_pauli(g)?;
        }
        if self.gens.len() != self.n {
            return Err(Error::Lattice(format!("{} generators for {} qudits", self.gens.len(), self.n)));
        }
        for (i, a) in self.gens.iter().enumerate() {
            for (j, b) in self.gens.iter().enumerate().skip(i + 1) {
                if !a.commutes_with(b) {
                    return Err(Error::Lattice(format!("generators {i} and {j} do not commute")));
                }
            }
        }
        let rank = self.echelon().pivots.len();
        if rank != self.n {
            return Err(Error::Lattice(format!("generator rank {rank} < {}", self.n)));
        }
        Ok(())
    }

    #[inline]
    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        if self.n <= 64 {
            if let Err(e) = self.check_invariants() {
                panic!("tableau invariant broken: {e}");
            }
        }
    }

    fn echelon(&self) -> &Echelon {
        self.echelon.get_or_init(|| {
            let (rows, pivots) = row_echelon(self.gens.clone());
            Echelon { rows, pivots }
        })
    }

    /// `⟨P⟩`: `ω^s` if `ω^{-s} P` is in the stabilizer group, otherwise 0.
    pub fn group_expectation(&self, p: &GeneralizedPauli) -> Result<Complex64> {
        Ok(match self.expectation_phase(p)? {
            Some(s) => omega_pow(s as i64, self.d),
            None => Complex64::new(0.0, 0.0),
        })
    }

    /// `Some(s)` when `⟨P⟩ = ω^s`, `None` when `⟨P⟩ = 0`.
    pub fn expectation_phase(&self, p: &GeneralizedPauli) -> Result<Option<u32>> {
        self.check_pauli(p)?;
        let ech = self.echelon();
        // q = P · (stabilizers), so ⟨P⟩ = ⟨q⟩
        let q = reduce_against(p, &ech.rows, &ech.pivots);
        Ok(q.is_scalar().then(|| q.phase_exp()))
    }

    /// `⟨Π^λ⟩` through the projector weights.
    pub fn projector_expectation(&self, spec: &ChargeProjectorSpec) -> Result<f64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, w) in projector_weights(spec) {
            acc += w * self.group_expectation(&spec.pauli.pow(k as i64))?;
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// Distribution of the outcome `k` (eigenvalue `ω^k`) of measuring `m`.
    pub fn outcome_probabilities(&self, m: &GeneralizedPauli) -> Result<Vec<f64>> {
        let d = self.d as usize;
        Ok(match self.expectation_phase(m)? {
            Some(s) => (0..d).map(|k| if k == s as usize { 1.0 } else { 0.0 }).collect(),
            None => vec![1.0 / d as f64; d],
        })
    }

    /// Conjugate the state by a Pauli: `|ψ⟩ ↦ P|ψ⟩`.
    pub fn apply_pauli(&mut self, p: &GeneralizedPauli) -> Result<()> {
        self.check_pauli(p)?;
        for g in &mut self.gens {
            // P g P† = ω^{s} g with P g = ω^s g P
            let s = p.commutation_unchecked(g);
            if s != 0 {
                *g = std::mem::replace(g, GeneralizedPauli::identity(self.d)).times_omega(s as i64);
            }
        }
        self.touched();
        Ok(())
    }

    /// Apply a Clifford gate given by its conjugation table.
    pub fn apply_clifford(&mut self, action: &CliffordAction, targets: &[usize]) -> Result<()> {
        if action.arity != targets.len() {
            return Err(Error::ArityMismatch { arity: action.arity, targets: targets.len() });
        }
        for (i, &t) in targets.iter().enumerate() {
            self.check_site(t)?;
            if targets[..i].contains(&t) {
                return Err(Error::RepeatedTarget);
            }
        }
        if action.d != self.d {
            return Err(Error::DimensionMismatch { left: self.d, right: action.d });
        }
        for g in &mut self.gens {
            if !targets.iter().any(|&t| g.site_op(t).is_some()) {
                continue;
            }
            let (rest, part) = g.split_off(targets);
            let local = part.map_sites(|s| targets.iter().position(|&t| t == s).expect("split target"));
            let img = action.conjugate_local(&local).map_sites(|s| targets[s]);
            *g = rest.mul_unchecked(&img);
        }
        self.touched();
        self.debug_check();
        Ok(())
    }

    /// Rewrite every generator through `f`, e.g. conjugation by a non-local Clifford.
    /// The invariants are rechecked.
    pub fn map_generators(&mut self, mut f: impl FnMut(&GeneralizedPauli) -> Result<GeneralizedPauli>) -> Result<()> {
        let gens = self.gens.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        self.gens = gens;
        self.touched();
        self.check_invariants()
    }

    /// Measure `m`; with `postselect = Some(k)` the outcome is forced.
    /// Returns the outcome and its probability.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        m: &GeneralizedPauli,
        rng: &mut R,
        postselect: Option<u32>,
    ) -> Result<(u32, f64)> {
        self.check_pauli(m)?;
        let d = self.d;
        if m.pow(d as i64) != GeneralizedPauli::identity(d) {
            return Err(Error::Lattice("measured operator must have order d".into()));
        }
        let pivot = self.gens.iter().position(|g| m.commutation_unchecked(g) != 0);
        let Some(p) = pivot else {
            let s = self.expectation_phase(m)?.expect("full-rank group contains every commuting Pauli");
            return match postselect {
                Some(k) if k % d != s => Err(Error::ZeroProbability { probability: 0.0 }),
                _ => Ok((s, 1.0)),
            };
        };
        let k = match postselect {
            Some(k) => k % d,
            None => rng.random_range(0..d),
        };
        let sp = m.commutation_unchecked(&self.gens[p]) as i64;
        let sp_inv = inv(sp as u32, d) as i64;
        let gp = self.gens[p].clone();
        for (i, g) in self.gens.iter_mut().enumerate() {
            if i == p {
                continue;
            }
            let si = m.commutation_unchecked(g) as i64;
            if si != 0 {
                // comm(m, g_i g_p^a) = s_i + a s_p = 0
                let a = reduce(-si * sp_inv, d) as i64;
                *g = g.mul_unchecked(&gp.pow(a));
            }
        }
        self.gens[p] = m.clone().times_omega(-(k as i64));
        self.touched();
        self.debug_check();
        Ok((k, 1.0 / d as f64))
    }

    /// Post-select outcome `k`; returns its probability.
    pub fn postselect(&mut self, m: &GeneralizedPauli, k: u32) -> Result<f64> {
        // the rng is never consulted when the outcome is forced
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        self.measure_pauli(m, &mut rng, Some(k)).map(|(_, p)| p)
    }

    /// One generator per line.
    pub fn to_text(&self, labels: SiteLabels) -> String {
        let mut s = format!("# d={} n={}\n", self.d, self.n);
        for g in &self.gens {
            s.push_str(&g.to_text(labels));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str, labels: SiteLabels) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse("empty tableau dump"))?;
        let mut d = None;
        let mut n = None;
        for tok in header.trim_start_matches('#').split_whitespace() {
            if let Some(v) = tok.strip_prefix("d=") {
                d = v.parse::<u32>().ok();
            } else if let Some(v) = tok.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            }
        }
        let (d, n) = d.zip(n).ok_or_else(|| Error::parse_at(1, "header must be '# d=<d> n=<n>'"))?;
        let gens = lines
            .map(|(i, l)| GeneralizedPauli::parse(l, d, labels).map_err(|e| Error::parse_at(i + 1, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(d, n, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::QutritLibrary;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fresh_tableau() {
        let t = StabilizerTableau::new(4, 3).unwrap();
        assert_eq!(t.generators().len(), 4);
        t.check_invariants().unwrap();
        assert!((t.group_expectation(&GeneralizedPauli::z(3, 0)).unwrap() - 1.0).norm() < 1e-15);
        assert_eq!(t.group_expectation(&GeneralizedPauli::x(3, 0)).unwrap().norm(), 0.0);
        assert!((t.group_expectation(&GeneralizedPauli::identity(3)).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn hadamard_table() {
        let lib = QutritLibrary::build().unwrap();
        let a = derive_clifford_action(&lib.h).unwrap();
        // H X H† = Z†, H Z H† = X
        assert_eq!(a.image(0, false), &GeneralizedPauli::single(3, 0, 0, -1));
        assert_eq!(a.image(0, true), &GeneralizedPauli::x(3, 0));
    }

    #[test]
    fn cz_table() {
        let lib = QutritLibrary::build().unwrap();
        let a = derive_clifford_action(&lib.cz).unwrap();
        let x0z1 = GeneralizedPauli::from_factors(3, 0, [(0, 1, 0), (1, 0, -1)]);
        // CZ X_c CZ† = X_c Z_t^{-1} under Σ|j⟩⟨j|⊗Z^j
        assert_eq!(a.image(0, false), &x0z1);
        assert_eq!(a.image(1, true), &GeneralizedPauli::z(3, 1));
    }

    #[test]
    fn non_clifford_rejected() {
        let mut m = crate::gates::CMatrix::identity(3, 3);
        m[(2, 2)] = Complex64::new(-1.0, 0.0);
        let g = GateMatrix::new("S2", 3, 1, m).unwrap();
        assert!(matches!(derive_clifford_action(&g), Err(Error::NotClifford(_))));
        // G_v is a single-qutrit Clifford up to global phase
        let lib = QutritLibrary::build().unwrap();
        assert!(derive_clifford_action(&lib.gv).is_ok());
    }

    #[test]
    fn inverse_action_roundtrip() {
        let lib = QutritLibrary::build().unwrap();
        let a = derive_clifford_action(&lib.uv).unwrap();
        let b = derive_clifford_action(&lib.uv.adjoint()).unwrap();
        assert_eq!(a.inverse(), CliffordAction { name: "Uv†".into(), ..b });
    }

    #[test]
    fn measure_fresh_xzdag() {
        let mut t = StabilizerTableau::new(2, 3).unwrap();
        let m = GeneralizedPauli::single(3, 0, 1, -1);
        assert_eq!(t.outcome_probabilities(&m).unwrap(), vec![1.0 / 3.0; 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (k, p) = t.measure_pauli(&m, &mut rng, None).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-15);
        let (k2, p2) = t.measure_pauli(&m, &mut rng, None).unwrap();
        assert_eq!((k, 1.0), (k2, p2));
        assert!(t.postselect(&m, k + 1).is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let mut t = StabilizerTableau::new(3, 3).unwrap();
        t.postselect(&GeneralizedPauli::from_factors(3, 0, [(0, 1, 0), (1, 1, 0)]), 2).unwrap();
        let text = t.to_text(SiteLabels::Index);
        let back = StabilizerTableau::from_text(&text, SiteLabels::Index).unwrap();
        assert_eq!(back, t);
    }
}
