//! Code deformation: parafermion pair creation, defect moves and parity rotations.
//!
//! A measured pair on the edge `a–b` replaces the plaquettes touching `a` or `b`
//! by products that commute with the two single-qudit measurements. The product
//! of the two plaquettes containing both `a` and `b` (stripped of `a`, `b`) is the
//! pair's *channel* operator: its eigenvalue is the fusion channel.
//!
//! Each defect is the mixed-type middle vertex of a weight-5 "pentagon"
//! generator. A move `i → j` is a two-qudit gate from {U_v, U_v†, U_h, U_h†},
//! with either qudit order, that carries the pentagon from `i` to `j` and changes
//! nothing else. The gate is chosen from the current generators, since no fixed
//! edge rule preserves a deformed code.

use crate::error::{Error, Result};
use crate::gates::QutritLibrary;
use crate::lattice::{CreationEvent, DislocationRecord, Lattice, LiveStabilizer};
use crate::modular::{omega_pow, reduce, solve_linear};
use crate::pauli::{symplectic_rank, GeneralizedPauli};
use crate::statevector::StateVector;
use crate::tableau::{derive_clifford_action, CliffordAction, StabilizerTableau};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const MOVE_GATES: [&str; 4] = ["Uv", "Uv†", "Uh", "Uh†"];

/// Conjugation tables of the move gates.
#[derive(Debug, Clone)]
pub struct MoveSet {
    actions: Vec<(String, CliffordAction)>,
}

impl MoveSet {
    pub fn new(lib: &QutritLibrary) -> Result<Self> {
        let actions = MOVE_GATES
            .iter()
            .map(|&name| {
                let g = lib.get(name).expect("move gates are in the library");
                Ok((name.to_string(), derive_clifford_action(&g)?))
            })
            .collect::<Result<_>>()?;
        Ok(MoveSet { actions })
    }

    pub fn action(&self, name: &str) -> Option<&CliffordAction> {
        self.actions.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    fn inverse_name(name: &str) -> String {
        match name.strip_suffix('†') {
            Some(base) => base.to_string(),
            None => format!("{name}†"),
        }
    }
}

/// One executed move gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveStep {
    pub gate: String,
    pub targets: [usize; 2],
}

impl MoveStep {
    pub fn inverse(&self) -> MoveStep {
        MoveStep { gate: MoveSet::inverse_name(&self.gate), targets: self.targets }
    }
}

/// Conjugate each operator by a gate on `targets`.
pub fn conjugate_ops(ops: &[GeneralizedPauli], action: &CliffordAction, targets: &[usize]) -> Vec<GeneralizedPauli> {
    ops.iter()
        .map(|s| {
            if !targets.iter().any(|&t| s.site_op(t).is_some()) {
                return s.clone();
            }
            let (rest, part) = s.split_off(targets);
            let local = part.map_sites(|q| targets.iter().position(|&t| t == q).expect("target"));
            rest.mul_unchecked(&action.conjugate_local(&local).map_sites(|q| targets[q]))
        })
        .collect()
}

/// Greedily lower the weight of `ops[f]` for each `f` in `focus` by multiplying
/// with powers of up to two overlapping generators. The group is unchanged.
pub fn reduce_local(ops: &mut [GeneralizedPauli], focus: &[usize]) {
    let d = ops.first().map_or(3, |p| p.dim()) as i64;
    loop {
        let mut improved = false;
        for &f in focus {
            let sup = ops[f].support();
            let near: Vec<usize> = (0..ops.len())
                .filter(|&h| h != f && ops[h].support().iter().any(|q| sup.contains(q)))
                .collect();
            let mut best = ops[f].clone();
            for (a, &h1) in near.iter().enumerate() {
                for k1 in 1..d {
                    let c1 = ops[f].mul_unchecked(&ops[h1].pow(k1));
                    if c1.weight() < best.weight() && !c1.is_scalar() {
                        best = c1.clone();
                    }
                    for &h2 in &near[a + 1..] {
                        for k2 in 1..d {
                            let c2 = c1.mul_unchecked(&ops[h2].pow(k2));
                            if c2.weight() < best.weight() && !c2.is_scalar() {
                                best = c2;
                            }
                        }
                    }
                }
            }
            if best.weight() < ops[f].weight() {
                ops[f] = best;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

fn mixed_at(p: &GeneralizedPauli, q: usize) -> bool {
    p.site_op(q).is_some_and(|s| s.x != 0 && s.z != 0)
}

/// Qudits that are the mixed vertex of a weight-5 generator.
pub fn defect_sites(ops: &[GeneralizedPauli]) -> Vec<usize> {
    let mut v: Vec<usize> = ops
        .iter()
        .filter(|g| g.weight() == 5)
        .flat_map(|g| g.support().into_iter().filter(move |&q| mixed_at(g, q)))
        .collect();
    v.sort_unstable();
    v
}

/// The first move variant that carries the defect at qudit `i` to qudit `j`
/// while preserving the code, with the reduced generators it produces.
pub fn find_clean_move(
    ops: &[GeneralizedPauli],
    moves: &MoveSet,
    i: usize,
    j: usize,
) -> Option<(MoveStep, Vec<GeneralizedPauli>)> {
    for (name, act) in &moves.actions {
        for targets in [[i, j], [j, i]] {
            let mut img = conjugate_ops(ops, act, &targets);
            let changed: Vec<usize> = (0..img.len()).filter(|&k| img[k] != ops[k]).collect();
            if changed.len() != 2 {
                continue;
            }
            reduce_local(&mut img, &changed);
            let max_w = changed.iter().map(|&k| img[k].weight()).max().unwrap_or(0);
            let pent_j = changed.iter().filter(|&&k| img[k].weight() == 5 && mixed_at(&img[k], j)).count();
            let pent_i = img.iter().filter(|g| g.weight() == 5 && mixed_at(g, i)).count();
            if max_w <= 5 && pent_j == 1 && pent_i == 0 {
                return Some((MoveStep { gate: name.clone(), targets }, img));
            }
        }
    }
    None
}

/// Single-qudit operators measured to create a pair on the edge `a–b`:
/// `XZ†` for a horizontal edge, `XZ` for a vertical one.
pub fn pair_operators(lattice: &Lattice, a: (usize, usize), b: (usize, usize)) -> Result<[GeneralizedPauli; 2]> {
    let z = pair_orientation(lattice, a, b)?.z_exp();
    let d = lattice.dim();
    Ok([
        GeneralizedPauli::single(d, lattice.qudit(a.0, a.1), 1, z),
        GeneralizedPauli::single(d, lattice.qudit(b.0, b.1), 1, z),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    fn z_exp(self) -> i64 {
        match self {
            Orientation::Horizontal => -1,
            Orientation::Vertical => 1,
        }
    }
}

fn pair_orientation(lattice: &Lattice, a: (usize, usize), b: (usize, usize)) -> Result<Orientation> {
    let inside = |p: (usize, usize)| p.0 < lattice.rows() && p.1 < lattice.cols();
    if !inside(a) || !inside(b) {
        return Err(Error::Lattice(format!("pair {a:?}-{b:?} leaves the grid")));
    }
    match (a.0 == b.0, a.1 == b.1) {
        (true, false) if b.1 == a.1 + 1 => Ok(Orientation::Horizontal),
        (false, true) if b.0 == a.0 + 1 => Ok(Orientation::Vertical),
        _ => Err(Error::Lattice(format!(
            "pair qudits {a:?} and {b:?} must be neighbours, listed top-to-bottom or left-to-right"
        ))),
    }
}

/// Bookkeeping for a pair created by measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct PairHandle {
    pub dislocation: usize,
    /// Live-stabilizer label of the channel operator.
    pub channel_label: String,
    pub measured: [GeneralizedPauli; 2],
}

/// Rewrite the live set of `lattice` for a pair measured on `a–b` with
/// outcome `ω^0` on both qudits. `tag` prefixes the new labels.
pub fn register_measured_pair(
    lattice: &mut Lattice,
    a: (usize, usize),
    b: (usize, usize),
    tag: &str,
) -> Result<PairHandle> {
    let orient = pair_orientation(lattice, a, b)?;
    let measured = pair_operators(lattice, a, b)?;
    let d = lattice.dim();
    let (qa, qb) = (lattice.qudit(a.0, a.1), lattice.qudit(b.0, b.1));
    let (r, c) = (a.0 as i64, a.1 as i64);
    let hosts = match orient {
        Orientation::Horizontal => [(r - 1, c), (r, c)],
        Orientation::Vertical => [(r, c - 1), (r, c)],
    };
    let [Some(p1), Some(p2)] = hosts.map(|(r, c)| lattice.plaquette_at(r, c)) else {
        return Err(Error::Lattice(format!("pair {a:?}-{b:?} must not lie on the outer boundary")));
    };

    // strip `a` and `b` by powers of the measured operators; the measured
    // generator is the operator itself, so the product keeps eigenvalue 1
    let strip = |p: &GeneralizedPauli| -> Option<GeneralizedPauli> {
        if !p.commutes_with(&measured[0]) || !p.commutes_with(&measured[1]) {
            return None;
        }
        let mut out = p.clone();
        for (q, m) in [(qa, &measured[0]), (qb, &measured[1])] {
            let k = out.site_op(q).map_or(0, |s| s.x) as i64;
            out = out.mul_unchecked(&m.pow(-k));
        }
        (out.site_op(qa).is_none() && out.site_op(qb).is_none() && !out.is_scalar()).then_some(out)
    };

    let (kept, removed): (Vec<LiveStabilizer>, Vec<LiveStabilizer>) = lattice
        .live_stabilizers()
        .iter()
        .cloned()
        .partition(|s| s.op.site_op(qa).is_none() && s.op.site_op(qb).is_none());
    if removed.len() > 8 {
        return Err(Error::Lattice("pair region overlaps too many deformed generators".into()));
    }

    let channel = strip(&lattice.stabilizer(p2).mul_unchecked(&lattice.stabilizer(p1)))
        .ok_or_else(|| Error::Lattice("channel operator does not commute with the measurements".into()))?;
    let mut candidates = Vec::new();
    let total = (d as usize).pow(removed.len() as u32);
    for code in 1..total {
        let mut acc = GeneralizedPauli::identity(d);
        let mut rest = code;
        let mut factors = 0;
        for s in &removed {
            let e = (rest % d as usize) as i64;
            rest /= d as usize;
            if e != 0 {
                acc = acc.mul_unchecked(&s.op.pow(e));
                factors += 1;
            }
        }
        // longer products include the string joining both defects, a logical
        // operator of the pair rather than a local check
        if factors > 2 {
            continue;
        }
        if let Some(p) = strip(&acc) {
            candidates.push((factors, p));
        }
    }
    // products of few old generators first keeps the new ones geometric
    candidates.sort_by_cached_key(|(f, p)| (*f, p.weight(), p.to_string()));

    let mut basis = vec![measured[0].clone(), measured[1].clone(), channel];
    let mut rank = symplectic_rank(&basis);
    for (_, p) in candidates {
        basis.push(p);
        let r = symplectic_rank(&basis);
        if r > rank {
            rank = r;
        } else {
            basis.pop();
        }
    }
    let extra: Vec<LiveStabilizer> = basis
        .into_iter()
        .enumerate()
        .map(|(k, op)| {
            let label = match k {
                0 | 1 => format!("{tag}.M{k}"),
                2 => format!("{tag}.channel"),
                _ => format!("{tag}.g{}", k - 3),
            };
            LiveStabilizer { label, op, plaquette: None }
        })
        .collect();
    let channel_label = format!("{tag}.channel");
    let mut live = kept;
    live.extend(extra);
    lattice.set_live(live)?;

    let clamp_r = |v: i64| v.clamp(0, lattice.rows() as i64 - 1) as usize;
    let clamp_c = |v: i64| v.clamp(0, lattice.cols() as i64 - 1) as usize;
    let ends = match orient {
        Orientation::Horizontal => [(a.0, clamp_c(c - 1)), (a.0, clamp_c(c + 2))],
        Orientation::Vertical => [(clamp_r(r - 1), a.1), (clamp_r(r + 2), a.1)],
    };
    let mut cut = vec![ends[0]];
    let mut p = ends[0];
    while p != ends[1] {
        match orient {
            Orientation::Horizontal => p.1 += 1,
            Orientation::Vertical => p.0 += 1,
        }
        cut.push(p);
    }
    let dislocation = lattice.push_dislocation(DislocationRecord {
        merged_plaquette_ids: vec![p1, p2],
        parafermion_positions: ends,
        branch_cut: cut,
        creation_event: CreationEvent::Measurement,
    })?;
    Ok(PairHandle { dislocation, channel_label, measured })
}

/// Move defect `end` (0 or 1) of dislocation `dislocation` to the grid site `to`.
pub fn move_defect(
    lattice: &mut Lattice,
    moves: &MoveSet,
    dislocation: usize,
    end: usize,
    to: (usize, usize),
) -> Result<MoveStep> {
    let rec = lattice
        .dislocations()
        .get(dislocation)
        .ok_or_else(|| Error::Lattice(format!("unknown dislocation {dislocation}")))?
        .clone();
    let from = rec.parafermion_positions[end];
    if to.0 >= lattice.rows() || to.1 >= lattice.cols() {
        return Err(Error::Lattice(format!("move {from:?} -> {to:?} leaves the lattice")));
    }
    let (dr, dc) = (to.0 as i64 - from.0 as i64, to.1 as i64 - from.1 as i64);
    if dr.abs() > 1 || dc.abs() > 1 || (dr, dc) == (0, 0) {
        return Err(Error::Lattice(format!("move {from:?} -> {to:?} is not a single step")));
    }
    for (k, other) in lattice.dislocations().iter().enumerate() {
        if k != dislocation && (other.branch_cut.contains(&to) || other.parafermion_positions.contains(&to)) {
            return Err(Error::Lattice(format!("move {from:?} -> {to:?} runs into dislocation {k}")));
        }
    }
    let (i, j) = (lattice.qudit(from.0, from.1), lattice.qudit(to.0, to.1));
    let (step, ops) = find_clean_move(&lattice.live_ops(), moves, i, j)
        .ok_or_else(|| Error::Lattice(format!("no code-preserving move {from:?} -> {to:?}")))?;
    lattice.replace_live_ops(ops)?;
    let rec = &mut lattice.dislocations_mut()[dislocation];
    rec.parafermion_positions[end] = to;
    if end == 0 {
        if rec.branch_cut.get(1) == Some(&to) {
            rec.branch_cut.remove(0);
        } else {
            rec.branch_cut.insert(0, to);
        }
    } else {
        let n = rec.branch_cut.len();
        if n >= 2 && rec.branch_cut[n - 2] == to {
            rec.branch_cut.pop();
        } else {
            rec.branch_cut.push(to);
        }
    }
    Ok(step)
}

/// Walk a defect along `path` (excluding its current site), one clean move per step.
pub fn walk_defect(
    lattice: &mut Lattice,
    moves: &MoveSet,
    dislocation: usize,
    end: usize,
    path: &[(usize, usize)],
) -> Result<Vec<MoveStep>> {
    path.iter().map(|&to| move_defect(lattice, moves, dislocation, end, to)).collect()
}

/// Undo recorded steps in reverse order with their inverse gates and restore
/// the defect to `origin`. The lattice generators are conjugated literally.
pub fn retrace(
    lattice: &mut Lattice,
    moves: &MoveSet,
    dislocation: usize,
    end: usize,
    steps: &[MoveStep],
    origin: (usize, usize),
) -> Result<Vec<MoveStep>> {
    let inv: Vec<MoveStep> = steps.iter().rev().map(MoveStep::inverse).collect();
    for s in &inv {
        let act = moves.action(&s.gate).ok_or_else(|| Error::Lattice(format!("unknown move gate {}", s.gate)))?;
        lattice.conjugate(act, &s.targets);
    }
    let rec = &mut lattice.dislocations_mut()[dislocation];
    let drop = steps.len().min(rec.branch_cut.len().saturating_sub(2));
    if end == 0 {
        rec.branch_cut.drain(..drop);
    } else {
        let keep = rec.branch_cut.len() - drop;
        rec.branch_cut.truncate(keep);
    }
    rec.parafermion_positions[end] = origin;
    if end == 0 {
        rec.branch_cut[0] = origin;
    } else {
        *rec.branch_cut.last_mut().expect("non-empty cut") = origin;
    }
    Ok(inv)
}

/// Pauli that commutes with every live generator except `channels` and has
/// commutation exponent 1 with each channel: a logical parity operator
/// linking the pairs. The support lies within the smallest square
/// neighbourhood of `centres` that admits one, and the weight is reduced
/// greedily within that neighbourhood. The phase is 0.
pub fn find_parity_operator(
    lattice: &Lattice,
    channels: &[usize],
    centres: &[(usize, usize)],
) -> Option<GeneralizedPauli> {
    let max_radius = lattice.rows().max(lattice.cols());
    (1..=max_radius).find_map(|r| {
        let window: Vec<usize> = (0..lattice.num_qudits())
            .filter(|&q| {
                let (a, b) = lattice.coords(q);
                centres.iter().any(|&(r0, c0)| a.abs_diff(r0) <= r && b.abs_diff(c0) <= r)
            })
            .collect();
        parity_operator_in(lattice, channels, &window)
    })
}

fn parity_operator_in(lattice: &Lattice, channels: &[usize], window: &[usize]) -> Option<GeneralizedPauli> {
    let d = lattice.dim();
    let nvars = 2 * window.len();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (k, g) in lattice.live_ops().iter().enumerate() {
        let mut row = vec![0u32; nvars];
        let mut touches = false;
        for (i, &q) in window.iter().enumerate() {
            if let Some(op) = g.site_op(q) {
                // exponent of p against g is Σ p.x g.z − p.z g.x
                row[2 * i] = op.z;
                row[2 * i + 1] = reduce(-(op.x as i64), d);
                touches = true;
            }
        }
        let target = u32::from(channels.contains(&k));
        if touches {
            a.push(row);
            b.push(target);
        } else if target != 0 {
            return None;
        }
    }
    let sol = solve_linear(&a, &b, nvars, d)?;
    let weight = |v: &[u32]| v.chunks(2).filter(|c| c[0] != 0 || c[1] != 0).count();
    let mut best = sol.particular;
    loop {
        let current = weight(&best);
        let improved = sol.kernel.iter().flat_map(|k| (1..d).map(move |m| (k, m))).find_map(|(k, m)| {
            let cand: Vec<u32> = best.iter().zip(k).map(|(x, y)| (x + m * y) % d).collect();
            (weight(&cand) < current).then_some(cand)
        });
        match improved {
            Some(c) => best = c,
            None => break,
        }
    }
    let factors = window
        .iter()
        .zip(best.chunks(2))
        .filter(|(_, c)| c[0] != 0 || c[1] != 0)
        .map(|(&q, c)| (q, c[0] as i64, c[1] as i64));
    Some(GeneralizedPauli::from_factors(d, 0, factors))
}

/// `R = (1/√d) Σ_m c_m Λ^m` with `c_m = ω^{e_m}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRotation {
    pub lambda: GeneralizedPauli,
    pub coeff_exps: Vec<u32>,
}

impl ParityRotation {
    /// The exchange `c_m = ω^{m(m+5)/2}`; for `d = 3` this is `(1, 1, ω)`.
    pub fn exchange(lambda: GeneralizedPauli) -> Self {
        let d = lambda.dim();
        // m(m+5)/2 is an integer for every m
        let coeff_exps = (0..d as i64).map(|m| reduce(m * (m + 5) / 2, d)).collect();
        ParityRotation { lambda, coeff_exps }
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        let d = self.lambda.dim();
        let s = (d as f64).sqrt();
        self.coeff_exps.iter().map(|&e| omega_pow(e as i64, d) / s).collect()
    }

    /// `R P R†`. For a Clifford rotation this is `ω^φ P Λ^α`; anything else is an error.
    pub fn conjugate(&self, p: &GeneralizedPauli) -> Result<GeneralizedPauli> {
        let d = self.lambda.dim();
        let s = p.commutation_exponent(&self.lambda)? as i64;
        if s == 0 {
            return Ok(p.clone());
        }
        // R P R† = P Σ_k f_k Λ^k with f_k = (1/d) Σ_m c_m c̄_{m−k} ω^{−s m}
        let c: Vec<Complex64> = self.coeff_exps.iter().map(|&e| omega_pow(e as i64, d)).collect();
        let du = d as usize;
        let f: Vec<Complex64> = (0..du)
            .map(|k| {
                (0..du)
                    .map(|m| c[m] * c[(m + du - k) % du].conj() * omega_pow(-s * m as i64, d))
                    .sum::<Complex64>()
                    / d as f64
            })
            .collect();
        let nonzero: Vec<usize> = (0..du).filter(|&k| f[k].norm() > 1e-9).collect();
        let [alpha] = nonzero[..] else {
            return Err(Error::NotClifford("parity rotation".into()));
        };
        let phase = (0..d as i64)
            .find(|&ph| (omega_pow(ph, d) - f[alpha]).norm() < 1e-9)
            .ok_or_else(|| Error::NotClifford("parity rotation".into()))?;
        Ok(p.mul_unchecked(&self.lambda.pow(alpha as i64)).times_omega(phase))
    }

    pub fn apply_tableau(&self, t: &mut StabilizerTableau) -> Result<()> {
        t.map_generators(|g| self.conjugate(g))
    }

    pub fn apply_statevector(&self, s: &mut StateVector) -> Result<()> {
        let terms: Vec<(Complex64, GeneralizedPauli)> = self
            .coefficients()
            .into_iter()
            .enumerate()
            .map(|(m, c)| (c, self.lambda.pow(m as i64)))
            .collect();
        s.apply_pauli_combination(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateMatrix;
    use crate::lattice::BoundaryMode;

    #[test]
    fn exchange_rotation_is_the_vertical_move_gate() {
        let lib = QutritLibrary::build().unwrap();
        // Λ = ω Z_0† X_1
        let lambda = GeneralizedPauli::from_factors(3, 1, [(0, 0, -1), (1, 1, 0)]);
        let r = ParityRotation::exchange(lambda.clone());
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(9, 9);
        for (k, c) in r.coefficients().into_iter().enumerate() {
            m += lambda.pow(k as i64).local_matrix(&[0, 1]).unwrap() * c;
        }
        let g = GateMatrix::new("R", 3, 2, m).unwrap();
        assert!(crate::gates::max_abs_diff(g.matrix(), lib.uv.matrix()) < 1e-12);
    }

    #[test]
    fn rotation_rule_matches_matrix_conjugation() {
        let lambda = GeneralizedPauli::from_factors(3, 0, [(0, 1, 2), (1, 0, 1)]);
        let r = ParityRotation::exchange(lambda.clone());
        let mut rm = nalgebra::DMatrix::<Complex64>::zeros(9, 9);
        for (k, c) in r.coefficients().into_iter().enumerate() {
            rm += lambda.pow(k as i64).local_matrix(&[0, 1]).unwrap() * c;
        }
        for (x0, z0, x1, z1) in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 2, 0)] {
            let p = GeneralizedPauli::from_factors(3, 0, [(0, x0, z0), (1, x1, z1)]);
            let want = &rm * p.local_matrix(&[0, 1]).unwrap() * rm.adjoint();
            let got = r.conjugate(&p).unwrap().local_matrix(&[0, 1]).unwrap();
            assert!(crate::gates::max_abs_diff(&want, &got) < 1e-12, "{p}");
        }
    }

    #[test]
    fn measured_pair_keeps_a_commuting_full_set() {
        let mut l = Lattice::new(5, 6, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        let before = l.live_stabilizers().len();
        let h = register_measured_pair(&mut l, (2, 2), (2, 3), "A").unwrap();
        assert!(l.verify_commuting().is_ok());
        assert!(l.live_index(&h.channel_label).is_some());
        // six plaquettes give three two-plaquette products plus the two measured operators
        assert_eq!(l.live_stabilizers().len(), before - 1);
        assert_eq!(l.dislocations()[0].parafermion_positions, [(2, 1), (2, 4)]);
        assert_eq!(defect_sites(&l.live_ops()), vec![l.qudit(2, 1), l.qudit(2, 4)]);
    }

    #[test]
    fn horizontal_pair_glides_vertically_and_retraces() {
        let lib = QutritLibrary::build().unwrap();
        let moves = MoveSet::new(&lib).unwrap();
        let mut l = Lattice::new(8, 8, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        register_measured_pair(&mut l, (2, 3), (2, 4), "A").unwrap();
        let start = l.live_ops();
        let steps = walk_defect(&mut l, &moves, 0, 1, &[(3, 5), (4, 5)]).unwrap();
        assert_eq!(l.dislocations()[0].parafermion_positions[1], (4, 5));
        assert_eq!(defect_sites(&l.live_ops()), vec![l.qudit(2, 2), l.qudit(4, 5)]);
        // two cells away is not a single step
        assert!(move_defect(&mut l, &moves, 0, 1, (4, 7)).is_err());
        retrace(&mut l, &moves, 0, 1, &steps, (2, 5)).unwrap();
        let back = l.live_ops();
        let ok = start.iter().all(|g| {
            let mut ext = back.clone();
            ext.push(g.clone());
            symplectic_rank(&ext) == symplectic_rank(&back)
        });
        assert!(ok);
        assert_eq!(l.dislocations()[0].branch_cut.last(), Some(&(2, 5)));
    }

    #[test]
    fn double_exchange_splits_both_channels_evenly() {
        use crate::pauli::ChargeProjectorSpec;
        for braid in [false, true] {
            let mut l = Lattice::new(4, 4, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
            let mut t = StabilizerTableau::new(l.num_qudits(), 3).unwrap();
            for g in l.live_ops() {
                t.postselect(&g, 0).unwrap();
            }
            for (a, b, tag) in [((0, 2), (1, 2), "A"), ((2, 0), (2, 1), "B")] {
                for m in pair_operators(&l, a, b).unwrap() {
                    t.postselect(&m, 0).unwrap();
                }
                register_measured_pair(&mut l, a, b, tag).unwrap();
            }
            let ch = [l.live_index("A.channel").unwrap(), l.live_index("B.channel").unwrap()];
            let lambda = find_parity_operator(&l, &ch, &[(2, 2), (2, 0)]).unwrap();
            let live = l.live_ops();
            for (k, g) in live.iter().enumerate() {
                assert_eq!(g.commutes_with(&lambda), !ch.contains(&k));
            }
            if braid {
                let r = ParityRotation::exchange(lambda);
                r.apply_tableau(&mut t).unwrap();
                r.apply_tableau(&mut t).unwrap();
            }
            let want = if braid { 1.0 / 3.0 } else { 1.0 };
            for &k in &ch {
                let spec = ChargeProjectorSpec::new(live[k].clone(), 0).unwrap();
                assert!((t.projector_expectation(&spec).unwrap() - want).abs() < 1e-12);
            }
            for (k, g) in live.iter().enumerate().filter(|(k, _)| !ch.contains(k)) {
                assert_eq!(t.expectation_phase(g).unwrap(), Some(0), "generator {k}");
            }
        }
    }
}
