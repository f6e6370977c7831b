//! Checkerboard plaquette lattice, live stabilizer bookkeeping and string operators.
//!
//! Qudits sit on a `rows × cols` grid with index `r * cols + c` (row-major from
//! the top left). Plaquette `(r, c)` has corners NW `(r, c)`, NE `(r, c+1)`,
//! SE `(r+1, c+1)` and SW `(r+1, c)` and stabilizer
//! `O_p = Z_NW X_NE Z†_SE X†_SW`. It is light when `r + c` is even.

use crate::error::{Error, Result};
use crate::modular;
use crate::pauli::{symplectic_rank, GeneralizedPauli, SiteLabels};
use crate::tableau::CliffordAction;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    #[default]
    FullPlaquettesOnly,
    WithBoundaryStabilizers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Light,
    Dark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaquetteKind {
    Normal,
    Merged,
    Boundary,
}

/// Corner slots in NW, NE, SE, SW order with their `(x, z)` exponents.
pub const CORNER_OPS: [(i64, i64); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];
const CORNER_OFFSETS: [(i64, i64); 4] = [(0, 0), (0, 1), (1, 1), (1, 0)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaquette {
    /// Grid coordinate of the NW corner; may lie outside the grid for boundary plaquettes.
    pub anchor: (i64, i64),
    /// Qudit index per corner slot (NW, NE, SE, SW); `None` for dropped corners.
    pub corners: [Option<usize>; 4],
    pub color: Color,
    pub kind: PlaquetteKind,
}

impl Plaquette {
    pub fn color_of(anchor: (i64, i64)) -> Color {
        if (anchor.0 + anchor.1).rem_euclid(2) == 0 {
            Color::Light
        } else {
            Color::Dark
        }
    }

    pub fn qudits(&self) -> impl Iterator<Item = usize> + '_ {
        self.corners.iter().flatten().copied()
    }
}

/// `Z_NW X_NE Z†_SE X†_SW` restricted to the corners present.
pub fn plaquette_stabilizer(d: u32, p: &Plaquette) -> GeneralizedPauli {
    GeneralizedPauli::from_factors(
        d,
        0,
        p.corners.iter().zip(CORNER_OPS).filter_map(|(q, (x, z))| q.map(|q| (q, x, z))),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CreationEvent {
    Measurement,
    Merge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DislocationRecord {
    pub merged_plaquette_ids: Vec<usize>,
    /// Grid coordinates of the two defects.
    pub parafermion_positions: [(usize, usize); 2],
    /// Qudit path from the first defect to the second.
    pub branch_cut: Vec<(usize, usize)>,
    pub creation_event: CreationEvent,
}

impl DislocationRecord {
    fn check(&self) -> bool {
        self.branch_cut.first() == Some(&self.parafermion_positions[0])
            && self.branch_cut.last() == Some(&self.parafermion_positions[1])
    }
}

/// A live stabilizer with a label describing where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveStabilizer {
    pub label: String,
    pub op: GeneralizedPauli,
    /// Plaquette this stabilizer still equals, if untouched.
    pub plaquette: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StringSpecies {
    /// Charge string through light plaquettes.
    E,
    /// Flux string through dark plaquettes.
    M,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    rows: usize,
    cols: usize,
    d: u32,
    boundary_mode: BoundaryMode,
    plaquettes: Vec<Plaquette>,
    live: Vec<LiveStabilizer>,
    dislocations: Vec<DislocationRecord>,
    merges: usize,
}

impl Lattice {
    pub fn new(rows: usize, cols: usize, d: u32, boundary_mode: BoundaryMode) -> Result<Self> {
        if rows < 3 || cols < 3 {
            return Err(Error::LatticeTooSmall { rows, cols });
        }
        if !modular::is_odd_prime(d) {
            return Err(Error::InvalidDimension(d));
        }
        let mut lat = Lattice {
            rows,
            cols,
            d,
            boundary_mode,
            plaquettes: Vec::new(),
            live: Vec::new(),
            dislocations: Vec::new(),
            merges: 0,
        };
        for r in 0..rows as i64 - 1 {
            for c in 0..cols as i64 - 1 {
                lat.push_plaquette((r, c), PlaquetteKind::Normal);
            }
        }
        if boundary_mode == BoundaryMode::WithBoundaryStabilizers {
            lat.add_boundary_stabilizers();
        }
        lat.verify_commuting().map_err(|(a, b)| Error::Lattice(format!("stabilizers {a} and {b} do not commute")))?;
        Ok(lat)
    }

    fn corner_index(&self, (r, c): (i64, i64)) -> Option<usize> {
        (r >= 0 && c >= 0 && (r as usize) < self.rows && (c as usize) < self.cols)
            .then(|| r as usize * self.cols + c as usize)
    }

    fn push_plaquette(&mut self, anchor: (i64, i64), kind: PlaquetteKind) -> usize {
        let corners = CORNER_OFFSETS.map(|(dr, dc)| self.corner_index((anchor.0 + dr, anchor.1 + dc)));
        let p = Plaquette { anchor, corners, color: Plaquette::color_of(anchor), kind };
        let id = self.plaquettes.len();
        let op = plaquette_stabilizer(self.d, &p);
        self.live.push(LiveStabilizer { label: format!("P{}", self.label_of(anchor)), op, plaquette: Some(id) });
        self.plaquettes.push(p);
        id
    }

    fn label_of(&self, (r, c): (i64, i64)) -> String {
        format!("({r},{c})")
    }

    /// Truncated plaquettes around the edge, kept greedily when they commute
    /// with everything kept so far and are independent of it.
    fn add_boundary_stabilizers(&mut self) {
        let (rows, cols) = (self.rows as i64, self.cols as i64);
        let mut anchors = Vec::new();
        for c in -1..cols {
            anchors.push((-1, c));
            anchors.push((rows - 1, c));
        }
        for r in 0..rows - 1 {
            anchors.push((r, -1));
            anchors.push((r, cols - 1));
        }
        for anchor in anchors {
            let corners = CORNER_OFFSETS.map(|(dr, dc)| self.corner_index((anchor.0 + dr, anchor.1 + dc)));
            if corners.iter().flatten().count() < 2 {
                continue;
            }
            let p = Plaquette { anchor, corners, color: Plaquette::color_of(anchor), kind: PlaquetteKind::Boundary };
            let op = plaquette_stabilizer(self.d, &p);
            if !self.live.iter().all(|s| s.op.commutes_with(&op)) {
                continue;
            }
            let mut ops: Vec<GeneralizedPauli> = self.live.iter().map(|s| s.op.clone()).collect();
            let before = symplectic_rank(&ops);
            ops.push(op);
            if symplectic_rank(&ops) > before {
                self.push_plaquette(anchor, PlaquetteKind::Boundary);
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        self.boundary_mode
    }

    pub fn labels(&self) -> SiteLabels {
        SiteLabels::Grid { cols: self.cols }
    }

    pub fn qudit(&self, r: usize, c: usize) -> usize {
        assert!(r < self.rows && c < self.cols, "qudit ({r},{c}) outside the grid");
        r * self.cols + c
    }

    pub fn coords(&self, q: usize) -> (usize, usize) {
        (q / self.cols, q % self.cols)
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn plaquette(&self, id: usize) -> &Plaquette {
        &self.plaquettes[id]
    }

    /// Id of the plaquette anchored at `(r, c)`.
    pub fn plaquette_at(&self, r: i64, c: i64) -> Option<usize> {
        self.plaquettes.iter().position(|p| p.anchor == (r, c))
    }

    pub fn stabilizer(&self, id: usize) -> GeneralizedPauli {
        plaquette_stabilizer(self.d, &self.plaquettes[id])
    }

    pub fn live_stabilizers(&self) -> &[LiveStabilizer] {
        &self.live
    }

    pub fn live_ops(&self) -> Vec<GeneralizedPauli> {
        self.live.iter().map(|s| s.op.clone()).collect()
    }

    pub fn dislocations(&self) -> &[DislocationRecord] {
        &self.dislocations
    }

    pub fn dislocations_mut(&mut self) -> &mut [DislocationRecord] {
        &mut self.dislocations
    }

    pub fn merge_count(&self) -> usize {
        self.merges
    }

    /// `Ok` when all live stabilizers commute, else the first offending pair.
    pub fn verify_commuting(&self) -> std::result::Result<(), (usize, usize)> {
        for (i, a) in self.live.iter().enumerate() {
            for (j, b) in self.live.iter().enumerate().skip(i + 1) {
                if !a.op.commutes_with(&b.op) {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }

    fn live_index_of_plaquette(&self, id: usize) -> Option<usize> {
        self.live.iter().position(|s| s.plaquette == Some(id))
    }

    /// Replace the stabilizers of two edge-sharing plaquettes by their product `O_{p'} O_p`.
    pub fn merge_plaquettes(&mut self, p: usize, p2: usize) -> Result<DislocationRecord> {
        let (a, b) = (self.plaquettes.get(p), self.plaquettes.get(p2));
        let (Some(a), Some(b)) = (a, b) else {
            return Err(Error::Lattice("unknown plaquette".into()));
        };
        let (dr, dc) = (b.anchor.0 - a.anchor.0, b.anchor.1 - a.anchor.1);
        if dr.abs() + dc.abs() != 1 {
            return Err(Error::Lattice(format!("plaquettes {p} and {p2} do not share an edge")));
        }
        let shared: Vec<usize> = a.qudits().filter(|q| b.qudits().any(|r| r == *q)).collect();
        if shared.len() != 2 {
            return Err(Error::Lattice("merged plaquettes must share a full edge".into()));
        }
        let (Some(ia), Some(ib)) = (self.live_index_of_plaquette(p), self.live_index_of_plaquette(p2)) else {
            return Err(Error::Lattice(format!("plaquettes {p} and {p2} are not both live")));
        };
        let merged = self.live[ib].op.mul_unchecked(&self.live[ia].op);
        let label = format!("{}*{}", self.live[ib].label, self.live[ia].label);
        let (hi, lo) = if ia > ib { (ia, ib) } else { (ib, ia) };
        self.live.remove(hi);
        self.live.remove(lo);
        self.live.push(LiveStabilizer { label, op: merged, plaquette: None });
        self.plaquettes[p].kind = PlaquetteKind::Merged;
        self.plaquettes[p2].kind = PlaquetteKind::Merged;
        self.merges += 1;
        let ends = [self.coords(shared[0]), self.coords(shared[1])];
        let rec = DislocationRecord {
            merged_plaquette_ids: vec![p, p2],
            parafermion_positions: ends,
            branch_cut: ends.to_vec(),
            creation_event: CreationEvent::Merge,
        };
        debug_assert!(rec.check());
        self.dislocations.push(rec.clone());
        Ok(rec)
    }

    /// Record a dislocation created outside [`merge_plaquettes`](Self::merge_plaquettes).
    pub fn push_dislocation(&mut self, rec: DislocationRecord) -> Result<usize> {
        if !rec.check() {
            return Err(Error::Lattice("defect positions must be the branch-cut endpoints".into()));
        }
        self.dislocations.push(rec);
        Ok(self.dislocations.len() - 1)
    }

    /// Update the live set after post-selecting `ω^k` for `m`: stabilizers that do
    /// not commute with `m` are combined into commuting products and `ω^{-k} m` is added.
    /// Returns whether the outcome was undetermined by the live set.
    pub fn record_measurement(&mut self, m: &GeneralizedPauli, k: u32) -> bool {
        let pivot = self.live.iter().position(|s| m.commutation_unchecked(&s.op) != 0);
        let new = LiveStabilizer {
            label: format!("M[{}]", m.to_text(self.labels())),
            op: m.clone().times_omega(-(k as i64)),
            plaquette: None,
        };
        let Some(p) = pivot else {
            self.live.push(new);
            return false;
        };
        let d = self.d;
        let gp = self.live.remove(p);
        let sp = m.commutation_unchecked(&gp.op) as i64;
        let sp_inv = modular::inv(sp as u32, d) as i64;
        for s in &mut self.live {
            let si = m.commutation_unchecked(&s.op) as i64;
            if si != 0 {
                let a = modular::reduce(-si * sp_inv, d) as i64;
                s.op = s.op.mul_unchecked(&gp.op.pow(a));
                s.label = format!("{}*{}^{a}", s.label, gp.label);
                s.plaquette = None;
            }
        }
        self.live.push(new);
        true
    }

    pub fn live_index(&self, label: &str) -> Option<usize> {
        self.live.iter().position(|s| s.label == label)
    }

    /// Replace the whole live set; the new set must commute.
    pub fn set_live(&mut self, live: Vec<LiveStabilizer>) -> Result<()> {
        check_commuting(live.iter().map(|s| &s.op))?;
        self.live = live;
        self.relink_plaquettes();
        Ok(())
    }

    /// Replace the live operators in place, keeping labels.
    pub fn replace_live_ops(&mut self, ops: Vec<GeneralizedPauli>) -> Result<()> {
        if ops.len() != self.live.len() {
            return Err(Error::Lattice(format!("expected {} operators, got {}", self.live.len(), ops.len())));
        }
        check_commuting(ops.iter())?;
        for (s, op) in self.live.iter_mut().zip(ops) {
            if s.op != op {
                s.op = op;
                s.plaquette = None;
            }
        }
        self.relink_plaquettes();
        Ok(())
    }

    /// Conjugate every live stabilizer by a Clifford acting on `targets`.
    pub fn conjugate(&mut self, action: &CliffordAction, targets: &[usize]) {
        for s in &mut self.live {
            if !targets.iter().any(|&t| s.op.site_op(t).is_some()) {
                continue;
            }
            let (rest, part) = s.op.split_off(targets);
            let local = part.map_sites(|q| targets.iter().position(|&t| t == q).expect("target"));
            s.op = rest.mul_unchecked(&action.conjugate_local(&local).map_sites(|q| targets[q]));
            s.plaquette = None;
        }
        self.relink_plaquettes();
    }

    /// Conjugate by a Pauli: phases of non-commuting stabilizers shift.
    pub fn apply_pauli(&mut self, p: &GeneralizedPauli) {
        for s in &mut self.live {
            let c = p.commutation_unchecked(&s.op);
            if c != 0 {
                s.op = s.op.clone().times_omega(c as i64);
            }
        }
    }

    /// Reattach plaquette ids to live stabilizers that equal a plaquette operator.
    fn relink_plaquettes(&mut self) {
        let ops: BTreeMap<usize, GeneralizedPauli> =
            (0..self.plaquettes.len()).map(|i| (i, self.stabilizer(i))).collect();
        for s in &mut self.live {
            if s.plaquette.is_none() {
                s.plaquette = ops.iter().find(|(_, o)| **o == s.op).map(|(i, _)| *i);
            }
        }
    }

    /// The single-qudit step operator taking a charge from `from` to the
    /// same-colored plaquette `to` across their shared corner: it leaves the
    /// start plaquette with charge `+1` and the end with `d-1`.
    pub fn string_step(&self, from: usize, to: usize) -> Result<GeneralizedPauli> {
        let (a, b) = (&self.plaquettes[from], &self.plaquettes[to]);
        if a.color != b.color {
            return Err(Error::Lattice("string steps connect plaquettes of one color".into()));
        }
        let shared: Vec<usize> = a.qudits().filter(|q| b.qudits().any(|r| r == *q)).collect();
        let [q] = shared[..] else {
            return Err(Error::Lattice(format!("plaquettes {from} and {to} are not diagonal neighbours")));
        };
        let oa = self.stabilizer(from);
        let others: Vec<GeneralizedPauli> = self
            .plaquettes
            .iter()
            .enumerate()
            .filter(|(i, p)| *i != from && *i != to && p.qudits().any(|r| r == q))
            .map(|(i, _)| self.stabilizer(i))
            .collect();
        let d = self.d as i64;
        for x in 0..d {
            for z in 0..d {
                let t = GeneralizedPauli::single(self.d, q, x, z);
                // O_from T = ω T O_from puts charge 1 on the start
                if oa.commutation_unchecked(&t) == 1 && others.iter().all(|o| o.commutes_with(&t)) {
                    return Ok(t);
                }
            }
        }
        Err(Error::Lattice("no single-qudit string step exists".into()))
    }

    /// String operator along a plaquette path of one color. The start carries
    /// charge `1`, the end charge `d-1`; an empty or single-plaquette path is the identity.
    pub fn string_operator(&self, path: &[usize], species: StringSpecies) -> Result<GeneralizedPauli> {
        let want = match species {
            StringSpecies::E => Color::Light,
            StringSpecies::M => Color::Dark,
        };
        let mut acc = GeneralizedPauli::identity(self.d);
        for &p in path {
            if self.plaquettes.get(p).map(|p| p.color) != Some(want) {
                return Err(Error::Lattice(format!("plaquette {p} has the wrong color for this string")));
            }
        }
        for w in path.windows(2) {
            // the step must not touch a qudit removed from the code
            let step = self.string_step(w[0], w[1])?;
            acc = acc.mul_unchecked(&step);
        }
        Ok(acc)
    }
}

fn check_commuting<'a>(ops: impl Iterator<Item = &'a GeneralizedPauli>) -> Result<()> {
    let ops: Vec<&GeneralizedPauli> = ops.collect();
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate().skip(i + 1) {
            if !a.commutes_with(b) {
                return Err(Error::Lattice(format!("live stabilizers {i} and {j} do not commute")));
            }
        }
    }
    Ok(())
}

/// Structured lattice descriptor (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDescriptor {
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "default_d")]
    pub d: u32,
    #[serde(default)]
    pub boundary_mode: BoundaryMode,
    /// Pairs of plaquette anchors `[[r, c], [r, c]]` merged in order.
    #[serde(default)]
    pub merges: Vec<[[i64; 2]; 2]>,
    /// Named plaquettes by anchor.
    #[serde(default)]
    pub named: BTreeMap<String, [i64; 2]>,
}

fn default_d() -> u32 {
    3
}

impl LatticeDescriptor {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse { line: toml_line(text, &e), msg: e.message().to_string() })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("descriptor serializes")
    }

    pub fn build(&self) -> Result<Lattice> {
        let mut lat = Lattice::new(self.rows, self.cols, self.d, self.boundary_mode)?;
        for [a, b] in &self.merges {
            let pa = lat.plaquette_at(a[0], a[1]).ok_or_else(|| Error::Lattice(format!("no plaquette at {a:?}")))?;
            let pb = lat.plaquette_at(b[0], b[1]).ok_or_else(|| Error::Lattice(format!("no plaquette at {b:?}")))?;
            lat.merge_plaquettes(pa, pb)?;
        }
        for (name, [r, c]) in &self.named {
            if lat.plaquette_at(*r, *c).is_none() {
                return Err(Error::Config(format!("named plaquette '{name}' at ({r},{c}) does not exist")));
            }
        }
        Ok(lat)
    }
}

/// 1-based line of a TOML error, if it has a span.
pub(crate) fn toml_line(text: &str, e: &toml::de::Error) -> Option<usize> {
    e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let l = Lattice::new(6, 6, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        assert_eq!(l.plaquettes().len(), 25);
        assert_eq!(l.num_qudits(), 36);
        let l = Lattice::new(3, 4, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        assert_eq!(l.plaquettes().len(), 6);
        assert!(matches!(Lattice::new(2, 2, 3, BoundaryMode::FullPlaquettesOnly), Err(Error::LatticeTooSmall { .. })));
        assert!(matches!(Lattice::new(3, 3, 4, BoundaryMode::FullPlaquettesOnly), Err(Error::InvalidDimension(4))));
    }

    #[test]
    fn bulk_plaquette_shape() {
        let l = Lattice::new(4, 4, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        let o = l.stabilizer(l.plaquette_at(1, 1).unwrap());
        assert_eq!(o.weight(), 4);
        assert!(o.pow(3).is_identity());
        assert_eq!(o.to_text(l.labels()), "Z1 @q(1,1) * X1 @q(1,2) * X2 @q(2,1) * Z2 @q(2,2)");
    }

    #[test]
    fn merge_bookkeeping() {
        let mut l = Lattice::new(6, 6, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        let a = l.plaquette_at(2, 2).unwrap();
        let b = l.plaquette_at(2, 3).unwrap();
        let rec = l.merge_plaquettes(a, b).unwrap();
        assert_eq!(l.live_stabilizers().len(), 24);
        assert_eq!(rec.parafermion_positions, [(2, 3), (3, 3)]);
        l.verify_commuting().unwrap();
        assert!(l.merge_plaquettes(a, b).is_err());
        let far = l.plaquette_at(4, 4).unwrap();
        let c = l.plaquette_at(0, 0).unwrap();
        assert!(l.merge_plaquettes(c, far).is_err());
    }

    #[test]
    fn corrupted_stabilizer_detected() {
        let mut l = Lattice::new(4, 4, 3, BoundaryMode::FullPlaquettesOnly).unwrap();
        l.verify_commuting().unwrap();
        // swap X for Z on the NE corner of (1,1)
        let q = l.qudit(1, 2);
        let id = l.live.iter().position(|s| s.plaquette == l.plaquette_at(1, 1)).unwrap();
        let op = &l.live[id].op;
        let fixed = op.mul_unchecked(&GeneralizedPauli::single(3, q, -1, 1));
        l.live[id].op = fixed;
        assert!(l.verify_commuting().is_err());
    }

    #[test]
    fn boundary_mode_fixes_state() {
        for (r, c) in [(3, 3), (3, 4), (4, 4), (4, 5)] {
            let l = Lattice::new(r, c, 3, BoundaryMode::WithBoundaryStabilizers).unwrap();
            l.verify_commuting().unwrap();
            let ops = l.live_ops();
            assert_eq!(symplectic_rank(&ops), ops.len());
            assert!(ops.len() <= r * c);
        }
    }

    #[test]
    fn descriptor_roundtrip() {
        let text = "rows = 4\ncols = 4\nmerges = [[[1, 1], [1, 2]]]\n[named]\np = [0, 0]\n";
        let desc = LatticeDescriptor::parse(text).unwrap();
        let lat = desc.build().unwrap();
        assert_eq!(lat.live_stabilizers().len(), 8);
        assert_eq!(LatticeDescriptor::parse(&desc.to_toml()).unwrap(), desc);
        let bad = LatticeDescriptor::parse("rows = 4\ncols = \"x\"\n").unwrap_err();
        assert!(matches!(bad, Error::Parse { line: Some(2), .. }));
    }
}
