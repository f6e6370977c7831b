//! Generalized Pauli operators over ℤ_d for odd prime `d`.
//!
//! An operator is stored as `ω^phase · ∏_i X_i^{x_i} Z_i^{z_i}` with every
//! exponent reduced mod `d` and identity sites omitted. On a single qudit
//! `Z|m⟩ = ω^m |m⟩` and `X|m⟩ = |m-1⟩`, so that `XZ = ω ZX`.
//!
//! # Text format
//!
//! ```text
//! pauli   := "I" | phase | [phase " * "] factor (" * " factor)*
//! phase   := "w^" INT
//! factor  := siteop " @" site
//! siteop  := "X" INT "." "Z" INT | "X" INT | "Z" INT
//! site    := "q(" ROW "," COL ")" | INDEX
//! ```
//!
//! Grid sites `q(r,c)` map to index `r * cols + c` (row-major from the top
//! left). The printer always writes explicit exponents, sorts sites by
//! index and omits a zero phase, so its output parses back to the same
//! operator and re-prints byte-for-byte. The parser also accepts repeated
//! sites and out-of-range exponents; factors are multiplied left to right.

use crate::error::{Error, Result};
use crate::modular::{self, omega_pow, reduce};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Exponents of `X^x Z^z` on one qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteOp {
    pub x: u32,
    pub z: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneralizedPauli {
    d: u32,
    phase: u32,
    sites: BTreeMap<usize, SiteOp>,
}

/// How sites are written in the text format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteLabels {
    /// `@17`
    Index,
    /// `@q(r,c)` on a grid with this many columns.
    Grid { cols: usize },
}

impl GeneralizedPauli {
    pub fn identity(d: u32) -> Self {
        GeneralizedPauli { d, phase: 0, sites: BTreeMap::new() }
    }

    /// `ω^phase` times the identity.
    pub fn scalar(d: u32, phase: i64) -> Self {
        GeneralizedPauli { d, phase: reduce(phase, d), sites: BTreeMap::new() }
    }

    /// `X_site^x Z_site^z`.
    pub fn single(d: u32, site: usize, x: i64, z: i64) -> Self {
        let mut p = Self::identity(d);
        p.set_site(site, reduce(x, d), reduce(z, d));
        p
    }

    pub fn x(d: u32, site: usize) -> Self {
        Self::single(d, site, 1, 0)
    }

    pub fn z(d: u32, site: usize) -> Self {
        Self::single(d, site, 0, 1)
    }

    /// Build from a phase and `(site, x, z)` triples; repeated sites are multiplied in order.
    pub fn from_factors<I>(d: u32, phase: i64, factors: I) -> Self
    where
        I: IntoIterator<Item = (usize, i64, i64)>,
    {
        let mut acc = Self::scalar(d, phase);
        for (site, x, z) in factors {
            acc = acc.mul_unchecked(&Self::single(d, site, x, z));
        }
        acc
    }

    /// Build from dense exponent vectors (index = site).
    pub fn from_dense(d: u32, phase: i64, x: &[u32], z: &[u32]) -> Self {
        let mut p = Self::scalar(d, phase);
        for (i, (&xi, &zi)) in x.iter().zip(z).enumerate() {
            p.set_site(i, xi % d, zi % d);
        }
        p
    }

    fn set_site(&mut self, site: usize, x: u32, z: u32) {
        if x == 0 && z == 0 {
            self.sites.remove(&site);
        } else {
            self.sites.insert(site, SiteOp { x, z });
        }
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn phase_exp(&self) -> u32 {
        self.phase
    }

    pub fn x_exp(&self, site: usize) -> u32 {
        self.sites.get(&site).map_or(0, |s| s.x)
    }

    pub fn z_exp(&self, site: usize) -> u32 {
        self.sites.get(&site).map_or(0, |s| s.z)
    }

    pub fn site_op(&self, site: usize) -> Option<SiteOp> {
        self.sites.get(&site).copied()
    }

    /// Non-identity sites in ascending order.
    pub fn sites(&self) -> impl Iterator<Item = (usize, SiteOp)> + '_ {
        self.sites.iter().map(|(&i, &s)| (i, s))
    }

    pub fn support(&self) -> Vec<usize> {
        self.sites.keys().copied().collect()
    }

    pub fn weight(&self) -> usize {
        self.sites.len()
    }

    pub fn max_site(&self) -> Option<usize> {
        self.sites.keys().next_back().copied()
    }

    /// Identity including a zero phase.
    pub fn is_identity(&self) -> bool {
        self.sites.is_empty() && self.phase == 0
    }

    /// Identity up to the global phase.
    pub fn is_scalar(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn with_phase(mut self, phase: i64) -> Self {
        self.phase = reduce(phase, self.d);
        self
    }

    /// Same operator with the global phase dropped.
    pub fn unphased(&self) -> Self {
        self.clone().with_phase(0)
    }

    /// Multiply the global phase by `ω^k`.
    pub fn times_omega(mut self, k: i64) -> Self {
        self.phase = reduce(self.phase as i64 + k, self.d);
        self
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { left: self.d, right: other.d });
        }
        Ok(())
    }

    /// Operator product `self · other` in canonical form.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.d as i64;
        let mut phase = self.phase as i64 + other.phase as i64;
        let mut sites = self.sites.clone();
        for (&i, b) in &other.sites {
            match sites.get_mut(&i) {
                Some(a) => {
                    // Z^{za} X^{xb} = ω^{-za·xb} X^{xb} Z^{za}
                    phase -= a.z as i64 * b.x as i64;
                    let x = (a.x as i64 + b.x as i64) % d;
                    let z = (a.z as i64 + b.z as i64) % d;
                    if x == 0 && z == 0 {
                        sites.remove(&i);
                    } else {
                        *a = SiteOp { x: x as u32, z: z as u32 };
                    }
                }
                None => {
                    sites.insert(i, *b);
                }
            }
        }
        GeneralizedPauli { d: self.d, phase: reduce(phase, self.d), sites }
    }

    /// Relabel sites through an injective map; the phase is kept.
    pub fn map_sites(&self, f: impl Fn(usize) -> usize) -> Self {
        let sites: BTreeMap<usize, SiteOp> = self.sites.iter().map(|(&i, &s)| (f(i), s)).collect();
        assert_eq!(sites.len(), self.sites.len(), "site map must be injective");
        GeneralizedPauli { d: self.d, phase: self.phase, sites }
    }

    /// Split into `(phase · rest, part on `keep`)`, whose product in that order is `self`.
    pub fn split_off(&self, keep: &[usize]) -> (Self, Self) {
        let mut rest = GeneralizedPauli { d: self.d, phase: self.phase, sites: BTreeMap::new() };
        let mut part = Self::identity(self.d);
        for (&i, &s) in &self.sites {
            if keep.contains(&i) {
                part.sites.insert(i, s);
            } else {
                rest.sites.insert(i, s);
            }
        }
        (rest, part)
    }

    /// `s` with `self · other = ω^s other · self`.
    pub fn commutation_exponent(&self, other: &Self) -> Result<u32> {
        self.check_dim(other)?;
        Ok(self.commutation_unchecked(other))
    }

    pub(crate) fn commutation_unchecked(&self, other: &Self) -> u32 {
        let (small, large, sign) = if self.sites.len() <= other.sites.len() {
            (self, other, 1i64)
        } else {
            (other, self, -1i64)
        };
        let mut s = 0i64;
        for (i, a) in &small.sites {
            if let Some(b) = large.sites.get(i) {
                s += a.x as i64 * b.z as i64 - a.z as i64 * b.x as i64;
            }
        }
        reduce(sign * s, self.d)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.d == other.d && self.commutation_unchecked(other) == 0
    }

    /// `self^k` for any integer `k` (operators have order `d`).
    pub fn pow(&self, k: i64) -> Self {
        let d = self.d;
        let k = reduce(k, d) as i64;
        let tri = k * (k - 1) / 2;
        let mut phase = self.phase as i64 * k;
        let mut sites = BTreeMap::new();
        for (&i, s) in &self.sites {
            // (X^x Z^z)^k = ω^{-xz·k(k-1)/2} X^{kx} Z^{kz}
            phase -= (s.x as i64 * s.z as i64 % d as i64) * (tri % d as i64);
            let x = reduce(s.x as i64 * k, d);
            let z = reduce(s.z as i64 * k, d);
            if x != 0 || z != 0 {
                sites.insert(i, SiteOp { x, z });
            }
        }
        GeneralizedPauli { d, phase: reduce(phase, d), sites }
    }

    pub fn adjoint(&self) -> Self {
        self.pow(self.d as i64 - 1)
    }

    /// Action on one computational basis state: returns `(phase exponent, new digit)`
    /// for the factor on `site` applied to digit `m`, i.e. `X^x Z^z |m⟩ = ω^{zm} |m-x⟩`.
    #[inline]
    pub fn site_action(op: SiteOp, m: u32, d: u32) -> (u32, u32) {
        let ph = (op.z as u64 * m as u64 % d as u64) as u32;
        let out = (m + d - op.x) % d;
        (ph, out)
    }

    /// Dense `d^k × d^k` matrix on the listed sites (first site most significant).
    /// Sites of `self` outside `order` are an error.
    pub fn local_matrix(&self, order: &[usize]) -> Result<nalgebra::DMatrix<Complex64>> {
        for &i in self.sites.keys() {
            if !order.contains(&i) {
                return Err(Error::IndexOutOfRange { index: i, n: order.len() });
            }
        }
        let d = self.d;
        let k = order.len();
        let dim = (d as usize).pow(k as u32);
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        let global = omega_pow(self.phase as i64, d);
        for col in 0..dim {
            let mut digits = digits_of(col, d, k);
            let mut ph = 0u64;
            for (pos, site) in order.iter().enumerate() {
                if let Some(op) = self.sites.get(site) {
                    let (p, out) = Self::site_action(*op, digits[pos], d);
                    ph += p as u64;
                    digits[pos] = out;
                }
            }
            let row = index_of(&digits, d);
            m[(row, col)] = global * omega_pow(ph as i64, d);
        }
        Ok(m)
    }

    /// Render with the given site labelling.
    pub fn to_text(&self, labels: SiteLabels) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.phase != 0 {
            parts.push(format!("w^{}", self.phase));
        }
        for (&i, s) in &self.sites {
            let op = match (s.x, s.z) {
                (x, 0) => format!("X{x}"),
                (0, z) => format!("Z{z}"),
                (x, z) => format!("X{x}.Z{z}"),
            };
            let site = match labels {
                SiteLabels::Index => format!("{i}"),
                SiteLabels::Grid { cols } => format!("q({},{})", i / cols, i % cols),
            };
            parts.push(format!("{op} @{site}"));
        }
        if parts.is_empty() {
            "I".to_string()
        } else {
            parts.join(" * ")
        }
    }

    /// Parse the text format; see the module docs for the grammar.
    pub fn parse(text: &str, d: u32, labels: SiteLabels) -> Result<Self> {
        if !modular::is_odd_prime(d) {
            return Err(Error::InvalidDimension(d));
        }
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::parse("empty Pauli string"));
        }
        if text == "I" {
            return Ok(Self::identity(d));
        }
        let mut acc = Self::identity(d);
        for raw in text.split('*') {
            let tok = raw.trim();
            if let Some(k) = tok.strip_prefix("w^") {
                let k: i64 = k.parse().map_err(|_| Error::parse(format!("bad phase '{tok}'")))?;
                acc = acc.times_omega(k);
                continue;
            }
            let (op, site) = tok
                .split_once('@')
                .ok_or_else(|| Error::parse(format!("factor '{tok}' lacks '@site'")))?;
            let site = parse_site(site.trim(), labels)?;
            let (x, z) = parse_site_op(op.trim())?;
            acc = acc.mul_unchecked(&Self::single(d, site, x, z));
        }
        Ok(acc)
    }
}

fn parse_exp(s: &str, full: &str) -> Result<i64> {
    s.parse::<i64>().map_err(|_| Error::parse(format!("bad exponent in '{full}'")))
}

fn parse_site_op(op: &str) -> Result<(i64, i64)> {
    if let Some((xs, zs)) = op.split_once('.') {
        let x = xs.strip_prefix('X').ok_or_else(|| Error::parse(format!("bad operator '{op}'")))?;
        let z = zs.strip_prefix('Z').ok_or_else(|| Error::parse(format!("bad operator '{op}'")))?;
        Ok((parse_exp(x, op)?, parse_exp(z, op)?))
    } else if let Some(x) = op.strip_prefix('X') {
        Ok((parse_exp(x, op)?, 0))
    } else if let Some(z) = op.strip_prefix('Z') {
        Ok((0, parse_exp(z, op)?))
    } else {
        Err(Error::parse(format!("bad operator '{op}'")))
    }
}

fn parse_site(s: &str, labels: SiteLabels) -> Result<usize> {
    if let Some(inner) = s.strip_prefix("q(").and_then(|r| r.strip_suffix(')')) {
        let SiteLabels::Grid { cols } = labels else {
            return Err(Error::parse("grid site used without a column count"));
        };
        let (r, c) = inner
            .split_once(',')
            .ok_or_else(|| Error::parse(format!("bad grid site '{s}'")))?;
        let r: usize = r.trim().parse().map_err(|_| Error::parse(format!("bad row in '{s}'")))?;
        let c: usize = c.trim().parse().map_err(|_| Error::parse(format!("bad column in '{s}'")))?;
        if c >= cols {
            return Err(Error::parse(format!("column {c} out of range in '{s}'")));
        }
        Ok(r * cols + c)
    } else {
        s.parse().map_err(|_| Error::parse(format!("bad site '{s}'")))
    }
}

impl fmt::Display for GeneralizedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(SiteLabels::Index))
    }
}

/// Base-`d` digits of `index`, most significant first.
pub(crate) fn digits_of(mut index: usize, d: u32, k: usize) -> Vec<u32> {
    let mut out = vec![0; k];
    for pos in (0..k).rev() {
        out[pos] = (index % d as usize) as u32;
        index /= d as usize;
    }
    out
}

pub(crate) fn index_of(digits: &[u32], d: u32) -> usize {
    digits.iter().fold(0usize, |acc, &v| acc * d as usize + v as usize)
}

/// Column `(site, z-part?)` of the symplectic vector.
pub(crate) type Column = (usize, bool);

#[inline]
pub(crate) fn column(p: &GeneralizedPauli, (site, z): Column) -> u32 {
    if z {
        p.z_exp(site)
    } else {
        p.x_exp(site)
    }
}

/// Row-echelon form built from group products (`g_i ← g_i g_p^a`, powers), so every
/// row lies in the group generated by the input. Returns the nonzero rows and their pivots.
pub(crate) fn row_echelon(mut rows: Vec<GeneralizedPauli>) -> (Vec<GeneralizedPauli>, Vec<Column>) {
    let mut sites: Vec<usize> = rows.iter().flat_map(|r| r.sites.keys().copied()).collect();
    sites.sort_unstable();
    sites.dedup();
    let mut pivots = Vec::new();
    let mut rank = 0;
    'cols: for site in sites {
        for z in [false, true] {
            if rank == rows.len() {
                break 'cols;
            }
            let c = (site, z);
            let Some(r) = (rank..rows.len()).find(|&r| column(&rows[r], c) != 0) else {
                continue;
            };
            rows.swap(rank, r);
            let lead = column(&rows[rank], c);
            if lead != 1 {
                rows[rank] = rows[rank].pow(modular::inv(lead, rows[rank].d) as i64);
            }
            for r in rank + 1..rows.len() {
                let e = column(&rows[r], c);
                if e != 0 {
                    rows[r] = rows[r].mul_unchecked(&rows[rank].pow(-(e as i64)));
                }
            }
            pivots.push(c);
            rank += 1;
        }
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// Rank of the symplectic vectors of `ops` over ℤ_d.
pub fn symplectic_rank(ops: &[GeneralizedPauli]) -> usize {
    row_echelon(ops.to_vec()).1.len()
}

/// Reduce `p` against an echelon basis; the result is `p` times group elements.
pub(crate) fn reduce_against(p: &GeneralizedPauli, rows: &[GeneralizedPauli], pivots: &[Column]) -> GeneralizedPauli {
    let mut q = p.clone();
    for (row, &c) in rows.iter().zip(pivots) {
        let e = column(&q, c);
        if e != 0 {
            q = q.mul_unchecked(&row.pow(-(e as i64)));
        }
    }
    q
}

/// Projector `Π^λ` onto the `ω^λ` eigenspace of an order-`d` Pauli.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeProjectorSpec {
    pub pauli: GeneralizedPauli,
    pub lambda: u32,
}

impl ChargeProjectorSpec {
    pub fn new(pauli: GeneralizedPauli, lambda: u32) -> Result<Self> {
        let d = pauli.dim();
        if lambda >= d {
            return Err(Error::Config(format!("charge label {lambda} out of range for d = {d}")));
        }
        if !pauli.pow(d as i64).is_identity() {
            return Err(Error::Config(format!("operator {pauli} does not have order {d}")));
        }
        Ok(ChargeProjectorSpec { pauli, lambda })
    }
}

/// Coefficients `(k, ω^{λ(d-k)}/d)` with `Π^λ = Σ_k coeff_k · O^k`.
pub fn projector_weights(spec: &ChargeProjectorSpec) -> Vec<(u32, Complex64)> {
    let d = spec.pauli.dim();
    (0..d)
        .map(|k| {
            let w = omega_pow(spec.lambda as i64 * (d as i64 - k as i64), d) / d as f64;
            (k, w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn approx_eq(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        (a - b).iter().all(|c| c.norm() < tol)
    }

    #[test]
    fn xz_is_omega_zx() {
        let x = GeneralizedPauli::x(3, 0);
        let z = GeneralizedPauli::z(3, 0);
        let xz = x.mul(&z).unwrap();
        let zx = z.mul(&x).unwrap();
        assert_eq!(xz.unphased(), zx.unphased());
        assert_eq!(reduce(xz.phase_exp() as i64 - zx.phase_exp() as i64, 3), 1);
        assert_eq!(x.commutation_exponent(&z).unwrap(), 1);
        assert_eq!(x.commutation_exponent(&x).unwrap(), 0);
    }

    #[test]
    fn x_has_order_d() {
        let x = GeneralizedPauli::x(3, 4);
        let cube = x.mul(&x).unwrap().mul(&x).unwrap();
        assert!(cube.is_identity());
        assert!(x.pow(3).is_identity());
    }

    #[test]
    fn mismatched_dimension() {
        let a = GeneralizedPauli::x(3, 0);
        let b = GeneralizedPauli::x(5, 0);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.commutation_exponent(&b).is_err());
    }

    #[test]
    fn adjoint_of_identity() {
        assert!(GeneralizedPauli::identity(3).adjoint().is_identity());
    }

    #[test]
    fn matrix_matches_definition() {
        let x = GeneralizedPauli::x(3, 0).local_matrix(&[0]).unwrap();
        // X|0> = |2>
        assert!((x[(2, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let z = GeneralizedPauli::z(3, 0).local_matrix(&[0]).unwrap();
        assert!((z[(1, 1)] - omega_pow(1, 3)).norm() < 1e-15);
    }

    #[test]
    fn xz_and_dagger_share_eigenvectors() {
        // eigenvalue-1 vector of XZ: (|0> + ω̄|1> + |2>)/√3
        let xz = GeneralizedPauli::from_factors(3, 0, [(0, 1, 0), (0, 0, 1)]);
        let m = xz.local_matrix(&[0]).unwrap();
        let v = nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            omega_pow(-1, 3),
            Complex64::new(1.0, 0.0),
        ]);
        assert!(((&m * &v) - &v).norm() < 1e-12);
        let adj = xz.adjoint().local_matrix(&[0]).unwrap();
        assert!(approx_eq(&adj, &m.adjoint(), 1e-12));
        // same eigenvector, eigenvalue 1 for the adjoint too
        assert!(((&adj * &v) - &v).norm() < 1e-12);
        // ω-eigenvector of XZ is the ω̄-eigenvector of (XZ)†
        let mut found = 0;
        for k in 0..3 {
            let lam = omega_pow(k, 3);
            let proj = (0..3).fold(DMatrix::<Complex64>::zeros(3, 3), |acc, j| {
                acc + m.pow(j as u32) * omega_pow(-(k * j as i64), 3) / Complex64::new(3.0, 0.0)
            });
            let w = proj.column(0).clone_owned() + proj.column(1) + proj.column(2);
            if w.norm() > 1e-9 {
                assert!(((&m * &w) - &w * lam).norm() < 1e-9);
                assert!(((&adj * &w) - &w * lam.conj()).norm() < 1e-9);
                found += 1;
            }
        }
        assert_eq!(found, 3);
    }

    #[test]
    fn projector_weights_lambda_zero() {
        let spec = ChargeProjectorSpec::new(GeneralizedPauli::z(3, 0), 0).unwrap();
        for (_, w) in projector_weights(&spec) {
            assert!((w - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn projectors_complete_and_orthogonal() {
        let z = GeneralizedPauli::z(3, 0);
        let zm = z.local_matrix(&[0]).unwrap();
        let proj = |lambda| {
            let spec = ChargeProjectorSpec::new(z.clone(), lambda).unwrap();
            projector_weights(&spec)
                .into_iter()
                .fold(DMatrix::<Complex64>::zeros(3, 3), |acc, (k, w)| acc + zm.pow(k) * w)
        };
        let ps: Vec<_> = (0..3).map(proj).collect();
        let sum = ps.iter().fold(DMatrix::zeros(3, 3), |a, p| a + p);
        assert!(approx_eq(&sum, &DMatrix::identity(3, 3), 1e-12));
        for a in 0..3 {
            for b in 0..3 {
                let prod = &ps[a] * &ps[b];
                let want = if a == b { ps[a].clone() } else { DMatrix::zeros(3, 3) };
                assert!(approx_eq(&prod, &want, 1e-12));
            }
        }
    }

    #[test]
    fn invalid_projector_label() {
        assert!(ChargeProjectorSpec::new(GeneralizedPauli::z(3, 0), 3).is_err());
    }

    #[test]
    fn text_example_round_trip() {
        let labels = SiteLabels::Grid { cols: 6 };
        let s = "w^2 * X2.Z2 @q(3,4) * X1 @q(3,5)";
        let p = GeneralizedPauli::parse(s, 3, labels).unwrap();
        assert_eq!(p.phase_exp(), 2);
        assert_eq!(p.x_exp(22), 2);
        assert_eq!(p.z_exp(22), 2);
        assert_eq!(p.x_exp(23), 1);
        assert_eq!(p.to_text(labels), s);
        assert_eq!(GeneralizedPauli::parse("I", 3, labels).unwrap(), GeneralizedPauli::identity(3));
        assert_eq!(GeneralizedPauli::identity(3).to_string(), "I");
        assert_eq!(GeneralizedPauli::scalar(3, 1).to_string(), "w^1");
    }

    #[test]
    fn parse_multiplies_repeated_sites() {
        let p = GeneralizedPauli::parse("Z1 @0 * X1 @0", 3, SiteLabels::Index).unwrap();
        let want = GeneralizedPauli::z(3, 0).mul(&GeneralizedPauli::x(3, 0)).unwrap();
        assert_eq!(p, want);
        assert_eq!(p.to_string(), "w^2 * X1.Z1 @0");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "X1", "Y1 @0", "X1 @q(0,0)", "Xa @0", "w^x"] {
            assert!(GeneralizedPauli::parse(bad, 3, SiteLabels::Index).is_err(), "{bad}");
        }
        assert!(GeneralizedPauli::parse("X1 @0", 4, SiteLabels::Index).is_err());
    }
}
