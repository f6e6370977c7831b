//! ℤ_3 parafermion algebra in a concrete matrix representation: parity
//! operators, the braid-group representations, the logical-qutrit braid
//! matrices and fusion-channel probabilities.
//!
//! `N` parafermions act on `N/2` qutrits through a Jordan–Wigner string:
//!
//! ```text
//! γ_{2k+1} = (Π_{j<k} Z_j) X_k        γ_{2k+2} = (Π_{j<k} Z_j) X_k Z_k
//! ```
//!
//! Indices are 1-based as in the usual notation. With `XZ = ωZX` this gives
//! `γ_i γ_j = ω γ_j γ_i` for `i < j` and `γ_i³ = 1`.

use crate::error::{Error, Result};
use crate::gates::CMatrix;
use crate::modular::omega_pow;
use crate::pauli::GeneralizedPauli;
use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const D: u32 = 3;

pub type Matrix3c = Matrix3<Complex64>;

fn w(k: i64) -> Complex64 {
    omega_pow(k, D)
}

/// Largest entrywise modulus of `a − b`.
pub fn max_diff(a: &Matrix3c, b: &Matrix3c) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Matrices of `γ_1 … γ_N` on `3^{N/2}` dimensions.
#[derive(Debug, Clone)]
pub struct ParafermionRep {
    n: usize,
    gammas: Vec<CMatrix>,
}

impl ParafermionRep {
    /// `n` must be even and between 2 and 8.
    pub fn build(n: usize) -> Result<Self> {
        if !(2..=8).contains(&n) || !n.is_multiple_of(2) {
            return Err(Error::Config(format!("parafermion count must be even and in 2..=8, got {n}")));
        }
        let sites: Vec<usize> = (0..n / 2).collect();
        let mut gammas = Vec::with_capacity(n);
        for k in 0..n / 2 {
            let string = (0..k).map(|j| (j, 0, 1));
            for z in [0, 1] {
                let p = GeneralizedPauli::from_factors(D, 0, string.clone().chain([(k, 1, z)]));
                gammas.push(p.local_matrix(&sites)?);
            }
        }
        Ok(ParafermionRep { n, gammas })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.gammas[0].nrows()
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    /// `γ_i`, `1 ≤ i ≤ N`.
    pub fn gamma(&self, i: usize) -> Result<&CMatrix> {
        self.gammas.get(i.wrapping_sub(1)).ok_or(Error::IndexOutOfRange { index: i, n: self.n })
    }

    /// `Λ_i = ω̄ γ_i γ_{i+1}†`, `1 ≤ i < N`.
    pub fn parity(&self, i: usize) -> Result<CMatrix> {
        if i == 0 || i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n - 1 });
        }
        Ok(self.gamma(i)? * self.gamma(i + 1)?.adjoint() * w(-1))
    }

    /// `U_i = (1/√3) Σ_m c_m Λ_i^m`.
    pub fn braid_operator(&self, i: usize, rep: BraidRep) -> Result<CMatrix> {
        Ok(braid_from_coefficients(&self.parity(i)?, &rep.coefficients()))
    }

    /// Largest deviation from `γ_i γ_j = ω^{sgn(j−i)} γ_j γ_i` and `γ_i³ = 1`.
    pub fn algebra_residual(&self) -> f64 {
        let id = self.identity();
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let g = &self.gammas[i];
            worst = worst.max(frob(&(g * g * g - &id)));
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let s = if j > i { 1 } else { -1 };
                let h = &self.gammas[j];
                worst = worst.max(frob(&(g * h - h * g * w(s))));
            }
        }
        worst
    }

    /// Largest deviation from the parity relations: `Λ_i Λ_j = ω^{sgn(j−i)} Λ_j Λ_i`
    /// for neighbours, commuting otherwise, and `Λ_i³ = 1`.
    pub fn parity_residual(&self) -> f64 {
        let id = self.identity();
        let lams: Vec<CMatrix> = (1..self.n).map(|i| self.parity(i).expect("in range")).collect();
        let mut worst: f64 = 0.0;
        for (a, la) in lams.iter().enumerate() {
            worst = worst.max(frob(&(la * la * la - &id)));
            for (b, lb) in lams.iter().enumerate() {
                let phase = match b as i64 - a as i64 {
                    1 => 1,
                    -1 => -1,
                    _ => 0,
                };
                worst = worst.max(frob(&(la * lb - lb * la * w(phase))));
            }
        }
        worst
    }

    /// Eigenvalue multiplicities of `Λ_i` for `1, ω, ω²`, read off from the
    /// traces of the projectors `(1/3) Σ_m ω^{−km} Λ^m`.
    pub fn parity_spectrum(&self, i: usize) -> Result<[usize; 3]> {
        let l = self.parity(i)?;
        let powers = [self.identity(), l.clone(), &l * &l];
        Ok([0i64, 1, 2].map(|k| {
            let tr: Complex64 = (0..3).map(|m| powers[m].trace() * w(-k * m as i64)).sum::<Complex64>() / 3.0;
            tr.re.round() as usize
        }))
    }

    /// Residuals of `U_i γ_i U_i† = ω̄ γ_{i+1}` and `U_i γ_{i+1} U_i† = γ_i† γ_{i+1}²`.
    pub fn conjugation_residuals(&self, i: usize, rep: BraidRep) -> Result<(f64, f64)> {
        let u = self.braid_operator(i, rep)?;
        let (a, b) = (self.gamma(i)?, self.gamma(i + 1)?);
        let first = &u * a * u.adjoint() - b * w(-1);
        let second = &u * b * u.adjoint() - a.adjoint() * b * b;
        Ok((frob(&first), frob(&second)))
    }

    /// `‖U_i U_{i+1} U_i − U_{i+1} U_i U_{i+1}‖_F` for arbitrary coefficients.
    pub fn yang_baxter_residual(&self, i: usize, coeffs: &[Complex64; 3]) -> Result<f64> {
        let u = braid_from_coefficients(&self.parity(i)?, coeffs);
        let v = braid_from_coefficients(&self.parity(i + 1)?, coeffs);
        Ok(frob(&(&u * &v * &u - &v * &u * &v)))
    }
}

fn braid_from_coefficients(lambda: &CMatrix, c: &[Complex64; 3]) -> CMatrix {
    let n = lambda.nrows();
    let mut acc = CMatrix::zeros(n, n);
    let mut power = CMatrix::identity(n, n);
    for &cm in c {
        acc += &power * cm;
        power = &power * lambda;
    }
    acc.unscale(3f64.sqrt())
}

/// One of the six solutions `c_m = ω^{± m(m+2r+3)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidRep {
    /// `+1` or `−1`.
    pub sign: i8,
    pub r: u8,
}

impl BraidRep {
    /// `c_m = ω^{m(m+5)/2}`, i.e. `(1, 1, ω)`.
    pub const CHOSEN: BraidRep = BraidRep { sign: 1, r: 1 };

    pub fn all() -> [BraidRep; 6] {
        [1i8, -1].map(|sign| [0u8, 1, 2].map(|r| BraidRep { sign, r })).concat().try_into().expect("six")
    }

    /// Exponents `e_m` with `c_m = ω^{e_m}`, reduced mod 3.
    pub fn exponents(&self) -> [u32; 3] {
        [0i64, 1, 2].map(|m| (self.sign as i64 * m * (m + 2 * self.r as i64 + 3) / 2).rem_euclid(3) as u32)
    }

    pub fn coefficients(&self) -> [Complex64; 3] {
        self.exponents().map(|e| w(e as i64))
    }
}

/// `F = (1/√3) Σ ω^{km} |k⟩⟨m|`.
pub fn fourier() -> Matrix3c {
    Matrix3c::from_fn(|k, m| w((k * m) as i64) / 3f64.sqrt())
}

/// Braid matrices in the logical-qutrit basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalBraid {
    /// `diag(c̃_0, c̃_1, c̃_2)` with `c̃_k = (1/√3) Σ_j ω^{jk} c_j`.
    pub u1: Matrix3c,
    /// `F† U_1 F`, entries `(1/√3) c_{k−l}`.
    pub u2: Matrix3c,
    pub u2_squared: Matrix3c,
}

pub fn logical_braid_matrices(rep: BraidRep) -> LogicalBraid {
    let c = rep.coefficients();
    let s3 = 3f64.sqrt();
    let ct: Vec<Complex64> = (0..3).map(|k| (0..3).map(|j| w((j * k) as i64) * c[j]).sum::<Complex64>() / s3).collect();
    let u1 = Matrix3c::from_diagonal(&nalgebra::Vector3::new(ct[0], ct[1], ct[2]));
    let f = fourier();
    let u2 = f.adjoint() * u1 * f;
    LogicalBraid { u1, u2, u2_squared: u2 * u2 }
}

/// The full-braid matrix written out entrywise, for comparison:
/// `(1/√3) [[i, i, a], [a, i, i], [i, a, i]]` with `a = (2+ω̄)/√3`.
pub fn full_braid_reference() -> Matrix3c {
    let s3 = 3f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let a = (w(-1) + 2.0) / s3;
    Matrix3c::new(i, i, a, a, i, i, i, a, i).unscale(s3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalQutritState {
    pub amplitudes: [Complex64; 3],
}

impl LogicalQutritState {
    pub fn new(amplitudes: [Complex64; 3]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("logical state norm² is {norm}, expected 1")));
        }
        Ok(LogicalQutritState { amplitudes })
    }

    /// `|0̄⟩`, the state of two pairs that both fuse to the vacuum.
    pub fn zero() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        LogicalQutritState { amplitudes: [one, zero, zero] }
    }

    pub fn apply(&self, m: &Matrix3c) -> Result<Self> {
        let v = m * nalgebra::Vector3::from(self.amplitudes);
        Self::new([v[0], v[1], v[2]])
    }
}

/// Born probabilities of the channels `(1, e m̄, ē m)` of the first pair;
/// the vacuum channel is the `|0̄⟩` component.
pub fn fusion_channel_distribution(state: &LogicalQutritState) -> [f64; 3] {
    state.amplitudes.map(|a| a.norm_sqr())
}

/// Channel distribution of the first pair after `U_2²`, computed in the
/// four-parafermion representation instead of the logical basis: start in
/// the joint `Λ_1 = Λ_3 = 1` eigenvector, braid, and project onto the
/// eigenspaces of `Λ_1`.
pub fn braided_channel_distribution(rep: BraidRep) -> Result<[f64; 3]> {
    let pf = ParafermionRep::build(4)?;
    let (l1, l3) = (pf.parity(1)?, pf.parity(3)?);
    let n = pf.dim();
    let id = pf.identity();
    let proj = |l: &CMatrix, k: i64| -> CMatrix {
        let mut acc = CMatrix::zeros(n, n);
        let mut power = id.clone();
        for m in 0..3 {
            acc += &power * w(-k * m);
            power = &power * l;
        }
        acc.unscale(3.0)
    };
    let p0 = proj(&l1, 0) * proj(&l3, 0);
    let start = (0..n)
        .map(|c| p0.column(c).into_owned())
        .find(|v| v.norm() > 1e-6)
        .ok_or_else(|| Error::Config("no joint Λ1 = Λ3 = 1 eigenvector".into()))?;
    let start = &start / Complex64::new(start.norm(), 0.0);
    let u = pf.braid_operator(2, rep)?;
    let end = &u * &u * start;
    Ok([0i64, 1, 2].map(|k| {
        let v = proj(&l1, k) * &end;
        v.norm_squared()
    }))
}

/// One named check of the algebra suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, pass: value < tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub checks: Vec<Check>,
    /// `U_2²` of the chosen representation as `[re, im]` pairs, row by row.
    pub full_braid: Vec<Vec<[f64; 2]>>,
    pub braided_channels: [f64; 3],
}

impl AlgebraReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// The full algebra suite with its pass/fail tolerances.
pub fn algebra_check() -> Result<AlgebraReport> {
    const TOL: f64 = 1e-12;
    let mut checks = Vec::new();
    for n in [4, 6, 8] {
        let pf = ParafermionRep::build(n)?;
        checks.push(Check::below(format!("N={n} exchange and order relations"), pf.algebra_residual(), TOL));
        checks.push(Check::below(format!("N={n} parity relations"), pf.parity_residual(), TOL));
        let uneven = (1..n)
            .map(|i| pf.parity_spectrum(i))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .filter(|s| !(s[0] == s[1] && s[1] == s[2]))
            .count();
        checks.push(Check::below(format!("N={n} parity spectra with unequal multiplicities"), uneven as f64, 0.5));
    }
    let pf = ParafermionRep::build(4)?;
    for rep in BraidRep::all() {
        let worst = (1..=2)
            .map(|i| pf.yang_baxter_residual(i, &rep.coefficients()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(Check::below(format!("Yang-Baxter sign={:+} r={}", rep.sign, rep.r), worst, TOL));
    }
    let bad = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, 0.3)];
    let neg = pf.yang_baxter_residual(1, &bad)?;
    checks.push(Check { name: "Yang-Baxter fails for perturbed coefficients".into(), value: neg, tolerance: 0.1, pass: neg > 0.1 });
    for i in 1..=3 {
        let (a, b) = pf.conjugation_residuals(i, BraidRep::CHOSEN)?;
        checks.push(Check::below(format!("U_{i} γ_{i} U_{i}† = ω̄ γ_{}", i + 1), a, TOL));
        checks.push(Check::below(format!("U_{i} γ_{} U_{i}† = γ_{i}† γ_{}²", i + 1, i + 1), b, TOL));
    }
    let lb = logical_braid_matrices(BraidRep::CHOSEN);
    let c = BraidRep::CHOSEN.coefficients();
    let circ = Matrix3c::from_fn(|k, l| c[(k + 3 - l) % 3] / 3f64.sqrt());
    checks.push(Check::below("U_2 entries equal c_{k-l}/√3", max_diff(&lb.u2, &circ), TOL));
    checks.push(Check::below("U_2² equals the reference matrix", max_diff(&lb.u2_squared, &full_braid_reference()), TOL));
    let after = LogicalQutritState::zero().apply(&lb.u2_squared)?;
    let dist = fusion_channel_distribution(&after);
    let dev = dist.iter().map(|p| (p - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    checks.push(Check::below("U_2²|0̄⟩ channel probabilities equal 1/3", dev, TOL));
    let braided = braided_channel_distribution(BraidRep::CHOSEN)?;
    let dev = braided.iter().map(|p| (p - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    checks.push(Check::below("four-parafermion braid gives channel probabilities 1/3", dev, 1e-10));
    let full_braid =
        (0..3).map(|r| (0..3).map(|c| [lb.u2_squared[(r, c)].re, lb.u2_squared[(r, c)].im]).collect()).collect();
    Ok(AlgebraReport { checks, full_braid, braided_channels: braided })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chosen_coefficients() {
        assert_eq!(BraidRep::CHOSEN.exponents(), [0, 0, 1]);
        let reps = BraidRep::all();
        let distinct: std::collections::BTreeSet<[u32; 3]> = reps.iter().map(|r| r.exponents()).collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn suite_passes() {
        let report = algebra_check().unwrap();
        for c in &report.checks {
            assert!(c.pass, "{} = {}", c.name, c.value);
        }
    }

    #[test]
    fn logical_braid_has_period_three_up_to_phase() {
        let u2 = logical_braid_matrices(BraidRep::CHOSEN).u2;
        let six = (0..6).fold(Matrix3c::identity(), |acc, _| acc * u2);
        let phase = six[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(max_diff(&six, &(Matrix3c::identity() * phase)) < 1e-12);
        let back = LogicalQutritState::zero().apply(&six).unwrap();
        let d = fusion_channel_distribution(&back);
        assert!((d[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn u1_is_diagonal_in_the_parity_basis() {
        let pf = ParafermionRep::build(2).unwrap();
        let u = pf.braid_operator(1, BraidRep::CHOSEN).unwrap();
        let lb = logical_braid_matrices(BraidRep::CHOSEN);
        // eigenvalue of U_1 on the ω^k eigenspace of Λ_1 is tr(U_1 P_k)
        let l = pf.parity(1).unwrap();
        let powers = [pf.identity(), l.clone(), &l * &l];
        for k in 0..3 {
            let tr: Complex64 =
                (0..3).map(|m| (&u * &powers[m]).trace() * w(-(k as i64) * m as i64)).sum::<Complex64>() / 3.0;
            assert!((tr - lb.u1[(k, k)]).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(ParafermionRep::build(3).is_err());
        assert!(ParafermionRep::build(10).is_err());
    }
}
