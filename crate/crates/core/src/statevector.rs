//! Dense state-vector simulator for `n` qudits of dimension `d`.
//!
//! Amplitudes are indexed big-endian: qudit 0 is the most significant
//! base-`d` digit, so for two qutrits the order is `|00⟩, |01⟩, …, |22⟩`.
//! All reductions run over fixed-size chunks whose partial sums are added
//! in index order, which keeps results bitwise identical for any thread
//! count.

use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::modular::{omega_pow, reduce};
use crate::pauli::{digits_of, projector_weights, ChargeProjectorSpec, GeneralizedPauli};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use std::io::{Read, Write};

/// Largest supported amplitude count (3^16).
pub const MAX_AMPLITUDES: usize = 43_046_721;

const CHUNK: usize = 1 << 12;
const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    d: u32,
    n: usize,
    amps: Vec<Complex64>,
}

fn checked_len(d: u32, n: usize) -> Result<usize> {
    let mut len = 1usize;
    for _ in 0..n {
        len = len.checked_mul(d as usize).filter(|&l| l <= MAX_AMPLITUDES).ok_or(
            Error::CapacityExceeded { n, cap: (MAX_AMPLITUDES as f64).log(d as f64).floor() as usize },
        )?;
    }
    Ok(len)
}

impl StateVector {
    /// Product state `|digits[0] digits[1] …⟩`.
    pub fn product(d: u32, digits: &[u32]) -> Result<Self> {
        if !crate::modular::is_odd_prime(d) {
            return Err(Error::InvalidDimension(d));
        }
        let n = digits.len();
        let len = checked_len(d, n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        let idx = digits.iter().fold(0usize, |acc, &v| acc * d as usize + (v % d) as usize);
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(StateVector { d, n, amps })
    }

    pub fn zero(d: u32, n: usize) -> Result<Self> {
        Self::product(d, &vec![0; n])
    }

    /// Wrap raw amplitudes; they are normalized.
    pub fn from_amplitudes(d: u32, n: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        if checked_len(d, n)? != amps.len() {
            return Err(Error::Config(format!("expected {} amplitudes, got {}", d.pow(n as u32), amps.len())));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < PROB_FLOOR {
            return Err(Error::Config("zero state vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { d, n, amps })
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, digits: &[u32]) -> Complex64 {
        let idx = digits.iter().fold(0usize, |acc, &v| acc * self.d as usize + v as usize);
        self.amps[idx]
    }

    pub fn norm(&self) -> f64 {
        chunked_sum_f64(&self.amps, |a| a.norm_sqr()).sqrt()
    }

    fn stride(&self, q: usize) -> usize {
        (self.d as usize).pow((self.n - 1 - q) as u32)
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(Error::IndexOutOfRange { index: t, n: self.n });
            }
            if targets[..i].contains(&t) {
                return Err(Error::RepeatedTarget);
            }
        }
        Ok(())
    }

    /// Apply `gate` with its first tensor factor on `targets[0]`, etc.
    pub fn apply_gate(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        if gate.dim() != self.d {
            return Err(Error::DimensionMismatch { left: self.d, right: gate.dim() });
        }
        if gate.arity() != targets.len() {
            return Err(Error::ArityMismatch { arity: gate.arity(), targets: targets.len() });
        }
        self.check_targets(targets)?;
        let d = self.d as usize;
        let k = targets.len();
        let local = d.pow(k as u32);
        // offsets[j] = index shift for local basis state j
        let strides: Vec<usize> = targets.iter().map(|&t| self.stride(t)).collect();
        let offsets: Vec<usize> = (0..local)
            .map(|j| {
                digits_of(j, self.d, k).iter().zip(&strides).map(|(&v, &s)| v as usize * s).sum()
            })
            .collect();
        let m = gate.matrix();
        let mat: Vec<Complex64> = (0..local * local).map(|i| m[(i / local, i % local)]).collect();

        // base indices have digit 0 on every target; enumerate them directly by
        // inserting a zero digit at each target stride, lowest stride first
        let mut sorted = strides.clone();
        sorted.sort_unstable();
        let base_of = |mut r: usize| {
            for &s in &sorted {
                r = (r / s) * s * d + r % s;
            }
            r
        };
        let bases = self.amps.len() / local;
        let apply = |chunk: &mut [Complex64], first: usize, count: usize, buf: &mut Vec<Complex64>| {
            let origin = base_of(first);
            for r in first..first + count {
                let base = base_of(r) - origin;
                for (j, off) in offsets.iter().enumerate() {
                    buf[j] = chunk[base + off];
                }
                for (row, off) in mat.chunks_exact(local).zip(&offsets) {
                    chunk[base + off] = row.iter().zip(buf.iter()).map(|(a, b)| a * b).sum();
                }
            }
        };
        // blocks above the most significant target are independent
        let top = *targets.iter().min().unwrap();
        let block = d.pow((self.n - top) as u32);
        let per_block = block / local;
        if block < self.amps.len() {
            self.amps.par_chunks_mut(block).enumerate().for_each(|(b, chunk)| {
                let mut buf = vec![Complex64::new(0.0, 0.0); local];
                apply(chunk, b * per_block, per_block, &mut buf)
            });
        } else {
            let mut buf = vec![Complex64::new(0.0, 0.0); local];
            apply(&mut self.amps, 0, bases, &mut buf);
        }
        Ok(())
    }

    fn check_pauli(&self, p: &GeneralizedPauli) -> Result<()> {
        if p.dim() != self.d {
            return Err(Error::DimensionMismatch { left: self.d, right: p.dim() });
        }
        if let Some(m) = p.max_site() {
            if m >= self.n {
                return Err(Error::IndexOutOfRange { index: m, n: self.n });
            }
        }
        Ok(())
    }

    /// For output index `j`: the source index and phase exponent of `P|src⟩ = ω^ph |j⟩`.
    fn pauli_source(&self, factors: &[(usize, u32, u32)], j: usize) -> (usize, i64) {
        let d = self.d as usize;
        let mut src = j;
        let mut ph = 0i64;
        for &(stride, x, z) in factors {
            let digit = (j / stride) % d;
            let m = (digit + x as usize) % d;
            src = src - digit * stride + m * stride;
            ph += z as i64 * m as i64;
        }
        (src, ph)
    }

    fn pauli_factors(&self, p: &GeneralizedPauli) -> Vec<(usize, u32, u32)> {
        p.sites().map(|(q, op)| (self.stride(q), op.x, op.z)).collect()
    }

    pub fn apply_pauli(&mut self, p: &GeneralizedPauli) -> Result<()> {
        self.check_pauli(p)?;
        self.amps = self.pauli_image(p);
        Ok(())
    }

    /// Indices below the smallest factor stride do not change any factor digit,
    /// so `P` maps runs of that length to contiguous runs. Returns the run
    /// length and a work-group length that is a multiple of it.
    fn runs(&self, factors: &[(usize, u32, u32)]) -> (usize, usize) {
        let run = factors.iter().map(|f| f.0).min().unwrap_or(self.amps.len());
        (run, run * (CHUNK / run).max(1))
    }

    fn pauli_image(&self, p: &GeneralizedPauli) -> Vec<Complex64> {
        let factors = self.pauli_factors(p);
        let phases: Vec<Complex64> = (0..self.d as i64).map(|k| omega_pow(k, self.d)).collect();
        let global = p.phase_exp() as i64;
        let (run, group) = self.runs(&factors);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        out.par_chunks_mut(group).enumerate().for_each(|(g, chunk)| {
            for (r, dst) in chunk.chunks_mut(run).enumerate() {
                let (src, ph) = self.pauli_source(&factors, g * group + r * run);
                let w = phases[reduce(ph + global, self.d) as usize];
                for (o, a) in dst.iter_mut().zip(&self.amps[src..src + run]) {
                    *o = w * a;
                }
            }
        });
        out
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &GeneralizedPauli) -> Result<Complex64> {
        self.check_pauli(p)?;
        let factors = self.pauli_factors(p);
        let phases: Vec<Complex64> = (0..self.d as i64).map(|k| omega_pow(k, self.d)).collect();
        let global = p.phase_exp() as i64;
        let (run, group) = self.runs(&factors);
        // fixed grouping keeps the summation order independent of thread count
        let partial: Vec<Complex64> = self
            .amps
            .par_chunks(group)
            .enumerate()
            .map(|(g, chunk)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, lhs) in chunk.chunks(run).enumerate() {
                    let (src, ph) = self.pauli_source(&factors, g * group + r * run);
                    let w = phases[reduce(ph + global, self.d) as usize];
                    let dot: Complex64 = lhs.iter().zip(&self.amps[src..src + run]).map(|(a, b)| a.conj() * b).sum();
                    acc += w * dot;
                }
                acc
            })
            .collect();
        Ok(partial.into_iter().sum())
    }

    /// `⟨Π^λ⟩` evaluated as `Σ_k w_k ⟨O^k⟩`, clamped to `[0, 1]`.
    pub fn projector_expectation(&self, spec: &ChargeProjectorSpec) -> Result<f64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, w) in projector_weights(spec) {
            acc += w * self.expectation(&spec.pauli.pow(k as i64))?;
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// Born probabilities of the eigenvalues `ω^k`, `k = 0..d`.
    pub fn outcome_probabilities(&self, m: &GeneralizedPauli) -> Result<Vec<f64>> {
        self.check_pauli(m)?;
        // one pass per power of `m`, shared by all outcomes
        let moments = (0..self.d)
            .map(|k| if k == 0 { Ok(Complex64::new(1.0, 0.0)) } else { self.expectation(&m.pow(k as i64)) })
            .collect::<Result<Vec<_>>>()?;
        (0..self.d)
            .map(|lambda| {
                let spec = ChargeProjectorSpec::new(m.clone(), lambda)?;
                let acc: Complex64 = projector_weights(&spec).into_iter().map(|(k, w)| w * moments[k as usize]).sum();
                Ok(acc.re.clamp(0.0, 1.0))
            })
            .collect()
    }

    fn project(&mut self, m: &GeneralizedPauli, k: u32) -> Result<f64> {
        let spec = ChargeProjectorSpec::new(m.clone(), k)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (j, w) in projector_weights(&spec) {
            let img = self.pauli_image(&m.pow(j as i64));
            out.par_iter_mut().zip(img.par_iter()).for_each(|(o, v)| *o += w * v);
        }
        let prob = chunked_sum_f64(&out, |a| a.norm_sqr());
        if prob < PROB_FLOOR {
            return Err(Error::ZeroProbability { probability: prob });
        }
        let s = prob.sqrt();
        out.par_iter_mut().for_each(|a| *a /= s);
        self.amps = out;
        Ok(prob)
    }

    /// `|ψ⟩ ↦ Σ_k c_k P_k |ψ⟩` for a linear combination that is unitary.
    pub fn apply_pauli_combination(&mut self, terms: &[(Complex64, GeneralizedPauli)]) -> Result<()> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (c, p) in terms {
            self.check_pauli(p)?;
            let img = self.pauli_image(p);
            out.par_iter_mut().zip(img.par_iter()).for_each(|(o, v)| *o += c * v);
        }
        let norm = chunked_sum_f64(&out, |a| a.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("Pauli combination is not unitary on this state (norm {norm})")));
        }
        self.amps = out;
        Ok(())
    }

    /// Project onto the `ω^k` eigenspace of `m`; returns the branch probability.
    pub fn postselect(&mut self, m: &GeneralizedPauli, k: u32) -> Result<f64> {
        self.check_pauli(m)?;
        self.project(m, k % self.d)
    }

    /// Measure `m`, sampling the outcome by the Born rule. Returns `(k, probability)`.
    pub fn measure<R: Rng + ?Sized>(&mut self, m: &GeneralizedPauli, rng: &mut R) -> Result<(u32, f64)> {
        self.check_pauli(m)?;
        let probs = self.outcome_probabilities(m)?;
        let k = sample_index(&probs, rng.random::<f64>());
        let p = self.project(m, k as u32)?;
        Ok((k as u32, p))
    }

    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::Config(format!(
                "shape mismatch: ({}, {}) vs ({}, {})",
                self.d, self.n, other.d, other.n
            )));
        }
        let partial: Vec<Complex64> = self
            .amps
            .par_chunks(CHUNK)
            .zip(other.amps.par_chunks(CHUNK))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            .collect();
        Ok(partial.into_iter().sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Debug dump: magic `PFSV`, `u32` d, `u32` n, `u8` index order (0 = big-endian),
    /// then little-endian `f64` (re, im) pairs.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"PFSV")?;
        w.write_all(&self.d.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&[0u8])?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"PFSV" {
            return Err(Error::parse("not a state-vector dump"));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let d = u32::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let n = u32::from_le_bytes(word) as usize;
        let mut order = [0u8; 1];
        r.read_exact(&mut order)?;
        if order[0] != 0 {
            return Err(Error::parse("unsupported index order"));
        }
        let len = checked_len(d, n)?;
        let mut amps = Vec::with_capacity(len);
        let mut buf = [0u8; 8];
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            let im = f64::from_le_bytes(buf);
            amps.push(Complex64::new(re, im));
        }
        Ok(StateVector { d, n, amps })
    }
}

fn chunked_sum_f64(v: &[Complex64], f: impl Fn(&Complex64) -> f64 + Sync) -> f64 {
    let partial: Vec<f64> = v.par_chunks(CHUNK).map(|c| c.iter().map(&f).sum()).collect();
    partial.into_iter().sum()
}

/// Inverse-CDF draw from a discrete distribution.
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p / total;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_state() {
        let s = StateVector::zero(3, 12).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hadamard_makes_plus() {
        let h = GateMatrix::hadamard(3).unwrap();
        let mut s = StateVector::zero(3, 2).unwrap();
        s.apply_gate(&h, &[0]).unwrap();
        s.apply_gate(&h, &[1]).unwrap();
        for a in s.amplitudes() {
            assert!((a - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        }
        let mut one = StateVector::zero(3, 1).unwrap();
        one.apply_gate(&h, &[0]).unwrap();
        for a in one.amplitudes() {
            assert!((a - c(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pauli_action() {
        let mut s = StateVector::product(3, &[1]).unwrap();
        s.apply_pauli(&GeneralizedPauli::z(3, 0)).unwrap();
        assert!((s.amplitudes()[1] - omega_pow(1, 3)).norm() < 1e-12);
        let mut s = StateVector::zero(3, 1).unwrap();
        s.apply_pauli(&GeneralizedPauli::x(3, 0)).unwrap();
        assert!((s.amplitudes()[2] - c(1.0, 0.0)).norm() < 1e-12);
        for _ in 0..2 {
            s.apply_pauli(&GeneralizedPauli::x(3, 0)).unwrap();
        }
        assert!((s.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gate_errors() {
        let h = GateMatrix::hadamard(3).unwrap();
        let mut s = StateVector::zero(3, 2).unwrap();
        assert!(s.apply_gate(&h, &[2]).is_err());
        assert!(s.apply_gate(&h, &[0, 1]).is_err());
        let cz = GateMatrix::controlled_pauli(3, 0, 1, "CZ").unwrap();
        assert!(matches!(s.apply_gate(&cz, &[1, 1]), Err(Error::RepeatedTarget)));
    }

    #[test]
    fn capacity_cap() {
        assert!(matches!(StateVector::zero(3, 17), Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn measurement_on_eigenstate_is_certain() {
        let mut s = StateVector::zero(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (k, p) = s.measure(&GeneralizedPauli::z(3, 1), &mut rng).unwrap();
        assert_eq!(k, 0);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn postselect_xz_eigenvector() {
        let mut s = StateVector::zero(3, 1).unwrap();
        let xz = GeneralizedPauli::from_factors(3, 0, [(0, 1, 0), (0, 0, 1)]);
        let p = s.postselect(&xz, 0).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
        let want = [c(1.0, 0.0), omega_pow(-1, 3), c(1.0, 0.0)];
        let phase = s.amplitudes()[0] / s.amplitudes()[0].norm();
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a - w / 3f64.sqrt() * phase).norm() < 1e-12);
        }
        // zero-probability branch
        let mut z = StateVector::zero(3, 1).unwrap();
        assert!(matches!(z.postselect(&GeneralizedPauli::z(3, 0), 1), Err(Error::ZeroProbability { .. })));
    }

    #[test]
    fn dump_round_trip() {
        let h = GateMatrix::hadamard(3).unwrap();
        let mut s = StateVector::zero(3, 3).unwrap();
        s.apply_gate(&h, &[1]).unwrap();
        let mut buf = Vec::new();
        s.write_dump(&mut buf).unwrap();
        assert_eq!(StateVector::read_dump(&buf[..]).unwrap(), s);
    }

    #[test]
    fn orthogonal_basis_states() {
        let a = StateVector::product(3, &[0, 1]).unwrap();
        let b = StateVector::product(3, &[1, 1]).unwrap();
        assert_eq!(a.fidelity(&b).unwrap(), 0.0);
        assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-15);
    }
}
