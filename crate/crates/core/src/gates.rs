//! Gate matrices and the qutrit gate library.
//!
//! Two-qudit matrices use the basis order `|00⟩, |01⟩, …` with the first
//! tensor factor most significant, matching [`StateVector`](crate::statevector::StateVector).

use crate::error::{Error, Result};
use crate::modular::{self, omega_pow};
use crate::pauli::GeneralizedPauli;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

pub type CMatrix = DMatrix<Complex64>;

const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    name: String,
    d: u32,
    arity: usize,
    matrix: CMatrix,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius distance `min_φ ‖e^{iφ} a − b‖`.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let inner: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter().zip(b.iter()).map(|(x, y)| (x * phase - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

impl GateMatrix {
    pub fn new(name: impl Into<String>, d: u32, arity: usize, matrix: CMatrix) -> Result<Self> {
        let name = name.into();
        if !modular::is_odd_prime(d) {
            return Err(Error::InvalidDimension(d));
        }
        let dim = (d as usize).pow(arity as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::GateConsistency { name, msg: format!("expected a {dim}x{dim} matrix") });
        }
        let err = max_abs_diff(&(matrix.adjoint() * &matrix), &CMatrix::identity(dim, dim));
        if err > UNITARY_TOL {
            return Err(Error::GateConsistency { name, msg: format!("not unitary (deviation {err:e})") });
        }
        Ok(GateMatrix { name, d, arity, matrix })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> GateMatrix {
        let name = match self.name.strip_suffix('†') {
            Some(base) => base.to_string(),
            None => format!("{}†", self.name),
        };
        GateMatrix { name, d: self.d, arity: self.arity, matrix: self.matrix.adjoint() }
    }

    /// Generalized Hadamard `H|j⟩ = Σ_i ω^{ij}|i⟩/√d`.
    pub fn hadamard(d: u32) -> Result<Self> {
        let s = (d as f64).sqrt();
        let m = CMatrix::from_fn(d as usize, d as usize, |i, j| omega_pow((i * j) as i64, d) / s);
        Self::new("H", d, 1, m)
    }

    /// `K|j⟩ = |d − j⟩`.
    pub fn negation(d: u32) -> Result<Self> {
        let du = d as usize;
        let m = CMatrix::from_fn(du, du, |i, j| if i == (du - j) % du { c(1.0, 0.0) } else { c(0.0, 0.0) });
        Self::new("K", d, 1, m)
    }

    /// `Σ_j |j⟩⟨j| ⊗ (X^x Z^z)^j`, i.e. the target receives `U^j` for control value `j`.
    pub fn controlled_pauli(d: u32, x: i64, z: i64, name: &str) -> Result<Self> {
        let u = GeneralizedPauli::single(d, 0, x, z);
        let du = d as usize;
        let mut m = CMatrix::zeros(du * du, du * du);
        for j in 0..du {
            let block = u.pow(j as i64).local_matrix(&[0])?;
            m.view_mut((j * du, j * du), (du, du)).copy_from(&block);
        }
        Self::new(name, d, 2, m)
    }

    /// Matrix of a Pauli on sites `0..arity`.
    pub fn from_pauli(p: &GeneralizedPauli, arity: usize, name: &str) -> Result<Self> {
        let order: Vec<usize> = (0..arity).collect();
        Self::new(name, p.dim(), arity, p.local_matrix(&order)?)
    }

    pub fn swap(d: u32) -> Result<Self> {
        let du = d as usize;
        let mut m = CMatrix::zeros(du * du, du * du);
        for a in 0..du {
            for b in 0..du {
                m[(b * du + a, a * du + b)] = c(1.0, 0.0);
            }
        }
        Self::new("SWAP", d, 2, m)
    }

    /// Embed a single-qudit gate on position `pos` of a two-qudit register.
    pub fn on_pair(&self, pos: usize) -> GateMatrix {
        assert_eq!(self.arity, 1);
        let id = CMatrix::identity(self.d as usize, self.d as usize);
        let matrix = if pos == 0 { self.matrix.kronecker(&id) } else { id.kronecker(&self.matrix) };
        GateMatrix { name: format!("{}[{pos}]", self.name), d: self.d, arity: 2, matrix }
    }

    /// Two-qudit gate with its qudit order reversed.
    pub fn reversed(&self) -> GateMatrix {
        assert_eq!(self.arity, 2);
        let s = Self::swap(self.d).expect("swap is unitary");
        let matrix = s.matrix() * &self.matrix * s.matrix();
        GateMatrix { name: format!("{}~", self.name), d: self.d, arity: 2, matrix }
    }
}

/// Compose a circuit given in time order.
pub fn compose<'a, I>(steps: I, dim: usize) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    steps.into_iter().fold(CMatrix::identity(dim, dim), |acc, g| g * acc)
}

fn rot(t: f64, lo: usize) -> CMatrix {
    let mut m = CMatrix::identity(3, 3);
    m[(lo, lo)] = c(t.cos(), 0.0);
    m[(lo, lo + 1)] = c(-t.sin(), 0.0);
    m[(lo + 1, lo)] = c(t.sin(), 0.0);
    m[(lo + 1, lo + 1)] = c(t.cos(), 0.0);
    m
}

fn diag(phases: [f64; 3]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, phases.iter().map(|&p| Complex64::from_polar(1.0, p))))
}

/// Single-qutrit `G_v(θ₁, θ₂)`: diagonal phases and Givens rotations in the
/// `{|1⟩,|2⟩}` and `{|0⟩,|1⟩}` subspaces.
pub fn gv_matrix(theta1: f64, theta2: f64) -> CMatrix {
    let mut minus = CMatrix::identity(3, 3);
    minus[(2, 2)] = c(-1.0, 0.0);
    diag([0.0, PI / 3.0, PI / 3.0])
        * rot(theta1, 1)
        * rot(theta2, 0)
        * diag([0.0, 4.0 * PI / 3.0, 5.0 * PI / 6.0])
        * rot(theta1, 1)
        * minus
}

/// `U_v` transcribed entry by entry from its published 9×9 matrix.
pub fn uv_published() -> CMatrix {
    let w = omega_pow(1, 3);
    let wb = w.conj();
    let o = c(1.0, 0.0);
    let z = c(0.0, 0.0);
    #[rustfmt::skip]
    let rows = [
        [o, w, o, z, z, z, z, z, z],
        [o, o, w, z, z, z, z, z, z],
        [w, o, o, z, z, z, z, z, z],
        [z, z, z, o, o, w, z, z, z],
        [z, z, z, w, o, o, z, z, z],
        [z, z, z, o, w, o, z, z, z],
        [z, z, z, z, z, z, o, wb, wb],
        [z, z, z, z, z, z, wb, o, wb],
        [z, z, z, z, z, z, wb, wb, o],
    ];
    CMatrix::from_fn(9, 9, |r, col| rows[r][col] / 3f64.sqrt())
}

/// `U_h` transcribed entry by entry from its published 9×9 matrix.
pub fn uh_published() -> CMatrix {
    let w = omega_pow(1, 3);
    let wb = w.conj();
    let o = c(1.0, 0.0);
    let z = c(0.0, 0.0);
    #[rustfmt::skip]
    let rows = [
        [o, z, z, w, z, z, o, z, z],
        [z, o, z, z, wb, z, z, wb, z],
        [z, z, o, z, z, o, z, z, w],
        [o, z, z, o, z, z, w, z, z],
        [z, wb, z, z, o, z, z, wb, z],
        [z, z, w, z, z, o, z, z, o],
        [w, z, z, o, z, z, o, z, z],
        [z, wb, z, z, wb, z, z, o, z],
        [z, z, o, z, z, w, z, z, o],
    ];
    CMatrix::from_fn(9, 9, |r, col| rows[r][col] / 3f64.sqrt())
}

/// `(1/√3)(1 + ω Z_i† X_j + Z_i X_j†)` on `(i, j) = (0, 1)`.
pub fn uv_algebraic() -> CMatrix {
    let id = CMatrix::identity(9, 9);
    let a = GeneralizedPauli::from_factors(3, 1, [(0, 0, -1), (1, 1, 0)]);
    let b = GeneralizedPauli::from_factors(3, 0, [(0, 0, 1), (1, -1, 0)]);
    (id + a.local_matrix(&[0, 1]).unwrap() + b.local_matrix(&[0, 1]).unwrap()) / c(3f64.sqrt(), 0.0)
}

/// `(1/√3)(1 + ω Z_j X_i + Z_j† X_i†)` on `(i, j) = (0, 1)`.
pub fn uh_algebraic() -> CMatrix {
    let id = CMatrix::identity(9, 9);
    let a = GeneralizedPauli::from_factors(3, 1, [(1, 0, 1), (0, 1, 0)]);
    let b = GeneralizedPauli::from_factors(3, 0, [(1, 0, -1), (0, -1, 0)]);
    (id + a.local_matrix(&[0, 1]).unwrap() + b.local_matrix(&[0, 1]).unwrap()) / c(3f64.sqrt(), 0.0)
}

/// Minimize a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// Named step of a fixed two-qutrit circuit: gate name and positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitStep {
    pub gate: &'static str,
    pub on: &'static [usize],
}

/// `U_v` realized as `Z†_j, CZ†, G_v(j), CZ, Z_j` (time order).
pub const UV_CIRCUIT: &[CircuitStep] = &[
    CircuitStep { gate: "Z†", on: &[1] },
    CircuitStep { gate: "CZ†", on: &[0, 1] },
    CircuitStep { gate: "Gv", on: &[1] },
    CircuitStep { gate: "CZ", on: &[0, 1] },
    CircuitStep { gate: "Z", on: &[1] },
];

/// `U_h(i, j)` from `U_v`: `K_j, SWAP, U_v, SWAP, K_j` (time order).
pub const UH_CIRCUIT: &[CircuitStep] = &[
    CircuitStep { gate: "K", on: &[1] },
    CircuitStep { gate: "SWAP", on: &[0, 1] },
    CircuitStep { gate: "Uv", on: &[0, 1] },
    CircuitStep { gate: "SWAP", on: &[0, 1] },
    CircuitStep { gate: "K", on: &[1] },
];

/// Qutrit SWAP from `U_v`, `U_v†` and `K` (time order), equal to SWAP up to a global phase.
pub const SWAP_CIRCUIT: &[CircuitStep] = &[
    CircuitStep { gate: "K", on: &[1] },
    CircuitStep { gate: "Uv", on: &[1, 0] },
    CircuitStep { gate: "Uv†", on: &[0, 1] },
    CircuitStep { gate: "K", on: &[0] },
    CircuitStep { gate: "Uv", on: &[0, 1] },
    CircuitStep { gate: "Uv†", on: &[1, 0] },
    CircuitStep { gate: "K", on: &[1] },
    CircuitStep { gate: "Uv", on: &[1, 0] },
    CircuitStep { gate: "Uv†", on: &[0, 1] },
];

/// The d = 3 gate set used by the protocols, built and cross-checked once.
#[derive(Debug, Clone)]
pub struct QutritLibrary {
    pub h: GateMatrix,
    pub k: GateMatrix,
    pub z: GateMatrix,
    pub cz: GateMatrix,
    pub cx: GateMatrix,
    pub uv: GateMatrix,
    pub uh: GateMatrix,
    pub gv: GateMatrix,
    pub swap: GateMatrix,
    pub theta1: f64,
    /// Refined second rotation angle of `G_v`, in radians.
    pub theta2: f64,
}

impl QutritLibrary {
    pub fn build() -> Result<Self> {
        let d = 3;
        let check = |name: &str, a: &CMatrix, b: &CMatrix, tol: f64, phase_free: bool| -> Result<()> {
            let err = if phase_free { phase_aligned_distance(a, b) } else { max_abs_diff(a, b) };
            if err > tol {
                return Err(Error::GateConsistency { name: name.into(), msg: format!("deviation {err:e}") });
            }
            Ok(())
        };

        let uv_m = uv_published();
        check("Uv", &uv_m, &uv_algebraic(), 1e-12, false)?;
        let uh_m = uh_published();
        check("Uh", &uh_m, &uh_algebraic(), 1e-12, false)?;

        let h = GateMatrix::hadamard(d)?;
        let k = GateMatrix::negation(d)?;
        let z = GateMatrix::from_pauli(&GeneralizedPauli::z(d, 0), 1, "Z")?;
        let cz = GateMatrix::controlled_pauli(d, 0, 1, "CZ")?;
        let cx = GateMatrix::controlled_pauli(d, 1, 0, "CX")?;
        let swap = GateMatrix::swap(d)?;
        let uv = GateMatrix::new("Uv", d, 2, uv_m)?;
        let uh = GateMatrix::new("Uh", d, 2, uh_m)?;

        let theta1 = PI / 4.0;
        let lib_for = |gv: &CMatrix| -> CMatrix {
            let gv = GateMatrix { name: "Gv".into(), d, arity: 1, matrix: gv.clone() };
            circuit_matrix(UV_CIRCUIT, &|name| match name {
                "Z" => Some(z.clone()),
                "Z†" => Some(z.adjoint()),
                "CZ" => Some(cz.clone()),
                "CZ†" => Some(cz.adjoint()),
                "Gv" => Some(gv.clone()),
                _ => None,
            })
        };
        let theta2 = golden_section_min(
            |t| phase_aligned_distance(&lib_for(&gv_matrix(theta1, t)), uv.matrix()),
            1.69 * PI,
            1.70 * PI,
            1e-15,
        );
        let gv_m = gv_matrix(theta1, theta2);
        check("Gv circuit", &lib_for(&gv_m), uv.matrix(), 1e-9, true)?;
        let gv = GateMatrix::new("Gv", d, 1, gv_m)?;

        let lookup = |name: &str| -> Option<GateMatrix> {
            match name {
                "K" => Some(k.clone()),
                "SWAP" => Some(swap.clone()),
                "Uv" => Some(uv.clone()),
                "Uv†" => Some(uv.adjoint()),
                _ => None,
            }
        };
        check("SWAP circuit", &circuit_matrix(SWAP_CIRCUIT, &lookup), swap.matrix(), 1e-9, true)?;
        check("Uh circuit", &circuit_matrix(UH_CIRCUIT, &lookup), uh.matrix(), 1e-12, false)?;

        Ok(QutritLibrary { h, k, z, cz, cx, uv, uh, gv, swap, theta1, theta2 })
    }

    /// Gate by name; a trailing `†` selects the adjoint.
    pub fn get(&self, name: &str) -> Option<GateMatrix> {
        if let Some(base) = name.strip_suffix('†') {
            return self.get(base).map(|g| g.adjoint());
        }
        Some(match name {
            "H" => self.h.clone(),
            "K" => self.k.clone(),
            "Z" => self.z.clone(),
            "CZ" => self.cz.clone(),
            "CX" => self.cx.clone(),
            "Uv" => self.uv.clone(),
            "Uh" => self.uh.clone(),
            "Gv" => self.gv.clone(),
            "SWAP" => self.swap.clone(),
            _ => return None,
        })
    }
}

/// Two-qutrit matrix of a fixed circuit; `lookup` resolves gate names.
pub fn circuit_matrix(steps: &[CircuitStep], lookup: &dyn Fn(&str) -> Option<GateMatrix>) -> CMatrix {
    let mats: Vec<CMatrix> = steps
        .iter()
        .map(|s| {
            let g = lookup(s.gate).unwrap_or_else(|| panic!("unknown gate {}", s.gate));
            match (g.arity(), s.on) {
                (1, [p]) => g.on_pair(*p).matrix().clone(),
                (2, [0, 1]) => g.matrix().clone(),
                (2, [1, 0]) => g.reversed().matrix().clone(),
                _ => panic!("bad placement for {}", s.gate),
            }
        })
        .collect();
    compose(mats.iter(), 9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_builds() {
        let lib = QutritLibrary::build().unwrap();
        assert!((lib.theta2 / PI - 1.696).abs() < 1e-3);
        // closed form of the refined angle
        assert!((lib.theta2 - (2.0 * PI - (1.0 / 3f64.sqrt()).acos())).abs() < 1e-9);
    }

    #[test]
    fn uv_column_zero() {
        // U_v|00> = (|00> + |01> + ω|02>)/√3
        let m = uv_published();
        let s = 3f64.sqrt();
        assert!((m[(0, 0)] - c(1.0 / s, 0.0)).norm() < 1e-15);
        assert!((m[(1, 0)] - c(1.0 / s, 0.0)).norm() < 1e-15);
        assert!((m[(2, 0)] - omega_pow(1, 3) / s).norm() < 1e-15);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_element(3, 3, c(1.0, 0.0));
        assert!(GateMatrix::new("bad", 3, 1, m).is_err());
    }

    #[test]
    fn adjoint_names() {
        let h = GateMatrix::hadamard(3).unwrap();
        assert_eq!(h.adjoint().name(), "H†");
        assert_eq!(h.adjoint().adjoint().name(), "H");
    }

    #[test]
    fn k_is_fourier_squared() {
        let h = GateMatrix::hadamard(3).unwrap();
        let k = GateMatrix::negation(3).unwrap();
        assert!(max_abs_diff(&(h.matrix() * h.matrix()), k.matrix()) < 1e-12);
    }
}
