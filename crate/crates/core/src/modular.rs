//! Small helpers for arithmetic in the prime field ℤ_d.

use num_complex::Complex64;
use std::f64::consts::PI;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// True for the dimensions this crate supports: odd primes.
pub fn is_odd_prime(d: u32) -> bool {
    d > 2 && is_prime(d)
}

/// Reduce a signed integer into `0..d`.
#[inline]
pub fn reduce(v: i64, d: u32) -> u32 {
    v.rem_euclid(d as i64) as u32
}

#[inline]
pub fn neg(a: u32, d: u32) -> u32 {
    (d - a % d) % d
}

/// Multiplicative inverse modulo a prime `d`. Panics on zero.
pub fn inv(a: u32, d: u32) -> u32 {
    let a = a % d;
    assert!(a != 0, "zero has no inverse mod {d}");
    // Fermat: a^(d-2)
    pow(a, d - 2, d)
}

pub fn pow(mut base: u32, mut exp: u32, d: u32) -> u32 {
    let m = d as u64;
    let mut acc = 1u64;
    let mut b = base as u64 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    base = acc as u32;
    base
}

/// ω^k with ω = e^{2πi/d}.
#[inline]
pub fn omega_pow(k: i64, d: u32) -> Complex64 {
    let k = reduce(k, d);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

/// Solution set of a linear system over ℤ_d: one particular solution plus a
/// basis of the homogeneous solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<u32>,
    pub kernel: Vec<Vec<u32>>,
}

/// Solve `A x = b` over ℤ_d (d prime) by Gauss-Jordan elimination.
/// Every row of `a` must have length `nvars`. Returns `None` if inconsistent.
pub fn solve_linear(a: &[Vec<u32>], b: &[u32], nvars: usize, d: u32) -> Option<AffineSolution> {
    let dd = d as u64;
    let mut rows: Vec<(Vec<u64>, u64)> = a
        .iter()
        .zip(b)
        .map(|(r, &v)| (r.iter().map(|&x| (x % d) as u64).collect(), (v % d) as u64))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nvars {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0[c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let s = inv(rows[r].0[c] as u32, d) as u64;
        rows[r].0.iter_mut().for_each(|v| *v = *v * s % dd);
        rows[r].1 = rows[r].1 * s % dd;
        let (pr, pb) = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            let f = row.0[c];
            if i == r || f == 0 {
                continue;
            }
            for (v, &pv) in row.0.iter_mut().zip(&pr) {
                *v = (*v + (dd - f) * pv) % dd;
            }
            row.1 = (row.1 + (dd - f) * pb) % dd;
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|(_, v)| *v != 0) {
        return None;
    }
    let mut particular = vec![0u32; nvars];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = rows[i].1 as u32;
    }
    let kernel = (0..nvars)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0u32; nvars];
            v[free] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = ((dd - rows[i].0[free]) % dd) as u32;
            }
            v
        })
        .collect();
    Some(AffineSolution { particular, kernel })
}
