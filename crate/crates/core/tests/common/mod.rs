//! Independent oracles shared by the integration tests. Nothing here calls
//! into the crate's numerical routines.
#![allow(dead_code)]

use std::f64::consts::PI;

use ionic_lattice::Lattice;
use rand::Rng;

/// Double-exponential (tanh-sinh) quadrature on [a, b]; tolerates endpoint singularities.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mut h = 1.0;
    let mut previous = f64::NAN;
    for _ in 0..12 {
        let mut sum = 0.0;
        let mut k: i64 = -((6.0 / h) as i64);
        loop {
            let t = k as f64 * h;
            if t > 6.0 {
                break;
            }
            let u = 0.5 * PI * t.sinh();
            let x = u.tanh();
            // 1 − x and 1 + x without cancellation.
            let one_minus = 1.0 / (u.exp() * u.cosh());
            let one_plus = 1.0 / ((-u).exp() * u.cosh());
            let w = 0.5 * PI * t.cosh() / (u.cosh() * u.cosh());
            let xa = if x > 0.0 { b - half * one_minus } else { a + half * one_plus };
            if w > 0.0 && xa > a && xa < b {
                let v = f(xa);
                if v.is_finite() {
                    sum += w * v;
                }
            }
            k += 1;
        }
        let estimate = half * h * sum;
        if (estimate - previous).abs() <= 1e-14 * estimate.abs().max(1e-300) {
            return estimate;
        }
        previous = estimate;
        h /= 2.0;
    }
    previous
}

/// Exp-sinh quadrature on [a, ∞) for integrands decaying at least algebraically.
pub fn exp_sinh(f: impl Fn(f64) -> f64, a: f64) -> f64 {
    let mut h = 0.5;
    let mut previous = f64::NAN;
    for _ in 0..12 {
        let mut sum = 0.0;
        let mut k: i64 = -((5.0 / h) as i64);
        loop {
            let t = k as f64 * h;
            if t > 5.0 {
                break;
            }
            let e = (0.5 * PI * t.sinh()).exp();
            let x = a + e;
            let w = 0.5 * PI * t.cosh() * e;
            if x.is_finite() && w.is_finite() && x > a {
                let v = f(x);
                if v.is_finite() {
                    sum += w * v;
                }
            }
            k += 1;
        }
        let estimate = h * sum;
        if (estimate - previous).abs() <= 1e-14 * estimate.abs().max(1e-300) {
            return estimate;
        }
        previous = estimate;
        h /= 2.0;
    }
    previous
}

/// Γ(a, x) for a > 0 by quadrature of its defining integral.
pub fn incomplete_gamma_quadrature(a: f64, x: f64) -> f64 {
    let f = |t: f64| t.powf(a - 1.0) * (-t).exp();
    if x == 0.0 {
        tanh_sinh(f, 0.0, 1.0) + exp_sinh(f, 1.0)
    } else {
        exp_sinh(f, x)
    }
}

/// Integer coordinates of lattice points with |x| ≤ R, by scanning a generous box.
pub fn brute_ball(lattice: &Lattice, radius: f64, include_origin: bool) -> Vec<Vec<i64>> {
    let d = lattice.dim();
    // |n_i| ≤ |x|·‖A^{−1}‖_F, with a margin.
    let inv = lattice.inverse();
    let frob: f64 = inv.iter().map(|v| v * v).sum::<f64>().sqrt();
    let bound = (radius * frob).ceil() as i64 + 1;
    let side = (2 * bound + 1) as usize;
    let mut out = Vec::new();
    for flat in 0..side.pow(d as u32) {
        let mut rest = flat;
        let mut n = vec![0_i64; d];
        for c in n.iter_mut().rev() {
            *c = (rest % side) as i64 - bound;
            rest /= side;
        }
        if !include_origin && n.iter().all(|&c| c == 0) {
            continue;
        }
        let x = lattice.point(&n);
        if x.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
            out.push(n);
        }
    }
    out.sort();
    out
}

/// Random lattice with generator condition number ≤ `max_cond`.
pub fn random_lattice<R: Rng>(rng: &mut R, d: usize, max_cond: f64) -> Lattice {
    loop {
        let g: Vec<f64> = (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let Ok(lattice) = Lattice::from_generator(d, g.clone()) else { continue };
        if condition_number(&g, d) <= max_cond {
            return lattice;
        }
    }
}

/// 2-norm condition number from the eigenvalues of AᵀA.
pub fn condition_number(g: &[f64], d: usize) -> f64 {
    let mut gram = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            gram[i * d + j] = (0..d).map(|l| g[l * d + i] * g[l * d + j]).sum();
        }
    }
    let ev = jacobi_eigenvalues(&gram, d);
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(0.0, f64::max);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        (hi / lo).sqrt()
    }
}

/// Eigenvalues of a symmetric row-major matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    let mut a = matrix.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Coordinates of flat index f in {0..N−1}^d, first coordinate most significant.
pub fn coords(mut f: usize, d: usize, n: usize) -> Vec<usize> {
    let mut c = vec![0; d];
    for slot in c.iter_mut().rev() {
        *slot = f % n;
        f /= n;
    }
    c
}

/// ξ_k = N^{−d} Σ_{x,y} φ_x φ_y cos(2π(y−x)·k/N), straight from the definition.
pub fn naive_spectral_density(values: &[f64], d: usize, n: usize) -> Vec<f64> {
    let size = values.len();
    let nd = size as f64;
    (0..size)
        .map(|k| {
            let kc = coords(k, d, n);
            let (mut re, mut im) = (0.0, 0.0);
            for (x, phi) in values.iter().enumerate() {
                let xc = coords(x, d, n);
                let dot: usize = xc.iter().zip(&kc).map(|(a, b)| a * b).sum();
                let angle = 2.0 * PI * dot as f64 / n as f64;
                re += phi * angle.cos();
                im += phi * angle.sin();
            }
            (re * re + im * im) / nd
        })
        .collect()
}

/// Σ_{x≠0, |x|≤R} f(|x|²) cos(2π x·k/N) by brute force.
pub fn brute_mode_sum(lattice: &Lattice, k: &[i64], n: usize, radius: f64, f: impl Fn(f64) -> f64) -> f64 {
    brute_ball(lattice, radius, false)
        .iter()
        .map(|m| {
            let x = lattice.point(m);
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let dot: i64 = m.iter().zip(k).map(|(a, b)| a * b).sum();
            f(r2) * (2.0 * PI * dot as f64 / n as f64).cos()
        })
        .sum()
}

/// Rational numbers p/q with denominator ≤ 6 on [0,1), for fixed-point shifts.
pub fn simple_fractions() -> Vec<f64> {
    let mut v: Vec<f64> = (1..=6).flat_map(|q| (0..q).map(move |p| p as f64 / q as f64)).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn madelung_half() -> f64 {
    // Rock-salt Madelung constant, 1.7475645946...
    -1.747_564_594_633_182 / 2.0
}
