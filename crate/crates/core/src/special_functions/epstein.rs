//! Analytically continued Epstein zeta function
//! Z(w; s) = Σ_{x∈X∖{0}} e^{2πi x·w} |x|^{−s}, for w ∉ X*.
//!
//! Splitting the Mellin integral of |x|^{−s} at t = 1 and applying Poisson
//! summation to the lower piece gives
//!
//!   π^{−s/2} Γ(s/2) Z = −2/s + Σ_{x≠0} cos(2πx·w) (π|x|²)^{−s/2} Γ(s/2, π|x|²)
//!                     + V^{−1} Σ_{p∈X*} (π|p+w|²)^{−(d−s)/2} Γ((d−s)/2, π|p+w|²).

use num_complex::Complex;

use super::gamma::{complex_gamma, complex_upper_incomplete_gamma, gamma, upper_incomplete_gamma};
use crate::error::{Error, Result};
use crate::lattice::tail::{gaussian_tail, radius_for_tolerance};
use crate::lattice::BravaisLattice;
use crate::scalar::{CompensatedSum, Real};

const POLE_DISTANCE: f64 = 1e-9;

/// Distance from w to the nearest point of X*.
fn distance_to_dual<T: Real>(lattice: &BravaisLattice<T>, w: &[T]) -> T {
    let d = lattice.dim();
    // Dual coordinates of w are A^T w.
    let g = lattice.generator();
    let coords: Vec<T> = (0..d)
        .map(|j| (0..d).map(|i| g[i * d + j] * w[i]).sum())
        .collect();
    let rounded: Vec<T> = coords.iter().map(|c| c.round()).collect();
    let inv = lattice.inverse();
    (0..d)
        .map(|i| {
            let p: T = (0..d).map(|j| inv[j * d + i] * rounded[j]).sum();
            (w[i] - p).powi(2)
        })
        .sum::<T>()
        .sqrt()
}

fn validate<T: Real>(lattice: &BravaisLattice<T>, w: &[T], re_s: T) -> Result<()> {
    if w.len() != lattice.dim() {
        return Err(Error::InvalidArgument(format!(
            "shift has length {}, expected {}",
            w.len(),
            lattice.dim()
        )));
    }
    if !(re_s > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "Epstein zeta needs Re s > 0, got {re_s}"
        )));
    }
    let dist = distance_to_dual(lattice, w);
    if dist < T::lit(POLE_DISTANCE) {
        return Err(Error::NearDualPoint(dist.as_f64()));
    }
    Ok(())
}

/// Radii for the direct and dual sums given Re s.
fn radii<T: Real>(
    lattice: &BravaisLattice<T>,
    dual: &BravaisLattice<T>,
    re_s: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let pi = std::f64::consts::PI;
    let d = lattice.dim() as f64;
    // term(a) e^{πa²} is nonincreasing, so term(a) anchors a Gaussian envelope with β = π.
    let term = |a: f64, h: f64| {
        let x = pi * a * a;
        x.powf(-h) * upper_incomplete_gamma(h, x).unwrap_or(f64::INFINITY)
    };
    let direct = radius_for_tolerance(lattice, tol, |r| {
        gaussian_tail(lattice, r, pi, |a| term(a, re_s / 2.0))
    })?;
    let inv_v = 1.0 / lattice.covolume().as_f64();
    let dual_radius = radius_for_tolerance(dual, tol, |r| {
        // The shifted dual sum is centred at −w; the bound holds for any centre.
        inv_v * gaussian_tail(dual, r, pi, |a| term(a, (d - re_s) / 2.0))
    })?;
    Ok((direct, dual_radius))
}

/// Z(w; s) for real s > 0 and Cartesian dual-space shift w ∉ X*.
pub fn epstein_zeta<T: Real>(lattice: &BravaisLattice<T>, w: &[T], s: T, tol: T) -> Result<T> {
    validate(lattice, w, s)?;
    let d = lattice.dim();
    let dual = lattice.dual();
    let half = T::lit(0.5);
    let h_direct = s * half;
    let h_dual = (T::of(d) - s) * half;
    // Split the tolerance between the two sums and scale by the final prefactor.
    let prefactor = T::PI().powf(h_direct) / gamma(h_direct);
    let budget = (tol / (T::lit(4.0) * prefactor.max(T::one()))).as_f64();
    let (r_direct, r_dual) = radii(lattice, &dual, s.as_f64(), budget)?;
    let two_pi = T::lit(2.0 * std::f64::consts::PI);

    let mut direct = CompensatedSum::new();
    let origin = vec![T::zero(); d];
    let mut failure = None;
    lattice.for_each_point(&origin, T::lit(r_direct), |n, x| {
        if n.iter().all(|&c| c == 0) {
            return;
        }
        let x2: T = x.iter().map(|v| *v * *v).sum();
        let u = T::PI() * x2;
        let phase: T = x.iter().zip(w).map(|(a, b)| *a * *b).sum();
        match upper_incomplete_gamma(h_direct, u) {
            Ok(g) => direct.add((two_pi * phase).cos() * u.powf(-h_direct) * g),
            Err(e) => failure = Some(e),
        }
    })?;
    let mut reciprocal = CompensatedSum::new();
    let center: Vec<T> = w.iter().map(|&v| -v).collect();
    dual.for_each_point(&center, T::lit(r_dual), |_, p| {
        let q2: T = p.iter().zip(w).map(|(a, b)| (*a + *b) * (*a + *b)).sum();
        let u = T::PI() * q2;
        match upper_incomplete_gamma(h_dual, u) {
            Ok(g) => reciprocal.add(u.powf(-h_dual) * g),
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let bracket = -T::lit(2.0) / s + direct.value() + reciprocal.value() / lattice.covolume();
    Ok(bracket * prefactor)
}

/// Z(w; s) for complex s with Re s > 0.
pub fn epstein_zeta_complex<T: Real>(
    lattice: &BravaisLattice<T>,
    w: &[T],
    s: Complex<T>,
    tol: T,
) -> Result<Complex<T>> {
    validate(lattice, w, s.re)?;
    let d = lattice.dim();
    let dual = lattice.dual();
    let half = T::lit(0.5);
    let h_direct = s * half;
    let h_dual = (Complex::new(T::of(d), T::zero()) - s) * half;
    let pi_c = Complex::new(T::PI(), T::zero());
    let prefactor = (h_direct * pi_c.ln()).exp() / complex_gamma(h_direct);
    let budget = (tol / (T::lit(4.0) * prefactor.norm().max(T::one()))).as_f64();
    let (r_direct, r_dual) = radii(lattice, &dual, s.re.as_f64(), budget)?;
    let two_pi = T::lit(2.0 * std::f64::consts::PI);

    let mut direct = Complex::new(T::zero(), T::zero());
    let mut failure = None;
    let origin = vec![T::zero(); d];
    lattice.for_each_point(&origin, T::lit(r_direct), |n, x| {
        if n.iter().all(|&c| c == 0) {
            return;
        }
        let x2: T = x.iter().map(|v| *v * *v).sum();
        let u = T::PI() * x2;
        let phase: T = x.iter().zip(w).map(|(a, b)| *a * *b).sum();
        match complex_upper_incomplete_gamma(h_direct, u) {
            Ok(g) => direct = direct + (-h_direct * u.ln()).exp() * g * (two_pi * phase).cos(),
            Err(e) => failure = Some(e),
        }
    })?;
    let mut reciprocal = Complex::new(T::zero(), T::zero());
    let center: Vec<T> = w.iter().map(|&v| -v).collect();
    dual.for_each_point(&center, T::lit(r_dual), |_, p| {
        let q2: T = p.iter().zip(w).map(|(a, b)| (*a + *b) * (*a + *b)).sum();
        let u = T::PI() * q2;
        match complex_upper_incomplete_gamma(h_dual, u) {
            Ok(g) => reciprocal = reciprocal + (-h_dual * u.ln()).exp() * g,
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let two = Complex::new(T::lit(2.0), T::zero());
    let bracket = -two / s + direct + reciprocal / lattice.covolume();
    Ok(bracket * prefactor)
}
