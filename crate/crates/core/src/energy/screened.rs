//! Convergence-factor route: S(η) = (1/2N^d) Σ_{x≠0} s_x f(x) e^{−η|x|²},
//! extrapolated to η → 0.
//!
//! For neutral charges S(η) − E has an asymptotic expansion in integer powers
//! of η whose remainder is exponentially small in 1/η, so the sequence of η is
//! halved until Richardson estimates over a sliding window settle.
//! Non-neutral summable Riesz charges add powers η^{(s−d)/2 + j}.

use serde::{Deserialize, Serialize};

use super::{check_compatible, check_tol, class_sums, weighted, EnergyReport, Route, NEUTRAL_TOL};
use crate::charges::{autocorrelation, ChargeConfiguration};
use crate::error::{Error, Result};
use crate::lattice::tail::radius_for_tolerance;
use crate::lattice::BravaisLattice;
use crate::potentials::Potential;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceFactorOptions {
    /// Initial screening parameters, decreasing.
    pub etas: Vec<f64>,
    /// Number of correction terms fitted in each Richardson window.
    pub order: usize,
    /// Further halvings of η allowed after `etas` is exhausted.
    pub max_halvings: usize,
    /// Agreement required between successive extrapolated values.
    pub tol: f64,
}

impl Default for ConvergenceFactorOptions {
    fn default() -> Self {
        Self {
            etas: vec![0.2, 0.1, 0.05, 0.025],
            order: 4,
            max_halvings: 12,
            tol: 1e-10,
        }
    }
}

/// Screened sums and the extrapolation history.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub etas: Vec<f64>,
    pub screened: Vec<f64>,
    pub estimates: Vec<f64>,
    pub exponents: Vec<f64>,
    pub residual: f64,
}

/// Least-squares-free fit of S(η) = E + Σ_j c_j η^{p_j} through len(p)+1 points.
fn richardson(etas: &[f64], values: &[f64], exponents: &[f64]) -> Option<f64> {
    let m = exponents.len() + 1;
    debug_assert_eq!(etas.len(), m);
    let scale = etas.iter().copied().fold(0.0, f64::max);
    let mut a = vec![vec![0.0; m + 1]; m];
    for (row, (&eta, &v)) in a.iter_mut().zip(etas.iter().zip(values)) {
        row[0] = 1.0;
        for (j, &p) in exponents.iter().enumerate() {
            row[j + 1] = (eta / scale).powf(p);
        }
        row[m] = v;
    }
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..m {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= factor * a[col][c];
                }
            }
        }
    }
    Some(a[0][m] / a[0][0])
}

fn exponents<T: Real>(potential: &Potential<T>, dim: usize, neutral: bool, count: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (1..=count).map(|j| j as f64).collect();
    if !neutral {
        if let Some(s) = potential.riesz_exponent() {
            let base = 0.5 * (s.as_f64() - dim as f64);
            p.extend((0..count).map(|j| base + j as f64));
        }
    }
    p.sort_by(f64::total_cmp);
    p.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    p.truncate(count);
    p
}

/// Convergence-factor route.
pub fn energy_convergence_factor<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    phi: &ChargeConfiguration<T>,
    options: &ConvergenceFactorOptions,
) -> Result<EnergyReport<T>> {
    check_compatible(lattice, phi)?;
    check_tol(options.tol)?;
    let d = lattice.dim();
    let neutral = phi.is_neutral_at(NEUTRAL_TOL);
    if !neutral && !potential.is_summable(d) {
        return Err(Error::NotNeutral(phi.net_charge().as_f64()));
    }
    if options.etas.is_empty() || options.etas.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("screening parameters must be positive".into()));
    }
    if options.order == 0 {
        return Err(Error::InvalidArgument("extrapolation order must be at least 1".into()));
    }
    let s = autocorrelation(phi);
    let n_d = phi.index().len() as f64;
    let abs_s: f64 = s.values().iter().map(|v| v.as_f64().abs()).sum();
    let sum_tol = options.tol * 1e-3;
    let powers = exponents(potential, d, neutral, options.order);

    let mut etas = Vec::new();
    let mut screened = Vec::new();
    let mut estimates: Vec<f64> = Vec::new();
    let mut radii = Vec::new();
    let mut tail_total = 0.0_f64;
    let schedule = options.etas.iter().copied().chain(
        (1..=options.max_halvings).map(|h| options.etas.last().copied().unwrap_or(0.1) * 0.5_f64.powi(h as i32)),
    );
    for eta in schedule {
        let bound = |r: f64| abs_s / (2.0 * n_d) * potential.screened_tail(lattice, eta, r);
        let radius = radius_for_tolerance(lattice, sum_tol, bound)?;
        let e = T::lit(eta);
        let sums = class_sums(lattice, phi.index(), T::lit(radius), |r2| {
            Ok(potential.evaluate_sq(r2)? * (-e * r2).exp())
        })?;
        let value = weighted(s.values(), &sums).as_f64() / (2.0 * n_d);
        tail_total = tail_total.max(bound(radius));
        etas.push(eta);
        screened.push(value);
        radii.push(T::lit(radius));
        let available = etas.len() - 1;
        if available == 0 {
            continue;
        }
        let order = available.min(powers.len());
        let window = order + 1;
        let start = etas.len() - window;
        if let Some(est) = richardson(&etas[start..], &screened[start..], &powers[..order]) {
            estimates.push(est);
        }
        if estimates.len() >= 2 && order >= 2.min(powers.len()) {
            let last = estimates[estimates.len() - 1];
            let prev = estimates[estimates.len() - 2];
            let residual = (last - prev).abs();
            if residual <= options.tol {
                let mut report = EnergyReport::new(
                    T::lit(last),
                    Route::ConvergenceFactor,
                    T::lit(residual + tail_total),
                );
                report.radii = radii;
                report.extrapolation = Some(Extrapolation {
                    etas,
                    screened,
                    estimates,
                    exponents: powers[..order].to_vec(),
                    residual,
                });
                return Ok(report);
            }
        }
    }
    let residual = match estimates.as_slice() {
        [.., a, b] => (a - b).abs(),
        _ => f64::INFINITY,
    };
    Err(Error::Numerical(format!(
        "convergence-factor extrapolation stalled with residual {residual:e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_recovers_polynomial_limit() {
        let etas = [0.2, 0.1, 0.05, 0.025];
        let values: Vec<f64> = etas.iter().map(|e| 1.5 + 2.0 * e - 3.0 * e * e + 0.5 * e * e * e).collect();
        let est = richardson(&etas, &values, &[1.0, 2.0, 3.0]).unwrap();
        assert!((est - 1.5).abs() < 1e-12);
    }
}
