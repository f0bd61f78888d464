//! Truncated direct sum (1/2N^d) Σ_{0<|x|≤R} s_x f(x) for summable potentials.
//!
//! Two certified tail bounds are available. The plain one is
//! (1/2N^d) max|s| Σ_{|x|>R} f(x). For neutral charges each residue class
//! NX + r is a shifted copy of NX, so all class tails G_r lie in a common
//! interval [L, U] obtained by comparing with ∫ f over Voronoi cells of
//! covering radius ρ; since Σ s_r = 0 the tail is at most
//! (1/2N^d)(Σ|s_r|/2)(U − L), which decays one power of R faster.

use super::{check_compatible, check_tol, class_sums, weighted, EnergyReport, Route, NEUTRAL_TOL};
use crate::charges::{autocorrelation, ChargeConfiguration};
use crate::error::{Error, Result};
use crate::lattice::tail::radius_for_tolerance;
use crate::lattice::BravaisLattice;
use crate::potentials::Potential;
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::scalar::Real;
use crate::special_functions::gamma::gamma;

struct TailModel<'a, T: Real> {
    lattice: &'a BravaisLattice<T>,
    potential: &'a Potential<T>,
    prefactor: f64,
    abs_weight: f64,
    neutral: bool,
    covering: f64,
    cell_volume: f64,
    cell_count: f64,
}

impl<T: Real> TailModel<'_, T> {
    fn plain(&self, radius: f64) -> f64 {
        self.potential
            .direct_tail(self.lattice, radius)
            .unwrap_or(f64::INFINITY)
            * self.prefactor
    }

    fn cancellation(&self, radius: f64) -> f64 {
        if !self.neutral {
            return f64::INFINITY;
        }
        let rho = self.covering;
        let lo = radius - 2.0 * rho;
        if !(lo > 0.0) {
            return f64::INFINITY;
        }
        let d = self.lattice.dim() as i32;
        let f = |u: f64| {
            self.potential
                .evaluate_sq(T::lit(u * u))
                .map(|v| v.as_f64())
                .unwrap_or(f64::INFINITY)
        };
        let tol = Tolerance::relative(1e-9);
        let band = integrate(|u| f(u) * (u + rho).powi(d - 1), lo, radius + 2.0 * rho, tol);
        let outer = if d == 1 {
            Ok(0.0)
        } else {
            integrate_to_infinity(
                |u| f(u) * ((u + rho).powi(d - 1) - (u - rho).powi(d - 1)),
                radius + 2.0 * rho,
                tol,
            )
        };
        let (Ok(band), Ok(outer)) = (band, outer) else {
            return f64::INFINITY;
        };
        let half_d = 0.5 * d as f64;
        let sphere = 2.0 * std::f64::consts::PI.powf(half_d) / gamma(half_d);
        let spread = sphere / self.cell_volume * (band + outer) * (1.0 + 1e-6);
        0.5 * self.abs_weight / (2.0 * self.cell_count) * spread
    }

    fn bound(&self, radius: f64) -> f64 {
        self.plain(radius).min(self.cancellation(radius))
    }
}

fn tail_model<'a, T: Real>(
    lattice: &'a BravaisLattice<T>,
    potential: &'a Potential<T>,
    phi: &ChargeConfiguration<T>,
    s: &[T],
) -> TailModel<'a, T> {
    let n_d = phi.index().len() as f64;
    let abs_weight: f64 = s.iter().map(|v| v.as_f64().abs()).sum();
    let max_s = s.iter().map(|v| v.as_f64().abs()).fold(0.0, f64::max);
    let period = phi.period() as f64;
    TailModel {
        lattice,
        potential,
        prefactor: max_s / (2.0 * n_d),
        abs_weight,
        neutral: phi.is_neutral_at(NEUTRAL_TOL),
        covering: period * lattice.covering_radius_bound().as_f64(),
        cell_volume: n_d * lattice.covolume().as_f64(),
        cell_count: n_d,
    }
}

/// Direct route truncated at |x| ≤ radius.
pub fn energy_direct<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    phi: &ChargeConfiguration<T>,
    radius: T,
) -> Result<EnergyReport<T>> {
    check_compatible(lattice, phi)?;
    let d = lattice.dim();
    if !potential.is_summable(d) {
        return Err(Error::NotSummable(format!(
            "direct summation needs a summable potential in dimension {d}"
        )));
    }
    let s = autocorrelation(phi);
    let model = tail_model(lattice, potential, phi, s.values());
    let sums = class_sums(lattice, phi.index(), radius, |r2| potential.evaluate_sq(r2))?;
    let n_d = T::of(phi.index().len());
    let value = weighted(s.values(), &sums) / (T::lit(2.0) * n_d);
    let bound = model.bound(radius.as_f64());
    let mut report = EnergyReport::new(value, Route::Direct, T::lit(bound));
    report.radii = vec![radius];
    Ok(report)
}

/// Direct route with the radius chosen so that the certified tail is below `tol`.
pub fn energy_direct_to_tolerance<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    phi: &ChargeConfiguration<T>,
    tol: f64,
) -> Result<EnergyReport<T>> {
    check_compatible(lattice, phi)?;
    check_tol(tol)?;
    let d = lattice.dim();
    if !potential.is_summable(d) {
        return Err(Error::NotSummable(format!(
            "direct summation needs a summable potential in dimension {d}"
        )));
    }
    let s = autocorrelation(phi);
    let model = tail_model(lattice, potential, phi, s.values());
    let radius = radius_for_tolerance(lattice, tol, |r| model.bound(r))?;
    energy_direct(lattice, potential, phi, T::lit(radius))
}
