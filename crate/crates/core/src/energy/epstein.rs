//! Epstein route for Riesz potentials with 0 < s ≤ d:
//! E = (1/2N^d) Σ_{k≠0} ξ_k Z(A^{−T} k/N; s).

use super::{check_compatible, check_tol, require_neutral, EnergyReport, ModeEnergy, ModeQuantity, Route};
use crate::charges::{spectral_density, ChargeConfiguration};
use crate::error::{Error, Result};
use crate::lattice::BravaisLattice;
use crate::scalar::{CompensatedSum, Real};
use crate::special_functions::epstein_zeta;

/// Energy of neutral charges under |x|^{−s} through the continued Epstein zeta function.
pub fn energy_epstein<T: Real>(
    lattice: &BravaisLattice<T>,
    s: T,
    phi: &ChargeConfiguration<T>,
    tol: f64,
) -> Result<EnergyReport<T>> {
    check_compatible(lattice, phi)?;
    check_tol(tol)?;
    let d = lattice.dim();
    if !(s > T::zero()) || s > T::of(d) {
        return Err(Error::InvalidArgument(format!(
            "Epstein route needs 0 < s <= d = {d}, got {s}"
        )));
    }
    require_neutral(phi)?;
    let xi = spectral_density(phi)?;
    let index = phi.index();
    let dual = lattice.dual();
    let n = T::of(index.period());
    let mut total = CompensatedSum::new();
    let mut modes = Vec::with_capacity(index.len());
    for (k, &weight) in xi.values().iter().enumerate() {
        let coords = index.coords(k);
        if k == 0 {
            modes.push(ModeEnergy { k: coords, xi: weight, energy: None });
            continue;
        }
        let frac: Vec<T> = coords.iter().map(|&c| T::of(c) / n).collect();
        let w = dual.to_cartesian(&frac);
        let z = epstein_zeta(lattice, &w, s, T::lit(tol))?;
        total.add(weight * z);
        modes.push(ModeEnergy { k: coords, xi: weight, energy: Some(z) });
    }
    let n_d = T::of(index.len());
    let sum_xi: f64 = xi.values().iter().map(|v| v.as_f64()).sum();
    let value = total.value() / (T::lit(2.0) * n_d);
    let mut report = EnergyReport::new(value, Route::Epstein, T::lit(sum_xi * tol / (2.0 * n_d.as_f64())));
    report.mode_quantity = Some(ModeQuantity::Epstein);
    report.modes = modes;
    if s == T::of(d) {
        report.notes.push(format!("s = d = {d}: boundary exponent, evaluated by the same formula"));
    }
    Ok(report)
}
