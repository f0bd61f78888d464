//! Spectral route E = (1/2N^d) Σ_k ξ_k E[k].
//!
//! For summable potentials the mode energy
//! E[k] = Σ_{x≠0} cos(2π x·w) f(x), w = A^{−T} k/N, is an integral over μ of
//! h(t) = Σ_{x≠0} cos(2π x·w) e^{−t|x|²}. Above t = π the sum is used as is;
//! below, Poisson summation turns it into
//! h(t) = (π/t)^{d/2} V^{−1} Σ_{p∈X*} e^{−π²|p+w|²/t} − 1,
//! whose p = −w term (present when k ∈ N X*) and the constant −1 integrate in
//! closed form to V^{−1} f₂(0) and −μ([0, π]).

use super::ewald::EwaldSums;
use super::{
    check_compatible, check_tol, default_alpha, require_neutral, EnergyReport, ModeEnergy,
    ModeQuantity, Route,
};
use crate::charges::{spectral_density, ChargeConfiguration};
use crate::error::{Error, Result};
use crate::lattice::tail::{gaussian_tail, radius_for_tolerance};
use crate::lattice::BravaisLattice;
use crate::potentials::{Potential, PotentialKind};
use crate::quadrature::{integrate_from_zero, integrate_to_infinity, Tolerance};
use crate::scalar::{CompensatedSum, Real};

/// Precomputed lattice data for h(t) at one shift w.
struct ModeSums<T> {
    /// |p + w|² for p ∈ X*, p + w ≠ 0.
    dual: Vec<T>,
    /// (cos 2πx·w, |x|²) for x ≠ 0.
    direct: Vec<(T, T)>,
    zero_shift: bool,
    inv_covolume: T,
    half_d: T,
}

impl<T: Real> ModeSums<T> {
    fn new(lattice: &BravaisLattice<T>, k: &[i64], period: usize, tol: f64) -> Result<Self> {
        let d = lattice.dim();
        let dual_lattice = lattice.dual();
        let frac: Vec<T> = k.iter().map(|&c| T::of_i64(c) / T::of(period)).collect();
        let w = dual_lattice.to_cartesian(&frac);
        let zero_shift = k.iter().all(|&c| c.rem_euclid(period as i64) == 0);
        let pi = std::f64::consts::PI;
        let inv_v = 1.0 / lattice.covolume().as_f64();
        // Both representations are used only where their Gaussian width is at least π.
        let r_dual = radius_for_tolerance(&dual_lattice, tol, |r| {
            inv_v * gaussian_tail(&dual_lattice, r, pi, |a| (-pi * a * a).exp())
        })?;
        let r_direct = radius_for_tolerance(lattice, tol, |r| {
            gaussian_tail(lattice, r, pi, |a| (-pi * a * a).exp())
        })?;
        let center: Vec<T> = w.iter().map(|&v| -v).collect();
        let mut dual = Vec::new();
        dual_lattice.for_each_point(&center, T::lit(r_dual), |_, p| {
            let q2: T = p.iter().zip(&w).map(|(a, b)| (*a + *b) * (*a + *b)).sum();
            if q2 > T::lit(1e-20) {
                dual.push(q2);
            }
        })?;
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let mut direct = Vec::new();
        let origin = vec![T::zero(); d];
        lattice.for_each_point(&origin, T::lit(r_direct), |n, x| {
            if n.iter().all(|&c| c == 0) {
                return;
            }
            let phase = two_pi
                * n.iter()
                    .zip(k)
                    .map(|(a, b)| T::of_i64((a * b).rem_euclid(period as i64)))
                    .sum::<T>()
                / T::of(period);
            let r2: T = x.iter().map(|v| *v * *v).sum();
            direct.push((phase.cos(), r2));
        })?;
        Ok(Self {
            dual,
            direct,
            zero_shift,
            inv_covolume: T::one() / lattice.covolume(),
            half_d: T::of(d) * T::lit(0.5),
        })
    }

    /// (π/t)^{d/2} V^{−1} Σ_{p+w≠0} e^{−π²|p+w|²/t}.
    fn dual_part(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        let beta = T::PI() * T::PI() / t;
        let mut acc = CompensatedSum::new();
        for &q2 in &self.dual {
            acc.add((-beta * q2).exp());
        }
        (T::PI() / t).powf(self.half_d) * self.inv_covolume * acc.value()
    }

    /// Σ_{x≠0} cos(2πx·w) e^{−t|x|²}.
    fn direct_part(&self, t: T) -> T {
        let mut acc = CompensatedSum::new();
        for &(c, r2) in &self.direct {
            acc.add(c * (-t * r2).exp());
        }
        acc.value()
    }

    /// h(t) by whichever representation is well conditioned.
    fn h(&self, t: T) -> T {
        if t >= T::PI() {
            self.direct_part(t)
        } else {
            let zero = if self.zero_shift {
                (T::PI() / t).powf(self.half_d) * self.inv_covolume
            } else {
                T::zero()
            };
            self.dual_part(t) + zero - T::one()
        }
    }
}

/// E[k] for a summable potential, by the theta-function integral.
pub fn mode_energy_summable<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    k: &[i64],
    period: usize,
    tol: f64,
) -> Result<T> {
    check_tol(tol)?;
    let d = lattice.dim();
    if k.len() != d {
        return Err(Error::InvalidArgument("mode dimension mismatch".into()));
    }
    if !potential.is_summable(d) {
        return Err(Error::NotSummable(format!(
            "mode energies E[k] need a summable potential in dimension {d}"
        )));
    }
    let sums = ModeSums::new(lattice, k, period, tol * 1e-2)?;
    if let PotentialKind::Gaussian { t0, weight } = potential.kind() {
        return Ok(*weight * sums.h(*t0));
    }
    let density = |t: T| potential.measure_density(t).unwrap_or(T::zero());
    let quad = Tolerance {
        relative: 1e-12,
        absolute: tol * 0.25,
    };
    let low = integrate_from_zero(|t| sums.dual_part(t) * density(t), T::PI(), quad)?;
    let high = integrate_to_infinity(|t| sums.direct_part(t) * density(t), T::PI(), quad)?;
    let sqrt_pi = T::PI().sqrt();
    let mut value = low + high - potential.measure_mass(sqrt_pi)?;
    if sums.zero_shift {
        value = value + potential.split_long_sq(sqrt_pi, d, T::zero())? * sums.inv_covolume;
    }
    Ok(value)
}

/// Spectral route. Summable potentials use E[k] unless `alpha` is given;
/// otherwise the Ewald mode energies F[k] − μ at `alpha` (default √π) are used.
pub fn energy_spectral<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    phi: &ChargeConfiguration<T>,
    alpha: Option<T>,
    tol: f64,
) -> Result<EnergyReport<T>> {
    check_compatible(lattice, phi)?;
    check_tol(tol)?;
    let d = lattice.dim();
    let summable = potential.is_summable(d);
    if !summable {
        require_neutral(phi)?;
    }
    let xi = spectral_density(phi)?;
    let index = phi.index();
    let n_d = T::of(index.len());
    let mut modes = Vec::with_capacity(index.len());
    let mut total = CompensatedSum::new();
    let (quantity, mode_err, used_alpha) = if summable && alpha.is_none() {
        for (k, &weight) in xi.values().iter().enumerate() {
            let coords = index.coords(k);
            let kk: Vec<i64> = coords.iter().map(|&c| c as i64).collect();
            let e = mode_energy_summable(lattice, potential, &kk, index.period(), tol)?;
            total.add(weight * e);
            modes.push(ModeEnergy { k: coords, xi: weight, energy: Some(e) });
        }
        (ModeQuantity::Summable, tol, None)
    } else {
        let alpha = alpha.unwrap_or_else(default_alpha);
        let sums = EwaldSums::new(lattice, potential, index.period(), alpha, tol)?;
        for (k, &weight) in xi.values().iter().enumerate() {
            let e = sums.net_mode_energy_flat(k).ok();
            if let Some(e) = e {
                total.add(weight * e);
            }
            modes.push(ModeEnergy { k: index.coords(k), xi: weight, energy: e });
        }
        (ModeQuantity::EwaldNet, sums.mode_error(), Some(alpha))
    };
    let sum_xi: f64 = xi.values().iter().map(|v| v.as_f64()).sum();
    let value = total.value() / (T::lit(2.0) * n_d);
    let err = sum_xi * mode_err / (2.0 * n_d.as_f64());
    let mut report = EnergyReport::new(value, Route::Spectral, T::lit(err));
    report.alpha = used_alpha;
    report.mode_quantity = Some(quantity);
    report.modes = modes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{energy_direct_to_tolerance, energy_ewald};
    use rand::SeedableRng;

    #[test]
    fn summable_modes_match_direct_route() {
        let lattice = BravaisLattice::<f64>::from_generator(2, vec![1.0, 0.4, 0.0, 1.1]).unwrap();
        let p = Potential::gaussian(0.8, 1.0).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let phi = ChargeConfiguration::random(2, 3, false, &mut rng).unwrap();
        let spectral = energy_spectral(&lattice, &p, &phi, None, 1e-13).unwrap();
        let direct = energy_direct_to_tolerance(&lattice, &p, &phi, 1e-13).unwrap();
        assert_eq!(spectral.mode_quantity, Some(ModeQuantity::Summable));
        assert!((spectral.value - direct.value).abs() < 1e-11);
    }

    #[test]
    fn coulomb_uses_ewald_modes() {
        let z3 = BravaisLattice::<f64>::cubic(3).unwrap();
        let p = Potential::riesz(1.0).unwrap();
        let phi = ChargeConfiguration::alternating(3).unwrap();
        let spectral = energy_spectral(&z3, &p, &phi, None, 1e-13).unwrap();
        let ewald = energy_ewald(&z3, &p, &phi, 2.0, 1e-13).unwrap();
        assert_eq!(spectral.mode_quantity, Some(ModeQuantity::EwaldNet));
        assert!((spectral.value - ewald.value).abs() < 1e-11);
        assert!(spectral.modes[0].energy.is_none());
    }
}
