//! Ewald summation on the periodic cell.
//!
//! With R_r = Σ_{x≡r, x≠0} f₁(x) and H_k = Σ_{p∈X*, p≡k} f₂(p/N),
//!
//!   E    = (1/2N^d) [Σ_r s_r R_r + V^{−1} Σ_k ξ_k H_k − s_0 μ([0,α²])],
//!   F[k] = Σ_r R_r cos(2π r·k/N) + V^{−1} H_k.
//!
//! For non-summable potentials the divergent p = 0 term is left out of H_0;
//! it multiplies ξ_0 = (Σφ)²/N^d, which vanishes for neutral charges.

use super::{
    check_compatible, check_tol, class_sums, require_neutral, weighted, EnergyReport, Route,
};
use crate::charges::{autocorrelation, spectral_density, ChargeConfiguration};
use crate::error::{Error, Result};
use crate::lattice::tail::radius_for_tolerance;
use crate::lattice::{BravaisLattice, SublatticeIndex};
use crate::potentials::Potential;
use crate::scalar::{CompensatedSum, Real};

/// Real- and reciprocal-space class sums for one (lattice, potential, N, α).
#[derive(Clone, Debug)]
pub struct EwaldSums<T> {
    index: SublatticeIndex,
    alpha: T,
    covolume: T,
    real: Vec<T>,
    reciprocal: Vec<T>,
    zero_mode_complete: bool,
    mass: T,
    radii: [T; 2],
    short_tail: f64,
    long_tail: f64,
}

impl<T: Real> EwaldSums<T> {
    /// Sums with each per-class truncation error below `tol`.
    pub fn new(
        lattice: &BravaisLattice<T>,
        potential: &Potential<T>,
        period: usize,
        alpha: T,
        tol: f64,
    ) -> Result<Self> {
        check_tol(tol)?;
        if !(alpha > T::zero()) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        if period == 0 {
            return Err(Error::InvalidArgument("period must be at least 1".into()));
        }
        let d = lattice.dim();
        let index = SublatticeIndex::new(d, period);
        let summable = potential.is_summable(d);
        let covolume = lattice.covolume();
        let inv_v = 1.0 / covolume.as_f64();

        let r_short = radius_for_tolerance(lattice, tol, |r| potential.short_tail(lattice, alpha, r))?;
        let real = class_sums(lattice, index, T::lit(r_short), |r2| {
            potential.split_short_sq(alpha, r2)
        })?;

        // w = p/N runs over the lattice X*/N, whose integer coordinates are those of p.
        let reciprocal_lattice = lattice.dual().scaled(T::one() / T::of(period))?;
        let r_long = radius_for_tolerance(&reciprocal_lattice, tol, |r| {
            inv_v * potential.long_tail(&reciprocal_lattice, alpha, r)
        })?;
        let mut sums = vec![CompensatedSum::new(); index.len()];
        let origin = vec![T::zero(); d];
        let mut failure = None;
        reciprocal_lattice.for_each_point(&origin, T::lit(r_long), |m, w| {
            if failure.is_some() {
                return;
            }
            let is_zero = m.iter().all(|&c| c == 0);
            if is_zero && !summable {
                return;
            }
            let w2: T = w.iter().map(|v| *v * *v).sum();
            match potential.split_long_sq(alpha, d, w2) {
                Ok(v) => sums[index.flat(m)].add(v),
                Err(e) => failure = Some(e),
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(Self {
            index,
            alpha,
            covolume,
            real,
            reciprocal: sums.iter().map(|s| s.value()).collect(),
            zero_mode_complete: summable,
            mass: potential.measure_mass(alpha)?,
            radii: [T::lit(r_short), T::lit(r_long)],
            short_tail: potential.short_tail(lattice, alpha, r_short),
            long_tail: inv_v * potential.long_tail(&reciprocal_lattice, alpha, r_long),
        })
    }

    pub fn index(&self) -> SublatticeIndex {
        self.index
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// μ([0, α²]).
    pub fn mass(&self) -> T {
        self.mass
    }

    /// Real-space and reciprocal-space truncation radii.
    pub fn radii(&self) -> [T; 2] {
        self.radii
    }

    /// Whether the p = 0 term is part of H_0 (summable potentials only).
    pub fn zero_mode_complete(&self) -> bool {
        self.zero_mode_complete
    }

    /// Bound on the truncation error of any single F[k].
    pub fn mode_error(&self) -> f64 {
        self.short_tail + self.long_tail
    }

    /// F[k] for a flat mode index.
    pub fn mode_energy_flat(&self, k: usize) -> Result<T> {
        if k == 0 && !self.zero_mode_complete {
            return Err(Error::NotSummable(
                "mode k ∈ N X* diverges for a non-summable potential".into(),
            ));
        }
        let n = T::of(self.index.period());
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let mut acc = CompensatedSum::new();
        for (r, value) in self.real.iter().enumerate() {
            let phase = two_pi * T::of(self.index.dot_mod(r, k)) / n;
            acc.add(phase.cos() * *value);
        }
        acc.add(self.reciprocal[k] / self.covolume);
        Ok(acc.value())
    }

    /// F[k] for dual coordinates k (reduced mod N).
    pub fn mode_energy(&self, k: &[i64]) -> Result<T> {
        self.mode_energy_flat(self.index.flat(k))
    }

    /// F[k] − μ([0, α²]); equals E[k] for summable potentials.
    pub fn net_mode_energy_flat(&self, k: usize) -> Result<T> {
        Ok(self.mode_energy_flat(k)? - self.mass)
    }

    /// Periodic kernel G(r) with E = (1/2N^d) Σ_r s_r G(r).
    pub fn kernel(&self) -> Vec<T> {
        let n = T::of(self.index.period());
        let n_d = T::of(self.index.len());
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        (0..self.index.len())
            .map(|r| {
                let mut acc = CompensatedSum::new();
                acc.add(self.real[r]);
                for (k, h) in self.reciprocal.iter().enumerate() {
                    let phase = two_pi * T::of(self.index.dot_mod(r, k)) / n;
                    acc.add(phase.cos() * *h / (self.covolume * n_d));
                }
                if r == 0 {
                    acc.add(-self.mass);
                }
                acc.value()
            })
            .collect()
    }

    /// Energy from autocorrelation s and spectral density ξ, with its truncation bound.
    pub fn energy(&self, s: &[T], xi: &[T]) -> (T, f64) {
        let n_d = T::of(self.index.len());
        let two = T::lit(2.0);
        let value = (weighted(s, &self.real) + weighted(xi, &self.reciprocal) / self.covolume
            - s[0] * self.mass)
            / (two * n_d);
        let abs_s: f64 = s.iter().map(|v| v.as_f64().abs()).sum();
        let sum_xi: f64 = xi.iter().map(|v| v.as_f64().abs()).sum();
        let err = (abs_s * self.short_tail + sum_xi * self.long_tail) / (2.0 * n_d.as_f64());
        (value, err)
    }
}

/// Ewald route at splitting parameter α.
pub fn energy_ewald<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    phi: &ChargeConfiguration<T>,
    alpha: T,
    tol: f64,
) -> Result<EnergyReport<T>> {
    check_compatible(lattice, phi)?;
    if !potential.is_summable(lattice.dim()) {
        require_neutral(phi)?;
    }
    let sums = EwaldSums::new(lattice, potential, phi.period(), alpha, tol)?;
    let s = autocorrelation(phi);
    let xi = spectral_density(phi)?;
    let (value, err) = sums.energy(s.values(), xi.values());
    let mut report = EnergyReport::new(value, Route::Ewald, T::lit(err));
    report.alpha = Some(alpha);
    report.radii = sums.radii().to_vec();
    Ok(report)
}

/// F[k] at splitting parameter α.
pub fn mode_energy_ewald<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    k: &[i64],
    period: usize,
    alpha: T,
    tol: f64,
) -> Result<T> {
    if k.len() != lattice.dim() {
        return Err(Error::InvalidArgument("mode dimension mismatch".into()));
    }
    EwaldSums::new(lattice, potential, period, alpha, tol)?.mode_energy(k)
}

/// F[k] − μ for every k ∈ K_N* in flat order; `None` where the mode diverges.
pub fn mode_table<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    period: usize,
    alpha: T,
    tol: f64,
) -> Result<Vec<Option<T>>> {
    let sums = EwaldSums::new(lattice, potential, period, alpha, tol)?;
    Ok((0..sums.index().len())
        .map(|k| sums.net_mode_energy_flat(k).ok())
        .collect())
}
