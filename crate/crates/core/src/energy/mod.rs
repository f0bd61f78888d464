//! Energy per particle E = (1/2N^d) Σ_{x≠0} s_x f(x) of a charged lattice,
//! computed by independent routes.

mod direct;
mod epstein;
mod ewald;
mod matrix;
mod screened;
mod spectral;

pub use direct::{energy_direct, energy_direct_to_tolerance};
pub use epstein::energy_epstein;
pub use ewald::{energy_ewald, mode_energy_ewald, mode_table, EwaldSums};
pub use matrix::{interaction_matrix, Assembly};
pub use screened::{energy_convergence_factor, ConvergenceFactorOptions, Extrapolation};
pub use spectral::{energy_spectral, mode_energy_summable};

use serde::{Deserialize, Serialize};

use crate::charges::ChargeConfiguration;
use crate::error::{Error, Result};
use crate::lattice::{BravaisLattice, SublatticeIndex};
use crate::scalar::{CompensatedSum, Real};

/// Default absolute accuracy requested from lattice sums.
pub const DEFAULT_TOL: f64 = 1e-12;

/// |Σφ| below which a configuration counts as neutral.
pub const NEUTRAL_TOL: f64 = 1e-9;

/// Default Ewald splitting parameter √π.
pub fn default_alpha<T: Real>() -> T {
    T::PI().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Direct,
    ConvergenceFactor,
    Spectral,
    Ewald,
    Epstein,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Direct => "direct",
            Route::ConvergenceFactor => "convergence-factor",
            Route::Spectral => "spectral",
            Route::Ewald => "ewald",
            Route::Epstein => "epstein",
        })
    }
}

/// What the `value` column of a mode table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeQuantity {
    /// E[k] = Σ_{x≠0} e^{2πi x·k/N} f(x).
    Summable,
    /// F[k] − μ([0, α²]), the α-corrected Ewald mode energy.
    EwaldNet,
    /// Z(A^{−T}k/N; s), the continued Epstein zeta value.
    Epstein,
}

/// Energy of one Fourier mode k ∈ K_N* with its weight ξ_k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModeEnergy<T: Real> {
    pub k: Vec<usize>,
    pub xi: T,
    /// `None` for modes that cannot be evaluated (k ∈ N X* with a non-summable potential).
    pub energy: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EnergyReport<T: Real> {
    pub value: T,
    pub route: Route,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<T>,
    /// Truncation radii of the lattice sums, in route-specific order.
    pub radii: Vec<T>,
    pub error_estimate: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_quantity: Option<ModeQuantity>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeEnergy<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolation: Option<Extrapolation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl<T: Real> EnergyReport<T> {
    fn new(value: T, route: Route, error_estimate: T) -> Self {
        Self {
            value,
            route,
            alpha: None,
            radii: Vec::new(),
            error_estimate,
            mode_quantity: None,
            modes: Vec::new(),
            extrapolation: None,
            notes: Vec::new(),
        }
    }
}

pub(crate) fn check_compatible<T: Real>(
    lattice: &BravaisLattice<T>,
    phi: &ChargeConfiguration<T>,
) -> Result<()> {
    if lattice.dim() != phi.dim() {
        return Err(Error::InvalidArgument(format!(
            "lattice has dimension {}, charges {}",
            lattice.dim(),
            phi.dim()
        )));
    }
    Ok(())
}

pub(crate) fn require_neutral<T: Real>(phi: &ChargeConfiguration<T>) -> Result<()> {
    let q = phi.net_charge();
    if !phi.is_neutral_at(NEUTRAL_TOL) {
        Err(Error::NotNeutral(q.as_f64()))
    } else {
        Ok(())
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")))
    }
}

/// Σ_{x ≡ r (mod N), x≠0, |x| ≤ R} g(|x|²) for every class r, by compensated summation.
pub(crate) fn class_sums<T: Real>(
    lattice: &BravaisLattice<T>,
    index: SublatticeIndex,
    radius: T,
    g: impl Fn(T) -> Result<T>,
) -> Result<Vec<T>> {
    let mut sums = vec![CompensatedSum::new(); index.len()];
    let origin = vec![T::zero(); lattice.dim()];
    let mut failure = None;
    lattice.for_each_point(&origin, radius, |n, x| {
        if n.iter().all(|&c| c == 0) || failure.is_some() {
            return;
        }
        let r2: T = x.iter().map(|v| *v * *v).sum();
        match g(r2) {
            Ok(v) => sums[index.flat(n)].add(v),
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(sums.iter().map(|s| s.value()).collect())
}

/// Σ_r s_r c_r.
pub(crate) fn weighted<T: Real>(weights: &[T], values: &[T]) -> T {
    let mut acc = CompensatedSum::new();
    for (w, v) in weights.iter().zip(values) {
        acc.add(*w * *v);
    }
    acc.value()
}
