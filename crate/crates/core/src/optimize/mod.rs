//! Optimal periodic charges: theta minimizers, the minimal Fourier mode, and
//! an eigen-decomposition cross-check.

mod oracle;
mod theta_min;

pub use oracle::{brute_force_min, BruteForceMinimum, DEGENERACY_RTOL, MAX_CELL};
pub use theta_min::{
    minimize_translated_theta, theta_landscape, LandscapeRow, ThetaMinimum, DEFAULT_ALPHAS,
    MAX_DENOMINATOR,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charges::ChargeConfiguration;
use crate::energy::{default_alpha, energy_ewald, EwaldSums, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lattice::BravaisLattice;
use crate::potentials::Potential;
use crate::scalar::Real;
use theta_min::periodic_distance;

/// Relative window inside which two mode energies count as tied.
pub const TIE_RTOL: f64 = 1e-10;
/// Energy agreement required between construction and oracle.
pub const ENERGY_MATCH_TOL: f64 = 1e-8;
/// Largest admissible distance of the construction from the minimal eigenspace.
pub const MEMBERSHIP_TOL: f64 = 1e-7;
/// How far a random configuration may undercut the optimum before it counts.
pub const RANDOM_SLACK: f64 = 1e-9;
/// |Σφ| below which an unconstrained minimizer counts as neutral.
pub const NEUTRALITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    /// Extra α samples on top of the defaults.
    pub alphas: Vec<f64>,
    pub grid: usize,
    pub refine_tol: f64,
    /// Accuracy requested from the Ewald sums.
    pub tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { alphas: Vec::new(), grid: 16, refine_tol: 1e-10, tol: DEFAULT_TOL }
    }
}

impl OptimizeOptions {
    fn alpha_samples(&self) -> Vec<f64> {
        let mut all = DEFAULT_ALPHAS.to_vec();
        for &a in &self.alphas {
            if !all.contains(&a) {
                all.push(a);
            }
        }
        all
    }
}

/// The cosine configuration built from the minimal mode.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OptimalCharges<T: Real> {
    pub config: ChargeConfiguration<T>,
    /// Ewald energy per particle of `config`.
    pub energy: T,
    /// Argmin of F[k] − μ over K_N* \ {0}, smallest lexicographic among ties.
    pub k0: Vec<usize>,
    /// F[k₀] − μ; the energy equals half of it.
    pub mode_energy: T,
    /// Every mode tied with k₀.
    pub minimal_modes: Vec<Vec<usize>>,
    pub degeneracy: usize,
    pub theta: ThetaMinimum<T>,
    /// Whether k₀/N is one of the theta minimizers.
    pub theta_agrees: bool,
}

pub fn optimal_charges<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    period: usize,
) -> Result<OptimalCharges<T>> {
    optimal_charges_with(lattice, potential, period, &OptimizeOptions::default())
}

pub fn optimal_charges_with<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    period: usize,
    options: &OptimizeOptions,
) -> Result<OptimalCharges<T>> {
    if period < 2 {
        return Err(Error::InvalidArgument("period must be at least 2".into()));
    }
    let alphas: Vec<T> = options.alpha_samples().into_iter().map(T::lit).collect();
    let theta =
        minimize_translated_theta(lattice, &alphas, options.grid, T::lit(options.refine_tol))?;
    if !theta.admits_period(period) {
        return Err(match theta.representability {
            Some(required) => Error::IncompatiblePeriod { period, required },
            None => Error::Unrepresentable(MAX_DENOMINATOR as usize),
        });
    }

    let sums = EwaldSums::new(lattice, potential, period, default_alpha(), options.tol)?;
    let index = sums.index();
    let table: Vec<(usize, f64)> = (1..index.len())
        .map(|k| sums.net_mode_energy_flat(k).map(|v| (k, v.as_f64())))
        .collect::<Result<_>>()?;
    let lowest = table.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let slack = TIE_RTOL * lowest.abs().max(1.0);
    let tied: Vec<usize> = table.iter().filter(|e| e.1 - lowest <= slack).map(|e| e.0).collect();
    let k0 = tied[0];

    let n = T::of(period);
    let k0_coords = index.coords(k0);
    let lambda: Vec<T> = k0_coords.iter().map(|&c| T::of(c) / n).collect();
    let lambda_f: Vec<f64> = lambda.iter().map(|v| v.as_f64()).collect();
    let theta_agrees = theta.minimizers.iter().any(|z| {
        let z: Vec<f64> = z.iter().map(|v| v.as_f64()).collect();
        periodic_distance(&z, &lambda_f) < 1e-6
    });

    let config = ChargeConfiguration::cosine_fractional(lattice.dim(), period, &lambda, false)?;
    let energy = energy_ewald(lattice, potential, &config, default_alpha(), options.tol)?.value;
    Ok(OptimalCharges {
        config,
        energy,
        k0: k0_coords,
        mode_energy: sums.net_mode_energy_flat(k0)?,
        minimal_modes: tied.iter().map(|&k| index.coords(k)).collect(),
        degeneracy: tied.len(),
        theta,
        theta_agrees,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub optimize: OptimizeOptions,
    /// Random configurations tried against the optimum.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { optimize: OptimizeOptions::default(), samples: 200, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct VerificationReport<T: Real> {
    pub period: usize,
    pub config: ChargeConfiguration<T>,
    pub energy: T,
    pub k0: Vec<usize>,
    /// k₀/N in fractional dual coordinates.
    pub lambda0: Vec<T>,
    pub degeneracy: usize,
    pub minimal_modes: Vec<Vec<usize>>,
    pub theta: ThetaMinimum<T>,
    pub theta_agrees: bool,
    pub brute_force_energy: T,
    pub brute_force_config: ChargeConfiguration<T>,
    pub brute_force_degeneracy: usize,
    pub eigengap: T,
    pub neutral_imposed: bool,
    /// Net charge of the oracle's minimizer.
    pub brute_force_net_charge: T,
    pub energy_difference: T,
    pub membership_residual: T,
    pub random_samples: usize,
    pub random_min_energy: Option<T>,
    pub matches: bool,
}

/// Constructs the optimum, runs the eigen oracle and a random sweep, and
/// compares them.
pub fn verify_born<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    period: usize,
    options: &VerifyOptions,
) -> Result<VerificationReport<T>> {
    let built = optimal_charges_with(lattice, potential, period, &options.optimize)?;
    let oracle = brute_force_min(lattice, potential, period)?;
    let d = lattice.dim();
    let neutral = oracle.neutral_imposed;

    let random: Vec<T> = (0..options.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(i as u64);
            ChargeConfiguration::random(d, period, neutral, &mut rng)
                .map(|phi| oracle.quadratic_form(&phi))
        })
        .collect::<Result<_>>()?;
    let random_min = random.iter().copied().reduce(T::min);

    let difference = (built.energy - oracle.energy).abs();
    let residual = oracle.membership_residual(&built.config);
    let undercut = random_min.is_some_and(|m| m < built.energy - T::lit(RANDOM_SLACK));
    let matches = difference < T::lit(ENERGY_MATCH_TOL)
        && residual < T::lit(MEMBERSHIP_TOL)
        && built.theta_agrees
        && !undercut;

    Ok(VerificationReport {
        period,
        lambda0: built.k0.iter().map(|&c| T::of(c) / T::of(period)).collect(),
        config: built.config.canonical(),
        energy: built.energy,
        k0: built.k0,
        degeneracy: built.degeneracy,
        minimal_modes: built.minimal_modes,
        theta: built.theta,
        theta_agrees: built.theta_agrees,
        brute_force_energy: oracle.energy,
        brute_force_net_charge: oracle.config.net_charge(),
        brute_force_config: oracle.config,
        brute_force_degeneracy: oracle.degeneracy,
        eigengap: oracle.eigengap,
        neutral_imposed: neutral,
        energy_difference: difference,
        membership_residual: residual,
        random_samples: options.samples,
        random_min_energy: random_min,
        matches,
    })
}

/// True iff the oracle minimized without a neutrality constraint and still
/// found |Σφ| < 1e-9.
pub fn neutrality_check<T: Real>(report: &VerificationReport<T>) -> bool {
    !report.neutral_imposed && report.brute_force_config.is_neutral_at(NEUTRALITY_TOL)
}
