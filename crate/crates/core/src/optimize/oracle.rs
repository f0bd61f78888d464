//! Minimal eigenpairs of the periodic interaction matrix, as an independent
//! check of the mode-energy construction.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::charges::ChargeConfiguration;
use crate::energy::{default_alpha, interaction_matrix, Assembly, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lattice::tail::radius_for_tolerance;
use crate::lattice::{BravaisLattice, SublatticeIndex};
use crate::potentials::Potential;
use crate::scalar::Real;

/// Largest cell N^d handled by the dense eigen-solver.
pub const MAX_CELL: usize = 512;

/// Eigenvalues closer than this (relative) to the minimum count as degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-9;

// Direct kernels are only assembled when the ball holds fewer points than this.
const DIRECT_POINT_BUDGET: f64 = 4e6;

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "")]
pub struct BruteForceMinimum<T: Real> {
    /// Minimal energy per particle over ‖φ‖² = N^d.
    pub energy: T,
    /// A minimizer, canonicalized.
    pub config: ChargeConfiguration<T>,
    /// Spectrum of the quadratic form on the feasible space, in energy-per-particle units.
    pub eigenvalues: Vec<T>,
    pub degeneracy: usize,
    /// Distance from the minimal eigenvalue to the next distinct one.
    pub eigengap: T,
    pub neutral_imposed: bool,
    pub assembly: Assembly,
    #[serde(skip)]
    matrix: DMatrix<f64>,
    #[serde(skip)]
    eigenspace: DMatrix<f64>,
}

impl<T: Real> BruteForceMinimum<T> {
    /// φᵀMφ, the energy per particle of any configuration on the same cell.
    pub fn quadratic_form(&self, phi: &ChargeConfiguration<T>) -> T {
        let v = to_vector(phi);
        T::lit((&self.matrix * &v).dot(&v))
    }

    /// ‖φ − Pφ‖/‖φ‖ for the orthogonal projector P onto the minimal eigenspace.
    pub fn membership_residual(&self, phi: &ChargeConfiguration<T>) -> T {
        let v = to_vector(phi);
        let norm = v.norm();
        if norm == 0.0 {
            return T::infinity();
        }
        let coeffs = self.eigenspace.transpose() * &v;
        let projected = &self.eigenspace * coeffs;
        T::lit((v - projected).norm() / norm)
    }

    /// Interaction matrix M with E[φ] = φᵀMφ, row-major.
    pub fn matrix(&self) -> Vec<T> {
        let n = self.matrix.nrows();
        (0..n * n).map(|i| T::lit(self.matrix[(i / n, i % n)])).collect()
    }
}

fn to_vector<T: Real>(phi: &ChargeConfiguration<T>) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_iterator(phi.values().len(), phi.values().iter().map(|v| v.as_f64()))
}

/// Minimizes φᵀMφ on the sphere ‖φ‖² = N^d, on the neutral hyperplane when
/// the potential is not summable.
pub fn brute_force_min<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    period: usize,
) -> Result<BruteForceMinimum<T>> {
    let d = lattice.dim();
    let index = SublatticeIndex::new(d, period);
    let size = index.len();
    if size > MAX_CELL || period == 0 {
        return Err(Error::InvalidArgument(format!(
            "brute force needs 1 ≤ N^d ≤ {MAX_CELL}, got {size}"
        )));
    }
    let summable = potential.is_summable(d);
    let assembly = if summable && direct_is_cheap(lattice, potential) {
        Assembly::Direct
    } else {
        Assembly::Ewald
    };
    let entries = interaction_matrix(lattice, potential, period, assembly, default_alpha(), DEFAULT_TOL)?;
    let matrix = DMatrix::from_row_iterator(size, size, entries.iter().map(|v| v.as_f64()));

    // Orthonormal basis of the feasible space.
    let basis = if summable { DMatrix::identity(size, size) } else { helmert(size) };
    let reduced = basis.transpose() * &matrix * &basis;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let eigen = SymmetricEigen::try_new(reduced, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigen-solver did not converge".into()))?;

    let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let scale = size as f64;
    let values: Vec<f64> = order.iter().map(|&i| eigen.eigenvalues[i] * scale).collect();
    if values.is_empty() {
        return Err(Error::InvalidArgument("no feasible charges on a single-site cell".into()));
    }
    let lowest = values[0];
    let slack = DEGENERACY_RTOL * lowest.abs().max(1.0);
    let degeneracy = values.iter().take_while(|v| **v - lowest <= slack).count();
    let eigengap = values.get(degeneracy).map_or(0.0, |v| v - lowest);

    let columns: Vec<_> = order[..degeneracy]
        .iter()
        .map(|&i| &basis * eigen.eigenvectors.column(i))
        .collect();
    let eigenspace = DMatrix::from_columns(&columns);
    let leading = columns[0].clone() * scale.sqrt();
    let config =
        ChargeConfiguration::new(d, period, leading.iter().map(|v| T::lit(*v)).collect())?
            .canonical();

    Ok(BruteForceMinimum {
        energy: T::lit(lowest),
        config,
        eigenvalues: values.iter().map(|v| T::lit(*v)).collect(),
        degeneracy,
        eigengap: T::lit(eigengap),
        neutral_imposed: !summable,
        assembly,
        matrix,
        eigenspace,
    })
}

fn direct_is_cheap<T: Real>(lattice: &BravaisLattice<T>, potential: &Potential<T>) -> bool {
    let Ok(radius) = radius_for_tolerance(lattice, DEFAULT_TOL, |r| {
        potential.direct_tail(lattice, r).unwrap_or(f64::INFINITY)
    }) else {
        return false;
    };
    let d = lattice.dim() as f64;
    let ball = std::f64::consts::PI.powf(d / 2.0) * radius.powf(d)
        / crate::special_functions::gamma(d / 2.0 + 1.0);
    ball / lattice.covolume().as_f64() < DIRECT_POINT_BUDGET
}

/// Columns (1,…,1,−j,0,…)/√(j(j+1)), j = 1..n−1: orthonormal, orthogonal to 1.
fn helmert(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n.saturating_sub(1), |i, c| {
        let j = c + 1;
        let norm = ((j * (j + 1)) as f64).sqrt();
        if i < j {
            1.0 / norm
        } else if i == j {
            -(j as f64) / norm
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helmert_is_orthonormal_and_neutral() {
        let h = helmert(5);
        let gram = h.transpose() * &h;
        assert!((gram - DMatrix::identity(4, 4)).norm() < 1e-14);
        for c in 0..4 {
            assert!(h.column(c).sum().abs() < 1e-14);
        }
    }

    #[test]
    fn square_lattice_alternating_minimizer() {
        let z2 = BravaisLattice::<f64>::cubic(2).unwrap();
        let p = Potential::riesz(3.0).unwrap();
        let bf = brute_force_min(&z2, &p, 2).unwrap();
        let alt = ChargeConfiguration::alternating(2).unwrap();
        assert!(bf.config.equivalent(&alt, 1e-9));
        assert_eq!(bf.degeneracy, 1);
        assert!(bf.eigengap > 0.0);
        assert!((bf.quadratic_form(&alt) - bf.energy).abs() < 1e-12);
        assert!(bf.membership_residual(&alt) < 1e-10);
        assert!(!bf.neutral_imposed);
    }

    #[test]
    fn oversized_cell_rejected() {
        let z3 = BravaisLattice::<f64>::cubic(3).unwrap();
        let p = Potential::riesz(1.0).unwrap();
        assert!(brute_force_min(&z3, &p, 9).is_err());
    }
}
