//! Periodic interaction matrix M with E[φ] = φᵀ M φ, M_{y,y'} = G(y' − y)/(2N^d).

use serde::{Deserialize, Serialize};

use super::ewald::EwaldSums;
use super::{check_tol, class_sums};
use crate::error::{Error, Result};
use crate::lattice::tail::radius_for_tolerance;
use crate::lattice::{BravaisLattice, SublatticeIndex};
use crate::potentials::Potential;
use crate::scalar::Real;

/// How the kernel G(r) = Σ_{x≡r, x≠0} f(x) is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assembly {
    /// Ewald split at the given α (any potential; constant shift ignored when non-summable).
    Ewald,
    /// Truncated direct sums (summable potentials only).
    Direct,
}

/// Row-major N^d × N^d interaction matrix.
///
/// For non-summable potentials the kernel is defined up to an additive
/// constant, which does not affect the quadratic form on neutral charges.
pub fn interaction_matrix<T: Real>(
    lattice: &BravaisLattice<T>,
    potential: &Potential<T>,
    period: usize,
    assembly: Assembly,
    alpha: T,
    tol: f64,
) -> Result<Vec<T>> {
    check_tol(tol)?;
    let d = lattice.dim();
    let index = SublatticeIndex::new(d, period);
    let kernel = match assembly {
        Assembly::Ewald => EwaldSums::new(lattice, potential, period, alpha, tol)?.kernel(),
        Assembly::Direct => {
            if !potential.is_summable(d) {
                return Err(Error::NotSummable("direct assembly needs a summable potential".into()));
            }
            let radius = radius_for_tolerance(lattice, tol, |r| {
                potential.direct_tail(lattice, r).unwrap_or(f64::INFINITY)
            })?;
            class_sums(lattice, index, T::lit(radius), |r2| potential.evaluate_sq(r2))?
        }
    };
    let size = index.len();
    let scale = T::lit(2.0) * T::of(size);
    let mut matrix = vec![T::zero(); size * size];
    for y in 0..size {
        let neg_y = index.neg(y);
        for y2 in 0..size {
            matrix[y * size + y2] = kernel[index.add(y2, neg_y)] / scale;
        }
    }
    Ok(matrix)
}
