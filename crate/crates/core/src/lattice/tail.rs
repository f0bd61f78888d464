//! Certified bounds for lattice sums truncated at a radius.
//!
//! With packing radius r, the balls B_r(y) around the points of any shifted
//! lattice are disjoint. For a nonincreasing profile g this gives
//!
//!   Σ_{|y|>R} g(|y|) ≤ (d / r^d) ∫_{R−2r}^∞ g(w) (w + r)^{d−1} dw,   R > 2r.
//!
//! Bounds are computed in `f64` whatever the scalar type of the lattice.

use super::BravaisLattice;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_functions::gamma::scaled_upper_incomplete_gamma;

/// Tail of a sum whose terms satisfy f(w) ≤ f(a) e^{β(a²−w²)} for w ≥ a.
///
/// `value_at(a)` must bound the term at distance a = R − 2r. Any Laplace
/// transform ∫_β^∞ e^{−tw²} dν(t) of a nonnegative measure qualifies.
pub fn gaussian_tail<T: Real>(
    lattice: &BravaisLattice<T>,
    radius: f64,
    beta: f64,
    value_at: impl Fn(f64) -> f64,
) -> f64 {
    let d = lattice.dim();
    let r = lattice.packing_radius().as_f64();
    let a = radius - 2.0 * r;
    if !(a > 0.0) || !(beta > 0.0) {
        return f64::INFINITY;
    }
    let anchor = value_at(a);
    if anchor == 0.0 {
        return 0.0;
    }
    let x = beta * a * a;
    let mut total = 0.0;
    for j in 0..d {
        let h = 0.5 * (j as f64 + 1.0);
        let Ok(scaled) = scaled_upper_incomplete_gamma(h, x) else {
            return f64::INFINITY;
        };
        total += binomial(d - 1, j) * r.powi((d - 1 - j) as i32) * 0.5 * beta.powf(-h) * scaled;
    }
    d as f64 / r.powi(d as i32) * anchor * total
}

/// Tail of Σ coeff·|y|^{−s} for s > d.
pub fn power_tail<T: Real>(lattice: &BravaisLattice<T>, radius: f64, s: f64, coeff: f64) -> f64 {
    let d = lattice.dim();
    let r = lattice.packing_radius().as_f64();
    let a = radius - 2.0 * r;
    if !(a > 0.0) || s <= d as f64 {
        return f64::INFINITY;
    }
    let total: f64 = (0..d)
        .map(|j| {
            binomial(d - 1, j) * r.powi((d - 1 - j) as i32) * a.powf(j as f64 + 1.0 - s)
                / (s - j as f64 - 1.0)
        })
        .sum();
    coeff * d as f64 / r.powi(d as i32) * total
}

/// Smallest radius (to 0.1%) at which `bound` drops to `tol`.
pub fn radius_for_tolerance<T: Real>(
    lattice: &BravaisLattice<T>,
    tol: f64,
    bound: impl Fn(f64) -> f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let r = lattice.packing_radius().as_f64();
    let mut hi = 2.0 * r + r.max(0.25);
    let mut lo = 2.0 * r;
    while !(bound(hi) <= tol) {
        lo = hi;
        hi *= 1.25;
        if hi > 1e6 * r.max(1.0) {
            return Err(Error::Numerical(format!(
                "no truncation radius reaches tolerance {tol:e}"
            )));
        }
    }
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if bound(mid) <= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_tail(l: &BravaisLattice<f64>, center: &[f64], radius: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        l.for_each_point(center, 40.0, |_, x| {
            let w = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if w > radius {
                total += g(w);
            }
        })
        .unwrap();
        total
    }

    #[test]
    fn gaussian_bound_dominates_true_tail() {
        let lattices = [
            BravaisLattice::<f64>::cubic(2).unwrap(),
            BravaisLattice::triangular(),
            BravaisLattice::orthorhombic(&[1.0, 2.0]).unwrap(),
            BravaisLattice::cubic(3).unwrap(),
        ];
        for l in &lattices {
            let center = vec![0.3; l.dim()];
            for &radius in &[1.5, 2.5, 4.0] {
                let beta = 0.7;
                let g = |w: f64| (-beta * w * w).exp();
                let bound = gaussian_tail(l, radius, beta, g);
                let truth = brute_tail(l, &center, radius, g);
                assert!(bound >= truth, "bound {bound} < tail {truth}");
            }
        }
    }

    #[test]
    fn power_bound_dominates_true_tail() {
        let l = BravaisLattice::<f64>::cubic(2).unwrap();
        for &radius in &[2.0, 5.0] {
            let bound = power_tail(&l, radius, 4.0, 1.0);
            let truth = brute_tail(&l, &[0.0, 0.0], radius, |w| w.powf(-4.0));
            assert!(bound >= truth);
        }
        assert!(power_tail(&l, 5.0, 2.0, 1.0).is_infinite());
    }

    #[test]
    fn radius_search_meets_tolerance() {
        let l = BravaisLattice::<f64>::cubic(3).unwrap();
        let bound = |r: f64| gaussian_tail(&l, r, std::f64::consts::PI, |a| (-std::f64::consts::PI * a * a).exp());
        let r = radius_for_tolerance(&l, 1e-14, bound).unwrap();
        assert!(bound(r) <= 1e-14);
        assert!(bound(0.99 * r) > 1e-14);
    }
}
