//! Completely monotone potentials f(x) = ∫₀^∞ e^{−t|x|²} dμ(t) and their
//! Ewald splitting at a parameter α:
//!
//!   f₁(x) = ∫_{α²}^∞ e^{−t|x|²} dμ(t),
//!   f₂(w) = π^{d/2} ∫_0^{α²} t^{−d/2} e^{−π²|w|²/t} dμ(t),
//!
//! so that f₂ is the Fourier transform of the long-range remainder f − f₁.
//! An atom of a Gaussian potential sitting exactly at t = α² is counted in f₁.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::tail::{gaussian_tail, power_tail};
use crate::lattice::BravaisLattice;
use crate::quadrature::{integrate, integrate_from_zero, integrate_to_infinity, Tolerance};
use crate::scalar::Real;
use crate::special_functions::gamma::{gamma, upper_incomplete_gamma};

const QUAD_TOL: f64 = 1e-10;

/// Density of the Laplace measure of |x|^{−s}: t^{s/2−1}/Γ(s/2).
pub fn riesz_measure_density<T: Real>(s: T, t: T) -> Result<T> {
    if !(s > T::zero()) || !(t > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "Riesz density needs s > 0 and t > 0, got s = {s}, t = {t}"
        )));
    }
    Ok(t.powf(s * T::lit(0.5) - T::one()) / gamma(s * T::lit(0.5)))
}

/// A user-supplied measure density ρ(t) ≥ 0.
#[derive(Clone)]
pub struct CustomDensity<T> {
    density: Arc<dyn Fn(T) -> T + Send + Sync>,
    summable: bool,
}

impl<T> fmt::Debug for CustomDensity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("summable", &self.summable)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum PotentialKind<T> {
    /// f(x) = |x|^{−s}.
    Riesz { s: T },
    /// f(x) = weight · e^{−t0|x|²}, a single atom of μ at t0.
    Gaussian { t0: T, weight: T },
    Custom(CustomDensity<T>),
}

/// Serializable description used by configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    Riesz { s: f64 },
    Gaussian { t0: f64, #[serde(default = "unit_weight")] weight: f64 },
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug)]
pub struct Potential<T> {
    kind: PotentialKind<T>,
}

impl<T: Real> Potential<T> {
    pub fn riesz(s: T) -> Result<Self> {
        if !(s > T::zero()) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!("Riesz exponent must be positive, got {s}")));
        }
        Ok(Self { kind: PotentialKind::Riesz { s } })
    }

    pub fn gaussian(t0: T, weight: T) -> Result<Self> {
        if !(t0 > T::zero()) || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!("Gaussian t0 must be positive, got {t0}")));
        }
        if !(weight > T::zero()) || !weight.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Gaussian weight must be positive, got {weight}"
            )));
        }
        Ok(Self { kind: PotentialKind::Gaussian { t0, weight } })
    }

    /// Potential given by a measure density; `summable` declares Σ_{x≠0} f(x) < ∞.
    ///
    /// The density is checked for nonnegativity on a logarithmic grid of t.
    pub fn custom<F>(density: F, summable: bool) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        for i in 0..=240 {
            let t = T::lit(10f64.powf(-8.0 + i as f64 / 15.0));
            let v = density(t);
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "measure density is {v} at t = {t}; it must be finite and nonnegative"
                )));
            }
        }
        Ok(Self {
            kind: PotentialKind::Custom(CustomDensity { density: Arc::new(density), summable }),
        })
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        match *spec {
            PotentialSpec::Riesz { s } => Self::riesz(T::lit(s)),
            PotentialSpec::Gaussian { t0, weight } => Self::gaussian(T::lit(t0), T::lit(weight)),
        }
    }

    pub fn kind(&self) -> &PotentialKind<T> {
        &self.kind
    }

    /// Riesz exponent, if this is a Riesz potential.
    pub fn riesz_exponent(&self) -> Option<T> {
        match self.kind {
            PotentialKind::Riesz { s } => Some(s),
            _ => None,
        }
    }

    /// Whether Σ_{x∈X∖{0}} f(x) converges in dimension d.
    pub fn is_summable(&self, dim: usize) -> bool {
        match &self.kind {
            PotentialKind::Riesz { s } => *s > T::of(dim),
            PotentialKind::Gaussian { .. } => true,
            PotentialKind::Custom(c) => c.summable,
        }
    }

    /// Density of μ at t, or `None` for the atomic Gaussian measure.
    pub fn measure_density(&self, t: T) -> Option<T> {
        match &self.kind {
            PotentialKind::Riesz { s } => riesz_measure_density(*s, t).ok(),
            PotentialKind::Gaussian { .. } => None,
            PotentialKind::Custom(c) => Some((c.density)(t)),
        }
    }

    /// f(x) for x ≠ 0.
    pub fn evaluate(&self, x: &[T]) -> Result<T> {
        self.evaluate_sq(nonzero_norm_sq(x)?)
    }

    /// f as a function of r² = |x|² > 0.
    pub fn evaluate_sq(&self, r2: T) -> Result<T> {
        match &self.kind {
            PotentialKind::Riesz { s } => Ok(r2.powf(-*s * T::lit(0.5))),
            PotentialKind::Gaussian { t0, weight } => Ok(*weight * (-*t0 * r2).exp()),
            PotentialKind::Custom(c) => {
                let rho = &c.density;
                let tol = Tolerance::relative(QUAD_TOL);
                let low = integrate_from_zero(|t| (-t * r2).exp() * rho(t), T::one(), tol)?;
                let high = integrate_to_infinity(|t| (-t * r2).exp() * rho(t), T::one(), tol)?;
                Ok(low + high)
            }
        }
    }

    /// Short-range part f₁ at x ≠ 0.
    pub fn split_short(&self, alpha: T, x: &[T]) -> Result<T> {
        check_alpha(alpha)?;
        self.split_short_sq(alpha, nonzero_norm_sq(x)?)
    }

    /// f₁ as a function of r² > 0.
    pub fn split_short_sq(&self, alpha: T, r2: T) -> Result<T> {
        let a2 = alpha * alpha;
        match &self.kind {
            PotentialKind::Riesz { s } => {
                let h = *s * T::lit(0.5);
                Ok(upper_incomplete_gamma(h, a2 * r2)? / gamma(h) * r2.powf(-h))
            }
            PotentialKind::Gaussian { t0, weight } => Ok(if *t0 >= a2 {
                *weight * (-*t0 * r2).exp()
            } else {
                T::zero()
            }),
            PotentialKind::Custom(c) => {
                let rho = &c.density;
                integrate_to_infinity(|t| (-t * r2).exp() * rho(t), a2, Tolerance::relative(QUAD_TOL))
            }
        }
    }

    /// Long-range part f₂ at a dual-space vector w in dimension `w.len()`.
    pub fn split_long(&self, alpha: T, w: &[T]) -> Result<T> {
        check_alpha(alpha)?;
        let w2: T = w.iter().map(|v| *v * *v).sum();
        self.split_long_sq(alpha, w.len(), w2)
    }

    /// f₂ as a function of |w|² in dimension d.
    pub fn split_long_sq(&self, alpha: T, dim: usize, w2: T) -> Result<T> {
        let d = T::of(dim);
        let half = T::lit(0.5);
        let a2 = alpha * alpha;
        let pi_half_d = T::PI().powf(d * half);
        match &self.kind {
            PotentialKind::Riesz { s } => {
                let g = gamma(*s * half);
                if w2 == T::zero() {
                    if *s <= d {
                        return Err(Error::NotSummable(format!(
                            "long-range self term diverges for s = {s} <= d = {dim}"
                        )));
                    }
                    return Ok(pi_half_d * T::lit(2.0) * alpha.powf(*s - d) / ((*s - d) * g));
                }
                let pw = T::PI() * w2.sqrt();
                let u = T::PI() * T::PI() * w2 / a2;
                Ok(pi_half_d * pw.powf(*s - d) * upper_incomplete_gamma((d - *s) * half, u)? / g)
            }
            PotentialKind::Gaussian { t0, weight } => Ok(if *t0 < a2 {
                *weight * pi_half_d * t0.powf(-d * half) * (-T::PI() * T::PI() * w2 / *t0).exp()
            } else {
                T::zero()
            }),
            PotentialKind::Custom(c) => {
                let rho = &c.density;
                let p2 = T::PI() * T::PI() * w2;
                let integrand = |t: T| {
                    if t <= T::zero() {
                        T::zero()
                    } else {
                        t.powf(-d * half) * (-p2 / t).exp() * rho(t)
                    }
                };
                let v = integrate_from_zero(integrand, a2, Tolerance::relative(QUAD_TOL))?;
                if !v.is_finite() {
                    return Err(Error::NotSummable("long-range self term diverges".into()));
                }
                Ok(pi_half_d * v)
            }
        }
    }

    /// μ([0, α²]) restricted to the long-range part.
    pub fn measure_mass(&self, alpha: T) -> Result<T> {
        check_alpha(alpha)?;
        let a2 = alpha * alpha;
        match &self.kind {
            PotentialKind::Riesz { s } => {
                Ok(alpha.powf(*s) * T::lit(2.0) / (*s * gamma(*s * T::lit(0.5))))
            }
            PotentialKind::Gaussian { t0, weight } => {
                Ok(if *t0 < a2 { *weight } else { T::zero() })
            }
            PotentialKind::Custom(c) => {
                let rho = &c.density;
                integrate_from_zero(|t| rho(t), a2, Tolerance::relative(QUAD_TOL))
            }
        }
    }

    /// Bound on Σ_{|y|>R} f₁(|y|) over any shift of the lattice.
    pub fn short_tail(&self, lattice: &BravaisLattice<T>, alpha: T, radius: f64) -> f64 {
        let beta = (alpha * alpha).as_f64();
        match &self.kind {
            PotentialKind::Gaussian { t0, weight } => {
                if *t0 >= alpha * alpha {
                    let t0 = t0.as_f64();
                    let w = weight.as_f64();
                    gaussian_tail(lattice, radius, t0, |a| w * (-t0 * a * a).exp())
                } else {
                    0.0
                }
            }
            _ => gaussian_tail(lattice, radius, beta, |a| {
                self.split_short_sq(alpha, T::lit(a * a))
                    .map(|v| v.as_f64())
                    .unwrap_or(f64::INFINITY)
            }),
        }
    }

    /// Bound on Σ_{|q|>R} f₂(|q|) over any shift of the dual lattice `dual`.
    pub fn long_tail(&self, dual: &BravaisLattice<T>, alpha: T, radius: f64) -> f64 {
        let pi2 = std::f64::consts::PI.powi(2);
        let dim = dual.dim();
        let beta = match &self.kind {
            PotentialKind::Gaussian { t0, .. } => {
                if *t0 >= alpha * alpha {
                    return 0.0;
                }
                pi2 / t0.as_f64()
            }
            _ => pi2 / (alpha * alpha).as_f64(),
        };
        gaussian_tail(dual, radius, beta, |a| {
            self.split_long_sq(alpha, dim, T::lit(a * a))
                .map(|v| v.as_f64())
                .unwrap_or(f64::INFINITY)
        })
    }

    /// Bound on Σ_{|y|>R} f(|y|) e^{−η|y|²}.
    pub fn screened_tail(&self, lattice: &BravaisLattice<T>, eta: f64, radius: f64) -> f64 {
        gaussian_tail(lattice, radius, eta, |a| {
            self.evaluate_sq(T::lit(a * a))
                .map(|v| v.as_f64() * (-eta * a * a).exp())
                .unwrap_or(f64::INFINITY)
        })
    }

    /// Bound on Σ_{|y|>R} f(|y|) for a summable potential.
    pub fn direct_tail(&self, lattice: &BravaisLattice<T>, radius: f64) -> Result<f64> {
        let d = lattice.dim();
        if !self.is_summable(d) {
            return Err(Error::NotSummable(format!("{self:?} in dimension {d}")));
        }
        Ok(match &self.kind {
            PotentialKind::Riesz { s } => power_tail(lattice, radius, s.as_f64(), 1.0),
            PotentialKind::Gaussian { t0, weight } => {
                let t0 = t0.as_f64();
                let w = weight.as_f64();
                gaussian_tail(lattice, radius, t0, |a| w * (-t0 * a * a).exp())
            }
            PotentialKind::Custom(_) => self.monotone_tail(lattice, radius)?,
        })
    }

    /// (d/r^d) ∫_{R−2r}^∞ f(w)(w+r)^{d−1} dw by quadrature.
    fn monotone_tail(&self, lattice: &BravaisLattice<T>, radius: f64) -> Result<f64> {
        let d = lattice.dim();
        let r = lattice.packing_radius().as_f64();
        let a = radius - 2.0 * r;
        if !(a > 0.0) {
            return Ok(f64::INFINITY);
        }
        let f = |w: f64| {
            self.evaluate_sq(T::lit(w * w))
                .map(|v| v.as_f64())
                .unwrap_or(f64::INFINITY)
                * (w + r).powi(d as i32 - 1)
        };
        let v = integrate_to_infinity(f, a, Tolerance::relative(1e-6))?;
        Ok(d as f64 / r.powi(d as i32) * v * (1.0 + 1e-5))
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")))
    }
}

fn nonzero_norm_sq<T: Real>(x: &[T]) -> Result<T> {
    let r2: T = x.iter().map(|v| *v * *v).sum();
    if r2 > T::zero() {
        Ok(r2)
    } else {
        Err(Error::InvalidArgument("potential evaluated at the origin".into()))
    }
}

/// Quadrature of ∫_a^b e^{−t r²} dμ(t) for densities, used to validate the split.
pub fn laplace_piece<T: Real>(p: &Potential<T>, r2: T, a: T, b: T) -> Result<T> {
    match p.kind() {
        PotentialKind::Gaussian { t0, weight } => Ok(if *t0 >= a && *t0 < b {
            *weight * (-*t0 * r2).exp()
        } else {
            T::zero()
        }),
        _ => integrate(
            |t| (-t * r2).exp() * p.measure_density(t).unwrap_or(T::zero()),
            a,
            b,
            Tolerance::relative(QUAD_TOL),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_values() {
        let r2 = Potential::<f64>::riesz(2.0).unwrap();
        assert_relative_eq!(r2.evaluate(&[2.0, 0.0]).unwrap(), 0.25);
        let r1 = Potential::<f64>::riesz(1.0).unwrap();
        assert_relative_eq!(r1.evaluate(&[3.0, 4.0]).unwrap(), 0.2);
        let g = Potential::<f64>::gaussian(std::f64::consts::PI, 1.0).unwrap();
        assert_relative_eq!(g.evaluate(&[1.0]).unwrap(), (-std::f64::consts::PI).exp());
        assert!(r1.evaluate(&[0.0, 0.0]).is_err());
        assert!(Potential::<f64>::riesz(0.0).is_err());
        assert!(Potential::<f64>::gaussian(1.0, -1.0).is_err());
    }

    #[test]
    fn split_examples() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let r1 = Potential::<f64>::riesz(1.0).unwrap();
        assert_relative_eq!(
            r1.split_short(sqrt_pi, &[1.0, 0.0, 0.0]).unwrap(),
            0.012_188_882_184_802_897, // erfc(√π)
            max_relative = 1e-8
        );
        let g = Potential::<f64>::gaussian(1.0, 1.0).unwrap();
        assert_eq!(g.split_short(2.0, &[0.3]).unwrap(), 0.0);
        let w = [0.2, 0.1];
        let expected = std::f64::consts::PI * (-std::f64::consts::PI.powi(2) * 0.05).exp();
        assert_relative_eq!(g.split_long(2.0, &w).unwrap(), expected, max_relative = 1e-14);
        assert!(r1.split_long(1.0, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn masses() {
        let r2 = Potential::<f64>::riesz(2.0).unwrap();
        assert_relative_eq!(r2.measure_mass(1.0).unwrap(), 1.0, max_relative = 1e-14);
        let r1 = Potential::<f64>::riesz(1.0).unwrap();
        assert_relative_eq!(r1.measure_mass(std::f64::consts::PI.sqrt()).unwrap(), 2.0, max_relative = 1e-13);
        let g = Potential::<f64>::gaussian(5.0, 1.0).unwrap();
        assert_eq!(g.measure_mass(1.0).unwrap(), 0.0);
    }

    #[test]
    fn riesz_density_values() {
        assert_relative_eq!(riesz_measure_density(2.0_f64, 3.0).unwrap(), 1.0);
        assert_relative_eq!(riesz_measure_density(4.0_f64, 2.0).unwrap(), 2.0, max_relative = 1e-14);
        assert!(riesz_measure_density(-1.0_f64, 2.0).is_err());
    }

    #[test]
    fn custom_density_reproduces_riesz() {
        let custom = Potential::<f64>::custom(|t| riesz_measure_density(3.0, t).unwrap(), true).unwrap();
        let riesz = Potential::<f64>::riesz(3.0).unwrap();
        for &r in &[0.7, 1.0, 2.3] {
            let x = [r, 0.0];
            assert_relative_eq!(custom.evaluate(&x).unwrap(), riesz.evaluate(&x).unwrap(), max_relative = 1e-9);
            assert_relative_eq!(
                custom.split_short(1.3, &x).unwrap(),
                riesz.split_short(1.3, &x).unwrap(),
                max_relative = 1e-9
            );
            assert_relative_eq!(
                custom.split_long(1.3, &x).unwrap(),
                riesz.split_long(1.3, &x).unwrap(),
                max_relative = 1e-9
            );
        }
        assert_relative_eq!(custom.measure_mass(1.3).unwrap(), riesz.measure_mass(1.3).unwrap(), max_relative = 1e-9);
        assert!(Potential::<f64>::custom(|t| 1.0 - t, true).is_err());
    }

    #[test]
    fn tails_dominate() {
        let l = BravaisLattice::<f64>::cubic(2).unwrap();
        let r3 = Potential::<f64>::riesz(3.0).unwrap();
        let bound = r3.direct_tail(&l, 6.0).unwrap();
        let mut truth = 0.0;
        l.for_each_point(&[0.0, 0.0], 200.0, |_, x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r > 6.0 {
                truth += r.powi(-3);
            }
        })
        .unwrap();
        assert!(bound >= truth && bound < 3.0 * truth, "{bound} vs {truth}");
        assert!(Potential::<f64>::riesz(1.0).unwrap().direct_tail(&l, 6.0).is_err());
    }
}
