//! ϑ₃(β; it) and θ_{X+z}(α) = Σ_{x∈X} e^{−πα|x+z|²}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::tail::{gaussian_tail, radius_for_tolerance};
use crate::lattice::BravaisLattice;
use crate::scalar::{CompensatedSum, Real};

/// Which representation produced a theta value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaBranch {
    /// Σ_{x∈X} e^{−πα|x+z|²}.
    Direct,
    /// (V α^{d/2})^{−1} Σ_{p∈X*} cos(2πp·z) e^{−π|p|²/α}.
    Dual,
}

impl std::fmt::Display for ThetaBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ThetaBranch::Direct => "direct",
            ThetaBranch::Dual => "dual",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ThetaEvaluation<T: Real> {
    pub value: T,
    pub radius: T,
    pub tail_bound: T,
    pub branch: ThetaBranch,
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if t > T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("theta needs t > 0, got {t}")))
    }
}

/// ϑ₃(β; it) = Σ_k e^{−πk²t} e^{2πikβ}, summed symmetrically.
pub fn jacobi_theta3_series<T: Real>(beta: T, t: T, tol: T) -> Result<T> {
    check_t(t)?;
    let tf = t.as_f64();
    let tolf = tol.as_f64().max(f64::MIN_POSITIVE);
    let mut k_max = 1usize;
    loop {
        let k = k_max as f64;
        let bound = 2.0 * (-std::f64::consts::PI * k * k * tf).exp()
            / (1.0 - (-std::f64::consts::PI * (2.0 * k + 1.0) * tf).exp());
        if bound < tolf {
            break;
        }
        k_max += 1;
        if k_max > 10_000_000 {
            return Err(Error::Numerical("theta series needs too many terms".into()));
        }
    }
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let mut sum = CompensatedSum::new();
    // Add the smallest terms first.
    for k in (1..k_max).rev() {
        let fk = T::of(k);
        let weight = (-T::PI() * fk * fk * t).exp();
        sum.add(T::lit(2.0) * weight * (two_pi * fk * beta).cos());
    }
    sum.add(T::one());
    Ok(sum.value())
}

/// ϑ₃(β; it) = Π_{r≥1} (1 − q^{2r})(1 + 2cos(2πβ) q^{2r−1} + q^{4r−2}), q = e^{−πt}.
pub fn jacobi_theta3_product<T: Real>(beta: T, t: T, tol: T) -> Result<T> {
    check_t(t)?;
    let q = (-T::PI() * t).exp();
    let q2 = q * q;
    let c = T::lit(2.0) * (T::lit(2.0 * std::f64::consts::PI) * beta).cos();
    let stop = tol * T::lit(0.1) * (T::one() - q2);
    let mut value = T::one();
    let mut odd = q; // q^{2r−1}
    for _ in 0..10_000_000 {
        let even = odd * q; // q^{2r}
        let factor = (T::one() - even) * (T::one() + c * odd + odd * odd);
        value = value * factor;
        if T::lit(4.0) * odd < stop {
            return Ok(value);
        }
        odd = odd * q2;
    }
    Err(Error::Numerical("theta product did not converge".into()))
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")))
    }
}

fn check_tol<T: Real>(tol: T) -> Result<()> {
    if tol > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

/// Direct representation Σ_{x∈X} e^{−πα|x+z|²}.
pub fn theta_direct_sum<T: Real>(
    lattice: &BravaisLattice<T>,
    z: &[T],
    alpha: T,
    tol: T,
) -> Result<ThetaEvaluation<T>> {
    check_alpha(alpha)?;
    check_tol(tol)?;
    let beta = std::f64::consts::PI * alpha.as_f64();
    let bound = |r: f64| gaussian_tail(lattice, r, beta, |a| (-beta * a * a).exp());
    let radius = radius_for_tolerance(lattice, tol.as_f64(), bound)?;
    let center: Vec<T> = z.iter().map(|&v| -v).collect();
    let pa = T::PI() * alpha;
    let mut sum = CompensatedSum::new();
    lattice.for_each_point(&center, T::lit(radius), |_, x| {
        let r2: T = x.iter().zip(z).map(|(a, b)| (*a + *b) * (*a + *b)).sum();
        sum.add((-pa * r2).exp());
    })?;
    Ok(ThetaEvaluation {
        value: sum.value(),
        radius: T::lit(radius),
        tail_bound: T::lit(bound(radius)),
        branch: ThetaBranch::Direct,
    })
}

/// Dual representation (V α^{d/2})^{−1} Σ_{p∈X*} cos(2πp·z) e^{−π|p|²/α}.
pub fn theta_dual_sum<T: Real>(
    lattice: &BravaisLattice<T>,
    z: &[T],
    alpha: T,
    tol: T,
) -> Result<ThetaEvaluation<T>> {
    check_alpha(alpha)?;
    check_tol(tol)?;
    let dual = lattice.dual();
    let d = lattice.dim();
    let prefactor = T::one() / (lattice.covolume() * alpha.powf(T::of(d) * T::lit(0.5)));
    let pf = prefactor.as_f64();
    let beta = std::f64::consts::PI / alpha.as_f64();
    let bound = |r: f64| pf * gaussian_tail(&dual, r, beta, |a| (-beta * a * a).exp());
    let radius = radius_for_tolerance(&dual, tol.as_f64(), bound)?;
    let origin = vec![T::zero(); d];
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let pa = T::PI() / alpha;
    let mut sum = CompensatedSum::new();
    dual.for_each_point(&origin, T::lit(radius), |_, p| {
        let p2: T = p.iter().map(|v| *v * *v).sum();
        let phase: T = p.iter().zip(z).map(|(a, b)| *a * *b).sum();
        sum.add((two_pi * phase).cos() * (-pa * p2).exp());
    })?;
    Ok(ThetaEvaluation {
        value: sum.value() * prefactor,
        radius: T::lit(radius),
        tail_bound: T::lit(bound(radius)),
        branch: ThetaBranch::Dual,
    })
}

/// θ_{X+z}(α), using the direct sum for α ≥ 1 and the dual sum otherwise.
pub fn translated_theta<T: Real>(
    lattice: &BravaisLattice<T>,
    z: &[T],
    alpha: T,
    tol: T,
) -> Result<ThetaEvaluation<T>> {
    if z.len() != lattice.dim() {
        return Err(Error::InvalidArgument(format!(
            "shift has length {}, expected {}",
            z.len(),
            lattice.dim()
        )));
    }
    if alpha >= T::one() {
        theta_direct_sum(lattice, z, alpha, tol)
    } else {
        theta_dual_sum(lattice, z, alpha, tol)
    }
}

/// |direct − dual| for θ_{X+z}(α), both sides summed independently.
pub fn jacobi_transform_residual<T: Real>(
    lattice: &BravaisLattice<T>,
    z: &[T],
    alpha: T,
    tol: T,
) -> Result<T> {
    let direct = theta_direct_sum(lattice, z, alpha, tol)?;
    let dual = theta_dual_sum(lattice, z, alpha, tol)?;
    Ok((direct.value - dual.value).abs())
}
