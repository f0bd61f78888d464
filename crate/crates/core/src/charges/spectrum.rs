//! Autocorrelation s_x = Σ_y φ_y φ_{y+x} and spectral density
//! ξ_k = N^{−d} Σ_y s_y e^{2πi y·k/N}.
//!
//! Under the unitary transform, ξ = |idft(φ)|².

use num_complex::Complex;

use super::fourier::{idft, idft_real};
use super::ChargeConfiguration;
use crate::error::{Error, Result};
use crate::lattice::SublatticeIndex;
use crate::scalar::Real;

/// Relative size (against N^d) of negative ξ tolerated as roundoff.
const CLAMP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Autocorrelation<T> {
    index: SublatticeIndex,
    values: Vec<T>,
}

impl<T: Real> Autocorrelation<T> {
    pub fn index(&self) -> SublatticeIndex {
        self.index
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Nonnegative, symmetric weights ξ_k on K_N*.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDensity<T> {
    index: SublatticeIndex,
    values: Vec<T>,
}

impl<T: Real> SpectralDensity<T> {
    /// Validates symmetry and nonnegativity; roundoff negatives are clamped to zero.
    pub fn new(index: SublatticeIndex, values: Vec<T>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::InvalidArgument("spectrum does not match K_N".into()));
        }
        let scale = T::of(index.len());
        let floor = -T::tol_at(CLAMP_TOL, T::one()) * scale;
        let mut values = values;
        for v in values.iter_mut() {
            if !v.is_finite() || *v < floor {
                return Err(Error::InvalidArgument(format!("spectral weight {v} is negative")));
            }
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        let sym_tol = T::tol_at(1e-9, T::one()) * scale;
        for k in 0..values.len() {
            if (values[k] - values[index.neg(k)]).abs() > sym_tol {
                return Err(Error::InvalidArgument(format!(
                    "spectrum is not symmetric at mode {:?}",
                    index.coords(k)
                )));
            }
        }
        Ok(Self { index, values })
    }

    pub fn index(&self) -> SublatticeIndex {
        self.index
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// (1/N^d) Σ ξ_k.
    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::of(self.values.len())
    }
}

/// s_x = Σ_y φ_y φ_{y+x}, summed directly.
pub fn autocorrelation<T: Real>(phi: &ChargeConfiguration<T>) -> Autocorrelation<T> {
    let index = phi.index();
    let v = phi.values();
    let values = (0..index.len())
        .map(|x| (0..index.len()).map(|y| v[y] * v[index.add(y, x)]).sum())
        .collect();
    Autocorrelation { index, values }
}

/// ξ from its definition as the transform of the autocorrelation.
pub fn spectral_density<T: Real>(phi: &ChargeConfiguration<T>) -> Result<SpectralDensity<T>> {
    let s = autocorrelation(phi);
    let index = s.index;
    let n_d = T::of(index.len());
    // N^{−d} Σ_y s_y e^{+2πi y·k/N} = N^{−d/2} idft(s)_k
    let transformed = idft_real(index, &s.values);
    let scale = n_d.sqrt().recip();
    let imag_tol = T::tol_at(1e-10, T::one()) * n_d.max(T::one());
    let mut values = Vec::with_capacity(index.len());
    for c in transformed {
        let c = c * scale;
        if c.im.abs() > imag_tol {
            return Err(Error::Numerical(format!(
                "spectral density has imaginary residue {:e}",
                c.im.as_f64()
            )));
        }
        values.push(c.re);
    }
    SpectralDensity::new(index, values)
}

/// φ_x = N^{−d/2} Σ_k √ξ_k cos(2π x·k/N).
pub fn reconstruct_from_spectrum<T: Real>(xi: &SpectralDensity<T>) -> Result<ChargeConfiguration<T>> {
    let index = xi.index;
    let roots: Vec<Complex<T>> = xi
        .values
        .iter()
        .map(|v| Complex::new(v.max(T::zero()).sqrt(), T::zero()))
        .collect();
    let values: Vec<T> = idft(index, &roots).iter().map(|c| c.re).collect();
    ChargeConfiguration::new(index.dim(), index.period(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_autocorrelation_and_spectrum() {
        let a = ChargeConfiguration::<f64>::alternating(1).unwrap();
        assert_eq!(autocorrelation(&a).values(), &[2.0, -2.0]);
        let ones = ChargeConfiguration::<f64>::new(1, 2, vec![1.0, 1.0]).unwrap();
        assert_eq!(autocorrelation(&ones).values(), &[2.0, 2.0]);
        let a3 = ChargeConfiguration::<f64>::alternating(3).unwrap();
        let xi = spectral_density(&a3).unwrap();
        let peak = a3.index().flat(&[1, 1, 1]);
        for (k, v) in xi.values().iter().enumerate() {
            let want = if k == peak { 8.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn honeycomb_spectrum_splits_evenly() {
        let h = ChargeConfiguration::<f64>::honeycomb_triangular();
        let xi = spectral_density(&h).unwrap();
        let idx = h.index();
        for (k, v) in xi.values().iter().enumerate() {
            let want = if k == idx.flat(&[1, 1]) || k == idx.flat(&[2, 2]) { 4.5 } else { 0.0 };
            assert!((v - want).abs() < 1e-12, "mode {:?}: {v}", idx.coords(k));
        }
    }

    #[test]
    fn reconstruction_examples() {
        let idx = SublatticeIndex::new(3, 2);
        let mut peak = vec![0.0_f64; 8];
        peak[idx.flat(&[1, 1, 1])] = 8.0;
        let phi = reconstruct_from_spectrum(&SpectralDensity::new(idx, peak).unwrap()).unwrap();
        let alt = ChargeConfiguration::alternating(3).unwrap();
        assert!(phi.max_difference(&alt) < 1e-12);
        let flat = SpectralDensity::new(idx, vec![1.0_f64; 8]).unwrap();
        let phi = reconstruct_from_spectrum(&flat).unwrap();
        assert!((phi.values()[0] - 8.0_f64.sqrt()).abs() < 1e-12);
        assert!(phi.values()[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn invalid_spectra_rejected() {
        let idx = SublatticeIndex::new(1, 3);
        assert!(SpectralDensity::new(idx, vec![1.0_f64, -0.5, -0.5]).is_err());
        assert!(SpectralDensity::new(idx, vec![1.0_f64, 2.0, 0.0]).is_err());
        let clamped = SpectralDensity::new(idx, vec![3.0_f64, -1e-14, -1e-14]).unwrap();
        assert_eq!(clamped.values()[1], 0.0);
    }
}
