//! N-periodic charge configurations on K_N and their spectra.

pub mod fourier;
mod io;
mod spectrum;

pub use fourier::{dft, dft_real, idft, idft_real};
pub use io::ChargeFile;
pub use spectrum::{
    autocorrelation, reconstruct_from_spectrum, spectral_density, Autocorrelation,
    SpectralDensity,
};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lattice::{BravaisLattice, SublatticeIndex};
use crate::scalar::Real;

/// Tolerance on integrality of N·λ when building cosine configurations.
const REPRESENTABLE_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;

/// Real charges φ_m on K_N in lexicographic order of m.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeConfiguration<T> {
    index: SublatticeIndex,
    values: Vec<T>,
}

impl<T: Real> ChargeConfiguration<T> {
    pub fn new(dim: usize, period: usize, values: Vec<T>) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidArgument("period must be at least 1".into()));
        }
        if dim == 0 || dim > crate::lattice::MAX_DIM {
            return Err(Error::InvalidArgument(format!("dimension {dim} unsupported")));
        }
        let index = SublatticeIndex::new(dim, period);
        if values.len() != index.len() {
            return Err(Error::InvalidArgument(format!(
                "{} charges given, K_N has {} points",
                values.len(),
                index.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite charge".into()));
        }
        Ok(Self { index, values })
    }

    /// Alternating charges (−1)^{Σ m_i}, period 2.
    pub fn alternating(dim: usize) -> Result<Self> {
        let index = SublatticeIndex::new(dim, 2);
        let values = index
            .iter()
            .map(|m| if m.iter().sum::<usize>() % 2 == 0 { T::one() } else { -T::one() })
            .collect();
        Self::new(dim, 2, values)
    }

    /// √2 cos(2π(m+n)/3) on K_3 of the triangular lattice.
    pub fn honeycomb_triangular() -> Self {
        let index = SublatticeIndex::new(2, 3);
        let root2 = T::lit(2.0).sqrt();
        let values = index
            .iter()
            .map(|m| {
                if (m[0] + m[1]) % 3 == 0 {
                    root2
                } else {
                    -root2 * T::lit(0.5)
                }
            })
            .collect();
        Self::new(2, 3, values).expect("valid honeycomb")
    }

    /// c·cos(2π m·λ) for dual fractional coordinates λ with N·λ integral, c normalizing.
    pub fn cosine_fractional(
        dim: usize,
        period: usize,
        lambda: &[T],
        require_neutral: bool,
    ) -> Result<Self> {
        if lambda.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "mode has {} coordinates, expected {dim}",
                lambda.len()
            )));
        }
        let n = T::of(period);
        let k: Vec<i64> = lambda
            .iter()
            .map(|&l| {
                let scaled = l * n;
                let r = scaled.round();
                if (scaled - r).abs() > T::tol_at(REPRESENTABLE_TOL, n) {
                    Err(Error::Unrepresentable(period))
                } else {
                    r.to_i64().ok_or(Error::Unrepresentable(period))
                }
            })
            .collect::<Result<_>>()?;
        let index = SublatticeIndex::new(dim, period);
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let raw: Vec<T> = index
            .iter()
            .map(|m| {
                let dot = m
                    .iter()
                    .zip(&k)
                    .map(|(a, b)| (*a as i64 * b).rem_euclid(period as i64))
                    .sum::<i64>()
                    .rem_euclid(period as i64);
                (two_pi * T::of_i64(dot) / n).cos()
            })
            .collect();
        let config = Self::new(dim, period, raw)?.normalized()?;
        if require_neutral && !config.is_neutral_at(1e-10) {
            return Err(Error::NotNeutral(config.net_charge().as_f64()));
        }
        Ok(config)
    }

    /// c·cos(2π x·z0) for a Cartesian dual vector z0 with N·z0 ∈ X*.
    pub fn cosine(
        lattice: &BravaisLattice<T>,
        period: usize,
        z0: &[T],
        require_neutral: bool,
    ) -> Result<Self> {
        let d = lattice.dim();
        if z0.len() != d {
            return Err(Error::InvalidArgument("mode dimension mismatch".into()));
        }
        let g = lattice.generator();
        // λ = A^T z0
        let lambda: Vec<T> = (0..d)
            .map(|j| (0..d).map(|i| g[i * d + j] * z0[i]).sum())
            .collect();
        Self::cosine_fractional(d, period, &lambda, require_neutral)
    }

    /// Independent standard normal charges, optionally made neutral, then normalized.
    pub fn random<R: Rng + ?Sized>(
        dim: usize,
        period: usize,
        neutral: bool,
        rng: &mut R,
    ) -> Result<Self> {
        let index = SublatticeIndex::new(dim, period);
        loop {
            let mut values: Vec<T> = (0..index.len())
                .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                .collect();
            if neutral {
                let mean = values.iter().copied().sum::<T>() / T::of(values.len());
                values.iter_mut().for_each(|v| *v = *v - mean);
            }
            let config = Self::new(dim, period, values)?;
            if config.mean_square() > T::lit(1e-8) {
                return config.normalized();
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    pub fn period(&self) -> usize {
        self.index.period()
    }

    pub fn index(&self) -> SublatticeIndex {
        self.index
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Charge at integer coordinates m (reduced mod N).
    pub fn value(&self, m: &[i64]) -> T {
        self.values[self.index.flat(m)]
    }

    /// Σ φ.
    pub fn net_charge(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// (1/N^d) Σ φ².
    pub fn mean_square(&self) -> T {
        self.values.iter().map(|v| *v * *v).sum::<T>() / T::of(self.values.len())
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.mean_square() - T::one()).abs() <= tol
    }

    pub fn is_neutral(&self, tol: T) -> bool {
        self.net_charge().abs() <= tol
    }

    /// Neutrality at an f64 tolerance, floored at the rounding level of Σ|φ|.
    pub(crate) fn is_neutral_at(&self, tol: f64) -> bool {
        let scale: T = self.values.iter().map(|v| v.abs()).sum();
        self.is_neutral(T::tol_at(tol, scale))
    }

    /// Rescaled copy with (1/N^d) Σ φ² = 1.
    pub fn normalized(&self) -> Result<Self> {
        let ms = self.mean_square();
        if !(ms > T::zero()) {
            return Err(Error::InvalidArgument("cannot normalize the zero configuration".into()));
        }
        let c = ms.sqrt().recip();
        Ok(Self {
            index: self.index,
            values: self.values.iter().map(|&v| v * c).collect(),
        })
    }

    /// φ'(x) = φ(x + a).
    pub fn translated(&self, shift: &[i64]) -> Self {
        let values = (0..self.values.len())
            .map(|f| {
                let m: Vec<i64> = self
                    .index
                    .coords(f)
                    .iter()
                    .zip(shift)
                    .map(|(&c, &s)| c as i64 + s)
                    .collect();
                self.values[self.index.flat(&m)]
            })
            .collect();
        Self { index: self.index, values }
    }

    pub fn negated(&self) -> Self {
        Self {
            index: self.index,
            values: self.values.iter().map(|&v| -v).collect(),
        }
    }

    /// Representative under lattice translations and global sign: maximal φ(0),
    /// ties broken by the lexicographically largest value vector.
    pub fn canonical(&self) -> Self {
        let tol = T::lit(TIE_TOL);
        let mut best: Option<Self> = None;
        for f in 0..self.index.len() {
            let shift: Vec<i64> = self.index.coords(f).iter().map(|&c| c as i64).collect();
            let moved = self.translated(&shift);
            for candidate in [moved.negated(), moved] {
                let better = match &best {
                    None => true,
                    Some(b) => lexicographically_greater(&candidate.values, &b.values, tol),
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
        best.expect("K_N is nonempty")
    }

    /// Equality up to translation and sign, within `tol` per charge.
    pub fn equivalent(&self, other: &Self, tol: T) -> bool {
        if self.index != other.index {
            return false;
        }
        let a = self.canonical();
        let b = other.canonical();
        a.values.iter().zip(&b.values).all(|(x, y)| (*x - *y).abs() <= tol)
    }

    /// Maximum absolute difference to another configuration on the same K_N.
    pub fn max_difference(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }
}

fn lexicographically_greater<T: Real>(a: &[T], b: &[T], tol: T) -> bool {
    for (x, y) in a.iter().zip(b) {
        if *x > *y + tol {
            return true;
        }
        if *x < *y - tol {
            return false;
        }
    }
    false
}
