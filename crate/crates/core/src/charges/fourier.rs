//! Unitary discrete Fourier transform on K_N, applied axis by axis.
//!
//! dft(φ)_k = N^{−d/2} Σ_m φ_m e^{−2πi m·k/N},  idft(ψ)_m = N^{−d/2} Σ_k ψ_k e^{+2πi m·k/N}.

use num_complex::Complex;

use crate::lattice::SublatticeIndex;
use crate::scalar::Real;

fn transform<T: Real>(index: SublatticeIndex, input: &[Complex<T>], sign: T) -> Vec<Complex<T>> {
    let n = index.period();
    let d = index.dim();
    assert_eq!(input.len(), index.len(), "values do not match K_N");
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let roots: Vec<Complex<T>> = (0..n)
        .map(|j| {
            let angle = sign * two_pi * T::of(j) / T::of(n);
            Complex::new(angle.cos(), angle.sin())
        })
        .collect();
    let scale = T::one() / T::of(n).sqrt();
    let mut data = input.to_vec();
    let mut line = vec![Complex::new(T::zero(), T::zero()); n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (k, out) in line.iter_mut().enumerate() {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for m in 0..n {
                        acc = acc + data[base + m * stride] * roots[(m * k) % n];
                    }
                    *out = acc * scale;
                }
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
    data
}

/// Forward unitary transform of complex values.
pub fn dft<T: Real>(index: SublatticeIndex, values: &[Complex<T>]) -> Vec<Complex<T>> {
    transform(index, values, -T::one())
}

/// Inverse unitary transform of complex values.
pub fn idft<T: Real>(index: SublatticeIndex, values: &[Complex<T>]) -> Vec<Complex<T>> {
    transform(index, values, T::one())
}

/// Forward transform of real values.
pub fn dft_real<T: Real>(index: SublatticeIndex, values: &[T]) -> Vec<Complex<T>> {
    dft(index, &to_complex(values))
}

/// Inverse transform of real values.
pub fn idft_real<T: Real>(index: SublatticeIndex, values: &[T]) -> Vec<Complex<T>> {
    idft(index, &to_complex(values))
}

fn to_complex<T: Real>(values: &[T]) -> Vec<Complex<T>> {
    values.iter().map(|&v| Complex::new(v, T::zero())).collect()
}
