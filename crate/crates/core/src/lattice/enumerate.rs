//! Enumeration of lattice points inside a ball.
//!
//! The outer d−1 integer coordinates range over a box derived from the rows of
//! A^{-1}: |n_i − (A^{-1}c)_i| = |u_i*·(x − c)| ≤ R·|u_i*|. For each outer
//! tuple the last coordinate range is obtained exactly from the quadratic
//! |y + t u_d|² ≤ R².

use super::BravaisLattice;
use crate::error::{Error, Result};
use crate::scalar::Real;

impl<T: Real> BravaisLattice<T> {
    /// Visits lattice points with |x − center| ≤ radius in lexicographic coordinate order.
    pub fn for_each_point_capped<F>(
        &self,
        center: &[T],
        radius: T,
        cap: usize,
        mut visit: F,
    ) -> Result<()>
    where
        F: FnMut(&[i64], &[T]),
    {
        let d = self.dim;
        if center.len() != d {
            return Err(Error::InvalidArgument(format!(
                "center has length {}, expected {d}",
                center.len()
            )));
        }
        if !(radius >= T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("radius {radius} must be finite and >= 0")));
        }
        let frac = self.to_fractional(center);
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        let mut cells = 1.0_f64;
        for i in 0..d {
            let reach = radius * self.inverse_row_norms[i];
            let a = (frac[i] - reach).ceil();
            let b = (frac[i] + reach).floor();
            if a > b {
                return Ok(());
            }
            lo[i] = a.to_i64().ok_or_else(|| overflow(radius))?;
            hi[i] = b.to_i64().ok_or_else(|| overflow(radius))?;
            cells *= (hi[i] - lo[i] + 1) as f64;
        }
        if cells > cap as f64 {
            return Err(Error::TooManyPoints { needed: cells, cap });
        }

        let r2 = radius * radius;
        let last = d - 1;
        let ud = self.basis_vector(last);
        let ud2: T = ud.iter().map(|v| *v * *v).sum();
        let slack = T::lit(1e-9);
        let mut n = lo.clone();
        let mut y = vec![T::zero(); d];
        let mut x = vec![T::zero(); d];
        loop {
            // y = A (n_1, ..., n_{d-1}, 0) − c
            for (i, yi) in y.iter_mut().enumerate() {
                let mut acc = -center[i];
                for j in 0..last {
                    acc = acc + self.generator[i * d + j] * T::of_i64(n[j]);
                }
                *yi = acc;
            }
            let b: T = y.iter().zip(&ud).map(|(a, u)| *a * *u).sum();
            let y2: T = y.iter().map(|v| *v * *v).sum();
            let disc = b * b - ud2 * (y2 - r2);
            if disc >= -slack * (b * b + ud2 * r2) {
                let root = disc.max(T::zero()).sqrt();
                let t_lo = ((-b - root) / ud2 - slack).ceil();
                let t_hi = ((-b + root) / ud2 + slack).floor();
                let start = t_lo.to_i64().unwrap_or(lo[last]).max(lo[last]);
                let stop = t_hi.to_i64().unwrap_or(hi[last]).min(hi[last]);
                for t in start..=stop {
                    n[last] = t;
                    let ft = T::of_i64(t);
                    let mut dist2 = T::zero();
                    for i in 0..d {
                        let rel = y[i] + ud[i] * ft;
                        x[i] = rel + center[i];
                        dist2 = dist2 + rel * rel;
                    }
                    if dist2 <= r2 {
                        visit(&n, &x);
                    }
                }
            }
            // Advance the outer odometer, last outer coordinate fastest.
            let mut axis = last;
            loop {
                if axis == 0 {
                    return Ok(());
                }
                axis -= 1;
                if n[axis] < hi[axis] {
                    n[axis] += 1;
                    for k in axis + 1..last {
                        n[k] = lo[k];
                    }
                    break;
                }
            }
        }
    }
}

fn overflow<T: Real>(radius: T) -> Error {
    Error::InvalidArgument(format!("radius {radius} overflows integer coordinates"))
}
