//! Bravais lattices, their duals, and the finite sublattice K_N.

mod enumerate;
mod sublattice;
pub mod tail;

pub use sublattice::SublatticeIndex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Highest supported dimension.
pub const MAX_DIM: usize = 4;

/// Default cap on the number of coordinate-box cells visited by one enumeration.
pub const DEFAULT_POINT_CAP: usize = 1 << 26;

/// A lattice X = A ℤ^d. Column j of the generator A is the basis vector u_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BravaisLattice<T: Real> {
    dim: usize,
    /// Row-major generator, column j = u_j.
    generator: Vec<T>,
    /// Row-major inverse of the generator; row i = u_i*.
    inverse: Vec<T>,
    covolume: T,
    /// Euclidean norms of the rows of the inverse.
    inverse_row_norms: Vec<T>,
    shortest: T,
}

impl<T: Real> BravaisLattice<T> {
    /// Builds a lattice from a row-major d×d generator whose columns are the basis vectors.
    pub fn from_generator(dim: usize, generator: Vec<T>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidLattice(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if generator.len() != dim * dim {
            return Err(Error::InvalidLattice(format!(
                "generator has {} entries, expected {}",
                generator.len(),
                dim * dim
            )));
        }
        if generator.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidLattice("non-finite generator entry".into()));
        }
        let (inverse, det) = invert(dim, &generator)?;
        let column_product = (0..dim)
            .map(|j| column_norm(dim, &generator, j))
            .fold(T::one(), |acc, n| acc * n);
        if !(det.abs() > T::lit(1e-12) * column_product) {
            return Err(Error::InvalidLattice(format!(
                "generator is singular (|det| = {:e})",
                det.abs()
            )));
        }
        let inverse_row_norms = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| inverse[i * dim + j].powi(2))
                    .sum::<T>()
                    .sqrt()
            })
            .collect();
        let mut lattice = Self {
            dim,
            generator,
            inverse,
            covolume: det.abs(),
            inverse_row_norms,
            shortest: T::zero(),
        };
        lattice.shortest = lattice.compute_shortest();
        Ok(lattice)
    }

    /// Builds a lattice from its basis vectors u_1..u_d.
    pub fn from_basis(basis: &[Vec<T>]) -> Result<Self> {
        let dim = basis.len();
        if basis.iter().any(|u| u.len() != dim) {
            return Err(Error::InvalidLattice("basis vectors must have length d".into()));
        }
        let mut generator = vec![T::zero(); dim * dim];
        for (j, u) in basis.iter().enumerate() {
            for (i, &v) in u.iter().enumerate() {
                generator[i * dim + j] = v;
            }
        }
        Self::from_generator(dim, generator)
    }

    /// Lattice with generator diag(a_1, ..., a_d).
    pub fn orthorhombic(sides: &[T]) -> Result<Self> {
        if let Some(a) = sides.iter().find(|a| !(**a > T::zero()) || !a.is_finite()) {
            return Err(Error::InvalidLattice(format!(
                "orthorhombic side lengths must be positive, got {a}"
            )));
        }
        let dim = sides.len();
        let mut generator = vec![T::zero(); dim * dim];
        for (i, &a) in sides.iter().enumerate() {
            generator[i * dim + i] = a;
        }
        Self::from_generator(dim, generator)
    }

    /// The integer lattice ℤ^d.
    pub fn cubic(dim: usize) -> Result<Self> {
        Self::orthorhombic(&vec![T::one(); dim])
    }

    /// Triangular lattice of unit density in the plane, basis vectors at 120°.
    pub fn triangular() -> Self {
        let scale = (T::lit(2.0) / T::lit(3.0).sqrt()).sqrt();
        let half = T::lit(0.5);
        let basis = vec![
            vec![scale, T::zero()],
            vec![-scale * half, scale * T::lit(3.0).sqrt() * half],
        ];
        Self::from_basis(&basis).expect("triangular basis is nonsingular")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major generator matrix (columns are the basis vectors).
    pub fn generator(&self) -> &[T] {
        &self.generator
    }

    /// Row-major inverse of the generator (rows are the dual basis vectors).
    pub fn inverse(&self) -> &[T] {
        &self.inverse
    }

    /// Basis vector u_j.
    pub fn basis_vector(&self, j: usize) -> Vec<T> {
        (0..self.dim).map(|i| self.generator[i * self.dim + j]).collect()
    }

    /// Dual basis vector u_i*.
    pub fn dual_basis_vector(&self, i: usize) -> Vec<T> {
        self.inverse[i * self.dim..(i + 1) * self.dim].to_vec()
    }

    /// Volume of the unit cell, |det A|.
    pub fn covolume(&self) -> T {
        self.covolume
    }

    /// Length of a shortest nonzero lattice vector.
    pub fn shortest_vector(&self) -> T {
        self.shortest
    }

    /// Radius of the largest balls that can be centred at lattice points without overlap.
    pub fn packing_radius(&self) -> T {
        self.shortest * T::lit(0.5)
    }

    /// Upper bound on the covering radius from Gram–Schmidt: ½ (Σ |b_i*|²)^{1/2}.
    ///
    /// Every point of space lies within this distance of the lattice (nearest-plane rounding).
    pub fn covering_radius_bound(&self) -> T {
        let d = self.dim;
        let mut ortho: Vec<Vec<T>> = Vec::with_capacity(d);
        let mut total = T::zero();
        for j in 0..d {
            let mut v = self.basis_vector(j);
            for b in &ortho {
                let bb: T = b.iter().map(|x| *x * *x).sum();
                let proj: T = v.iter().zip(b).map(|(x, y)| *x * *y).sum::<T>() / bb;
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = *vi - proj * *bi;
                }
            }
            total = total + v.iter().map(|x| *x * *x).sum::<T>();
            ortho.push(v);
        }
        total.sqrt() * T::lit(0.5)
    }

    /// The dual lattice X* with generator A^{-T}.
    pub fn dual(&self) -> Self {
        let d = self.dim;
        let mut generator = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                generator[i * d + j] = self.inverse[j * d + i];
            }
        }
        Self::from_generator(d, generator).expect("dual of a valid lattice is valid")
    }

    /// λX for λ > 0.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidArgument(format!("scale {lambda} must be positive")));
        }
        Self::from_generator(self.dim, self.generator.iter().map(|&v| v * lambda).collect())
    }

    /// Rescaled copy with unit covolume.
    pub fn normalize_density(&self) -> Self {
        let lambda = self.covolume.powf(-T::one() / T::of(self.dim));
        self.scaled(lambda).expect("positive scale")
    }

    /// Cartesian position of the lattice point with integer coordinates n.
    pub fn point(&self, n: &[i64]) -> Vec<T> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| self.generator[i * d + j] * T::of_i64(n[j]))
                    .sum()
            })
            .collect()
    }

    /// Cartesian position of real coordinates λ, that is A λ.
    pub fn to_cartesian(&self, coords: &[T]) -> Vec<T> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.generator[i * d + j] * coords[j]).sum())
            .collect()
    }

    /// Real coordinates A^{-1} x of a Cartesian vector.
    pub fn to_fractional(&self, x: &[T]) -> Vec<T> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.inverse[i * d + j] * x[j]).sum())
            .collect()
    }

    /// |Σ n_i u_i|².
    pub fn quadratic_form(&self, n: &[i64]) -> T {
        self.point(n).iter().map(|v| *v * *v).sum()
    }

    /// All x ∈ X with |x| ≤ radius, in lexicographic order of integer coordinates.
    pub fn points_in_ball(&self, radius: T, include_origin: bool) -> Result<Vec<Vec<T>>> {
        self.points_in_ball_capped(radius, include_origin, DEFAULT_POINT_CAP)
    }

    /// As [`points_in_ball`](Self::points_in_ball) with an explicit cap on the enumeration size.
    pub fn points_in_ball_capped(
        &self,
        radius: T,
        include_origin: bool,
        cap: usize,
    ) -> Result<Vec<Vec<T>>> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
        }
        let origin = vec![T::zero(); self.dim];
        let mut out = Vec::new();
        self.for_each_point_capped(&origin, radius, cap, |n, x| {
            if include_origin || n.iter().any(|&c| c != 0) {
                out.push(x.to_vec());
            }
        })?;
        Ok(out)
    }

    /// Visits every lattice point x with |x − center| ≤ radius as (coordinates, x).
    pub fn for_each_point<F>(&self, center: &[T], radius: T, visit: F) -> Result<()>
    where
        F: FnMut(&[i64], &[T]),
    {
        self.for_each_point_capped(center, radius, DEFAULT_POINT_CAP, visit)
    }

    /// Points of K_N in lexicographic coordinate order.
    pub fn sublattice_points(&self, period: usize) -> Vec<(Vec<usize>, Vec<T>)> {
        let index = SublatticeIndex::new(self.dim, period);
        index
            .iter()
            .map(|m| {
                let n: Vec<i64> = m.iter().map(|&c| c as i64).collect();
                let x = self.point(&n);
                (m, x)
            })
            .collect()
    }

    fn compute_shortest(&self) -> T {
        let bound = (0..self.dim)
            .map(|j| column_norm(self.dim, &self.generator, j))
            .fold(T::infinity(), T::min);
        let origin = vec![T::zero(); self.dim];
        let mut best = bound;
        let slack = bound * (T::one() + T::lit(1e-9));
        // The basis bounds the search, so the box is small.
        let _ = self.for_each_point_capped(&origin, slack, usize::MAX, |n, x| {
            if n.iter().any(|&c| c != 0) {
                let r = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
                if r < best {
                    best = r;
                }
            }
        });
        best
    }
}

fn column_norm<T: Real>(dim: usize, m: &[T], j: usize) -> T {
    (0..dim).map(|i| m[i * dim + j].powi(2)).sum::<T>().sqrt()
}

/// Gauss–Jordan inverse with partial pivoting; returns (inverse, determinant).
fn invert<T: Real>(dim: usize, m: &[T]) -> Result<(Vec<T>, T)> {
    let mut a = m.to_vec();
    let mut inv = vec![T::zero(); dim * dim];
    for i in 0..dim {
        inv[i * dim + i] = T::one();
    }
    let mut det = T::one();
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&r, &s| {
                a[r * dim + col]
                    .abs()
                    .partial_cmp(&a[s * dim + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[pivot * dim + col] == T::zero() {
            return Err(Error::InvalidLattice("generator is singular".into()));
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(col * dim + k, pivot * dim + k);
                inv.swap(col * dim + k, pivot * dim + k);
            }
            det = -det;
        }
        let p = a[col * dim + col];
        det = det * p;
        for k in 0..dim {
            a[col * dim + k] = a[col * dim + k] / p;
            inv[col * dim + k] = inv[col * dim + k] / p;
        }
        for r in 0..dim {
            if r == col {
                continue;
            }
            let factor = a[r * dim + col];
            if factor == T::zero() {
                continue;
            }
            for k in 0..dim {
                a[r * dim + k] = a[r * dim + k] - factor * a[col * dim + k];
                inv[r * dim + k] = inv[r * dim + k] - factor * inv[col * dim + k];
            }
        }
    }
    Ok((inv, det))
}
