//! Minimizers of λ ↦ θ_{X*+z}(α), z = Σ λ_i u_i*, over the dual unit cell.
//!
//! Two exact forms of the same function are used, both in f64:
//!
//!   direct   Σ_m e^{−πα (m+λ)ᵀ G* (m+λ)},              G* = A^{−1}A^{−T}
//!   Fourier  (V/α^{d/2}) [1 + Σ_{n≠0} e^{−π nᵀGn/α} cos(2π n·λ)],  G = AᵀA
//!
//! For small α the Fourier form drops the constant so the landscape is
//! resolved to full relative precision even when it is nearly flat.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::tail::{gaussian_tail, radius_for_tolerance};
use crate::lattice::{BravaisLattice, SublatticeIndex};
use crate::scalar::Real;
use crate::special_functions::{translated_theta, ThetaBranch};

/// α samples standing in for "every α > 0".
pub const DEFAULT_ALPHAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Largest denominator tried when recognising a minimizer as rational.
pub const MAX_DENOMINATOR: u64 = 64;

const RATIONAL_TOL: f64 = 1e-7;
const GRID_CAP: usize = 1 << 22;
const SELECT_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ThetaMinimum<T: Real> {
    /// Fractional dual coordinates λ ∈ [0,1)^d, lexicographically sorted.
    pub minimizers: Vec<Vec<T>>,
    pub alphas: Vec<T>,
    /// θ_{X*+z}(α) at the first minimizer, one entry per α.
    pub values: Vec<T>,
    pub multiplicity: usize,
    /// Smallest N with every minimizer in (1/N)X*, if the denominators stay ≤ 64.
    pub representability: Option<usize>,
}

impl<T: Real> ThetaMinimum<T> {
    /// Whether N·z₀ ∈ X* for every minimizer.
    pub fn admits_period(&self, period: usize) -> bool {
        matches!(self.representability, Some(r) if period % r == 0)
    }

    /// Whether λ ↦ 1 − λ (mod 1) maps the minimizer set onto itself within `tol`.
    pub fn is_center_symmetric(&self, tol: T) -> bool {
        self.minimizers.iter().all(|z| {
            let image: Vec<f64> = z.iter().map(|v| (1.0 - v.as_f64()).rem_euclid(1.0)).collect();
            self.minimizers.iter().any(|w| {
                let w: Vec<f64> = w.iter().map(|v| v.as_f64()).collect();
                periodic_distance(&image, &w) <= tol.as_f64()
            })
        })
    }
}

/// One row of a theta landscape table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LandscapeRow<T: Real> {
    pub lambda: Vec<T>,
    pub alpha: T,
    pub value: T,
    pub branch: ThetaBranch,
    pub tail: T,
}

/// θ_{X*+z}(α) on the grid λ = m/grid, α outermost, λ in lexicographic order.
pub fn theta_landscape<T: Real>(
    lattice: &BravaisLattice<T>,
    alphas: &[T],
    grid: usize,
    tol: T,
) -> Result<Vec<LandscapeRow<T>>> {
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must have at least one point per axis".into()));
    }
    check_alphas(alphas)?;
    let d = lattice.dim();
    let index = SublatticeIndex::new(d, grid);
    if index.len() > GRID_CAP {
        return Err(Error::InvalidArgument(format!("grid has more than {GRID_CAP} points")));
    }
    let dual = lattice.dual();
    let mut rows = Vec::with_capacity(alphas.len() * index.len());
    for &alpha in alphas {
        let chunk: Vec<Result<LandscapeRow<T>>> = (0..index.len())
            .into_par_iter()
            .map(|f| {
                let lambda: Vec<T> =
                    index.coords(f).iter().map(|&c| T::of(c) / T::of(grid)).collect();
                let z = dual.to_cartesian(&lambda);
                let eval = translated_theta(&dual, &z, alpha, tol)?;
                Ok(LandscapeRow {
                    lambda,
                    alpha,
                    value: eval.value,
                    branch: eval.branch,
                    tail: eval.tail_bound,
                })
            })
            .collect();
        for row in chunk {
            rows.push(row?);
        }
    }
    Ok(rows)
}

/// Grid scan, coordinate-wise golden section to `refine_tol`, then a Newton
/// polish; the minimizer set must coincide for every α.
pub fn minimize_translated_theta<T: Real>(
    lattice: &BravaisLattice<T>,
    alphas: &[T],
    grid: usize,
    refine_tol: T,
) -> Result<ThetaMinimum<T>> {
    if grid < 8 {
        return Err(Error::InvalidArgument(format!("grid must be at least 8, got {grid}")));
    }
    check_alphas(alphas)?;
    let refine_tol = refine_tol.as_f64();
    if !(refine_tol > 0.0 && refine_tol < 0.1) {
        return Err(Error::InvalidArgument(format!("refine_tol {refine_tol} out of range")));
    }
    let d = lattice.dim();
    let index = SublatticeIndex::new(d, grid);
    if index.len() > GRID_CAP {
        return Err(Error::InvalidArgument(format!("grid has more than {GRID_CAP} points")));
    }
    let lattice = to_f64(lattice)?;
    let cluster_tol = (1e3 * refine_tol).max(1e-7);

    let mut per_alpha: Vec<(f64, Vec<Vec<f64>>, f64)> = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let alpha = alpha.as_f64();
        let objective = Objective::new(&lattice, alpha)?;
        let minimizers = minimize_one(&objective, index, grid, refine_tol, cluster_tol)?;
        let value = objective.full(&minimizers[0]);
        per_alpha.push((alpha, minimizers, value));
    }

    let (alpha0, reference, _) = &per_alpha[0];
    for (alpha, set, _) in &per_alpha[1..] {
        let same = set.len() == reference.len()
            && set
                .iter()
                .all(|z| reference.iter().any(|w| periodic_distance(z, w) <= cluster_tol));
        if !same {
            return Err(Error::InconsistentMinimizers(format!(
                "α = {alpha0}: {reference:?}; α = {alpha}: {set:?}"
            )));
        }
    }

    Ok(ThetaMinimum {
        minimizers: reference.iter().map(|z| z.iter().map(|&v| T::lit(v)).collect()).collect(),
        alphas: alphas.to_vec(),
        values: per_alpha.iter().map(|(_, _, v)| T::lit(*v)).collect(),
        multiplicity: reference.len(),
        representability: representability(reference),
    })
}

fn check_alphas<T: Real>(alphas: &[T]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("at least one alpha is required".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > T::zero() && a.is_finite())) {
        return Err(Error::InvalidArgument(format!("alpha must be positive and finite, got {a}")));
    }
    Ok(())
}

fn to_f64<T: Real>(lattice: &BravaisLattice<T>) -> Result<BravaisLattice<f64>> {
    let g = lattice.generator().iter().map(|v| v.as_f64()).collect();
    BravaisLattice::from_generator(lattice.dim(), g)
}

fn minimize_one(
    objective: &Objective,
    index: SublatticeIndex,
    grid: usize,
    refine_tol: f64,
    cluster_tol: f64,
) -> Result<Vec<Vec<f64>>> {
    let d = index.dim();
    let step = 1.0 / grid as f64;
    let values: Vec<f64> = (0..index.len())
        .into_par_iter()
        .map(|f| {
            let lambda: Vec<f64> = index.coords(f).iter().map(|&c| c as f64 * step).collect();
            objective.value(&lambda)
        })
        .collect();

    // Offsets of the 3^d − 1 neighbours.
    let neighbours: Vec<Vec<i64>> = SublatticeIndex::new(d, 3)
        .iter()
        .map(|c| c.iter().map(|&v| v as i64 - 1).collect::<Vec<i64>>())
        .filter(|c| c.iter().any(|&v| v != 0))
        .collect();
    let seeds: Vec<Vec<f64>> = (0..index.len())
        .filter(|&f| {
            let c: Vec<i64> = index.coords(f).iter().map(|&v| v as i64).collect();
            neighbours.iter().all(|off| {
                let n: Vec<i64> = c.iter().zip(off).map(|(a, b)| a + b).collect();
                let other = values[index.flat(&n)];
                values[f] <= other + 1e-12 * other.abs()
            })
        })
        .map(|f| index.coords(f).iter().map(|&c| c as f64 * step).collect())
        .collect();

    let mut refined: Vec<Vec<f64>> =
        seeds.par_iter().map(|seed| refine(objective, seed, step, refine_tol)).collect();
    // θ(z) = θ(Σu_i* − z): mirror images are minimizers too.
    let mirrors: Vec<Vec<f64>> =
        refined.iter().map(|z| z.iter().map(|v| wrap(1.0 - v)).collect()).collect();
    refined.extend(mirrors);

    let mut best = refined
        .first()
        .ok_or_else(|| Error::Numerical("theta landscape has no local minimum".into()))?;
    for z in &refined[1..] {
        if objective.delta(best, z).0 < 0.0 {
            best = z;
        }
    }
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for z in &refined {
        let (gap, scale) = objective.delta(best, z);
        if !gap.is_finite() {
            return Err(Error::Numerical("theta landscape is not finite".into()));
        }
        if gap <= SELECT_RTOL * scale && !kept.iter().any(|w| periodic_distance(z, w) <= cluster_tol) {
            kept.push(z.clone());
        }
    }
    kept.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    Ok(kept)
}

fn refine(objective: &Objective, seed: &[f64], step: f64, tol: f64) -> Vec<f64> {
    let d = seed.len();
    let mut z = seed.to_vec();
    let mut half_width = step;
    for _ in 0..200 {
        let mut moved = 0.0_f64;
        for i in 0..d {
            let centre = z[i];
            let best = golden_section(
                |t| {
                    let mut trial = z.clone();
                    trial[i] = t;
                    objective.delta(&z, &trial).0
                },
                centre - half_width,
                centre + half_width,
                tol,
            );
            moved = moved.max((best - centre).abs());
            z[i] = best;
        }
        if moved < tol {
            break;
        }
        half_width = (2.0 * moved).clamp(4.0 * tol, step);
    }

    // Newton on the gradient, guarded against leaving the basin.
    for _ in 0..30 {
        let (_, g, h) = objective.derivatives(&z);
        let Some(chol) = DMatrix::from_row_slice(d, d, &h).cholesky() else {
            break;
        };
        let delta = chol.solve(&DVector::from_column_slice(&g));
        let size = delta.norm();
        if !(size < step) {
            break;
        }
        z.iter_mut().zip(delta.iter()).for_each(|(a, b)| *a -= b);
        if size < 1e-15 {
            break;
        }
    }
    z.iter().map(|v| wrap(*v)).collect()
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fe = f(e);
    while b - a > tol {
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e);
        }
    }
    0.5 * (a + b)
}

fn wrap(v: f64) -> f64 {
    let w = v.rem_euclid(1.0);
    if w >= 1.0 - 1e-15 {
        0.0
    } else {
        w
    }
}

/// Distance on the torus ℝ^d/ℤ^d in the max norm.
pub(crate) fn periodic_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = (x - y).rem_euclid(1.0);
            t.min(1.0 - t)
        })
        .fold(0.0, f64::max)
}

/// Smallest common denominator ≤ 64 of every coordinate, by continued fractions.
fn representability(points: &[Vec<f64>]) -> Option<usize> {
    let mut n: u64 = 1;
    for x in points.iter().flatten() {
        let q = denominator(*x)?;
        n = n / gcd(n, q) * q;
    }
    usize::try_from(n).ok()
}

fn denominator(x: f64) -> Option<u64> {
    let (mut h0, mut h1) = (0_i64, 1_i64);
    let (mut k0, mut k1) = (1_i64, 0_i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let (h, k) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k as u64 > MAX_DENOMINATOR {
            return None;
        }
        if (x - h as f64 / k as f64).abs() <= RATIONAL_TOL {
            return Some(k as u64);
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = rest - a;
        if frac < 1e-300 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

enum Form {
    /// Integer offsets m and the dual Gram matrix.
    Direct { offsets: Vec<Vec<f64>>, gram: Vec<f64>, rate: f64 },
    /// Integer n ≠ 0 with weights e^{−π|An|²/α}, and V/α^{d/2}.
    Fourier { terms: Vec<(Vec<f64>, f64)>, prefactor: f64 },
}

struct Objective {
    dim: usize,
    form: Form,
}

impl Objective {
    fn new(lattice: &BravaisLattice<f64>, alpha: f64) -> Result<Self> {
        let d = lattice.dim();
        let pi = std::f64::consts::PI;
        let covolume = lattice.covolume();
        let dual = lattice.dual();
        let form = if alpha >= covolume.powf(2.0 / d as f64) {
            let rate = pi * alpha;
            // Relative to the smallest possible nearest term, at a deep hole.
            let floor = (-rate * dual.covering_radius_bound().powi(2)).exp();
            let radius = radius_for_tolerance(&dual, 1e-18 * floor, |r| {
                gaussian_tail(&dual, r, rate, |a| (-rate * a * a).exp())
            })?;
            // |Σ λ_i u_i*| for λ ∈ [−1/2, 3/2]^d.
            let reach: f64 = 1.5
                * (0..d)
                    .map(|i| dual.basis_vector(i).iter().map(|v| v * v).sum::<f64>().sqrt())
                    .sum::<f64>();
            let mut offsets = Vec::new();
            dual.for_each_point(&vec![0.0; d], radius + reach, |m, _| {
                offsets.push(m.iter().map(|&c| c as f64).collect());
            })?;
            let a = dual.generator();
            let gram = (0..d * d)
                .map(|ij| (0..d).map(|l| a[l * d + ij / d] * a[l * d + ij % d]).sum())
                .collect();
            Form::Direct { offsets, gram, rate }
        } else {
            let rate = pi / alpha;
            let lead = (-rate * lattice.shortest_vector().powi(2)).exp();
            let radius = radius_for_tolerance(lattice, 1e-18 * lead, |r| {
                gaussian_tail(lattice, r, rate, |a| (-rate * a * a).exp())
            })?;
            let mut terms = Vec::new();
            lattice.for_each_point(&vec![0.0; d], radius, |n, x| {
                if n.iter().any(|&c| c != 0) {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    terms.push((n.iter().map(|&c| c as f64).collect(), (-rate * r2).exp()));
                }
            })?;
            Form::Fourier { terms, prefactor: covolume / alpha.powf(0.5 * d as f64) }
        };
        Ok(Self { dim: d, form })
    }

    /// Quantity minimized: θ itself (direct) or θ·α^{d/2}/V − 1 (Fourier).
    fn value(&self, lambda: &[f64]) -> f64 {
        let lambda: Vec<f64> = lambda.iter().map(|v| v.rem_euclid(1.0)).collect();
        let two_pi = 2.0 * std::f64::consts::PI;
        match &self.form {
            Form::Direct { offsets, gram, rate } => offsets
                .iter()
                .map(|m| (-rate * self.quad(gram, m, &lambda)).exp())
                .sum(),
            Form::Fourier { terms, .. } => terms
                .iter()
                .map(|(n, c)| c * (two_pi * dot(n, &lambda)).cos())
                .sum(),
        }
    }

    fn full(&self, lambda: &[f64]) -> f64 {
        match &self.form {
            Form::Direct { .. } => self.value(lambda),
            Form::Fourier { prefactor, .. } => prefactor * (1.0 + self.value(lambda)),
        }
    }

    /// value(b) − value(a) without cancellation, and the sum of the magnitudes
    /// of the per-term changes it was assembled from.
    fn delta(&self, a: &[f64], b: &[f64]) -> (f64, f64) {
        let d = self.dim;
        let pi = std::f64::consts::PI;
        // Nearest image, so a + δ stays within the precomputed offsets.
        let step: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y - (x - y).round()).collect();
        let a: Vec<f64> = a.iter().map(|v| v.rem_euclid(1.0)).collect();
        let (mut total, mut scale) = (0.0, 0.0);
        match &self.form {
            Form::Direct { offsets, gram, rate } => {
                for m in offsets {
                    let v: Vec<f64> = m.iter().zip(&a).map(|(x, y)| x + y).collect();
                    // q(v + δ) − q(v) = δᵀG(2v + δ)
                    let w: Vec<f64> = v.iter().zip(&step).map(|(x, y)| 2.0 * x + y).collect();
                    let dq: f64 = (0..d).map(|i| step[i] * dot(&gram[i * d..(i + 1) * d], &w)).sum();
                    let term = (-rate * self.quad(gram, m, &a)).exp() * (-rate * dq).exp_m1();
                    total += term;
                    scale += term.abs();
                }
            }
            Form::Fourier { terms, .. } => {
                for (n, c) in terms {
                    let mid: f64 = n.iter().zip(a.iter().zip(&step)).map(|(k, (x, y))| k * (2.0 * x + y)).sum();
                    let term = -2.0 * c * (pi * mid).sin() * (pi * dot(n, &step)).sin();
                    total += term;
                    scale += term.abs();
                }
            }
        }
        (total, scale)
    }

    /// Value, gradient and row-major Hessian of `value` in λ.
    fn derivatives(&self, lambda: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let lambda: Vec<f64> = lambda.iter().map(|v| v.rem_euclid(1.0)).collect();
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut value = 0.0;
        let mut grad = vec![0.0; d];
        let mut hess = vec![0.0; d * d];
        match &self.form {
            Form::Direct { offsets, gram, rate } => {
                for m in offsets {
                    let v: Vec<f64> = m.iter().zip(&lambda).map(|(a, b)| a + b).collect();
                    let gv: Vec<f64> = (0..d).map(|i| dot(&gram[i * d..(i + 1) * d], &v)).collect();
                    let e = (-rate * dot(&v, &gv)).exp();
                    value += e;
                    for i in 0..d {
                        grad[i] -= 2.0 * rate * e * gv[i];
                        for j in 0..d {
                            hess[i * d + j] +=
                                e * (4.0 * rate * rate * gv[i] * gv[j] - 2.0 * rate * gram[i * d + j]);
                        }
                    }
                }
            }
            Form::Fourier { terms, .. } => {
                for (n, c) in terms {
                    let phase = two_pi * dot(n, &lambda);
                    let (s, co) = phase.sin_cos();
                    value += c * co;
                    for i in 0..d {
                        grad[i] -= two_pi * c * s * n[i];
                        for j in 0..d {
                            hess[i * d + j] -= two_pi * two_pi * c * co * n[i] * n[j];
                        }
                    }
                }
            }
        }
        (value, grad, hess)
    }

    fn quad(&self, gram: &[f64], m: &[f64], lambda: &[f64]) -> f64 {
        let d = self.dim;
        let v: Vec<f64> = m.iter().zip(lambda).map(|(a, b)| a + b).collect();
        (0..d).map(|i| v[i] * dot(&gram[i * d..(i + 1) * d], &v)).sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
