//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

/// Accuracy request for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Tolerance {
    pub fn relative(relative: f64) -> Self {
        Self {
            relative,
            absolute: 0.0,
        }
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: f64,
    /// Kronrod estimate of ∫|f| over the segment.
    magnitude: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, f64, f64) {
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let radius = (b - a) * half;
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    let mut magnitude = fc.abs() * T::lit(WGK[7]);
    for i in 0..7 {
        let dx = radius * T::lit(XGK[i]);
        let (lo, hi) = (f(center - dx), f(center + dx));
        let pair = lo + hi;
        kronrod = kronrod + pair * T::lit(WGK[i]);
        magnitude = magnitude + (lo.abs() + hi.abs()) * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[i / 2]);
        }
    }
    let value = kronrod * radius;
    let error = ((kronrod - gauss) * radius).abs().as_f64();
    (value, error, (magnitude * radius).abs().as_f64())
}

/// ∫_a^b f(t) dt on a finite interval.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: Tolerance) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let (value, error, magnitude) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error, magnitude });
    // Error floor: roundoff makes tighter requests meaningless.
    let floor = 50.0 * T::epsilon().as_f64();
    for _ in 0..MAX_INTERVALS {
        let mut total = CompensatedSum::new();
        let mut err = 0.0;
        let mut magnitude = 0.0;
        for s in heap.iter() {
            total.add(s.value);
            err += s.error;
            magnitude += s.magnitude;
        }
        let total = total.value();
        let target = tol
            .absolute
            .max(tol.relative * total.abs().as_f64())
            .max(floor * magnitude);
        if err <= target {
            return Ok(total);
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            // Interval exhausted at working precision; keep it and accept.
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1, m1) = kronrod(&f, worst.a, mid);
        let (v2, e2, m2) = kronrod(&f, mid, worst.b);
        if !(v1 + v2).is_finite() {
            return Err(Error::Numerical("integrand is not finite".into()));
        }
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, magnitude: m1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, magnitude: m2 });
    }
    Err(Error::Numerical("adaptive quadrature exceeded its interval budget".into()))
}

/// ∫_a^∞ f(t) dt through t = a + u/(1 − u).
pub fn integrate_to_infinity<T: Real, F: Fn(T) -> T>(f: F, a: T, tol: Tolerance) -> Result<T> {
    let g = |u: T| {
        let one_minus = T::one() - u;
        if one_minus <= T::zero() {
            return T::zero();
        }
        let t = a + u / one_minus;
        let v = f(t) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    integrate(g, T::zero(), T::one(), tol)
}

/// ∫_0^b f(t) dt through t = u², which removes t^{−1/2}-type endpoint singularities.
pub fn integrate_from_zero<T: Real, F: Fn(T) -> T>(f: F, b: T, tol: Tolerance) -> Result<T> {
    let two = T::lit(2.0);
    let g = |u: T| {
        if u <= T::zero() {
            return T::zero();
        }
        two * u * f(u * u)
    };
    integrate(g, T::zero(), b.sqrt(), tol)
}
