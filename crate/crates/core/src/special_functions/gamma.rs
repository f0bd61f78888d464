//! Gamma and upper incomplete gamma functions, real and complex.
//!
//! Γ uses the Lanczos approximation (g = 7, nine terms) with reflection for
//! arguments below 1/2. The upper incomplete gamma Γ(a, x) switches between
//! the power series of the lower function (x < a + 1) and the Legendre
//! continued fraction (modified Lentz); nonpositive orders at small x are
//! reached by downward recurrence
//! Γ(a, x) = (Γ(a + 1, x) − x^a e^{−x}) / a.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_ITER: usize = 100_000;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Distance below which an order is treated as the nearest integer.
const INTEGER_SNAP: f64 = 1e-12;

/// Gamma function Γ(x) for real x (poles return ±∞).
pub fn gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        if x == x.floor() {
            return T::infinity();
        }
        // Γ(x) Γ(1 − x) = π / sin(πx)
        return T::PI() / ((T::PI() * x).sin() * gamma(T::one() - x));
    }
    let z = x - T::one();
    let (base, series) = lanczos_parts(z);
    T::lit(2.0 * std::f64::consts::PI).sqrt() * base.powf(z + half) * (-base).exp() * series
}

/// Natural logarithm of |Γ(x)|.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        if x == x.floor() {
            return T::infinity();
        }
        let s = (T::PI() * x).sin().abs();
        return T::PI().ln() - s.ln() - ln_gamma(T::one() - x);
    }
    let z = x - T::one();
    let (base, series) = lanczos_parts(z);
    T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (z + half) * base.ln() - base + series.ln()
}

fn lanczos_parts<T: Real>(z: T) -> (T, T) {
    let mut series = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series = series + T::lit(c) / (z + T::of(i));
    }
    (z + T::lit(LANCZOS_G + 0.5), series)
}

/// Upper incomplete gamma Γ(a, x) = ∫ₓ^∞ t^{a−1} e^{−t} dt.
///
/// Any real order is accepted; `x = 0` requires `a > 0`.
pub fn upper_incomplete_gamma<T: Real>(a: T, x: T) -> Result<T> {
    if x.is_nan() || a.is_nan() {
        return Err(Error::InvalidArgument("NaN passed to incomplete gamma".into()));
    }
    if x < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "incomplete gamma needs x >= 0, got {x}"
        )));
    }
    if x == T::zero() {
        if a > T::zero() {
            return Ok(gamma(a));
        }
        return Err(Error::InvalidArgument(format!(
            "Γ(a, 0) diverges for a = {a} <= 0"
        )));
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    let rounded = a.round();
    let a = if (a - rounded).abs() < T::lit(INTEGER_SNAP) {
        rounded
    } else {
        a
    };
    if a > T::zero() {
        if x < a + T::one() {
            Ok(gamma(a) - lower_series(a, x)?)
        } else {
            continued_fraction(a, x)
        }
    } else if x >= T::one() {
        continued_fraction(a, x)
    } else if a == rounded {
        // Γ(0, x) = E₁(x), then recur down to −n.
        let mut value = exponential_integral_small(x)?;
        let mut order = T::zero();
        while order > a {
            order = order - T::one();
            value = (value - x.powf(order) * (-x).exp()) / order;
        }
        Ok(value)
    } else {
        let steps = (-a).ceil().to_usize().unwrap_or(0);
        let mut order = a + T::of(steps);
        let mut value = gamma(order) - lower_series(order, x)?;
        for _ in 0..steps {
            order = order - T::one();
            value = (value - x.powf(order) * (-x).exp()) / order;
        }
        Ok(value)
    }
}

/// Lower incomplete gamma γ(a, x) by its power series (a > 0).
fn lower_series<T: Real>(a: T, x: T) -> Result<T> {
    let mut term = T::one() / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap = ap + T::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() < sum.abs() * T::epsilon() {
            return Ok(sum * (-x + a * x.ln()).exp());
        }
    }
    Err(Error::Numerical(format!("γ({a}, {x}) series did not converge")))
}

/// Legendre continued fraction for Γ(a, x), modified Lentz.
fn continued_fraction<T: Real>(a: T, x: T) -> Result<T> {
    continued_fraction_core(a, x).map(|h| (-x + a * x.ln()).exp() * h)
}

/// e^x Γ(a, x) for a > 0, free of overflow at large x.
pub(crate) fn scaled_upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if x < a + 1.0 {
        Ok(x.exp() * upper_incomplete_gamma(a, x)?)
    } else {
        continued_fraction_core(a, x).map(|h| (a * x.ln()).exp() * h)
    }
}

/// Continued fraction part h with Γ(a, x) = x^a e^{−x} h.
fn continued_fraction_core<T: Real>(a: T, x: T) -> Result<T> {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = x + T::one() - a;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = T::of(i);
        let an = -fi * (fi - a);
        b = b + T::lit(2.0);
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() < T::epsilon() {
            return Ok(h);
        }
    }
    Err(Error::Numerical(format!(
        "Γ({a}, {x}) continued fraction did not converge"
    )))
}

/// E₁(x) for 0 < x < 1 by its convergent series.
fn exponential_integral_small<T: Real>(x: T) -> Result<T> {
    let mut sum = T::zero();
    let mut term = T::one();
    for n in 1..MAX_ITER {
        let fnn = T::of(n);
        term = -term * x / fnn;
        let contribution = -term / fnn;
        sum = sum + contribution;
        if contribution.abs() < sum.abs() * T::epsilon() {
            return Ok(-T::lit(EULER_GAMMA) - x.ln() + sum);
        }
    }
    Err(Error::Numerical(format!("E1({x}) series did not converge")))
}

/// Γ(z) for complex z.
pub fn complex_gamma<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    if z.re < half {
        let pi = Complex::new(T::PI(), T::zero());
        return pi / ((pi * z).sin() * complex_gamma(Complex::new(T::one(), T::zero()) - z));
    }
    let zm = z - T::one();
    let mut series = Complex::new(T::lit(LANCZOS[0]), T::zero());
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series = series + Complex::new(T::lit(c), T::zero()) / (zm + T::of(i));
    }
    let base = zm + T::lit(LANCZOS_G + 0.5);
    let prefactor = T::lit(2.0 * std::f64::consts::PI).sqrt();
    (base.ln() * (zm + half) - base).exp() * series * prefactor
}

/// Γ(a, x) for complex order and real x > 0.
pub fn complex_upper_incomplete_gamma<T: Real>(a: Complex<T>, x: T) -> Result<Complex<T>> {
    if a.im == T::zero() {
        return upper_incomplete_gamma(a.re, x).map(|v| Complex::new(v, T::zero()));
    }
    if !(x > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "complex incomplete gamma needs x > 0, got {x}"
        )));
    }
    let one = Complex::new(T::one(), T::zero());
    if x >= T::one() && x >= a.re + T::one() {
        return complex_continued_fraction(a, x);
    }
    if a.re > T::zero() {
        return Ok(complex_gamma(a) - complex_lower_series(a, x)?);
    }
    if x >= T::one() {
        return complex_continued_fraction(a, x);
    }
    let steps = (-a.re).floor().to_usize().unwrap_or(0) + 1;
    let mut order = a + T::of(steps);
    let mut value = complex_gamma(order) - complex_lower_series(order, x)?;
    let lnx = x.ln();
    for _ in 0..steps {
        order = order - one;
        value = (value - (order * lnx - x).exp()) / order;
    }
    Ok(value)
}

fn complex_lower_series<T: Real>(a: Complex<T>, x: T) -> Result<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    let mut term = one / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap = ap + one;
        term = term * x / ap;
        sum = sum + term;
        if term.norm() < sum.norm() * T::epsilon() {
            return Ok(sum * (a * x.ln() - x).exp());
        }
    }
    Err(Error::Numerical("complex γ(a, x) series did not converge".into()))
}

fn complex_continued_fraction<T: Real>(a: Complex<T>, x: T) -> Result<Complex<T>> {
    let tiny = T::min_positive_value() / T::epsilon();
    let one = Complex::new(T::one(), T::zero());
    let guard = |v: Complex<T>| {
        if v.norm() < tiny {
            Complex::new(tiny, T::zero())
        } else {
            v
        }
    };
    let mut b = one * (x + T::one()) - a;
    let mut c = Complex::new(T::one() / tiny, T::zero());
    let mut d = one / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = T::of(i);
        let an = (a - fi) * fi;
        b = b + T::lit(2.0);
        d = guard(an * d + b);
        c = guard(b + an / c);
        d = one / d;
        let delta = d * c;
        h = h * delta;
        if (delta - one).norm() < T::epsilon() {
            return Ok((a * x.ln() - x).exp() * h);
        }
    }
    Err(Error::Numerical(
        "complex Γ(a, x) continued fraction did not converge".into(),
    ))
}
