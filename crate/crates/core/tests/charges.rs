mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use ionic_lattice::charges::{
    autocorrelation, dft, dft_real, idft, idft_real, reconstruct_from_spectrum, spectral_density,
    SpectralDensity,
};
use ionic_lattice::{Charges, Lattice, SublatticeIndex};
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shapes() -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for d in 1..=3 {
        for n in 2..=4 {
            v.push((d, n));
        }
    }
    v
}

#[test]
fn transform_examples() {
    let index = SublatticeIndex::new(2, 3);
    let ones = vec![1.0; 9];
    let hat = dft_real(index, &ones);
    assert_abs_diff_eq!(hat[0].re, 3.0, epsilon = 1e-14);
    assert!(hat[1..].iter().all(|c| c.norm() < 1e-14));
    let mut delta = vec![0.0; 9];
    delta[0] = 1.0;
    for c in idft_real(index, &delta) {
        assert_abs_diff_eq!(c.norm(), 1.0 / 3.0, epsilon = 1e-15);
    }
}

#[test]
fn transforms_are_unitary_inverses() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (d, n) in shapes() {
        let index = SublatticeIndex::new(d, n);
        let v: Vec<Complex<f64>> =
            (0..index.len()).map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let hat = dft(index, &v);
        let hat_norm: f64 = hat.iter().map(|c| c.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, hat_norm, epsilon = 1e-10);
        let back = idft(index, &hat);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-10);
        }
        // Against the definition with a e^{−2πi x·k/N} kernel.
        for (k, h) in hat.iter().enumerate() {
            let kc = common::coords(k, d, n);
            let mut sum = Complex::new(0.0, 0.0);
            for (x, val) in v.iter().enumerate() {
                let xc = common::coords(x, d, n);
                let dot: usize = xc.iter().zip(&kc).map(|(a, b)| a * b).sum();
                sum += val * Complex::from_polar(1.0, -2.0 * PI * dot as f64 / n as f64);
            }
            sum /= (index.len() as f64).sqrt();
            assert!((sum - h).norm() < 1e-12);
        }
    }
}

#[test]
fn autocorrelation_examples() {
    let alt = Charges::alternating(1).unwrap();
    assert_eq!(autocorrelation(&alt).values(), &[2.0, -2.0]);
    let ones = Charges::new(1, 2, vec![1.0, 1.0]).unwrap();
    assert_eq!(autocorrelation(&ones).values(), &[2.0, 2.0]);
}

#[test]
fn spectral_density_examples() {
    let alt = Charges::alternating(3).unwrap();
    let xi = spectral_density(&alt).unwrap();
    for (k, v) in xi.values().iter().enumerate() {
        let expected = if k == 7 { 8.0 } else { 0.0 };
        assert_abs_diff_eq!(*v, expected, epsilon = 1e-12);
    }
    let honey = Charges::honeycomb_triangular();
    let xi = spectral_density(&honey).unwrap();
    let index = xi.index();
    for (k, v) in xi.values().iter().enumerate() {
        let expected = match index.coords(k).as_slice() {
            [1, 1] | [2, 2] => 4.5,
            _ => 0.0,
        };
        assert_abs_diff_eq!(*v, expected, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(xi.mean(), 1.0, epsilon = 1e-14);
}

#[test]
fn reconstruction_examples() {
    let mut values = vec![0.0; 8];
    values[7] = 8.0;
    let xi = SpectralDensity::new(SublatticeIndex::new(3, 2), values).unwrap();
    let phi = reconstruct_from_spectrum(&xi).unwrap();
    let alt = Charges::alternating(3).unwrap();
    assert!(phi.max_difference(&alt) < 1e-12);

    let xi = SpectralDensity::new(SublatticeIndex::new(2, 3), vec![1.0; 9]).unwrap();
    let phi = reconstruct_from_spectrum(&xi).unwrap();
    assert_abs_diff_eq!(phi.values()[0], 3.0, epsilon = 1e-12);
    assert!(phi.values()[1..].iter().all(|v: &f64| v.abs() < 1e-12));

    assert!(SpectralDensity::new(SublatticeIndex::new(1, 3), vec![1.0, 2.0, 0.0]).is_err());
    assert!(SpectralDensity::new(SublatticeIndex::new(1, 2), vec![2.5, -0.5]).is_err());
}

#[test]
fn named_configurations() {
    let alt = Charges::alternating(1).unwrap();
    assert_eq!(alt.values(), &[1.0, -1.0]);
    let alt3 = Charges::alternating(3).unwrap();
    assert_eq!(alt3.value(&[1, 1, 0]), 1.0);
    assert_eq!(alt3.net_charge(), 0.0);
    assert!(alt3.is_normalized(1e-14));

    let h = Charges::honeycomb_triangular();
    assert_abs_diff_eq!(h.value(&[0, 0]), 2f64.sqrt(), epsilon = 1e-15);
    assert_abs_diff_eq!(h.value(&[1, 0]), -2f64.sqrt() / 2.0, epsilon = 1e-15);
    assert!(h.is_neutral(1e-14));
    assert!(h.is_normalized(1e-14));
}

#[test]
fn cosine_configurations() {
    for d in 1..=3 {
        let sides: Vec<f64> = (0..d).map(|i| 0.7 + 0.3 * i as f64).collect();
        let l = Lattice::orthorhombic(&sides).unwrap();
        let center = l.dual().to_cartesian(&vec![0.5; d]);
        let phi = Charges::cosine(&l, 2, &center, true).unwrap();
        assert!(phi.max_difference(&Charges::alternating(d).unwrap()) < 1e-12);
    }
    let tri = Lattice::triangular();
    let z0 = tri.dual().to_cartesian(&[1.0 / 3.0, 1.0 / 3.0]);
    let phi = Charges::cosine(&tri, 3, &z0, true).unwrap();
    assert!(phi.max_difference(&Charges::honeycomb_triangular()) < 1e-12);
    // Barycenter of the dual triangle spanned by 0, u1*, u2*.
    let (a, b) = (tri.dual_basis_vector(0), tri.dual_basis_vector(1));
    let bary = [(a[0] + b[0]) / 3.0, (a[1] + b[1]) / 3.0];
    assert_abs_diff_eq!(bary[0], z0[0], epsilon = 1e-15);
    assert_abs_diff_eq!(bary[1], z0[1], epsilon = 1e-15);

    let z2 = Lattice::cubic(2).unwrap();
    assert!(Charges::cosine(&z2, 2, &[0.0, 0.0], true).is_err());
    assert!(Charges::cosine(&z2, 2, &[0.0, 0.0], false).is_ok());
    assert!(Charges::cosine(&z2, 3, &[0.5, 0.5], true).is_err());
}

#[test]
fn json_round_trip() {
    let h = Charges::honeycomb_triangular();
    let text = h.to_json();
    let back = Charges::from_json(&text).unwrap();
    assert_eq!(back, h);
    let parsed = Charges::from_json(r#"{"N": 2, "values": [1, -1, -1, 1]}"#).unwrap();
    assert_eq!(parsed.dim(), 2);
    assert!(Charges::from_json(r#"{"N": 2, "values": [1, -1, 1]}"#).is_err());
    let mut csv = Vec::new();
    h.write_csv(&Lattice::triangular(), &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn canonical_form_prefers_large_origin_charge() {
    let h = Charges::honeycomb_triangular();
    let moved = h.translated(&[1, 0]);
    assert!(moved.value(&[0, 0]) < 0.0);
    let c = moved.canonical();
    assert!(c.max_difference(&h) < 1e-15);
    assert!(moved.equivalent(&h, 1e-12));
    assert!(h.negated().equivalent(&h, 1e-12));
}

fn random_symmetric_spectrum(rng: &mut ChaCha8Rng, d: usize, n: usize) -> SpectralDensity<f64> {
    let index = SublatticeIndex::new(d, n);
    let raw: Vec<f64> = (0..index.len()).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut sym: Vec<f64> = (0..index.len()).map(|k| 0.5 * (raw[k] + raw[index.neg(k)])).collect();
    let total: f64 = sym.iter().sum();
    sym.iter_mut().for_each(|v| *v *= index.len() as f64 / total);
    SpectralDensity::new(index, sym).unwrap()
}

#[test]
fn spectrum_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let d = 1 + case % 3;
        let n = 2 + (case / 3) % 3;
        let xi = random_symmetric_spectrum(&mut rng, d, n);
        let phi = reconstruct_from_spectrum(&xi).unwrap();
        assert!(phi.is_normalized(1e-10));
        let back = spectral_density(&phi).unwrap();
        for (a, b) in xi.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-9, "case {case}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_matches_definition(seed in any::<u64>(), shape in 0usize..9, neutral in any::<bool>()) {
        let (d, n) = shapes()[shape];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = Charges::random(d, n, neutral, &mut rng).unwrap();
        let xi = spectral_density(&phi).unwrap();
        let naive = common::naive_spectral_density(phi.values(), d, n);
        // Transform route: ξ = |idft φ|².
        let via_transform: Vec<f64> = idft_real(phi.index(), phi.values()).iter().map(|c| c.norm_sqr()).collect();
        for k in 0..naive.len() {
            prop_assert!((xi.values()[k] - naive[k]).abs() < 1e-10);
            prop_assert!((via_transform[k] - naive[k]).abs() < 1e-10);
            prop_assert!(xi.values()[k] >= 0.0);
            prop_assert!((xi.values()[k] - xi.values()[xi.index().neg(k)]).abs() < 1e-10);
        }
        prop_assert!((xi.mean() - 1.0).abs() < 1e-10);
        let net: f64 = phi.values().iter().sum();
        prop_assert!((xi.values()[0] - net * net / naive.len() as f64).abs() < 1e-10);
    }

    #[test]
    fn autocorrelation_properties(seed in any::<u64>(), shape in 0usize..9) {
        let (d, n) = shapes()[shape];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = Charges::random(d, n, false, &mut rng).unwrap();
        let s = autocorrelation(&phi);
        let index = s.index();
        prop_assert!((s.values()[0] - index.len() as f64).abs() < 1e-10);
        for m in 0..index.len() {
            prop_assert!((s.values()[m] - s.values()[index.neg(m)]).abs() < 1e-10);
        }
        let net: f64 = phi.values().iter().sum();
        let total: f64 = s.values().iter().sum();
        prop_assert!((total - net * net).abs() < 1e-9);
        // s = N^{d/2}·idft(|φ̌|²) with φ̌ = idft(φ).
        let check: Vec<f64> = idft_real(index, phi.values()).iter().map(|c| c.norm_sqr()).collect();
        let back = idft_real(index, &check);
        let scale = (index.len() as f64).sqrt();
        for m in 0..index.len() {
            prop_assert!((back[m].re * scale - s.values()[m]).abs() < 1e-10);
        }
    }

    #[test]
    fn translation_leaves_density_unchanged(seed in any::<u64>(), shape in 0usize..9, shift in proptest::collection::vec(-5i64..5, 3)) {
        let (d, n) = shapes()[shape];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = Charges::random(d, n, true, &mut rng).unwrap();
        let moved = phi.translated(&shift[..d]);
        let a = spectral_density(&phi).unwrap();
        let b = spectral_density(&moved).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!(moved.equivalent(&phi, 1e-12));
    }
}
