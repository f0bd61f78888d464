mod common;

use approx::assert_abs_diff_eq;
use ionic_lattice::{Error, Lattice};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c_tri() -> f64 {
    (2.0 / 3f64.sqrt()).sqrt()
}

#[test]
fn orthorhombic_examples() {
    let cube = Lattice::cubic(3).unwrap();
    assert_eq!(cube.generator(), &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    assert_abs_diff_eq!(cube.covolume(), 1.0, epsilon = 1e-15);

    let rect = Lattice::orthorhombic(&[1.0, 2.0]).unwrap();
    assert_eq!(rect.dual_basis_vector(0), vec![1.0, 0.0]);
    assert_eq!(rect.dual_basis_vector(1), vec![0.0, 0.5]);

    let line = Lattice::orthorhombic(&[2.0]).unwrap();
    assert_eq!(line.dual().generator(), &[0.5]);

    assert!(matches!(Lattice::orthorhombic(&[1.0, 0.0]), Err(Error::InvalidLattice(_))));
    assert!(Lattice::orthorhombic(&[-1.0]).is_err());
    assert!(Lattice::orthorhombic(&[1.0; 5]).is_err());
}

#[test]
fn triangular_examples() {
    let t = Lattice::triangular();
    assert_abs_diff_eq!(t.covolume(), 1.0, epsilon = 1e-12);
    let c = c_tri();
    let u1 = t.basis_vector(0);
    assert_abs_diff_eq!(u1[0], c, epsilon = 1e-15);
    assert_abs_diff_eq!(u1[1], 0.0, epsilon = 1e-15);
    let norms: Vec<f64> = [t.basis_vector(0), t.basis_vector(1), t.dual_basis_vector(0), t.dual_basis_vector(1)]
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    for n in &norms {
        assert_abs_diff_eq!(*n, c, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(t.quadratic_form(&[1, 0]), 2.0 / 3f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn triangular_dual_is_the_displayed_dual_lattice() {
    // c(√3/2, −1/2) and c(0, 1) must be integer combinations of our dual
    // basis with a unimodular coefficient matrix.
    let t = Lattice::triangular();
    let dual = t.dual();
    let c = c_tri();
    let shown = [[c * 3f64.sqrt() / 2.0, -c / 2.0], [0.0, c]];
    let mut coefficients = Vec::new();
    for v in shown {
        let frac = dual.to_fractional(&v);
        for f in &frac {
            assert_abs_diff_eq!(*f, f.round(), epsilon = 1e-12);
        }
        coefficients.push(frac.iter().map(|f| f.round()).collect::<Vec<f64>>());
    }
    let det = coefficients[0][0] * coefficients[1][1] - coefficients[0][1] * coefficients[1][0];
    assert_abs_diff_eq!(det.abs(), 1.0, epsilon = 1e-12);
}

#[test]
fn triangular_dual_is_rotated_triangular() {
    let t = Lattice::triangular();
    let d = t.dual();
    let gram = |l: &Lattice| {
        let (a, b) = (l.basis_vector(0), l.basis_vector(1));
        let dot = |x: &[f64], y: &[f64]| x[0] * y[0] + x[1] * y[1];
        [dot(&a, &a), dot(&b, &b), dot(&a, &b).abs()]
    };
    let (g1, g2) = (gram(&t), gram(&d));
    for i in 0..3 {
        assert_abs_diff_eq!(g1[i], g2[i], epsilon = 1e-12);
    }
}

#[test]
fn dual_examples() {
    let z3 = Lattice::cubic(3).unwrap();
    assert_eq!(z3.dual().generator(), z3.generator());
    let l = Lattice::orthorhombic(&[2.0, 0.5]).unwrap();
    assert_eq!(l.dual().generator(), &[0.5, 0.0, 0.0, 2.0]);
}

#[test]
fn normalize_density_examples() {
    let l = Lattice::orthorhombic(&[2.0, 2.0]).unwrap().normalize_density();
    assert_abs_diff_eq!(l.covolume(), 1.0, epsilon = 1e-12);
    let t = Lattice::triangular();
    let tn = t.normalize_density();
    for (a, b) in t.generator().iter().zip(tn.generator()) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }
    let l = Lattice::orthorhombic(&[4.0]).unwrap().normalize_density();
    assert_abs_diff_eq!(l.generator()[0], 1.0, epsilon = 1e-15);
}

#[test]
fn ball_examples() {
    let z2 = Lattice::cubic(2).unwrap();
    let mut four: Vec<Vec<f64>> = z2.points_in_ball(1.0, false).unwrap();
    four.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(four, vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
    assert_eq!(z2.points_in_ball(1.5, false).unwrap().len(), common::brute_ball(&z2, 1.5, false).len());
    assert_eq!(z2.points_in_ball(1.5, false).unwrap().len(), 8);
    let t = Lattice::triangular();
    assert_eq!(t.points_in_ball(1.1 * c_tri(), false).unwrap().len(), 6);
    assert_eq!(t.points_in_ball(1.1 * c_tri(), true).unwrap().len(), 7);
}

#[test]
fn ball_cap_is_an_error() {
    let z3 = Lattice::cubic(3).unwrap();
    assert!(matches!(z3.points_in_ball_capped(50.0, false, 1000), Err(Error::TooManyPoints { .. })));
}

#[test]
fn sublattice_examples() {
    let z2 = Lattice::cubic(2).unwrap();
    assert_eq!(z2.sublattice_points(2).len(), 4);
    let z1 = Lattice::orthorhombic(&[1.5]).unwrap();
    let pts = z1.sublattice_points(3);
    assert_eq!(pts.iter().map(|p| p.1[0]).collect::<Vec<_>>(), vec![0.0, 1.5, 3.0]);
    let z3 = Lattice::cubic(3).unwrap();
    let pts = z3.sublattice_points(2);
    assert_eq!(pts.len(), 8);
    assert_eq!(pts[1].0, vec![0, 0, 1]);
}

#[test]
fn quadratic_form_examples() {
    let z3 = Lattice::cubic(3).unwrap();
    assert_eq!(z3.quadratic_form(&[1, 1, 1]), 3.0);
    assert_eq!(z3.quadratic_form(&[0, 0, 0]), 0.0);
}

#[test]
fn near_singular_generator_rejected() {
    assert!(Lattice::from_generator(2, vec![1.0, 1.0, 1.0, 1.0 + 1e-14]).is_err());
    assert!(Lattice::from_generator(2, vec![1.0, 0.0, 0.0]).is_err());
}

#[test]
fn enumeration_matches_brute_force_on_random_lattices() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..100 {
        let d = 1 + case % 3;
        let lattice = common::random_lattice(&mut rng, d, 50.0);
        let radius = rand::Rng::random_range(&mut rng, 0.3..5.0);
        let mut ours: Vec<Vec<i64>> = Vec::new();
        lattice
            .for_each_point(&vec![0.0; d], radius, |n, _| ours.push(n.to_vec()))
            .unwrap();
        ours.retain(|n| n.iter().any(|&c| c != 0));
        let expected = common::brute_ball(&lattice, radius, false);
        let mut sorted = ours.clone();
        sorted.sort();
        assert_eq!(sorted, expected, "case {case}");
        // Enumeration order is lexicographic.
        assert_eq!(ours, sorted);
    }
}

fn lattice_strategy() -> impl Strategy<Value = Lattice> {
    (1usize..=3, any::<u64>()).prop_map(|(d, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        common::random_lattice(&mut rng, d, 50.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_is_involutive(l in lattice_strategy()) {
        let back = l.dual().dual();
        for (a, b) in l.generator().iter().zip(back.generator()) {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
        prop_assert!((l.covolume() * l.dual().covolume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dual_pairing_is_identity(l in lattice_strategy()) {
        let d = l.dim();
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = l.basis_vector(i).iter().zip(l.dual_basis_vector(j)).map(|(a, b)| a * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalized_density_is_unit(l in lattice_strategy()) {
        prop_assert!((l.normalize_density().covolume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_matches_points(l in lattice_strategy(), n in 2usize..4) {
        for (m, x) in l.sublattice_points(n) {
            let coords: Vec<i64> = m.iter().map(|&c| c as i64).collect();
            let norm2: f64 = x.iter().map(|v| v * v).sum();
            prop_assert!((l.quadratic_form(&coords) - norm2).abs() < 1e-12 * (1.0 + norm2));
        }
    }

    #[test]
    fn covering_bound_covers(l in lattice_strategy(), seed in any::<u64>()) {
        // No random point is farther than the bound from its nearest lattice point.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = l.dim();
        let frac: Vec<f64> = (0..d).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        let y = l.to_cartesian(&frac);
        let bound = l.covering_radius_bound();
        let mut nearest = f64::INFINITY;
        l.for_each_point(&y, bound + 1e-9, |_, x| {
            let r: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            nearest = nearest.min(r);
        }).unwrap();
        prop_assert!(nearest <= bound + 1e-9);
    }
}
