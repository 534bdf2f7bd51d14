mod common;

use std::f64::consts::PI;

use common::{brute_product, lattice, random_field, rng};
use lowmach::torus::{
    dealiased_product, forward_transform, inverse_transform, spectral_derivative, DerivativeKind, GridField,
    LatticeSpec, Period, SpectralField,
};
use lowmach::Complex64;
use proptest::prelude::*;

fn grid_l2(g: &GridField) -> f64 {
    let lat = g.lattice();
    let sum: f64 = (0..g.ncomp()).flat_map(|c| g.comp(c).iter().map(|z| z.norm_sqr())).sum();
    (sum * lat.volume() / lat.len() as f64).sqrt()
}

#[test]
fn hundred_random_fields_on_16() {
    let lat = lattice(2, 16);
    let mut r = rng(11);
    let (mut trip, mut pars, mut prod) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let f = random_field(&lat, 1, 1.0, &mut r);
        let g = random_field(&lat, 1, 0.5, &mut r);
        let grid = inverse_transform(&f);
        trip = trip.max(forward_transform(&grid).unwrap().sub(&f).unwrap().max_abs() / f.max_abs());
        pars = pars.max((grid_l2(&grid) - f.l2_norm()).abs() / f.l2_norm());
        let fast = dealiased_product(&f, &g).unwrap();
        let slow = brute_product(&f, &g);
        prod = prod.max(fast.sub(&slow).unwrap().max_abs() / slow.max_abs());
    }
    assert!(trip <= 1e-12, "round trip {trip:e}");
    assert!(pars <= 1e-12, "Parseval {pars:e}");
    assert!(prod <= 1e-12, "product {prod:e}");
}

#[test]
fn cosine_coefficients_follow_the_normalisation() {
    // cos(x1) on a 2pi box: coefficients sqrt(|T|)/2 at n = +-(1, 0)
    let lat = lattice(2, 8);
    let grid = GridField::sample(&lat, 1, |x, _| x[0].cos());
    let g = forward_transform(&grid).unwrap();
    let expect = lat.sqrt_volume() / 2.0;
    for n in [[1i64, 0], [-1, 0]] {
        let z = g.comp(0)[lat.slot(&n).unwrap()];
        assert!((z - Complex64::new(expect, 0.0)).norm() < 1e-13);
    }
    assert!((lat.volume() - 4.0 * PI * PI).abs() < 1e-12);
}

#[test]
fn derivative_of_a_sampled_function() {
    let lat = lattice(2, 16);
    let grid = GridField::sample(&lat, 1, |x, _| (2.0 * x[0]).sin() * x[1].cos());
    let g = forward_transform(&grid).unwrap();
    let grad = inverse_transform(&spectral_derivative(&g, DerivativeKind::Gradient).unwrap());
    for p in 0..lat.len() {
        let x = lat.point(p);
        let dx = 2.0 * (2.0 * x[0]).cos() * x[1].cos();
        let dy = -(2.0 * x[0]).sin() * x[1].sin();
        assert!((grad.comp(0)[p].re - dx).abs() < 1e-12);
        assert!((grad.comp(1)[p].re - dy).abs() < 1e-12);
    }
}

#[test]
fn anisotropic_box_wavevectors() {
    let spec = LatticeSpec {
        periods: vec![Period::new(2, 1).unwrap(), Period::integer(1).unwrap()],
        resolution: vec![16, 8],
        ..LatticeSpec::unit(2, 8)
    };
    let lat = spec.build().unwrap();
    let f = lat.slot(&[1, 0]).unwrap();
    assert!((lat.kabs(f) - 0.5).abs() < 1e-15);
    assert!((lat.volume() - 8.0 * PI * PI).abs() < 1e-12);
}

#[test]
fn single_mode_real_field() {
    let lat = lattice(2, 8);
    let g = SpectralField::single_mode(&lat, 1, 0, &[1, 2], Complex64::new(0.3, -0.4), true).unwrap();
    assert_eq!(g.reality_defect(), 0.0);
    assert!(inverse_transform(&g).comp(0).iter().all(|z| z.im.abs() < 1e-15));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transforms_are_linear_and_invertible(seed in any::<u64>(), d in 2usize..=3, a in -3.0f64..3.0) {
        let lat = lattice(d, 8);
        let mut r = rng(seed);
        let f = random_field(&lat, 2, 1.0, &mut r);
        let g = random_field(&lat, 2, 1.0, &mut r);
        let combo = f.add(&g.scale(a)).unwrap();
        let back = forward_transform(&inverse_transform(&combo)).unwrap();
        prop_assert!(back.sub(&combo).unwrap().max_abs() <= 1e-12 * combo.max_abs().max(1.0));
        prop_assert!((grid_l2(&inverse_transform(&combo)) - combo.l2_norm()).abs() <= 1e-12 * combo.l2_norm());
    }

    #[test]
    fn product_commutes_and_keeps_reality(seed in any::<u64>()) {
        let lat = lattice(2, 16);
        let mut r = rng(seed);
        let f = random_field(&lat, 1, 1.0, &mut r);
        let g = random_field(&lat, 1, 1.0, &mut r);
        let fg = dealiased_product(&f, &g).unwrap();
        let gf = dealiased_product(&g, &f).unwrap();
        prop_assert!(fg.sub(&gf).unwrap().max_abs() <= 1e-14 * fg.max_abs());
        prop_assert!(fg.reality_defect() <= 1e-14 * fg.max_abs());
    }
}
