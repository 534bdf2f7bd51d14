mod common;

use common::*;
use lowmach::operators::*;
use lowmach::torus::{spectral_derivative, DerivativeKind};

#[test]
fn q1_routes_agree() {
    let mut r = rng(1);
    for n in [8, 16] {
        let lat = lattice(2, n);
        let u = random_solenoidal(&lat, 1.0, &mut r);
        let b = random_acoustic(&lat, 100.0, &mut r);
        for (t, eps) in [(0.0, 1.0), (0.37, 0.1)] {
            let phys = q1_eps(&u, &b, t, eps).unwrap();
            let modes = q1_eps_modes(&u, &b, t, eps, ModeWindow::All).unwrap().total().unwrap();
            let err = phys.sub(&modes).unwrap().max_abs() / modes.max_abs();
            assert!(err < 1e-10, "n {n} err {err}");
            assert!(phys.reality_defect() < 1e-12 * phys.max_abs());
        }
    }
}

#[test]
fn q2_and_a2_routes_agree() {
    let mut r = rng(2);
    for n in [8, 16] {
        let lat = lattice(2, n);
        let a = random_acoustic(&lat, 100.0, &mut r);
        let b = random_acoustic(&lat, 100.0, &mut r);
        for (t, eps, kappa) in [(0.0, 1.0, -0.6), (0.37, 0.1, 1.0)] {
            let phys = q2_eps(&a, &b, t, eps, kappa).unwrap();
            let modes = q2_eps_modes(&a, &b, t, eps, kappa, ModeWindow::All).unwrap().total().unwrap();
            let err = phys.sub(&modes).unwrap().max_abs() / modes.max_abs();
            assert!(err < 1e-10, "n {n} err {err}");
            let pa = a2_eps(&b, t, eps).unwrap();
            let ma = a2_eps_modes(&b, t, eps).unwrap();
            assert!(pa.sub(&ma).unwrap().max_abs() < 1e-10 * ma.max_abs());
        }
    }
}

#[test]
fn basis_vectors_are_wave_eigenvectors() {
    let lat = lattice(2, 16);
    for &f in lat.modes().iter().skip(1) {
        for alpha in BRANCHES {
            let mut v = AcousticCoeffs::zeros(&lat);
            v.set(f, alpha, lowmach::Complex64::new(1.0, 0.0));
            let (b, w) = acoustic_inverse(&v);
            let div = spectral_derivative(&w, DerivativeKind::Divergence).unwrap();
            let grad = spectral_derivative(&b, DerivativeKind::Gradient).unwrap();
            let lam = wave_eigenvalue(&lat, f, alpha);
            assert!((div.comp(0)[f] - lam * b.comp(0)[f]).norm() < 1e-12);
            for h in 0..2 {
                assert!((grad.comp(h)[f] - lam * w.comp(h)[f]).norm() < 1e-12);
            }
        }
    }
}
