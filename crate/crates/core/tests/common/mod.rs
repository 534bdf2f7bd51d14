#![allow(dead_code)]

use std::sync::Arc;

use lowmach::operators::{helmholtz_project, slot_sign, AcousticCoeffs, Projection};
use lowmach::torus::{Lattice, LatticeSpec, SpectralField};
use lowmach::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn lattice(d: usize, n: usize) -> Arc<Lattice> {
    LatticeSpec::unit(d, n).build().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real random field with coefficients decaying like `(1+|k|)^-decay`.
pub fn random_field(lat: &Arc<Lattice>, ncomp: usize, decay: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut g = SpectralField::zeros(lat, ncomp);
    for c in 0..ncomp {
        for &f in lat.modes() {
            let s = slot_sign(lat, f);
            if s < 0 {
                continue;
            }
            let amp = (1.0 + lat.kabs(f)).powf(-decay);
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
            if s == 0 {
                g.comp_mut(c)[f] = Complex64::new(z.re, 0.0);
            } else {
                g.comp_mut(c)[f] = z;
                g.comp_mut(c)[lat.neg(f)] = z.conj();
            }
        }
    }
    g
}

pub fn random_zero_mean(lat: &Arc<Lattice>, ncomp: usize, decay: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    random_field(lat, ncomp, decay, rng).zero_mean_split().1
}

pub fn random_solenoidal(lat: &Arc<Lattice>, decay: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let u = random_field(lat, lat.dim(), decay, rng);
    helmholtz_project(&u, Projection::P).unwrap()
}

/// Reality-symmetric acoustic coefficients restricted to `|k| <= radius`.
pub fn random_acoustic(lat: &Arc<Lattice>, radius: f64, rng: &mut ChaCha8Rng) -> AcousticCoeffs {
    let mut v = AcousticCoeffs::zeros(lat);
    for &f in lat.modes().iter().skip(1) {
        if slot_sign(lat, f) < 0 || lat.kabs(f) > radius {
            continue;
        }
        for alpha in [-1i8, 1] {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            v.set(f, alpha, z);
            v.set(lat.neg(f), alpha, z.conj());
        }
    }
    v
}

/// Direct convolution of coefficients, `(fg)_m = |T|^{-1/2} sum f_k g_{m-k}`,
/// restricted to retained `m`. A scalar factor multiplies every component.
pub fn brute_product(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let lat = f.lattice().clone();
    let ncomp = f.ncomp().max(g.ncomp());
    let mut out = SpectralField::zeros(&lat, ncomp);
    let pick = |n: usize, c: usize| if n == 1 { 0 } else { c };
    let inv = 1.0 / lat.sqrt_volume();
    for c in 0..ncomp {
        for &m in lat.modes() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &k in lat.modes() {
                if let Some(l) = lat.diff_slot(m, k) {
                    acc += f.comp(pick(f.ncomp(), c))[k] * g.comp(pick(g.ncomp(), c))[l];
                }
            }
            out.comp_mut(c)[m] = acc * inv;
        }
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
