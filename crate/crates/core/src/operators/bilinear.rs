//! The oscillating couplings of the filtered system.
//!
//! Each operator has two evaluation routes: a physical-space route built
//! from pseudospectral products (used by solvers) and a mode-sum route over
//! explicit triples `k + l = m` (used for low/high frequency splits and as a
//! cross-check).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::acoustic::{
    acoustic_inverse, acoustic_transform, slot_sign, wave_group, AcousticCoeffs, BRANCHES,
};
use super::helmholtz::{helmholtz_project, Projection};
use crate::torus::{
    grid_product, inverse_transform, partial, spectral_derivative, DerivativeKind, GridField,
    SpectralField,
};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("eps = {eps} must be positive")))
    }
}

/// `sum_j a_j d_j b` on the grid for vector fields `a`, `b`.
fn advect(a: &GridField, b: &SpectralField) -> Result<GridField> {
    let d = b.ncomp();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); a.lattice().len()]; d];
    for j in 0..d {
        let db = inverse_transform(&partial(b, j));
        for (i, o) in out.iter_mut().enumerate() {
            for ((x, aj), dbi) in o.iter_mut().zip(a.comp(j)).zip(db.comp(i)) {
                *x += aj * dbi;
            }
        }
    }
    let mut g = GridField::from_complex(a.lattice(), out)?;
    if a.is_real() && b.reality() {
        g = GridField::from_real(a.lattice(), (0..d).map(|c| g.real_part(c)).collect())?;
    }
    Ok(g)
}

/// `(a . grad) b` for vector fields, evaluated pseudospectrally.
pub fn convective_term(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    if a.ncomp() != b.ncomp() || a.ncomp() != a.lattice().dim() {
        return Err(Error::Shape("convective term needs two d-vector fields".into()));
    }
    crate::torus::forward_transform(&advect(&inverse_transform(a), b)?)
}

fn sum_grids(a: &GridField, b: &GridField) -> Result<GridField> {
    let comps = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect();
    let real = a.is_real() && b.is_real();
    let g = GridField::from_complex(a.lattice(), comps)?;
    if real {
        GridField::from_real(a.lattice(), (0..g.ncomp()).map(|c| g.real_part(c)).collect())
    } else {
        Ok(g)
    }
}

/// Velocity-acoustic coupling:
/// `L(-t/eps) (div(u w1), Q(u.grad w2 + w2.grad u))` with `w = L(t/eps) B`.
pub fn q1_eps(u: &SpectralField, b: &AcousticCoeffs, t: f64, eps: f64) -> Result<AcousticCoeffs> {
    check_eps(eps)?;
    let d = u.lattice().dim();
    if u.ncomp() != d {
        return Err(Error::Shape("velocity needs d components".into()));
    }
    let (w1, w2) = acoustic_inverse(&wave_group(b, t / eps));
    let ug = inverse_transform(u);
    let flux = grid_product(&inverse_transform(&w1), &ug)?;
    let x1 = spectral_derivative(&flux, DerivativeKind::Divergence)?;
    let w2g = inverse_transform(&w2);
    let conv = sum_grids(&advect(&ug, &w2)?, &advect(&w2g, u)?)?;
    let x2 = helmholtz_project(&crate::torus::forward_transform(&conv)?, Projection::Q)?;
    Ok(wave_group(&acoustic_transform(&x1, &x2)?, -t / eps))
}

/// Acoustic self-interaction:
/// `L(-t/eps) (div(w1 z2 + z1 w2)/2, grad(w2.z2 + kappa w1 z1)/2)` with
/// `w = L(t/eps) A`, `z = L(t/eps) B`.
pub fn q2_eps(
    a: &AcousticCoeffs,
    b: &AcousticCoeffs,
    t: f64,
    eps: f64,
    kappa: f64,
) -> Result<AcousticCoeffs> {
    check_eps(eps)?;
    let (w1, w2) = acoustic_inverse(&wave_group(a, t / eps));
    let (z1, z2) = acoustic_inverse(&wave_group(b, t / eps));
    let (w1g, w2g, z1g, z2g) = (
        inverse_transform(&w1),
        inverse_transform(&w2),
        inverse_transform(&z1),
        inverse_transform(&z2),
    );
    let flux = grid_product(&w1g, &z2g)?.add(&grid_product(&z1g, &w2g)?)?.scale(0.5);
    let x1 = spectral_derivative(&flux, DerivativeKind::Divergence)?;
    let d = a.lattice().dim();
    let mut pot = grid_product(&w1g, &z1g)?.scale(kappa);
    for h in 0..d {
        let c = grid_product(&w2g.component(h), &z2g.component(h))?;
        pot = pot.add(&c)?;
    }
    let x2 = spectral_derivative(&pot.scale(0.5), DerivativeKind::Gradient)?;
    Ok(wave_group(&acoustic_transform(&x1, &x2)?, -t / eps))
}

/// Acoustic viscous coupling `L(-t/eps) (0, Q lap w2)`, `w = L(t/eps) B`.
pub fn a2_eps(b: &AcousticCoeffs, t: f64, eps: f64) -> Result<AcousticCoeffs> {
    check_eps(eps)?;
    let (w1, w2) = acoustic_inverse(&wave_group(b, t / eps));
    let lap = spectral_derivative(&w2, DerivativeKind::Laplacian)?;
    let zero = w1.scale(0.0);
    Ok(wave_group(&acoustic_transform(&zero, &lap)?, -t / eps))
}

/// Which `(k, l)` pairs a mode sum keeps.
#[derive(Clone, Copy, Debug)]
pub enum ModeWindow {
    All,
    /// Split by whether both `|k| <= M` and `|l| <= M`.
    Split(f64),
}

/// Result of a mode sum: the low part (every term when the window is
/// `All`) and the high remainder.
pub struct ModeSum {
    pub low: AcousticCoeffs,
    pub high: AcousticCoeffs,
}

impl ModeSum {
    pub fn total(&self) -> Result<AcousticCoeffs> {
        self.low.add(&self.high)
    }
}

/// `|k| <= m` with a relative slack so that exact radii count as inside.
pub fn within_radius(kabs: f64, m: f64) -> bool {
    kabs <= m * (1.0 + 1e-12)
}

fn window_low(w: ModeWindow, kk: f64, kl: f64) -> bool {
    match w {
        ModeWindow::All => true,
        ModeWindow::Split(m) => within_radius(kk, m) && within_radius(kl, m),
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Mode-sum form of [`q1_eps`] for a divergence-free `u`.
pub fn q1_eps_modes(
    u: &SpectralField,
    b: &AcousticCoeffs,
    t: f64,
    eps: f64,
    window: ModeWindow,
) -> Result<ModeSum> {
    check_eps(eps)?;
    let lat = b.lattice().clone();
    let mut low = AcousticCoeffs::zeros(&lat);
    let mut high = AcousticCoeffs::zeros(&lat);
    let pref = I / (2.0 * lat.sqrt_volume());
    for &m in lat.modes().iter().skip(1) {
        let (km, sm, mv) = (lat.kabs(m), slot_sign(&lat, m) as f64, lat.wavevector(m));
        for &k in lat.modes().iter().skip(1) {
            let Some(l) = lat.diff_slot(m, k) else { continue };
            let (kk, sk, kv) = (lat.kabs(k), slot_sign(&lat, k) as f64, lat.wavevector(k));
            let ku = u.dot_wave(l, kv);
            if ku == Complex64::new(0.0, 0.0) {
                continue;
            }
            let lv = lat.wavevector(l);
            let geom = dot(&[lv[0] + mv[0], lv[1] + mv[1], lv[2] + mv[2]], kv) / (kk * km);
            let target = if window_low(window, kk, lat.kabs(l)) { &mut low } else { &mut high };
            for alpha in BRANCHES {
                let bk = b.get(k, alpha);
                for gamma in BRANCHES {
                    let ag = (alpha * gamma) as f64;
                    let w = 1.0 + ag * sk * sm * geom;
                    let phase = (alpha as f64 * sk * kk - gamma as f64 * sm * km) * t / eps;
                    target.add_to(m, gamma, pref * bk * ku * w * Complex64::from_polar(1.0, phase));
                }
            }
        }
    }
    Ok(ModeSum { low, high })
}

/// Mode-sum form of [`q2_eps`].
pub fn q2_eps_modes(
    a: &AcousticCoeffs,
    b: &AcousticCoeffs,
    t: f64,
    eps: f64,
    kappa: f64,
    window: ModeWindow,
) -> Result<ModeSum> {
    check_eps(eps)?;
    let lat = a.lattice().clone();
    let mut low = AcousticCoeffs::zeros(&lat);
    let mut high = AcousticCoeffs::zeros(&lat);
    let cd = FRAC_1_SQRT_2 / lat.sqrt_volume();
    for &m in lat.modes().iter().skip(1) {
        let (km, sm, mv) = (lat.kabs(m), slot_sign(&lat, m) as f64, lat.wavevector(m));
        for &k in lat.modes().iter().skip(1) {
            let Some(l) = lat.diff_slot(m, k) else { continue };
            if l == 0 {
                continue;
            }
            let (kk, sk, kv) = (lat.kabs(k), slot_sign(&lat, k) as f64, lat.wavevector(k));
            let (kl, sl, lv) = (lat.kabs(l), slot_sign(&lat, l) as f64, lat.wavevector(l));
            let lm = dot(lv, mv) / (kl * km);
            let kl_dot = dot(kv, lv) / (kk * kl);
            let target = if window_low(window, kk, kl) { &mut low } else { &mut high };
            for alpha in BRANCHES {
                for beta in BRANCHES {
                    let sym = (a.get(k, alpha) * b.get(l, beta) + b.get(k, alpha) * a.get(l, beta)) * 0.5;
                    if sym == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for gamma in BRANCHES {
                        let (al, be, ga) = (alpha as f64, beta as f64, gamma as f64);
                        let bracket = be * sl * sm * lm + ga * kappa * 0.5 + al * be * ga * 0.5 * sk * sl * kl_dot;
                        let phase = (al * sk * kk + be * sl * kl - ga * sm * km) * t / eps;
                        let coef = -I * cd * 0.5 * sm * km * bracket;
                        target.add_to(m, gamma, coef * sym * Complex64::from_polar(1.0, phase));
                    }
                }
            }
        }
    }
    Ok(ModeSum { low, high })
}

/// Mode-sum form of [`a2_eps`].
pub fn a2_eps_modes(b: &AcousticCoeffs, t: f64, eps: f64) -> Result<AcousticCoeffs> {
    check_eps(eps)?;
    let lat = b.lattice().clone();
    let mut out = AcousticCoeffs::zeros(&lat);
    for &k in lat.modes().iter().skip(1) {
        let (kk, sk) = (lat.kabs(k), slot_sign(&lat, k) as f64);
        for gamma in BRANCHES {
            let mut acc = Complex64::new(0.0, 0.0);
            for alpha in BRANCHES {
                let phase = (alpha - gamma) as f64 * sk * kk * t / eps;
                acc += -0.5 * (alpha * gamma) as f64 * lat.k2(k) * b.get(k, alpha) * Complex64::from_polar(1.0, phase);
            }
            out.set(k, gamma, acc);
        }
    }
    Ok(out)
}
