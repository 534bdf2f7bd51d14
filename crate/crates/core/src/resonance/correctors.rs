//! Two-time-scale correctors for the filtered acoustic difference.
//!
//! Each oscillating source term `c e^{i w t / eps}` with `w != 0` has the
//! corrector `c e^{i w t / eps} / (i w)`, so that
//! `eps d/dt (corrector) = source + eps (corrector of dc/dt)`. Resonant
//! terms (`w = 0`) belong to the limit and are skipped.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;

use super::exact::roots_sum_to_zero;
use super::table::signed_root;
use crate::operators::{
    acoustic_transform, convective_term, helmholtz_project, slot_sign, within_radius,
    AcousticCoeffs, Projection, BRANCHES,
};
use crate::torus::{Lattice, SpectralField};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients the correctors are built from, at one time instant.
#[derive(Clone, Debug)]
pub struct CorrectorInputs {
    /// Filtered acoustic part of the compressible solution.
    pub filtered: AcousticCoeffs,
    /// Acoustic part of the limit solution.
    pub acoustic: AcousticCoeffs,
    /// Divergence-free limit velocity.
    pub velocity: SpectralField,
    /// Acoustic coefficients of `(0, Qf)`; `None` for no forcing.
    pub forcing: Option<AcousticCoeffs>,
}

impl CorrectorInputs {
    pub fn zeros(lat: &Arc<Lattice>) -> Self {
        CorrectorInputs {
            filtered: AcousticCoeffs::zeros(lat),
            acoustic: AcousticCoeffs::zeros(lat),
            velocity: SpectralField::zeros(lat, lat.dim()),
            forcing: None,
        }
    }

    fn lattice(&self) -> &Arc<Lattice> {
        self.acoustic.lattice()
    }

    fn validate(&self) -> Result<()> {
        let lat = self.lattice();
        let ok = self.filtered.lattice().same_as(lat)
            && self.velocity.lattice().same_as(lat)
            && self.forcing.as_ref().map_or(true, |f| f.lattice().same_as(lat));
        if !ok {
            return Err(Error::LatticeMismatch("corrector inputs".into()));
        }
        if self.velocity.ncomp() != lat.dim() {
            return Err(Error::Shape("velocity needs d components".into()));
        }
        Ok(())
    }
}

/// Physical constants entering the correctors.
#[derive(Clone, Copy, Debug)]
pub struct CorrectorParams {
    pub cutoff: f64,
    pub eps: f64,
    pub nu: f64,
    pub kappa: f64,
}

/// One value per corrector family.
#[derive(Clone, Debug)]
pub struct CorrectorSet {
    /// Forcing minus self-advection of the limit velocity.
    pub forcing: AcousticCoeffs,
    /// Velocity-acoustic interaction.
    pub transport: AcousticCoeffs,
    /// Acoustic self-interaction.
    pub acoustic: AcousticCoeffs,
    /// Viscous branch exchange.
    pub viscous: AcousticCoeffs,
}

impl CorrectorSet {
    fn zeros(lat: &Arc<Lattice>) -> Self {
        let z = AcousticCoeffs::zeros(lat);
        CorrectorSet { forcing: z.clone(), transport: z.clone(), acoustic: z.clone(), viscous: z }
    }

    pub fn total(&self) -> Result<AcousticCoeffs> {
        self.forcing.add(&self.transport)?.add(&self.acoustic)?.add(&self.viscous)
    }

    pub fn parts(&self) -> [(&'static str, &AcousticCoeffs); 4] {
        [
            ("forcing", &self.forcing),
            ("transport", &self.transport),
            ("acoustic", &self.acoustic),
            ("viscous", &self.viscous),
        ]
    }
}

/// Correctors at time `t` and, when rates were supplied, the correctors of
/// the time derivatives.
#[derive(Clone, Debug)]
pub struct Correctors {
    pub value: CorrectorSet,
    pub rate: Option<CorrectorSet>,
}

/// Whether a term enters as the source itself or as its corrector.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Weight {
    Source,
    Corrector,
}

impl Weight {
    /// Multiplier of a term with frequency `w` (nonzero).
    fn factor(self, w: f64) -> Complex64 {
        match self {
            Weight::Source => Complex64::new(1.0, 0.0),
            Weight::Corrector => Complex64::new(0.0, -1.0 / w),
        }
    }
}

/// Which `(k, l)` pairs to keep.
#[derive(Clone, Copy)]
enum Band {
    Low(f64),
    High(f64),
}

impl Band {
    fn keeps(self, kk: f64, kl: f64) -> bool {
        let low = |m| within_radius(kk, m) && within_radius(kl, m);
        match self {
            Band::Low(m) => low(m),
            Band::High(m) => !low(m),
        }
    }

    fn keeps_single(self, kk: f64) -> bool {
        match self {
            Band::Low(m) => within_radius(kk, m),
            Band::High(m) => !within_radius(kk, m),
        }
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Acoustic coefficients of `(0, Q(v.grad v))`.
pub fn self_advection(v: &SpectralField) -> Result<AcousticCoeffs> {
    longitudinal(convective_term(v, v)?)
}

fn longitudinal(flux: SpectralField) -> Result<AcousticCoeffs> {
    let q = helmholtz_project(&flux, Projection::Q)?;
    acoustic_transform(&SpectralField::zeros(flux.lattice(), 1), &q)
}

/// `-(non-resonant velocity-acoustic coupling)` restricted to a band.
fn transport_terms(u: &SpectralField, b: &AcousticCoeffs, t: f64, eps: f64, band: Band, weight: Weight, out: &mut AcousticCoeffs) {
    let lat = b.lattice().clone();
    let pref = -I / (2.0 * lat.sqrt_volume());
    for &k in lat.modes().iter().skip(1) {
        let (kk, sk, kv, nk) = (lat.kabs(k), slot_sign(&lat, k), lat.wavevector(k), lat.exact_norm2(k));
        if b.get(k, -1) == ZERO && b.get(k, 1) == ZERO {
            continue;
        }
        for &l in lat.modes() {
            if !band.keeps(kk, lat.kabs(l)) {
                continue;
            }
            let Some(m) = lat.sum_slot(k, l) else { continue };
            if m == 0 {
                continue;
            }
            let ku = u.dot_wave(l, kv);
            if ku == ZERO {
                continue;
            }
            let (km, sm, mv, nm) = (lat.kabs(m), slot_sign(&lat, m), lat.wavevector(m), lat.exact_norm2(m));
            let lv = lat.wavevector(l);
            let geom = dot(&[lv[0] + mv[0], lv[1] + mv[1], lv[2] + mv[2]], kv) / (kk * km);
            for alpha in BRANCHES {
                let bk = b.get(k, alpha);
                for gamma in BRANCHES {
                    if nk == nm && alpha * sk == gamma * sm {
                        continue;
                    }
                    let w = alpha as f64 * sk as f64 * kk - gamma as f64 * sm as f64 * km;
                    let shape = 1.0 + (alpha * gamma * sk * sm) as f64 * geom;
                    let phase = Complex64::from_polar(1.0, w * t / eps);
                    out.add_to(m, gamma, pref * bk * ku * shape * phase * weight.factor(w));
                }
            }
        }
    }
}

/// `-(non-resonant acoustic self-interaction)` of the symmetric pair
/// `(A, B)` restricted to a band.
#[allow(clippy::too_many_arguments)]
fn acoustic_terms(
    a: &AcousticCoeffs,
    b: &AcousticCoeffs,
    kappa: f64,
    t: f64,
    eps: f64,
    band: Band,
    weight: Weight,
    out: &mut AcousticCoeffs,
) -> Result<()> {
    let lat = a.lattice().clone();
    let cd = FRAC_1_SQRT_2 / lat.sqrt_volume();
    for &k in lat.modes().iter().skip(1) {
        let (kk, sk, kv) = (lat.kabs(k), slot_sign(&lat, k) as f64, lat.wavevector(k));
        for &l in lat.modes().iter().skip(1) {
            let kl = lat.kabs(l);
            if !band.keeps(kk, kl) {
                continue;
            }
            let Some(m) = lat.sum_slot(k, l) else { continue };
            if m == 0 {
                continue;
            }
            let (sl, lv) = (slot_sign(&lat, l) as f64, lat.wavevector(l));
            let (km, sm, mv) = (lat.kabs(m), slot_sign(&lat, m) as f64, lat.wavevector(m));
            let lm = dot(lv, mv) / (kl * km);
            let kl_dot = dot(kv, lv) / (kk * kl);
            for alpha in BRANCHES {
                for beta in BRANCHES {
                    let sym = (a.get(k, alpha) * b.get(l, beta) + b.get(k, alpha) * a.get(l, beta)) * 0.5;
                    if sym == ZERO {
                        continue;
                    }
                    for gamma in BRANCHES {
                        let roots = [
                            signed_root(&lat, k, alpha),
                            signed_root(&lat, l, beta),
                            signed_root(&lat, m, -gamma),
                        ];
                        if roots_sum_to_zero(&roots)? {
                            continue;
                        }
                        let (al, be, ga) = (alpha as f64, beta as f64, gamma as f64);
                        let bracket = be * sl * sm * lm + ga * kappa * 0.5 + al * be * ga * 0.5 * sk * sl * kl_dot;
                        let w = al * sk * kk + be * sl * kl - ga * sm * km;
                        let coef = I * cd * 0.5 * sm * km * bracket;
                        let phase = Complex64::from_polar(1.0, w * t / eps);
                        out.add_to(m, gamma, coef * sym * phase * weight.factor(w));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `sum (f - L) e^{-i alpha sg(k)|k| t/eps} Phi_k^alpha` over a band.
fn forcing_terms(src: &AcousticCoeffs, t: f64, eps: f64, band: Band, weight: Weight, out: &mut AcousticCoeffs) {
    let lat = src.lattice().clone();
    for &k in lat.modes().iter().skip(1) {
        if !band.keeps_single(lat.kabs(k)) {
            continue;
        }
        for alpha in BRANCHES {
            let w = -(alpha as f64) * slot_sign(&lat, k) as f64 * lat.kabs(k);
            let phase = Complex64::from_polar(1.0, w * t / eps);
            out.add_to(k, alpha, src.get(k, alpha) * phase * weight.factor(w));
        }
    }
}

/// `(nu/2) sum |k|^2 V_k^alpha e^{2 i alpha sg(k)|k| t/eps} Phi_k^{-alpha}`.
fn viscous_terms(v: &AcousticCoeffs, nu: f64, t: f64, eps: f64, band: Band, weight: Weight, out: &mut AcousticCoeffs) {
    let lat = v.lattice().clone();
    for &k in lat.modes().iter().skip(1) {
        if !band.keeps_single(lat.kabs(k)) {
            continue;
        }
        for alpha in BRANCHES {
            let w = 2.0 * alpha as f64 * slot_sign(&lat, k) as f64 * lat.kabs(k);
            let phase = Complex64::from_polar(1.0, w * t / eps);
            out.add_to(k, -alpha, 0.5 * nu * lat.k2(k) * v.get(k, alpha) * phase * weight.factor(w));
        }
    }
}

fn forcing_source(x: &CorrectorInputs, adv: AcousticCoeffs) -> Result<AcousticCoeffs> {
    match &x.forcing {
        Some(f) => f.sub(&adv),
        None => Ok(adv.scale(-1.0)),
    }
}

fn build(
    x: &CorrectorInputs,
    rate: Option<&CorrectorInputs>,
    p: &CorrectorParams,
    t: f64,
    band: Band,
    weight: Weight,
) -> Result<CorrectorSet> {
    let lat = x.lattice().clone();
    let mut out = CorrectorSet::zeros(&lat);
    match rate {
        None => {
            let src = forcing_source(x, self_advection(&x.velocity)?)?;
            forcing_terms(&src, t, p.eps, band, weight, &mut out.forcing);
            transport_terms(&x.velocity, &x.acoustic, t, p.eps, band, weight, &mut out.transport);
            acoustic_terms(&x.acoustic, &x.acoustic, p.kappa, t, p.eps, band, weight, &mut out.acoustic)?;
            viscous_terms(&x.filtered, p.nu, t, p.eps, band, weight, &mut out.viscous);
        }
        Some(r) => {
            // product rule on every bilinear coefficient
            let adv = longitudinal(convective_term(&r.velocity, &x.velocity)?.add(&convective_term(&x.velocity, &r.velocity)?)?)?;
            let src = forcing_source(r, adv)?;
            forcing_terms(&src, t, p.eps, band, weight, &mut out.forcing);
            transport_terms(&r.velocity, &x.acoustic, t, p.eps, band, weight, &mut out.transport);
            transport_terms(&x.velocity, &r.acoustic, t, p.eps, band, weight, &mut out.transport);
            acoustic_terms(&r.acoustic, &x.acoustic, p.kappa, t, p.eps, band, weight, &mut out.acoustic)?;
            out.acoustic = out.acoustic.scale(2.0);
            viscous_terms(&r.filtered, p.nu, t, p.eps, band, weight, &mut out.viscous);
        }
    }
    Ok(out)
}

fn check(p: &CorrectorParams) -> Result<()> {
    if !(p.eps > 0.0 && p.eps.is_finite()) {
        return Err(Error::Argument(format!("eps = {} must be positive", p.eps)));
    }
    if !(p.cutoff >= 0.0) {
        return Err(Error::Argument(format!("cutoff {} must be non-negative", p.cutoff)));
    }
    Ok(())
}

/// Correctors truncated to `|k|, |l| <= M` at time `t`. With `rate`
/// (time derivatives of the inputs) also the derivative correctors.
pub fn assemble_correctors(
    inputs: &CorrectorInputs,
    rate: Option<&CorrectorInputs>,
    params: &CorrectorParams,
    t: f64,
) -> Result<Correctors> {
    check(params)?;
    inputs.validate()?;
    if let Some(r) = rate {
        r.validate()?;
    }
    let band = Band::Low(params.cutoff);
    let value = build(inputs, None, params, t, band, Weight::Corrector)?;
    let rate = rate.map(|r| build(inputs, Some(r), params, t, band, Weight::Corrector)).transpose()?;
    Ok(Correctors { value, rate })
}

/// The oscillating source split into the part with `|k|, |l| <= M` and
/// the remainder.
pub fn oscillating_source(inputs: &CorrectorInputs, params: &CorrectorParams, t: f64) -> Result<(CorrectorSet, CorrectorSet)> {
    check(params)?;
    inputs.validate()?;
    let low = build(inputs, None, params, t, Band::Low(params.cutoff), Weight::Source)?;
    let high = build(inputs, None, params, t, Band::High(params.cutoff), Weight::Source)?;
    Ok((low, high))
}
