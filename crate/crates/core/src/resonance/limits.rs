use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::table::ResonanceTable;
use crate::operators::{slot_sign, within_radius, AcousticCoeffs};
use crate::torus::{Lattice, SpectralField};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_lattice(table: &ResonanceTable, lat: &std::sync::Arc<Lattice>) -> Result<()> {
    if lat.same_as(table.lattice()) {
        Ok(())
    } else {
        Err(Error::LatticeMismatch("resonance table built for another lattice".into()))
    }
}

/// Fails when a mode outside the table radius carries more than roundoff.
fn check_support(lat: &Lattice, cutoff: f64, size: impl Fn(usize) -> f64) -> Result<()> {
    let peak = lat.modes().iter().map(|&f| size(f)).fold(0.0, f64::max);
    for &f in lat.modes() {
        if !within_radius(lat.kabs(f), cutoff) && size(f) > 1e-12 * peak {
            return Err(Error::Argument(format!(
                "input has modes beyond the table radius {cutoff}"
            )));
        }
    }
    Ok(())
}

/// Averaged velocity-acoustic coupling: the resonant part of the
/// oscillating coupling, `(i/sqrt|T|) sum B_k (k.u_l)(k.m)/(|k||m|)`.
/// Includes the mean-flow interaction `l = 0`.
pub fn limit_q1(u: &SpectralField, b: &AcousticCoeffs, table: &ResonanceTable) -> Result<AcousticCoeffs> {
    let lat = b.lattice().clone();
    check_lattice(table, &lat)?;
    if u.ncomp() != lat.dim() || !u.lattice().same_as(&lat) {
        return Err(Error::Shape("velocity must be a d-vector on the table lattice".into()));
    }
    check_support(&lat, table.cutoff(), |f| u.mode_energy(f).sqrt())?;
    check_support(&lat, table.cutoff(), |f| b.get(f, -1).norm() + b.get(f, 1).norm())?;
    let pref = I / (2.0 * lat.sqrt_volume());
    let mut out = AcousticCoeffs::zeros(&lat);
    for t in table.velocity() {
        let (kv, lv, mv) = (lat.wavevector(t.k), lat.wavevector(t.l), lat.wavevector(t.m));
        let ku = u.dot_wave(t.l, kv);
        let bk = b.get(t.k, t.alpha);
        if ku == Complex64::new(0.0, 0.0) || bk == Complex64::new(0.0, 0.0) {
            continue;
        }
        let sign = (t.alpha * t.gamma * slot_sign(&lat, t.k) * slot_sign(&lat, t.m)) as f64;
        let lm = [lv[0] + mv[0], lv[1] + mv[1], lv[2] + mv[2]];
        let w = 1.0 + sign * dot(&lm, kv) / (lat.kabs(t.k) * lat.kabs(t.m));
        out.add_to(t.m, t.gamma, pref * bk * ku * w);
    }
    Ok(out)
}

/// Averaged acoustic self-interaction: the resonant part of the
/// oscillating coupling. Only collinear triples on equal branches survive.
pub fn limit_q2(
    a: &AcousticCoeffs,
    b: &AcousticCoeffs,
    kappa: f64,
    table: &ResonanceTable,
) -> Result<AcousticCoeffs> {
    let lat = a.lattice().clone();
    check_lattice(table, &lat)?;
    if !b.lattice().same_as(&lat) {
        return Err(Error::LatticeMismatch("limit_q2 inputs".into()));
    }
    for x in [a, b] {
        check_support(&lat, table.cutoff(), |f| x.get(f, -1).norm() + x.get(f, 1).norm())?;
    }
    let cd = FRAC_1_SQRT_2 / lat.sqrt_volume();
    let mut out = AcousticCoeffs::zeros(&lat);
    for t in table.acoustic() {
        let sym = (a.get(t.k, t.alpha) * b.get(t.l, t.beta) + b.get(t.k, t.alpha) * a.get(t.l, t.beta)) * 0.5;
        if sym == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (kv, lv, mv) = (lat.wavevector(t.k), lat.wavevector(t.l), lat.wavevector(t.m));
        let (kk, kl, km) = (lat.kabs(t.k), lat.kabs(t.l), lat.kabs(t.m));
        let (sk, sl, sm) = (slot_sign(&lat, t.k) as f64, slot_sign(&lat, t.l) as f64, slot_sign(&lat, t.m) as f64);
        let (al, be, ga) = (t.alpha as f64, t.beta as f64, t.gamma as f64);
        let bracket = be * sl * sm * dot(lv, mv) / (kl * km)
            + ga * kappa * 0.5
            + al * be * ga * 0.5 * sk * sl * dot(kv, lv) / (kk * kl);
        out.add_to(t.m, t.gamma, -I * cd * 0.5 * sm * km * bracket * sym);
    }
    Ok(out)
}
