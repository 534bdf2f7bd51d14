use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::littlewood_paley::{norm, NormSpec};
use crate::torus::{Lattice, SpectralField};
use crate::{Error, Result};

/// Random-phase field with `|g_k| = (1+|k|)^{-sigma}` on every retained
/// nonzero mode, Hermitian symmetric and mean-free.
fn random_field(lat: &Arc<Lattice>, ncomp: usize, sigma: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut g = SpectralField::zeros(lat, ncomp);
    for c in 0..ncomp {
        for &f in lat.modes().iter().skip(1) {
            let neg = lat.neg(f);
            if neg < f {
                continue;
            }
            let z = Complex64::from_polar((1.0 + lat.kabs(f)).powf(-sigma), rng.gen::<f64>() * TAU);
            g.comp_mut(c)[f] = z;
            g.comp_mut(c)[neg] = z.conj();
        }
    }
    g.set_reality(true);
    g
}

fn rescale(g: SpectralField, spec: &NormSpec, target: f64) -> Result<SpectralField> {
    let n = norm(&g, spec)?;
    if !(n > 0.0) {
        return Err(Error::Argument("random field has zero norm; no retained modes".into()));
    }
    Ok(g.scale(target / n))
}

/// Initial density perturbation and velocity with
/// `||a0||_{B^{d/2}_{2,1}} = amp_density` and
/// `||u0||_{B^{d/2-1}_{2,1}} = amp_velocity`. Both are mean-free.
pub fn generate_initial_data(
    lat: &Arc<Lattice>,
    amp_density: f64,
    amp_velocity: f64,
    sigma: f64,
    seed: u64,
) -> Result<(SpectralField, SpectralField)> {
    if !(amp_density > 0.0 && amp_velocity > 0.0) || !amp_density.is_finite() || !amp_velocity.is_finite() {
        return Err(Error::Argument("amplitudes must be positive".into()));
    }
    if !sigma.is_finite() {
        return Err(Error::Argument("smoothness must be finite".into()));
    }
    let half = lat.dim() as f64 / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_field(lat, 1, sigma, &mut rng);
    let u = random_field(lat, lat.dim(), sigma, &mut rng);
    Ok((
        rescale(a, &NormSpec::b21(half), amp_density)?,
        rescale(u, &NormSpec::b21(half - 1.0), amp_velocity)?,
    ))
}
