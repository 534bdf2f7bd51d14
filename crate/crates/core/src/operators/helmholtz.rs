use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::torus::SpectralField;
use crate::{Error, Result};

/// Leray projection onto divergence-free fields (`P`) or onto gradients
/// (`Q`). The mean belongs to the divergence-free part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    P,
    Q,
}

pub fn helmholtz_project(u: &SpectralField, which: Projection) -> Result<SpectralField> {
    let lat = u.lattice().clone();
    let d = lat.dim();
    if u.ncomp() != d {
        return Err(Error::Shape(format!("projection needs {d} components, got {}", u.ncomp())));
    }
    let mut out = SpectralField::zeros(&lat, d);
    out.set_reality(u.reality());
    for &f in lat.modes() {
        let k = lat.wavevector(f);
        let k2 = lat.k2(f);
        let kdot: Complex64 = if k2 > 0.0 { u.dot_wave(f, k) / k2 } else { Complex64::new(0.0, 0.0) };
        for h in 0..d {
            let q = kdot * k[h];
            out.comp_mut(h)[f] = match which {
                Projection::Q => q,
                Projection::P => u.comp(h)[f] - q,
            };
        }
    }
    Ok(out)
}
