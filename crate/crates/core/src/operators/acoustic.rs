use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::torus::{Lattice, SpectralField, MAX_DIM};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sign of the first nonzero entry of an integer wave index.
pub fn sg(n: &[i64]) -> Result<i8> {
    n.iter()
        .find(|&&x| x != 0)
        .map(|&x| if x > 0 { 1 } else { -1 })
        .ok_or_else(|| Error::Argument("sign of the zero wavevector".into()))
}

/// `sg` of a storage slot; the mean slot maps to 0.
pub fn slot_sign(lat: &Lattice, f: usize) -> i8 {
    sg(lat.index(f)).unwrap_or(0)
}

/// Branch storage index of `alpha in {-1, +1}`.
pub fn branch(alpha: i8) -> usize {
    if alpha > 0 {
        1
    } else {
        0
    }
}

pub const BRANCHES: [i8; 2] = [-1, 1];

/// Coefficients of a zero-mean state `(a, Qu)` in the acoustic eigenbasis
/// `Phi_k^alpha = (2|T|)^{-1/2} (1, -alpha sg(k) k/|k|) e^{ik.x}`.
#[derive(Clone, Debug)]
pub struct AcousticCoeffs {
    lattice: Arc<Lattice>,
    data: Vec<[Complex64; 2]>,
}

impl AcousticCoeffs {
    pub fn zeros(lattice: &Arc<Lattice>) -> Self {
        AcousticCoeffs { lattice: lattice.clone(), data: vec![[ZERO; 2]; lattice.len()] }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn get(&self, slot: usize, alpha: i8) -> Complex64 {
        self.data[slot][branch(alpha)]
    }

    pub fn set(&mut self, slot: usize, alpha: i8, v: Complex64) {
        if slot != 0 && self.lattice.is_retained(slot) {
            self.data[slot][branch(alpha)] = v;
        }
    }

    pub fn add_to(&mut self, slot: usize, alpha: i8, v: Complex64) {
        if slot != 0 && self.lattice.is_retained(slot) {
            self.data[slot][branch(alpha)] += v;
        }
    }

    pub fn data(&self) -> &[[Complex64; 2]] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [[Complex64; 2]] {
        &mut self.data
    }

    fn check(&self, other: &AcousticCoeffs) -> Result<()> {
        if self.lattice.same_as(&other.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch("acoustic coefficients on different lattices".into()))
        }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: Complex64, other: &AcousticCoeffs) -> Result<AcousticCoeffs> {
        self.check(other)?;
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            x[0] += alpha * y[0];
            x[1] += alpha * y[1];
        }
        Ok(out)
    }

    pub fn add(&self, other: &AcousticCoeffs) -> Result<AcousticCoeffs> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &AcousticCoeffs) -> Result<AcousticCoeffs> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, s: f64) -> AcousticCoeffs {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            x[0] *= s;
            x[1] *= s;
        }
        out
    }

    /// Multiply each slot's pair by `m(slot, alpha)`.
    pub fn map(&self, m: impl Fn(usize, i8) -> Complex64) -> AcousticCoeffs {
        let mut out = self.clone();
        for &f in self.lattice.modes().iter().skip(1) {
            for a in BRANCHES {
                out.data[f][branch(a)] *= m(f, a);
            }
        }
        out
    }

    /// L2 norm, equal to the L2 norm of the represented state.
    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|x| x[0].norm_sqr() + x[1].norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().flat_map(|x| x.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest violation of `V_{-k}^alpha = conj(V_k^alpha)`.
    pub fn reality_defect(&self) -> f64 {
        let lat = &self.lattice;
        let mut worst: f64 = 0.0;
        for &f in lat.modes() {
            let g = lat.neg(f);
            for b in 0..2 {
                worst = worst.max((self.data[f][b] - self.data[g][b].conj()).norm());
            }
        }
        worst
    }

    /// The represented state `(a, Qu)` stacked into `d + 1` components.
    pub fn to_state(&self) -> SpectralField {
        let (a, qu) = acoustic_inverse(self);
        SpectralField::stack(&[&a, &qu]).expect("same lattice")
    }

    /// Coefficients as a two-component field `(V^-, V^+)`, bit for bit.
    pub fn as_branches(&self) -> SpectralField {
        let comps = (0..2).map(|b| self.data.iter().map(|x| x[b]).collect()).collect();
        SpectralField::from_components(&self.lattice, comps, false).expect("valid shape")
    }

    pub fn from_branches(field: &SpectralField) -> Result<AcousticCoeffs> {
        if field.ncomp() != 2 {
            return Err(Error::Shape("branch field needs two components".into()));
        }
        let lat = field.lattice().clone();
        let mut out = AcousticCoeffs::zeros(&lat);
        for &f in lat.modes().iter().skip(1) {
            out.data[f] = [field.comp(0)[f], field.comp(1)[f]];
        }
        Ok(out)
    }

    pub fn from_state(state: &SpectralField) -> Result<AcousticCoeffs> {
        let d = state.lattice().dim();
        if state.ncomp() != d + 1 {
            return Err(Error::Shape(format!("state needs {} components", d + 1)));
        }
        acoustic_transform(&state.component(0), &state.slice(1..d + 1))
    }
}

fn unit(k: &[f64; MAX_DIM], kabs: f64) -> [f64; MAX_DIM] {
    [k[0] / kabs, k[1] / kabs, k[2] / kabs]
}

/// Acoustic coefficients of `(a, qu)`. Only the longitudinal part of `qu`
/// is read; the mean of `a` must vanish.
pub fn acoustic_transform(a: &SpectralField, qu: &SpectralField) -> Result<AcousticCoeffs> {
    let lat = a.lattice().clone();
    let d = lat.dim();
    if !a.is_scalar() || qu.ncomp() != d {
        return Err(Error::Shape("acoustic transform needs a scalar and a d-vector".into()));
    }
    if !qu.lattice().same_as(&lat) {
        return Err(Error::LatticeMismatch("acoustic transform inputs".into()));
    }
    let scale = a.l2_norm().max(1.0);
    if a.comp(0)[0].norm() > 1e-12 * scale {
        return Err(Error::Argument("acoustic transform needs a zero-mean scalar".into()));
    }
    let mut out = AcousticCoeffs::zeros(&lat);
    for &f in lat.modes().iter().skip(1) {
        let kabs = lat.kabs(f);
        let mu = qu.dot_wave(f, &unit(lat.wavevector(f), kabs));
        let s = slot_sign(&lat, f) as f64;
        let ah = a.comp(0)[f];
        for alpha in BRANCHES {
            out.data[f][branch(alpha)] = (ah - alpha as f64 * s * mu) * FRAC_1_SQRT_2;
        }
    }
    Ok(out)
}

/// Inverse of [`acoustic_transform`]: the scalar and the gradient field.
pub fn acoustic_inverse(v: &AcousticCoeffs) -> (SpectralField, SpectralField) {
    let lat = v.lattice.clone();
    let d = lat.dim();
    let mut a = SpectralField::zeros(&lat, 1);
    let mut qu = SpectralField::zeros(&lat, d);
    for &f in lat.modes().iter().skip(1) {
        let [vm, vp] = v.data[f];
        let kabs = lat.kabs(f);
        let s = slot_sign(&lat, f) as f64;
        a.comp_mut(0)[f] = (vp + vm) * FRAC_1_SQRT_2;
        let mu = -(vp - vm) * (s * FRAC_1_SQRT_2);
        let e = unit(lat.wavevector(f), kabs);
        for h in 0..d {
            qu.comp_mut(h)[f] = mu * e[h];
        }
    }
    let real = v.reality_defect() <= 1e-12 * v.max_abs().max(1e-300);
    a.set_reality(real);
    qu.set_reality(real);
    (a, qu)
}

/// Free acoustic evolution over time `tau`: `V_k^alpha` gains the phase
/// `e^{i alpha sg(k) |k| tau}`.
pub fn wave_group(v: &AcousticCoeffs, tau: f64) -> AcousticCoeffs {
    let lat = v.lattice.clone();
    v.map(|f, alpha| {
        let w = alpha as f64 * slot_sign(&lat, f) as f64 * lat.kabs(f) * tau;
        Complex64::from_polar(1.0, w)
    })
}

/// Eigenvalue of the wave operator `(b, w) -> (div w, grad b)` on
/// `Phi_k^alpha`: `-i alpha sg(k) |k|`.
pub fn wave_eigenvalue(lat: &Lattice, slot: usize, alpha: i8) -> Complex64 {
    Complex64::new(0.0, -(alpha as f64) * slot_sign(lat, slot) as f64 * lat.kabs(slot))
}
