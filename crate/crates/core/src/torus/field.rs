use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lattice::{Lattice, MAX_DIM};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fourier coefficients of a scalar or vector field on a lattice.
///
/// Each component is a dense array over the FFT grid; entries outside the
/// retained set are kept at zero.
#[derive(Clone, Debug)]
pub struct SpectralField {
    lattice: Arc<Lattice>,
    comps: Vec<Vec<Complex64>>,
    reality: bool,
}

/// Point samples of a scalar or vector field on the lattice grid.
#[derive(Clone, Debug)]
pub struct GridField {
    lattice: Arc<Lattice>,
    comps: Vec<Vec<Complex64>>,
    real: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeKind {
    Gradient,
    Divergence,
    Laplacian,
}

fn check_same(a: &Arc<Lattice>, b: &Arc<Lattice>) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::LatticeMismatch(format!("{:?} vs {:?}", a.spec(), b.spec())))
    }
}

impl SpectralField {
    pub fn zeros(lattice: &Arc<Lattice>, ncomp: usize) -> Self {
        SpectralField {
            lattice: lattice.clone(),
            comps: vec![vec![ZERO; lattice.len()]; ncomp.max(1)],
            reality: true,
        }
    }

    /// Build from dense component arrays; entries outside the retained set
    /// are cleared.
    pub fn from_components(
        lattice: &Arc<Lattice>,
        mut comps: Vec<Vec<Complex64>>,
        reality: bool,
    ) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::Shape("field needs at least one component".into()));
        }
        for c in comps.iter_mut() {
            if c.len() != lattice.len() {
                return Err(Error::Shape(format!(
                    "component has {} coefficients, lattice has {}",
                    c.len(),
                    lattice.len()
                )));
            }
            for (f, v) in c.iter_mut().enumerate() {
                if !lattice.is_retained(f) {
                    *v = ZERO;
                }
            }
        }
        Ok(SpectralField { lattice: lattice.clone(), comps, reality })
    }

    /// Single-mode field `coef * e^{ik.x}` in one component, with the
    /// conjugate mode added when `reality` is set.
    pub fn single_mode(
        lattice: &Arc<Lattice>,
        ncomp: usize,
        comp: usize,
        n: &[i64],
        coef: Complex64,
        reality: bool,
    ) -> Result<Self> {
        let slot = lattice
            .slot(n)
            .ok_or_else(|| Error::Argument(format!("mode {n:?} not retained")))?;
        let mut g = SpectralField::zeros(lattice, ncomp);
        g.comps[comp][slot] += coef;
        if reality {
            g.comps[comp][lattice.neg(slot)] += coef.conj();
        }
        g.reality = reality;
        Ok(g)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn is_scalar(&self) -> bool {
        self.comps.len() == 1
    }

    pub fn reality(&self) -> bool {
        self.reality
    }

    pub fn set_reality(&mut self, reality: bool) {
        self.reality = reality;
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    /// Extract one component as a scalar field.
    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField {
            lattice: self.lattice.clone(),
            comps: vec![self.comps[c].clone()],
            reality: self.reality,
        }
    }

    /// Stack the components of several fields.
    pub fn stack(parts: &[&SpectralField]) -> Result<SpectralField> {
        let first = parts.first().ok_or_else(|| Error::Shape("nothing to stack".into()))?;
        let mut comps = Vec::new();
        let mut reality = true;
        for p in parts {
            check_same(&first.lattice, &p.lattice)?;
            comps.extend(p.comps.iter().cloned());
            reality &= p.reality;
        }
        Ok(SpectralField { lattice: first.lattice.clone(), comps, reality })
    }

    /// Split off components `range` as a new field.
    pub fn slice(&self, range: std::ops::Range<usize>) -> SpectralField {
        SpectralField {
            lattice: self.lattice.clone(),
            comps: self.comps[range].to_vec(),
            reality: self.reality,
        }
    }

    fn check_compat(&self, other: &SpectralField) -> Result<()> {
        check_same(&self.lattice, &other.lattice)?;
        if self.ncomp() != other.ncomp() {
            return Err(Error::Shape(format!(
                "{} vs {} components",
                self.ncomp(),
                other.ncomp()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: Complex64, other: &SpectralField) -> Result<SpectralField> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (c, o) in out.comps.iter_mut().zip(&other.comps) {
            for (x, y) in c.iter_mut().zip(o) {
                *x += alpha * y;
            }
        }
        out.reality = self.reality && other.reality && alpha.im == 0.0;
        Ok(out)
    }

    pub fn scale(&self, alpha: f64) -> SpectralField {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            for x in c.iter_mut() {
                *x *= alpha;
            }
        }
        out
    }

    /// Multiply every coefficient by `m(slot)`.
    pub fn map_modes(&self, m: impl Fn(usize) -> f64) -> SpectralField {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            for (f, x) in c.iter_mut().enumerate() {
                if *x != ZERO {
                    *x *= m(f);
                }
            }
        }
        out
    }

    /// Coefficient-space L2 norm, equal to the spatial L2 norm.
    pub fn l2_norm(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest coefficient modulus over all components.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flat_map(|c| c.iter()).map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Mode energy summed over components.
    pub fn mode_energy(&self, slot: usize) -> f64 {
        self.comps.iter().map(|c| c[slot].norm_sqr()).sum()
    }

    /// Largest violation of `g_{-k} = conj(g_k)`.
    pub fn reality_defect(&self) -> f64 {
        let lat = &self.lattice;
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for &f in lat.modes() {
                worst = worst.max((c[f] - c[lat.neg(f)].conj()).norm());
            }
        }
        worst
    }

    /// Replace every pair by its Hermitian-symmetric average.
    pub fn symmetrize(&mut self) {
        let lat = self.lattice.clone();
        for c in self.comps.iter_mut() {
            for &f in lat.modes() {
                let g = lat.neg(f);
                if g < f {
                    continue;
                }
                let avg = (c[f] + c[g].conj()) * 0.5;
                c[f] = avg;
                c[g] = avg.conj();
            }
        }
        self.reality = true;
    }

    /// Split into the mean and the zero-mean part.
    pub fn zero_mean_split(&self) -> (SpectralField, SpectralField) {
        let mut mean = SpectralField::zeros(&self.lattice, self.ncomp());
        let mut rest = self.clone();
        for (m, r) in mean.comps.iter_mut().zip(rest.comps.iter_mut()) {
            m[0] = r[0];
            r[0] = ZERO;
        }
        mean.reality = self.reality;
        (mean, rest)
    }

    /// Keep modes with `|k| <= m`.
    pub fn low_pass(&self, m: f64) -> SpectralField {
        let lat = self.lattice.clone();
        self.map_modes(|f| if lat.kabs(f) <= m { 1.0 } else { 0.0 })
    }

    /// Keep modes with `|k| > m`.
    pub fn high_pass(&self, m: f64) -> SpectralField {
        let lat = self.lattice.clone();
        self.map_modes(|f| if lat.kabs(f) > m { 1.0 } else { 0.0 })
    }

    /// Dot product of one wavevector with a vector field's coefficients.
    pub fn dot_wave(&self, slot: usize, w: &[f64; MAX_DIM]) -> Complex64 {
        let mut s = ZERO;
        for (h, c) in self.comps.iter().enumerate() {
            s += c[slot] * w[h];
        }
        s
    }
}

impl GridField {
    pub fn from_real(lattice: &Arc<Lattice>, comps: Vec<Vec<f64>>) -> Result<Self> {
        let comps = comps
            .into_iter()
            .map(|c| c.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            .collect();
        let mut g = Self::from_complex(lattice, comps)?;
        g.real = true;
        Ok(g)
    }

    pub fn from_complex(lattice: &Arc<Lattice>, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::Shape("grid field needs at least one component".into()));
        }
        for c in &comps {
            if c.len() != lattice.len() {
                return Err(Error::Shape(format!(
                    "grid component has {} samples, lattice has {}",
                    c.len(),
                    lattice.len()
                )));
            }
        }
        Ok(GridField { lattice: lattice.clone(), comps, real: false })
    }

    /// Sample a real function at the grid points.
    pub fn sample(
        lattice: &Arc<Lattice>,
        ncomp: usize,
        f: impl Fn(&[f64; MAX_DIM], usize) -> f64,
    ) -> GridField {
        let comps = (0..ncomp)
            .map(|c| (0..lattice.len()).map(|p| Complex64::new(f(&lattice.point(p), c), 0.0)).collect())
            .collect();
        GridField { lattice: lattice.clone(), comps, real: true }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    /// One component as a scalar grid field.
    pub fn component(&self, c: usize) -> GridField {
        GridField { lattice: self.lattice.clone(), comps: vec![self.comps[c].clone()], real: self.real }
    }

    /// Real parts of one component.
    pub fn real_part(&self, c: usize) -> Vec<f64> {
        self.comps[c].iter().map(|z| z.re).collect()
    }

    /// Largest pointwise Euclidean norm over components.
    pub fn max_norm(&self) -> f64 {
        (0..self.lattice.len())
            .map(|p| self.comps.iter().map(|c| c[p].norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Apply the multidimensional FFT in place on one component.
pub(crate) fn fft_nd(lattice: &Lattice, data: &mut [Complex64], inverse: bool) {
    let shape = lattice.full_shape();
    let strides = lattice.strides();
    let mut line = Vec::new();
    let mut scratch = Vec::new();
    for axis in 0..lattice.dim() {
        let n = shape[axis];
        let stride = strides[axis];
        let plan = lattice.plan(axis, inverse);
        scratch.resize(plan.get_inplace_scratch_len(), ZERO);
        if stride == 1 {
            for chunk in data.chunks_mut(n) {
                plan.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        line.resize(n, ZERO);
        let block = stride * n;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for i in 0..n {
                    line[i] = data[base + i * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for i in 0..n {
                    data[base + i * stride] = line[i];
                }
            }
        }
    }
}

/// Grid samples to retained Fourier coefficients.
pub fn forward_transform(grid: &GridField) -> Result<SpectralField> {
    let lat = grid.lattice.clone();
    let scale = lat.sqrt_volume() / lat.len() as f64;
    let mut comps = Vec::with_capacity(grid.ncomp());
    for c in &grid.comps {
        if c.len() != lat.len() {
            return Err(Error::Shape("grid size does not match lattice".into()));
        }
        let mut buf = c.clone();
        if grid.real {
            for z in buf.iter_mut() {
                z.im = 0.0;
            }
        }
        fft_nd(&lat, &mut buf, false);
        for (f, z) in buf.iter_mut().enumerate() {
            *z = if lat.is_retained(f) { *z * scale } else { ZERO };
        }
        comps.push(buf);
    }
    let mut out = SpectralField { lattice: lat, comps, reality: grid.real };
    if grid.real {
        out.symmetrize();
    }
    Ok(out)
}

/// Retained Fourier coefficients to grid samples.
pub fn inverse_transform(field: &SpectralField) -> GridField {
    let lat = field.lattice.clone();
    let scale = 1.0 / lat.sqrt_volume();
    let comps = field
        .comps
        .iter()
        .map(|c| {
            let mut buf = c.clone();
            fft_nd(&lat, &mut buf, true);
            for z in buf.iter_mut() {
                *z *= scale;
                if field.reality {
                    z.im = 0.0;
                }
            }
            buf
        })
        .collect();
    GridField { lattice: lat, comps, real: field.reality }
}

/// Exact Fourier multipliers for gradient, divergence and Laplacian.
pub fn spectral_derivative(g: &SpectralField, kind: DerivativeKind) -> Result<SpectralField> {
    let lat = g.lattice.clone();
    let d = lat.dim();
    match kind {
        DerivativeKind::Gradient => {
            if !g.is_scalar() {
                return Err(Error::Shape("gradient needs a scalar field".into()));
            }
            let mut out = SpectralField::zeros(&lat, d);
            for &f in lat.modes() {
                let k = lat.wavevector(f);
                for h in 0..d {
                    out.comps[h][f] = I * k[h] * g.comps[0][f];
                }
            }
            out.reality = g.reality;
            Ok(out)
        }
        DerivativeKind::Divergence => {
            if g.ncomp() != d {
                return Err(Error::Shape(format!(
                    "divergence needs {d} components, got {}",
                    g.ncomp()
                )));
            }
            let mut out = SpectralField::zeros(&lat, 1);
            for &f in lat.modes() {
                out.comps[0][f] = I * g.dot_wave(f, lat.wavevector(f));
            }
            out.reality = g.reality;
            Ok(out)
        }
        DerivativeKind::Laplacian => Ok(g.map_modes(|f| -lat.k2(f))),
    }
}

/// Partial derivative along one axis.
pub fn partial(g: &SpectralField, axis: usize) -> SpectralField {
    let lat = g.lattice.clone();
    let mut out = g.clone();
    for c in out.comps.iter_mut() {
        for &f in lat.modes() {
            c[f] *= I * lat.wavevector(f)[axis];
        }
    }
    out
}

/// Pseudospectral product truncated to the retained set. A scalar factor
/// multiplies every component of the other; equal component counts
/// multiply componentwise.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    check_same(&f.lattice, &g.lattice)?;
    let (fg, gg) = (inverse_transform(f), inverse_transform(g));
    grid_product(&fg, &gg)
}

/// Product of two grid fields followed by the forward transform.
pub fn grid_product(fg: &GridField, gg: &GridField) -> Result<SpectralField> {
    check_same(&fg.lattice, &gg.lattice)?;
    let ncomp = match (fg.ncomp(), gg.ncomp()) {
        (1, n) | (n, 1) => n,
        (a, b) if a == b => a,
        (a, b) => return Err(Error::Shape(format!("cannot multiply {a} by {b} components"))),
    };
    let pick = |g: &GridField, c: usize| if g.ncomp() == 1 { 0 } else { c };
    let comps = (0..ncomp)
        .map(|c| {
            fg.comps[pick(fg, c)]
                .iter()
                .zip(&gg.comps[pick(gg, c)])
                .map(|(a, b)| a * b)
                .collect()
        })
        .collect();
    let mut prod = GridField::from_complex(&fg.lattice, comps)?;
    prod.real = fg.real && gg.real;
    forward_transform(&prod)
}
