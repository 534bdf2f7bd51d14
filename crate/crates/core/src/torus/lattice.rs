use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// A positive rational box period `b`; the box side is `2*pi*b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Period(Ratio<i64>);

impl Period {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 || num == 0 || (num < 0) != (den < 0) {
            return Err(Error::Config(format!("period {num}/{den} must be positive")));
        }
        Ok(Period(Ratio::new(num.abs(), den.abs())))
    }

    pub fn integer(n: i64) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn value(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("period '{s}' is not a rational p/q"));
        match s.trim().split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                Period::new(p, q)
            }
            None => Period::integer(s.trim().parse().map_err(|_| bad())?),
        }
    }
}

impl Serialize for Period {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Period::integer(n).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Float(x) => Err(serde::de::Error::custom(format!(
                "period {x} must be given as an integer or a string \"p/q\""
            ))),
        }
    }
}

/// User-facing description of a lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub periods: Vec<Period>,
    pub resolution: Vec<usize>,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

fn default_dealias() -> f64 {
    2.0 / 3.0
}

impl LatticeSpec {
    /// Unit periods in every direction with the standard two-thirds rule.
    pub fn unit(dim: usize, n: usize) -> Self {
        LatticeSpec {
            periods: vec![Period(Ratio::from_integer(1)); dim],
            resolution: vec![n; dim],
            dealias_fraction: default_dealias(),
        }
    }

    pub fn build(&self) -> Result<Arc<Lattice>> {
        Lattice::new(self.clone()).map(Arc::new)
    }
}

/// Frozen Fourier lattice: wavevectors, dealiasing cutoff and FFT plans.
///
/// Coefficients are `g_k = |T|^{-1/2} * integral of g e^{-ik.x}` with
/// `k_h = n_h / b_h`. Fields are stored on the full FFT grid in row-major
/// order; only modes with `|n_h| <= cutoff_h` in every direction are kept.
pub struct Lattice {
    spec: LatticeSpec,
    dim: usize,
    shape: [usize; MAX_DIM],
    strides: [usize; MAX_DIM],
    len: usize,
    cutoff: [i64; MAX_DIM],
    volume: f64,
    index: Vec<[i64; MAX_DIM]>,
    wave: Vec<[f64; MAX_DIM]>,
    k2: Vec<f64>,
    exact: Vec<u64>,
    exact_scale: u64,
    retained: Vec<bool>,
    modes: Vec<usize>,
    neg: Vec<usize>,
    kmax: f64,
    plans: Vec<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("spec", &self.spec)
            .field("cutoff", &&self.cutoff[..self.dim])
            .finish()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Lattice {
    pub fn new(spec: LatticeSpec) -> Result<Self> {
        let dim = spec.periods.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Config(format!("dimension {dim} not in 1..={MAX_DIM}")));
        }
        if spec.resolution.len() != dim {
            return Err(Error::Config(format!(
                "{} resolutions for {dim} periods",
                spec.resolution.len()
            )));
        }
        let frac = spec.dealias_fraction;
        if !(frac > 0.0 && frac <= 2.0 / 3.0 + 1e-12) {
            return Err(Error::Config(format!(
                "dealias fraction {frac} must lie in (0, 2/3]"
            )));
        }
        let mut shape = [1usize; MAX_DIM];
        let mut cutoff = [0i64; MAX_DIM];
        for h in 0..dim {
            let n = spec.resolution[h];
            if n < 4 || n % 2 != 0 {
                return Err(Error::Config(format!("resolution {n} must be even and >= 4")));
            }
            shape[h] = n;
            // Largest K with K <= frac*N/2 and 3K < N, so quadratic products
            // of retained modes never alias back onto retained modes.
            let mut k = (frac * n as f64 / 2.0 + 1e-9).floor() as i64;
            while 3 * k >= n as i64 {
                k -= 1;
            }
            if k < 1 {
                return Err(Error::Config(format!("resolution {n} keeps no modes")));
            }
            cutoff[h] = k;
        }
        let strides = [shape[1] * shape[2], shape[2], 1];
        let len = shape.iter().product();

        // Integer representative of |k|^2: with b_h = p_h/q_h we have
        // |k|^2 = sum n_h^2 q_h^2 / p_h^2 = exact / scale, scale = lcm p_h^2.
        let mut scale: i64 = 1;
        for p in &spec.periods {
            scale = scale.lcm(&(p.numer() * p.numer()));
        }
        let weights: Vec<i64> = spec
            .periods
            .iter()
            .map(|p| p.denom() * p.denom() * (scale / (p.numer() * p.numer())))
            .collect();

        let mut index = Vec::with_capacity(len);
        let mut wave = Vec::with_capacity(len);
        let mut k2: Vec<f64> = Vec::with_capacity(len);
        let mut exact = Vec::with_capacity(len);
        let mut retained = Vec::with_capacity(len);
        for flat in 0..len {
            let mut n = [0i64; MAX_DIM];
            let mut k = [0f64; MAX_DIM];
            let mut keep = true;
            let mut e: i64 = 0;
            for h in 0..dim {
                let i = (flat / strides[h]) % shape[h];
                let nh = if i <= shape[h] / 2 { i as i64 } else { i as i64 - shape[h] as i64 };
                n[h] = nh;
                k[h] = nh as f64 * spec.periods[h].denom() as f64 / spec.periods[h].numer() as f64;
                keep &= nh.abs() <= cutoff[h];
                e += nh * nh * weights[h];
            }
            index.push(n);
            k2.push(k.iter().map(|x| x * x).sum());
            wave.push(k);
            exact.push(e as u64);
            retained.push(keep);
        }
        let modes: Vec<usize> = (0..len).filter(|&f| retained[f]).collect();
        let mut neg = vec![0usize; len];
        for flat in 0..len {
            let mut off = 0;
            for h in 0..dim {
                let i = (flat / strides[h]) % shape[h];
                off += ((shape[h] - i) % shape[h]) * strides[h];
            }
            neg[flat] = off;
        }
        let kmax = modes.iter().map(|&f| k2[f].sqrt()).fold(0.0, f64::max);
        let volume = spec
            .periods
            .iter()
            .map(|p| 2.0 * std::f64::consts::PI * p.value())
            .product();
        let mut planner = FftPlanner::new();
        let plans = (0..dim)
            .map(|h| (planner.plan_fft_forward(shape[h]), planner.plan_fft_inverse(shape[h])))
            .collect();
        Ok(Lattice {
            spec,
            dim,
            shape,
            strides,
            len,
            cutoff,
            volume,
            index,
            wave,
            k2,
            exact,
            exact_scale: scale as u64,
            retained,
            modes,
            neg,
            kmax,
            plans,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of grid points (equal to the number of stored coefficients).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape[..self.dim]
    }

    pub(crate) fn full_shape(&self) -> [usize; MAX_DIM] {
        self.shape
    }

    pub(crate) fn strides(&self) -> [usize; MAX_DIM] {
        self.strides
    }

    pub fn cutoff(&self) -> &[i64] {
        &self.cutoff[..self.dim]
    }

    /// Box volume `|T| = prod 2*pi*b_h`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn sqrt_volume(&self) -> f64 {
        self.volume.sqrt()
    }

    /// Integer wave index `n` of a storage slot (trailing entries are 0).
    pub fn index(&self, flat: usize) -> &[i64; MAX_DIM] {
        &self.index[flat]
    }

    /// Physical wavevector `k` of a storage slot (trailing entries are 0).
    pub fn wavevector(&self, flat: usize) -> &[f64; MAX_DIM] {
        &self.wave[flat]
    }

    pub fn k2(&self, flat: usize) -> f64 {
        self.k2[flat]
    }

    pub fn kabs(&self, flat: usize) -> f64 {
        self.k2[flat].sqrt()
    }

    /// `|k|^2 * exact_scale()` as an integer.
    pub fn exact_norm2(&self, flat: usize) -> u64 {
        self.exact[flat]
    }

    /// `|k|^2 * exact_scale()` for any integer index, retained or not.
    pub fn exact_norm2_of(&self, n: &[i64]) -> u64 {
        let scale = self.exact_scale as i64;
        n.iter()
            .zip(&self.spec.periods)
            .map(|(&nh, p)| (nh * nh * p.denom() * p.denom() * (scale / (p.numer() * p.numer()))) as u64)
            .sum()
    }

    pub fn exact_scale(&self) -> u64 {
        self.exact_scale
    }

    pub fn is_retained(&self, flat: usize) -> bool {
        self.retained[flat]
    }

    /// Retained storage slots in storage order; slot 0 is the mean.
    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    /// Storage slot of `-n`.
    pub fn neg(&self, flat: usize) -> usize {
        self.neg[flat]
    }

    /// Largest retained `|k|`.
    pub fn kmax(&self) -> f64 {
        self.kmax
    }

    /// Smallest grid spacing.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dim)
            .map(|h| 2.0 * std::f64::consts::PI * self.spec.periods[h].value() / self.shape[h] as f64)
            .fold(f64::INFINITY, f64::min)
    }

    /// Storage slot of the integer index `n`, if it is retained.
    pub fn slot(&self, n: &[i64]) -> Option<usize> {
        if n.len() != self.dim {
            return None;
        }
        let mut off = 0;
        for h in 0..self.dim {
            if n[h].abs() > self.cutoff[h] {
                return None;
            }
            let i = n[h].rem_euclid(self.shape[h] as i64) as usize;
            off += i * self.strides[h];
        }
        Some(off)
    }

    /// Slot of `n1 + n2` if retained.
    pub fn sum_slot(&self, a: usize, b: usize) -> Option<usize> {
        let mut n = [0i64; MAX_DIM];
        for h in 0..self.dim {
            n[h] = self.index[a][h] + self.index[b][h];
        }
        self.slot(&n[..self.dim])
    }

    /// Slot of `n1 - n2` if retained.
    pub fn diff_slot(&self, a: usize, b: usize) -> Option<usize> {
        let mut n = [0i64; MAX_DIM];
        for h in 0..self.dim {
            n[h] = self.index[a][h] - self.index[b][h];
        }
        self.slot(&n[..self.dim])
    }

    /// Physical coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let mut x = [0f64; MAX_DIM];
        for h in 0..self.dim {
            let j = (flat / self.strides[h]) % self.shape[h];
            x[h] = 2.0 * std::f64::consts::PI * self.spec.periods[h].value() * j as f64
                / self.shape[h] as f64;
        }
        x
    }

    pub(crate) fn plan(&self, axis: usize, inverse: bool) -> &Arc<dyn Fft<f64>> {
        if inverse {
            &self.plans[axis].1
        } else {
            &self.plans[axis].0
        }
    }

    /// Whether two lattices describe the same frozen grid.
    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}
