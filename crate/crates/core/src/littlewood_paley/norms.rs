use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::blocks::BlockDecomposition;
use crate::torus::{inverse_transform, Lattice, SpectralField};
use crate::trajectory::{TimeExponent, Trajectory};
use crate::{Error, Result};

/// Spatial integrability exponent of a block norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrability {
    Two,
    Infinity,
}

/// Summability exponent over blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Summability {
    One,
    Two,
    Infinity,
}

/// Which blocks a norm counts, by comparing `2^j` with the thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Band {
    Full,
    /// `2^j >= eta`
    High { eta: f64 },
    /// `zeta <= 2^j < eta`
    Medium { zeta: f64, eta: f64 },
    /// `2^j < zeta`, plus the mean unless underlined
    Low { zeta: f64 },
}

impl Band {
    pub fn contains(&self, j: i32) -> bool {
        let v = 2f64.powi(j);
        match *self {
            Band::Full => true,
            Band::High { eta } => v >= eta,
            Band::Medium { zeta, eta } => v >= zeta && v < eta,
            Band::Low { zeta } => v < zeta,
        }
    }

    fn keeps_mean(&self) -> bool {
        matches!(self, Band::Full | Band::Low { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    Besov { p: Integrability, r: Summability },
    /// Fourier-weighted `H^s`, mode by mode.
    Sobolev,
}

/// A fully specified spatial norm. Text form:
/// `B:s=1:p=2:r=1:band=h:eta=32`, `B:s=0:p=inf:r=inf:under`, `H:s=0.5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: NormKind,
    pub s: f64,
    pub band: Band,
    /// Drop the mean (the underlined variants).
    pub underlined: bool,
}

impl NormSpec {
    pub fn besov(s: f64, p: Integrability, r: Summability) -> Self {
        NormSpec { kind: NormKind::Besov { p, r }, s, band: Band::Full, underlined: false }
    }

    /// `B^s_{2,1}`, the workhorse of the diagnostics.
    pub fn b21(s: f64) -> Self {
        Self::besov(s, Integrability::Two, Summability::One)
    }

    pub fn sobolev(s: f64) -> Self {
        NormSpec { kind: NormKind::Sobolev, s, band: Band::Full, underlined: false }
    }

    pub fn with_band(mut self, band: Band) -> Self {
        self.band = band;
        self
    }

    pub fn high(self, eta: f64) -> Self {
        self.with_band(Band::High { eta })
    }

    pub fn medium(self, zeta: f64, eta: f64) -> Self {
        self.with_band(Band::Medium { zeta, eta })
    }

    pub fn low(self, zeta: f64) -> Self {
        self.with_band(Band::Low { zeta })
    }

    pub fn under(mut self) -> Self {
        self.underlined = true;
        self
    }

    pub fn includes_mean(&self) -> bool {
        !self.underlined && self.band.keeps_mean()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::NormSpec("regularity must be finite".into()));
        }
        match self.band {
            Band::Full => {}
            Band::High { eta } if eta > 0.0 => {}
            Band::Low { zeta } if zeta > 0.0 => {}
            Band::Medium { zeta, eta } if zeta > 0.0 && zeta < eta => {}
            b => return Err(Error::NormSpec(format!("invalid band thresholds {b:?}"))),
        }
        if self.kind == NormKind::Sobolev && self.band != Band::Full {
            return Err(Error::NormSpec("H^s norms are not banded".into()));
        }
        Ok(())
    }

    fn p(&self) -> Integrability {
        match self.kind {
            NormKind::Besov { p, .. } => p,
            NormKind::Sobolev => Integrability::Two,
        }
    }

    fn r(&self) -> Summability {
        match self.kind {
            NormKind::Besov { r, .. } => r,
            NormKind::Sobolev => Summability::Two,
        }
    }

    /// Combine a mean term and per-block values `(j, a_j)` according to
    /// the band, the weight `2^{js}` and the summability.
    fn combine(&self, mean: f64, blocks: impl Iterator<Item = (i32, f64)>) -> f64 {
        let terms = blocks
            .filter(|(j, _)| self.band.contains(*j))
            .map(|(j, a)| 2f64.powf(j as f64 * self.s) * a)
            .chain(self.includes_mean().then_some(mean));
        match self.r() {
            Summability::One => terms.sum(),
            Summability::Two => terms.map(|x| x * x).sum::<f64>().sqrt(),
            Summability::Infinity => terms.fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NormKind::Sobolev => write!(f, "H:s={}", self.s)?,
            NormKind::Besov { p, r } => {
                let p = match p {
                    Integrability::Two => "2",
                    Integrability::Infinity => "inf",
                };
                let r = match r {
                    Summability::One => "1",
                    Summability::Two => "2",
                    Summability::Infinity => "inf",
                };
                write!(f, "B:s={}:p={p}:r={r}", self.s)?;
            }
        }
        match self.band {
            Band::Full => {}
            Band::High { eta } => write!(f, ":band=h:eta={eta}")?,
            Band::Medium { zeta, eta } => write!(f, ":band=m:zeta={zeta}:eta={eta}")?,
            Band::Low { zeta } => write!(f, ":band=l:zeta={zeta}")?,
        }
        if self.underlined {
            write!(f, ":under")?;
        }
        Ok(())
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::NormSpec(format!("'{text}': {m}"));
        let mut parts = text.trim().split(':');
        let head = parts.next().unwrap_or("");
        let sobolev = match head {
            "B" => false,
            "H" => true,
            _ => return Err(bad("expected leading 'B' or 'H'")),
        };
        let (mut s, mut p, mut r) = (None, None, None);
        let (mut band, mut eta, mut zeta) = ("full".to_string(), None, None);
        let mut underlined = false;
        for part in parts {
            if part == "under" {
                underlined = true;
                continue;
            }
            let (key, val) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let num = || -> Result<f64> {
                val.parse::<f64>().map_err(|_| bad(&format!("bad number '{val}'")))
            };
            match key {
                "s" => s = Some(num()?),
                "p" => {
                    p = Some(match val {
                        "2" => Integrability::Two,
                        "inf" => Integrability::Infinity,
                        _ => return Err(bad(&format!("unsupported p = {val}"))),
                    })
                }
                "r" => {
                    r = Some(match val {
                        "1" => Summability::One,
                        "2" => Summability::Two,
                        "inf" => Summability::Infinity,
                        _ => return Err(bad(&format!("unsupported r = {val}"))),
                    })
                }
                "band" => band = val.to_string(),
                "eta" => eta = Some(num()?),
                "zeta" => zeta = Some(num()?),
                "under" => underlined = val == "1" || val == "true",
                _ => return Err(bad(&format!("unknown key '{key}'"))),
            }
        }
        let s = s.ok_or_else(|| bad("missing s"))?;
        let need = |x: Option<f64>, name: &str| x.ok_or_else(|| bad(&format!("band needs {name}")));
        let band = match band.as_str() {
            "full" => Band::Full,
            "h" => Band::High { eta: need(eta, "eta")? },
            "m" => Band::Medium { zeta: need(zeta, "zeta")?, eta: need(eta, "eta")? },
            "l" => Band::Low { zeta: need(zeta, "zeta")? },
            other => return Err(bad(&format!("unknown band '{other}'"))),
        };
        let kind = if sobolev {
            if p.is_some() || r.is_some() {
                return Err(bad("H norms take no p or r"));
            }
            NormKind::Sobolev
        } else {
            NormKind::Besov {
                p: p.unwrap_or(Integrability::Two),
                r: r.unwrap_or(Summability::One),
            }
        };
        let spec = NormSpec { kind, s, band, underlined };
        spec.validate()?;
        Ok(spec)
    }
}

/// Spatial block norms of one field: mean term and `||Delta_j g||_{L^p}`.
#[derive(Clone, Debug)]
pub struct BlockProfile {
    pub first: i32,
    pub blocks: Vec<f64>,
    pub mean: f64,
}

impl BlockProfile {
    pub fn of(dec: &BlockDecomposition, g: &SpectralField, p: Integrability) -> Self {
        let lat = g.lattice();
        let mean0 = g.mode_energy(0).sqrt();
        let (mean, blocks) = match p {
            Integrability::Two => (mean0, dec.blocks().map(|j| dec.block_l2(g, j)).collect()),
            Integrability::Infinity => (
                mean0 / lat.sqrt_volume(),
                dec.blocks()
                    .map(|j| {
                        if dec.weights(j).is_empty() {
                            0.0
                        } else {
                            inverse_transform(&dec.block(g, j)).max_norm()
                        }
                    })
                    .collect(),
            ),
        };
        BlockProfile { first: dec.first(), blocks, mean }
    }

    fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.blocks.iter().enumerate().map(move |(i, &a)| (self.first + i as i32, a))
    }
}

fn sobolev_weight(lat: &Lattice, f: usize, s: f64) -> f64 {
    if f == 0 {
        1.0
    } else {
        lat.k2(f).powf(s)
    }
}

fn sobolev_norm(g: &SpectralField, spec: &NormSpec) -> f64 {
    let lat = g.lattice();
    lat.modes()
        .iter()
        .filter(|&&f| f != 0 || spec.includes_mean())
        .map(|&f| sobolev_weight(lat, f, spec.s) * g.mode_energy(f))
        .sum::<f64>()
        .sqrt()
}

/// Spatial norm of a field.
pub fn norm(g: &SpectralField, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    if spec.kind == NormKind::Sobolev {
        return Ok(sobolev_norm(g, spec));
    }
    let dec = BlockDecomposition::new(g.lattice());
    let prof = BlockProfile::of(&dec, g, spec.p());
    Ok(spec.combine(prof.mean, prof.iter()))
}

/// Precomputed block profiles along a trajectory, from which every banded
/// time norm can be read off.
pub struct ProfiledTrajectory {
    times: Vec<f64>,
    lattice: Arc<Lattice>,
    profiles: Vec<BlockProfile>,
    energies: Vec<Vec<f64>>,
    p: Integrability,
}

impl ProfiledTrajectory {
    pub fn new(traj: &Trajectory<SpectralField>, p: Integrability) -> Result<Self> {
        let lattice = traj.states()[0].lattice().clone();
        let dec = BlockDecomposition::new(&lattice);
        let mut profiles = Vec::with_capacity(traj.len());
        let mut energies = Vec::with_capacity(traj.len());
        for g in traj.states() {
            if !g.lattice().same_as(&lattice) {
                return Err(Error::LatticeMismatch("trajectory mixes lattices".into()));
            }
            profiles.push(BlockProfile::of(&dec, g, p));
            if p == Integrability::Two {
                energies.push(lattice.modes().iter().map(|&f| g.mode_energy(f)).collect());
            }
        }
        Ok(ProfiledTrajectory { times: traj.times().to_vec(), lattice, profiles, energies, p })
    }

    fn check(&self, spec: &NormSpec) -> Result<()> {
        spec.validate()?;
        if spec.p() != self.p {
            return Err(Error::NormSpec("profile built for a different p".into()));
        }
        Ok(())
    }

    /// `L^q_T(X)`: the time norm of the spatial norm.
    pub fn plain(&self, q: TimeExponent, spec: &NormSpec) -> Result<f64> {
        self.check(spec)?;
        let vals: Vec<f64> = if spec.kind == NormKind::Sobolev {
            self.energies.iter().map(|e| self.sobolev_from(e, spec)).collect()
        } else {
            self.profiles.iter().map(|p| spec.combine(p.mean, p.iter())).collect()
        };
        Ok(q.norm(&self.times, &vals))
    }

    /// Chemin-Lerner `L~^q_T(X)`: time norm inside the block sum.
    pub fn tilde(&self, q: TimeExponent, spec: &NormSpec) -> Result<f64> {
        self.check(spec)?;
        if spec.kind == NormKind::Sobolev {
            let modes = self.lattice.modes();
            let mut total = 0.0;
            for (i, &f) in modes.iter().enumerate() {
                if f == 0 && !spec.includes_mean() {
                    continue;
                }
                let series: Vec<f64> = self.energies.iter().map(|e| e[i].sqrt()).collect();
                let t = q.norm(&self.times, &series);
                total += sobolev_weight(&self.lattice, f, spec.s) * t * t;
            }
            return Ok(total.sqrt());
        }
        let first = self.profiles[0].first;
        let nblocks = self.profiles[0].blocks.len();
        let mean_series: Vec<f64> = self.profiles.iter().map(|p| p.mean).collect();
        let blocks = (0..nblocks).map(|b| {
            let series: Vec<f64> = self.profiles.iter().map(|p| p.blocks[b]).collect();
            (first + b as i32, q.norm(&self.times, &series))
        });
        Ok(spec.combine(q.norm(&self.times, &mean_series), blocks))
    }

    fn sobolev_from(&self, energies: &[f64], spec: &NormSpec) -> f64 {
        self.lattice
            .modes()
            .iter()
            .zip(energies)
            .filter(|(&f, _)| f != 0 || spec.includes_mean())
            .map(|(&f, e)| sobolev_weight(&self.lattice, f, spec.s) * e)
            .sum::<f64>()
            .sqrt()
    }
}

fn integrability(spec: &NormSpec) -> Integrability {
    spec.p()
}

/// Chemin-Lerner norm `L~^q_T(X)` of a sampled trajectory.
pub fn chemin_lerner_norm(
    traj: &Trajectory<SpectralField>,
    q: TimeExponent,
    spec: &NormSpec,
) -> Result<f64> {
    ProfiledTrajectory::new(traj, integrability(spec))?.tilde(q, spec)
}

/// Plain time norm `L^q_T(X)` of a sampled trajectory.
pub fn time_norm(traj: &Trajectory<SpectralField>, q: TimeExponent, spec: &NormSpec) -> Result<f64> {
    ProfiledTrajectory::new(traj, integrability(spec))?.plain(q, spec)
}
