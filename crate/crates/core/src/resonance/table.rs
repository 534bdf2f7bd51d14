use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::exact::{roots_sum_to_zero, SignedRoot};
use crate::operators::{slot_sign, BRANCHES};
use crate::torus::{Lattice, LatticeSpec};
use crate::{Error, Result};

/// Resonant velocity-acoustic triple: `alpha sg(k)|k| = gamma sg(m)|m|`,
/// `k + l = m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VelocityTriple {
    pub m: usize,
    pub gamma: i8,
    pub k: usize,
    pub alpha: i8,
    pub l: usize,
}

/// Resonant acoustic triple:
/// `alpha sg(k)|k| + beta sg(l)|l| = gamma sg(m)|m|`, `k + l = m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AcousticTriple {
    pub m: usize,
    pub gamma: i8,
    pub k: usize,
    pub alpha: i8,
    pub l: usize,
    pub beta: i8,
}

/// Signed root `sign * sqrt(|k|^2 * scale)` of a slot.
pub(crate) fn signed_root(lat: &Lattice, slot: usize, branch: i8) -> SignedRoot {
    SignedRoot::new(branch * slot_sign(lat, slot), lat.exact_norm2(slot))
}

/// Exact resonance sets over retained modes with `|k|, |l| <= cutoff`.
#[derive(Clone, Debug)]
pub struct ResonanceTable {
    lattice: Arc<Lattice>,
    cutoff: f64,
    velocity: Vec<VelocityTriple>,
    acoustic: Vec<AcousticTriple>,
}

fn ball(lat: &Lattice, cutoff: f64) -> Vec<usize> {
    lat.modes().iter().copied().filter(|&f| lat.k2(f) <= cutoff * cutoff * (1.0 + 1e-12)).collect()
}

/// Classify every triple over the retained modes with `|k|, |l| <= cutoff`
/// and keep the resonant ones.
pub fn enumerate_resonance_sets(lattice: &Arc<Lattice>, cutoff: f64) -> Result<ResonanceTable> {
    if !(cutoff > 0.0) {
        return Err(Error::Argument(format!("cutoff {cutoff} must be positive")));
    }
    let lat = lattice.as_ref();
    let pts = ball(lat, cutoff);
    let mut velocity = Vec::new();
    let mut acoustic = Vec::new();
    for &k in pts.iter().filter(|&&k| k != 0) {
        for &l in &pts {
            let Some(m) = lat.sum_slot(k, l) else { continue };
            if m == 0 {
                continue;
            }
            let (nk, nm) = (lat.exact_norm2(k), lat.exact_norm2(m));
            let (sk, sm) = (slot_sign(lat, k), slot_sign(lat, m));
            if nk == nm {
                for gamma in BRANCHES {
                    velocity.push(VelocityTriple { m, gamma, k, alpha: gamma * sm * sk, l });
                }
            }
            if l == 0 {
                continue;
            }
            for alpha in BRANCHES {
                for beta in BRANCHES {
                    for gamma in BRANCHES {
                        let terms = [
                            signed_root(lat, k, alpha),
                            signed_root(lat, l, beta),
                            signed_root(lat, m, -gamma),
                        ];
                        if roots_sum_to_zero(&terms)? {
                            acoustic.push(AcousticTriple { m, gamma, k, alpha, l, beta });
                        }
                    }
                }
            }
        }
    }
    Ok(ResonanceTable { lattice: lattice.clone(), cutoff, velocity, acoustic })
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    schema: u32,
    lattice: LatticeSpec,
    cutoff: f64,
    /// `[m, gamma, k, alpha, l]` with wave indices as integer vectors.
    velocity: Vec<(Vec<i64>, i8, Vec<i64>, i8, Vec<i64>)>,
    /// `[m, gamma, k, alpha, l, beta]`.
    acoustic: Vec<(Vec<i64>, i8, Vec<i64>, i8, Vec<i64>, i8)>,
}

const TABLE_SCHEMA: u32 = 1;

impl ResonanceTable {
    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn velocity(&self) -> &[VelocityTriple] {
        &self.velocity
    }

    pub fn acoustic(&self) -> &[AcousticTriple] {
        &self.acoustic
    }

    fn idx(&self, slot: usize) -> Vec<i64> {
        self.lattice.index(slot)[..self.lattice.dim()].to_vec()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = TableFile {
            schema: TABLE_SCHEMA,
            lattice: self.lattice.spec().clone(),
            cutoff: self.cutoff,
            velocity: self
                .velocity
                .iter()
                .map(|t| (self.idx(t.m), t.gamma, self.idx(t.k), t.alpha, self.idx(t.l)))
                .collect(),
            acoustic: self
                .acoustic
                .iter()
                .map(|t| (self.idx(t.m), t.gamma, self.idx(t.k), t.alpha, self.idx(t.l), t.beta))
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(lattice: &Arc<Lattice>, text: &str) -> Result<ResonanceTable> {
        let file: TableFile = serde_json::from_str(text)?;
        if file.schema != TABLE_SCHEMA {
            return Err(Error::Format(format!("table schema {} unsupported", file.schema)));
        }
        if &file.lattice != lattice.spec() {
            return Err(Error::LatticeMismatch("cached table built for another lattice".into()));
        }
        let slot = |n: &Vec<i64>| {
            lattice.slot(n).ok_or_else(|| Error::Format(format!("mode {n:?} not on lattice")))
        };
        let velocity = file
            .velocity
            .iter()
            .map(|(m, g, k, a, l)| Ok(VelocityTriple { m: slot(m)?, gamma: *g, k: slot(k)?, alpha: *a, l: slot(l)? }))
            .collect::<Result<_>>()?;
        let acoustic = file
            .acoustic
            .iter()
            .map(|(m, g, k, a, l, b)| {
                Ok(AcousticTriple { m: slot(m)?, gamma: *g, k: slot(k)?, alpha: *a, l: slot(l)?, beta: *b })
            })
            .collect::<Result<_>>()?;
        Ok(ResonanceTable { lattice: lattice.clone(), cutoff: file.cutoff, velocity, acoustic })
    }

    /// Cache file name for a lattice and cutoff.
    pub fn cache_path(dir: &Path, lattice: &Lattice, cutoff: f64) -> PathBuf {
        let mut h = DefaultHasher::new();
        serde_json::to_string(lattice.spec()).unwrap_or_default().hash(&mut h);
        cutoff.to_bits().hash(&mut h);
        dir.join(format!("resonances-{:016x}.json", h.finish()))
    }

    /// Load the cached table or build and store it.
    pub fn load_or_build(dir: &Path, lattice: &Arc<Lattice>, cutoff: f64) -> Result<ResonanceTable> {
        let path = Self::cache_path(dir, lattice, cutoff);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(t) = Self::from_json(lattice, &text) {
                if t.cutoff == cutoff {
                    return Ok(t);
                }
            }
        }
        let table = enumerate_resonance_sets(lattice, cutoff)?;
        std::fs::create_dir_all(dir)?;
        std::fs::write(&path, table.to_json()?)?;
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_triple_is_listed() {
        let lat = LatticeSpec::unit(2, 16).build().unwrap();
        let t = enumerate_resonance_sets(&lat, 3.0).unwrap();
        let (k, m) = (lat.slot(&[1, 0]).unwrap(), lat.slot(&[2, 0]).unwrap());
        assert!(t
            .acoustic()
            .iter()
            .any(|x| x.k == k && x.l == k && x.m == m && x.alpha == 1 && x.beta == 1 && x.gamma == 1));
        for x in t.acoustic() {
            assert!(x.alpha == x.gamma && x.beta == x.gamma, "{x:?}");
        }
        let back = ResonanceTable::from_json(&lat, &t.to_json().unwrap()).unwrap();
        assert_eq!(back.velocity(), t.velocity());
        assert_eq!(back.acoustic(), t.acoustic());
    }
}
