//! Binary snapshots of solver states.
//!
//! Layout: the magic bytes `LMCK`, a little-endian `u32` header length, a
//! JSON header ([`CheckpointHeader`]), then the coefficient table: for each
//! component, every storage slot of the lattice in row-major order as two
//! little-endian IEEE-754 doubles (real, imaginary).

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::torus::{Lattice, LatticeSpec, SpectralField};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"LMCK";
pub const CHECKPOINT_VERSION: u32 = 1;

/// What the components hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Density then velocity, `d + 1` components.
    Compressible,
    /// Divergence-free velocity, `d` components.
    Incompressible,
    /// Acoustic coefficients on the `-` and `+` branches.
    Acoustic,
    /// Any other field.
    Field,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub version: u32,
    pub lattice: LatticeSpec,
    pub kind: StateKind,
    pub time: f64,
    /// Grid step index the state belongs to, for restarts.
    pub step: usize,
    pub ncomp: usize,
    pub reality: bool,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub field: SpectralField,
}

impl Checkpoint {
    pub fn new(kind: StateKind, time: f64, step: usize, field: SpectralField) -> Self {
        let header = CheckpointHeader {
            version: CHECKPOINT_VERSION,
            lattice: field.lattice().spec().clone(),
            kind,
            time,
            step,
            ncomp: field.ncomp(),
            reality: field.reality(),
            eps: None,
            seed: None,
        };
        Checkpoint { header, field }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let head = serde_json::to_vec(&self.header)?;
        let len = u32::try_from(head.len()).map_err(|_| Error::Format("header too long".into()))?;
        let mut out = Vec::with_capacity(8 + head.len() + 16 * self.field.ncomp() * self.field.lattice().len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(&head);
        for comp in self.field.components() {
            for z in comp {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        Ok(out)
    }

    /// Decode a snapshot, building its lattice. Pass `lattice` to reuse an
    /// existing one; it must match the header.
    pub fn from_bytes(bytes: &[u8], lattice: Option<&Arc<Lattice>>) -> Result<Self> {
        let bad = |m: &str| Error::Format(format!("checkpoint: {m}"));
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(bad("missing magic bytes"));
        }
        let len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let head = bytes.get(8..8 + len).ok_or_else(|| bad("truncated header"))?;
        let header: CheckpointHeader = serde_json::from_slice(head)?;
        if header.version != CHECKPOINT_VERSION {
            return Err(bad(&format!("unsupported version {}", header.version)));
        }
        let lat = match lattice {
            Some(l) if *l.spec() == header.lattice => l.clone(),
            Some(_) => return Err(Error::LatticeMismatch("checkpoint written on another lattice".into())),
            None => header.lattice.build()?,
        };
        let body = &bytes[8 + len..];
        let n = lat.len();
        if body.len() != 16 * n * header.ncomp {
            return Err(bad(&format!("expected {} table bytes, found {}", 16 * n * header.ncomp, body.len())));
        }
        let f64_at = |i: usize| f64::from_le_bytes(body[8 * i..8 * i + 8].try_into().unwrap());
        let comps = (0..header.ncomp)
            .map(|c| (0..n).map(|s| Complex64::new(f64_at(2 * (c * n + s)), f64_at(2 * (c * n + s) + 1))).collect())
            .collect();
        let field = SpectralField::from_components(&lat, comps, header.reality)?;
        Ok(Checkpoint { header, field })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes()?)?;
        Ok(())
    }

    pub fn read(path: &Path, lattice: Option<&Arc<Lattice>>) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Checkpoint::from_bytes(&bytes, lattice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bytes_round_trip_exactly() {
        let lat = crate::torus::LatticeSpec::unit(2, 8).build().unwrap();
        let mut g = SpectralField::zeros(&lat, 2);
        let f = lat.slot(&[1, -2]).unwrap();
        g.comp_mut(1)[f] = Complex64::new(0.1, -3e-300);
        g.set_reality(false);
        let ck = Checkpoint::new(StateKind::Field, 0.25, 3, g);
        let back = Checkpoint::from_bytes(&ck.to_bytes().unwrap(), Some(&lat)).unwrap();
        assert_eq!(back.header, ck.header);
        assert_eq!(back.field.comp(1)[f], Complex64::new(0.1, -3e-300));
        let mut broken = ck.to_bytes().unwrap();
        broken.pop();
        assert!(Checkpoint::from_bytes(&broken, None).is_err());
    }
}
