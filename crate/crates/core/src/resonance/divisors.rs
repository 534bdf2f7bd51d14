use serde::{Deserialize, Serialize};

use super::exact::{resonance_test, Resonance, SignedRoot};
use crate::operators::sg;
use crate::torus::{Lattice, MAX_DIM};
use crate::{Error, Result};

/// A non-resonant triple attaining a smallest divisor. Modes are integer
/// indices (`k_h = n_h / b_h`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: Vec<i64>,
    pub l: Vec<i64>,
    pub m: Vec<i64>,
    pub alpha: i8,
    /// Absent for velocity-acoustic triples.
    pub beta: Option<i8>,
    pub gamma: i8,
    pub divisor: f64,
}

/// Largest reciprocal frequency mismatch among non-resonant triples with
/// `|k|, |l| <= M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmallDivisorReport {
    pub cutoff: f64,
    /// Velocity-acoustic triples, `1 / |alpha sg(k)|k| - gamma sg(m)|m||`.
    pub velocity: f64,
    /// Acoustic triples, `1 / |alpha sg(k)|k| + beta sg(l)|l| - gamma sg(m)|m||`.
    pub acoustic: f64,
    pub velocity_witness: Option<Witness>,
    pub acoustic_witness: Option<Witness>,
}

impl SmallDivisorReport {
    /// Corrector growth constant
    /// `max{M, M^{(d/2+S-2t+1)/2}, M^{d/2+S-1}, (C1 + C2) M^{2+2t}}`
    /// for forcing regularity `S` and loss `t`.
    pub fn growth_constant(&self, dim: usize, forcing_loss: f64, theta: f64) -> f64 {
        let m = self.cutoff;
        let h = dim as f64 / 2.0;
        [
            m,
            m.powf((h + forcing_loss - 2.0 * theta + 1.0) / 2.0),
            m.powf(h + forcing_loss - 1.0),
            (self.velocity + self.acoustic) * m.powf(2.0 + 2.0 * theta),
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// All integer indices with `|k| <= radius` on the lattice periods, not
/// limited to the grid.
fn ball(lat: &Lattice, radius: f64) -> Vec<[i64; MAX_DIM]> {
    let d = lat.dim();
    let r2 = (radius * radius * lat.exact_scale() as f64 * (1.0 + 1e-12)).floor() as u64;
    let bound: Vec<i64> = lat.spec().periods.iter().map(|p| (radius * p.value()).floor() as i64).collect();
    let mut out = Vec::new();
    let mut n = [0i64; MAX_DIM];
    fn rec(h: usize, d: usize, bound: &[i64], n: &mut [i64; MAX_DIM], lat: &Lattice, r2: u64, out: &mut Vec<[i64; MAX_DIM]>) {
        if h == d {
            if lat.exact_norm2_of(&n[..d]) <= r2 {
                out.push(*n);
            }
            return;
        }
        for x in -bound[h]..=bound[h] {
            n[h] = x;
            rec(h + 1, d, bound, n, lat, r2, out);
        }
        n[h] = 0;
    }
    rec(0, d, &bound, &mut n, lat, r2, &mut out);
    out
}

struct Best {
    divisor: f64,
    witness: Option<Witness>,
}

impl Best {
    fn new() -> Self {
        Best { divisor: f64::INFINITY, witness: None }
    }

    fn offer(&mut self, divisor: f64, make: impl FnOnce() -> Witness) {
        if divisor < self.divisor {
            self.divisor = divisor;
            self.witness = Some(make());
        }
    }

    fn reciprocal(&self) -> f64 {
        if self.divisor.is_finite() {
            1.0 / self.divisor
        } else {
            0.0
        }
    }
}

/// Small-divisor constants over `|k|, |l| <= M` (hence `|m| <= 2M`).
/// The velocity index `l` may vanish; acoustic indices never do.
pub fn small_divisors(lat: &Lattice, cutoff: f64) -> Result<SmallDivisorReport> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::Argument(format!("cutoff {cutoff} must be positive")));
    }
    let d = lat.dim();
    let scale = lat.exact_scale();
    let pts = ball(lat, cutoff);
    let mut vel = Best::new();
    let mut aco = Best::new();
    for k in &pts {
        let Ok(sk) = sg(&k[..d]) else { continue };
        let nk = lat.exact_norm2_of(&k[..d]);
        for l in &pts {
            let mut m = [0i64; MAX_DIM];
            for h in 0..d {
                m[h] = k[h] + l[h];
            }
            let Ok(sm) = sg(&m[..d]) else { continue };
            let nm = lat.exact_norm2_of(&m[..d]);
            let sl = sg(&l[..d]).ok();
            let nl = lat.exact_norm2_of(&l[..d]);
            for alpha in [-1i8, 1] {
                for gamma in [-1i8, 1] {
                    let rhs = SignedRoot::new(gamma * sm, nm);
                    if let Resonance::NonResonant { divisor } =
                        resonance_test(&[SignedRoot::new(alpha * sk, nk)], rhs, scale)?
                    {
                        vel.offer(divisor, || witness(d, k, l, &m, alpha, None, gamma, divisor));
                    }
                    let Some(sl) = sl else { continue };
                    for beta in [-1i8, 1] {
                        let lhs = [SignedRoot::new(alpha * sk, nk), SignedRoot::new(beta * sl, nl)];
                        if let Resonance::NonResonant { divisor } = resonance_test(&lhs, rhs, scale)? {
                            aco.offer(divisor, || witness(d, k, l, &m, alpha, Some(beta), gamma, divisor));
                        }
                    }
                }
            }
        }
    }
    Ok(SmallDivisorReport {
        cutoff,
        velocity: vel.reciprocal(),
        acoustic: aco.reciprocal(),
        velocity_witness: vel.witness,
        acoustic_witness: aco.witness,
    })
}

#[allow(clippy::too_many_arguments)]
fn witness(
    d: usize,
    k: &[i64; MAX_DIM],
    l: &[i64; MAX_DIM],
    m: &[i64; MAX_DIM],
    alpha: i8,
    beta: Option<i8>,
    gamma: i8,
    divisor: f64,
) -> Witness {
    Witness { k: k[..d].to_vec(), l: l[..d].to_vec(), m: m[..d].to_vec(), alpha, beta, gamma, divisor }
}
