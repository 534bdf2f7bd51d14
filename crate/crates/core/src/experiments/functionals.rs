use std::collections::BTreeMap;

use crate::littlewood_paley::{BlockDecomposition, Integrability, NormSpec, ProfiledTrajectory};
use crate::operators::AcousticCoeffs;
use crate::solvers::CompressibleState;
use crate::torus::{Lattice, SpectralField};
use crate::trajectory::{TimeExponent, Trajectory};
use crate::{Error, Result};

/// Names of every reported functional, in CSV column order.
pub const FUNCTIONAL_NAMES: [&str; 11] = [
    "D", "P", "Pu_diff", "V_diff", "W_scaled", "W_theta", "X", "Y", "Z_theta", "eps_a", "tail",
];

/// Band thresholds and exponents shared by all functionals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalParams {
    pub eps: f64,
    pub zeta: f64,
    pub eta0: f64,
    pub theta: f64,
}

impl FunctionalParams {
    fn eta(&self) -> f64 {
        self.eta0 / self.eps
    }
}

/// The compressible run split into the pieces the functionals read, all
/// on one time grid.
pub struct FlowSamples {
    pub density: Trajectory<SpectralField>,
    pub potential: Trajectory<SpectralField>,
    pub solenoidal: Trajectory<SpectralField>,
    /// `(a, Qu)` stacked.
    pub acoustic: Trajectory<SpectralField>,
    /// `V^eps` as the state it represents.
    pub filtered: Trajectory<SpectralField>,
    /// Largest share of the norm carried by the outermost retained shell.
    pub tail: f64,
}

impl FlowSamples {
    /// `traj` holds the states at their own solver times; `times` is the
    /// shared diagnostic grid, one entry per state.
    pub fn new(traj: &Trajectory<CompressibleState>, times: &[f64], eps: f64) -> Result<Self> {
        if times.len() != traj.len() {
            return Err(Error::Shape("diagnostic grid does not match the trajectory".into()));
        }
        let mut parts: [Vec<SpectralField>; 5] = Default::default();
        let mut tail: f64 = 0.0;
        for (t, y) in traj.times().iter().zip(traj.states()) {
            let qu = y.potential()?;
            parts[0].push(y.density.clone());
            parts[1].push(qu.clone());
            parts[2].push(y.solenoidal()?);
            parts[3].push(SpectralField::stack(&[&y.density, &qu])?);
            parts[4].push(y.filtered(*t, eps)?.to_state());
            tail = tail.max(shell_share(&y.stacked()));
        }
        let [d, q, p, a, f] = parts;
        let mk = |s: Vec<SpectralField>| Trajectory::new(times.to_vec(), s);
        Ok(FlowSamples {
            density: mk(d)?,
            potential: mk(q)?,
            solenoidal: mk(p)?,
            acoustic: mk(a)?,
            filtered: mk(f)?,
            tail,
        })
    }
}

/// Solutions of the two limit systems on the diagnostic grid.
pub struct ReferenceSamples {
    pub velocity: Trajectory<SpectralField>,
    /// `V` as the state it represents.
    pub acoustic: Trajectory<SpectralField>,
}

impl ReferenceSamples {
    pub fn new(velocity: Trajectory<SpectralField>, acoustic: &Trajectory<AcousticCoeffs>) -> Result<Self> {
        if velocity.times() != acoustic.times() {
            return Err(Error::Shape("reference trajectories use different grids".into()));
        }
        Ok(ReferenceSamples { velocity, acoustic: acoustic.map(|v| v.to_state()) })
    }
}

/// Share of the L2 norm in modes on the boundary of the retained box.
fn shell_share(g: &SpectralField) -> f64 {
    let lat = g.lattice();
    let d = lat.dim();
    let cut = lat.cutoff();
    let (mut edge, mut total) = (0.0, 0.0);
    for &f in lat.modes() {
        let e = g.mode_energy(f);
        total += e;
        if (0..d).any(|h| lat.index(f)[h].abs() == cut[h]) {
            edge += e;
        }
    }
    if total > 0.0 {
        (edge / total).sqrt()
    } else {
        0.0
    }
}

fn diff(a: &Trajectory<SpectralField>, b: &Trajectory<SpectralField>) -> Result<Trajectory<SpectralField>> {
    if a.times() != b.times() {
        return Err(Error::Shape("trajectories use different grids".into()));
    }
    let states = a.states().iter().zip(b.states()).map(|(x, y)| x.sub(y)).collect::<Result<_>>()?;
    Trajectory::new(a.times().to_vec(), states)
}

/// Block profiles of one trajectory with the time norms the functionals
/// combine.
struct Prof(ProfiledTrajectory);

impl Prof {
    fn new(t: &Trajectory<SpectralField>) -> Result<Self> {
        Ok(Prof(ProfiledTrajectory::new(t, Integrability::Two)?))
    }

    /// `L~^inf_T`
    fn sup(&self, s: &NormSpec) -> Result<f64> {
        self.0.tilde(TimeExponent::Infinity, s)
    }

    /// `L^1_T`, equal to `L~^1_T` for `r = 1`.
    fn int(&self, s: &NormSpec) -> Result<f64> {
        self.0.plain(TimeExponent::One, s)
    }

    /// `L~^2_T`
    fn sq(&self, s: &NormSpec) -> Result<f64> {
        self.0.tilde(TimeExponent::Two, s)
    }

    /// `L~^inf_T(B^{s-1}) cap L^1_T(B^{s+1})` on one band.
    fn parabolic(&self, s: f64, band: impl Fn(NormSpec) -> NormSpec) -> Result<f64> {
        Ok(self.sup(&band(NormSpec::b21(s - 1.0)))? + self.int(&band(NormSpec::b21(s + 1.0)))?)
    }

    /// Low band of an acoustic pair: `L~^inf_T(B^{s-1}) cap L~^2_T(B^s)`.
    fn low_wave(&self, s: f64, zeta: f64) -> Result<f64> {
        Ok(self.sup(&NormSpec::b21(s - 1.0).low(zeta))? + self.sq(&NormSpec::b21(s).low(zeta))?)
    }

    /// Low band of a velocity: `L~^inf_T(B^{s-1}) cap L^1_T(B_^{s+1})`.
    fn low_velocity(&self, s: f64, zeta: f64) -> Result<f64> {
        Ok(self.sup(&NormSpec::b21(s - 1.0).low(zeta))? + self.int(&NormSpec::b21(s + 1.0).low(zeta).under())?)
    }
}

/// Every functional of one sweep member, plus the two comparison terms
/// used by [`bridge_check`] and [`triangle_check`].
#[derive(Clone, Debug)]
pub struct Functionals {
    pub values: BTreeMap<String, f64>,
    /// Low band of `V^eps - V` in the wave norm.
    pub low_difference: f64,
    /// Low-band norms of the limit solutions `(v, V)`.
    pub low_reference: f64,
}

pub fn compute_functionals(flow: &FlowSamples, reference: &ReferenceSamples, p: &FunctionalParams) -> Result<Functionals> {
    let lat = flow.density.states()[0].lattice().clone();
    let s = lat.dim() as f64 / 2.0;
    let (eps, zeta, eta, theta) = (p.eps, p.zeta, p.eta(), p.theta);

    let a = Prof::new(&flow.density)?;
    let q = Prof::new(&flow.potential)?;
    let pu = Prof::new(&flow.solenoidal)?;
    let aq = Prof::new(&flow.acoustic)?;
    let dv = Prof::new(&diff(&flow.filtered, &reference.acoustic)?)?;
    let du = Prof::new(&diff(&flow.solenoidal, &reference.velocity)?)?;
    let big_v = Prof::new(&reference.acoustic)?;
    let v = Prof::new(&reference.velocity)?;

    let full = |s: f64| NormSpec::b21(s);
    let high_a = a.sup(&full(s).high(eta))?;
    let high_a_int = a.int(&full(s).high(eta))?;

    let x = eps * high_a + high_a_int / eps + a.parabolic(s, |n| n.low(eta))? + q.parabolic(s, |n| n)?;
    let pp = pu.sup(&full(s - 1.0))? + pu.int(&full(s + 1.0).under())?;
    let medium = if zeta < eta { aq.parabolic(s, |n| n.medium(zeta, eta))? } else { 0.0 };
    let high_medium = eps * a.sup(&full(s))?
        + eps * high_a
        + high_a_int / eps
        + q.parabolic(s, |n| n.high(eta))?
        + medium
        + pu.parabolic(s, |n| n.high(zeta))?;
    let low_difference = dv.low_wave(s, zeta)?;
    let d = high_medium + low_difference + du.low_velocity(s, zeta)?;
    let y = high_medium + aq.low_wave(s, zeta)? + pu.low_velocity(s, zeta)?;
    let low_reference = big_v.low_wave(s, zeta)? + v.low_velocity(s, zeta)?;

    let z = dv.sup(&NormSpec::sobolev(s - 1.0 - theta))? + dv.0.plain(TimeExponent::Two, &NormSpec::sobolev(s - theta))?;
    let w = du.sup(&full(s - 1.0 - theta))? + du.int(&full(s + 1.0 - theta).under())?;

    let mut values = BTreeMap::new();
    let mut put = |k: &str, x: f64| {
        values.insert(k.to_string(), x);
    };
    put("X", x);
    put("P", pp);
    put("Y", y);
    put("D", d);
    put("Z_theta", z);
    put("W_theta", w);
    put("W_scaled", w / eps.powf(theta / (1.0 + theta)));
    put("eps_a", eps * a.sup(&full(s))?);
    put("V_diff", dv.sup(&full(s - 1.0))? + dv.sq(&full(s))?);
    put("Pu_diff", du.sup(&full(s - 1.0))? + du.int(&full(s + 1.0).under())?);
    put("tail", flow.tail);
    for (k, x) in &values {
        if !(x.is_finite() && *x >= 0.0) {
            return Err(Error::Invariant(format!("functional {k} = {x}")));
        }
    }
    Ok(Functionals { values, low_difference, low_reference })
}

/// Constant `C` with
/// `||g||^{l;zeta}_{L~^inf B^{s-1} cap L~^2 B^s} <= C zeta^{2 theta} ||g||_{L~^inf H^{s-1-theta} cap L^2 H^{s-theta}}`
/// for mean-free `g`. Cauchy-Schwarz over the occupied blocks below `zeta`
/// gives `sqrt(sum_j 2^{-2 j theta})`; comparing `2^j` with `|k|` on the
/// block support `[3/4, 8/3] 2^j` gives the factor `c_tau`.
pub fn bridge_constant(lat: &std::sync::Arc<Lattice>, zeta: f64, theta: f64) -> f64 {
    let dec = BlockDecomposition::new(lat);
    let geometric: f64 = dec
        .blocks()
        .filter(|&j| 2f64.powi(j) < zeta && !dec.weights(j).is_empty())
        .map(|j| 2f64.powf(-2.0 * j as f64 * theta))
        .sum();
    let s = lat.dim() as f64 / 2.0;
    let shell = |tau: f64| if tau >= 0.0 { (4.0f64 / 3.0).powf(2.0 * tau) } else { (8.0f64 / 3.0).powf(-2.0 * tau) };
    let c = shell(s - 1.0 - theta).max(shell(s - theta));
    (geometric * c).sqrt()
}

/// `(lhs, rhs)` of the low-frequency bridge for `V^eps - V`.
pub fn bridge_check(lat: &std::sync::Arc<Lattice>, f: &Functionals, p: &FunctionalParams) -> (f64, f64) {
    let c = bridge_constant(lat, p.zeta, p.theta);
    (f.low_difference, c * p.zeta.powf(2.0 * p.theta) * f.values["Z_theta"])
}

/// `(Y, D + low norms of (v, V))`; the first never exceeds the second by
/// the triangle inequality, since `(a, Qu)` and `V^eps` share block norms.
pub fn triangle_check(f: &Functionals) -> (f64, f64) {
    (f.values["Y"], f.values["D"] + f.low_reference)
}
