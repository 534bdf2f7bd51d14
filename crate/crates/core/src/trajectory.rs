use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Time samples of a state, starting at `t = 0` with strictly increasing
/// times.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    times: Vec<f64>,
    states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn new(times: Vec<f64>, states: Vec<S>) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::Argument(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::Argument("trajectory must start at t = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument("sample times must increase strictly".into()));
        }
        Ok(Trajectory { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn last(&self) -> &S {
        self.states.last().unwrap()
    }

    pub fn map<R>(&self, f: impl FnMut(&S) -> R) -> Trajectory<R> {
        Trajectory { times: self.times.clone(), states: self.states.iter().map(f).collect() }
    }

    pub fn try_map<R>(&self, f: impl FnMut(&S) -> Result<R>) -> Result<Trajectory<R>> {
        Ok(Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Samples with `t <= horizon`.
    pub fn truncate(&self, horizon: f64) -> Trajectory<S>
    where
        S: Clone,
    {
        let n = self.times.iter().take_while(|&&t| t <= horizon + 1e-12).count().max(1);
        Trajectory { times: self.times[..n].to_vec(), states: self.states[..n].to_vec() }
    }
}

/// Exponent of a time norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeExponent {
    One,
    Two,
    Infinity,
}

impl TimeExponent {
    /// `L^q` norm of sampled nonnegative values; trapezoid rule in time.
    pub fn norm(self, times: &[f64], values: &[f64]) -> f64 {
        match self {
            TimeExponent::Infinity => values.iter().cloned().fold(0.0, f64::max),
            TimeExponent::One => trapezoid(times, values),
            TimeExponent::Two => {
                let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
                trapezoid(times, &sq).sqrt()
            }
        }
    }
}

pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (t[1] - t[0]) * (v[0] + v[1]) * 0.5)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_time_grids() {
        assert!(Trajectory::new(vec![0.1, 0.2], vec![1, 2]).is_err());
        assert!(Trajectory::new(vec![0.0, 0.0], vec![1, 2]).is_err());
        assert!(Trajectory::new(vec![0.0], vec![1, 2]).is_err());
    }

    #[test]
    fn time_norms_of_constant() {
        let t = vec![0.0, 0.5, 2.0];
        let v = vec![3.0; 3];
        assert!((TimeExponent::One.norm(&t, &v) - 6.0).abs() < 1e-15);
        assert!((TimeExponent::Two.norm(&t, &v) - 3.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(TimeExponent::Infinity.norm(&t, &v), 3.0);
    }
}
