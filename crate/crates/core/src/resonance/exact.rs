use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `sign * sqrt(radicand)` with an integer radicand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedRoot {
    pub sign: i8,
    pub radicand: u64,
}

impl SignedRoot {
    pub fn new(sign: i8, radicand: u64) -> Self {
        SignedRoot { sign, radicand }
    }

    pub fn value(&self) -> f64 {
        self.sign as f64 * (self.radicand as f64).sqrt()
    }

    fn is_zero(&self) -> bool {
        self.sign == 0 || self.radicand == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Resonance {
    Resonant,
    /// `divisor` is `|sum|` in the units of the radicands' square roots.
    NonResonant { divisor: f64 },
}

impl Resonance {
    pub fn is_resonant(&self) -> bool {
        matches!(self, Resonance::Resonant)
    }
}

/// Whether `sum_i sign_i sqrt(n_i)` vanishes, decided in integer
/// arithmetic. At most three nonzero terms.
pub fn roots_sum_to_zero(terms: &[SignedRoot]) -> Result<bool> {
    let mut pos = Vec::with_capacity(3);
    let mut neg = Vec::with_capacity(3);
    for t in terms.iter().filter(|t| !t.is_zero()) {
        if t.sign > 0 {
            pos.push(t.radicand as u128);
        } else {
            neg.push(t.radicand as u128);
        }
    }
    if pos.len() + neg.len() > 3 {
        return Err(Error::Argument("exact test supports at most three roots".into()));
    }
    Ok(match (pos.len(), neg.len()) {
        (0, 0) => true,
        (0, _) | (_, 0) => false,
        (1, 1) => pos[0] == neg[0],
        _ => {
            // sqrt(c) = sqrt(a) + sqrt(b)  <=>  c >= a + b and (c - a - b)^2 = 4ab
            let (c, a, b) = if pos.len() == 1 { (pos[0], neg[0], neg[1]) } else { (neg[0], pos[0], pos[1]) };
            c >= a + b && (c - a - b) * (c - a - b) == 4 * a * b
        }
    })
}

/// Exact test of `sum(lhs) == rhs`. The divisor of a non-resonant case is
/// `|sum(lhs) - rhs| / sqrt(scale)`.
pub fn resonance_test(lhs: &[SignedRoot], rhs: SignedRoot, scale: u64) -> Result<Resonance> {
    let mut terms: Vec<SignedRoot> = lhs.to_vec();
    terms.push(SignedRoot { sign: -rhs.sign, radicand: rhs.radicand });
    if roots_sum_to_zero(&terms)? {
        return Ok(Resonance::Resonant);
    }
    let sum: f64 = terms.iter().map(|t| t.value()).sum();
    Ok(Resonance::NonResonant { divisor: sum.abs() / (scale as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(sign: i8, n: u64) -> SignedRoot {
        SignedRoot::new(sign, n)
    }

    #[test]
    fn collinear_triples_resonate() {
        // |k| = 1, |l| = 1, |m| = 2
        assert!(resonance_test(&[r(1, 1), r(1, 1)], r(1, 4), 1).unwrap().is_resonant());
        // sqrt 2 + sqrt 8 = sqrt 18
        assert!(resonance_test(&[r(1, 2), r(1, 8)], r(1, 18), 1).unwrap().is_resonant());
        // 2 - 1 = 1
        assert!(resonance_test(&[r(1, 4), r(-1, 1)], r(1, 1), 1).unwrap().is_resonant());
    }

    #[test]
    fn near_misses_do_not_resonate() {
        match resonance_test(&[r(1, 1)], r(1, 2), 1).unwrap() {
            Resonance::NonResonant { divisor } => assert!((divisor - (2f64.sqrt() - 1.0)).abs() < 1e-15),
            _ => panic!(),
        }
        assert!(!resonance_test(&[r(1, 1), r(1, 2)], r(1, 5), 1).unwrap().is_resonant());
        assert!(!resonance_test(&[r(1, 1), r(1, 1)], r(-1, 4), 1).unwrap().is_resonant());
        assert!(roots_sum_to_zero(&[r(1, 1), r(1, 1), r(1, 1), r(-1, 9)]).is_err());
    }
}
