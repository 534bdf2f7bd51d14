use std::sync::Arc;

use super::bump;
use crate::torus::{Lattice, SpectralField};

/// Largest `j` with `2^{-j} * min_h(1/b_h) >= 8/3`. Every block at or below
/// it vanishes on the lattice.
pub fn compute_jb(lattice: &Lattice) -> i32 {
    // min over h of 1/b_h = q/p, compared as fractions
    let periods = &lattice.spec().periods;
    let (mut q, mut p) = (periods[0].denom() as i128, periods[0].numer() as i128);
    for b in periods {
        let (bq, bp) = (b.denom() as i128, b.numer() as i128);
        if bq * p < q * bp {
            q = bq;
            p = bp;
        }
    }
    let holds = |j: i32| -> bool {
        if j >= 0 {
            3 * q >= 8 * p * (1i128 << j)
        } else {
            3 * q * (1i128 << (-j)) >= 8 * p
        }
    };
    (-60..=60).rev().find(|&j| holds(j)).expect("period ratio out of range")
}

/// Dyadic block multipliers for one lattice.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    lattice: Arc<Lattice>,
    first: i32,
    weights: Vec<Vec<(usize, f64)>>,
}

impl BlockDecomposition {
    pub fn new(lattice: &Arc<Lattice>) -> Self {
        let first = compute_jb(lattice) + 1;
        let mut last = first;
        while bump::INNER * 2f64.powi(last + 1) < lattice.kmax() {
            last += 1;
        }
        let mut weights = vec![Vec::new(); (last - first + 1) as usize];
        for &f in lattice.modes().iter().skip(1) {
            let k = lattice.kabs(f);
            let centre = k.log2().floor() as i32;
            for j in (centre - 2)..=(centre + 2) {
                let w = bump::profile(k * 2f64.powi(-j));
                if w != 0.0 {
                    assert!(j >= first && j <= last, "block {j} outside [{first}, {last}]");
                    weights[(j - first) as usize].push((f, w));
                }
            }
        }
        BlockDecomposition { lattice: lattice.clone(), first, weights }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    /// Lowest block that can be nonzero (`j_b + 1`).
    pub fn first(&self) -> i32 {
        self.first
    }

    /// Highest block that can be nonzero on the retained set.
    pub fn last(&self) -> i32 {
        self.first + self.weights.len() as i32 - 1
    }

    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        self.first..=self.last()
    }

    /// Nonzero `(slot, multiplier)` pairs of block `j`.
    pub fn weights(&self, j: i32) -> &[(usize, f64)] {
        if j < self.first || j > self.last() {
            &[]
        } else {
            &self.weights[(j - self.first) as usize]
        }
    }

    /// `||Delta_j g||_{L2}`, summed over components.
    pub fn block_l2(&self, g: &SpectralField, j: i32) -> f64 {
        self.weights(j)
            .iter()
            .map(|&(f, w)| w * w * g.mode_energy(f))
            .sum::<f64>()
            .sqrt()
    }

    pub fn block(&self, g: &SpectralField, j: i32) -> SpectralField {
        let mut out = SpectralField::zeros(g.lattice(), g.ncomp());
        out.set_reality(g.reality());
        for &(f, w) in self.weights(j) {
            for c in 0..g.ncomp() {
                out.comp_mut(c)[f] = g.comp(c)[f] * w;
            }
        }
        out
    }
}

/// `Delta_j g`.
pub fn dyadic_block(g: &SpectralField, j: i32) -> SpectralField {
    let lat = g.lattice().clone();
    let scale = 2f64.powi(-j);
    g.map_modes(move |f| if f == 0 { 0.0 } else { bump::profile(lat.kabs(f) * scale) })
}

/// `S_j g`: the mean plus every block below `j`.
pub fn low_cut(g: &SpectralField, j: i32) -> SpectralField {
    let lat = g.lattice().clone();
    let scale = 2f64.powi(-j);
    g.map_modes(move |f| bump::cutoff(lat.kabs(f) * scale))
}
