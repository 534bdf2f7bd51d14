use super::blocks::{dyadic_block, low_cut, BlockDecomposition};
use crate::torus::{grid_product, inverse_transform, GridField, SpectralField};
use crate::Result;

/// Bony decomposition `f g = T_f g + T_g f + R(f, g) + mean(f) mean(g)`.
#[derive(Clone, Debug)]
pub struct Paraproduct {
    /// `sum_j S_{j-2} f Delta_j g`
    pub low_high: SpectralField,
    /// `sum_j S_{j-2} g Delta_j f`
    pub high_low: SpectralField,
    /// `sum_{|j-j'| <= 2} Delta_j f Delta_j' g`
    pub remainder: SpectralField,
    /// Product of the two means as a constant field.
    pub means: SpectralField,
}

impl Paraproduct {
    pub fn total(&self) -> Result<SpectralField> {
        self.low_high.add(&self.high_low)?.add(&self.remainder)?.add(&self.means)
    }
}

fn accumulate(acc: &mut Option<SpectralField>, term: SpectralField) -> Result<()> {
    *acc = Some(match acc.take() {
        None => term,
        Some(a) => a.add(&term)?,
    });
    Ok(())
}

fn paraproduct_one(
    dec: &BlockDecomposition,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<Option<SpectralField>> {
    let mut acc = None;
    for j in dec.blocks() {
        let block = dyadic_block(g, j);
        if block.max_abs() == 0.0 {
            continue;
        }
        let low = low_cut(f, j - 2);
        accumulate(&mut acc, grid_product(&inverse_transform(&low), &inverse_transform(&block))?)?;
    }
    Ok(acc)
}

/// Paraproducts and remainder of two fields with the pseudospectral
/// product.
pub fn bony_paraproduct(f: &SpectralField, g: &SpectralField) -> Result<Paraproduct> {
    let dec = BlockDecomposition::new(f.lattice());
    let zero = || -> Result<SpectralField> {
        Ok(SpectralField::zeros(f.lattice(), f.ncomp().max(g.ncomp())))
    };
    let low_high = match paraproduct_one(&dec, f, g)? {
        Some(x) => x,
        None => zero()?,
    };
    let high_low = match paraproduct_one(&dec, g, f)? {
        Some(x) => x,
        None => zero()?,
    };
    let fb: Vec<GridField> = dec.blocks().map(|j| inverse_transform(&dyadic_block(f, j))).collect();
    let gb: Vec<GridField> = dec.blocks().map(|j| inverse_transform(&dyadic_block(g, j))).collect();
    let mut rem = None;
    for a in 0..fb.len() {
        for b in a.saturating_sub(2)..(a + 3).min(gb.len()) {
            accumulate(&mut rem, grid_product(&fb[a], &gb[b])?)?;
        }
    }
    let remainder = match rem {
        Some(x) => x,
        None => zero()?,
    };
    let (fm, _) = f.zero_mean_split();
    let (gm, _) = g.zero_mean_split();
    let means = grid_product(&inverse_transform(&fm), &inverse_transform(&gm))?;
    Ok(Paraproduct { low_high, high_low, remainder, means })
}
