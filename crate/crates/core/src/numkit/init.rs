use super::{DenseMatrix, RngStream};
use crate::error::{Error, Result};

/// Half-width of the Glorot uniform interval for a `rows x cols` weight.
pub fn xavier_bound(rows: usize, cols: usize) -> f64 {
    (6.0 / (rows + cols) as f64).sqrt()
}

pub fn fill_uniform(values: &mut [f64], bound: f64, rng: &mut RngStream) {
    for v in values {
        *v = rng.uniform(-bound, bound);
    }
}

/// Glorot uniform: entries in (−√(6/(rows+cols)), √(6/(rows+cols))).
pub fn xavier_init(rows: usize, cols: usize, rng: &mut RngStream) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(rows, cols)?;
    fill_uniform(m.as_mut_slice(), xavier_bound(rows, cols), rng);
    Ok(m)
}

/// Entries in (−√k, √k) with k = 1 / hidden_units, the usual default for
/// recurrent cells.
pub fn uniform_sqrtk_init(
    rows: usize,
    cols: usize,
    hidden_units: usize,
    rng: &mut RngStream,
) -> Result<DenseMatrix> {
    if hidden_units == 0 {
        return Err(Error::InvalidArgument("hidden_units must be positive".into()));
    }
    let mut m = DenseMatrix::zeros(rows, cols)?;
    fill_uniform(m.as_mut_slice(), (1.0 / hidden_units as f64).sqrt(), rng);
    Ok(m)
}
