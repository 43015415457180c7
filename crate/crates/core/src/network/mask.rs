use serde::{Deserialize, Serialize};

use super::NetConfig;
use crate::error::{Error, Result};
use crate::numkit::RngStream;

/// Active (unmasked) connections of the recurrence cell, stored as sorted
/// index lists per state row. Row `i` of `u_active` indexes into the
/// concatenated feature vector `[f_1; …; f_C]`; row `i` of `r_active`
/// indexes into the previous state vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LateralMask {
    columns: usize,
    width: usize,
    u_active: Vec<Vec<usize>>,
    r_active: Vec<Vec<usize>>,
}

/// Number of lateral U entries per row for ratio `s` (percent) and width
/// `W`: `round(s·W/100)`.
pub fn lateral_count(ratio_percent: f64, width: usize) -> usize {
    (ratio_percent * width as f64 / 100.0).round() as usize
}

/// Whether [`sample_mask`] can satisfy the configured lateral ratio.
pub fn mask_feasible(cfg: &NetConfig) -> bool {
    cfg.columns <= 1 || lateral_count(cfg.lateral_ratio, cfg.width) <= (cfg.columns - 1) * cfg.width
}

/// Samples the lateral mask. Row `i` keeps all of its own block `U_ii`
/// plus `m = round(s·W/100)` entries drawn without replacement from the
/// other columns' blocks. Off-diagonal `R_ij` follow the same ratio over
/// the `C−1` slots (`round(m/W)` of them) when `mask_r` is set and are all
/// active otherwise.
pub fn sample_mask(cfg: &NetConfig, rng: &mut RngStream) -> Result<LateralMask> {
    cfg.validate()?;
    let (c, w) = (cfg.columns, cfg.width);
    let slots = (c - 1) * w;
    let m = if c == 1 { 0 } else { lateral_count(cfg.lateral_ratio, w) };
    if m > slots {
        return Err(Error::InvalidArgument(format!(
            "lateral ratio {}% needs {m} lateral connections per state, only {slots} available (C={c}, W={w})",
            cfg.lateral_ratio
        )));
    }
    let m_r = (m as f64 / w as f64).round() as usize;
    let mut u_active = Vec::with_capacity(c);
    let mut r_active = Vec::with_capacity(c);
    for i in 0..c {
        let own = i * w..(i + 1) * w;
        let mut row: Vec<usize> = rng
            .sample_indices(slots, m)
            .into_iter()
            // skip over the own block when mapping slot -> feature index
            .map(|k| if k >= own.start { k + w } else { k })
            .collect();
        row.extend(own);
        row.sort_unstable();
        u_active.push(row);

        let r_row: Vec<usize> = if cfg.mask_r {
            let mut r: Vec<usize> = rng
                .sample_indices(c - 1, m_r)
                .into_iter()
                .map(|k| if k >= i { k + 1 } else { k })
                .collect();
            r.push(i);
            r.sort_unstable();
            r
        } else {
            (0..c).collect()
        };
        r_active.push(r_row);
    }
    Ok(LateralMask {
        columns: c,
        width: w,
        u_active,
        r_active,
    })
}

impl LateralMask {
    /// Mask with every connection active.
    pub fn dense(columns: usize, width: usize) -> Self {
        Self {
            columns,
            width,
            u_active: vec![(0..columns * width).collect(); columns],
            r_active: vec![(0..columns).collect(); columns],
        }
    }

    /// Rebuilds a mask from stored index lists, checking the invariants.
    pub fn from_indices(
        columns: usize,
        width: usize,
        u_active: Vec<Vec<usize>>,
        r_active: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if u_active.len() != columns || r_active.len() != columns {
            return Err(Error::InvalidArgument("mask row count mismatch".into()));
        }
        for i in 0..columns {
            let u = &u_active[i];
            let r = &r_active[i];
            let sorted = |v: &[usize], n: usize| v.windows(2).all(|p| p[0] < p[1]) && v.iter().all(|&k| k < n);
            if !sorted(u, columns * width) || !sorted(r, columns) {
                return Err(Error::InvalidArgument(format!("mask row {i} not sorted or out of range")));
            }
            if (i * width..(i + 1) * width).any(|k| u.binary_search(&k).is_err()) || r.binary_search(&i).is_err() {
                return Err(Error::InvalidArgument(format!("mask row {i} drops an own-column connection")));
            }
        }
        Ok(Self {
            columns,
            width,
            u_active,
            r_active,
        })
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn u_active(&self, row: usize) -> &[usize] {
        &self.u_active[row]
    }

    pub fn r_active(&self, row: usize) -> &[usize] {
        &self.r_active[row]
    }

    pub fn u_active_rows(&self) -> &[Vec<usize>] {
        &self.u_active
    }

    pub fn r_active_rows(&self) -> &[Vec<usize>] {
        &self.r_active
    }

    /// Dense binary `C x C·W` mask over U.
    pub fn u_mask(&self) -> Vec<u8> {
        let n = self.columns * self.width;
        let mut m = vec![0u8; self.columns * n];
        for (i, row) in self.u_active.iter().enumerate() {
            for &k in row {
                m[i * n + k] = 1;
            }
        }
        m
    }

    /// Dense binary `C x C` mask over R.
    pub fn r_mask(&self) -> Vec<u8> {
        let c = self.columns;
        let mut m = vec![0u8; c * c];
        for (i, row) in self.r_active.iter().enumerate() {
            for &k in row {
                m[i * c + k] = 1;
            }
        }
        m
    }

    /// Lateral U connections of row `i` (entries outside block `i`).
    pub fn lateral_u(&self, row: usize) -> usize {
        self.u_active[row].len() - self.width
    }

    /// Realized ratio m/n (percent) for row `i`.
    pub fn realized_ratio(&self, row: usize) -> f64 {
        100.0 * self.lateral_u(row) as f64 / self.width as f64
    }

    pub fn has_lateral(&self) -> bool {
        (0..self.columns).any(|i| self.lateral_u(i) > 0 || self.r_active[i].len() > 1)
    }
}
