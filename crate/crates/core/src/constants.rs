//! Sharp constants of the forward and reverse Young inequalities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{conjugate, YoungTriple, BOUNDARY_EPS};

/// `C_t = sqrt(t^{1/t} / |t'|^{1/t'})`, continuously extended by `C_1 = 1`.
pub fn c_t(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("C_t needs t > 0, got {t}")));
    }
    if (t - 1.0).abs() < BOUNDARY_EPS {
        return Ok(1.0);
    }
    let tc = conjugate(t)?;
    let log_num = t.ln() / t;
    let log_den = tc.abs().ln() / tc;
    Ok((0.5 * (log_num - log_den)).exp())
}

/// `K(p, q, r) = p^{1/2p} q^{1/2q} / r^{1/2r}`.
pub fn k_constant(triple: &YoungTriple) -> f64 {
    let half_log_pow = |t: f64| t.ln() / (2.0 * t);
    (half_log_pow(triple.p()) + half_log_pow(triple.q()) - half_log_pow(triple.r())).exp()
}

/// The sharp Young constant `(C_p C_q / C_r)^n` on `R^n`.
pub fn young_constant(triple: &YoungTriple, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let one_dim = c_t(triple.p())? * c_t(triple.q())? / c_t(triple.r())?;
    Ok(one_dim.powi(n as i32))
}

/// Every constant attached to a triple in a given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpConstants {
    pub c_p: f64,
    pub c_q: f64,
    pub c_r: f64,
    pub k: f64,
    pub young_nd: f64,
    pub dimension: u32,
}

impl SharpConstants {
    pub fn new(triple: &YoungTriple, dimension: u32) -> Result<Self> {
        Ok(Self {
            c_p: c_t(triple.p())?,
            c_q: c_t(triple.q())?,
            c_r: c_t(triple.r())?,
            k: k_constant(triple),
            young_nd: young_constant(triple, dimension)?,
            dimension,
        })
    }
}

/// One row of a constant-surface tabulation over `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub q: f64,
    /// `None` when `(p, q)` falls in the forbidden region `1/p + 1/q <= 1`.
    pub values: Option<SweepValues>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepValues {
    pub r: f64,
    pub k: f64,
    pub young_constant: f64,
}

/// Inclusive linear range with `steps` points (`steps == 1` yields `lo`).
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Row-major sweep: `p` outer, `q` inner. Invalid points are kept and marked.
pub fn constant_sweep(ps: &[f64], qs: &[f64]) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(ps.len() * qs.len());
    for &p in ps {
        for &q in qs {
            let values = YoungTriple::new(p, q).ok().and_then(|t| {
                Some(SweepValues {
                    r: t.r(),
                    k: k_constant(&t),
                    young_constant: young_constant(&t, 1).ok()?,
                })
            });
            rows.push(SweepRow { p, q, values });
        }
    }
    rows
}
