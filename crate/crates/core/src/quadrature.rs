//! Tensor trapezoid quadrature on axis-aligned 2D windows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{trapezoid, Grid};

/// Per-axis sample count used when none is given.
pub const DEFAULT_2D_N: usize = 1024;

/// An `n × n` tensor grid over `[x_lo, x_hi] × [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window2d {
    pub x: Grid,
    pub y: Grid,
}

impl Window2d {
    pub fn new(x: Grid, y: Grid) -> Self {
        Self { x, y }
    }

    /// Square window with the given per-axis count.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let g = Grid::new(lo, hi, n)?;
        Ok(Self { x: g, y: g })
    }

    /// Smallest square `[lo, hi]²` containing this window.
    pub fn enclosing_square(&self) -> (f64, f64) {
        (self.x.lo().min(self.y.lo()), self.x.hi().max(self.y.hi()))
    }

    pub fn n(&self) -> usize {
        self.x.n().max(self.y.n())
    }

    /// Bounding box of `{(x, y) : forms[k]·(x, y) ∈ ranges[k], k = 0, 1}`,
    /// made square so both axes share one step.
    pub fn covering(forms: [[f64; 2]; 2], ranges: [(f64, f64); 2], n: usize) -> Result<Self> {
        let [[a, b], [c, d]] = forms;
        let det = a * d - b * c;
        if !(det.abs() > 1e-14) {
            return Err(Error::Domain("linear forms are not independent".into()));
        }
        let inv = |u: f64, v: f64| ((d * u - b * v) / det, (-c * u + a * v) / det);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for u in [ranges[0].0, ranges[0].1] {
            for v in [ranges[1].0, ranges[1].1] {
                let (x, y) = inv(u, v);
                lo = lo.min(x.min(y));
                hi = hi.max(x.max(y));
            }
        }
        Self::square(lo, hi, n)
    }

    /// Inner trapezoid integrals over `x`, one per `y` sample.
    pub fn row_integrals<F>(&self, integrand: F) -> Vec<f64>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let ys: Vec<f64> = self.y.points().collect();
        let xs: Vec<f64> = self.x.points().collect();
        let hx = self.x.step();
        ys.par_iter()
            .map(|&y| {
                let row: Vec<f64> = xs.iter().map(|&x| integrand(x, y)).collect();
                trapezoid(&row, hx)
            })
            .collect()
    }

    /// Full double integral.
    pub fn integrate<F>(&self, integrand: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        trapezoid(&self.row_integrals(integrand), self.y.step())
    }

    /// Double integral together with the part coming from the outer
    /// `band` fraction of the window on every side.
    pub fn integrate_with_border<F>(&self, integrand: F, band: f64) -> (f64, f64)
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let (xl, xh) = (self.x.lo(), self.x.hi());
        let (yl, yh) = (self.y.lo(), self.y.hi());
        let bx = band * (xh - xl);
        let by = band * (yh - yl);
        let total = self.integrate(&integrand);
        let border = self.integrate(|x, y| {
            let inside = x > xl + bx && x < xh - bx && y > yl + by && y < yh - by;
            if inside {
                0.0
            } else {
                integrand(x, y).abs()
            }
        });
        (total, border)
    }
}
