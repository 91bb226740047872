//! Convolution on grids and in closed form, and the ratio bounded by the
//! sharp Young constant.

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::YoungTriple;
use crate::function::{GaussianFn, Grid, GridFunction};

/// Relative tolerance for "equal step" between two grids.
const STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvolutionMethod {
    Direct,
    Fast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionResult {
    /// `f * g` on the Minkowski-sum window.
    pub result: GridFunction,
    pub method: ConvolutionMethod,
    /// Estimate of the mass cut off by the input windows.
    pub truncation_note: f64,
}

fn output_grid(f: &Grid, g: &Grid) -> Result<Grid> {
    let (hf, hg) = (f.step(), g.step());
    if (hf - hg).abs() > STEP_TOL * hf.max(hg) {
        return Err(Error::StepMismatch(hf, hg));
    }
    Grid::new(f.lo() + g.lo(), f.hi() + g.hi(), f.n() + g.n() - 1)
}

fn truncation_note(f: &GridFunction, g: &GridFunction) -> f64 {
    let edges = |u: &GridFunction| u.values()[0] + u.values()[u.values().len() - 1];
    let h = f.grid().step();
    h * (edges(f) * g.integrate() + edges(g) * f.integrate())
}

/// Reference `O(n m)` discrete convolution `h Σ_i f_i g_{k-i}`.
pub fn convolve_direct(f: &GridFunction, g: &GridFunction) -> Result<ConvolutionResult> {
    let grid = output_grid(f.grid(), g.grid())?;
    let (fv, gv) = (f.values(), g.values());
    let h = f.grid().step();
    let (nf, ng) = (fv.len(), gv.len());
    let values: Vec<f64> = (0..grid.n())
        .into_par_iter()
        .map(|k| {
            let i_lo = k.saturating_sub(ng - 1);
            let i_hi = k.min(nf - 1);
            let acc: f64 = (i_lo..=i_hi).map(|i| fv[i] * gv[k - i]).sum();
            h * acc
        })
        .collect();
    Ok(ConvolutionResult {
        result: GridFunction::new(grid, values)?,
        method: ConvolutionMethod::Direct,
        truncation_note: truncation_note(f, g),
    })
}

/// FFT convolution with the same contract as [`convolve_direct`].
///
/// Round-off negatives (below `1e-14` of the peak) are set to zero.
pub fn convolve_fast(f: &GridFunction, g: &GridFunction) -> Result<ConvolutionResult> {
    let grid = output_grid(f.grid(), g.grid())?;
    let len = grid.n().next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);

    let padded = |v: &[f64]| {
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (b, x) in buf.iter_mut().zip(v) {
            b.re = *x;
        }
        buf
    };
    let mut a = padded(f.values());
    let mut b = padded(g.values());
    forward.process(&mut a);
    forward.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inverse.process(&mut a);

    let scale = f.grid().step() / len as f64;
    let mut values: Vec<f64> = a[..grid.n()].iter().map(|z| z.re * scale).collect();
    let peak = values.iter().copied().fold(0.0, f64::max);
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -1e-14 * peak.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidValues(format!("fft produced {v}")));
            }
            *v = 0.0;
        }
    }
    Ok(ConvolutionResult {
        result: GridFunction::new(grid, values)?,
        method: ConvolutionMethod::Fast,
        truncation_note: truncation_note(f, g),
    })
}

/// Exact convolution of two Gaussians.
pub fn convolve_gaussian(f: &GaussianFn, g: &GaussianFn) -> GaussianFn {
    let sum = f.rate() + g.rate();
    GaussianFn::new(
        f.amplitude() * g.amplitude() * (std::f64::consts::PI / sum).sqrt(),
        f.rate() * g.rate() / sum,
        f.center() + g.center(),
    )
    .expect("product of valid Gaussian parameters is valid")
}

/// `‖f * g‖_r / (‖f‖_p ‖g‖_q)` in one dimension.
pub fn young_ratio(f: &GridFunction, g: &GridFunction, triple: &YoungTriple) -> Result<f64> {
    triple.require_strict()?;
    if f.is_zero() || g.is_zero() {
        return Err(Error::RatioUndefined("zero input function"));
    }
    let conv = convolve_direct(f, g)?;
    let num = conv.result.p_functional(triple.r())?;
    let den = f.p_functional(triple.p())? * g.p_functional(triple.q())?;
    Ok(num / den)
}
