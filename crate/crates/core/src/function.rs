//! Nonnegative functions on a truncated real line: uniform-grid samples and
//! closed-form Gaussians.
//!
//! The trapezoid rule is the only quadrature primitive. Grid functions are
//! immutable values; every transformation returns a new function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Uniform sampling of `[lo, hi]` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || !(lo < hi) {
            return Err(Error::InvalidGrid(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need n >= 2, got {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Default window for unit-rate Gaussians: `[-8, 8]`, 2048 points.
    pub fn standard() -> Self {
        Self {
            lo: -8.0,
            hi: 8.0,
            n: 2048,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        // hi is hit exactly at the last index
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Same window, `n` replaced.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.lo, self.hi, n)
    }

    /// Same window, refined so the step halves.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n - 1,
            ..*self
        }
    }
}

/// Trapezoid rule over samples with uniform step `h`.
pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// A nonnegative function sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    /// Rejects negative, non-finite or wrongly sized data.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidValues(format!(
                "expected {} samples, got {}",
                grid.n(),
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidValues(format!("sample {i} is {v}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            values: vec![0.0; grid.n()],
            grid,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Trapezoid integral.
    pub fn integrate(&self) -> f64 {
        trapezoid(&self.values, self.grid.step())
    }

    /// `(∫ f^p)^{1/p}` for any `p > 0`.
    pub fn p_functional(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p must be positive, got {p}")));
        }
        if p == 1.0 {
            return Ok(self.integrate());
        }
        let integral = trapezoid(&self.powered(p).values, self.grid.step());
        Ok(integral.powf(1.0 / p))
    }

    /// Pointwise `f^a`, with `0^a = 0` for every `a > 0`.
    pub fn powered(&self, a: f64) -> GridFunction {
        let values = self
            .values
            .iter()
            .map(|&v| if v == 0.0 { 0.0 } else { v.powf(a) })
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// `c * f` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<GridFunction> {
        Self::new(self.grid, self.values.iter().map(|v| c * v).collect())
    }

    /// Rescaled to unit mass.
    pub fn normalized(&self) -> Result<GridFunction> {
        let mass = self.integrate();
        if !(mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        self.scaled(1.0 / mass)
    }

    /// `x ↦ f(-x)`.
    pub fn reflected(&self) -> GridFunction {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: Grid {
                lo: -self.grid.hi,
                hi: -self.grid.lo,
                n: self.grid.n,
            },
            values,
        }
    }

    /// `x ↦ f(x / sigma)`, carried on the dilated grid with the same samples.
    pub fn dilated(&self, sigma: f64) -> Result<GridFunction> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("dilation needs sigma > 0, got {sigma}")));
        }
        let grid = Grid::new(sigma * self.grid.lo, sigma * self.grid.hi, self.grid.n)?;
        Ok(Self {
            grid,
            values: self.values.clone(),
        })
    }

    /// Linear interpolation; zero outside the window.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let Grid { lo, hi, n } = self.grid;
        if !(x >= lo && x <= hi) {
            return 0.0;
        }
        let pos = (x - lo) / self.grid.step();
        let i = (pos as usize).min(n - 2);
        let t = pos - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Samples of the first derivative by central differences
    /// (one-sided second-order stencils at the ends).
    pub(crate) fn derivative_samples(&self) -> Vec<f64> {
        let v = &self.values;
        let n = v.len();
        let h = self.grid.step();
        if n < 3 {
            let d = (v[n - 1] - v[0]) / h;
            return vec![d; n];
        }
        (0..n)
            .map(|i| match i {
                0 => (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h),
                _ if i == n - 1 => (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h),
                _ => (v[i + 1] - v[i - 1]) / (2.0 * h),
            })
            .collect()
    }

    /// Mean and variance of `f` viewed as an (unnormalized) density.
    pub fn moments(&self) -> Result<(f64, f64, f64)> {
        let mass = self.integrate();
        if !(mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        let h = self.grid.step();
        let xs: Vec<f64> = self.grid.points().collect();
        let first: Vec<f64> = xs.iter().zip(&self.values).map(|(x, v)| x * v).collect();
        let mean = trapezoid(&first, h) / mass;
        let second: Vec<f64> = xs
            .iter()
            .zip(&self.values)
            .map(|(x, v)| (x - mean).powi(2) * v)
            .collect();
        Ok((mass, mean, trapezoid(&second, h) / mass))
    }
}

/// `x ↦ a exp(-rate (x - center)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFn {
    amplitude: f64,
    rate: f64,
    center: f64,
}

impl GaussianFn {
    pub fn new(amplitude: f64, rate: f64, center: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::Domain(format!("amplitude must be >= 0, got {amplitude}")));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Domain(format!("rate must be > 0, got {rate}")));
        }
        if !center.is_finite() {
            return Err(Error::Domain("center must be finite".into()));
        }
        Ok(Self {
            amplitude,
            rate,
            center,
        })
    }

    /// Unit-mass centered Gaussian `sqrt(rate/π) exp(-rate x^2)`.
    pub fn unit_mass(rate: f64) -> Result<Self> {
        Self::new((rate / std::f64::consts::PI).sqrt(), rate, 0.0)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.amplitude * (-self.rate * d * d).exp()
    }

    /// `a sqrt(π / rate)`.
    pub fn mass(&self) -> f64 {
        self.amplitude * (std::f64::consts::PI / self.rate).sqrt()
    }

    /// Pointwise power `g^e`, itself Gaussian.
    pub fn powered(&self, e: f64) -> Self {
        Self {
            amplitude: self.amplitude.powf(e),
            rate: self.rate * e,
            center: self.center,
        }
    }

    /// Mass lying outside the grid window.
    pub fn truncated_mass(&self, grid: &Grid) -> f64 {
        let sr = self.rate.sqrt();
        let above = erfc(sr * (grid.hi() - self.center));
        let below = erfc(sr * (self.center - grid.lo()));
        0.5 * self.mass() * (above + below)
    }

    /// Window `center ± width_sigmas / sqrt(rate)`.
    pub fn covering_grid(&self, width_sigmas: f64, n: usize) -> Result<Grid> {
        let half = width_sigmas / self.rate.sqrt();
        Grid::new(self.center - half, self.center + half, n)
    }
}

pub fn sample_gaussian(g: &GaussianFn, grid: &Grid) -> GridFunction {
    GridFunction {
        grid: *grid,
        values: grid.points().map(|x| g.eval(x)).collect(),
    }
}

/// A seeded random density and the Gaussian envelope `M exp(-eps x^2)` that
/// dominates it on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomDensity {
    pub function: GridFunction,
    pub components: Vec<GaussianFn>,
    pub envelope_scale: f64,
    pub envelope_rate: f64,
}

/// Amplitude of the `exp(-x^2)` floor added to every random density.
pub const DENSITY_FLOOR: f64 = 1e-3;

/// Strictly positive, smooth, unit-mass random function: a mixture of 3 to 8
/// Gaussians plus a floor `DENSITY_FLOOR · exp(-x^2)`.
///
/// `smoothness` is the smallest component standard deviation; component
/// widths are drawn from `[smoothness, 2 smoothness]` and centers from
/// `mid ± 2 smoothness`, so neighbouring components always overlap.
pub fn random_density(seed: u64, grid: &Grid, smoothness: f64) -> Result<GridFunction> {
    random_density_detailed(seed, grid, smoothness).map(|d| d.function)
}

pub fn random_density_detailed(seed: u64, grid: &Grid, smoothness: f64) -> Result<RandomDensity> {
    if !(smoothness > 0.0) {
        return Err(Error::Domain(format!("smoothness must be > 0, got {smoothness}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mid = 0.5 * (grid.lo() + grid.hi());
    let spread = 2.0 * smoothness;
    let count = rng.random_range(3..=8);
    let mut components = Vec::with_capacity(count);
    for _ in 0..count {
        let center = mid + rng.random_range(-1.0..=1.0) * spread;
        let sigma = smoothness * rng.random_range(1.0..=2.0);
        let weight: f64 = rng.random_range(0.2..=1.0);
        let rate = 1.0 / (2.0 * sigma * sigma);
        components.push(GaussianFn::new(
            weight * (rate / std::f64::consts::PI).sqrt(),
            rate,
            center,
        )?);
    }
    let floor = GaussianFn::new(DENSITY_FLOOR, 1.0, 0.0)?;
    let raw = GridFunction::from_fn(*grid, |x| {
        floor.eval(x) + components.iter().map(|g| g.eval(x)).sum::<f64>()
    })?;
    let mass = raw.integrate();
    let function = raw.scaled(1.0 / mass)?;
    for g in components.iter_mut() {
        *g = GaussianFn::new(g.amplitude / mass, g.rate, g.center)?;
    }

    let min_rate = components.iter().map(|g| g.rate).fold(1.0, f64::min);
    let envelope_rate = 0.5 * min_rate;
    let envelope_scale = grid
        .points()
        .zip(function.values())
        .map(|(x, v)| v / (-envelope_rate * x * x).exp())
        .fold(0.0, f64::max);

    Ok(RandomDensity {
        function,
        components,
        envelope_scale,
        envelope_rate,
    })
}
