//! Brascamp–Lieb functionals, closure of their maximizers under
//! convolution, Gaussian fits and perturbation scans around the Gaussian
//! extremizers of the sharp Young inequality.

use rayon::prelude::*;
use serde::Serialize;

use crate::convolution::convolve_direct;
use crate::error::{Error, Result};
use crate::exponents::{conjugate, Regime, YoungTriple};
use crate::function::{sample_gaussian, trapezoid, GaussianFn, Grid, GridFunction};
use crate::inequality::{gaussian_pair_grid, verify_sharp_form, CheckConfig, VerificationReport};
use crate::quadrature::Window2d;

/// Relative tolerance on the unit-mass precondition.
pub const UNIT_MASS_TOL: f64 = 1e-6;

/// `∫_{Rⁿ} ∏ f_i^{α_i}(⟨x, u_i⟩) dx ≤ M ∏ (∫ f_i)^{α_i}` for `n ≤ 2`, `m ≤ 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct BLInstance {
    dim: usize,
    vectors: Vec<[f64; 2]>,
    alpha: Vec<f64>,
    /// Rates of a centered Gaussian maximizing tuple, when known.
    extremal_rates: Option<Vec<f64>>,
}

impl BLInstance {
    /// For `dim == 1` only the first coordinate of each vector is used.
    pub fn new(dim: usize, vectors: Vec<[f64; 2]>, alpha: Vec<f64>) -> Result<Self> {
        let m = vectors.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidInstance(format!("dimension {dim} not in 1..=2")));
        }
        if m > 3 || m < dim {
            return Err(Error::InvalidInstance(format!("need {dim} <= m <= 3, got m = {m}")));
        }
        if alpha.len() != m {
            return Err(Error::InvalidInstance("one weight per vector".into()));
        }
        if alpha.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidInstance("weights must be positive".into()));
        }
        let mut vectors = vectors;
        if dim == 1 {
            for v in vectors.iter_mut() {
                v[1] = 0.0;
            }
        }
        if vectors.iter().any(|v| v[0] == 0.0 && v[1] == 0.0) {
            return Err(Error::InvalidInstance("vectors must be nonzero".into()));
        }
        Ok(Self {
            dim,
            vectors,
            alpha,
            extremal_rates: None,
        })
    }

    /// The sharp Young inequality as a three-function instance in the
    /// plane: vectors `(c, -s)`, `(s, c)`, `(0, 1)` with weights
    /// `1/p, 1/q, 1/r'`. Its sharp constant is `K(p, q, r)` and
    /// `(e^{-p t²}, e^{-q t²}, e^{-r t²})` is a maximizer.
    pub fn young(triple: &YoungTriple) -> Result<Self> {
        if triple.regime() != Regime::Classical {
            return Err(Error::WrongRegime { expected: "Classical" });
        }
        let rot = triple.rotation()?;
        let rc = conjugate(triple.r())?;
        let mut inst = Self::new(
            2,
            vec![[rot.c, -rot.s], [rot.s, rot.c], [0.0, 1.0]],
            vec![1.0 / triple.p(), 1.0 / triple.q(), 1.0 / rc],
        )?;
        inst.extremal_rates = Some(vec![triple.p(), triple.q(), triple.r()]);
        Ok(inst)
    }

    /// Hölder's inequality `∫ f^θ g^{1-θ} ≤ (∫f)^θ (∫g)^{1-θ}` on the line.
    pub fn holder(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidInstance(format!("theta {theta} not in (0, 1)")));
        }
        let mut inst = Self::new(1, vec![[1.0, 0.0], [1.0, 0.0]], vec![theta, 1.0 - theta])?;
        inst.extremal_rates = Some(vec![1.0, 1.0]);
        Ok(inst)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[[f64; 2]] {
        &self.vectors
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn extremal_rates(&self) -> Option<&[f64]> {
        self.extremal_rates.as_deref()
    }

    /// Unit-mass centered Gaussian maximizers sampled on `grid`.
    pub fn gaussian_tuple(&self, grid: &Grid) -> Result<Vec<GridFunction>> {
        let rates = self
            .extremal_rates
            .as_ref()
            .ok_or(Error::InvalidInstance("no known Gaussian maximizer".into()))?;
        rates
            .iter()
            .map(|&rate| sample_gaussian(&GaussianFn::unit_mass(rate)?, grid).normalized())
            .collect()
    }

    /// `M` estimated as the functional of the Gaussian maximizer tuple.
    pub fn gaussian_constant(&self, grid: &Grid, n: usize) -> Result<f64> {
        bl_functional(self, &self.gaussian_tuple(grid)?, n)
    }
}

fn check_tuple(instance: &BLInstance, fs: &[GridFunction]) -> Result<()> {
    if fs.len() != instance.m() {
        return Err(Error::InvalidInstance(format!(
            "instance has {} functions, got {}",
            instance.m(),
            fs.len()
        )));
    }
    if fs.iter().any(|f| !(f.integrate() > 0.0)) {
        return Err(Error::ZeroMass);
    }
    Ok(())
}

/// Unnormalized `∫ ∏ f_i^{α_i}(⟨x, u_i⟩) dx` with `n` samples per axis.
pub fn bl_integral(instance: &BLInstance, fs: &[GridFunction], n: usize) -> Result<f64> {
    check_tuple(instance, fs)?;
    let powered: Vec<GridFunction> = fs.iter().zip(instance.alpha()).map(|(f, a)| f.powered(*a)).collect();
    let vectors = instance.vectors();
    let product = |x: f64, y: f64| {
        let mut acc = 1.0;
        for (f, u) in powered.iter().zip(vectors) {
            acc *= f.eval(u[0] * x + u[1] * y);
            if acc == 0.0 {
                break;
            }
        }
        acc
    };

    if instance.dim() == 1 {
        // intersection of the preimages of the windows
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (f, u) in fs.iter().zip(vectors) {
            let (a, b) = (f.grid().lo() / u[0], f.grid().hi() / u[0]);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        if !(lo < hi) {
            return Ok(0.0);
        }
        let grid = Grid::new(lo, hi, n)?;
        let samples: Vec<f64> = grid.points().map(|x| product(x, 0.0)).collect();
        return Ok(trapezoid(&samples, grid.step()));
    }

    // window from the best-conditioned pair of vectors
    let mut best = (0, 1, 0.0);
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let det = (vectors[i][0] * vectors[j][1] - vectors[i][1] * vectors[j][0]).abs();
            if det > best.2 {
                best = (i, j, det);
            }
        }
    }
    let (i, j, det) = best;
    if !(det > 1e-12) {
        return Err(Error::InvalidInstance("vectors do not span the plane".into()));
    }
    let range = |f: &GridFunction| (f.grid().lo(), f.grid().hi());
    let window = Window2d::covering([vectors[i], vectors[j]], [range(&fs[i]), range(&fs[j])], n)?;
    Ok(window.integrate(product))
}

/// `bl_integral / ∏ (∫ f_i)^{α_i}`.
pub fn bl_functional(instance: &BLInstance, fs: &[GridFunction], n: usize) -> Result<f64> {
    let integral = bl_integral(instance, fs, n)?;
    let norm: f64 = fs
        .iter()
        .zip(instance.alpha())
        .map(|(f, a)| f.integrate().powf(*a))
        .product();
    Ok(integral / norm)
}

/// Componentwise `f_i * g_i`.
pub fn convolve_tuple(fs: &[GridFunction], gs: &[GridFunction]) -> Result<Vec<GridFunction>> {
    if fs.len() != gs.len() {
        return Err(Error::InvalidInstance("tuples differ in length".into()));
    }
    fs.iter()
        .zip(gs)
        .map(|(f, g)| {
            if f.is_zero() || g.is_zero() {
                return Err(Error::ZeroMass);
            }
            Ok(convolve_direct(f, g)?.result)
        })
        .collect()
}

/// Checks `Φ(f) Φ(g) ≤ M Φ(f ⊛ g)` for unit-mass tuples, `Φ` the
/// unnormalized functional.
pub fn supermodularity_check(
    instance: &BLInstance,
    fs: &[GridFunction],
    gs: &[GridFunction],
    m_est: f64,
    config: &CheckConfig,
) -> Result<VerificationReport> {
    for f in fs.iter().chain(gs) {
        let mass = f.integrate();
        if (mass - 1.0).abs() > UNIT_MASS_TOL {
            return Err(Error::MassMismatch(mass, 1.0));
        }
    }
    let phi_f = bl_integral(instance, fs, config.n)?;
    let phi_g = bl_integral(instance, gs, config.n)?;
    let fg = convolve_tuple(fs, gs)?;
    let phi_fg = bl_integral(instance, &fg, config.n)?;
    let (lo, hi) = fg.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
        (lo.min(f.grid().lo()), hi.max(f.grid().hi()))
    });
    let window = Window2d::square(lo, hi, config.n)?;
    Ok(VerificationReport::new(
        phi_f * phi_g,
        m_est * phi_fg,
        Regime::Classical,
        config.tolerance,
        &window,
    ))
}

/// `a exp(-λ (x - y)²)` fitted to a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub rate: f64,
    pub center: f64,
    /// `‖f - fit‖₂ / ‖f‖₂`.
    pub residual: f64,
}

impl GaussianFit {
    pub fn gaussian(&self) -> Result<GaussianFn> {
        GaussianFn::new(self.amplitude, self.rate, self.center)
    }
}

fn relative_l2(f: &GridFunction, g: &GaussianFn) -> f64 {
    let h = f.grid().step();
    let diff: Vec<f64> = f
        .grid()
        .points()
        .zip(f.values())
        .map(|(x, v)| (v - g.eval(x)).powi(2))
        .collect();
    let sq: Vec<f64> = f.values().iter().map(|v| v * v).collect();
    (trapezoid(&diff, h) / trapezoid(&sq, h)).sqrt()
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if !(d.abs() > 0.0) || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut mk = m;
        for row in 0..3 {
            mk[row][k] = b[row];
        }
        *slot = det(&mk) / d;
    }
    Some(out)
}

/// Moment-matched Gaussian followed by a damped Gauss–Newton least-squares
/// refinement.
pub fn fit_gaussian(f: &GridFunction) -> Result<GaussianFit> {
    let (mass, mean, var) = f.moments()?;
    let h = f.grid().step();
    if !(var > 1e-2 * h * h) {
        return Err(Error::FitFailed("variance is zero or unresolved"));
    }
    let rate = 1.0 / (2.0 * var);
    let mut g = GaussianFn::new(mass / (std::f64::consts::PI / rate).sqrt(), rate, mean)?;
    let mut res = relative_l2(f, &g);

    let xs: Vec<f64> = f.grid().points().collect();
    for _ in 0..25 {
        let (a, l, c) = (g.amplitude(), g.rate(), g.center());
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (x, v) in xs.iter().zip(f.values()) {
            let d = x - c;
            let e = (-l * d * d).exp();
            let jac = [e, -a * d * d * e, 2.0 * a * l * d * e];
            let r = v - a * e;
            for i in 0..3 {
                jtr[i] += jac[i] * r;
                for j in 0..3 {
                    jtj[i][j] += jac[i] * jac[j];
                }
            }
        }
        let Some(step) = solve3(jtj, jtr) else { break };
        let mut accepted = false;
        let mut damping = 1.0;
        for _ in 0..10 {
            let candidate = GaussianFn::new(a + damping * step[0], l + damping * step[1], c + damping * step[2]);
            if let Ok(candidate) = candidate {
                let r = relative_l2(f, &candidate);
                if r < res {
                    g = candidate;
                    let gain = res - r;
                    res = r;
                    accepted = gain > 1e-15;
                    break;
                }
            }
            damping *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(GaussianFit {
        amplitude: g.amplitude(),
        rate: g.rate(),
        center: g.center(),
        residual: res,
    })
}

/// Fits of `f * Γ_p` and `g * Γ_q`, the smoothed pair on which an equality
/// case must be exactly Gaussian with a common scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqualityDiagnostic {
    pub fit_f: GaussianFit,
    pub fit_g: GaussianFit,
    /// `λ` read off each fit as `rate / p` and `rate / q`.
    pub scale_f: f64,
    pub scale_g: f64,
}

pub fn equality_diagnostic(f: &GridFunction, g: &GridFunction, triple: &YoungTriple) -> Result<EqualityDiagnostic> {
    triple.require_strict()?;
    let smooth = |u: &GridFunction, rate: f64| -> Result<GridFunction> {
        let kernel = sample_gaussian(&GaussianFn::unit_mass(rate)?, u.grid());
        Ok(convolve_direct(u, &kernel)?.result)
    };
    let fit_f = fit_gaussian(&smooth(f, triple.p())?)?;
    let fit_g = fit_gaussian(&smooth(g, triple.q())?)?;
    Ok(EqualityDiagnostic {
        fit_f,
        fit_g,
        scale_f: fit_f.rate / triple.p(),
        scale_g: fit_g.rate / triple.q(),
    })
}

/// A signed direction `(δf, δg)` sampled on the scan grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub f: Option<Vec<f64>>,
    pub g: Option<Vec<f64>>,
}

impl Perturbation {
    pub fn none() -> Self {
        Self { f: None, g: None }
    }

    fn gaussian(rate: f64, grid: &Grid) -> Vec<f64> {
        let g = GaussianFn::unit_mass(rate).expect("positive rate");
        grid.points().map(|x| g.eval(x)).collect()
    }

    /// `δf = Γ_p'`: sliding `f` alone.
    pub fn translation(triple: &YoungTriple, grid: &Grid) -> Self {
        let p = triple.p();
        let base = Self::gaussian(p, grid);
        let f = grid.points().zip(&base).map(|(x, v)| -2.0 * p * x * v).collect();
        Self { f: Some(f), g: None }
    }

    /// `d/dσ` of `(Γ_p(x/σ), Γ_q(x/σ))` at `σ = 1`: a common dilation.
    pub fn dilation(triple: &YoungTriple, grid: &Grid) -> Self {
        let side = |rate: f64| {
            let base = Self::gaussian(rate, grid);
            grid.points().zip(&base).map(|(x, v)| 2.0 * rate * x * x * v).collect()
        };
        Self {
            f: Some(side(triple.p())),
            g: Some(side(triple.q())),
        }
    }

    /// `δf = Γ_p(x) b(√p x)` with the bounded profile `b(z) = z⁴ e^{-z²/2}`.
    pub fn quartic_bump(triple: &YoungTriple, grid: &Grid) -> Self {
        Self::profiled(triple, grid, |z| z.powi(4) * (-0.5 * z * z).exp(), true)
    }

    /// `δ = Γ(x) H_k(√rate x) e^{-rate x²/2}` with the physicists' Hermite
    /// polynomial `H_k`, applied to `f` (`on_f`) or to `g`.
    pub fn hermite(k: usize, triple: &YoungTriple, grid: &Grid, on_f: bool) -> Self {
        Self::profiled(triple, grid, move |z| hermite(k, z) * (-0.5 * z * z).exp(), on_f)
    }

    fn profiled(triple: &YoungTriple, grid: &Grid, profile: impl Fn(f64) -> f64, on_f: bool) -> Self {
        let rate = if on_f { triple.p() } else { triple.q() };
        let base = Self::gaussian(rate, grid);
        let raw: Vec<f64> = grid.points().map(|x| profile(rate.sqrt() * x)).collect();
        let sup = raw.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let values: Vec<f64> = raw.iter().zip(&base).map(|(b, v)| b / sup * v).collect();
        if on_f {
            Self {
                f: Some(values),
                g: None,
            }
        } else {
            Self {
                f: None,
                g: Some(values),
            }
        }
    }
}

fn hermite(k: usize, z: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * z);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = 2.0 * z * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Number of ε values in `[-eps_max, eps_max]`.
    pub steps: usize,
    pub eps_max: f64,
    /// Samples of the 1D grid carrying the Gaussian pair.
    pub grid_n: usize,
    pub check: CheckConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            steps: 5,
            eps_max: 0.1,
            grid_n: 2048,
            check: CheckConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub epsilon: f64,
    pub ratio: f64,
}

/// The pair `(Γ_p, Γ_q)` the scan starts from, on its grid.
pub fn gaussian_pair(triple: &YoungTriple, grid_n: usize) -> Result<(GridFunction, GridFunction)> {
    let grid = gaussian_pair_grid(triple, grid_n)?;
    Ok((
        sample_gaussian(&GaussianFn::unit_mass(triple.p())?, &grid),
        sample_gaussian(&GaussianFn::unit_mass(triple.q())?, &grid),
    ))
}

fn perturbed(base: &GridFunction, delta: Option<&Vec<f64>>, eps: f64) -> Result<GridFunction> {
    let Some(delta) = delta else {
        return Ok(base.clone());
    };
    if delta.len() != base.values().len() {
        return Err(Error::InvalidValues("perturbation has the wrong length".into()));
    }
    let values: Vec<f64> = base.values().iter().zip(delta).map(|(b, d)| b + eps * d).collect();
    if values.iter().any(|v| *v < 0.0) {
        return Err(Error::NegativePerturbation(eps));
    }
    GridFunction::new(*base.grid(), values)?.normalized()
}

/// Sharp-form ratios along `(Γ_p + ε δf, Γ_q + ε δg)`, each side
/// renormalized to unit mass.
pub fn stationarity_scan(
    triple: &YoungTriple,
    direction: &Perturbation,
    config: &ScanConfig,
) -> Result<Vec<ScanPoint>> {
    triple.require_strict()?;
    let (f0, g0) = gaussian_pair(triple, config.grid_n)?;
    let eps = crate::constants::linspace(-config.eps_max, config.eps_max, config.steps);
    // validate every ε before spending quadrature on any of them
    let pairs = eps
        .iter()
        .map(|&e| {
            Ok((
                e,
                perturbed(&f0, direction.f.as_ref(), e)?,
                perturbed(&g0, direction.g.as_ref(), e)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    pairs
        .par_iter()
        .map(|(e, f, g)| {
            Ok(ScanPoint {
                epsilon: *e,
                ratio: verify_sharp_form(f, g, triple, &config.check)?.ratio,
            })
        })
        .collect()
}

/// Central first and second differences at the scan point nearest `ε = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaritySummary {
    pub first_derivative: f64,
    pub second_difference: f64,
    pub step: f64,
}

pub fn summarize_scan(points: &[ScanPoint]) -> Option<StationaritySummary> {
    let mid = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.epsilon.abs().total_cmp(&b.1.epsilon.abs()))?
        .0;
    if mid == 0 || mid + 1 >= points.len() {
        return None;
    }
    let (lo, c, hi) = (points[mid - 1], points[mid], points[mid + 1]);
    let step = 0.5 * (hi.epsilon - lo.epsilon);
    Some(StationaritySummary {
        first_derivative: (hi.ratio - lo.ratio) / (2.0 * step),
        second_difference: hi.ratio + lo.ratio - 2.0 * c.ratio,
        step,
    })
}
