//! Monotone transport between one-dimensional densities, and the rotated
//! two-dimensional change of variables built from two such maps.
//!
//! Each density is modelled by a monotone cubic Hermite interpolant of its
//! cumulative integral. The interpolant's derivative is the continuous
//! density used everywhere below, so a map `u` and its slope
//! `u'(t) = F(t) / f(u(t))` are exact derivatives of one another.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::RotationPair;
use crate::function::{Grid, GridFunction};
use crate::quadrature::Window2d;

/// Quantile levels excluded at each end when resolving a map.
pub const TAIL_QUANTILE: f64 = 1e-3;

/// Relative tolerance on `∫f = ∫F`.
pub const MAP_MASS_TOL: f64 = 1e-8;

/// Fraction by which each resolved window is shrunk for 2D evaluation.
pub const WINDOW_SHRINK: f64 = 0.05;

/// Monotone cubic model of `t ↦ ∫_{lo}^{t} f`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCdf {
    grid: Grid,
    levels: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCdf {
    /// Cumulative trapezoid with the Euler–Maclaurin endpoint correction
    /// `-h²/12 (f'(t) - f'(lo))`, then Fritsch–Carlson limited slopes.
    pub fn new(f: &GridFunction) -> Result<Self> {
        let grid = *f.grid();
        let h = grid.step();
        let v = f.values();
        let dv = f.derivative_samples();
        let mut levels = Vec::with_capacity(v.len());
        levels.push(0.0);
        for i in 1..v.len() {
            let trap = 0.5 * h * (v[i - 1] + v[i]);
            let corrected = trap - h * h * (dv[i] - dv[i - 1]) / 12.0;
            let inc = if corrected > 0.0 { corrected } else { trap };
            levels.push(levels[i - 1] + inc);
        }
        if !(levels[levels.len() - 1] > 0.0) {
            return Err(Error::ZeroMass);
        }
        let mut slopes = v.to_vec();
        for i in 0..v.len() - 1 {
            let secant = (levels[i + 1] - levels[i]) / h;
            // flat only through rounding in the far tails; keep the samples
            if secant <= 0.0 {
                continue;
            }
            let a = slopes[i] / secant;
            let b = slopes[i + 1] / secant;
            let norm = a * a + b * b;
            if norm > 9.0 {
                let tau = 3.0 / norm.sqrt();
                slopes[i] = tau * a * secant;
                slopes[i + 1] = tau * b * secant;
            }
        }
        Ok(Self { grid, levels, slopes })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn total(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.grid.n();
        let pos = ((x - self.grid.lo()) / self.grid.step()).clamp(0.0, (n - 1) as f64);
        let i = (pos as usize).min(n - 2);
        (i, pos - i as f64)
    }

    fn cubic(&self, i: usize, t: f64) -> f64 {
        let h = self.grid.step();
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.levels[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.levels[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1]
    }

    fn cubic_slope(&self, i: usize, t: f64) -> f64 {
        let h = self.grid.step();
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * (self.levels[i] - self.levels[i + 1])) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.slopes[i]
            + (3.0 * t2 - 2.0 * t) * self.slopes[i + 1]
    }

    /// Cumulative mass, clamped to `[0, total]` outside the window.
    pub fn eval(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        self.cubic(i, t)
    }

    /// The modelled density (derivative of [`Self::eval`]).
    pub fn density(&self, x: f64) -> f64 {
        if !self.grid.contains(x) {
            return 0.0;
        }
        let (i, t) = self.locate(x);
        self.cubic_slope(i, t)
    }

    /// The point where the cumulative mass reaches `level`.
    pub fn inverse(&self, level: f64) -> f64 {
        let level = level.clamp(0.0, self.total());
        let k = self.levels.partition_point(|&c| c <= level);
        let i = k.saturating_sub(1).min(self.grid.n() - 2);
        let (c0, c1) = (self.levels[i], self.levels[i + 1]);
        if c1 <= c0 {
            return self.grid.point(i);
        }
        // safeguarded Newton on the monotone cubic
        let (mut a, mut b) = (0.0, 1.0);
        let mut t = ((level - c0) / (c1 - c0)).clamp(0.0, 1.0);
        let h = self.grid.step();
        for _ in 0..60 {
            let r = self.cubic(i, t) - level;
            if r.abs() <= 1e-17 * self.total().max(1e-300) {
                break;
            }
            if r > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let d = self.cubic_slope(i, t) * h;
            let newton = t - r / d;
            t = if d > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if b - a < 1e-16 {
                break;
            }
        }
        self.grid.lo() + (i as f64 + t) * h
    }
}

/// Cumulative integral table from `lo`, on the function's own grid.
pub fn cdf(f: &GridFunction) -> Result<GridFunction> {
    let model = MonotoneCdf::new(f)?;
    GridFunction::new(*f.grid(), model.levels)
}

/// The increasing map `u` with `∫_{-∞}^{u(t)} f = ∫_{-∞}^{t} F`.
#[derive(Debug, Clone)]
pub struct TransportMap {
    source: GridFunction,
    target: GridFunction,
    source_cdf: MonotoneCdf,
    target_cdf: MonotoneCdf,
    mass_ratio: f64,
    /// `u` at the target grid points.
    pub values: Vec<f64>,
    /// `u'` at the target grid points, from `u'(t) f(u(t)) = F(t)`.
    pub derivative: Vec<f64>,
    /// `|ũ'(t) f(u(t)) - F(t)|` with `ũ'` the 4th-order central difference of
    /// `values`; NaN where the stencil does not fit.
    pub pointwise_residual: Vec<f64>,
    /// Max of `pointwise_residual` over the resolved window.
    pub residual: f64,
    window: (f64, f64),
}

/// One row of the dumped table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MapRow {
    pub t: f64,
    pub u: f64,
    pub uprime: f64,
    pub residual: f64,
}

pub fn monotone_map(source: &GridFunction, target: &GridFunction) -> Result<TransportMap> {
    let (ms, mt) = (source.integrate(), target.integrate());
    if !(ms > 0.0) || !(mt > 0.0) {
        return Err(Error::ZeroMass);
    }
    if (ms - mt).abs() > MAP_MASS_TOL * ms.max(mt) {
        return Err(Error::MassMismatch(ms, mt));
    }
    if source.values().iter().any(|v| *v <= 0.0) || target.values().iter().any(|v| *v <= 0.0) {
        return Err(Error::MapNotDifferentiable);
    }
    let source_cdf = MonotoneCdf::new(source)?;
    let target_cdf = MonotoneCdf::new(target)?;
    let mass_ratio = source_cdf.total() / target_cdf.total();

    let grid = *target.grid();
    let values: Vec<f64> = target_cdf
        .levels()
        .iter()
        .map(|&level| source_cdf.inverse(level * mass_ratio))
        .collect();
    let derivative: Vec<f64> = grid
        .points()
        .zip(&values)
        .map(|(t, &u)| mass_ratio * target_cdf.density(t) / source_cdf.density(u))
        .collect();

    let tail = TAIL_QUANTILE * target_cdf.total();
    let window = (target_cdf.inverse(tail), target_cdf.inverse(target_cdf.total() - tail));

    let h = grid.step();
    let n = grid.n();
    let mut pointwise_residual = vec![f64::NAN; n];
    let mut residual: f64 = 0.0;
    for i in 2..n.saturating_sub(2) {
        let fd = (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2]) / (12.0 * h);
        let r = (fd * source_cdf.density(values[i]) - mass_ratio * target.values()[i]).abs();
        pointwise_residual[i] = r;
        let t = grid.point(i);
        if t >= window.0 && t <= window.1 {
            residual = residual.max(r);
        }
    }

    Ok(TransportMap {
        source: source.clone(),
        target: target.clone(),
        source_cdf,
        target_cdf,
        mass_ratio,
        values,
        derivative,
        pointwise_residual,
        residual,
        window,
    })
}

impl TransportMap {
    pub fn source(&self) -> &GridFunction {
        &self.source
    }

    pub fn target(&self) -> &GridFunction {
        &self.target
    }

    /// Target-space interval between the outer `TAIL_QUANTILE` quantiles.
    pub fn resolved_window(&self) -> (f64, f64) {
        self.window
    }

    /// `u(t)` from the cubic models, for any `t` in the target window.
    pub fn map(&self, t: f64) -> f64 {
        self.source_cdf.inverse(self.target_cdf.eval(t) * self.mass_ratio)
    }

    /// `u'(t) = F(t) / f(u(t))`.
    pub fn slope(&self, t: f64) -> f64 {
        self.mass_ratio * self.target_cdf.density(t) / self.source_cdf.density(self.map(t))
    }

    pub fn rows(&self) -> Vec<MapRow> {
        self.target
            .grid()
            .points()
            .enumerate()
            .map(|(i, t)| MapRow {
                t,
                u: self.values[i],
                uprime: self.derivative[i],
                residual: self.pointwise_residual[i],
            })
            .collect()
    }

    /// CSV table `t,u,uprime,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,u,uprime,residual\n");
        for row in self.rows() {
            out.push_str(&format!("{},{},{},{}\n", row.t, row.u, row.uprime, row.residual));
        }
        out
    }
}

/// `Θ = Rᵀ T R` with `T(x, y) = (u(x), v(y))`.
#[derive(Debug, Clone)]
pub struct RotatedTransport {
    pub u: TransportMap,
    pub v: TransportMap,
    pub rotation: RotationPair,
}

fn shrink((lo, hi): (f64, f64)) -> (f64, f64) {
    let pad = 0.5 * WINDOW_SHRINK * (hi - lo);
    (lo + pad, hi - pad)
}

impl RotatedTransport {
    pub fn new(u: TransportMap, v: TransportMap, rotation: RotationPair) -> Self {
        Self { u, v, rotation }
    }

    /// Windows in which `u` and `v` may be evaluated.
    pub fn windows(&self) -> [(f64, f64); 2] {
        [shrink(self.u.resolved_window()), shrink(self.v.resolved_window())]
    }

    fn arguments(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (a1, a2) = self.rotation.rotate(x, y);
        let [wu, wv] = self.windows();
        if !(a1 >= wu.0 && a1 <= wu.1) {
            return Err(Error::OutOfWindow(a1, wu.0, wu.1));
        }
        if !(a2 >= wv.0 && a2 <= wv.1) {
            return Err(Error::OutOfWindow(a2, wv.0, wv.1));
        }
        Ok((a1, a2))
    }

    /// `Θ(X, Y) = (c u + s v, -s u + c v)` at `u = u(cX - sY)`, `v = v(sX + cY)`.
    pub fn theta(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (a1, a2) = self.arguments(x, y)?;
        Ok(self.rotation.unrotate(self.u.map(a1), self.v.map(a2)))
    }

    /// `JΘ(X, Y) = u'(cX - sY) v'(sX + cY)`.
    pub fn jacobian(&self, x: f64, y: f64) -> Result<f64> {
        let (a1, a2) = self.arguments(x, y)?;
        Ok(self.u.slope(a1) * self.v.slope(a2))
    }

    /// `a(X, Y) = -s u(cX - sY) + c v(sX + cY)`.
    pub fn a(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.theta(x, y)?.1)
    }

    /// `∂a/∂Y = s² u'(cX - sY) + c² v'(sX + cY)`.
    pub fn da_dy(&self, x: f64, y: f64) -> Result<f64> {
        let (a1, a2) = self.arguments(x, y)?;
        let RotationPair { c, s } = self.rotation;
        Ok(s * s * self.u.slope(a1) + c * c * self.v.slope(a2))
    }

    /// `s² U' + c² V' - U'^{s²} V'^{c²}`; zero iff `U' = V'`.
    pub fn amgm_gap(&self, x: f64, y: f64) -> Result<f64> {
        let (a1, a2) = self.arguments(x, y)?;
        Ok(amgm_gap(self.u.slope(a1), self.v.slope(a2), &self.rotation))
    }

    /// `Y`-interval on which `(X, Y)` stays inside both windows.
    pub fn y_range(&self, x: f64) -> Option<(f64, f64)> {
        let RotationPair { c, s } = self.rotation;
        let [wu, wv] = self.windows();
        // cX - sY ∈ wu and sX + cY ∈ wv
        let lo = ((c * x - wu.1) / s).max((wv.0 - s * x) / c);
        let hi = ((c * x - wu.0) / s).min((wv.1 - s * x) / c);
        (lo < hi).then_some((lo, hi))
    }

    /// `(∫ k(a(X, Y)) ∂a/∂Y dY, ∫ k)` at fixed `X`, with `n` samples in `Y`.
    pub fn substitution_mass(&self, x: f64, k: &GridFunction, n: usize) -> Result<(f64, f64)> {
        let (lo, hi) = self.y_range(x).ok_or(Error::OutOfWindow(x, f64::NAN, f64::NAN))?;
        let grid = Grid::new(lo, hi, n)?;
        let mut samples = Vec::with_capacity(n);
        for y in grid.points() {
            samples.push(k.eval(self.a(x, y)?) * self.da_dy(x, y)?);
        }
        let lhs = crate::function::trapezoid(&samples, grid.step());
        Ok((lhs, k.integrate()))
    }

    /// `(∫∫ φ(x, y) dx dy, ∫∫ φ(Θ(X, Y)) JΘ(X, Y) dX dY)`.
    ///
    /// Both integrals run over `n × n` tensor grids on the bounding boxes of
    /// the evaluation domain and its image. The integrand must be
    /// negligible near the domain edge: if more than `leak_tol` of either
    /// integral sits in the outer 5% band, the check errors.
    pub fn change_of_variables_check<F>(&self, phi: F, n: usize, leak_tol: f64) -> Result<(f64, f64)>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let rot = self.rotation;
        let [wu, wv] = self.windows();

        // source side: rotated rectangle wu × wv pulled back by R
        let forms = [[rot.c, -rot.s], [rot.s, rot.c]];
        let source = Window2d::covering(forms, [wu, wv], n)?;
        let band = |t: f64, (lo, hi): (f64, f64)| {
            let pad = 0.5 * WINDOW_SHRINK * (hi - lo);
            t < lo + pad || t > hi - pad
        };
        let rhs_integrand = |x: f64, y: f64, edge_only: bool| {
            let (a1, a2) = rot.rotate(x, y);
            if !(a1 >= wu.0 && a1 <= wu.1 && a2 >= wv.0 && a2 <= wv.1) {
                return 0.0;
            }
            if edge_only && !(band(a1, wu) || band(a2, wv)) {
                return 0.0;
            }
            let (u, v) = (self.u.map(a1), self.v.map(a2));
            let (px, py) = rot.unrotate(u, v);
            phi(px, py) * self.u.slope(a1) * self.v.slope(a2)
        };
        let rhs = source.integrate(|x, y| rhs_integrand(x, y, false));
        let rhs_edge = source.integrate(|x, y| rhs_integrand(x, y, true).abs());

        // image side: Rᵀ applied to u(wu) × v(wv)
        let iu = (self.u.map(wu.0), self.u.map(wu.1));
        let iv = (self.v.map(wv.0), self.v.map(wv.1));
        let image = Window2d::covering(forms, [iu, iv], n)?;
        let lhs_integrand = |x: f64, y: f64, edge_only: bool| {
            let (a1, a2) = rot.rotate(x, y);
            if !(a1 >= iu.0 && a1 <= iu.1 && a2 >= iv.0 && a2 <= iv.1) {
                return 0.0;
            }
            if edge_only && !(band(a1, iu) || band(a2, iv)) {
                return 0.0;
            }
            phi(x, y)
        };
        let lhs = image.integrate(|x, y| lhs_integrand(x, y, false));
        let lhs_edge = image.integrate(|x, y| lhs_integrand(x, y, true).abs());

        for (edge, total) in [(rhs_edge, rhs), (lhs_edge, lhs)] {
            let frac = edge / total.abs().max(f64::MIN_POSITIVE);
            if frac > leak_tol {
                return Err(Error::SupportLeakage(frac, leak_tol));
            }
        }
        Ok((lhs, rhs))
    }
}

/// `s² U' + c² V' - U'^{s²} V'^{c²}` for the given slopes.
pub fn amgm_gap(u_slope: f64, v_slope: f64, rotation: &RotationPair) -> f64 {
    let (c2, s2) = (rotation.c * rotation.c, rotation.s * rotation.s);
    let arithmetic = s2 * u_slope + c2 * v_slope;
    let geometric = (s2 * u_slope.ln() + c2 * v_slope.ln()).exp();
    (arithmetic - geometric).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{random_density, sample_gaussian, GaussianFn};
    use approx::assert_relative_eq;

    fn unit_gaussian(rate: f64, grid: &Grid) -> GridFunction {
        sample_gaussian(&GaussianFn::unit_mass(rate).unwrap(), grid)
            .normalized()
            .unwrap()
    }

    #[test]
    fn cdf_examples() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let one = GridFunction::from_fn(g, |_| 1.0).unwrap();
        let c = cdf(&one).unwrap();
        for (t, v) in g.points().zip(c.values()) {
            assert_relative_eq!(*v, t, epsilon = 1e-14);
        }
        let grid = Grid::standard();
        let gauss = unit_gaussian(1.0, &grid);
        let model = MonotoneCdf::new(&gauss).unwrap();
        assert!((model.eval(0.0) - 0.5).abs() < 1e-8);
        let f = random_density(3, &grid, 0.4).unwrap();
        let c = cdf(&f).unwrap();
        assert_relative_eq!(c.values()[grid.n() - 1], f.integrate(), max_relative = 1e-12);
        assert!(c.values().windows(2).all(|w| w[1] >= w[0]));
        let (lo, hi) = (m_inverse(&f, 1e-3), m_inverse(&f, 1.0 - 1e-3));
        let strict = grid.points().zip(c.values()).filter(|(t, _)| *t >= lo && *t <= hi);
        let strict: Vec<f64> = strict.map(|(_, v)| *v).collect();
        assert!(strict.windows(2).all(|w| w[1] > w[0]));
        assert!(cdf(&GridFunction::zeros(grid)).is_err());
    }

    fn m_inverse(f: &GridFunction, level: f64) -> f64 {
        MonotoneCdf::new(f).unwrap().inverse(level)
    }

    #[test]
    fn inverse_inverts() {
        let f = random_density(4, &Grid::standard(), 0.4).unwrap();
        let m = MonotoneCdf::new(&f).unwrap();
        for level in [1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
            assert_relative_eq!(m.eval(m.inverse(level)), level, max_relative = 1e-12);
        }
    }

    #[test]
    fn identity_map() {
        let f = random_density(5, &Grid::standard(), 0.4).unwrap();
        let map = monotone_map(&f, &f).unwrap();
        let (lo, hi) = map.resolved_window();
        for (t, u) in f.grid().points().zip(&map.values) {
            if t >= lo && t <= hi {
                assert!((t - u).abs() < 1e-10);
            }
        }
        assert!(map.residual < 1e-10, "{}", map.residual);
    }

    #[test]
    fn gaussian_scaling_map() {
        let grid = Grid::standard();
        let map = monotone_map(&unit_gaussian(1.0, &grid), &unit_gaussian(4.0, &grid)).unwrap();
        let (lo, hi) = map.resolved_window();
        for (i, t) in grid.points().enumerate() {
            if t >= lo && t <= hi {
                assert!((map.values[i] - 2.0 * t).abs() < 1e-6, "t = {t}");
                assert!((map.derivative[i] - 2.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn random_to_gaussian_residual() {
        let grid = Grid::standard();
        let target = unit_gaussian(1.0, &grid);
        for seed in 0..5 {
            let source = random_density(seed, &grid, 0.35).unwrap();
            let map = monotone_map(&source, &target).unwrap();
            assert!(map.residual < 1e-4, "seed {seed}: {}", map.residual);
            let (lo, hi) = map.resolved_window();
            let inside: Vec<f64> = grid
                .points()
                .zip(&map.values)
                .filter(|(t, _)| *t >= lo && *t <= hi)
                .map(|(_, u)| *u)
                .collect();
            assert!(inside.windows(2).all(|w| w[1] > w[0]));
            assert!(map.derivative.iter().all(|d| *d > 0.0));
        }
    }

    #[test]
    fn composition_is_identity() {
        let grid = Grid::standard();
        let f = random_density(6, &grid, 0.4).unwrap();
        let big_f = unit_gaussian(2.0, &grid);
        let forward = monotone_map(&f, &big_f).unwrap();
        let back = monotone_map(&big_f, &f).unwrap();
        let (lo, hi) = back.resolved_window();
        for x in grid.points().filter(|x| *x >= lo && *x <= hi) {
            assert!((forward.map(back.map(x)) - x).abs() < 1e-5);
        }
    }

    #[test]
    fn map_errors() {
        let grid = Grid::standard();
        let f = random_density(1, &grid, 0.4).unwrap();
        assert!(matches!(
            monotone_map(&f.scaled(1.01).unwrap(), &f),
            Err(Error::MassMismatch(..))
        ));
        let mut holes = f.values().to_vec();
        holes[100] = 0.0;
        let holes = GridFunction::new(grid, holes).unwrap().normalized().unwrap();
        let target = f.normalized().unwrap();
        assert!(matches!(
            monotone_map(&holes, &target.scaled(holes.integrate() / target.integrate()).unwrap()),
            Err(Error::MapNotDifferentiable)
        ));
    }

    fn linear_transport(su: f64, sv: f64) -> RotatedTransport {
        // f = dilation of F by `slope` gives u(t) = slope·t
        let grid = Grid::symmetric(20.0, 4001).unwrap();
        let map = |slope: f64| {
            let big_f = unit_gaussian(1.0, &grid);
            let f = unit_gaussian(1.0 / (slope * slope), &grid);
            let f = f.scaled(big_f.integrate() / f.integrate()).unwrap();
            monotone_map(&f, &big_f).unwrap()
        };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        RotatedTransport::new(map(su), map(sv), RotationPair { c: h, s: h })
    }

    #[test]
    fn jacobian_examples() {
        let id = linear_transport(1.0, 1.0);
        let scaled = linear_transport(2.0, 3.0);
        for (x, y) in [(0.0, 0.0), (0.5, -0.3), (-1.0, 0.2)] {
            assert_relative_eq!(id.jacobian(x, y).unwrap(), 1.0, max_relative = 1e-7);
            assert_relative_eq!(scaled.jacobian(x, y).unwrap(), 6.0, max_relative = 1e-7);
        }
        assert!(matches!(id.jacobian(50.0, 0.0), Err(Error::OutOfWindow(..))));
    }

    #[test]
    fn amgm_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rot = RotationPair { c: h, s: h };
        assert!(amgm_gap(3.0, 3.0, &rot) < 1e-14);
        assert_relative_eq!(amgm_gap(1.0, 4.0, &rot), 0.5, epsilon = 1e-14);
        let equal = linear_transport(1.5, 1.5);
        assert!(equal.amgm_gap(0.3, -0.2).unwrap() < 1e-10);
    }

    #[test]
    fn change_of_variables_identity_maps() {
        let grid = Grid::symmetric(10.0, 2001).unwrap();
        let big_f = unit_gaussian(1.0, &grid);
        let id = || monotone_map(&big_f, &big_f).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rt = RotatedTransport::new(id(), id(), RotationPair { c: h, s: h });
        let phi = |x: f64, y: f64| (-3.0 * (x * x + y * y)).exp() * (1.0 + 0.2 * x);
        let (lhs, rhs) = rt.change_of_variables_check(phi, 256, 1e-3).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn change_of_variables_linear_maps() {
        let rt = linear_transport(1.5, 2.0);
        let phi = |x: f64, y: f64| (-2.0 * (x * x + y * y)).exp();
        let (lhs, rhs) = rt.change_of_variables_check(phi, 384, 1e-3).unwrap();
        let exact = std::f64::consts::PI / 2.0;
        assert_relative_eq!(lhs, exact, max_relative = 1e-9);
        assert_relative_eq!(rhs, exact, max_relative = 1e-7);
    }

    #[test]
    fn change_of_variables_detects_leakage() {
        let rt = linear_transport(1.0, 1.0);
        assert!(matches!(
            rt.change_of_variables_check(|_, _| 1.0, 128, 1e-3),
            Err(Error::SupportLeakage(..))
        ));
    }

    #[test]
    fn substitution_preserves_mass() {
        let grid = Grid::standard();
        let f = random_density(5, &grid, 0.4).unwrap();
        let g = random_density(6, &grid, 0.4).unwrap();
        let u = monotone_map(&f, &unit_gaussian(1.0, &grid).normalized().unwrap()).unwrap();
        let v = monotone_map(&g, &unit_gaussian(2.0, &grid).normalized().unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rt = RotatedTransport::new(u, v, RotationPair { c: h, s: h });
        let k = GridFunction::from_fn(grid, |t| (-8.0 * (t - 0.2) * (t - 0.2)).exp()).unwrap();
        let (lhs, mass) = rt.substitution_mass(0.0, &k, 4001).unwrap();
        assert_relative_eq!(lhs, mass, max_relative = 1e-6);
        for (x, y) in [(0.0, 0.0), (0.3, -0.2)] {
            assert!(rt.da_dy(x, y).unwrap() > 0.0);
            assert!(rt.amgm_gap(x, y).unwrap() >= 0.0);
        }
    }
}
