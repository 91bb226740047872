//! Both sides of the rotated-coordinates form of the sharp Young inequality
//! and of the monotone-transport lemma, evaluated by 2D quadrature.
//!
//! All integrals use an `n × n` tensor grid in the unrotated variables; the
//! rotated arguments are evaluated by linear interpolation of the samples.
//! The inner integral is tabulated once per outer abscissa.

use serde::{Deserialize, Serialize};

use crate::constants::k_constant;
use crate::error::{Error, Result};
use crate::exponents::{Regime, RotationPair, YoungTriple};
use crate::function::{trapezoid, GaussianFn, Grid, GridFunction};
use crate::quadrature::Window2d;

/// Relative tolerance on the mass pairing `∫f = ∫F`, `∫g = ∫G`.
pub const MASS_MATCH_TOL: f64 = 1e-6;

/// Default relative tolerance for inequality checks at `n = 1024`.
pub const DEFAULT_TOLERANCE: f64 = 5e-3;

/// Tolerance at `n = 2048`.
pub const REFINED_TOLERANCE: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n: usize,
    pub window: [f64; 2],
}

/// Outcome of one inequality check. `ratio = lhs / rhs` where `rhs` is the
/// bound side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub regime: Regime,
    pub tolerance: f64,
    pub status: Status,
    pub grid: GridMeta,
}

impl VerificationReport {
    /// Classical checks pass when `ratio <= 1 + tol`, Reverse ones when
    /// `ratio >= 1 - tol`.
    pub fn new(lhs: f64, rhs: f64, regime: Regime, tolerance: f64, window: &Window2d) -> Self {
        let (lo, hi) = window.enclosing_square();
        let grid = GridMeta {
            n: window.n(),
            window: [lo, hi],
        };
        let ratio = lhs / rhs;
        let status = if !(rhs > 0.0) || !ratio.is_finite() {
            Status::Degenerate
        } else {
            let ok = match regime {
                Regime::Classical => ratio <= 1.0 + tolerance,
                Regime::Reverse => ratio >= 1.0 - tolerance,
                Regime::Boundary => false,
            };
            if ok {
                Status::Pass
            } else {
                Status::Fail
            }
        };
        Self {
            lhs,
            rhs,
            ratio,
            regime,
            tolerance,
            status,
            grid,
        }
    }

    pub fn degenerate(regime: Regime, tolerance: f64, n: usize) -> Self {
        Self {
            lhs: 0.0,
            rhs: 0.0,
            ratio: f64::NAN,
            regime,
            tolerance,
            status: Status::Degenerate,
            grid: GridMeta {
                n,
                window: [f64::NAN, f64::NAN],
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Quadrature resolution and tolerance shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    /// Per-axis count of the 2D tensor grid.
    pub n: usize,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            n: crate::quadrature::DEFAULT_2D_N,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl CheckConfig {
    pub fn with_n(n: usize) -> Self {
        Self { n, ..Self::default() }
    }
}

/// `∫ (∫ φ(A₀·(x,y)) ψ(A₁·(x,y)) dx)^γ dy` with `φ`, `ψ` already powered.
/// Returns the window, the tabulated inner integrals and the outer value.
struct NestedForm {
    window: Window2d,
    inner: Vec<f64>,
    value: f64,
}

fn nested_form(
    phi: &GridFunction,
    psi: &GridFunction,
    forms: [[f64; 2]; 2],
    outer_power: f64,
    n: usize,
) -> Result<NestedForm> {
    let window = Window2d::covering(
        forms,
        [(phi.grid().lo(), phi.grid().hi()), (psi.grid().lo(), psi.grid().hi())],
        n,
    )?;
    let [[a, b], [c, d]] = forms;
    let inner = window.row_integrals(|x, y| {
        let u = phi.eval(a * x + b * y);
        if u == 0.0 {
            return 0.0;
        }
        u * psi.eval(c * x + d * y)
    });
    let powered: Vec<f64> = inner
        .iter()
        .map(|&v| if v > 0.0 { v.powf(outer_power) } else { 0.0 })
        .collect();
    let value = trapezoid(&powered, window.y.step());
    Ok(NestedForm { window, inner, value })
}

fn rotated_forms(rot: &RotationPair) -> [[f64; 2]; 2] {
    [[rot.c, -rot.s], [rot.s, rot.c]]
}

fn check_positive_mass(f: &GridFunction) -> Result<f64> {
    let m = f.integrate();
    if m > 0.0 {
        Ok(m)
    } else {
        Err(Error::ZeroMass)
    }
}

/// `(∫ (∫ f^{1/p}(cx - sy) g^{1/q}(sx + cy) dx)^r dy)^{1/r}`.
pub fn bilinear_form(f: &GridFunction, g: &GridFunction, triple: &YoungTriple, n: usize) -> Result<f64> {
    Ok(bilinear_parts(f, g, triple, n)?.value)
}

fn bilinear_parts(f: &GridFunction, g: &GridFunction, triple: &YoungTriple, n: usize) -> Result<NestedForm> {
    let rot = triple.rotation()?;
    let phi = f.powered(1.0 / triple.p());
    let psi = g.powered(1.0 / triple.q());
    let mut form = nested_form(&phi, &psi, rotated_forms(&rot), triple.r(), n)?;
    form.value = if form.value > 0.0 {
        form.value.powf(1.0 / triple.r())
    } else {
        0.0
    };
    Ok(form)
}

/// `∫ (∫ F^{r/p}(cX - sY) G^{r/q}(sX + cY) dY)^{1/r} dX`.
pub fn transport_bound(big_f: &GridFunction, big_g: &GridFunction, triple: &YoungTriple, n: usize) -> Result<f64> {
    let rot = triple.rotation()?;
    let r = triple.r();
    let phi = big_f.powered(r / triple.p());
    let psi = big_g.powered(r / triple.q());
    // inner variable first: F's argument is -s·Y + c·X, G's is c·Y + s·X
    let forms = [[-rot.s, rot.c], [rot.c, rot.s]];
    Ok(nested_form(&phi, &psi, forms, 1.0 / r, n)?.value)
}

/// Closed form of [`bilinear_form`] for Gaussian inputs. Centers do not
/// matter: the form is invariant under translating either input.
pub fn gaussian_closed_form(fa: &GaussianFn, ga: &GaussianFn, triple: &YoungTriple) -> Result<f64> {
    let rot = triple.rotation()?;
    let (p, q, r) = (triple.p(), triple.q(), triple.r());
    if fa.amplitude() == 0.0 || ga.amplitude() == 0.0 {
        return Ok(0.0);
    }
    let a = fa.rate() / p;
    let b = ga.rate() / q;
    // quadratic form A(cx - sy)² + B(sx + cy)²: x² coefficient P,
    // and the y² coefficient left after integrating x is AB / P
    let x_coeff = a * rot.c * rot.c + b * rot.s * rot.s;
    let y_coeff = a * b / x_coeff;
    let pi = std::f64::consts::PI;
    let log_amp = fa.amplitude().ln() / p + ga.amplitude().ln() / q;
    let log_value = log_amp + 0.5 * (pi / x_coeff).ln() + (pi / (r * y_coeff)).ln() / (2.0 * r);
    Ok(log_value.exp())
}

/// `K (∫f)^{1/p} (∫g)^{1/q}`.
pub fn sharp_bound(f: &GridFunction, g: &GridFunction, triple: &YoungTriple) -> f64 {
    k_constant(triple) * f.integrate().powf(1.0 / triple.p()) * g.integrate().powf(1.0 / triple.q())
}

pub fn verify_sharp_form(
    f: &GridFunction,
    g: &GridFunction,
    triple: &YoungTriple,
    config: &CheckConfig,
) -> Result<VerificationReport> {
    triple.require_strict()?;
    if check_positive_mass(f).is_err() || check_positive_mass(g).is_err() {
        return Ok(VerificationReport::degenerate(
            triple.regime(),
            config.tolerance,
            config.n,
        ));
    }
    let form = bilinear_parts(f, g, triple, config.n)?;
    let rhs = sharp_bound(f, g, triple);
    Ok(VerificationReport::new(
        form.value,
        rhs,
        triple.regime(),
        config.tolerance,
        &form.window,
    ))
}

/// Checks `bilinear_form(f, g) <= transport_bound(F, G)` for a Classical triple.
pub fn verify_transport_bound(
    f: &GridFunction,
    g: &GridFunction,
    big_f: &GridFunction,
    big_g: &GridFunction,
    triple: &YoungTriple,
    config: &CheckConfig,
) -> Result<VerificationReport> {
    if triple.regime() != Regime::Classical {
        return Err(Error::WrongRegime { expected: "Classical" });
    }
    for (a, b) in [(f, big_f), (g, big_g)] {
        let (ma, mb) = (check_positive_mass(a)?, check_positive_mass(b)?);
        if (ma - mb).abs() > MASS_MATCH_TOL * ma.max(mb) {
            return Err(Error::MassMismatch(ma, mb));
        }
    }
    let form = bilinear_parts(f, g, triple, config.n)?;
    let rhs = transport_bound(big_f, big_g, triple, config.n)?;
    Ok(VerificationReport::new(
        form.value,
        rhs,
        Regime::Classical,
        config.tolerance,
        &form.window,
    ))
}

/// The extremal `h ∝ inner^{r-1}` with `‖h‖_{r'} = 1`, on the outer grid.
pub fn dual_witness(f: &GridFunction, g: &GridFunction, triple: &YoungTriple, n: usize) -> Result<GridFunction> {
    if triple.regime() != Regime::Classical {
        return Err(Error::WrongRegime { expected: "Classical" });
    }
    let form = bilinear_parts(f, g, triple, n)?;
    let r = triple.r();
    let rc = crate::exponents::conjugate(r)?;
    let raw: Vec<f64> = form
        .inner
        .iter()
        .map(|&v| if v > 0.0 { v.powf(r - 1.0) } else { 0.0 })
        .collect();
    let raw = GridFunction::new(form.window.y, raw)?;
    let norm = raw.p_functional(rc)?;
    if !(norm > 0.0) {
        return Err(Error::RatioUndefined("inner integral vanishes identically"));
    }
    raw.scaled(1.0 / norm)
}

/// `∫∫ f^{1/p}(cx - sy) g^{1/q}(sx + cy) h(y) dx dy` summed point by point
/// over the same window the witness was built on.
pub fn duality_pairing(f: &GridFunction, g: &GridFunction, h: &GridFunction, triple: &YoungTriple) -> Result<f64> {
    let rot = triple.rotation()?;
    let phi = f.powered(1.0 / triple.p());
    let psi = g.powered(1.0 / triple.q());
    let window = Window2d::new(*h.grid(), *h.grid());
    Ok(window.integrate(|x, y| {
        let (u, v) = rot.rotate(x, y);
        phi.eval(u) * psi.eval(v) * h.eval(y)
    }))
}

/// The factor `c^{1/q - 1} s^{1/r - 1/q}` with
/// `bilinear_form(φ^p, ψ^q) / (‖φ‖_p ‖ψ‖_q) = factor · ‖φ * χ‖_r / (‖φ‖_p ‖χ‖_q)`
/// where `ψ(w) = χ(-(c/s) w)`. In particular `K = factor · young_constant`.
pub fn convolution_form_factor(triple: &YoungTriple) -> Result<f64> {
    let rot = triple.rotation()?;
    let (q, r) = (triple.q(), triple.r());
    Ok(rot.c.powf(1.0 / q - 1.0) * rot.s.powf(1.0 / r - 1.0 / q))
}

/// Turns a convolution partner `χ` into the second argument of the
/// rotated form: `ψ(w) = χ(-(c/s) w)`.
pub fn rotated_partner(chi: &GridFunction, triple: &YoungTriple) -> Result<GridFunction> {
    let rot = triple.rotation()?;
    chi.reflected().dilated(rot.s / rot.c)
}

/// The window used for Gaussian equality checks with rates `(p, q)`:
/// `±8 / sqrt(min rate)`.
pub fn gaussian_pair_grid(triple: &YoungTriple, n: usize) -> Result<Grid> {
    let min_rate = triple.p().min(triple.q());
    Grid::symmetric(8.0 / min_rate.sqrt(), n)
}

/// A Gaussian of the given rate on `f`'s grid, centered at `f`'s mean and
/// scaled to `f`'s quadrature mass.
pub fn mass_matched_gaussian(f: &GridFunction, rate: f64) -> Result<GridFunction> {
    let (mass, mean, _) = f.moments()?;
    let g = crate::function::sample_gaussian(&GaussianFn::new(1.0, rate, mean)?, f.grid());
    g.scaled(mass / g.integrate())
}
