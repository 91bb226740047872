//! Young exponent triples, conjugate exponents and the rotation that turns
//! a convolution into a rotated two-variable integral.
//!
//! A triple `(p, q, r)` always satisfies `1/p + 1/q = 1 + 1/r`. It is built
//! from `(p, q)` so the relation holds by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents closer than this to 1 are treated as exactly 1.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Relative tolerance on the defining relation of a triple.
pub const RELATION_TOL: f64 = 1e-12;

/// Which of the two inequalities a triple belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `p, q, r > 1`: the forward inequality.
    Classical,
    /// `p, q, r < 1`: the reverse inequality.
    Reverse,
    /// Some exponent equals 1, or the exponents straddle 1.
    Boundary,
}

impl Regime {
    fn classify(p: f64, q: f64, r: f64) -> Self {
        let lo = p.min(q).min(r);
        let hi = p.max(q).max(r);
        if lo > 1.0 + BOUNDARY_EPS {
            Regime::Classical
        } else if hi < 1.0 - BOUNDARY_EPS {
            Regime::Reverse
        } else {
            Regime::Boundary
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Classical => "Classical",
            Regime::Reverse => "Reverse",
            Regime::Boundary => "Boundary",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Conjugate exponent `t'` with `1/t + 1/t' = 1`. Negative for `t < 1`.
pub fn conjugate(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("conjugate needs t > 0, got {t}")));
    }
    if (t - 1.0).abs() < BOUNDARY_EPS {
        return Err(Error::ConjugateAtBoundary);
    }
    Ok(t / (t - 1.0))
}

/// A validated exponent triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungTriple {
    p: f64,
    q: f64,
    r: f64,
    regime: Regime,
}

impl YoungTriple {
    /// Builds the triple with `r = 1 / (1/p + 1/q - 1)`.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let inv_r = 1.0 / p + 1.0 / q - 1.0;
        if !(inv_r > 0.0) || inv_r.abs() < RELATION_TOL {
            return Err(Error::RNotPositiveFinite(inv_r));
        }
        let r = 1.0 / inv_r;
        Ok(Self {
            p,
            q,
            r,
            regime: Regime::classify(p, q, r),
        })
    }

    /// Accepts an explicit `r` only if it agrees with the one implied by
    /// `(p, q)` to [`RELATION_TOL`] relative error.
    pub fn with_r(p: f64, q: f64, r: f64) -> Result<Self> {
        let t = Self::new(p, q)?;
        let defect = relation_defect(p, q, r);
        if !(defect < RELATION_TOL) {
            return Err(Error::RelationViolated(defect));
        }
        Ok(t)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Errors unless the triple is Classical or Reverse.
    pub fn require_strict(&self) -> Result<()> {
        if self.regime == Regime::Boundary {
            Err(Error::BoundaryRegime {
                p: self.p,
                q: self.q,
                r: self.r,
            })
        } else {
            Ok(())
        }
    }

    /// `(p', q', r')`; fails on boundary triples.
    pub fn conjugates(&self) -> Result<(f64, f64, f64)> {
        Ok((conjugate(self.p)?, conjugate(self.q)?, conjugate(self.r)?))
    }

    pub fn rotation(&self) -> Result<RotationPair> {
        rotation_params(self)
    }

    pub fn dual(&self) -> Result<Self> {
        dual_triple(self)
    }
}

impl std::fmt::Display for YoungTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}) [{}]", self.p, self.q, self.r, self.regime)
    }
}

/// `|1/p + 1/q - 1 - 1/r|` relative to `1 + 1/r`.
pub fn relation_defect(p: f64, q: f64, r: f64) -> f64 {
    let rhs = 1.0 + 1.0 / r;
    (1.0 / p + 1.0 / q - rhs).abs() / rhs.abs()
}

/// Shorthand for [`YoungTriple::new`].
pub fn make_triple(p: f64, q: f64) -> Result<YoungTriple> {
    YoungTriple::new(p, q)
}

/// The pair `(c, s) = (sqrt(r'/q'), sqrt(r'/p'))`, with `c^2 + s^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationPair {
    pub c: f64,
    pub s: f64,
}

impl RotationPair {
    /// `(cx - sy, sx + cy)`.
    #[inline]
    pub fn rotate(&self, x: f64, y: f64) -> (f64, f64) {
        (self.c * x - self.s * y, self.s * x + self.c * y)
    }

    /// Inverse rotation: `(cu + sv, -su + cv)`.
    #[inline]
    pub fn unrotate(&self, u: f64, v: f64) -> (f64, f64) {
        (self.c * u + self.s * v, -self.s * u + self.c * v)
    }

    pub fn swapped(&self) -> Self {
        Self { c: self.s, s: self.c }
    }
}

pub fn rotation_params(triple: &YoungTriple) -> Result<RotationPair> {
    triple.require_strict()?;
    let (pc, qc, rc) = triple.conjugates()?;
    // Same sign in both strict regimes, so both ratios are positive.
    let c = (rc / qc).sqrt();
    let s = (rc / pc).sqrt();
    Ok(RotationPair { c, s })
}

/// `(p/r, q/r, 1/r)`; exchanges the Classical and Reverse regimes.
pub fn dual_triple(triple: &YoungTriple) -> Result<YoungTriple> {
    triple.require_strict()?;
    let r = triple.r;
    YoungTriple::new(triple.p / r, triple.q / r)
}

/// Parses an exponent written as a decimal (`1.5`) or a fraction (`4/3`).
pub fn parse_exponent(text: &str) -> Result<f64> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
            if den == 0.0 {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            num / den
        }
        None => text
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: {text:?}")))?,
    };
    if !value.is_finite() {
        return Err(Error::Parse(format!("not finite: {text:?}")));
    }
    Ok(value)
}
