//! Symmetric densities on ℝ, stored for `y ≥ 0` only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{Error, Result};
use crate::measures::tail::TailDescriptor;

/// One power term `k · y^(−rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub k: f64,
    pub rho: f64,
}

impl PowerTerm {
    pub fn new(k: f64, rho: f64) -> Self {
        Self { k, rho }
    }

    pub fn eval(&self, y: f64) -> f64 {
        if self.rho == 0.0 {
            self.k
        } else {
            self.k * y.powf(-self.rho)
        }
    }

    /// `∫_a^b k y^(−rho) dy` for `0 ≤ a ≤ b ≤ ∞`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if a >= b || self.k == 0.0 {
            return 0.0;
        }
        let r = self.rho;
        if (r - 1.0).abs() < 1e-14 {
            if a == 0.0 || b.is_infinite() {
                return f64::INFINITY * self.k.signum();
            }
            return self.k * (b / a).ln();
        }
        let e = 1.0 - r;
        let upper = if b.is_infinite() {
            if e < 0.0 {
                0.0
            } else {
                return f64::INFINITY * self.k.signum();
            }
        } else {
            b.powf(e)
        };
        let lower = if a == 0.0 {
            if e > 0.0 {
                0.0
            } else {
                return f64::INFINITY * self.k.signum();
            }
        } else {
            a.powf(e)
        };
        self.k * (upper - lower) / e
    }
}

/// Density `Σ terms` on `[lo, hi)`; `hi` may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPiece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<PowerTerm>,
}

impl PowerPiece {
    pub fn new(lo: f64, hi: f64, terms: Vec<PowerTerm>) -> Self {
        Self { lo, hi, terms }
    }

    pub fn single(lo: f64, hi: f64, k: f64, rho: f64) -> Self {
        Self::new(lo, hi, vec![PowerTerm::new(k, rho)])
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(y)).sum()
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if a >= b {
            return 0.0;
        }
        self.terms.iter().map(|t| t.integral(a, b)).sum()
    }

    /// Leading (slowest-decaying) term, with coefficients of equal exponent merged.
    pub fn leading(&self) -> Option<PowerTerm> {
        let rho = self
            .terms
            .iter()
            .filter(|t| t.k != 0.0)
            .map(|t| t.rho)
            .fold(f64::INFINITY, f64::min);
        if !rho.is_finite() {
            return None;
        }
        let k = self
            .terms
            .iter()
            .filter(|t| (t.rho - rho).abs() < 1e-14)
            .map(|t| t.k)
            .sum();
        Some(PowerTerm { k, rho })
    }
}

/// A symmetric density, evaluated through its restriction to `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Density {
    /// Sorted, non-overlapping pieces; the density is zero outside them.
    PiecewisePower {
        pieces: Vec<PowerPiece>,
    },
    Gaussian {
        sigma: f64,
    },
    Uniform {
        half_width: f64,
    },
}

/// Beyond this many standard deviations the Gaussian is treated as zero.
pub const GAUSSIAN_CUTOFF_SIGMAS: f64 = 40.0;

impl Density {
    pub fn piecewise(pieces: Vec<PowerPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::domain("piecewise density needs at least one piece"));
        }
        let mut prev_hi = 0.0;
        for (i, p) in pieces.iter().enumerate() {
            if !(p.lo >= 0.0) || !(p.hi > p.lo) {
                return Err(Error::domain(format!(
                    "piece {i} has invalid interval [{}, {})",
                    p.lo, p.hi
                )));
            }
            if p.lo < prev_hi {
                return Err(Error::domain(format!("piece {i} overlaps its predecessor")));
            }
            if p.hi.is_infinite() && i + 1 != pieces.len() {
                return Err(Error::domain("only the last piece may be unbounded"));
            }
            if p.terms.is_empty() {
                return Err(Error::domain(format!("piece {i} has no terms")));
            }
            for t in &p.terms {
                if !t.k.is_finite() || !t.rho.is_finite() {
                    return Err(Error::domain(format!("piece {i} has a non-finite term")));
                }
            }
            prev_hi = p.hi;
        }
        let d = Density::PiecewisePower { pieces };
        // Values must be nonnegative; probe each piece at a few points.
        if let Density::PiecewisePower { pieces } = &d {
            for p in pieces {
                let hi = if p.hi.is_finite() {
                    p.hi
                } else {
                    p.lo.max(1.0) * 1e12
                };
                for j in 0..=16 {
                    let t = j as f64 / 16.0;
                    let y = if p.lo == 0.0 {
                        hi * t.max(1e-9)
                    } else {
                        p.lo * (hi / p.lo).powf(t)
                    };
                    let y = y.clamp(p.lo.max(f64::MIN_POSITIVE), hi);
                    if p.eval(y) < 0.0 {
                        return Err(Error::domain(format!("density is negative at y = {y}")));
                    }
                }
            }
        }
        Ok(d)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "gaussian sigma must be positive, got {sigma}"
            )));
        }
        Ok(Density::Gaussian { sigma })
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::domain(format!(
                "uniform half width must be positive, got {half_width}"
            )));
        }
        Ok(Density::Uniform { half_width })
    }

    /// Density value at `y` (symmetric).
    pub fn eval(&self, y: f64) -> f64 {
        let y = y.abs();
        match self {
            Density::PiecewisePower { pieces } => pieces
                .iter()
                .find(|p| y >= p.lo && y < p.hi)
                .map(|p| {
                    if y == 0.0 && p.terms.iter().any(|t| t.rho > 0.0) {
                        f64::INFINITY
                    } else {
                        p.eval(y)
                    }
                })
                .unwrap_or(0.0),
            Density::Gaussian { sigma } => {
                let z = y / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Density::Uniform { half_width } => {
                if y <= *half_width {
                    0.5 / half_width
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫_a^b f(y) dy` for `0 ≤ a ≤ b ≤ ∞`, in closed form.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        match self {
            Density::PiecewisePower { pieces } => pieces.iter().map(|p| p.integral(a, b)).sum(),
            Density::Gaussian { sigma } => {
                let s = sigma * std::f64::consts::SQRT_2;
                // Use erfc in the tail to keep relative precision.
                if a / s > 1.0 {
                    let upper = if b.is_infinite() { 0.0 } else { erfc(b / s) };
                    0.5 * (erfc(a / s) - upper)
                } else {
                    let upper = if b.is_infinite() { 1.0 } else { erf(b / s) };
                    0.5 * (upper - erf(a / s))
                }
            }
            Density::Uniform { half_width } => {
                let h = *half_width;
                (b.min(h) - a.min(h)).max(0.0) * 0.5 / h
            }
        }
    }

    /// Mass of `(x, ∞)` (one side only).
    pub fn tail_mass(&self, x: f64) -> f64 {
        self.integral(x.max(0.0), f64::INFINITY)
    }

    /// Total mass of the symmetric measure, `2 ∫_0^∞ f`.
    pub fn total_mass(&self) -> f64 {
        2.0 * self.integral(0.0, f64::INFINITY)
    }

    /// Largest `y` carrying mass, or infinity.
    pub fn support_end(&self) -> f64 {
        match self {
            Density::PiecewisePower { pieces } => pieces.last().map(|p| p.hi).unwrap_or(0.0),
            Density::Gaussian { sigma } => sigma * GAUSSIAN_CUTOFF_SIGMAS,
            Density::Uniform { half_width } => *half_width,
        }
    }

    /// Interior breakpoints in `(0, ∞)`, for splitting quadratures.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Density::PiecewisePower { pieces } => {
                let mut v = Vec::new();
                for p in pieces {
                    if p.lo > 0.0 {
                        v.push(p.lo);
                    }
                    if p.hi.is_finite() {
                        v.push(p.hi);
                    }
                }
                v.dedup();
                v
            }
            Density::Gaussian { .. } => Vec::new(),
            Density::Uniform { half_width } => vec![*half_width],
        }
    }

    /// Leading power term of the unbounded last piece, if any.
    pub fn tail_term(&self) -> Option<(f64, PowerTerm)> {
        match self {
            Density::PiecewisePower { pieces } => {
                let last = pieces.last()?;
                if last.hi.is_infinite() {
                    last.leading().map(|t| (last.lo, t))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Whether every term of the unbounded piece has a positive coefficient.
    pub fn tail_terms_positive(&self) -> bool {
        match self {
            Density::PiecewisePower { pieces } => pieces
                .last()
                .map(|p| p.hi.is_infinite() && p.terms.iter().all(|t| t.k > 0.0))
                .unwrap_or(false),
            _ => false,
        }
    }

    pub fn tail_descriptor(&self) -> TailDescriptor {
        match self {
            Density::PiecewisePower { pieces } => {
                let last = pieces.last().expect("validated non-empty");
                if last.hi.is_finite() {
                    return TailDescriptor::compact(last.hi);
                }
                match last.leading() {
                    Some(t) if t.k > 0.0 && t.rho > 0.0 => {
                        TailDescriptor::power_law(t.rho, t.k, last.lo.max(f64::MIN_POSITIVE))
                            .unwrap_or_else(|_| TailDescriptor::unknown())
                    }
                    _ => TailDescriptor::unknown(),
                }
            }
            Density::Gaussian { sigma } => {
                TailDescriptor::exponential(1.0 / (sigma * (2.0 * PI).sqrt()), *sigma)
                    .unwrap_or_else(|_| TailDescriptor::unknown())
            }
            Density::Uniform { half_width } => TailDescriptor::compact(*half_width),
        }
    }

    /// Whether the density is bounded away from zero on `[a, ∞)` as far as the
    /// piecewise specification shows (no gaps, no vanishing pieces).
    pub fn positive_on(&self, a: f64) -> bool {
        match self {
            Density::PiecewisePower { pieces } => {
                let mut covered = a;
                for p in pieces {
                    if p.hi <= covered {
                        continue;
                    }
                    if p.lo > covered {
                        return false;
                    }
                    if p.terms.iter().all(|t| t.k <= 0.0) {
                        return false;
                    }
                    covered = p.hi;
                }
                covered.is_infinite()
            }
            Density::Gaussian { .. } => true,
            Density::Uniform { .. } => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_term_integrals() {
        let t = PowerTerm::new(2.0, 1.5);
        assert_relative_eq!(t.integral(1.0, f64::INFINITY), 4.0, max_relative = 1e-15);
        assert!(t.integral(0.0, 1.0).is_infinite());
        let flat = PowerTerm::new(0.5, 0.0);
        assert_relative_eq!(flat.integral(0.0, 3.0), 1.5);
        let log = PowerTerm::new(1.0, 1.0);
        assert_relative_eq!(
            log.integral(1.0, std::f64::consts::E),
            1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn gaussian_mass_is_one() {
        let g = Density::gaussian(1.3).unwrap();
        assert_relative_eq!(g.total_mass(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            g.integral(0.0, 0.5) * 2.0,
            erf(0.5 / (1.3 * std::f64::consts::SQRT_2)),
            max_relative = 1e-15
        );
    }

    #[test]
    fn overlapping_pieces_rejected() {
        let err = Density::piecewise(vec![
            PowerPiece::single(0.0, 2.0, 1.0, 0.0),
            PowerPiece::single(1.0, f64::INFINITY, 1.0, 2.0),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn negative_density_rejected() {
        let err = Density::piecewise(vec![PowerPiece::single(0.0, 1.0, -1.0, 0.0)]);
        assert!(err.is_err());
    }

    #[test]
    fn positivity_detects_gaps() {
        let d = Density::piecewise(vec![
            PowerPiece::single(0.0, 1.0, 1.0, 0.0),
            PowerPiece::single(2.0, f64::INFINITY, 1.0, 2.0),
        ])
        .unwrap();
        assert!(!d.positive_on(0.5));
        assert!(d.positive_on(2.0));
    }
}
