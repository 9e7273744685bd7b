//! Symmetric jump laws, Lévy triplets and their characteristic exponents.

pub mod density;
pub mod exponent;
pub mod lattice;
pub mod spec;
pub mod tail;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

pub use density::{Density, PowerPiece, PowerTerm};
pub use lattice::{Beyond, ClassEnvelope, Lattice, LatticeMasses, ReciprocalTail, ResidueTerm};
pub use spec::{LawSpec, PieceSpec};
pub use tail::{TailDescriptor, TailKind};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::special::{hurwitz_zeta, zeta};
use crate::verdict::{Basis, ConvergenceVerdict};

/// Tolerance on the total mass of a probability law.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Normalization {
    Probability,
    FiniteMeasure { total: f64 },
    SigmaFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Support {
    Lattice(Lattice),
    Continuous(Density),
}

/// A symmetric jump distribution or Lévy measure. Only the positive half is
/// stored, so symmetry holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricJumpLaw {
    pub support: Support,
    pub normalization: Normalization,
    pub tail: TailDescriptor,
    pub label: String,
}

impl SymmetricJumpLaw {
    /// Wrap a lattice, checking the claimed normalization.
    pub fn from_lattice(
        lattice: Lattice,
        normalization: Normalization,
        label: impl Into<String>,
    ) -> Result<Self> {
        let total = lattice.total();
        check_total(total, normalization)?;
        let tail = lattice.tail_descriptor();
        Ok(Self {
            support: Support::Lattice(lattice),
            normalization,
            tail,
            label: label.into(),
        })
    }

    /// Wrap a lattice and infer the normalization from its total mass.
    pub fn lattice_auto(lattice: Lattice, label: impl Into<String>) -> Result<Self> {
        let total = lattice.total();
        let normalization = if (total - 1.0).abs() <= PROBABILITY_TOLERANCE {
            Normalization::Probability
        } else {
            Normalization::FiniteMeasure { total }
        };
        Self::from_lattice(lattice, normalization, label)
    }

    pub fn from_density(
        density: Density,
        normalization: Normalization,
        label: impl Into<String>,
    ) -> Result<Self> {
        match normalization {
            Normalization::SigmaFinite => {
                let near = second_moment_near_origin(&density);
                if !near.is_finite() {
                    return Err(Error::domain(
                        "∫_{|y|≤1} y² dν diverges; not a Lévy measure",
                    ));
                }
            }
            _ => check_total(density.total_mass(), normalization)?,
        }
        let tail = density.tail_descriptor();
        Ok(Self {
            support: Support::Continuous(density),
            normalization,
            tail,
            label: label.into(),
        })
    }

    /// Wrap a density and infer the normalization from its total mass.
    pub fn density_auto(density: Density, label: impl Into<String>) -> Result<Self> {
        let total = density.total_mass();
        let normalization = if (total - 1.0).abs() <= PROBABILITY_TOLERANCE {
            Normalization::Probability
        } else if total.is_finite() {
            Normalization::FiniteMeasure { total }
        } else {
            Normalization::SigmaFinite
        };
        Self::from_density(density, normalization, label)
    }

    pub fn as_lattice(&self) -> Option<&Lattice> {
        match &self.support {
            Support::Lattice(l) => Some(l),
            Support::Continuous(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&Density> {
        match &self.support {
            Support::Continuous(d) => Some(d),
            Support::Lattice(_) => None,
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.support, Support::Lattice(_))
    }

    pub fn is_probability(&self) -> bool {
        matches!(self.normalization, Normalization::Probability)
    }

    /// Lattice mass at `n ∈ ℤ`; zero for continuous laws.
    pub fn mass(&self, n: i64) -> f64 {
        self.as_lattice()
            .map(|l| l.mass(n.unsigned_abs()))
            .unwrap_or(0.0)
    }

    /// Density at `y`; zero for lattice laws.
    pub fn density(&self, y: f64) -> f64 {
        self.as_density().map(|d| d.eval(y)).unwrap_or(0.0)
    }

    /// Total mass `ν(ℝ)` (infinite for σ-finite densities).
    pub fn total(&self) -> f64 {
        match &self.support {
            Support::Lattice(l) => l.total(),
            Support::Continuous(d) => d.total_mass(),
        }
    }

    /// Mass of `(x, ∞)`, excluding the origin.
    pub fn tail_mass(&self, x: f64) -> f64 {
        match &self.support {
            Support::Lattice(l) => {
                let x = x.max(0.0);
                let after = (x / l.spacing).floor() as u64;
                l.tail_sum(after)
            }
            Support::Continuous(d) => d.tail_mass(x),
        }
    }

    /// Rejects laws whose masses vanish somewhere (up to `upto` for lattices)
    /// or whose density is not positive on `[a, ∞)`.
    pub fn check_strictly_positive(&self, upto: u64, a: f64) -> Result<()> {
        match &self.support {
            Support::Lattice(l) => {
                for n in 1..=upto.min(l.head_len().max(1)) {
                    if !(l.mass(n) > 0.0) {
                        return Err(Error::hypothesis(format!("mass at n = {n} is zero")));
                    }
                }
                match l.reciprocal_tail() {
                    ReciprocalTail::VanishesAfter(n) if n < upto => {
                        Err(Error::hypothesis(format!("masses vanish beyond n = {n}")))
                    }
                    _ => Ok(()),
                }
            }
            Support::Continuous(d) => {
                if d.positive_on(a) {
                    Ok(())
                } else {
                    Err(Error::hypothesis(format!(
                        "density vanishes on part of [{a}, ∞)"
                    )))
                }
            }
        }
    }
}

fn check_total(total: f64, normalization: Normalization) -> Result<()> {
    match normalization {
        Normalization::Probability => {
            if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                return Err(Error::domain(format!(
                    "probability law has total mass {total}"
                )));
            }
        }
        Normalization::FiniteMeasure { total: claimed } => {
            if !total.is_finite() || (total - claimed).abs() > 1e-9 * claimed.abs().max(1.0) {
                return Err(Error::domain(format!(
                    "claimed total {claimed} but the measure has mass {total}"
                )));
            }
        }
        Normalization::SigmaFinite => {}
    }
    Ok(())
}

/// `∫_0^1 y² f(y) dy`, infinite when the density is too singular at 0.
fn second_moment_near_origin(d: &Density) -> f64 {
    match d {
        Density::PiecewisePower { pieces } => pieces
            .iter()
            .filter(|p| p.lo < 1.0)
            .flat_map(|p| {
                p.terms
                    .iter()
                    .map(move |t| PowerTerm::new(t.k, t.rho - 2.0).integral(p.lo, p.hi.min(1.0)))
            })
            .sum(),
        _ => 0.0,
    }
}

/// Lévy triplet `(0, c, ν)` of a symmetric process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    /// Gaussian coefficient `c ≥ 0`.
    pub c: f64,
    pub nu: Option<SymmetricJumpLaw>,
}

impl LevyTriplet {
    pub fn new(c: f64, nu: Option<SymmetricJumpLaw>) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::domain(format!(
                "gaussian coefficient must be nonnegative, got {c}"
            )));
        }
        Ok(Self { c, nu })
    }

    /// Compound Poisson triplet of a jump law.
    pub fn jumps(nu: SymmetricJumpLaw) -> Self {
        Self {
            c: 0.0,
            nu: Some(nu),
        }
    }

    /// The drift, always zero for symmetric processes.
    pub fn b(&self) -> f64 {
        0.0
    }
}

/// `p_n = C n^(−α−1)` for `n ≥ 1`, with `C = 1` or chosen so the law sums to one.
pub fn make_power_law_lattice(alpha: f64, normalize: bool) -> Result<SymmetricJumpLaw> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let rho = alpha + 1.0;
    let sum = zeta(rho);
    let (k, normalization) = if normalize {
        (1.0 / (2.0 * sum), Normalization::Probability)
    } else {
        (1.0, Normalization::FiniteMeasure { total: 2.0 * sum })
    };
    let lattice = Lattice::new(
        1.0,
        0.0,
        LatticeMasses::Explicit {
            head: Vec::new(),
            beyond: Beyond::Terms {
                terms: vec![ResidueTerm::all(k, rho)],
            },
        },
    )?;
    let label = format!(
        "power-law lattice alpha={alpha}{}",
        if normalize { " (normalized)" } else { " (raw)" }
    );
    SymmetricJumpLaw::from_lattice(lattice, normalization, label)
}

/// `p_{2n} = C (2n)^(−α−1)`, `p_{2n−1} = C (2n−1)^(−β−1)`.
pub fn make_multi_index(alpha: f64, beta: f64, normalize: bool) -> Result<SymmetricJumpLaw> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    if alpha == beta {
        let mut law = make_power_law_lattice(alpha, normalize)?;
        law.label = multi_label(alpha, beta, normalize);
        return Ok(law);
    }
    let (ra, rb) = (alpha + 1.0, beta + 1.0);
    let even = 2f64.powf(-ra) * zeta(ra);
    let odd = (1.0 - 2f64.powf(-rb)) * zeta(rb);
    let (k, normalization) = if normalize {
        (1.0 / (2.0 * (even + odd)), Normalization::Probability)
    } else {
        (
            1.0,
            Normalization::FiniteMeasure {
                total: 2.0 * (even + odd),
            },
        )
    };
    let lattice = Lattice::new(
        1.0,
        0.0,
        LatticeMasses::Explicit {
            head: Vec::new(),
            beyond: Beyond::Terms {
                terms: vec![ResidueTerm::even(k, ra), ResidueTerm::odd(k, rb)],
            },
        },
    )?;
    SymmetricJumpLaw::from_lattice(lattice, normalization, multi_label(alpha, beta, normalize))
}

fn multi_label(alpha: f64, beta: f64, normalize: bool) -> String {
    format!(
        "multi-index alpha={alpha} beta={beta}{}",
        if normalize { " (normalized)" } else { " (raw)" }
    )
}

/// Finite table of masses `m(1..=len)` on `δℤ`, zero beyond.
pub fn make_table_lattice(spacing: f64, origin: f64, masses: Vec<f64>) -> Result<SymmetricJumpLaw> {
    let len = masses.len();
    let lattice = Lattice::new(
        spacing,
        origin,
        LatticeMasses::Explicit {
            head: masses,
            beyond: Beyond::Zero,
        },
    )?;
    SymmetricJumpLaw::lattice_auto(lattice, format!("table lattice ({len} masses)"))
}

/// Jumps `±1` only, each with mass `m1` (1 gives unit conductances, ½ the simple walk).
pub fn make_nearest_neighbour(m1: f64) -> Result<SymmetricJumpLaw> {
    if !(m1 > 0.0) || !m1.is_finite() {
        return Err(Error::domain(format!(
            "nearest-neighbour mass must be positive, got {m1}"
        )));
    }
    let mut law = make_table_lattice(1.0, 0.0, vec![m1])?;
    law.label = format!("nearest-neighbour m1={m1}");
    Ok(law)
}

/// Density constant `K` of the symmetric α-stable Lévy measure with `ψ(ξ) = γ|ξ|^α`.
pub fn stable_density_constant(alpha: f64, gamma_: f64) -> f64 {
    gamma_ * alpha * 2f64.powf(alpha - 1.0) * gamma((alpha + 1.0) / 2.0)
        / (std::f64::consts::PI.sqrt() * gamma(1.0 - alpha / 2.0))
}

/// Triplet of the symmetric α-stable process with exponent `γ|ξ|^α`.
pub fn make_stable_triplet(alpha: f64, gamma_: f64) -> Result<LevyTriplet> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0, 2], got {alpha}"
        )));
    }
    if !(gamma_ > 0.0) || !gamma_.is_finite() {
        return Err(Error::domain(format!(
            "gamma must be positive, got {gamma_}"
        )));
    }
    if alpha == 2.0 {
        return LevyTriplet::new(2.0 * gamma_, None);
    }
    let k = stable_density_constant(alpha, gamma_);
    let density = Density::piecewise(vec![PowerPiece::single(0.0, f64::INFINITY, k, alpha + 1.0)])?;
    let law = SymmetricJumpLaw::from_density(
        density,
        Normalization::SigmaFinite,
        format!("stable alpha={alpha} gamma={gamma_}"),
    )?;
    LevyTriplet::new(0.0, Some(law))
}

/// Probability density equal to `K` on `[0, 1)` and `K y^(−ρ)` beyond, `ρ > 1`.
pub fn make_flat_core_power(rho: f64) -> Result<SymmetricJumpLaw> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::domain(format!(
            "tail exponent must exceed 1, got {rho}"
        )));
    }
    let k = 1.0 / (2.0 * (1.0 + 1.0 / (rho - 1.0)));
    let density = Density::piecewise(vec![
        PowerPiece::single(0.0, 1.0, k, 0.0),
        PowerPiece::single(1.0, f64::INFINITY, k, rho),
    ])?;
    SymmetricJumpLaw::from_density(
        density,
        Normalization::Probability,
        format!("flat core, power tail rho={rho}"),
    )
}

/// Jump part of the exponent: `∫ (1 − cos ξy) ν(dy)` with an absolute error bound.
pub fn jump_exponent(law: &SymmetricJumpLaw, xi: f64) -> Result<(f64, f64)> {
    let xi = xi.abs();
    if xi == 0.0 {
        return Ok((0.0, 0.0));
    }
    match &law.support {
        Support::Lattice(l) => {
            let (v, e) = l.cosine_sum(xi * l.spacing);
            Ok((2.0 * v, 2.0 * e))
        }
        Support::Continuous(d) => {
            let q = exponent::cosine_integral(d, xi, 0.0)?;
            Ok((2.0 * q.value, 2.0 * q.error))
        }
    }
}

/// Characteristic exponent `ψ(ξ) = cξ²/2 + ∫ (1 − cos ξy) ν(dy)`.
pub fn char_exponent(t: &LevyTriplet, xi: f64) -> Result<f64> {
    let xi = xi.abs();
    let mut psi = 0.5 * t.c * xi * xi;
    if let Some(nu) = &t.nu {
        let (v, err) = jump_exponent(nu, xi)?;
        if !(err <= 1e-6 * v.abs() + 1e-14) {
            return Err(Error::Numeric {
                message: format!("exponent quadrature at xi = {xi} has error {err:e}"),
                partial: psi + v,
            });
        }
        psi += v;
    }
    Ok(psi.max(0.0))
}

/// Classifies `∫_{|y|>1} |y|^k dν` from the tail descriptor and reports the
/// partial value over `1 < |y| ≤ cutoff`.
pub fn moment(law: &SymmetricJumpLaw, k: u32, cutoff: f64) -> Result<ConvergenceVerdict> {
    if k > 3 {
        return Err(Error::domain(format!(
            "moment order must be at most 3, got {k}"
        )));
    }
    if !(cutoff >= 1.0) {
        return Err(Error::domain(format!(
            "cutoff must be at least 1, got {cutoff}"
        )));
    }
    let kf = k as f64;
    let truncation = format!("1 < |y| <= {cutoff}");
    let (partial, tail) = match &law.support {
        Support::Lattice(l) => {
            let d = l.spacing;
            let first = (1.0 / d).floor() as u64 + 1;
            let last = (cutoff / d).floor() as u64;
            let mut s = 0.0;
            for n in first..=last {
                s += (n as f64 * d).powf(kf) * l.mass(n);
            }
            let tail = match l.reciprocal_tail() {
                ReciprocalTail::VanishesAfter(end) if end <= last => 0.0,
                _ => match l.upper_envelope() {
                    Some((kk, rho)) if rho - kf > 1.0 => {
                        d.powf(kf)
                            * kk
                            * hurwitz_zeta(rho - kf, (last.max(l.head_len()) + 1) as f64)
                            + head_moment_beyond(l, last, kf)
                    }
                    _ => f64::INFINITY,
                },
            };
            (2.0 * s, 2.0 * tail)
        }
        Support::Continuous(dens) => {
            let partial = density_moment(dens, kf, 1.0, cutoff)?;
            let tail = density_moment(dens, kf, cutoff, f64::INFINITY)?;
            (2.0 * partial, 2.0 * tail)
        }
    };
    Ok(match law.tail.moment_converges(k) {
        Some(true) => ConvergenceVerdict::converges(partial, tail, truncation),
        Some(false) => ConvergenceVerdict::diverges(partial, truncation),
        None => {
            ConvergenceVerdict::inconclusive(partial, f64::INFINITY, truncation, Basis::NumericOnly)
        }
    })
}

/// Head masses past `last` still inside the explicit head, weighted by `(nδ)^k`.
fn head_moment_beyond(l: &Lattice, last: u64, k: f64) -> f64 {
    let h = l.head_len();
    ((last + 1)..=h)
        .map(|n| (n as f64 * l.spacing).powf(k) * l.mass(n))
        .sum()
}

/// `∫_a^b y^k f(y) dy` on the positive half-line.
fn density_moment(d: &Density, k: f64, a: f64, b: f64) -> Result<f64> {
    if a >= b {
        return Ok(0.0);
    }
    match d {
        Density::PiecewisePower { pieces } => Ok(pieces
            .iter()
            .flat_map(|p| {
                let lo = p.lo.max(a);
                let hi = p.hi.min(b);
                p.terms.iter().map(move |t| {
                    if lo < hi {
                        PowerTerm::new(t.k, t.rho - k).integral(lo, hi)
                    } else {
                        0.0
                    }
                })
            })
            .sum()),
        Density::Uniform { half_width } => {
            let hi = b.min(*half_width);
            let lo = a.min(hi);
            Ok((hi.powf(k + 1.0) - lo.powf(k + 1.0)) / (k + 1.0) * 0.5 / half_width)
        }
        Density::Gaussian { .. } => {
            let hi = b.min(d.support_end());
            if a >= hi {
                return Ok(0.0);
            }
            Ok(integrate(|y| y.powf(k) * d.eval(y), a, hi, QuadOptions::default())?.value)
        }
    }
}
