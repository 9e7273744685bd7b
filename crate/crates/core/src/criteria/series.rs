//! The reciprocal series `Σ 1/(n³ p_n)` and integral `∫_1^∞ dy/(y³ f(y))`.

use crate::error::{Error, Result};
use crate::measures::{Density, Lattice, PowerTerm, ReciprocalTail, ResidueTerm, SymmetricJumpLaw};
use crate::quad::{integrate_geometric, integrate_uniform, NeumaierSum, QuadOptions};
use crate::verdict::{Basis, ConvergenceVerdict};

use super::CriteriaOptions;

/// `Σ_{n≥1} 1/((n + shift)³ m(n))` over lattice indices, `shift ≥ 0`.
///
/// Convergence is read off the per-residue-class lower envelopes
/// `m(n) ≥ k n^(−ρ)`: the summand is at most `n^(ρ−3)/k`, so the class
/// series converges iff `ρ < 2`, and the same envelope bounds the tail.
pub fn reciprocal_series(lattice: &Lattice, shift: f64, n_max: u64) -> Result<ConvergenceVerdict> {
    let envelopes = match lattice.reciprocal_tail() {
        ReciprocalTail::VanishesAfter(n) => {
            return Err(Error::hypothesis(format!("masses vanish beyond n = {n}")));
        }
        ReciprocalTail::Unknown => None,
        ReciprocalTail::Envelopes(e) => Some(e),
    };
    let n_end = series_extent(lattice, n_max);
    let mut partial = NeumaierSum::default();
    for n in 1..=n_end {
        let m = lattice.mass(n);
        if !(m > 0.0) {
            return Err(Error::hypothesis(format!("mass at n = {n} is zero")));
        }
        let x = n as f64 + shift;
        partial.add(1.0 / (x * x * x * m));
        if !partial.value().is_finite() {
            break;
        }
    }
    let partial = partial.value();
    let truncation = format!("n <= {n_end}");
    let Some(envelopes) = envelopes else {
        return Ok(ConvergenceVerdict::inconclusive(
            partial,
            f64::INFINITY,
            truncation,
            Basis::NumericOnly,
        ));
    };
    if envelopes.iter().any(|c| c.rho >= 2.0) {
        let worst = envelopes
            .iter()
            .map(|c| c.rho)
            .fold(f64::NEG_INFINITY, f64::max);
        return Ok(
            ConvergenceVerdict::diverges(partial, truncation).with_note(format!(
                "summand of order n^{} in some residue class",
                worst - 3.0
            )),
        );
    }
    let tail: f64 = envelopes
        .iter()
        .map(|c| {
            ResidueTerm {
                modulus: c.modulus,
                residue: c.residue,
                k: 1.0 / c.k,
                rho: 3.0 - c.rho,
            }
            .tail_sum(n_end)
        })
        .sum();
    Ok(ConvergenceVerdict::converges(partial, tail, truncation))
}

/// Last index summed explicitly by [`reciprocal_series`]: at least `n_max`,
/// the stored head, and every index before the envelopes take over.
pub fn series_extent(lattice: &Lattice, n_max: u64) -> u64 {
    let from = match lattice.reciprocal_tail() {
        ReciprocalTail::Envelopes(e) => e.iter().map(|c| c.from).max().unwrap_or(1),
        _ => 1,
    };
    n_max.max(from.saturating_sub(1)).max(lattice.head_len())
}

/// Criterion (1.1) for a lattice law: `Σ_{n≥1} 1/(n³ p_n)` in lattice units.
pub fn criterion_11_discrete(law: &SymmetricJumpLaw) -> Result<ConvergenceVerdict> {
    criterion_11_discrete_with(law, &CriteriaOptions::default())
}

pub fn criterion_11_discrete_with(
    law: &SymmetricJumpLaw,
    opts: &CriteriaOptions,
) -> Result<ConvergenceVerdict> {
    let lattice = law
        .as_lattice()
        .ok_or_else(|| Error::domain("criterion (1.1) in series form needs a lattice law"))?;
    reciprocal_series(lattice, 0.0, opts.series_terms)
}

/// Criterion (1.1) for a density: `∫_1^∞ dy/(y³ f(y))`.
pub fn criterion_11_continuous(law: &SymmetricJumpLaw) -> Result<ConvergenceVerdict> {
    criterion_11_continuous_with(law, &CriteriaOptions::default())
}

pub fn criterion_11_continuous_with(
    law: &SymmetricJumpLaw,
    opts: &CriteriaOptions,
) -> Result<ConvergenceVerdict> {
    let density = law
        .as_density()
        .ok_or_else(|| Error::domain("criterion (1.1) in integral form needs a continuous law"))?;
    reciprocal_integral(density, 1.0, opts.integral_cutoff)
}

/// Largest `y` at which a Gaussian density still exceeds `1e-290`, so that
/// `1/f` stays finite.
fn gaussian_reciprocal_limit(sigma: f64) -> f64 {
    let log_peak = -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
    sigma
        * (2.0 * (log_peak + 290.0 * std::f64::consts::LN_10))
            .max(0.0)
            .sqrt()
}

/// `∫_a^∞ dy/(y³ f(y))` with partial value over `[a, cutoff]`.
pub fn reciprocal_integral(density: &Density, a: f64, cutoff: f64) -> Result<ConvergenceVerdict> {
    if !density.positive_on(a) {
        return Err(Error::hypothesis(format!(
            "density vanishes on part of [{a}, ∞)"
        )));
    }
    let cutoff = cutoff.max(a);
    match density {
        Density::Gaussian { sigma } => {
            let end = gaussian_reciprocal_limit(*sigma).min(cutoff).max(a);
            let pieces = (4.0 * (end - a) / sigma).ceil().max(1.0) as usize;
            let q = integrate_uniform(
                |y: f64| 1.0 / (y * y * y * density.eval(y)),
                a,
                end,
                pieces,
                QuadOptions::default(),
            )?;
            Ok(
                ConvergenceVerdict::diverges(q.value, format!("{a} <= y <= {end}"))
                    .with_note("density decays faster than any power"),
            )
        }
        Density::Uniform { .. } => {
            unreachable!("uniform densities are not positive on a half-line")
        }
        Density::PiecewisePower { pieces } => {
            let mut partial = 0.0;
            for p in pieces {
                let lo = p.lo.max(a);
                let hi = p.hi.min(cutoff);
                if lo >= hi {
                    continue;
                }
                partial += if p.terms.len() == 1 {
                    let t = p.terms[0];
                    PowerTerm::new(1.0 / t.k, 3.0 - t.rho).integral(lo, hi)
                } else {
                    integrate_geometric(
                        |y: f64| 1.0 / (y * y * y * p.eval(y)),
                        lo,
                        hi,
                        2.0,
                        QuadOptions::default(),
                    )?
                    .value
                };
            }
            let truncation = format!("{a} <= y <= {cutoff}");
            let (lo, lead) = density
                .tail_term()
                .expect("positive on a half-line implies an unbounded piece");
            if lead.rho >= 2.0 {
                return Ok(ConvergenceVerdict::diverges(partial, truncation)
                    .with_note(format!("integrand of order y^{}", lead.rho - 3.0)));
            }
            if !density.tail_terms_positive() {
                return Ok(ConvergenceVerdict::inconclusive(
                    partial,
                    f64::INFINITY,
                    truncation,
                    Basis::NumericOnly,
                )
                .with_note("tail terms of mixed sign give no lower envelope"));
            }
            // f ≥ k y^(−ρ) on the unbounded piece.
            let tail = PowerTerm::new(1.0 / lead.k, 3.0 - lead.rho)
                .integral(cutoff.max(lo), f64::INFINITY);
            Ok(ConvergenceVerdict::converges(partial, tail, truncation))
        }
    }
}
