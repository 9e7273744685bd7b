//! The double integral `∫_1^∞ (∫_0^y z ν(max{1,z}, ∞) dz)^{-1} dy`.
//!
//! For `y ≥ 1` the inner integral is `I(y) = ½ν(1,∞) + ∫_1^y z ν(z,∞) dz`.
//! For a tail `ν(z,∞) ≍ z^{1−ρ}` it grows like `y^{3−ρ}` (ρ < 3), like
//! `log y` (ρ = 3) or stays bounded (ρ > 3), so the outer integral converges
//! exactly when `ρ < 2`.

use crate::error::{Error, Result};
use crate::measures::{Density, Lattice, ReciprocalTail, Support, SymmetricJumpLaw, TailKind};
use crate::quad::{integrate, QuadOptions};
use crate::verdict::{Basis, ConvergenceVerdict};

use super::CriteriaOptions;

const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

pub fn criterion_12_sato_shepp(
    nu: &SymmetricJumpLaw,
    unimodal: bool,
) -> Result<ConvergenceVerdict> {
    criterion_12_with(nu, unimodal, &CriteriaOptions::default())
}

pub fn criterion_12_with(
    nu: &SymmetricJumpLaw,
    unimodal: bool,
    opts: &CriteriaOptions,
) -> Result<ConvergenceVerdict> {
    if unimodal && nu.is_lattice() {
        return Err(Error::hypothesis(
            "measures with discrete support are never unimodal",
        ));
    }
    let base = 0.5 * nu.tail_mass(1.0);
    if !base.is_finite() {
        return Err(Error::domain("ν(1, ∞) is infinite"));
    }
    if base == 0.0 && nu.tail.kind != TailKind::Unknown {
        // No mass beyond 1: the inner integral vanishes identically.
        return Ok(
            ConvergenceVerdict::diverges(f64::INFINITY, "1 <= y".to_string())
                .with_note("no mass beyond |y| = 1"),
        );
    }
    let (partial, inner_at_cutoff, cutoff) = match &nu.support {
        Support::Lattice(l) => lattice_partial(l, base, opts.integral_cutoff)?,
        Support::Continuous(d) => density_partial(d, base, opts.integral_cutoff)?,
    };
    let truncation = format!("1 <= y <= {cutoff}");
    let verdict = match nu.tail.kind {
        TailKind::Unknown => {
            ConvergenceVerdict::inconclusive(partial, f64::INFINITY, truncation, Basis::NumericOnly)
        }
        TailKind::Exponential | TailKind::CompactSupport => {
            ConvergenceVerdict::diverges(partial, truncation).with_note("inner integral is bounded")
        }
        TailKind::PowerLaw => {
            let rho = nu.tail.rho().expect("power tails carry an exponent");
            if rho >= 2.0 {
                ConvergenceVerdict::diverges(partial, truncation).with_note(format!(
                    "outer integrand of order y^{}",
                    (rho - 3.0).max(-1.0)
                ))
            } else {
                match tail_mass_lower_bound(nu) {
                    Some((c, r, from)) if cutoff >= from => {
                        let tail = outer_tail_bound(inner_at_cutoff, c, r, cutoff);
                        ConvergenceVerdict::converges(partial, tail, truncation)
                    }
                    _ => ConvergenceVerdict::inconclusive(
                        partial,
                        f64::INFINITY,
                        truncation,
                        Basis::NumericOnly,
                    )
                    .with_note("no lower envelope for the tail mass"),
                }
            }
        }
    };
    Ok(verdict)
}

/// `(c, ρ, from)` with `ν(z, ∞) ≥ c z^{1−ρ}` for every `z ≥ from`.
fn tail_mass_lower_bound(nu: &SymmetricJumpLaw) -> Option<(f64, f64, f64)> {
    match &nu.support {
        Support::Continuous(d) => {
            let (lo, lead) = d.tail_term()?;
            if !d.tail_terms_positive() || lead.rho <= 1.0 {
                return None;
            }
            Some((lead.k / (lead.rho - 1.0), lead.rho, lo.max(1.0)))
        }
        Support::Lattice(l) => {
            let ReciprocalTail::Envelopes(env) = l.reciprocal_tail() else {
                return None;
            };
            let e = env.iter().min_by(|a, b| a.rho.total_cmp(&b.rho))?;
            // With n = ⌊z/δ⌋, the class members past n start by n + m and are
            // m apart, so their sum is at least (k/m) ∫_{n+m}^∞ x^{−ρ} dx, and
            // n + m ≤ (1 + m) z/δ once z ≥ δ.
            let m = e.modulus as f64;
            let d = l.spacing;
            let c = (e.k / m) * (1.0 + m).powf(1.0 - e.rho) * d.powf(e.rho - 1.0) / (e.rho - 1.0);
            Some((c, e.rho, d * e.from.max(1) as f64))
        }
    }
}

/// Upper bound on `∫_T^∞ dy / I(y)` given `I(T)` and `ν(z,∞) ≥ c z^{1−ρ}`
/// on `[T, ∞)`, where `I(y) ≥ I(T) + c (y^p − T^p)/p`, `p = 3 − ρ > 1`.
fn outer_tail_bound(inner_at_t: f64, c: f64, rho: f64, t: f64) -> f64 {
    let p = 3.0 - rho;
    // On [T, 2T], I ≥ I(T); beyond, y^p − T^p ≥ (1 − 2^{−p}) y^p.
    let near = t / inner_at_t;
    let scale = c * (1.0 - 2f64.powf(-p)) / p;
    let far = (2.0 * t).powf(1.0 - p) / (scale * (p - 1.0));
    near + far
}

/// Outer partial integral over `[1, T]` for a lattice, exact on every cell
/// where `ν(z, ∞)` is constant. Returns `(partial, I(T), T)`.
fn lattice_partial(l: &Lattice, base: f64, cutoff: f64) -> Result<(f64, f64, f64)> {
    let d = l.spacing;
    let n_lo = (1.0 / d).floor() as u64;
    let n_hi = ((cutoff / d).floor() as u64)
        .max(n_lo + 1)
        .min(n_lo + 5_000_000);
    let t_end = n_hi as f64 * d;
    // tails[i] = ν(z, ∞) on [(n_lo+i)δ, (n_lo+i+1)δ), by backward recursion.
    let len = (n_hi - n_lo) as usize;
    let mut tails = vec![0.0; len];
    let mut acc = l.tail_sum(n_hi);
    for i in (0..len).rev() {
        acc += l.mass(n_lo + i as u64 + 1);
        tails[i] = acc;
    }
    let mut inner = base;
    let mut outer = 0.0;
    for (i, &tail) in tails.iter().enumerate() {
        let lo = ((n_lo + i as u64) as f64 * d).max(1.0);
        let hi = (n_lo + i as u64 + 1) as f64 * d;
        if hi <= lo {
            continue;
        }
        // I(y) = inner + tail (y² − lo²)/2 on this cell.
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut cell = 0.0;
        for (x, w) in GL4_X.iter().zip(GL4_W) {
            let y = mid + half * x;
            cell += w / (inner + 0.5 * tail * (y * y - lo * lo));
        }
        outer += half * cell;
        inner += 0.5 * tail * (hi * hi - lo * lo);
    }
    Ok((outer, inner, t_end))
}

/// Outer partial integral over `[1, T]` for a density on a log grid.
fn density_partial(d: &Density, base: f64, cutoff: f64) -> Result<(f64, f64, f64)> {
    let cutoff = cutoff.max(2.0);
    let mut grid: Vec<f64> = Vec::new();
    let per_decade = 16.0;
    let steps = (cutoff.log10() * per_decade).ceil() as usize;
    for i in 0..=steps {
        grid.push(10f64.powf((i as f64 / per_decade).min(cutoff.log10())));
    }
    grid.extend(
        d.breakpoints()
            .into_iter()
            .filter(|b| *b > 1.0 && *b < cutoff),
    );
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let opts = QuadOptions::default();
    let g = |z: f64| z * d.tail_mass(z);
    let mut inner = base;
    let mut outer = 0.0;
    for w in grid.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let start = inner;
        let q = integrate(
            |y: f64| {
                let extra = integrate(g, lo, y, opts)
                    .map(|q| q.value)
                    .unwrap_or(f64::NAN);
                1.0 / (start + extra)
            },
            lo,
            hi,
            opts,
        )?;
        if !q.value.is_finite() {
            return Err(Error::Numeric {
                message: "inner integral failed on the outer grid".into(),
                partial: outer,
            });
        }
        outer += q.value;
        inner += integrate(g, lo, hi, opts)?.value;
    }
    Ok((outer, inner, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_mass_beyond_one_diverges() {
        let u = SymmetricJumpLaw::from_density(
            Density::uniform(1.0).unwrap(),
            crate::measures::Normalization::Probability,
            "u",
        )
        .unwrap();
        assert_eq!(
            criterion_12_sato_shepp(&u, false).unwrap().status,
            crate::verdict::Status::Diverges
        );
    }
    use crate::measures::{make_power_law_lattice, make_stable_triplet, Density, Normalization};
    use crate::verdict::Status;
    use approx::assert_relative_eq;

    /// Closed form for `f(y) = K y^(−ρ)` on all of (0, ∞): with
    /// `s = ρ − 1`, `ν(z,∞) = K z^{−s}/s` and
    /// `I(y) = K/(2s) + K (y^{2−s} − 1)/(s(2−s))`.
    fn closed_form_outer(k: f64, rho: f64, t: f64) -> f64 {
        let s = rho - 1.0;
        let inner = |y: f64| k / (2.0 * s) + k * (y.powf(2.0 - s) - 1.0) / (s * (2.0 - s));
        crate::quad::integrate_geometric(|y| 1.0 / inner(y), 1.0, t, 1.5, QuadOptions::default())
            .unwrap()
            .value
    }

    #[test]
    fn stable_laws() {
        for (alpha, expect) in [(0.5, Status::Converges), (1.5, Status::Diverges)] {
            let t = make_stable_triplet(alpha, 1.0).unwrap();
            let nu = t.nu.unwrap();
            let v = criterion_12_sato_shepp(&nu, true).unwrap();
            assert_eq!(v.status, expect);
            let k = nu.as_density().unwrap().eval(1.0);
            let oracle = closed_form_outer(k, alpha + 1.0, 1e6);
            assert_relative_eq!(v.partial_value, oracle, max_relative = 1e-8);
        }
    }

    #[test]
    fn convergent_bracket_contains_closed_form() {
        let nu = make_stable_triplet(0.5, 1.0).unwrap().nu.unwrap();
        let v = criterion_12_sato_shepp(&nu, true).unwrap();
        let k = nu.as_density().unwrap().eval(1.0);
        let far = closed_form_outer(k, 1.5, 1e14);
        assert!(v.partial_value <= far && far <= v.upper());
    }

    #[test]
    fn compact_support_diverges() {
        let nu = SymmetricJumpLaw::from_density(
            Density::uniform(3.0).unwrap(),
            Normalization::Probability,
            "u",
        )
        .unwrap();
        assert_eq!(
            criterion_12_sato_shepp(&nu, true).unwrap().status,
            Status::Diverges
        );
    }

    #[test]
    fn lattice_matches_power_class() {
        let law = make_power_law_lattice(0.5, false).unwrap();
        assert!(criterion_12_sato_shepp(&law, true).is_err());
        let v = criterion_12_sato_shepp(&law, false).unwrap();
        assert_eq!(v.status, Status::Converges);
        assert!(v.tail_bound.is_finite());
        let law = make_power_law_lattice(1.5, false).unwrap();
        assert_eq!(
            criterion_12_sato_shepp(&law, false).unwrap().status,
            Status::Diverges
        );
    }
}
