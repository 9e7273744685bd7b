//! `∫ y² |ν1 − ν2|(dy)`: finiteness transfers transience from ν1 to ν2.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measures::{
    Beyond, Density, Lattice, LatticeMasses, PowerTerm, ResidueTerm, Support, SymmetricJumpLaw,
};
use crate::quad::{integrate_geometric, integrate_panels, QuadOptions};
use crate::verdict::{Basis, ConvergenceVerdict};

use super::CriteriaOptions;

pub fn compare_measures(
    nu1: &SymmetricJumpLaw,
    nu2: &SymmetricJumpLaw,
) -> Result<ConvergenceVerdict> {
    compare_measures_with(nu1, nu2, &CriteriaOptions::default())
}

pub fn compare_measures_with(
    nu1: &SymmetricJumpLaw,
    nu2: &SymmetricJumpLaw,
    opts: &CriteriaOptions,
) -> Result<ConvergenceVerdict> {
    match (&nu1.support, &nu2.support) {
        (Support::Lattice(a), Support::Lattice(b)) => compare_lattices(a, b, opts.series_terms),
        (Support::Continuous(a), Support::Continuous(b)) => {
            compare_densities(a, b, opts.integral_cutoff)
        }
        _ => Err(Error::UnsupportedComparison(
            "one measure is a lattice law and the other has a density".into(),
        )),
    }
}

/// Tail terms keyed by (modulus, residue, ρ bits), with modulus-1 terms
/// split into both parities whenever the other side uses parities.
fn tail_terms(l: &Lattice, split: bool) -> Option<BTreeMap<(u8, u8, u64), f64>> {
    let mut out = BTreeMap::new();
    match &l.masses {
        LatticeMasses::Explicit { beyond, .. } => match beyond {
            Beyond::Zero => {}
            Beyond::Unknown => return None,
            Beyond::Terms { terms } => {
                for t in terms {
                    let classes: Vec<(u8, u8)> = if t.modulus == 1 && split {
                        vec![(2, 0), (2, 1)]
                    } else {
                        vec![(t.modulus, t.residue)]
                    };
                    for (m, r) in classes {
                        *out.entry((m, r, t.rho.to_bits())).or_insert(0.0) += t.k;
                    }
                }
            }
        },
        LatticeMasses::Binned { .. } => return None,
    }
    Some(out)
}

fn uses_parity(l: &Lattice) -> bool {
    matches!(&l.masses, LatticeMasses::Explicit { beyond: Beyond::Terms { terms }, .. } if terms.iter().any(|t| t.modulus == 2))
}

fn compare_lattices(a: &Lattice, b: &Lattice, n_max: u64) -> Result<ConvergenceVerdict> {
    if a.spacing != b.spacing {
        return Err(Error::UnsupportedComparison(format!(
            "lattice spacings differ ({} vs {})",
            a.spacing, b.spacing
        )));
    }
    let d = a.spacing;
    let heads = a.head_len().max(b.head_len());
    let split = uses_parity(a) || uses_parity(b);
    let (ta, tb) = (tail_terms(a, split), tail_terms(b, split));
    let net: Option<Vec<ResidueTerm>> = match (&ta, &tb) {
        (Some(ta), Some(tb)) => {
            let mut keys: Vec<_> = ta.keys().chain(tb.keys()).copied().collect();
            keys.sort();
            keys.dedup();
            Some(
                keys.into_iter()
                    .filter_map(|key| {
                        let k = ta.get(&key).copied().unwrap_or(0.0)
                            - tb.get(&key).copied().unwrap_or(0.0);
                        (k != 0.0).then(|| ResidueTerm {
                            modulus: key.0,
                            residue: key.1,
                            k: k.abs(),
                            rho: f64::from_bits(key.2),
                        })
                    })
                    .collect(),
            )
        }
        _ => None,
    };
    let n_end = match &net {
        Some(terms) if terms.is_empty() => heads,
        _ => n_max.max(heads),
    };
    let mut partial = 0.0;
    for n in 1..=n_end {
        let y = n as f64 * d;
        partial += y * y * (a.mass(n) - b.mass(n)).abs();
    }
    let partial = 2.0 * partial;
    let truncation = format!("|n| <= {n_end}");
    let Some(net) = net else {
        return Ok(ConvergenceVerdict::inconclusive(
            partial,
            f64::INFINITY,
            truncation,
            Basis::NumericOnly,
        ));
    };
    if let Some(slow) = net.iter().find(|t| t.rho <= 3.0) {
        return Ok(ConvergenceVerdict::diverges(partial, truncation)
            .with_note(format!("difference decays like n^-{}", slow.rho)));
    }
    // Past both heads the difference is the net terms, bounded termwise.
    let tail: f64 = net
        .iter()
        .map(|t| {
            d * d
                * ResidueTerm {
                    rho: t.rho - 2.0,
                    ..*t
                }
                .tail_sum(n_end)
        })
        .sum();
    Ok(ConvergenceVerdict::converges(
        partial,
        2.0 * tail,
        truncation,
    ))
}

/// Power terms of a piecewise density on the piece containing `y`.
fn terms_at(d: &Density, y: f64) -> Vec<PowerTerm> {
    match d {
        Density::PiecewisePower { pieces } => pieces
            .iter()
            .find(|p| y >= p.lo && y < p.hi)
            .map(|p| p.terms.clone())
            .unwrap_or_default(),
        _ => Vec::new(),
    }
}

/// Net power terms `f1 − f2` for large `y`, merged by exponent.
fn net_tail(a: &Density, b: &Density, y: f64) -> Vec<PowerTerm> {
    let mut sa: BTreeMap<u64, f64> = BTreeMap::new();
    let mut sb: BTreeMap<u64, f64> = BTreeMap::new();
    for t in terms_at(a, y) {
        *sa.entry(t.rho.to_bits()).or_insert(0.0) += t.k;
    }
    for t in terms_at(b, y) {
        *sb.entry(t.rho.to_bits()).or_insert(0.0) += t.k;
    }
    let mut keys: Vec<u64> = sa.keys().chain(sb.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|key| {
            let k = sa.get(&key).copied().unwrap_or(0.0) - sb.get(&key).copied().unwrap_or(0.0);
            (k != 0.0).then(|| PowerTerm::new(k, f64::from_bits(key)))
        })
        .collect()
}

fn compare_densities(a: &Density, b: &Density, cutoff: f64) -> Result<ConvergenceVerdict> {
    let unbounded_from = |d: &Density| d.tail_term().map(|(lo, _)| lo);
    let finite_end = |d: &Density| {
        if d.support_end().is_finite() {
            d.support_end()
        } else {
            0.0
        }
    };
    // Beyond x0 both densities are (possibly empty) sums of power terms.
    let x0 = [
        finite_end(a),
        finite_end(b),
        unbounded_from(a).unwrap_or(0.0),
        unbounded_from(b).unwrap_or(0.0),
    ]
    .into_iter()
    .fold(1.0, f64::max);
    let mut breaks: Vec<f64> = vec![0.0, x0];
    breaks.extend(
        a.breakpoints()
            .into_iter()
            .chain(b.breakpoints())
            .filter(|x| *x > 0.0 && *x < x0),
    );
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let g = |y: f64| y * y * (a.eval(y) - b.eval(y)).abs();
    let opts = QuadOptions {
        max_panels: 20_000,
        ..QuadOptions::default()
    };
    // Split uniformly so oscillation-free but peaked integrands are resolved.
    let mut fine = Vec::new();
    for w in breaks.windows(2) {
        for i in 0..32 {
            fine.push(w[0] + (w[1] - w[0]) * i as f64 / 32.0);
        }
    }
    fine.push(x0);
    let mut partial = integrate_panels(g, &fine, opts)?.value;
    let net = net_tail(a, b, x0 * 2.0);
    let end = cutoff.max(x0);
    if !net.is_empty() && end > x0 {
        // Evaluating f1 − f2 directly cancels catastrophically far out.
        let net_g = |y: f64| y * y * net.iter().map(|t| t.eval(y)).sum::<f64>().abs();
        partial += integrate_geometric(net_g, x0, end, 2.0, opts)?.value;
    }
    let partial = 2.0 * partial;
    let truncation = format!("|y| <= {end}");
    if net.is_empty() {
        return Ok(ConvergenceVerdict::converges(partial, 0.0, truncation));
    }
    if let Some(slow) = net.iter().find(|t| t.rho <= 3.0) {
        return Ok(ConvergenceVerdict::diverges(partial, truncation)
            .with_note(format!("difference decays like |y|^-{}", slow.rho)));
    }
    let tail: f64 = net
        .iter()
        .map(|t| PowerTerm::new(t.k.abs(), t.rho - 2.0).integral(end, f64::INFINITY))
        .sum();
    Ok(ConvergenceVerdict::converges(
        partial,
        2.0 * tail,
        truncation,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{
        make_multi_index, make_power_law_lattice, make_stable_triplet, Normalization, PowerPiece,
    };
    use crate::verdict::Status;
    use approx::assert_relative_eq;

    #[test]
    fn identical_measures_compare_to_zero() {
        let nu = make_stable_triplet(0.5, 1.0).unwrap().nu.unwrap();
        let v = compare_measures(&nu, &nu).unwrap();
        assert_eq!(v.status, Status::Converges);
        assert_eq!(v.partial_value, 0.0);
        assert_eq!(v.tail_bound, 0.0);
        let l = make_multi_index(0.5, 1.5, false).unwrap();
        let v = compare_measures(&l, &l).unwrap();
        assert_eq!(v.status, Status::Converges);
        assert_eq!(v.partial_value, 0.0);
    }

    #[test]
    fn perturbed_stable_tail() {
        let nu1 = make_stable_triplet(0.5, 1.0).unwrap().nu.unwrap();
        let k = nu1.density(1.0);
        let d2 = Density::piecewise(vec![
            PowerPiece::single(0.0, 1.0, k, 1.5),
            PowerPiece::new(
                1.0,
                f64::INFINITY,
                vec![PowerTerm::new(k, 1.5), PowerTerm::new(k, 4.5)],
            ),
        ])
        .unwrap();
        let nu2 =
            SymmetricJumpLaw::from_density(d2, Normalization::SigmaFinite, "perturbed").unwrap();
        let v = compare_measures(&nu1, &nu2).unwrap();
        assert_eq!(v.status, Status::Converges);
        // 2 ∫_1^∞ y² K y^(−4.5) dy = 2K/1.5
        let exact = 2.0 * k / 1.5;
        assert!(v.partial_value <= exact * (1.0 + 1e-10) && exact <= v.upper() * (1.0 + 1e-10));
        assert_relative_eq!(v.upper(), exact, max_relative = 1e-9);
        let w = compare_measures(&nu2, &nu1).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn mixed_supports_are_rejected() {
        let nu = make_stable_triplet(0.5, 1.0).unwrap().nu.unwrap();
        let l = make_power_law_lattice(0.5, false).unwrap();
        assert!(matches!(
            compare_measures(&nu, &l),
            Err(Error::UnsupportedComparison(_))
        ));
    }

    #[test]
    fn parity_split_matches_single_class() {
        let a = make_multi_index(0.5, 0.5, false).unwrap();
        let b = make_multi_index(0.5, 1.5, false).unwrap();
        let v = compare_measures(&a, &b).unwrap();
        // Odd classes differ by n^-1.5 − n^-2.5: y² times that diverges.
        assert_eq!(v.status, Status::Diverges);
    }
}
