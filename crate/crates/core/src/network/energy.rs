//! Energy of the dyadic flow and the closed-form upper bounds for it.
//!
//! Conductances are `c(u, v) = m(|v − u|)` in lattice units; the spacing
//! plays no role.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{ClassEnvelope, Lattice, ReciprocalTail, ResidueTerm, SymmetricJumpLaw};
use crate::quad::NeumaierSum;
use crate::special::ceil_div;
use crate::verdict::extended_float;

/// A value known to lie in `[lo, hi]`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "extended_float")]
    pub lo: f64,
    #[serde(with = "extended_float")]
    pub hi: f64,
}

impl Interval {
    pub fn is_finite(&self) -> bool {
        self.hi.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowEnergy {
    #[serde(flatten)]
    pub bounds: Interval,
    pub i_max: u32,
    /// Smallest lag carrying flow whose conductance is zero, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_conductance_lag: Option<u64>,
}

fn lattice_of(law: &SymmetricJumpLaw) -> Result<&Lattice> {
    law.as_lattice()
        .ok_or_else(|| Error::domain("network quantities need a lattice law"))
}

/// `max(H, Σ_c x^ρ_c / k_c)`-style data: `1/m(n) ≤ head_max + Σ_c n^ρ_c / k_c`.
struct ReciprocalBound {
    head_max: f64,
    classes: Vec<ClassEnvelope>,
}

fn reciprocal_bound(l: &Lattice) -> Option<ReciprocalBound> {
    let ReciprocalTail::Envelopes(classes) = l.reciprocal_tail() else {
        return None;
    };
    let from = classes.iter().map(|c| c.from).max().unwrap_or(1);
    let mut head_max: f64 = 0.0;
    for n in 1..from {
        head_max = head_max.max(1.0 / l.mass(n));
    }
    Some(ReciprocalBound { head_max, classes })
}

/// Number of pairs `(u, u + w)` with `u ∈ [a1, b1]` and `u + w ∈ [a2, b2]`.
fn pair_count(w: i64, a1: i64, b1: i64, a2: i64, b2: i64) -> i64 {
    let lo = a1.max(a2 - w);
    let hi = b1.min(b2 - w);
    (hi - lo + 1).max(0)
}

/// Energy `Σ_{edges} θ²/c` of the dyadic flow: exact over the edges between
/// blocks up to `±i_max`, plus an upper bound for all farther blocks.
pub fn flow_energy(law: &SymmetricJumpLaw, i_max: u32) -> Result<FlowEnergy> {
    let l = lattice_of(law)?;
    if !(2..=26).contains(&i_max) {
        return Err(Error::domain(format!(
            "i_max must lie in 2..=26, got {i_max}"
        )));
    }
    let w_top = 3 * (1u64 << (i_max - 2));
    let recips: Vec<f64> = (1..=w_top).map(|w| 1.0 / l.mass(w)).collect();
    if let Some(bad) = recips.iter().position(|r| !r.is_finite()) {
        return Ok(FlowEnergy {
            bounds: Interval {
                lo: f64::INFINITY,
                hi: f64::INFINITY,
            },
            i_max,
            zero_conductance_lag: Some(bad as u64 + 1),
        });
    }
    // Edges (0, ±1) carry ½ each.
    let mut lo = NeumaierSum::default();
    lo.add(0.5 * recips[0]);
    for i in 1..i_max {
        let (a1, b1) = (1i64 << (i - 1), (1i64 << i) - 1);
        let (a2, b2) = (1i64 << i, (1i64 << (i + 1)) - 1);
        let mut block = NeumaierSum::default();
        for w in (a2 - b1)..=(b2 - a1) {
            block.add(pair_count(w, a1, b1, a2, b2) as f64 * recips[w as usize - 1]);
        }
        // Both signs of the block pair, θ² = 2^(−4i).
        lo.add(2.0 * 2f64.powi(-4 * i as i32) * block.value());
    }
    let lo = lo.value();

    // For i ≥ i_max: block pair energy ≤ 2 · 2^(−4i) · |B_i||B_{i+1}| · max 1/m,
    // with lags at most 3·2^(i−1).
    let hi = match reciprocal_bound(l) {
        Some(b) if b.classes.iter().all(|c| c.rho < 2.0) => {
            let i = i_max as f64;
            let mut tail = b.head_max * 2f64.powf(-2.0 * i) / 0.75;
            for c in &b.classes {
                tail += 1.5f64.powf(c.rho) / c.k * 2f64.powf(i * (c.rho - 2.0))
                    / (1.0 - 2f64.powf(c.rho - 2.0));
            }
            lo + tail
        }
        _ => f64::INFINITY,
    };
    Ok(FlowEnergy {
        bounds: Interval { lo, hi },
        i_max,
        zero_conductance_lag: None,
    })
}

/// Which intermediate form of the closed-form bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundForm {
    /// `288 Σ_{w≥4} 1/((w − 3)³ p_w)`.
    Final,
    /// `(32/3) Σ_{w≥4} 1/((⌈w/3⌉ − 1)³ p_w)`, the step before relaxing the ceiling.
    Ceiling,
}

/// `3/(4p₁) + 1/(8p₂) + 32/(3p₂) + 32/(3p₃) + 288 Σ_{w≥4} 1/((w − 3)³ p_w)`,
/// summed to `w_max` with a tail bound from the reciprocal mass envelope.
pub fn paper_energy_bound(law: &SymmetricJumpLaw, w_max: u64) -> Result<Interval> {
    energy_bound(law, w_max, BoundForm::Final)
}

pub fn energy_bound(law: &SymmetricJumpLaw, w_max: u64, form: BoundForm) -> Result<Interval> {
    let l = lattice_of(law)?;
    let inf = Interval {
        lo: f64::INFINITY,
        hi: f64::INFINITY,
    };
    let (p1, p2, p3) = (l.mass(1), l.mass(2), l.mass(3));
    if !(p1 > 0.0 && p2 > 0.0 && p3 > 0.0) {
        return Ok(inf);
    }
    let bound = reciprocal_bound(l);
    let from = bound
        .as_ref()
        .map(|b| b.classes.iter().map(|c| c.from).max().unwrap_or(1))
        .unwrap_or(1);
    let w_max = w_max.max(4).max(from.saturating_sub(1));
    let mut s = NeumaierSum::default();
    s.add(0.75 / p1);
    s.add(0.125 / p2);
    s.add(32.0 / (3.0 * p2));
    s.add(32.0 / (3.0 * p3));
    for w in 4..=w_max {
        let m = l.mass(w);
        if !(m > 0.0) {
            return Ok(inf);
        }
        let term = match form {
            BoundForm::Final => {
                let d = (w - 3) as f64;
                288.0 / (d * d * d * m)
            }
            BoundForm::Ceiling => {
                let d = (ceil_div(w as i64, 3) - 1) as f64;
                32.0 / (3.0 * d * d * d * m)
            }
        };
        s.add(term);
    }
    let lo = s.value();
    let hi = match bound {
        Some(b) if b.classes.iter().all(|c| c.rho < 2.0) => {
            // For w > w_max: (w − 3)³ ≥ (1 − 3/(w_max + 1))³ w³ and 1/p_w ≤ w^ρ/k
            // inside each class, and the ceiling form is termwise smaller.
            let shrink = (1.0 - 3.0 / (w_max as f64 + 1.0)).powi(3);
            let tail: f64 = b
                .classes
                .iter()
                .map(|c| {
                    ResidueTerm {
                        modulus: c.modulus,
                        residue: c.residue,
                        k: 1.0 / c.k,
                        rho: 3.0 - c.rho,
                    }
                    .tail_sum(w_max)
                })
                .sum();
            lo + 288.0 * tail / shrink
        }
        _ => f64::INFINITY,
    };
    Ok(Interval { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_nearest_neighbour, make_power_law_lattice};

    #[test]
    fn pair_counts_cover_blocks() {
        for i in 1..8i64 {
            let (a1, b1, a2, b2) = (1 << (i - 1), (1 << i) - 1, 1 << i, (1 << (i + 1)) - 1);
            let total: i64 = (1..=(b2 - a1)).map(|w| pair_count(w, a1, b1, a2, b2)).sum();
            assert_eq!(total, (b1 - a1 + 1) * (b2 - a2 + 1));
        }
    }

    #[test]
    fn energy_matches_edge_enumeration() {
        use crate::network::flow::dyadic_flow;
        let law = make_power_law_lattice(0.5, false).unwrap();
        let i_max = 7u32;
        let r = (1i64 << i_max) - 1;
        let mut direct = 0.0;
        for u in -r..=r {
            for v in (u + 1)..=r {
                let t = dyadic_flow(u, v).to_f64();
                if t != 0.0 {
                    direct += t * t / law.mass(v - u);
                }
            }
        }
        let e = flow_energy(&law, i_max).unwrap();
        assert!((e.bounds.lo - direct).abs() < 1e-12 * direct);
        assert!(e.bounds.hi.is_finite() && e.bounds.hi > e.bounds.lo);
    }

    #[test]
    fn energy_chain_for_heavy_tails() {
        for alpha in [0.25, 0.5, 0.75] {
            let law = make_power_law_lattice(alpha, false).unwrap();
            let e = flow_energy(&law, 16).unwrap();
            let p = paper_energy_bound(&law, 100_000).unwrap();
            let c = energy_bound(&law, 100_000, BoundForm::Ceiling).unwrap();
            assert!(e.bounds.hi <= p.hi, "alpha {alpha}: {e:?} vs {p:?}");
            assert!(c.lo <= p.lo && e.bounds.lo <= c.hi);
            assert!(p.lo >= 0.75 / law.mass(1));
        }
    }

    #[test]
    fn divergent_and_degenerate_cases() {
        let harmonic = make_power_law_lattice(1.0, false).unwrap();
        assert_eq!(
            paper_energy_bound(&harmonic, 1000).unwrap().hi,
            f64::INFINITY
        );
        assert_eq!(flow_energy(&harmonic, 10).unwrap().bounds.hi, f64::INFINITY);
        let nn = make_nearest_neighbour(0.5).unwrap();
        let e = flow_energy(&nn, 5).unwrap();
        assert_eq!(e.bounds.lo, f64::INFINITY);
        assert_eq!(e.zero_conductance_lag, Some(2));
    }

    #[test]
    fn lower_bound_grows_for_light_tails() {
        let law = make_power_law_lattice(1.5, false).unwrap();
        let mut last = 0.0;
        for i in [6, 10, 14, 18] {
            let lo = flow_energy(&law, i).unwrap().bounds.lo;
            assert!(lo > 1.5 * last);
            last = lo;
        }
    }
}
