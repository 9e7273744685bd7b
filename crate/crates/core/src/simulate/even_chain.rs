//! The walk watched only on the even sites: `T_n` is the n-th visit of `S`
//! to `2ℤ` and `X_n = S_(T_n)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{replica_rng, JumpSampler};
use crate::error::{Error, Result};
use crate::measures::{make_multi_index, SymmetricJumpLaw};
use crate::quad::NeumaierSum;
use crate::special::hurwitz_zeta;
use crate::verdict::{Basis, ConvergenceVerdict};

/// Hard cap on steps per sample.
pub const EVEN_CHAIN_CAP: u64 = 1_000_000_000;
/// Samples drawn from one generator stream in batch mode.
const BLOCK: u64 = 4096;

fn sampler_for(law: &SymmetricJumpLaw) -> Result<JumpSampler> {
    if !law.is_lattice() || !law.is_probability() {
        return Err(Error::domain(
            "the even chain needs a lattice probability law",
        ));
    }
    JumpSampler::new(law)
}

/// First return of the walk to the even sites, and the steps it took.
fn first_even<R: rand::Rng + ?Sized>(
    s: &JumpSampler,
    rng: &mut R,
    cap: u64,
) -> Result<(i128, u64)> {
    let mut k: i128 = 0;
    for step in 1..=cap {
        k = k.saturating_add(s.sample_index(rng));
        if k.rem_euclid(2) == 0 {
            return Ok((k, step));
        }
    }
    Err(Error::CapHit { cap })
}

/// `X_1` as a lattice index (replica 0 of `seed`).
pub fn even_chain_sample(law: &SymmetricJumpLaw, seed: u64) -> Result<i128> {
    let s = sampler_for(law)?;
    Ok(first_even(&s, &mut replica_rng(seed, 0), EVEN_CHAIN_CAP)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenChainSample {
    pub samples: u64,
    pub seed: u64,
    /// Counts of each value of `X_1`.
    pub counts: BTreeMap<i128, u64>,
    pub mean_steps: f64,
}

impl EvenChainSample {
    pub fn frequency(&self, x: i128) -> f64 {
        self.counts.get(&x).copied().unwrap_or(0) as f64 / self.samples as f64
    }
}

/// Empirical law of `X_1`; block `b` of 4096 samples uses stream `b`.
pub fn even_chain_batch(
    law: &SymmetricJumpLaw,
    samples: u64,
    seed: u64,
) -> Result<EvenChainSample> {
    let s = sampler_for(law)?;
    let blocks = samples.div_ceil(BLOCK);
    let parts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = replica_rng(seed, b);
            let n = BLOCK.min(samples - b * BLOCK);
            let mut counts = BTreeMap::new();
            let mut steps = 0u64;
            for _ in 0..n {
                let (x, k) = first_even(&s, &mut rng, EVEN_CHAIN_CAP)?;
                *counts.entry(x).or_insert(0u64) += 1;
                steps += k;
            }
            Ok((counts, steps))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = BTreeMap::new();
    let mut steps = 0u64;
    for (c, k) in parts {
        for (x, n) in c {
            *counts.entry(x).or_insert(0) += n;
        }
        steps += k;
    }
    Ok(EvenChainSample {
        samples,
        seed,
        counts,
        mean_steps: steps as f64 / samples.max(1) as f64,
    })
}

/// Terms summed explicitly by [`even_chain_criterion`].
pub const EVEN_CHAIN_TERMS: u64 = 1_000_000;

/// `Σ_{n≥1} 1/((2n)³ c⁻¹ (2n)^(−α−1)) = c Σ (2n)^(α−2)` for the raw
/// multi-index masses, `c = Σ_{n∈ℤ} p_n`. Since `P(X_1 = 2n) ≥ c⁻¹ p_(2n)`,
/// convergence bounds the even chain's series and so shows transience.
pub fn even_chain_criterion(alpha: f64, beta: f64) -> Result<ConvergenceVerdict> {
    even_chain_criterion_with(alpha, beta, EVEN_CHAIN_TERMS)
}

pub fn even_chain_criterion_with(alpha: f64, beta: f64, n_max: u64) -> Result<ConvergenceVerdict> {
    let raw = make_multi_index(alpha, beta, false)?;
    let c = raw.total();
    let mut s = NeumaierSum::default();
    for n in 1..=n_max {
        s.add((2.0 * n as f64).powf(alpha - 2.0));
    }
    let partial = c * s.value();
    let truncation = format!("n <= {n_max}");
    if alpha >= 1.0 {
        return Ok(ConvergenceVerdict::inconclusive(
            partial,
            f64::INFINITY,
            truncation,
            Basis::AnalyticTail,
        )
        .with_note("the lower bound on P(X_1 = 2n) is one-sided; no conclusion for alpha >= 1"));
    }
    let tail = c * 2f64.powf(alpha - 2.0) * hurwitz_zeta(2.0 - alpha, n_max as f64 + 1.0);
    Ok(ConvergenceVerdict::converges(partial, tail, truncation)
        .with_note("sufficient for the even chain, hence the original walk is transient"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_nearest_neighbour, make_table_lattice};
    use crate::special::zeta;
    use crate::verdict::Status;
    use approx::assert_relative_eq;

    #[test]
    fn even_jumps_return_at_once() {
        let law = make_table_lattice(1.0, 0.0, vec![0.0, 0.5]).unwrap();
        let b = even_chain_batch(&law, 1000, 4).unwrap();
        assert_eq!(b.mean_steps, 1.0);
        assert!(b.counts.keys().all(|x| *x == 2 || *x == -2));
    }

    #[test]
    fn unit_jumps_two_step_tree() {
        let b = even_chain_batch(&make_nearest_neighbour(0.5).unwrap(), 100_000, 8).unwrap();
        assert_eq!(b.mean_steps, 2.0);
        assert!(b
            .counts
            .keys()
            .all(|x| x.rem_euclid(2) == 0 && x.abs() <= 2));
        for (x, p) in [(0, 0.5), (2, 0.25), (-2, 0.25)] {
            let se = (p * (1.0 - p) / 1e5f64).sqrt();
            assert!((b.frequency(x) - p).abs() < 4.0 * se);
        }
        let x = even_chain_sample(&make_nearest_neighbour(0.5).unwrap(), 1).unwrap();
        assert_eq!(x.rem_euclid(2), 0);
    }

    #[test]
    fn batches_are_reproducible() {
        let law = make_multi_index(0.5, 1.5, true).unwrap();
        assert_eq!(
            even_chain_batch(&law, 5000, 2).unwrap(),
            even_chain_batch(&law, 5000, 2).unwrap()
        );
    }

    #[test]
    fn criterion_values() {
        let v = even_chain_criterion(0.5, 1.5).unwrap();
        assert_eq!(v.status, Status::Converges);
        let c = make_multi_index(0.5, 1.5, false).unwrap().total();
        let exact = c * 2f64.powf(-1.5) * zeta(1.5);
        assert!(v.partial_value <= exact && exact <= v.upper() * (1.0 + 1e-12));
        assert_relative_eq!(v.upper(), exact, max_relative = 1e-10);
        assert_eq!(
            even_chain_criterion(1.0, 1.5).unwrap().status,
            Status::Inconclusive
        );
        assert!(even_chain_criterion(0.0, 1.5).is_err());
    }
}
