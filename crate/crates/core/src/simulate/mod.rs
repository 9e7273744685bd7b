//! Monte Carlo diagnostics: random walks, their Poissonized versions,
//! sojourn times in a window, and the walk observed on the even sites.
//!
//! Every replica draws from its own ChaCha8 stream: the generator is seeded
//! with `seed_from_u64(seed)` and switched to stream `replica`. Replicas may
//! run in parallel; results are reduced in replica order, so statistics are
//! reproducible bit for bit. Nothing here feeds the analytic verdicts.

mod even_chain;
mod sampler;

pub use even_chain::{
    even_chain_batch, even_chain_criterion, even_chain_criterion_with, even_chain_sample,
    EvenChainSample, EVEN_CHAIN_CAP,
};
pub use sampler::{JumpSampler, TABLE_SIZE};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::SymmetricJumpLaw;
use crate::verdict::Leaning;

/// Growth ratios below this suggest a bounded sojourn.
pub const TRANSIENT_GROWTH: f64 = 1.15;
/// Growth ratios above this suggest an unbounded sojourn.
pub const RECURRENT_GROWTH: f64 = 1.3;

/// The generator for replica `replica` of a run seeded with `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Length of a path: a number of steps, or a time span for the walk
/// subordinated to a Poisson clock of the given rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Horizon {
    Steps { steps: u64 },
    Time { time: f64, rate: f64 },
}

impl Horizon {
    pub fn length(&self) -> f64 {
        match self {
            Horizon::Steps { steps } => *steps as f64,
            Horizon::Time { time, .. } => *time,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Horizon::Time { time, rate } = self {
            if !(*rate > 0.0) || !rate.is_finite() {
                return Err(Error::domain(format!("rate must be positive, got {rate}")));
            }
            if !(*time >= 0.0) || !time.is_finite() {
                return Err(Error::domain(format!(
                    "horizon must be nonnegative, got {time}"
                )));
            }
        }
        Ok(())
    }
}

/// Streaming statistics of one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub final_position: f64,
    /// Final lattice index, for lattice laws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_index: Option<i128>,
    /// Time with `|position| < window`; in steps, counts `S_0, …, S_(n−1)`.
    pub sojourn: f64,
    /// The same up to half the horizon.
    pub sojourn_half: f64,
    pub max_excursion: f64,
    /// Entries into the window from outside.
    pub returns_to_window: u64,
    pub jumps: u64,
}

/// Position kept exactly as a lattice index when possible.
#[derive(Clone, Copy)]
enum Pos {
    Index(i128, f64),
    Real(f64),
}

impl Pos {
    fn value(&self) -> f64 {
        match self {
            Pos::Index(k, d) => *k as f64 * d,
            Pos::Real(x) => *x,
        }
    }

    fn step<R: Rng + ?Sized>(&mut self, s: &JumpSampler, rng: &mut R) {
        match self {
            Pos::Index(k, _) => *k = k.saturating_add(s.sample_index(rng)),
            Pos::Real(x) => *x += s.sample(rng),
        }
    }
}

struct Tracker {
    window: f64,
    pos: Pos,
    inside: bool,
    summary: PathSummary,
}

impl Tracker {
    fn new(s: &JumpSampler, window: f64) -> Self {
        let pos = match s.spacing() {
            Some(d) => Pos::Index(0, d),
            None => Pos::Real(0.0),
        };
        Self {
            window,
            pos,
            inside: true,
            summary: PathSummary {
                final_position: 0.0,
                final_index: None,
                sojourn: 0.0,
                sojourn_half: 0.0,
                max_excursion: 0.0,
                returns_to_window: 0,
                jumps: 0,
            },
        }
    }

    fn jump<R: Rng + ?Sized>(&mut self, s: &JumpSampler, rng: &mut R) {
        self.pos.step(s, rng);
        self.summary.jumps += 1;
        let x = self.pos.value().abs();
        self.summary.max_excursion = self.summary.max_excursion.max(x);
        let now = x < self.window;
        if now && !self.inside {
            self.summary.returns_to_window += 1;
        }
        self.inside = now;
    }

    fn finish(mut self) -> PathSummary {
        self.summary.final_position = self.pos.value();
        if let Pos::Index(k, _) = self.pos {
            self.summary.final_index = Some(k);
        }
        self.summary
    }
}

fn run_path<R: Rng + ?Sized>(
    s: &JumpSampler,
    horizon: Horizon,
    window: f64,
    rng: &mut R,
) -> PathSummary {
    let mut t = Tracker::new(s, window);
    match horizon {
        Horizon::Steps { steps } => {
            let half = steps / 2;
            for k in 0..steps {
                if t.inside {
                    t.summary.sojourn += 1.0;
                    if k < half {
                        t.summary.sojourn_half += 1.0;
                    }
                }
                t.jump(s, rng);
            }
        }
        Horizon::Time { time, rate } => {
            let clock = Exp::new(rate).expect("validated rate");
            let half = 0.5 * time;
            let mut now = 0.0;
            loop {
                let next = now + clock.sample(rng);
                let end = next.min(time);
                if t.inside {
                    t.summary.sojourn += end - now;
                    t.summary.sojourn_half += (end.min(half) - now.min(half)).max(0.0);
                }
                if next >= time {
                    break;
                }
                now = next;
                t.jump(s, rng);
            }
        }
    }
    t.finish()
}

fn check_window(window: f64) -> Result<()> {
    if !(window > 0.0) || window.is_nan() {
        return Err(Error::domain(format!(
            "window must be positive, got {window}"
        )));
    }
    Ok(())
}

/// One path of `S_n = J_1 + … + J_n` (replica 0 of `seed`).
pub fn sample_walk(
    law: &SymmetricJumpLaw,
    steps: u64,
    window: f64,
    seed: u64,
) -> Result<PathSummary> {
    if !law.is_probability() {
        return Err(Error::domain("the random walk needs a probability law"));
    }
    check_window(window)?;
    let s = JumpSampler::new(law)?;
    Ok(run_path(
        &s,
        Horizon::Steps { steps },
        window,
        &mut replica_rng(seed, 0),
    ))
}

/// One path of `S_(P_t)` for a Poisson clock of the given rate, up to `horizon`.
pub fn poissonize(
    law: &SymmetricJumpLaw,
    rate: f64,
    horizon: f64,
    window: f64,
    seed: u64,
) -> Result<PathSummary> {
    check_window(window)?;
    let h = Horizon::Time {
        time: horizon,
        rate,
    };
    h.validate()?;
    let s = JumpSampler::new(law)?;
    Ok(run_path(&s, h, window, &mut replica_rng(seed, 0)))
}

/// Ratio of mean sojourns at the full and half horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthDiagnostic {
    pub half_horizon_estimate: f64,
    pub ratio: f64,
    pub ratio_std_error: f64,
    pub leaning: Leaning,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub replica: u64,
    pub sojourn: f64,
    pub max_excursion: f64,
    pub returns: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    /// Mean time in `(−window, window)` over replicas.
    pub sojourn_estimate: f64,
    pub sojourn_std_error: f64,
    pub window: f64,
    pub horizon: Horizon,
    pub replicas: u64,
    pub seed: u64,
    /// Mean over replicas of the largest `|position|`.
    pub max_excursion: f64,
    /// Total over replicas.
    pub returns_to_window: u64,
    pub mean_final_position: f64,
    pub final_position_std_error: f64,
    pub mean_jumps: f64,
    pub growth: GrowthDiagnostic,
    /// Always true: Monte Carlo output never decides a verdict.
    pub diagnostic: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<ReplicaRecord>,
}

impl TrajectoryStats {
    pub fn records_csv(&self) -> String {
        let mut out = String::from("replica,sojourn,max_excursion,returns\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.replica, r.sojourn, r.max_excursion, r.returns
            ));
        }
        out
    }
}

fn mean_and_var(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = if n > 1.0 {
        xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Sojourn time in `(−a, a)` over independent replicas, with the growth
/// from half to full horizon as a diagnostic.
pub fn sojourn_estimate(
    law: &SymmetricJumpLaw,
    a: f64,
    horizon: Horizon,
    replicas: u64,
    seed: u64,
) -> Result<TrajectoryStats> {
    check_window(a)?;
    horizon.validate()?;
    if replicas == 0 {
        return Err(Error::domain("at least one replica is needed"));
    }
    if matches!(horizon, Horizon::Steps { .. }) && !law.is_probability() {
        return Err(Error::domain("the random walk needs a probability law"));
    }
    let s = JumpSampler::new(law)?;
    let paths: Vec<PathSummary> = (0..replicas)
        .into_par_iter()
        .map(|r| run_path(&s, horizon, a, &mut replica_rng(seed, r)))
        .collect();
    let n = replicas as f64;
    let (m2, v2) = mean_and_var(paths.iter().map(|p| p.sojourn));
    let (m1, v1) = mean_and_var(paths.iter().map(|p| p.sojourn_half));
    let cov = if replicas > 1 {
        paths
            .iter()
            .map(|p| (p.sojourn - m2) * (p.sojourn_half - m1))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    let ratio = m2 / m1;
    // Delta method for the ratio of means.
    let rel_var = (v2 / (m2 * m2) + v1 / (m1 * m1) - 2.0 * cov / (m1 * m2)).max(0.0);
    let ratio_std_error = ratio * (rel_var / n).sqrt();
    let leaning = if ratio < TRANSIENT_GROWTH {
        Leaning::TransientLeaning
    } else if ratio > RECURRENT_GROWTH {
        Leaning::RecurrentLeaning
    } else {
        Leaning::Inconclusive
    };
    let (mf, vf) = mean_and_var(paths.iter().map(|p| p.final_position));
    let records = paths
        .iter()
        .enumerate()
        .map(|(i, p)| ReplicaRecord {
            replica: i as u64,
            sojourn: p.sojourn,
            max_excursion: p.max_excursion,
            returns: p.returns_to_window,
        })
        .collect();
    Ok(TrajectoryStats {
        sojourn_estimate: m2,
        sojourn_std_error: (v2 / n).sqrt(),
        window: a,
        horizon,
        replicas,
        seed,
        max_excursion: paths.iter().map(|p| p.max_excursion).sum::<f64>() / n,
        returns_to_window: paths.iter().map(|p| p.returns_to_window).sum(),
        mean_final_position: mf,
        final_position_std_error: (vf / n).sqrt(),
        mean_jumps: paths.iter().map(|p| p.jumps as f64).sum::<f64>() / n,
        growth: GrowthDiagnostic {
            half_horizon_estimate: m1,
            ratio,
            ratio_std_error,
            leaning,
        },
        diagnostic: true,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_nearest_neighbour, make_power_law_lattice};

    #[test]
    fn parity_and_empty_paths() {
        let nn = make_nearest_neighbour(0.5).unwrap();
        for seed in 0..20 {
            let p = sample_walk(&nn, 10, 1.0, seed).unwrap();
            assert_eq!(p.final_index.unwrap().rem_euclid(2), 0);
            assert_eq!(p.jumps, 10);
        }
        let p = sample_walk(&nn, 0, 1.0, 3).unwrap();
        assert_eq!(p.final_position, 0.0);
        assert_eq!(p.sojourn, 0.0);
        let p = poissonize(&nn, 1.0, 0.0, 5.0, 3).unwrap();
        assert_eq!((p.final_position, p.sojourn, p.jumps), (0.0, 0.0, 0));
    }

    #[test]
    fn reproducible_and_bounded() {
        let law = make_power_law_lattice(0.5, true).unwrap();
        let h = Horizon::Steps { steps: 2000 };
        let a = sojourn_estimate(&law, 5.0, h, 64, 42).unwrap();
        let b = sojourn_estimate(&law, 5.0, h, 64, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.sojourn_estimate <= 2000.0);
        let c = sojourn_estimate(&law, 5.0, h, 64, 43).unwrap();
        assert_ne!(a.sojourn_estimate, c.sojourn_estimate);
        let wide = sojourn_estimate(&make_nearest_neighbour(0.5).unwrap(), 1e9, h, 8, 1).unwrap();
        assert_eq!(wide.sojourn_estimate, 2000.0);
        assert!(a.records_csv().lines().count() == 65);
    }

    #[test]
    fn poisson_clock_mean() {
        let nn = make_nearest_neighbour(0.5).unwrap();
        let st = sojourn_estimate(
            &nn,
            1.0,
            Horizon::Time {
                time: 10.0,
                rate: 1.0,
            },
            10_000,
            9,
        )
        .unwrap();
        // Poisson(10) has standard deviation √10.
        assert!((st.mean_jumps - 10.0).abs() < 3.0 * (10.0f64 / 1e4).sqrt());
        assert!(st.sojourn_estimate <= 10.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let raw = make_power_law_lattice(0.5, false).unwrap();
        assert!(sample_walk(&raw, 10, 1.0, 0).is_err());
        let nn = make_nearest_neighbour(0.5).unwrap();
        assert!(sample_walk(&nn, 10, 0.0, 0).is_err());
        assert!(poissonize(&nn, 0.0, 1.0, 1.0, 0).is_err());
        assert!(sojourn_estimate(&nn, 1.0, Horizon::Steps { steps: 10 }, 0, 0).is_err());
    }
}
