//! Exact samplers for symmetric jump laws.
//!
//! Lattice laws draw `|J|` by binary search in a cumulative table and fall
//! back to a rejection sampler for the tail past the table, so no mass is
//! truncated. The sign is an independent fair coin.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::measures::{
    Beyond, Density, LatticeMasses, Normalization, PowerPiece, ResidueTerm, Support,
    SymmetricJumpLaw,
};

/// Largest number of explicit entries in a lattice table.
pub const TABLE_SIZE: u64 = 1_000_000;
/// Tail mass below which an unsamplable tail is dropped and the table renormalized.
const NEGLIGIBLE_TAIL: f64 = 1e-12;

/// `x^(−ρ)` restricted to `[lo, hi]`, sampled by inverting its CDF.
#[derive(Debug, Clone, Copy)]
struct PowerSegment {
    lo: f64,
    hi: f64,
    rho: f64,
}

impl PowerSegment {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let (lo, hi, rho) = (self.lo, self.hi, self.rho);
        if rho == 0.0 {
            return lo + u * (hi - lo);
        }
        if rho == 1.0 {
            return lo * (hi / lo).powf(u);
        }
        let e = 1.0 - rho;
        let a = lo.powf(e);
        let b = if hi.is_infinite() { 0.0 } else { hi.powf(e) };
        (a + u * (b - a)).powf(1.0 / e)
    }
}

/// A piece `Σ k_i y^(−ρ_i)` on `[lo, hi]`, sampled exactly from the single
/// power with the smallest exponent and an acceptance step.
#[derive(Debug, Clone)]
struct PieceSampler {
    proposal: PowerSegment,
    piece: PowerPiece,
    /// `bound · y^(−ρ*) ≥ f(y)` on the piece.
    bound: f64,
}

impl PieceSampler {
    fn new(piece: &PowerPiece, lo: f64) -> Result<Self> {
        let lo = lo.max(piece.lo);
        let rho = piece
            .terms
            .iter()
            .map(|t| t.rho)
            .fold(f64::INFINITY, f64::min);
        if piece.terms.len() > 1 && !(lo > 0.0) {
            return Err(Error::domain(
                "multi-term density pieces touching 0 cannot be sampled",
            ));
        }
        let bound = piece
            .terms
            .iter()
            .map(|t| t.k.abs() * lo.powf(rho - t.rho))
            .sum();
        if piece.hi.is_infinite() && !(rho > 1.0) {
            return Err(Error::domain("unbounded piece is not integrable"));
        }
        Ok(Self {
            proposal: PowerSegment {
                lo,
                hi: piece.hi,
                rho,
            },
            piece: piece.clone(),
            bound,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.piece.terms.len() == 1 {
            return self.proposal.sample(rng);
        }
        loop {
            let y = self.proposal.sample(rng);
            let accept = self.piece.eval(y) / (self.bound * y.powf(-self.proposal.rho));
            if rng.random::<f64>() < accept {
                return y;
            }
        }
    }
}

/// Lattice masses past the table: `m(n) = Σ k_i n^(−ρ_i)` over residue classes.
#[derive(Debug, Clone)]
struct TermTail {
    after: u64,
    terms: Vec<ResidueTerm>,
    rho: f64,
    /// `m(n) ≤ bound ∫_{n−1}^n x^(−ρ) dx` for `n > after`.
    bound: f64,
}

impl TermTail {
    fn new(after: u64, terms: &[ResidueTerm]) -> Self {
        let rho = terms.iter().map(|t| t.rho).fold(f64::INFINITY, f64::min);
        let n0 = (after + 1) as f64;
        let bound = terms.iter().map(|t| t.k * n0.powf(rho - t.rho)).sum();
        Self {
            after,
            terms: terms.to_vec(),
            rho,
            bound,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let proposal = PowerSegment {
            lo: self.after as f64,
            hi: f64::INFINITY,
            rho: self.rho,
        };
        loop {
            let x = proposal.sample(rng);
            if x >= u64::MAX as f64 {
                return u64::MAX;
            }
            let n = (x.ceil() as u64).max(self.after + 1);
            let nf = n as f64;
            // ∫_{n−1}^n x^(−ρ) dx without cancellation.
            let cell = nf.powf(1.0 - self.rho) * ((1.0 - self.rho) * (-1.0 / nf).ln_1p()).exp_m1()
                / (self.rho - 1.0);
            let m: f64 = self.terms.iter().map(|t| t.eval(n)).sum();
            if rng.random::<f64>() * self.bound * cell < m {
                return n;
            }
        }
    }
}

#[derive(Debug, Clone)]
enum LatticeTail {
    None,
    Terms(TermTail),
    /// Continuous tail beyond `(after + ½)δ`, rounded to the nearest site.
    Density {
        sampler: PieceSampler,
        spacing: f64,
    },
}

#[derive(Debug, Clone)]
enum Kind {
    Lattice {
        /// `cum[i] = P(|J| ≤ i)`.
        cum: Vec<f64>,
        tail: LatticeTail,
    },
    Gaussian {
        sigma: f64,
    },
    Uniform {
        half_width: f64,
    },
    Pieces {
        /// `cum[j]`: probability of `|J|` lying in pieces `0..=j`.
        cum: Vec<f64>,
        pieces: Vec<PieceSampler>,
    },
}

#[derive(Debug, Clone)]
pub struct JumpSampler {
    kind: Kind,
    spacing: Option<f64>,
}

fn normalizing_total(law: &SymmetricJumpLaw) -> Result<f64> {
    match law.normalization {
        Normalization::Probability => Ok(1.0),
        Normalization::FiniteMeasure { total } => Ok(total),
        Normalization::SigmaFinite => Err(Error::domain("an infinite measure has no jump sampler")),
    }
}

impl JumpSampler {
    /// Sampler for `law / total`; probability laws and finite measures only.
    pub fn new(law: &SymmetricJumpLaw) -> Result<Self> {
        let total = normalizing_total(law)?;
        match &law.support {
            Support::Lattice(l) => {
                let (table_len, tail) = match &l.masses {
                    LatticeMasses::Explicit { head, beyond } => match beyond {
                        Beyond::Zero => (head.len() as u64, LatticeTail::None),
                        Beyond::Unknown => {
                            return Err(Error::domain(
                                "lattice tail is unknown and cannot be sampled",
                            ));
                        }
                        Beyond::Terms { terms } => {
                            let len = TABLE_SIZE.max(head.len() as u64);
                            (len, LatticeTail::Terms(TermTail::new(len, terms)))
                        }
                    },
                    LatticeMasses::Binned { head, density } => {
                        let len = head.len() as u64;
                        let start = (len as f64 + 0.5) * l.spacing;
                        let tail = match density {
                            Density::PiecewisePower { pieces } => match pieces.last() {
                                Some(p) if p.hi.is_infinite() && p.lo <= start => {
                                    LatticeTail::Density {
                                        sampler: PieceSampler::new(p, start)?,
                                        spacing: l.spacing,
                                    }
                                }
                                _ => LatticeTail::None,
                            },
                            _ => LatticeTail::None,
                        };
                        (len, tail)
                    }
                };
                let mut cum = Vec::with_capacity(table_len as usize + 1);
                let mut acc = l.origin / total;
                cum.push(acc);
                for n in 1..=table_len {
                    acc += 2.0 * l.mass(n) / total;
                    cum.push(acc);
                }
                let tail_mass = 2.0 * l.tail_sum(table_len) / total;
                if matches!(tail, LatticeTail::None) && tail_mass > 0.0 {
                    if tail_mass > NEGLIGIBLE_TAIL {
                        return Err(Error::domain(format!(
                            "lattice tail of mass {tail_mass:e} has no exact sampler"
                        )));
                    }
                    let last = acc;
                    cum.iter_mut().for_each(|c| *c /= last);
                }
                Ok(Self {
                    kind: Kind::Lattice { cum, tail },
                    spacing: Some(l.spacing),
                })
            }
            Support::Continuous(d) => {
                let kind = match d {
                    Density::Gaussian { sigma } => Kind::Gaussian { sigma: *sigma },
                    Density::Uniform { half_width } => Kind::Uniform {
                        half_width: *half_width,
                    },
                    Density::PiecewisePower { pieces } => {
                        let mut cum = Vec::new();
                        let mut acc = 0.0;
                        let mut samplers = Vec::new();
                        for p in pieces {
                            acc += 2.0 * p.integral(p.lo, p.hi) / total;
                            cum.push(acc);
                            samplers.push(PieceSampler::new(p, p.lo)?);
                        }
                        Kind::Pieces {
                            cum,
                            pieces: samplers,
                        }
                    }
                };
                Ok(Self {
                    kind,
                    spacing: None,
                })
            }
        }
    }

    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    /// Signed lattice index of a jump; lattice laws only.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> i128 {
        let Kind::Lattice { cum, tail } = &self.kind else {
            panic!("sample_index needs a lattice sampler");
        };
        let u: f64 = rng.random();
        let last = *cum.last().expect("table has the origin entry");
        let magnitude = if u < last {
            cum.partition_point(|c| *c <= u) as u64
        } else {
            match tail {
                LatticeTail::Terms(t) => t.sample(rng),
                LatticeTail::Density { sampler, spacing } => {
                    let y = sampler.sample(rng) / spacing;
                    if y >= u64::MAX as f64 {
                        u64::MAX
                    } else {
                        (y + 0.5).floor() as u64
                    }
                }
                // Rounding left u above the last entry.
                LatticeTail::None => (cum.len() - 1) as u64,
            }
        };
        let m = magnitude as i128;
        if rng.random::<bool>() {
            m
        } else {
            -m
        }
    }

    /// A jump as a real number.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            Kind::Lattice { .. } => {
                self.sample_index(rng) as f64 * self.spacing.expect("lattice spacing")
            }
            Kind::Gaussian { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            Kind::Uniform { half_width } => half_width * (2.0 * rng.random::<f64>() - 1.0),
            Kind::Pieces { cum, pieces } => {
                let u = rng.random::<f64>() * cum.last().copied().unwrap_or(1.0);
                let j = cum.partition_point(|c| *c <= u).min(pieces.len() - 1);
                let y = pieces[j].sample(rng);
                if rng.random::<bool>() {
                    y
                } else {
                    -y
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{
        make_flat_core_power, make_multi_index, make_nearest_neighbour, make_power_law_lattice,
    };
    use crate::simulate::replica_rng;

    #[test]
    fn nearest_neighbour_jumps_are_unit() {
        let s = JumpSampler::new(&make_nearest_neighbour(0.5).unwrap()).unwrap();
        let mut rng = replica_rng(1, 0);
        let mut plus = 0;
        for _ in 0..10_000 {
            let j = s.sample_index(&mut rng);
            assert!(j == 1 || j == -1);
            plus += (j == 1) as i32;
        }
        assert!((plus - 5000).abs() < 300);
    }

    #[test]
    fn lattice_frequencies_match_masses() {
        let law = make_multi_index(0.5, 1.5, true).unwrap();
        let s = JumpSampler::new(&law).unwrap();
        let mut rng = replica_rng(7, 3);
        let n = 400_000;
        let mut counts = [0u32; 6];
        for _ in 0..n {
            let j = s.sample_index(&mut rng).unsigned_abs();
            if j < 6 {
                counts[j as usize] += 1;
            }
        }
        for (m, &c) in counts.iter().enumerate().skip(1) {
            let p = 2.0 * law.mass(m as i64);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let freq = c as f64 / n as f64;
            assert!((freq - p).abs() < 4.0 * se, "{m}: {freq} vs {p}");
        }
    }

    #[test]
    fn tail_sampler_matches_tail_mass() {
        // P(|J| > 10^6) for α = 0.5 normalized: needs the rejection tail.
        let law = make_power_law_lattice(0.5, true).unwrap();
        let l = law.as_lattice().unwrap();
        let p = 2.0 * l.tail_sum(TABLE_SIZE);
        let s = JumpSampler::new(&law).unwrap();
        let mut rng = replica_rng(11, 0);
        let n = 2_000_000;
        let hits = (0..n)
            .filter(|_| s.sample_index(&mut rng).unsigned_abs() > TABLE_SIZE as u128)
            .count();
        let se = (p / n as f64).sqrt();
        assert!(((hits as f64 / n as f64) - p).abs() < 4.0 * se);
        // Within the tail, P(|J| > 4·10^6 | |J| > 10^6) ≈ 1/2.
        let t = TermTail::new(TABLE_SIZE, &[ResidueTerm::all(1.0, 1.5)]);
        let m = 200_000;
        let far = (0..m)
            .filter(|_| t.sample(&mut rng) > 4 * TABLE_SIZE)
            .count() as f64
            / m as f64;
        assert!((far - 0.5).abs() < 0.01, "{far}");
    }

    #[test]
    fn continuous_pieces() {
        let law = make_flat_core_power(1.5).unwrap();
        let s = JumpSampler::new(&law).unwrap();
        let mut rng = replica_rng(5, 0);
        let n = 200_000;
        let inside = (0..n).filter(|_| s.sample(&mut rng).abs() < 1.0).count() as f64 / n as f64;
        let p = 2.0 * law.as_density().unwrap().integral(0.0, 1.0);
        assert!((inside - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt());
    }
}
