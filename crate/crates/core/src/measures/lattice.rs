//! Symmetric masses on a lattice `δℤ`, stored for `n ≥ 1` plus the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::density::Density;
use crate::measures::tail::TailDescriptor;
use crate::special::{hurwitz_zeta, one_minus_cos, power_cosine_sum};

/// `k · n^(−rho)` restricted to `n ≡ residue (mod modulus)`; modulus is 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueTerm {
    pub modulus: u8,
    pub residue: u8,
    pub k: f64,
    pub rho: f64,
}

impl ResidueTerm {
    pub fn all(k: f64, rho: f64) -> Self {
        Self {
            modulus: 1,
            residue: 0,
            k,
            rho,
        }
    }

    pub fn even(k: f64, rho: f64) -> Self {
        Self {
            modulus: 2,
            residue: 0,
            k,
            rho,
        }
    }

    pub fn odd(k: f64, rho: f64) -> Self {
        Self {
            modulus: 2,
            residue: 1,
            k,
            rho,
        }
    }

    pub fn applies(&self, n: u64) -> bool {
        n % self.modulus as u64 == self.residue as u64
    }

    pub fn eval(&self, n: u64) -> f64 {
        if self.applies(n) {
            self.k * (n as f64).powf(-self.rho)
        } else {
            0.0
        }
    }

    /// `Σ_{n > after, n in class} k n^(−rho)`.
    pub fn tail_sum(&self, after: u64) -> f64 {
        let m = self.modulus as u64;
        let start = after + 1;
        let first = start + (self.residue as u64 + m - start % m) % m;
        let mf = m as f64;
        self.k * mf.powf(-self.rho) * hurwitz_zeta(self.rho, first as f64 / mf)
    }

    /// `Σ_{n ≥ 1, n in class} k n^(−rho) (1 − cos nθ)`.
    pub fn cosine_sum(&self, theta: f64) -> f64 {
        let full = power_cosine_sum(self.rho, theta);
        let sum = match (self.modulus, self.residue) {
            (1, _) => full,
            (2, 0) => 2f64.powf(-self.rho) * power_cosine_sum(self.rho, 2.0 * theta),
            _ => full - 2f64.powf(-self.rho) * power_cosine_sum(self.rho, 2.0 * theta),
        };
        self.k * sum.max(0.0)
    }
}

/// What the masses look like past the explicitly stored head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Beyond {
    /// No mass past the head.
    Zero,
    /// Sum of residue-class power terms.
    Terms { terms: Vec<ResidueTerm> },
    /// Not modeled: numeric work treats it as zero, verdicts stay inconclusive.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "masses", rename_all = "kebab-case")]
pub enum LatticeMasses {
    /// `head[n − 1] = m(n)` for `n ≤ head.len()`.
    Explicit { head: Vec<f64>, beyond: Beyond },
    /// Bin masses of `density` over `[(n − ½)δ, (n + ½)δ]`; the head was
    /// computed by quadrature, later bins in closed form.
    Binned { head: Vec<f64>, density: Density },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub spacing: f64,
    pub origin: f64,
    pub masses: LatticeMasses,
}

/// Lower envelope of the masses within one residue class past some index:
/// `m(n) ≥ k n^(−rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassEnvelope {
    pub modulus: u8,
    pub residue: u8,
    pub k: f64,
    pub rho: f64,
    /// First index at which the envelope is valid.
    pub from: u64,
}

/// Decay of the masses relevant to series of reciprocals `Σ 1/(n³ m(n))`.
#[derive(Debug, Clone, PartialEq)]
pub enum ReciprocalTail {
    /// One lower envelope per residue class, each asymptotically exact.
    Envelopes(Vec<ClassEnvelope>),
    /// Masses vanish past the given index.
    VanishesAfter(u64),
    Unknown,
}

impl Lattice {
    pub fn new(spacing: f64, origin: f64, masses: LatticeMasses) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::domain(format!(
                "lattice spacing must be positive, got {spacing}"
            )));
        }
        if !(origin >= 0.0) || !origin.is_finite() {
            return Err(Error::domain(format!(
                "origin mass must be nonnegative, got {origin}"
            )));
        }
        let head = match &masses {
            LatticeMasses::Explicit { head, beyond } => {
                if let Beyond::Terms { terms } = beyond {
                    if terms.is_empty() {
                        return Err(Error::domain("tail term list is empty"));
                    }
                    for t in terms {
                        if !(t.modulus == 1 || t.modulus == 2) || t.residue >= t.modulus {
                            return Err(Error::domain("residue terms need modulus 1 or 2"));
                        }
                        if !(t.k > 0.0) || !(t.rho > 1.0) {
                            return Err(Error::domain(format!(
                                "lattice tail terms need k > 0 and rho > 1 (summable), got k = {}, rho = {}",
                                t.k, t.rho
                            )));
                        }
                    }
                }
                head
            }
            LatticeMasses::Binned { head, .. } => head,
        };
        if let Some(bad) = head.iter().find(|m| !(**m >= 0.0) || !m.is_finite()) {
            return Err(Error::domain(format!(
                "lattice masses must be finite and nonnegative, got {bad}"
            )));
        }
        Ok(Self {
            spacing,
            origin,
            masses,
        })
    }

    pub fn head(&self) -> &[f64] {
        match &self.masses {
            LatticeMasses::Explicit { head, .. } | LatticeMasses::Binned { head, .. } => head,
        }
    }

    pub fn head_len(&self) -> u64 {
        self.head().len() as u64
    }

    /// Mass at `±n` for `n ≥ 1`; `mass(0)` is the origin mass.
    pub fn mass(&self, n: u64) -> f64 {
        if n == 0 {
            return self.origin;
        }
        let head = self.head();
        if (n as usize) <= head.len() {
            return head[n as usize - 1];
        }
        match &self.masses {
            LatticeMasses::Explicit { beyond, .. } => match beyond {
                Beyond::Zero | Beyond::Unknown => 0.0,
                Beyond::Terms { terms } => terms.iter().map(|t| t.eval(n)).sum(),
            },
            LatticeMasses::Binned { density, .. } => {
                let d = self.spacing;
                density.integral((n as f64 - 0.5) * d, (n as f64 + 0.5) * d)
            }
        }
    }

    /// `Σ_{n > after} m(n)`.
    pub fn tail_sum(&self, after: u64) -> f64 {
        let h = self.head_len();
        let mut s = 0.0;
        if after < h {
            s += self.head()[after as usize..].iter().sum::<f64>();
        }
        let from = after.max(h);
        s + self.beyond_sum(from)
    }

    fn beyond_sum(&self, from: u64) -> f64 {
        match &self.masses {
            LatticeMasses::Explicit { beyond, .. } => match beyond {
                Beyond::Zero | Beyond::Unknown => 0.0,
                Beyond::Terms { terms } => terms.iter().map(|t| t.tail_sum(from)).sum(),
            },
            LatticeMasses::Binned { density, .. } => {
                density.tail_mass((from as f64 + 0.5) * self.spacing)
            }
        }
    }

    /// `Σ_{n ≥ 1} m(n)`.
    pub fn one_side_total(&self) -> f64 {
        self.tail_sum(0)
    }

    /// `m(0) + 2 Σ_{n ≥ 1} m(n)`.
    pub fn total(&self) -> f64 {
        self.origin + 2.0 * self.one_side_total()
    }

    pub fn tail_known(&self) -> bool {
        !matches!(
            &self.masses,
            LatticeMasses::Explicit {
                beyond: Beyond::Unknown,
                ..
            }
        )
    }

    /// Upper envelope `m(n) ≤ k n^(−rho)` valid for every `n` past the head.
    pub fn upper_envelope(&self) -> Option<(f64, f64)> {
        match &self.masses {
            LatticeMasses::Explicit {
                beyond: Beyond::Terms { terms },
                ..
            } => {
                let rho = terms.iter().map(|t| t.rho).fold(f64::INFINITY, f64::min);
                let k = terms.iter().map(|t| t.k).sum();
                Some((k, rho))
            }
            _ => None,
        }
    }

    pub fn reciprocal_tail(&self) -> ReciprocalTail {
        let h = self.head_len();
        match &self.masses {
            LatticeMasses::Explicit { beyond, .. } => match beyond {
                Beyond::Zero => ReciprocalTail::VanishesAfter(h),
                Beyond::Unknown => ReciprocalTail::Unknown,
                Beyond::Terms { terms } => {
                    let split = terms.iter().any(|t| t.modulus == 2);
                    let classes: Vec<(u8, u8)> = if split {
                        vec![(2, 0), (2, 1)]
                    } else {
                        vec![(1, 0)]
                    };
                    let mut out = Vec::new();
                    for (m, r) in classes {
                        let members: Vec<&ResidueTerm> = terms
                            .iter()
                            .filter(|t| t.modulus == 1 || (t.modulus == m && t.residue == r))
                            .collect();
                        if members.is_empty() {
                            // This class carries no mass past the head.
                            return ReciprocalTail::VanishesAfter(h);
                        }
                        let rho = members.iter().map(|t| t.rho).fold(f64::INFINITY, f64::min);
                        let k = members
                            .iter()
                            .filter(|t| (t.rho - rho).abs() < 1e-14)
                            .map(|t| t.k)
                            .sum();
                        out.push(ClassEnvelope {
                            modulus: m,
                            residue: r,
                            k,
                            rho,
                            from: h + 1,
                        });
                    }
                    ReciprocalTail::Envelopes(out)
                }
            },
            LatticeMasses::Binned { density, .. } => {
                let Some((lo, lead)) = density.tail_term() else {
                    return match density.tail_descriptor().kind {
                        crate::measures::TailKind::CompactSupport => {
                            let end = density.support_end() / self.spacing;
                            ReciprocalTail::VanishesAfter(end.ceil() as u64)
                        }
                        _ => ReciprocalTail::Unknown,
                    };
                };
                if !density.tail_terms_positive() {
                    return ReciprocalTail::Unknown;
                }
                // For bins inside the power piece, m(n) ≥ δ f((n + ½)δ) ≥
                // δ k ((n + ½)δ)^(−rho) ≥ δ^(1−rho) k 1.5^(−rho) n^(−rho).
                let d = self.spacing;
                let from = ((lo / d) + 0.5).ceil().max(1.0) as u64;
                ReciprocalTail::Envelopes(vec![ClassEnvelope {
                    modulus: 1,
                    residue: 0,
                    k: d.powf(1.0 - lead.rho) * lead.k * 1.5f64.powf(-lead.rho),
                    rho: lead.rho,
                    from: from.max(h + 1),
                }])
            }
        }
    }

    /// `Σ_{n ≥ 1} m(n) (1 − cos nθ)` with an absolute error bound.
    pub fn cosine_sum(&self, theta: f64) -> (f64, f64) {
        let head = self.head();
        let mut head_sum = 0.0;
        for (i, m) in head.iter().enumerate() {
            head_sum += m * one_minus_cos((i + 1) as f64 * theta);
        }
        let h = head.len() as u64;
        match &self.masses {
            LatticeMasses::Explicit { beyond, .. } => match beyond {
                Beyond::Zero | Beyond::Unknown => (head_sum, 0.0),
                Beyond::Terms { terms } => {
                    let mut s = head_sum;
                    for t in terms {
                        let mut overlap = 0.0;
                        for n in 1..=h {
                            overlap += t.eval(n) * one_minus_cos(n as f64 * theta);
                        }
                        s += t.cosine_sum(theta) - overlap;
                    }
                    (s.max(0.0), 1e-13 * s.abs())
                }
            },
            LatticeMasses::Binned { density, .. } => {
                // Past the head, replace the bin sum by the continuous integral;
                // within a bin |cos nθ − cos(θy/δ)| ≤ θ/2.
                let a = (h as f64 + 0.5) * self.spacing;
                let xi = theta / self.spacing;
                let tail_mass = density.tail_mass(a);
                match crate::measures::exponent::cosine_integral(density, xi, a) {
                    Ok(q) => (head_sum + q.value, q.error + 0.5 * theta.abs() * tail_mass),
                    Err(_) => (head_sum, 2.0 * tail_mass),
                }
            }
        }
    }

    /// Descriptor of the heaviest tail.
    pub fn tail_descriptor(&self) -> TailDescriptor {
        match &self.masses {
            LatticeMasses::Explicit { head, beyond } => match beyond {
                Beyond::Zero => {
                    let last = head
                        .iter()
                        .rposition(|m| *m > 0.0)
                        .map(|i| i + 1)
                        .unwrap_or(1);
                    TailDescriptor::compact(last as f64 * self.spacing)
                }
                Beyond::Unknown => TailDescriptor::unknown(),
                Beyond::Terms { terms } => {
                    let rho = terms.iter().map(|t| t.rho).fold(f64::INFINITY, f64::min);
                    let k: f64 = terms
                        .iter()
                        .filter(|t| (t.rho - rho).abs() < 1e-14)
                        .map(|t| t.k)
                        .sum();
                    let onset = (head.len() as f64 + 1.0) * self.spacing;
                    TailDescriptor::power_law(rho, k, onset)
                        .unwrap_or_else(|_| TailDescriptor::unknown())
                }
            },
            LatticeMasses::Binned { density, .. } => density.tail_descriptor(),
        }
    }
}
