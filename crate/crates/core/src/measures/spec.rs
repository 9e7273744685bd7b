//! Serializable law descriptions, as read from configuration files.

use serde::{Deserialize, Serialize};

use super::{
    make_flat_core_power, make_multi_index, make_nearest_neighbour, make_power_law_lattice,
    make_stable_triplet, Beyond, Density, Lattice, LatticeMasses, LevyTriplet, PowerPiece,
    PowerTerm, ResidueTerm, SymmetricJumpLaw,
};
use crate::error::{Error, Result};

/// One piece `k · y^(−rho)` on `[lo, hi)`; a missing `hi` means unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub lo: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    pub k: f64,
    pub rho: f64,
}

fn one() -> f64 {
    1.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawSpec {
    PowerLawLattice {
        alpha: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        normalize: bool,
    },
    MultiIndex {
        alpha: f64,
        beta: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        normalize: bool,
    },
    Stable {
        alpha: f64,
        #[serde(default = "one")]
        gamma: f64,
    },
    NearestNeighbour {
        #[serde(default = "one")]
        mass: f64,
    },
    /// Explicit masses `m(1), m(2), ...` with optional power terms beyond them.
    Table {
        #[serde(default = "one")]
        spacing: f64,
        #[serde(default)]
        origin: f64,
        masses: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        tail: Vec<ResidueTerm>,
    },
    Piecewise {
        pieces: Vec<PieceSpec>,
    },
    FlatCorePower {
        rho: f64,
    },
    Gaussian {
        #[serde(default = "one")]
        sigma: f64,
    },
    Uniform {
        #[serde(default = "one")]
        half_width: f64,
    },
}

impl LawSpec {
    /// The jump law; for `stable` this is its Lévy measure (none when α = 2).
    pub fn build_law(&self) -> Result<SymmetricJumpLaw> {
        match self {
            LawSpec::PowerLawLattice { alpha, normalize } => {
                make_power_law_lattice(*alpha, *normalize)
            }
            LawSpec::MultiIndex {
                alpha,
                beta,
                normalize,
            } => make_multi_index(*alpha, *beta, *normalize),
            LawSpec::Stable { alpha, gamma } => make_stable_triplet(*alpha, *gamma)?
                .nu
                .ok_or_else(|| Error::domain("the alpha = 2 stable process has no jumps")),
            LawSpec::NearestNeighbour { mass } => make_nearest_neighbour(*mass),
            LawSpec::Table {
                spacing,
                origin,
                masses,
                tail,
            } => {
                let beyond = if tail.is_empty() {
                    Beyond::Zero
                } else {
                    Beyond::Terms {
                        terms: tail.clone(),
                    }
                };
                let lattice = Lattice::new(
                    *spacing,
                    *origin,
                    LatticeMasses::Explicit {
                        head: masses.clone(),
                        beyond,
                    },
                )?;
                SymmetricJumpLaw::lattice_auto(
                    lattice,
                    format!("table lattice ({} masses)", masses.len()),
                )
            }
            LawSpec::Piecewise { pieces } => {
                let pieces = pieces
                    .iter()
                    .map(|p| {
                        PowerPiece::new(
                            p.lo,
                            p.hi.unwrap_or(f64::INFINITY),
                            vec![PowerTerm::new(p.k, p.rho)],
                        )
                    })
                    .collect();
                SymmetricJumpLaw::density_auto(
                    Density::piecewise(pieces)?,
                    "piecewise power density",
                )
            }
            LawSpec::FlatCorePower { rho } => make_flat_core_power(*rho),
            LawSpec::Gaussian { sigma } => SymmetricJumpLaw::density_auto(
                Density::gaussian(*sigma)?,
                format!("gaussian sigma={sigma}"),
            ),
            LawSpec::Uniform { half_width } => SymmetricJumpLaw::density_auto(
                Density::uniform(*half_width)?,
                format!("uniform half_width={half_width}"),
            ),
        }
    }

    /// The Lévy triplet; non-stable families give the compound Poisson or
    /// pure-jump triplet `(0, 0, ν)`.
    pub fn build_triplet(&self) -> Result<LevyTriplet> {
        match self {
            LawSpec::Stable { alpha, gamma } => make_stable_triplet(*alpha, *gamma),
            _ => Ok(LevyTriplet::jumps(self.build_law()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let specs = vec![
            LawSpec::Stable {
                alpha: 0.5,
                gamma: 1.0,
            },
            LawSpec::MultiIndex {
                alpha: 0.5,
                beta: 1.5,
                normalize: true,
            },
            LawSpec::Piecewise {
                pieces: vec![
                    PieceSpec {
                        lo: 0.0,
                        hi: Some(1.0),
                        k: 0.25,
                        rho: 0.0,
                    },
                    PieceSpec {
                        lo: 1.0,
                        hi: None,
                        k: 0.25,
                        rho: 1.5,
                    },
                ],
            },
        ];
        for s in specs {
            let text = serde_json::to_string(&s).unwrap();
            let back: LawSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn builds_every_family() {
        let pieces = LawSpec::Piecewise {
            pieces: vec![
                PieceSpec {
                    lo: 0.0,
                    hi: Some(1.0),
                    k: 0.25,
                    rho: 0.0,
                },
                PieceSpec {
                    lo: 1.0,
                    hi: None,
                    k: 0.25,
                    rho: 2.0,
                },
            ],
        };
        assert!(pieces.build_law().unwrap().is_probability());
        assert!(LawSpec::Gaussian { sigma: 1.0 }
            .build_law()
            .unwrap()
            .is_probability());
        assert!(LawSpec::Stable {
            alpha: 2.0,
            gamma: 1.0
        }
        .build_law()
        .is_err());
        assert!(LawSpec::Stable {
            alpha: 2.0,
            gamma: 1.0
        }
        .build_triplet()
        .is_ok());
        let table = LawSpec::Table {
            spacing: 1.0,
            origin: 0.5,
            masses: vec![0.25],
            tail: vec![],
        };
        assert!(table.build_law().unwrap().is_probability());
    }
}
