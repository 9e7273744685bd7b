//! Transience and recurrence criteria and their combination into a verdict.

mod chung_fuchs;
mod compare;
mod sato_shepp;
mod series;

use serde::{Deserialize, Serialize};

pub use chung_fuchs::{chung_fuchs, chung_fuchs_with, fit_small_xi_power, PowerFit};
pub use compare::{compare_measures, compare_measures_with};
pub use sato_shepp::{criterion_12_sato_shepp, criterion_12_with};
pub use series::{
    criterion_11_continuous, criterion_11_continuous_with, criterion_11_discrete,
    criterion_11_discrete_with, reciprocal_integral, reciprocal_series, series_extent,
};

use crate::measures::{LevyTriplet, Support};
use crate::verdict::{
    Basis, Classification, ConvergenceVerdict, Evidence, Implication, Status, TransienceVerdict,
};

/// Truncations and gates shared by the criteria. Every field has a default
/// that reports record alongside their results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriteriaOptions {
    /// Terms summed explicitly in lattice series.
    pub series_terms: u64,
    /// Upper end of the explicitly integrated range of improper integrals.
    pub integral_cutoff: f64,
    /// Radius `a` of the Chung–Fuchs integral.
    pub cf_radius: f64,
    pub cf_xi_min: f64,
    pub cf_xi_max: f64,
    pub cf_points: usize,
    /// Largest slope standard error for which the fitted exponent decides.
    pub cf_gate: f64,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        Self {
            series_terms: 1_000_000,
            integral_cutoff: 1e6,
            cf_radius: 1.0,
            cf_xi_min: 1e-6,
            cf_xi_max: 1e-2,
            cf_points: 25,
            cf_gate: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyFlags {
    /// User assertion that the Lévy measure is unimodal.
    #[serde(default)]
    pub unimodal: bool,
}

pub const CHUNG_FUCHS: &str = "chung-fuchs";
pub const CRITERION_11: &str = "criterion-1.1";
pub const CRITERION_12: &str = "criterion-1.2";

pub fn classify(t: &LevyTriplet, flags: ClassifyFlags) -> TransienceVerdict {
    classify_with(t, flags, &CriteriaOptions::default())
}

/// Runs every applicable criterion and combines the implications. Failures
/// become evidence without a verdict rather than errors.
pub fn classify_with(
    t: &LevyTriplet,
    flags: ClassifyFlags,
    opts: &CriteriaOptions,
) -> TransienceVerdict {
    let mut evidence = Vec::new();

    evidence.push(match chung_fuchs_with(t, opts.cf_radius, opts) {
        Ok(v) => {
            let implication = match (v.status, v.basis) {
                (Status::Converges, Basis::AnalyticTail) => Implication::Transient,
                (Status::Diverges, Basis::AnalyticTail) => Implication::Recurrent,
                _ => Implication::NoConclusion,
            };
            evidence_of(CHUNG_FUCHS, v, implication)
        }
        Err(e) => failed(CHUNG_FUCHS, Implication::NoConclusion, e.to_string()),
    });

    match &t.nu {
        None => {
            evidence.push(failed(
                CRITERION_11,
                Implication::NotApplicable,
                "no jump measure".into(),
            ));
            evidence.push(failed(
                CRITERION_12,
                Implication::NotApplicable,
                "no jump measure".into(),
            ));
        }
        Some(_) if t.c > 0.0 => {
            let why = "triplet has a gaussian component".to_string();
            evidence.push(failed(
                CRITERION_11,
                Implication::NotApplicable,
                why.clone(),
            ));
            evidence.push(failed(CRITERION_12, Implication::NotApplicable, why));
        }
        Some(nu) => {
            let c11 = match &nu.support {
                Support::Lattice(_) => criterion_11_discrete_with(nu, opts),
                Support::Continuous(_) => criterion_11_continuous_with(nu, opts),
            };
            evidence.push(match c11 {
                Ok(v) => {
                    let implication = if v.is_converges() {
                        Implication::Transient
                    } else {
                        Implication::NoConclusion
                    };
                    evidence_of(CRITERION_11, v, implication)
                }
                Err(e) => failed(CRITERION_11, Implication::NotApplicable, e.to_string()),
            });

            let unimodal = flags.unimodal && !nu.is_lattice();
            let c12 = criterion_12_with(nu, unimodal, opts);
            evidence.push(match c12 {
                Ok(v) => {
                    let implication = match v.status {
                        Status::Diverges => Implication::Recurrent,
                        Status::Converges if unimodal => Implication::Transient,
                        _ => Implication::NoConclusion,
                    };
                    let mut e = evidence_of(CRITERION_12, v, implication);
                    if flags.unimodal && nu.is_lattice() {
                        e.reason =
                            Some("unimodal flag ignored: lattice laws are never unimodal".into());
                    }
                    e
                }
                Err(e) => failed(CRITERION_12, Implication::NotApplicable, e.to_string()),
            });
        }
    }

    combine(evidence)
}

fn evidence_of(name: &str, v: ConvergenceVerdict, implication: Implication) -> Evidence {
    Evidence {
        criterion: name.into(),
        verdict: Some(v),
        implication,
        reason: None,
    }
}

fn failed(name: &str, implication: Implication, reason: String) -> Evidence {
    Evidence {
        criterion: name.into(),
        verdict: None,
        implication,
        reason: Some(reason),
    }
}

/// Combines implications; disagreement yields `Unknown` with the conflict flag.
pub fn combine(evidence: Vec<Evidence>) -> TransienceVerdict {
    let transient = evidence
        .iter()
        .any(|e| e.implication == Implication::Transient);
    let recurrent = evidence
        .iter()
        .any(|e| e.implication == Implication::Recurrent);
    let (classification, conflict) = match (transient, recurrent) {
        (true, true) => (Classification::Unknown, true),
        (true, false) => (Classification::Transient, false),
        (false, true) => (Classification::Recurrent, false),
        (false, false) => (Classification::Unknown, false),
    };
    TransienceVerdict {
        classification,
        evidence,
        conflict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_multi_index, make_nearest_neighbour, make_stable_triplet};

    fn find<'a>(v: &'a TransienceVerdict, name: &str) -> &'a Evidence {
        v.evidence.iter().find(|e| e.criterion == name).unwrap()
    }

    #[test]
    fn stable_half_is_transient_by_every_route() {
        let t = make_stable_triplet(0.5, 1.0).unwrap();
        let v = classify(&t, ClassifyFlags { unimodal: true });
        assert_eq!(v.classification, Classification::Transient);
        assert!(!v.conflict);
        for name in [CHUNG_FUCHS, CRITERION_11, CRITERION_12] {
            assert_eq!(find(&v, name).implication, Implication::Transient, "{name}");
        }
    }

    #[test]
    fn stable_three_halves_is_recurrent() {
        let v = classify(
            &make_stable_triplet(1.5, 1.0).unwrap(),
            ClassifyFlags::default(),
        );
        assert_eq!(v.classification, Classification::Recurrent);
        assert_eq!(find(&v, CHUNG_FUCHS).implication, Implication::Recurrent);
        assert_eq!(find(&v, CRITERION_12).implication, Implication::Recurrent);
    }

    #[test]
    fn brownian_motion() {
        let v = classify(
            &make_stable_triplet(2.0, 1.0).unwrap(),
            ClassifyFlags::default(),
        );
        assert_eq!(v.classification, Classification::Recurrent);
        assert_eq!(
            find(&v, CRITERION_11).implication,
            Implication::NotApplicable
        );
    }

    #[test]
    fn multi_index_transient_through_fourier_side() {
        let t = LevyTriplet::jumps(make_multi_index(0.5, 1.5, false).unwrap());
        let v = classify(&t, ClassifyFlags::default());
        assert_eq!(v.classification, Classification::Transient);
        assert_eq!(
            find(&v, CRITERION_11).verdict.as_ref().unwrap().status,
            Status::Diverges
        );
        assert_eq!(
            find(&v, CRITERION_11).implication,
            Implication::NoConclusion
        );
    }

    #[test]
    fn simple_walk_is_recurrent() {
        let t = LevyTriplet::jumps(make_nearest_neighbour(0.5).unwrap());
        let v = classify(&t, ClassifyFlags::default());
        assert_eq!(v.classification, Classification::Recurrent);
        assert_eq!(
            find(&v, CRITERION_11).implication,
            Implication::NotApplicable
        );
    }

    #[test]
    fn conflicts_surface() {
        let mk = |i| Evidence {
            criterion: "x".into(),
            verdict: None,
            implication: i,
            reason: None,
        };
        let v = combine(vec![mk(Implication::Transient), mk(Implication::Recurrent)]);
        assert_eq!(v.classification, Classification::Unknown);
        assert!(v.conflict);
    }
}
