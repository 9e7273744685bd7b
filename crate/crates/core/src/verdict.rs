//! Verdict types shared by the criteria and reports.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    AnalyticTail,
    NumericOnly,
}

/// Direction suggested by a numerical diagnostic that cannot decide
/// convergence on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Leaning {
    TransientLeaning,
    RecurrentLeaning,
    Inconclusive,
}

/// Result of classifying a series or integral of nonnegative terms.
///
/// When the status is `Converges`, the true value lies in
/// `[partial_value, partial_value + tail_bound]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub status: Status,
    #[serde(with = "extended_float")]
    pub partial_value: f64,
    #[serde(with = "extended_float")]
    pub tail_bound: f64,
    pub truncation: String,
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConvergenceVerdict {
    pub fn converges(partial_value: f64, tail_bound: f64, truncation: impl Into<String>) -> Self {
        debug_assert!(
            tail_bound.is_finite(),
            "a convergent verdict needs a finite tail bound"
        );
        Self {
            status: Status::Converges,
            partial_value,
            tail_bound,
            truncation: truncation.into(),
            basis: Basis::AnalyticTail,
            note: None,
        }
    }

    pub fn diverges(partial_value: f64, truncation: impl Into<String>) -> Self {
        Self {
            status: Status::Diverges,
            partial_value,
            tail_bound: f64::INFINITY,
            truncation: truncation.into(),
            basis: Basis::AnalyticTail,
            note: None,
        }
    }

    pub fn inconclusive(
        partial_value: f64,
        tail_bound: f64,
        truncation: impl Into<String>,
        basis: Basis,
    ) -> Self {
        Self {
            status: Status::Inconclusive,
            partial_value,
            tail_bound,
            truncation: truncation.into(),
            basis,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Upper end of the value interval (infinite unless convergent).
    pub fn upper(&self) -> f64 {
        self.partial_value + self.tail_bound
    }

    pub fn is_converges(&self) -> bool {
        self.status == Status::Converges
    }

    pub fn is_diverges(&self) -> bool {
        self.status == Status::Diverges
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Transient,
    Recurrent,
    Unknown,
}

/// What a criterion's verdict was taken to imply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Implication {
    Transient,
    Recurrent,
    /// Applicable but silent in this direction.
    NoConclusion,
    /// The criterion's hypotheses do not hold for this triplet.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub criterion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ConvergenceVerdict>,
    pub implication: Implication,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransienceVerdict {
    pub classification: Classification,
    pub evidence: Vec<Evidence>,
    pub conflict: bool,
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"` and `"nan"`
/// so that reports stay valid JSON and round-trip.
pub mod extended_float {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!(
                    "unrecognized float {other:?}"
                ))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_bounds_round_trip() {
        let v = ConvergenceVerdict::diverges(12.5, "n <= 10").with_note("harmonic");
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("\"inf\""));
        let back: ConvergenceVerdict = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}
