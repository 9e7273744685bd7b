use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    PowerLaw,
    Exponential,
    CompactSupport,
    Unknown,
}

/// Analytic description of how a law's mass decays for `|y| ≥ onset`.
///
/// For `PowerLaw`, mass or density behaves like `constant · |y|^(−exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDescriptor {
    pub kind: TailKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    pub constant: f64,
    pub onset: f64,
}

impl TailDescriptor {
    pub fn power_law(exponent: f64, constant: f64, onset: f64) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::domain(format!(
                "tail exponent must be positive, got {exponent}"
            )));
        }
        Self::check_positive(constant, onset)?;
        Ok(Self {
            kind: TailKind::PowerLaw,
            exponent: Some(exponent),
            constant,
            onset,
        })
    }

    pub fn exponential(constant: f64, onset: f64) -> Result<Self> {
        Self::check_positive(constant, onset)?;
        Ok(Self {
            kind: TailKind::Exponential,
            exponent: None,
            constant,
            onset,
        })
    }

    pub fn compact(onset: f64) -> Self {
        Self {
            kind: TailKind::CompactSupport,
            exponent: None,
            constant: 1.0,
            onset: onset.max(f64::MIN_POSITIVE),
        }
    }

    pub fn unknown() -> Self {
        Self {
            kind: TailKind::Unknown,
            exponent: None,
            constant: 1.0,
            onset: 1.0,
        }
    }

    fn check_positive(constant: f64, onset: f64) -> Result<()> {
        if !(constant > 0.0) {
            return Err(Error::domain(format!(
                "tail constant must be positive, got {constant}"
            )));
        }
        if !(onset > 0.0) {
            return Err(Error::domain(format!(
                "tail onset must be positive, got {onset}"
            )));
        }
        Ok(())
    }

    /// Power exponent when the tail is a power law.
    pub fn rho(&self) -> Option<f64> {
        match self.kind {
            TailKind::PowerLaw => self.exponent,
            _ => None,
        }
    }

    /// Whether `∫_{|y|>1} |y|^k dν` converges, or `None` when the tail is unknown.
    pub fn moment_converges(&self, k: u32) -> Option<bool> {
        match self.kind {
            TailKind::PowerLaw => Some(self.exponent.unwrap_or(0.0) > k as f64 + 1.0),
            TailKind::Exponential | TailKind::CompactSupport => Some(true),
            TailKind::Unknown => None,
        }
    }
}
