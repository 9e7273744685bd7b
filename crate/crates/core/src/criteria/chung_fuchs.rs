//! The integral `∫_{−a}^{a} dξ/ψ(ξ)` near the origin.
//!
//! Convergence is governed by the power of ψ at 0, which is estimated by a
//! least-squares fit of `log ψ` against `log ξ` on a logarithmic grid. The
//! fit's slope standard error is the quality gate: below it the verdict is
//! read from the fitted exponent, above it the result is only numeric. The
//! exponent must clear 1 by three standard errors plus the drift of the
//! slope across the grid, so curvature (ψ = πξ − ξ²/2, say) cannot pass
//! for a power below 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{char_exponent, LevyTriplet, Support};
use crate::quad::{integrate_geometric, QuadOptions};
use crate::verdict::{Basis, ConvergenceVerdict};

use super::CriteriaOptions;

/// Least-squares fit `log ψ ≈ log C + s log ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub slope_std_error: f64,
    pub rms_residual: f64,
    /// `|s_low − s_high|` for separate fits on the lower and upper halves.
    pub slope_drift: f64,
}

/// Slope, intercept and residual sum of squares of a least-squares line.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let nf = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    (slope, intercept, ss)
}

pub fn fit_small_xi_power(t: &LevyTriplet, opts: &CriteriaOptions) -> Result<PowerFit> {
    let n = opts.cf_points.max(3);
    let (l0, l1) = (opts.cf_xi_min.ln(), opts.cf_xi_max.ln());
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let lx = l0 + (l1 - l0) * i as f64 / (n - 1) as f64;
        let psi = char_exponent(t, lx.exp())?;
        if !(psi > 1e-300) || !psi.is_finite() {
            return Err(Error::Numeric {
                message: format!("ψ underflows at ξ = {:e}", lx.exp()),
                partial: psi,
            });
        }
        xs.push(lx);
        ys.push(psi.ln());
    }
    let nf = n as f64;
    let (slope, intercept, ss) = line_fit(&xs, &ys);
    let sxx: f64 = {
        let mx = xs.iter().sum::<f64>() / nf;
        xs.iter().map(|x| (x - mx) * (x - mx)).sum()
    };
    let h = n.div_ceil(2);
    let low = line_fit(&xs[..h], &ys[..h]).0;
    let high = line_fit(&xs[n - h..], &ys[n - h..]).0;
    Ok(PowerFit {
        exponent: slope,
        coefficient: intercept.exp(),
        slope_std_error: (ss / (nf - 2.0) / sxx).sqrt(),
        rms_residual: (ss / nf).sqrt(),
        slope_drift: (low - high).abs(),
    })
}

pub fn chung_fuchs(t: &LevyTriplet, a: f64) -> Result<ConvergenceVerdict> {
    chung_fuchs_with(t, a, &CriteriaOptions::default())
}

pub fn chung_fuchs_with(
    t: &LevyTriplet,
    a: f64,
    opts: &CriteriaOptions,
) -> Result<ConvergenceVerdict> {
    if !(a > opts.cf_xi_min) || !a.is_finite() {
        return Err(Error::domain(format!(
            "radius a must exceed {:e}, got {a}",
            opts.cf_xi_min
        )));
    }
    if let Some(Support::Lattice(l)) = t.nu.as_ref().map(|n| &n.support) {
        // ψ of a lattice law is periodic and may vanish again at 2π/δ.
        if t.c == 0.0 && a > std::f64::consts::PI / l.spacing {
            return Err(Error::domain(
                "for lattice laws the radius must not exceed π/δ",
            ));
        }
    }
    let fit = fit_small_xi_power(t, opts)?;
    let xi_min = opts.cf_xi_min;
    let q = integrate_geometric(
        |xi: f64| match char_exponent(t, xi) {
            Ok(psi) if psi > 0.0 => 1.0 / psi,
            _ => f64::NAN,
        },
        xi_min,
        a,
        2.0,
        QuadOptions::default().with_rel_tol(1e-10),
    )?;
    if !q.value.is_finite() {
        return Err(Error::Numeric {
            message: "ψ vanishes or fails inside the integration range".into(),
            partial: q.value,
        });
    }
    let partial = 2.0 * q.value;
    let truncation = format!("{xi_min:e} <= |xi| <= {a}");
    let s = fit.exponent;
    let se = fit.slope_std_error;
    let margin = 3.0 * se + fit.slope_drift;
    let note = format!(
        "small-xi exponent {s:.6} (slope s.e. {se:.2e}, drift {:.2e}, rms residual {:.2e})",
        fit.slope_drift, fit.rms_residual
    );
    if !(se < opts.cf_gate) {
        return Ok(ConvergenceVerdict::inconclusive(
            partial,
            f64::INFINITY,
            truncation,
            Basis::NumericOnly,
        )
        .with_note(note));
    }
    if s + margin < 1.0 {
        // ψ(ξ) ≥ ψ(ξmin)(ξ/ξmin)^s' below ξmin with the largest plausible
        // exponent s' = s + margin, so ∫_0^{ξmin} dξ/ψ ≤ ξmin/(ψ(ξmin)(1 − s')).
        let upper_s = s + margin;
        let inner = xi_min / (char_exponent(t, xi_min)? * (1.0 - upper_s));
        Ok(
            ConvergenceVerdict::converges(partial, 2.0 * inner * (1.0 + 1e-6), truncation)
                .with_note(note),
        )
    } else if s - margin >= 1.0 - 1e-6 {
        Ok(ConvergenceVerdict::diverges(partial, truncation).with_note(note))
    } else {
        Ok(ConvergenceVerdict::inconclusive(
            partial,
            f64::INFINITY,
            truncation,
            Basis::AnalyticTail,
        )
        .with_note(note))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_multi_index, make_power_law_lattice, make_stable_triplet};
    use crate::verdict::Status;
    use approx::assert_relative_eq;

    #[test]
    fn stable_half() {
        let t = make_stable_triplet(0.5, 1.0).unwrap();
        let v = chung_fuchs(&t, 1.0).unwrap();
        assert_eq!(v.status, Status::Converges);
        assert!(v.partial_value <= 4.0 && 4.0 <= v.upper());
        assert_relative_eq!(v.upper(), 4.0, max_relative = 1e-5);
    }

    #[test]
    fn cauchy_and_brownian_diverge() {
        for alpha in [1.0, 2.0] {
            let t = make_stable_triplet(alpha, 1.0).unwrap();
            assert_eq!(chung_fuchs(&t, 1.0).unwrap().status, Status::Diverges);
        }
    }

    #[test]
    fn multi_index_exponent() {
        let t = LevyTriplet::jumps(make_multi_index(0.5, 1.5, false).unwrap());
        let fit = fit_small_xi_power(&t, &CriteriaOptions::default()).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.01);
        assert_eq!(chung_fuchs(&t, 1.0).unwrap().status, Status::Converges);
    }

    #[test]
    fn curvature_does_not_pass_for_transience() {
        // ψ(ξ) = πξ − ξ²/2 for p_n = n^(−2): the fitted slope sits just below 1.
        let t = LevyTriplet::jumps(make_power_law_lattice(1.0, false).unwrap());
        let fit = fit_small_xi_power(&t, &CriteriaOptions::default()).unwrap();
        assert!(fit.exponent < 1.0 && fit.slope_drift > 0.0);
        assert_ne!(chung_fuchs(&t, 1.0).unwrap().status, Status::Converges);
    }
}
