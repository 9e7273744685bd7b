//! Discretization of continuous jump laws onto `δℤ`, the modified
//! characteristics of the resulting walks, and the reciprocal-series
//! comparison between a density and its unit binning.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{reciprocal_integral, reciprocal_series, series_extent};
use crate::error::{Error, Result};
use crate::measures::{
    jump_exponent, Density, Lattice, LatticeMasses, Normalization, Support, SymmetricJumpLaw,
    TailKind,
};
use crate::quad::{integrate_panels, NeumaierSum, QuadOptions};
use crate::verdict::ConvergenceVerdict;

/// Bins beyond this many are left to the closed-form bin integral.
pub const MAX_HEAD_BINS: u64 = 20_000;
/// Bins are computed by quadrature until the one-sided tail mass drops below this.
const HEAD_TAIL_MASS: f64 = 1e-13;
/// Default radius of the truncation function.
pub const DEFAULT_H_RADIUS: f64 = 1.0;

/// `P(J^δ = δn) = ∫_{δn−δ/2}^{δn+δ/2} f`, computed for `n ≥ 0` only so the
/// lattice law is exactly even.
pub fn bin_density(f: &SymmetricJumpLaw, delta: f64) -> Result<SymmetricJumpLaw> {
    let density = f
        .as_density()
        .ok_or_else(|| Error::domain("binning needs a continuous law"))?;
    if !f.is_probability() {
        return Err(Error::domain("binning needs a probability density"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::domain(format!(
            "bin width must be positive, got {delta}"
        )));
    }
    let mut bins = 1u64;
    while bins < MAX_HEAD_BINS && density.tail_mass((bins as f64 + 0.5) * delta) >= HEAD_TAIL_MASS {
        bins += 1;
    }
    let opts = QuadOptions::default()
        .with_abs_tol(1e-12 / (bins + 1) as f64)
        .with_rel_tol(1e-14);
    let breaks = density.breakpoints();
    let bin = |lo: f64, hi: f64| -> Result<f64> {
        let mut edges = vec![lo];
        edges.extend(breaks.iter().copied().filter(|x| *x > lo && *x < hi));
        edges.push(hi);
        Ok(integrate_panels(|y| density.eval(y), &edges, opts)?.value)
    };
    let origin = 2.0 * bin(0.0, 0.5 * delta)?;
    let head = (1..=bins)
        .into_par_iter()
        .map(|n| bin((n as f64 - 0.5) * delta, (n as f64 + 0.5) * delta))
        .collect::<Result<Vec<f64>>>()?;
    let lattice = Lattice::new(
        delta,
        origin,
        LatticeMasses::Binned {
            head,
            density: density.clone(),
        },
    )?;
    SymmetricJumpLaw::from_lattice(
        lattice,
        Normalization::Probability,
        format!("{} binned at {delta}", f.label),
    )
}

/// A bounded continuous test function `g`.
#[derive(Clone)]
pub enum TestKernel {
    /// `φ((|y| − 2s)/s)` with `φ(t) = exp(1 − 1/(1 − t²))` on `|t| < 1`.
    Bump {
        scale: f64,
    },
    /// `cos(ωy) exp(−y²/32)`.
    DampedCosine {
        omega: f64,
    },
    /// `cos(ωy)`, evaluated through the characteristic exponent.
    Cosine {
        omega: f64,
    },
    Constant {
        value: f64,
    },
    /// User function, assumed to vanish for `|y| > radius`.
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        radius: f64,
    },
}

impl fmt::Debug for TestKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestKernel::Bump { scale } => write!(f, "Bump({scale})"),
            TestKernel::DampedCosine { omega } => write!(f, "DampedCosine({omega})"),
            TestKernel::Cosine { omega } => write!(f, "Cosine({omega})"),
            TestKernel::Constant { value } => write!(f, "Constant({value})"),
            TestKernel::Custom { radius, .. } => write!(f, "Custom(radius {radius})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestFunction {
    pub id: String,
    pub kernel: TestKernel,
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Where `exp(−y²/32)` drops below `1e−17`.
const DAMPED_RADIUS: f64 = 36.0;

impl TestFunction {
    pub fn bump(scale: f64) -> Self {
        Self {
            id: format!("bump-{scale}"),
            kernel: TestKernel::Bump { scale },
        }
    }

    pub fn damped_cosine(omega: f64) -> Self {
        Self {
            id: format!("damped-cos-{omega}"),
            kernel: TestKernel::DampedCosine { omega },
        }
    }

    pub fn cosine(omega: f64) -> Self {
        Self {
            id: format!("cos-{omega}"),
            kernel: TestKernel::Cosine { omega },
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            id: format!("const-{value}"),
            kernel: TestKernel::Constant { value },
        }
    }

    pub fn custom(
        id: impl Into<String>,
        radius: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            kernel: TestKernel::Custom {
                f: Arc::new(f),
                radius,
            },
        }
    }

    /// Look up a built-in function by id, e.g. `bump-2` or `cos-1`.
    pub fn from_id(id: &str) -> Result<Self> {
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::domain(format!("bad parameter in test function id {id:?}")))
        };
        if let Some(s) = id.strip_prefix("bump-") {
            Ok(Self::bump(parse(s)?))
        } else if let Some(s) = id.strip_prefix("damped-cos-") {
            Ok(Self::damped_cosine(parse(s)?))
        } else if let Some(s) = id.strip_prefix("cos-") {
            Ok(Self::cosine(parse(s)?))
        } else if let Some(s) = id.strip_prefix("const-") {
            Ok(Self::constant(parse(s)?))
        } else {
            Err(Error::domain(format!("unknown test function {id:?}")))
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match &self.kernel {
            TestKernel::Bump { scale } => bump((y.abs() - 2.0 * scale) / scale),
            TestKernel::DampedCosine { omega } => (omega * y).cos() * (-y * y / 32.0).exp(),
            TestKernel::Cosine { omega } => (omega * y).cos(),
            TestKernel::Constant { value } => *value,
            TestKernel::Custom { f, .. } => f(y),
        }
    }

    /// Radius outside of which `g` is zero, with interior breakpoints.
    fn support(&self) -> Option<(f64, Vec<f64>)> {
        match &self.kernel {
            TestKernel::Bump { scale } => Some((3.0 * scale, vec![*scale, 2.0 * scale])),
            TestKernel::DampedCosine { .. } => Some((DAMPED_RADIUS, Vec::new())),
            TestKernel::Custom { radius, .. } => Some((*radius, Vec::new())),
            TestKernel::Cosine { .. } | TestKernel::Constant { .. } => None,
        }
    }
}

/// Smooth bumps at scales 1, 2, 4 and damped cosines at frequencies 1, 2.
pub fn default_tests() -> Vec<TestFunction> {
    vec![
        TestFunction::bump(1.0),
        TestFunction::bump(2.0),
        TestFunction::bump(4.0),
        TestFunction::damped_cosine(1.0),
        TestFunction::damped_cosine(2.0),
    ]
}

/// `h(x) = x` on `[−r, r]`, linear back to 0 at `±2r`, zero beyond.
pub fn truncation(x: f64, r: f64) -> f64 {
    let a = x.abs();
    if a <= r {
        x
    } else if a < 2.0 * r {
        x.signum() * (2.0 * r - a)
    } else {
        0.0
    }
}

/// Modified characteristics per unit time of a walk with one jump per unit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharTriple {
    /// `B = E[h(J)]`, zero by symmetry; computed as a check.
    pub drift: f64,
    /// `C̃ = E[h²(J)]`.
    pub quadratic: f64,
    /// `E[g(J)]` for each test function id.
    pub tests: BTreeMap<String, f64>,
    pub h_radius: f64,
}

/// `E[g(J)]` for `g` vanishing outside `[−radius, radius]`.
fn expect_compact(
    law: &SymmetricJumpLaw,
    g: &(dyn Fn(f64) -> f64 + Sync),
    radius: f64,
    extra_breaks: &[f64],
) -> Result<f64> {
    match &law.support {
        Support::Lattice(l) => {
            let d = l.spacing;
            let mut s = NeumaierSum::default();
            s.add(l.origin * g(0.0));
            let n_end = (radius / d).floor() as u64 + 1;
            for n in 1..=n_end {
                let y = n as f64 * d;
                s.add(l.mass(n) * (g(y) + g(-y)));
            }
            Ok(s.value())
        }
        Support::Continuous(density) => {
            let mut breaks = vec![0.0, radius];
            breaks.extend(
                density
                    .breakpoints()
                    .into_iter()
                    .chain(extra_breaks.iter().copied()),
            );
            breaks.retain(|x| *x >= 0.0 && *x <= radius);
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let mut fine = Vec::new();
            for w in breaks.windows(2) {
                for i in 0..16 {
                    fine.push(w[0] + (w[1] - w[0]) * i as f64 / 16.0);
                }
            }
            fine.push(radius);
            let opts = QuadOptions::default()
                .with_abs_tol(1e-15)
                .with_rel_tol(1e-14);
            Ok(integrate_panels(|y| (g(y) + g(-y)) * density.eval(y), &fine, opts)?.value)
        }
    }
}

fn expect_test(law: &SymmetricJumpLaw, t: &TestFunction) -> Result<f64> {
    match &t.kernel {
        // A probability law integrates constants exactly.
        TestKernel::Constant { value } => Ok(*value),
        TestKernel::Cosine { omega } => {
            let (v, err) = jump_exponent(law, *omega)?;
            if !(err <= 1e-10) {
                return Err(Error::Numeric {
                    message: format!("E[cos({omega} J)] has error {err:e}"),
                    partial: 1.0 - v,
                });
            }
            Ok(1.0 - v)
        }
        _ => {
            let (radius, breaks) = t.support().expect("compact kernels have a support");
            expect_compact(law, &|y| t.eval(y), radius, &breaks)
        }
    }
}

pub fn characteristics(
    law: &SymmetricJumpLaw,
    h_radius: f64,
    tests: &[TestFunction],
) -> Result<CharTriple> {
    if !law.is_probability() {
        return Err(Error::domain("characteristics need a probability law"));
    }
    if !(h_radius > 0.0) || !h_radius.is_finite() {
        return Err(Error::domain(format!(
            "truncation radius must be positive, got {h_radius}"
        )));
    }
    let r = h_radius;
    let breaks = [r, 2.0 * r];
    let drift = expect_compact(law, &|y| truncation(y, r), 2.0 * r, &breaks)?;
    let quadratic = expect_compact(law, &|y| truncation(y, r).powi(2), 2.0 * r, &breaks)?;
    let mut map = BTreeMap::new();
    for t in tests {
        map.insert(t.id.clone(), expect_test(law, t)?);
    }
    Ok(CharTriple {
        drift,
        quadratic,
        tests: map,
        h_radius,
    })
}

/// Row ids used for the truncation-function columns.
pub const QUADRATIC_ID: &str = "quadratic";
pub const DRIFT_ID: &str = "drift";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    pub test_id: String,
    pub abs_error: f64,
    /// `log(e_prev/e)/log(δ_prev/δ)` against the previous δ.
    pub order_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub reference: CharTriple,
    pub rows: Vec<ConvergenceRow>,
    /// Order from the last two deltas, per id.
    pub orders: BTreeMap<String, Option<f64>>,
    /// Whether the errors decrease strictly over the whole δ sequence, per id.
    pub monotone: BTreeMap<String, bool>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,test_id,abs_error,order_estimate\n");
        for r in &self.rows {
            let order = r.order_estimate.map(|o| o.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{:e},{}\n",
                r.delta, r.test_id, r.abs_error, order
            ));
        }
        out
    }
}

/// Compares the characteristics of `f` with those of its δ-binnings.
pub fn convergence_report(
    f: &SymmetricJumpLaw,
    deltas: &[f64],
    tests: &[TestFunction],
    h_radius: f64,
) -> Result<ConvergenceReport> {
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain(
            "deltas must be non-empty and strictly decreasing",
        ));
    }
    let reference = characteristics(f, h_radius, tests)?;
    let triples = deltas
        .par_iter()
        .map(|&d| bin_density(f, d).and_then(|l| characteristics(&l, h_radius, tests)))
        .collect::<Result<Vec<_>>>()?;
    let mut ids: Vec<String> = tests.iter().map(|t| t.id.clone()).collect();
    ids.push(QUADRATIC_ID.into());
    ids.push(DRIFT_ID.into());
    let error_of = |t: &CharTriple, id: &str| match id {
        QUADRATIC_ID => (t.quadratic - reference.quadratic).abs(),
        DRIFT_ID => t.drift.abs(),
        _ => (t.tests[id] - reference.tests[id]).abs(),
    };
    let mut rows = Vec::new();
    let mut orders = BTreeMap::new();
    let mut monotone = BTreeMap::new();
    for id in &ids {
        let errs: Vec<f64> = triples.iter().map(|t| error_of(t, id)).collect();
        let order = |k: usize| {
            (k > 0 && errs[k] > 0.0 && errs[k - 1] > 0.0)
                .then(|| (errs[k - 1] / errs[k]).ln() / (deltas[k - 1] / deltas[k]).ln())
        };
        for (k, &d) in deltas.iter().enumerate() {
            rows.push(ConvergenceRow {
                delta: d,
                test_id: id.clone(),
                abs_error: errs[k],
                order_estimate: order(k),
            });
        }
        orders.insert(id.clone(), order(deltas.len() - 1));
        monotone.insert(id.clone(), errs.windows(2).all(|w| w[1] < w[0]));
    }
    Ok(ConvergenceReport {
        reference,
        rows,
        orders,
        monotone,
    })
}

/// Both sides of `Σ_{n≥1} 1/((n+½)³ P(J¹=n)) ≤ ∫_{½}^∞ dy/(y³ f(y))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenGap {
    pub lhs: ConvergenceVerdict,
    pub rhs: ConvergenceVerdict,
    /// The inequality between the partial sum to `N` and the integral to
    /// `N + ½`, which holds term by term.
    pub inequality_holds: bool,
}

pub fn jensen_gap(f: &SymmetricJumpLaw, n_max: u64) -> Result<JensenGap> {
    let density = f
        .as_density()
        .ok_or_else(|| Error::domain("the Jensen comparison needs a continuous law"))?;
    if !density.positive_on(0.5) && !matches!(density, Density::Gaussian { .. }) {
        return Err(Error::hypothesis("density must be positive on [1/2, ∞)"));
    }
    let binned = bin_density(f, 1.0)?;
    let lattice = binned.as_lattice().expect("binning yields a lattice");
    let super_polynomial = density.tail_descriptor().kind == TailKind::Exponential;
    let (lhs, cutoff) = if super_polynomial {
        // Stop where bin masses underflow; the summand grows without bound.
        let last = (1..=n_max)
            .take_while(|n| lattice.mass(*n) > 0.0)
            .last()
            .unwrap_or(0);
        if last == 0 {
            return Err(Error::hypothesis("bin mass at n = 1 is zero"));
        }
        let v = reciprocal_series(lattice, 0.5, last)?;
        let v = ConvergenceVerdict::diverges(v.partial_value, v.truncation)
            .with_note("masses decay faster than any power");
        (v, last as f64 + 0.5)
    } else {
        (
            reciprocal_series(lattice, 0.5, n_max)?,
            series_extent(lattice, n_max) as f64 + 0.5,
        )
    };
    // For super-polynomial tails the integral stops where f underflows, so
    // both sides are infinite and only the divergence is compared.
    let rhs = reciprocal_integral(density, 0.5, cutoff)?;
    let inequality_holds = lhs.partial_value <= rhs.partial_value * (1.0 + 1e-10)
        || (lhs.is_diverges() && rhs.is_diverges() && super_polynomial);
    Ok(JensenGap {
        lhs,
        rhs,
        inequality_holds,
    })
}
