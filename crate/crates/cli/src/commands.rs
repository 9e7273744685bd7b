use levy_transience::criteria::{classify_with, criterion_11_discrete_with, ClassifyFlags};
use levy_transience::discretize::{convergence_report, jensen_gap, TestFunction};
use levy_transience::measures::{make_multi_index, make_stable_triplet, LawSpec, LevyTriplet};
use levy_transience::network::{
    effective_resistance, flow_energy, paper_energy_bound, resistance_profile, verify_flow,
};
use levy_transience::simulate::{
    even_chain_batch, even_chain_criterion, sojourn_estimate, Horizon,
};
use levy_transience::verdict::{Classification, Status};
use serde::Serialize;
use serde_json::json;

use crate::args::{Cli, Command, DemoName};
use crate::{CliError, Outcome, Report, RunConfig, VERSION};

/// Slack allowed between the resistance and the flow energy.
const CHAIN_TOL: f64 = 1e-8;
/// Standard errors allowed below the even-chain lower bound.
const EVEN_CHAIN_SIGMAS: f64 = 3.0;

/// Resolves the configuration from the file and flags, then runs the command.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(law) = &cli.law {
        config.law = Some(
            serde_json::from_str(law)
                .map_err(|e| CliError::Usage(format!("invalid --law: {e}")))?,
        );
    }
    apply_flags(&cli.command, &mut config);
    let (name, outcome, result, csv, summary) = match &cli.command {
        Command::Analyze(_) => analyze(&config)?,
        Command::Flow(_) => flow(&config)?,
        Command::Resistance(_) => resistance(&config)?,
        Command::Discretize(_) => discretize(&config)?,
        Command::Simulate(_) => simulate(&config)?,
        Command::Demo(a) => match a.name {
            DemoName::StableSweep => stable_sweep(&config)?,
            DemoName::MultiIndex => multi_index(&config)?,
        },
    };
    Ok(Report {
        command: name.to_string(),
        version: VERSION.to_string(),
        seed: config.seed,
        config,
        outcome,
        result,
        csv,
        summary,
    })
}

fn apply_flags(command: &Command, c: &mut RunConfig) {
    match command {
        Command::Analyze(a) => c.unimodal |= a.unimodal,
        Command::Flow(a) => {
            if let Some(i) = a.i_max {
                c.flow.verify_i_max = i;
            }
            if let Some(r) = &a.radii {
                c.flow.radii = r.clone();
            }
        }
        Command::Resistance(a) => {
            if let Some(r) = &a.radii {
                c.resistance.radii = r.clone();
            }
            if let Some(t) = a.flat_tol {
                c.resistance.flat_tol = t;
            }
        }
        Command::Discretize(a) => {
            if let Some(d) = &a.deltas {
                c.discretize.deltas = d.clone();
            }
            if let Some(t) = &a.tests {
                c.discretize.tests = t.clone();
            }
        }
        Command::Simulate(a) => {
            if let Some(r) = a.replicas {
                c.simulate.replicas = r;
            }
            if let Some(steps) = a.steps {
                c.simulate.horizon = Horizon::Steps { steps };
            }
            if let Some(time) = a.time {
                c.simulate.horizon = Horizon::Time { time, rate: a.rate };
            }
            if let Some(w) = a.window {
                c.simulate.window = w;
            }
            c.simulate.records |= a.records;
        }
        Command::Demo(a) => {
            if let Some(s) = a.samples {
                c.demo.even_chain_samples = s;
            }
        }
    }
}

type Output = (&'static str, Outcome, serde_json::Value, String, String);

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("results serialize to JSON")
}

fn csv_of<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize to CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV is UTF-8")
}

fn build_triplet(spec: &LawSpec) -> Result<LevyTriplet, CliError> {
    Ok(spec.build_triplet()?)
}

#[derive(Serialize)]
struct EvidenceRow<'a> {
    criterion: &'a str,
    implication: String,
    status: String,
    partial_value: Option<f64>,
    tail_bound: Option<f64>,
    reason: &'a str,
}

fn debug_name<T: std::fmt::Debug>(v: &T) -> String {
    format!("{v:?}")
}

fn analyze(c: &RunConfig) -> Result<Output, CliError> {
    let t = build_triplet(c.require_law()?)?;
    let v = classify_with(
        &t,
        ClassifyFlags {
            unimodal: c.unimodal,
        },
        &c.criteria,
    );
    let rows: Vec<EvidenceRow> = v
        .evidence
        .iter()
        .map(|e| EvidenceRow {
            criterion: &e.criterion,
            implication: debug_name(&e.implication),
            status: e
                .verdict
                .as_ref()
                .map(|v| debug_name(&v.status))
                .unwrap_or_default(),
            partial_value: e.verdict.as_ref().map(|v| v.partial_value),
            tail_bound: e.verdict.as_ref().map(|v| v.tail_bound),
            reason: e.reason.as_deref().unwrap_or(""),
        })
        .collect();
    let outcome = if v.classification == Classification::Unknown {
        Outcome::Undecided
    } else {
        Outcome::Decided
    };
    let summary = format!(
        "classification: {:?}{}",
        v.classification,
        if v.conflict { " (conflict)" } else { "" }
    );
    Ok(("analyze", outcome, to_value(&v), csv_of(&rows), summary))
}

#[derive(Serialize)]
struct ChainRow {
    radius: u64,
    r_eff: f64,
    flow_energy_hi: f64,
    paper_bound_hi: f64,
}

fn flow(c: &RunConfig) -> Result<Output, CliError> {
    let law = c.require_law()?.build_law()?;
    let check = verify_flow(c.flow.verify_i_max);
    let energy = flow_energy(&law, c.flow.energy_i_max)?;
    let bound = paper_energy_bound(&law, c.flow.bound_w_max)?;
    let rows = c
        .flow
        .radii
        .iter()
        .map(|&n| {
            Ok(ChainRow {
                radius: n,
                r_eff: effective_resistance(&law, n)?.r_eff,
                flow_energy_hi: energy.bounds.hi,
                paper_bound_hi: bound.hi,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let chain = energy.bounds.hi <= bound.hi
        && rows.iter().all(|r| r.r_eff <= energy.bounds.hi + CHAIN_TOL);
    let result = json!({
        "verification": check,
        "flow_energy": energy,
        "paper_bound": bound,
        "resistance": rows.iter().map(|r| json!({"radius": r.radius, "r_eff": r.r_eff})).collect::<Vec<_>>(),
        "chain_holds": chain,
    });
    if !check.ok() {
        return Err(CliError::Numeric(format!(
            "flow verification failed at i_max = {}",
            c.flow.verify_i_max
        )));
    }
    if !chain {
        return Err(CliError::Numeric(format!(
            "energy-bound chain violated: {result}"
        )));
    }
    let summary = format!(
        "flow verified; R <= {:.6} <= energy {:.6} <= bound {:.6}",
        rows.iter().map(|r| r.r_eff).fold(0.0, f64::max),
        energy.bounds.hi,
        bound.hi
    );
    Ok(("flow", Outcome::Decided, result, csv_of(&rows), summary))
}

#[derive(Serialize)]
struct ResistanceRow {
    radius: u64,
    r_eff: f64,
    lower: f64,
    upper: f64,
}

fn resistance(c: &RunConfig) -> Result<Output, CliError> {
    let law = c.require_law()?.build_law()?;
    let p = resistance_profile(&law, &c.resistance.radii, c.resistance.flat_tol)?;
    let rows: Vec<ResistanceRow> = p
        .points
        .iter()
        .map(|x| ResistanceRow {
            radius: x.radius,
            r_eff: x.r_eff,
            lower: x.lower,
            upper: x.upper,
        })
        .collect();
    let summary = format!("hint: {:?}", p.hint);
    Ok((
        "resistance",
        Outcome::Decided,
        to_value(&p),
        csv_of(&rows),
        summary,
    ))
}

fn discretize(c: &RunConfig) -> Result<Output, CliError> {
    let law = c.require_law()?.build_law()?;
    let tests = c
        .discretize
        .tests
        .iter()
        .map(|id| TestFunction::from_id(id))
        .collect::<Result<Vec<_>, _>>()?;
    let report = convergence_report(&law, &c.discretize.deltas, &tests, c.discretize.h_radius)?;
    let jensen = jensen_gap(&law, c.discretize.jensen_terms)?;
    let summary = format!(
        "orders: {:?}; Jensen inequality holds: {}",
        report.orders, jensen.inequality_holds
    );
    let csv = report.to_csv();
    Ok((
        "discretize",
        Outcome::Decided,
        json!({ "convergence": report, "jensen": jensen }),
        csv,
        summary,
    ))
}

fn simulate(c: &RunConfig) -> Result<Output, CliError> {
    let law = c.require_law()?.build_law()?;
    let s = &c.simulate;
    let mut stats = sojourn_estimate(&law, s.window, s.horizon, s.replicas, c.seed)?;
    let csv = stats.records_csv();
    if !s.records {
        stats.records.clear();
    }
    let summary = format!(
        "sojourn {:.4} ± {:.4}; growth ratio {:.4} ± {:.4} ({:?}, diagnostic)",
        stats.sojourn_estimate,
        stats.sojourn_std_error,
        stats.growth.ratio,
        stats.growth.ratio_std_error,
        stats.growth.leaning
    );
    Ok(("simulate", Outcome::Decided, to_value(&stats), csv, summary))
}

fn mark(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn outcome_of(all: bool) -> Outcome {
    if all {
        Outcome::Decided
    } else {
        Outcome::Undecided
    }
}

#[derive(Serialize)]
struct SweepRow {
    alpha: f64,
    expected: Classification,
    classification: Classification,
    conflict: bool,
    pass: bool,
}

fn stable_sweep(c: &RunConfig) -> Result<Output, CliError> {
    let mut rows = Vec::new();
    for &alpha in &c.demo.stable_alphas {
        let t = make_stable_triplet(alpha, 1.0)?;
        let v = classify_with(
            &t,
            ClassifyFlags {
                unimodal: c.unimodal,
            },
            &c.criteria,
        );
        let expected = if alpha < 1.0 {
            Classification::Transient
        } else {
            Classification::Recurrent
        };
        rows.push(SweepRow {
            alpha,
            expected,
            classification: v.classification,
            conflict: v.conflict,
            pass: v.classification == expected && !v.conflict,
        });
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let mut summary = String::from("alpha  expected   got        result\n");
    for r in &rows {
        summary += &format!(
            "{:<6} {:<10} {:<10} {}\n",
            r.alpha,
            debug_name(&r.expected),
            debug_name(&r.classification),
            mark(r.pass)
        );
    }
    summary += &format!("{passed}/{} points classified correctly", rows.len());
    let result = json!({ "points": rows, "passed": passed });
    Ok((
        "demo stable-sweep",
        outcome_of(passed == rows.len()),
        result,
        csv_of(&rows),
        summary,
    ))
}

#[derive(Serialize)]
struct MultiIndexRow {
    alpha: f64,
    beta: f64,
    criterion_11: Status,
    even_chain: Status,
    classification: Classification,
    expected: Option<Classification>,
    /// Smallest `(P̂(X_1 = 2i) − c⁻¹ p_(2i)) / σ` over the checked sites.
    min_z: f64,
    pass: bool,
}

fn multi_index(c: &RunConfig) -> Result<Output, CliError> {
    let n = c.demo.even_chain_samples;
    let mut rows = Vec::new();
    for &(alpha, beta) in &c.demo.multi_index {
        let law = make_multi_index(alpha, beta, true)?;
        let c11 = criterion_11_discrete_with(&law, &c.criteria)?.status;
        let chain = even_chain_criterion(alpha, beta)?.status;
        let verdict = classify_with(
            &LevyTriplet::jumps(law.clone()),
            ClassifyFlags::default(),
            &c.criteria,
        );
        let low = alpha.min(beta);
        let expected = if low < 1.0 {
            Some(Classification::Transient)
        } else if low > 1.0 {
            Some(Classification::Recurrent)
        } else {
            None
        };
        let mut min_z = f64::INFINITY;
        if n > 0 {
            let batch = even_chain_batch(&law, n, c.seed)?;
            for i in (1..=c.demo.even_chain_sites).flat_map(|i| [i, -i]) {
                let q = law.mass(2 * i);
                let sigma = (q * (1.0 - q) / n as f64).sqrt();
                min_z = min_z.min((batch.frequency(2 * i as i128) - q) / sigma);
            }
        }
        let pass = expected.is_none_or(|e| e == verdict.classification)
            && !verdict.conflict
            && (alpha >= 1.0 || chain == Status::Converges)
            && min_z >= -EVEN_CHAIN_SIGMAS;
        rows.push(MultiIndexRow {
            alpha,
            beta,
            criterion_11: c11,
            even_chain: chain,
            classification: verdict.classification,
            expected,
            min_z,
            pass,
        });
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let mut summary =
        String::from("alpha  beta   (1.1)        even chain   verdict    min z    result\n");
    for r in &rows {
        summary += &format!(
            "{:<6} {:<6} {:<12} {:<12} {:<10} {:<8.2} {}\n",
            r.alpha,
            r.beta,
            debug_name(&r.criterion_11),
            debug_name(&r.even_chain),
            debug_name(&r.classification),
            r.min_z,
            mark(r.pass)
        );
    }
    summary += &format!("{passed}/{} scenarios pass", rows.len());
    let result = json!({ "scenarios": rows, "passed": passed });
    Ok((
        "demo multi-index",
        outcome_of(passed == rows.len()),
        result,
        csv_of(&rows),
        summary,
    ))
}
