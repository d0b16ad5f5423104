use crate::input;
use crate::CliError;
use mcf_core::convergents::ConvergentTable;
use mcf_core::cubic_rep::{compare_with_jacobi, ComparisonReport, CubicError, CubicSpec, CubicSpecJson};
use mcf_core::exactnum::Rational;
use mcf_core::jacobi_perron::{expand, ExpansionReport, ExpansionStatus};
use mcf_core::lrs::{fit_minimal, min_fit_len, LinearRecurrence, RecurrenceJson};
use mcf_core::periodicity::{
    min_horizon, verify_converse, verify_forward, ConverseReport, ForwardReport, PeriodicSpec, PeriodicSpecJson,
    PeriodicityError,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A finished report, rendered on demand.
pub enum Output {
    Expansion(ExpansionReport),
    Convergents(ConvergentTable<BigInt>),
    Forward(ForwardReport),
    ForwardBatch(BatchSummary),
    Converse(ConverseReport),
    Cubic(Box<ComparisonReport>),
    Fit(FitReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchFailure {
    pub index: usize,
    pub spec: PeriodicSpecJson,
    pub report: ForwardReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub cases: usize,
    pub passed: usize,
    pub seed: u64,
    pub failures: Vec<BatchFailure>,
}

/// `{"max_order": k, "fit": {...} | null, "char_poly": "..." | null}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitReport {
    pub terms: usize,
    pub max_order: usize,
    pub fit: Option<RecurrenceJson>,
    pub char_poly: Option<String>,
}

impl Output {
    /// Whether the report itself signals a broken internal invariant.
    pub fn consistency_violation(&self) -> Option<String> {
        match self {
            Output::Forward(r) if !r.passed => Some("derived recurrence failed on a convergent axis".into()),
            Output::ForwardBatch(b) if b.passed < b.cases => {
                Some(format!("{} of {} specs failed the derived recurrence", b.cases - b.passed, b.cases))
            }
            _ => None,
        }
    }

    pub fn json(&self) -> serde_json::Value {
        let v = match self {
            Output::Expansion(r) => serde_json::to_value(r),
            Output::Convergents(t) => serde_json::to_value(t.to_json()),
            Output::Forward(r) => serde_json::to_value(r),
            Output::ForwardBatch(b) => serde_json::to_value(b),
            Output::Converse(r) => serde_json::to_value(r),
            Output::Cubic(r) => serde_json::to_value(r),
            Output::Fit(r) => serde_json::to_value(r),
        };
        v.expect("reports serialize")
    }

    pub fn csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let mut row = |fields: Vec<String>| w.write_record(&fields).expect("in-memory write");
        match self {
            Output::Expansion(r) => {
                let mut header = vec!["n".to_string()];
                header.extend((1..=r.m).map(|i| format!("a{i}")));
                row(header);
                for (n, q) in r.quotients.iter().enumerate() {
                    let mut fields = vec![n.to_string()];
                    fields.extend(q.iter().cloned());
                    row(fields);
                }
            }
            Output::Convergents(t) => return t.to_csv(),
            Output::Forward(r) => {
                row(vec!["axis".into(), "checked".into(), "passed".into(), "first_failure".into()]);
                for a in &r.axes {
                    row(vec![
                        a.axis.to_string(),
                        a.checked.to_string(),
                        a.passed.to_string(),
                        a.first_failure.map(|n| n.to_string()).unwrap_or_default(),
                    ]);
                }
            }
            Output::ForwardBatch(b) => {
                row(vec!["cases".into(), "passed".into(), "seed".into()]);
                row(vec![b.cases.to_string(), b.passed.to_string(), b.seed.to_string()]);
            }
            Output::Converse(r) => {
                row(vec!["axis".into(), "char_poly".into(), "preperiod".into(), "period".into()]);
                for f in &r.fits {
                    let per = r.periodicity.get(f.axis - 1).copied().flatten();
                    row(vec![
                        f.axis.to_string(),
                        f.char_poly.clone().unwrap_or_default(),
                        per.map(|p| p.0.to_string()).unwrap_or_default(),
                        per.map(|p| p.1.to_string()).unwrap_or_default(),
                    ]);
                }
            }
            Output::Cubic(r) => {
                row(
                    ["side", "n", "c1", "c2", "err1_lo", "err1_hi", "err2_lo", "err2_hi"]
                        .map(String::from)
                        .to_vec(),
                );
                for (side, rep) in [("jacobi", &r.jacobi), ("ternary", &r.ternary)] {
                    for cr in &rep.rows {
                        let mut fields = vec![side.to_string(), cr.n.to_string()];
                        match (&cr.convergent, &cr.error) {
                            (Some(c), Some(e)) => {
                                fields.extend(c.iter().cloned());
                                for iv in e {
                                    fields.push(iv.lo.clone());
                                    fields.push(iv.hi.clone());
                                }
                            }
                            _ => fields.extend(std::iter::repeat(String::new()).take(6)),
                        }
                        row(fields);
                    }
                }
            }
            Output::Fit(r) => {
                row(vec!["k".into(), "coeff".into()]);
                if let Some(f) = &r.fit {
                    for (k, c) in f.coeffs.iter().enumerate() {
                        row(vec![(k + 1).to_string(), c.clone()]);
                    }
                }
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        match self {
            Output::Expansion(r) => {
                line(format!("m = {}, status: {}", r.m, status_text(&r.status)));
                for (n, q) in r.quotients.iter().enumerate() {
                    line(format!("a_{n} = ({})", q.join(", ")));
                }
                if !r.zero_quotients.is_empty() {
                    line(format!("zero quotients (n, axis): {:?}", r.zero_quotients));
                }
            }
            Output::Convergents(t) => {
                for n in 0..t.len() as isize {
                    let row = t.row(n).expect("row in range");
                    let nums: Vec<String> = row.iter().map(ToString::to_string).collect();
                    let conv = match t.convergent(n) {
                        Ok(c) => c.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                        Err(_) => "undefined".into(),
                    };
                    line(format!("n = {n}: A = ({}), convergent = ({conv})", nums.join(", ")));
                }
            }
            Output::Forward(r) => {
                line(format!(
                    "m = {}, u = {}, recurrence step {} from n = {}: {}",
                    r.m, r.u, r.recurrence.step, r.recurrence.valid_from, r.recurrence.char_poly
                ));
                line(format!("det M_i = {}", r.determinants.join(", ")));
                for a in &r.axes {
                    let verdict = match a.first_failure {
                        None => "pass".to_string(),
                        Some(n) => format!("FAIL at n = {n}"),
                    };
                    line(format!("A^({}): {} indices checked, {verdict}", a.axis, a.checked));
                }
            }
            Output::ForwardBatch(b) => {
                line(format!("{}/{} specs pass (seed {})", b.passed, b.cases, b.seed));
                for f in &b.failures {
                    line(format!("  failed: case {} {:?}", f.index, f.spec));
                }
            }
            Output::Converse(r) => {
                line(format!("rows = {}, max order = {}, verdict: {:?}", r.rows, r.max_order, r.verdict));
                for f in &r.fits {
                    line(format!(
                        "A^({}): {}",
                        f.axis,
                        f.char_poly.as_deref().unwrap_or("no recurrence within bound")
                    ));
                }
                for (i, p) in r.periodicity.iter().enumerate() {
                    let desc = match p {
                        Some((pre, per)) => format!("preperiod {pre}, period {per}"),
                        None => "no period observed".into(),
                    };
                    line(format!("a^({}): {desc}", i + 1));
                }
            }
            Output::Cubic(r) => {
                line(format!(
                    "p = {}, q = {}, r = {}, z = {}; alpha in [{}, {}]",
                    r.spec.p, r.spec.q, r.spec.r, r.spec.z, r.target[1].lo, r.target[1].hi
                ));
                line(format!(
                    "N: tr = {}, det = {}, I1 = {}",
                    r.n_matrix.trace, r.n_matrix.det, r.n_matrix.i1
                ));
                line(format!("jacobi status: {}", r.jacobi.status.as_ref().map_or("-".into(), status_text)));
                line("n | jacobi max error <= | ternary max error <=".into());
                for (a, b) in r.jacobi.rows.iter().zip(&r.ternary.rows) {
                    let hi = |row: &mcf_core::cubic_rep::ComparisonRow| match &row.error {
                        Some(e) => e
                            .iter()
                            .map(|iv| iv.hi.clone())
                            .max_by(|x, y| decimal_cmp(x, y))
                            .unwrap_or_default(),
                        None => "undefined".into(),
                    };
                    line(format!("{} | {} | {}", a.n, hi(a), hi(b)));
                }
                for (side, rep) in [("jacobi", &r.jacobi), ("ternary", &r.ternary)] {
                    for f in &rep.fits {
                        line(format!(
                            "{side} A^({}): {}",
                            f.axis,
                            f.char_poly.as_deref().unwrap_or("no recurrence within bound")
                        ));
                    }
                }
                for n in &r.notes {
                    line(format!("note: {n}"));
                }
            }
            Output::Fit(r) => match (&r.fit, &r.char_poly) {
                (Some(f), Some(p)) => {
                    line(format!("order {} (offset {}): {p}", f.order, f.offset));
                    line(format!("coefficients: {}", f.coeffs.join(", ")));
                }
                _ => line(format!("NoFit (max order {}, {} terms)", r.max_order, r.terms)),
            },
        }
        out
    }
}

fn decimal_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    let pa = mcf_core::exactnum::parse_rational(a).ok();
    let pb = mcf_core::exactnum::parse_rational(b).ok();
    pa.cmp(&pb)
}

fn status_text(s: &ExpansionStatus) -> String {
    match s {
        ExpansionStatus::Terminated { step } => format!("Terminated at step {step}"),
        ExpansionStatus::CycleDetected { preperiod, period } => format!("CycleDetected({preperiod}, {period})"),
        ExpansionStatus::Truncated { max_iter } => format!("Truncated after {max_iter} steps"),
    }
}

pub fn cmd_expand(path: &Path, max_iter: usize) -> Result<Output, CliError> {
    let tuple = input::algebraic_input(path)?;
    let e = expand(&tuple, max_iter).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(Output::Expansion(e.report()))
}

pub fn cmd_convergents(path: &Path, max_iter: usize, depth: usize) -> Result<Output, CliError> {
    let tuple = input::algebraic_input(path)?;
    let e = expand(&tuple, max_iter.max(depth + 1)).map_err(|e| CliError::Input(e.to_string()))?;
    let table = ConvergentTable::from_quotients(&e.quotient_stream(depth + 1))
        .map_err(|e| CliError::Consistency(e.to_string()))?;
    Ok(Output::Convergents(table))
}

fn periodicity_error(e: PeriodicityError) -> CliError {
    match e {
        PeriodicityError::SharedPolyViolation { .. } => CliError::Consistency(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

pub fn cmd_verify_forward(path: &Path, horizon: usize) -> Result<Output, CliError> {
    let raw: PeriodicSpecJson = input::parse_json(path, &input::read_source(path)?)?;
    let spec = PeriodicSpec::from_json(&raw).map_err(periodicity_error)?;
    let report = verify_forward(&spec, horizon).map_err(periodicity_error)?;
    Ok(Output::Forward(report))
}

/// Random admissible spec: `m ∈ {2, 3}`, preperiods ≤ 3, periods 1..=4,
/// entries 0..=5 with the first period axis at least 1.
pub fn random_spec(rng: &mut ChaCha8Rng) -> PeriodicSpec {
    let m = rng.gen_range(2..=3);
    let mut pre = Vec::with_capacity(m);
    let mut period = Vec::with_capacity(m);
    for axis in 0..m {
        let p = rng.gen_range(0..=3);
        let q = rng.gen_range(1..=4);
        pre.push((0..p).map(|_| rng.gen_range(0..=5i64).into()).collect());
        let low = if axis == 0 { 1 } else { 0 };
        period.push((0..q).map(|_| rng.gen_range(low..=5i64).into()).collect());
    }
    PeriodicSpec::new(pre, period).expect("generated spec is well formed")
}

pub fn cmd_verify_forward_batch(cases: usize, seed: u64, horizon: usize) -> Result<Output, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<PeriodicSpec> = (0..cases).map(|_| random_spec(&mut rng)).collect();
    let results = specs
        .par_iter()
        .map(|s| verify_forward(s, horizon.max(min_horizon(s))))
        .collect::<Result<Vec<_>, _>>()
        .map_err(periodicity_error)?;
    let failures: Vec<BatchFailure> = results
        .into_iter()
        .enumerate()
        .filter(|(_, r)| !r.passed)
        .map(|(index, report)| BatchFailure {
            index,
            spec: specs[index].to_json(),
            report,
        })
        .collect();
    Ok(Output::ForwardBatch(BatchSummary {
        cases,
        passed: cases - failures.len(),
        seed,
        failures,
    }))
}

pub fn cmd_verify_converse(path: &Path, max_iter: usize, depth: usize, max_order: usize) -> Result<Output, CliError> {
    let tuple = input::algebraic_input(path)?;
    let e = expand(&tuple, max_iter.max(depth)).map_err(|e| CliError::Input(e.to_string()))?;
    let table = ConvergentTable::from_quotients(&e.quotient_stream(depth))
        .map_err(|e| CliError::Consistency(e.to_string()))?;
    let report = verify_converse(&e, &table, max_order).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(Output::Converse(report))
}

pub fn cmd_cubic(path: &Path, depth: usize, precision: &Rational) -> Result<Output, CliError> {
    let raw: CubicSpecJson = input::parse_json(path, &input::read_source(path)?)?;
    let spec = CubicSpec::from_json(&raw);
    let report = compare_with_jacobi(&spec, depth, precision).map_err(|e| match e {
        CubicError::DegenerateSpec(_) | CubicError::ZeroDepth => CliError::Input(e.to_string()),
        other => CliError::Consistency(other.to_string()),
    })?;
    Ok(Output::Cubic(Box::new(report)))
}

pub fn cmd_lrs_fit(path: &Path, max_order: Option<usize>) -> Result<Output, CliError> {
    let seq = input::sequence(path)?;
    let max_order = max_order.unwrap_or_else(|| 12.min(seq.len().saturating_sub(4) / 2));
    if max_order == 0 || seq.len() < min_fit_len(max_order) {
        return Err(CliError::Input(format!(
            "{} terms cannot attest a recurrence of order {}; need at least {}",
            seq.len(),
            max_order.max(1),
            min_fit_len(max_order.max(1))
        )));
    }
    let fit: Option<LinearRecurrence> = fit_minimal(&seq, max_order).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(Output::Fit(FitReport {
        terms: seq.len(),
        max_order,
        char_poly: fit.as_ref().map(|f| f.char_poly().to_string()),
        fit: fit.as_ref().map(LinearRecurrence::to_json),
    }))
}
