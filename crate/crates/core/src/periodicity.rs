//! Eventually periodic quotient streams and the recurrences they force.
//!
//! Forward direction: a periodic quotient stream makes every convergent
//! numerator sequence a linear recurrence along steps of `u`, the lcm of the
//! period lengths. Converse direction: fit recurrences to a computed prefix
//! and look for periodicity in the quotients.

use crate::convergents::{step_matrix, ConvergentTable};
use crate::jacobi_perron::Expansion;
use crate::lrs::{char_poly, eventually_periodic, fit_minimal, min_fit_len, CharPoly, LrsError, RecurrenceJson};
use crate::matrix::IntMatrix;
use crate::exactnum::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodicityError {
    #[error("a periodic spec needs at least one axis")]
    ZeroDimension,
    #[error("pre and period must both have {expected} axes, got {got}")]
    AxisCount { expected: usize, got: usize },
    #[error("axis {axis} has an empty period")]
    EmptyPeriod { axis: usize },
    #[error("cycle matrix {index} has characteristic polynomial {found}, expected {expected}")]
    SharedPolyViolation {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("horizon {got} is below the required {needed}")]
    HorizonTooShort { needed: usize, got: usize },
}

/// Per-axis preperiod and period quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicSpec {
    pre: Vec<Vec<BigInt>>,
    period: Vec<Vec<BigInt>>,
}

/// Wire form `{"m": m, "pre": [[…]×m], "period": [[…]×m]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicSpecJson {
    pub m: usize,
    pub pre: Vec<Vec<i64>>,
    pub period: Vec<Vec<i64>>,
}

impl PeriodicSpec {
    pub fn new(pre: Vec<Vec<BigInt>>, period: Vec<Vec<BigInt>>) -> Result<Self, PeriodicityError> {
        let m = period.len();
        if m == 0 {
            return Err(PeriodicityError::ZeroDimension);
        }
        if pre.len() != m {
            return Err(PeriodicityError::AxisCount {
                expected: m,
                got: pre.len(),
            });
        }
        if let Some(i) = period.iter().position(Vec::is_empty) {
            return Err(PeriodicityError::EmptyPeriod { axis: i + 1 });
        }
        Ok(Self { pre, period })
    }

    pub fn from_i64(pre: &[&[i64]], period: &[&[i64]]) -> Result<Self, PeriodicityError> {
        let conv = |v: &[&[i64]]| -> Vec<Vec<BigInt>> {
            v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        Self::new(conv(pre), conv(period))
    }

    pub fn from_json(j: &PeriodicSpecJson) -> Result<Self, PeriodicityError> {
        if j.pre.len() != j.m || j.period.len() != j.m {
            return Err(PeriodicityError::AxisCount {
                expected: j.m,
                got: j.pre.len().max(j.period.len()),
            });
        }
        let conv = |v: &[Vec<i64>]| -> Vec<Vec<BigInt>> {
            v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        Self::new(conv(&j.pre), conv(&j.period))
    }

    pub fn to_json(&self) -> PeriodicSpecJson {
        let conv = |v: &[Vec<BigInt>]| -> Vec<Vec<i64>> {
            v.iter()
                .map(|r| r.iter().map(|x| i64::try_from(x).expect("quotient fits in i64")).collect())
                .collect()
        };
        PeriodicSpecJson {
            m: self.dim(),
            pre: conv(&self.pre),
            period: conv(&self.period),
        }
    }

    pub fn dim(&self) -> usize {
        self.period.len()
    }

    pub fn preperiods(&self) -> Vec<usize> {
        self.pre.iter().map(Vec::len).collect()
    }

    pub fn periods(&self) -> Vec<usize> {
        self.period.iter().map(Vec::len).collect()
    }

    /// `max(p_1..p_m)`.
    pub fn max_preperiod(&self) -> usize {
        self.pre.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `lcm(q_1..q_m)`.
    pub fn cycle_length(&self) -> usize {
        self.period.iter().fold(1, |acc, p| acc.lcm(&p.len()))
    }

    /// Whether the stream could come from an actual expansion: every
    /// quotient after the first row is nonnegative and the first axis of the
    /// period is at least 1.
    pub fn jp_admissible(&self) -> bool {
        let nonneg = self
            .pre
            .iter()
            .flat_map(|r| r.iter().skip(1))
            .chain(self.period.iter().flatten())
            .all(|x| !x.is_negative());
        nonneg && self.period[0].iter().all(|b| *b >= BigInt::one())
    }

    /// `a_n^(axis)`, 0-based axis.
    pub fn quotient(&self, axis: usize, n: usize) -> BigInt {
        let pre = &self.pre[axis];
        if n < pre.len() {
            pre[n].clone()
        } else {
            let per = &self.period[axis];
            per[(n - pre.len()) % per.len()].clone()
        }
    }

    /// Rows `a_0, …, a_{len-1}`.
    pub fn quotient_stream(&self, len: usize) -> Vec<Vec<BigInt>> {
        (0..len)
            .map(|n| (0..self.dim()).map(|i| self.quotient(i, n)).collect())
            .collect()
    }
}

/// The `u` cycle matrices and their common characteristic polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleData {
    pub m: usize,
    pub u: usize,
    pub v: Vec<usize>,
    /// Largest preperiod, the index from which every axis is periodic.
    pub start: usize,
    pub matrices: Vec<IntMatrix>,
    pub shared_char_poly: CharPoly,
}

impl CycleData {
    pub fn determinants(&self) -> Vec<BigInt> {
        self.matrices.iter().map(IntMatrix::det).collect()
    }

    /// `tr(M_i^k)` for each `i`.
    pub fn power_traces(&self, k: u32) -> Vec<BigInt> {
        self.matrices.iter().map(|m| m.pow(k).trace()).collect()
    }
}

/// `M_i = Π_{0≤j<u} S(b_{(i+j+v_k) mod q_k}^(k))`.
pub fn build_cycle_data(spec: &PeriodicSpec) -> Result<CycleData, PeriodicityError> {
    let m = spec.dim();
    let u = spec.cycle_length();
    let start = spec.max_preperiod();
    let v: Vec<usize> = spec.preperiods().iter().map(|p| start - p).collect();
    let matrices: Vec<IntMatrix> = (0..u)
        .map(|i| {
            (0..u)
                .map(|j| {
                    let row: Vec<BigInt> = (0..m)
                        .map(|k| {
                            let b = &spec.period[k];
                            b[(i + j + v[k]) % b.len()].clone()
                        })
                        .collect();
                    step_matrix(&row)
                })
                .reduce(|acc, s| acc.matmul(&s))
                .expect("u ≥ 1")
        })
        .collect();
    let shared = char_poly(&matrices[0].to_rational());
    for (index, mat) in matrices.iter().enumerate().skip(1) {
        let p = char_poly(&mat.to_rational());
        if p != shared {
            return Err(PeriodicityError::SharedPolyViolation {
                index,
                expected: shared.to_string(),
                found: p.to_string(),
            });
        }
    }
    Ok(CycleData {
        m,
        u,
        v,
        start,
        matrices,
        shared_char_poly: shared,
    })
}

/// `A_{n+(m+1)u} = Σ_{j=0}^{m} c_j A_{n+ju}` for every `n ≥ valid_from` and
/// every axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedRecurrence {
    pub step: usize,
    pub valid_from: usize,
    /// `c_0, …, c_m`.
    pub coeffs: Vec<BigInt>,
    pub char_poly: CharPoly,
}

impl DerivedRecurrence {
    /// Order `(m+1)u` of the recurrence on the full sequence.
    pub fn span(&self) -> usize {
        self.coeffs.len() * self.step
    }

    /// The value the recurrence predicts for `seq[n + span]`.
    pub fn predict(&self, seq: &[BigInt], n: usize) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .fold(BigInt::zero(), |acc, (j, c)| acc + c * &seq[n + j * self.step])
    }

    /// First `n ≥ valid_from` where the recurrence fails on `seq`, and how
    /// many indices were checked.
    pub fn check(&self, seq: &[BigInt]) -> (usize, Option<usize>) {
        let span = self.span();
        let mut checked = 0;
        for n in self.valid_from..seq.len().saturating_sub(span) {
            checked += 1;
            if self.predict(seq, n) != seq[n + span] {
                return (checked, Some(n));
            }
        }
        (checked, None)
    }

    /// Characteristic polynomial `P(x^u)` of the recurrence on the full
    /// sequence.
    pub fn expanded_char_poly(&self) -> CharPoly {
        let mut c = vec![Rational::zero(); self.span() + 1];
        for (j, p) in self.char_poly.coeffs().iter().enumerate() {
            c[j * self.step] = p.clone();
        }
        CharPoly::new(c).expect("monic")
    }

    pub fn to_json(&self) -> DerivedRecurrenceJson {
        DerivedRecurrenceJson {
            step: self.step,
            valid_from: self.valid_from,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
            char_poly: self.char_poly.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedRecurrenceJson {
    pub step: usize,
    pub valid_from: usize,
    pub coeffs: Vec<String>,
    pub char_poly: String,
}

/// Cayley–Hamilton on the shared characteristic polynomial, transported to
/// the convergents through `Π S(a_j)`.
pub fn derived_recurrence(cd: &CycleData) -> DerivedRecurrence {
    let ints = cd
        .shared_char_poly
        .integer_coeffs()
        .expect("integer matrix has integer characteristic polynomial");
    let d = ints.len() - 1;
    DerivedRecurrence {
        step: cd.u,
        valid_from: cd.start,
        coeffs: ints[..d].iter().map(|c| -c).collect(),
        char_poly: cd.shared_char_poly.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisCheck {
    /// 1-based, `m+1` is the denominator axis.
    pub axis: usize,
    pub checked: usize,
    pub passed: bool,
    pub first_failure: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForwardReport {
    pub m: usize,
    pub u: usize,
    pub horizon: usize,
    pub recurrence: DerivedRecurrenceJson,
    pub determinants: Vec<String>,
    pub axes: Vec<AxisCheck>,
    pub passed: bool,
}

/// Smallest horizon accepted by [`verify_forward`].
pub fn min_horizon(spec: &PeriodicSpec) -> usize {
    spec.max_preperiod() + 3 * (spec.dim() + 1) * spec.cycle_length()
}

/// Builds convergents `0..=horizon` from the spec and checks the derived
/// recurrence exactly on every axis.
pub fn verify_forward(spec: &PeriodicSpec, horizon: usize) -> Result<ForwardReport, PeriodicityError> {
    let needed = min_horizon(spec);
    if horizon < needed {
        return Err(PeriodicityError::HorizonTooShort { needed, got: horizon });
    }
    let cd = build_cycle_data(spec)?;
    let rec = derived_recurrence(&cd);
    let table = ConvergentTable::from_quotients(&spec.quotient_stream(horizon + 1))
        .expect("spec has at least one axis");
    let axes: Vec<AxisCheck> = (1..=cd.m + 1)
        .map(|axis| {
            let (checked, first_failure) = rec.check(&table.axis(axis));
            AxisCheck {
                axis,
                checked,
                passed: first_failure.is_none(),
                first_failure,
            }
        })
        .collect();
    Ok(ForwardReport {
        m: cd.m,
        u: cd.u,
        horizon,
        recurrence: rec.to_json(),
        determinants: cd.determinants().iter().map(ToString::to_string).collect(),
        passed: axes.iter().all(|a| a.passed),
        axes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConverseVerdict {
    /// Every axis fit a recurrence and every quotient axis looked periodic.
    FitAndPeriodic,
    /// Every axis fit a recurrence but some quotient axis did not look
    /// periodic on this prefix.
    FitNotPeriodic,
    /// Some axis had no recurrence within the order bound; the implication
    /// is not exercised.
    NoFit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisFit {
    pub axis: usize,
    pub recurrence: Option<RecurrenceJson>,
    pub char_poly: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConverseReport {
    pub m: usize,
    pub rows: usize,
    pub max_order: usize,
    pub fits: Vec<AxisFit>,
    /// `(preperiod, period)` per quotient axis, when observed.
    pub periodicity: Vec<Option<(usize, usize)>>,
    pub verdict: ConverseVerdict,
    /// False only when the prefix contradicts "fit implies periodic".
    pub consistent: bool,
}

/// Fits each convergent axis and, if all fit, tests each quotient axis for
/// eventual periodicity over the same rows.
pub fn verify_converse(
    expansion: &Expansion,
    table: &ConvergentTable<BigInt>,
    max_order: usize,
) -> Result<ConverseReport, LrsError> {
    let m = table.m();
    let rows = table.len();
    let needed = min_fit_len(max_order);
    if rows < needed {
        return Err(LrsError::InsufficientData {
            needed,
            got: rows,
            max_order,
        });
    }
    let mut fits = Vec::with_capacity(m + 1);
    for axis in 1..=m + 1 {
        let seq: Vec<Rational> = table
            .axis(axis)
            .into_iter()
            .map(Rational::from_integer)
            .collect();
        let fit = fit_minimal(&seq, max_order)?;
        fits.push(AxisFit {
            axis,
            char_poly: fit.as_ref().map(|r| r.char_poly().to_string()),
            recurrence: fit.as_ref().map(|r| r.to_json()),
        });
    }
    let quotients = expansion.quotient_stream(rows);
    let periodicity: Vec<Option<(usize, usize)>> = (0..m)
        .map(|i| {
            let seq: Vec<&BigInt> = quotients.iter().map(|r| &r[i]).collect();
            eventually_periodic(&seq)
        })
        .collect();
    let all_fit = fits.iter().all(|f| f.recurrence.is_some());
    let all_periodic = periodicity.iter().all(Option::is_some);
    let verdict = match (all_fit, all_periodic) {
        (false, _) => ConverseVerdict::NoFit,
        (true, true) => ConverseVerdict::FitAndPeriodic,
        (true, false) => ConverseVerdict::FitNotPeriodic,
    };
    Ok(ConverseReport {
        m,
        rows,
        max_order,
        consistent: verdict != ConverseVerdict::FitNotPeriodic,
        fits,
        periodicity,
        verdict,
    })
}
