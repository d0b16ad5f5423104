//! A periodic ternary representation with rational partial quotients for a
//! cubic irrational `α` with minimal polynomial `x³ − px² − qx − r`, and a
//! harness comparing it against the Jacobi–Perron expansion of `(r/α, α)`.

use crate::convergents::{ConvergentError, ConvergentTable};
use crate::exactnum::{
    to_decimal, AlgebraicReal, AlgebraicRealJson, ExactError, FieldElement, Interval, Rational,
};
use crate::jacobi_perron::{expand, ExpansionStatus, InputTuple};
use crate::lrs::{fit_minimal, min_fit_len, LrsError};
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubicError {
    #[error("degenerate spec: {0}")]
    DegenerateSpec(String),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Lrs(#[from] LrsError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubicSpec {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
    pub z: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicSpecJson {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub z: i64,
}

impl CubicSpec {
    pub fn new(p: i64, q: i64, r: i64, z: i64) -> Self {
        Self {
            p: p.into(),
            q: q.into(),
            r: r.into(),
            z: z.into(),
        }
    }

    pub fn from_json(j: &CubicSpecJson) -> Self {
        Self::new(j.p, j.q, j.r, j.z)
    }

    pub fn to_json(&self) -> CubicSpecJson {
        let small = |x: &BigInt| i64::try_from(x).expect("spec entries fit in i64");
        CubicSpecJson {
            p: small(&self.p),
            q: small(&self.q),
            r: small(&self.r),
            z: small(&self.z),
        }
    }

    /// `x³ − px² − qx − r`, lowest degree first.
    pub fn minpoly(&self) -> Vec<BigInt> {
        vec![-&self.r, -&self.q, -&self.p, BigInt::one()]
    }

    /// `pq + r`.
    pub fn pq_plus_r(&self) -> BigInt {
        &self.p * &self.q + &self.r
    }

    /// No rational root; monic, so only integer divisors of `r` need testing.
    pub fn irreducible(&self) -> bool {
        integer_roots(&self.minpoly()).is_empty()
    }

    /// The largest real root of the cubic, realised in the smallest field
    /// that contains it.
    pub fn alpha(&self) -> Result<FieldElement, CubicError> {
        let cubic = self.minpoly();
        let ints = integer_roots(&cubic);
        if ints.is_empty() {
            let root = AlgebraicReal::real_roots(&cubic)?
                .pop()
                .expect("a real cubic has a real root");
            return Ok(FieldElement::generator(Arc::new(root)));
        }
        let mut rest = cubic;
        for k in &ints {
            rest = deflate(&rest, k);
        }
        let best_int = ints.iter().max().expect("nonempty").clone();
        let as_rational = || {
            FieldElement::from_rational(Arc::new(AlgebraicReal::rationals()), Rational::from_integer(best_int.clone()))
        };
        if rest.len() == 3 {
            if let Some(beta) = AlgebraicReal::real_roots(&rest)?.pop() {
                let beta = FieldElement::generator(Arc::new(beta));
                if beta.add_rational(&-Rational::from_integer(best_int.clone())).sign() > 0 {
                    return Ok(beta);
                }
            }
        }
        Ok(as_rational())
    }
}

fn eval_int(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Integer roots of a monic integer polynomial, with multiplicity.
fn integer_roots(p: &[BigInt]) -> Vec<BigInt> {
    let mut poly = p.to_vec();
    let mut out = Vec::new();
    while poly.len() > 1 {
        let found = if poly[0].is_zero() {
            Some(BigInt::zero())
        } else {
            let c = poly[0].abs();
            let mut hit = None;
            let mut d = BigInt::one();
            'search: while &d * &d <= c {
                if (&c % &d).is_zero() {
                    for cand in [d.clone(), -d.clone(), &c / &d, -(&c / &d)] {
                        if eval_int(&poly, &cand).is_zero() {
                            hit = Some(cand);
                            break 'search;
                        }
                    }
                }
                d += 1;
            }
            hit
        };
        match found {
            Some(k) => {
                poly = deflate(&poly, &k);
                out.push(k);
            }
            None => break,
        }
    }
    out
}

/// Quotient of `p` by `x − k`, assuming `k` is a root.
fn deflate(p: &[BigInt], k: &BigInt) -> Vec<BigInt> {
    let d = p.len() - 1;
    let mut out = vec![BigInt::zero(); d];
    let mut carry = BigInt::zero();
    for i in (1..=d).rev() {
        carry = &p[i] + carry * k;
        out[i - 1] = carry.clone();
    }
    out
}

/// `N = [[z, r, pr], [0, q+z, pq+r], [1, p, p²+q+z]]` with its invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NMatrix {
    pub matrix: IntMatrix,
    pub trace: BigInt,
    pub det: BigInt,
    /// Sum of the principal 2×2 minors.
    pub i1: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NMatrixJson {
    pub rows: Vec<Vec<String>>,
    pub trace: String,
    pub det: String,
    pub i1: String,
}

impl NMatrix {
    pub fn to_json(&self) -> NMatrixJson {
        NMatrixJson {
            rows: self
                .matrix
                .to_rows()
                .iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect(),
            trace: self.trace.to_string(),
            det: self.det.to_string(),
            i1: self.i1.to_string(),
        }
    }
}

pub fn build_n_matrix(spec: &CubicSpec) -> Result<NMatrix, CubicError> {
    let (p, q, r, z) = (&spec.p, &spec.q, &spec.r, &spec.z);
    let pqr = spec.pq_plus_r();
    if pqr.is_zero() {
        return Err(CubicError::DegenerateSpec("pq + r = 0".into()));
    }
    let matrix = IntMatrix::from_rows(vec![
        vec![z.clone(), r.clone(), p * r],
        vec![BigInt::zero(), q + z, pqr],
        vec![BigInt::one(), p.clone(), p * p + q + z],
    ]);
    let det = matrix.det();
    if det.is_zero() {
        return Err(CubicError::DegenerateSpec("det N = 0".into()));
    }
    let minor = |i: usize, j: usize| {
        &matrix[(i, i)] * &matrix[(j, j)] - &matrix[(i, j)] * &matrix[(j, i)]
    };
    let i1 = minor(0, 1) + minor(0, 2) + minor(1, 2);
    Ok(NMatrix {
        trace: matrix.trace(),
        det,
        i1,
        matrix,
    })
}

/// Two quotient axes, each two preperiod terms followed by a period of three.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryRep {
    pub pre: [Vec<Rational>; 2],
    pub period: [Vec<Rational>; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TernaryRepJson {
    pub pre: Vec<Vec<String>>,
    pub period: Vec<Vec<String>>,
}

impl TernaryRep {
    /// `a_n^(axis)`, 0-based axis.
    pub fn quotient(&self, axis: usize, n: usize) -> Rational {
        let pre = &self.pre[axis];
        if n < pre.len() {
            pre[n].clone()
        } else {
            let per = &self.period[axis];
            per[(n - pre.len()) % per.len()].clone()
        }
    }

    /// Rows `0..len` with the period unrolled.
    pub fn quotient_stream(&self, len: usize) -> Vec<Vec<Rational>> {
        (0..len)
            .map(|n| vec![self.quotient(0, n), self.quotient(1, n)])
            .collect()
    }

    pub fn to_json(&self) -> TernaryRepJson {
        let conv = |v: &[Vec<Rational>; 2]| -> Vec<Vec<String>> {
            v.iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect()
        };
        TernaryRepJson {
            pre: conv(&self.pre),
            period: conv(&self.period),
        }
    }
}

pub fn build_representation(spec: &CubicSpec) -> Result<TernaryRep, CubicError> {
    let n = build_n_matrix(spec)?;
    let int = |x: &BigInt| Rational::from_integer(x.clone());
    let (p, q, r, z) = (int(&spec.p), int(&spec.q), int(&spec.r), int(&spec.z));
    let pqr = int(&spec.pq_plus_r());
    let (tr, det, i1) = (int(&n.trace), int(&n.det), int(&n.i1));
    let two = Rational::from_integer(2.into());
    let first_pre = vec![z.clone(), (&two * &z + &p * &p + &q) / &pqr];
    let first_period = vec![&pqr * &tr / &det, tr.clone(), &tr / &pqr];
    let second_pre = vec![
        p.clone(),
        -(&z * &z + &q * &z + &p * &p * &z - &p * &r) / &pqr,
    ];
    let second_period = vec![-&i1 / &det, -(&pqr * &i1) / &det, -&i1 / &pqr];
    Ok(TernaryRep {
        pre: [first_pre, second_pre],
        period: [first_period, second_period],
    })
}

/// Convergent table for rows `0..=depth`.
pub fn representation_table(rep: &TernaryRep, depth: usize) -> ConvergentTable<Rational> {
    ConvergentTable::from_quotients(&rep.quotient_stream(depth + 1)).expect("two axes")
}

/// The `n`-th convergent pair of the representation.
pub fn evaluate_representation(rep: &TernaryRep, n: usize) -> Result<Vec<Rational>, ConvergentError> {
    representation_table(rep, n).convergent(n as isize)
}

/// `(r/α, α)` as elements of the field of `α`.
pub fn targets(spec: &CubicSpec) -> Result<[FieldElement; 2], CubicError> {
    let alpha = spec.alpha()?;
    let inv = alpha
        .inv()
        .map_err(|_| CubicError::DegenerateSpec("alpha is zero".into()))?;
    Ok([inv.scale(&Rational::from_integer(spec.r.clone())), alpha])
}

/// `max_i |target_i − conv_i|`, exact.
pub fn max_error(target: &[FieldElement], conv: &[Rational]) -> FieldElement {
    target
        .iter()
        .zip(conv)
        .map(|(t, c)| t.add_rational(&-c.clone()).abs())
        .reduce(|a, b| match a.compare(&b).expect("same field") {
            Ordering::Less => b,
            _ => a,
        })
        .expect("nonempty tuple")
}

/// Whether `|target_i − conv_i| < eps` for every coordinate.
pub fn within(target: &[FieldElement], conv: &[Rational], eps: &Rational) -> bool {
    max_error(target, conv).add_rational(&-eps.clone()).sign() < 0
}

/// Outward-rounded decimal enclosure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalInterval {
    pub lo: String,
    pub hi: String,
}

/// Number of fractional digits needed to show a width.
fn digits_for(width: &Rational) -> usize {
    let mut d = 0;
    let mut scale = Rational::one();
    while &scale > width && d < 400 {
        scale /= Rational::from_integer(10.into());
        d += 1;
    }
    d + 2
}

pub fn decimal_interval(iv: &Interval, digits: usize) -> DecimalInterval {
    let ulp = crate::exactnum::pow10_inv(digits);
    // Truncation moves toward zero, so pad away from zero on each side.
    let lo = if iv.lo.is_negative() { &iv.lo - &ulp } else { iv.lo.clone() };
    let hi = if iv.hi.is_negative() { iv.hi.clone() } else { &iv.hi + &ulp };
    DecimalInterval {
        lo: to_decimal(&lo, digits),
        hi: to_decimal(&hi, digits),
    }
}

fn abs_interval(iv: Interval) -> Interval {
    if !iv.lo.is_negative() {
        iv
    } else if !iv.hi.is_positive() {
        Interval::new(-iv.hi, -iv.lo)
    } else {
        let m = (-iv.lo.clone()).max(iv.hi.clone());
        Interval::new(Rational::zero(), m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    /// Exact rational strings; `None` when the denominator vanishes.
    pub convergent: Option<Vec<String>>,
    /// Enclosures of `|target_i − convergent_i|`.
    pub error: Option<Vec<DecimalInterval>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisFitSummary {
    pub axis: usize,
    pub order: Option<usize>,
    pub offset: Option<usize>,
    pub char_poly: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideReport {
    pub status: Option<ExpansionStatus>,
    pub quotients: Vec<Vec<String>>,
    pub rows: Vec<ComparisonRow>,
    pub zero_denominators: Vec<usize>,
    pub fit_max_order: usize,
    pub fits: Vec<AxisFitSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub spec: CubicSpecJson,
    pub irreducible: bool,
    pub alpha: AlgebraicRealJson,
    pub target: Vec<DecimalInterval>,
    pub n_matrix: NMatrixJson,
    pub representation: TernaryRepJson,
    pub depth: usize,
    pub precision: String,
    pub jacobi: SideReport,
    pub ternary: SideReport,
    pub comparable: bool,
    pub notes: Vec<String>,
}

/// `min(12, (rows − 4)/2)`, the largest order a prefix of `rows` terms can
/// attest.
pub fn fit_order_bound(rows: usize) -> usize {
    12.min(rows.saturating_sub(4) / 2)
}

fn side_report<T: crate::convergents::Scalar>(
    table: &ConvergentTable<T>,
    quotients: &[Vec<T>],
    status: Option<ExpansionStatus>,
    target: &[FieldElement],
    width: &Rational,
) -> Result<SideReport, CubicError> {
    let digits = digits_for(width);
    let mut rows = Vec::new();
    let mut zero_denominators = Vec::new();
    for n in 0..table.len() {
        match table.convergent(n as isize) {
            Ok(conv) => {
                let error = target
                    .iter()
                    .zip(&conv)
                    .map(|(t, c)| {
                        let iv = abs_interval(t.add_rational(&-c.clone()).enclosure(width));
                        decimal_interval(&iv, digits)
                    })
                    .collect();
                rows.push(ComparisonRow {
                    n,
                    convergent: Some(conv.iter().map(ToString::to_string).collect()),
                    error: Some(error),
                });
            }
            Err(ConvergentError::ZeroDenominator(_)) => {
                zero_denominators.push(n);
                rows.push(ComparisonRow {
                    n,
                    convergent: None,
                    error: None,
                });
            }
            Err(e) => unreachable!("row {n} exists: {e}"),
        }
    }
    let fit_max_order = fit_order_bound(table.len());
    let mut fits = Vec::new();
    for axis in 1..=table.m() + 1 {
        let seq: Vec<Rational> = table.axis(axis).iter().map(|x| x.to_rational()).collect();
        let fit = if seq.len() >= min_fit_len(fit_max_order) && fit_max_order > 0 {
            fit_minimal(&seq, fit_max_order)?
        } else {
            None
        };
        fits.push(AxisFitSummary {
            axis,
            order: fit.as_ref().map(|f| f.order()),
            offset: fit.as_ref().map(|f| f.offset()),
            char_poly: fit.as_ref().map(|f| f.char_poly().to_string()),
        });
    }
    Ok(SideReport {
        status,
        quotients: quotients
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect(),
        rows,
        zero_denominators,
        fit_max_order,
        fits,
    })
}

/// Side-by-side convergents of the ternary representation and of the
/// Jacobi–Perron expansion of `(r/α, α)`, rows `0..=depth`, with error
/// enclosures of width at most `width`.
pub fn compare_with_jacobi(
    spec: &CubicSpec,
    depth: usize,
    width: &Rational,
) -> Result<ComparisonReport, CubicError> {
    if depth == 0 {
        return Err(CubicError::ZeroDepth);
    }
    let n_matrix = build_n_matrix(spec)?;
    let rep = build_representation(spec)?;
    let target = targets(spec)?;
    let mut notes = Vec::new();
    let irreducible = spec.irreducible();
    if !irreducible {
        notes.push(format!(
            "cubic is reducible; alpha has degree {} and the pair is not a cubic irrational",
            target[1].field().degree()
        ));
    }

    let expansion = expand(&InputTuple::new(target.to_vec()).expect("one field"), depth + 1)
        .expect("depth ≥ 1");
    let jp_quotients = expansion.quotient_stream(depth + 1);
    let jp_table = ConvergentTable::from_quotients(&jp_quotients).expect("two axes");
    if let ExpansionStatus::Terminated { step } = expansion.status() {
        notes.push(format!(
            "jacobi expansion terminated at step {step}; only {} rows are comparable",
            step + 1
        ));
    }
    let jacobi = side_report(&jp_table, &jp_quotients, Some(expansion.status()), &target, width)?;

    let t_quotients = rep.quotient_stream(depth + 1);
    let t_table = representation_table(&rep, depth);
    let ternary = side_report(&t_table, &t_quotients, None, &target, width)?;
    if !ternary.zero_denominators.is_empty() {
        notes.push(format!(
            "ternary convergents with zero denominator at n = {:?}",
            ternary.zero_denominators
        ));
    }

    let digits = digits_for(width);
    Ok(ComparisonReport {
        spec: spec.to_json(),
        irreducible,
        alpha: target[1].field().to_json(),
        target: target
            .iter()
            .map(|t| decimal_interval(&t.enclosure(width), digits))
            .collect(),
        n_matrix: n_matrix.to_json(),
        representation: rep.to_json(),
        depth,
        precision: width.to_string(),
        comparable: irreducible && !matches!(expansion.status(), ExpansionStatus::Terminated { .. }),
        jacobi,
        ternary,
        notes,
    })
}
