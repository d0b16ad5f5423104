//! Linear recurrence sequences with constant rational coefficients.
//!
//! Covers evaluation, exact minimal-recurrence fitting, characteristic
//! polynomials of matrices, closure of recurrences under term-wise sum and
//! product, and an eventual-periodicity check for finite integer prefixes.

use crate::exactnum::poly;
use crate::exactnum::{parse_rational, ExactError, Rational};
use crate::matrix::RatMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LrsError {
    #[error("need at least {needed} terms to fit order {max_order}, got {got}")]
    InsufficientData {
        needed: usize,
        got: usize,
        max_order: usize,
    },
    #[error("characteristic polynomial must be monic and nonconstant")]
    NotMonic,
    #[error("recurrence needs {expected} initial terms, got {got}")]
    InitialTerms { expected: usize, got: usize },
    #[error("leading recurrence coefficient is zero")]
    ZeroTrailingCoefficient,
    #[error(transparent)]
    Parse(#[from] ExactError),
}

/// Monic polynomial, coefficients lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CharPoly {
    coeffs: Vec<Rational>,
}

impl CharPoly {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, LrsError> {
        let mut coeffs = coeffs;
        poly::trim(&mut coeffs);
        match coeffs.last() {
            Some(c) if c.is_one() => Ok(Self { coeffs }),
            _ => Err(LrsError::NotMonic),
        }
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self, LrsError> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    /// `x - root`.
    pub fn linear(root: Rational) -> Self {
        Self {
            coeffs: vec![-root, Rational::one()],
        }
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![Rational::one()],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// The `c_k` with `s_n = Σ_{k=1}^d c_k s_{n-k}`.
    pub fn recurrence_coeffs(&self) -> Vec<Rational> {
        let d = self.degree();
        (1..=d).map(|k| -self.coeffs[d - k].clone()).collect()
    }

    /// Inverse of [`recurrence_coeffs`](Self::recurrence_coeffs).
    pub fn from_recurrence(coeffs: &[Rational]) -> Self {
        let d = coeffs.len();
        let mut p = vec![Rational::zero(); d + 1];
        for (k, c) in coeffs.iter().enumerate() {
            p[d - (k + 1)] = -c.clone();
        }
        p[d] = Rational::one();
        Self { coeffs: p }
    }

    pub fn mul(&self, other: &CharPoly) -> CharPoly {
        CharPoly {
            coeffs: poly::mul(&self.coeffs, &other.coeffs),
        }
    }

    /// Whether `self` divides `other` exactly.
    pub fn divides(&self, other: &CharPoly) -> bool {
        poly::rem(&other.coeffs, &self.coeffs).is_empty()
    }

    /// Whether `Σ_i p_i s_{n+i} = 0` for every `n ≥ from` that fits in `seq`.
    pub fn annihilates(&self, seq: &[Rational], from: usize) -> bool {
        self.first_failure(seq, from).is_none()
    }

    pub fn first_failure(&self, seq: &[Rational], from: usize) -> Option<usize> {
        let d = self.degree();
        (from..seq.len().saturating_sub(d)).find(|&n| {
            let sum = self
                .coeffs
                .iter()
                .enumerate()
                .fold(Rational::zero(), |acc, (i, p)| acc + p * &seq[n + i]);
            !sum.is_zero()
        })
    }

    /// Companion matrix: ones on the subdiagonal, last column `-p_0..-p_{d-1}`.
    pub fn companion(&self) -> RatMatrix {
        let d = self.degree();
        let mut c = RatMatrix::zeros(d, d);
        for i in 1..d {
            c[(i, i - 1)] = Rational::one();
        }
        for i in 0..d {
            c[(i, d - 1)] = -self.coeffs[i].clone();
        }
        c
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_matrix(&self, a: &RatMatrix) -> RatMatrix {
        let n = a.rows();
        self.coeffs
            .iter()
            .rev()
            .fold(RatMatrix::zeros(n, n), |acc, c| {
                acc.matmul(a).add(&RatMatrix::identity(n).scale(c))
            })
    }

    /// Coefficients as integers, when they all are.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = *c < Rational::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let var = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            if var.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&var);
            } else {
                out.push_str(&format!("{mag}{var}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CharPoly({self})")
    }
}

/// Monic characteristic polynomial `det(xI - A)` by the Faddeev–LeVerrier
/// recursion over exact rationals.
pub fn char_poly(a: &RatMatrix) -> CharPoly {
    assert!(a.is_square(), "characteristic polynomial of non-square matrix");
    let n = a.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let id = RatMatrix::identity(n);
    let mut m = RatMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I;  c_{n-k} = -tr(A M_k) / k
        m = a.matmul(&m).add(&id.scale(&coeffs[n - k + 1]));
        let t = a.matmul(&m).trace();
        coeffs[n - k] = -t / Rational::from_integer(BigInt::from(k));
    }
    CharPoly { coeffs }
}

/// Annihilator of term-wise sums: `p · q`.
pub fn sum_closure(p: &CharPoly, q: &CharPoly) -> CharPoly {
    p.mul(q)
}

/// Annihilator of term-wise products: the characteristic polynomial of the
/// Kronecker product of the two companion matrices.
pub fn product_closure(p: &CharPoly, q: &CharPoly) -> CharPoly {
    char_poly(&p.companion().kron(&q.companion()))
}

/// `s_n = Σ_{k=1}^d c_k s_{n-k}` for `n ≥ offset + d`.
///
/// `init` holds `s_0, …, s_{offset+d-1}`; terms before `offset + d` are not
/// constrained by the recurrence, which models pre-periodic transients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRecurrence {
    coeffs: Vec<Rational>,
    init: Vec<Rational>,
    offset: usize,
}

impl LinearRecurrence {
    pub fn new(coeffs: Vec<Rational>, init: Vec<Rational>, offset: usize) -> Result<Self, LrsError> {
        if coeffs.last().is_some_and(Zero::is_zero) {
            return Err(LrsError::ZeroTrailingCoefficient);
        }
        if init.len() != offset + coeffs.len() {
            return Err(LrsError::InitialTerms {
                expected: offset + coeffs.len(),
                got: init.len(),
            });
        }
        Ok(Self {
            coeffs,
            init,
            offset,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn init(&self) -> &[Rational] {
        &self.init
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn char_poly(&self) -> CharPoly {
        CharPoly::from_recurrence(&self.coeffs)
    }

    /// The first `len` terms.
    pub fn terms(&self, len: usize) -> Vec<Rational> {
        let mut s: Vec<Rational> = self.init.iter().take(len).cloned().collect();
        while s.len() < len {
            let n = s.len();
            let next = self
                .coeffs
                .iter()
                .enumerate()
                .fold(Rational::zero(), |acc, (k, c)| acc + c * &s[n - 1 - k]);
            s.push(next);
        }
        s
    }

    /// Whether the recurrence reproduces `seq` term for term.
    pub fn generates(&self, seq: &[Rational]) -> bool {
        self.terms(seq.len()) == seq
    }

    pub fn to_json(&self) -> RecurrenceJson {
        RecurrenceJson {
            order: self.order(),
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
            init: self.init.iter().map(ToString::to_string).collect(),
            offset: self.offset,
        }
    }
}

impl TryFrom<&RecurrenceJson> for LinearRecurrence {
    type Error = LrsError;

    fn try_from(j: &RecurrenceJson) -> Result<Self, LrsError> {
        let parse = |v: &[String]| -> Result<Vec<Rational>, LrsError> {
            v.iter().map(|s| parse_rational(s).map_err(LrsError::from)).collect()
        };
        let coeffs = parse(&j.coeffs)?;
        if coeffs.len() != j.order {
            return Err(LrsError::InitialTerms {
                expected: j.order,
                got: coeffs.len(),
            });
        }
        LinearRecurrence::new(coeffs, parse(&j.init)?, j.offset)
    }
}

/// Wire form `{"order": d, "coeffs": [...], "init": [...], "offset": n0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceJson {
    pub order: usize,
    pub coeffs: Vec<String>,
    pub init: Vec<String>,
    pub offset: usize,
}

/// Term `s_n` of the recurrence.
pub fn lrs_extend(r: &LinearRecurrence, n: usize) -> Rational {
    r.terms(n + 1).pop().expect("at least one term")
}

/// Minimum prefix length accepted by [`fit_minimal`].
pub fn min_fit_len(max_order: usize) -> usize {
    2 * max_order + 4
}

/// Finds the shortest span `d ≤ max_order` such that some
/// `s_n = Σ_{k=1}^d c_k s_{n-k}` holds at every `n ≥ d` of the prefix.
///
/// Trailing zero coefficients are folded into the offset, so the returned
/// recurrence has a nonzero last coefficient and may start late. `Ok(None)`
/// means no recurrence within the bound fits.
pub fn fit_minimal(prefix: &[Rational], max_order: usize) -> Result<Option<LinearRecurrence>, LrsError> {
    let needed = min_fit_len(max_order);
    if prefix.len() < needed {
        return Err(LrsError::InsufficientData {
            needed,
            got: prefix.len(),
            max_order,
        });
    }
    if prefix.iter().all(Zero::is_zero) {
        return Ok(Some(LinearRecurrence {
            coeffs: Vec::new(),
            init: Vec::new(),
            offset: 0,
        }));
    }
    for span in 1..=max_order {
        if let Some(coeffs) = solve_span(prefix, span) {
            return Ok(Some(normalise(prefix, coeffs)));
        }
    }
    Ok(None)
}

/// Solves the overdetermined Hankel system for a fixed span.
fn solve_span(prefix: &[Rational], span: usize) -> Option<Vec<Rational>> {
    let rows: Vec<Vec<Rational>> = (span..prefix.len())
        .map(|n| (1..=span).map(|k| prefix[n - k].clone()).collect())
        .collect();
    let rhs: Vec<Rational> = prefix[span..].to_vec();
    RatMatrix::from_rows(rows).solve(&rhs)
}

fn normalise(prefix: &[Rational], mut coeffs: Vec<Rational>) -> LinearRecurrence {
    let span = coeffs.len();
    poly::trim(&mut coeffs);
    let offset = span - coeffs.len();
    LinearRecurrence {
        init: prefix[..span].to_vec(),
        coeffs,
        offset,
    }
}

/// Smallest `(preperiod, period)` with `seq[n] == seq[n + period]` for every
/// `preperiod ≤ n < len - period`, backed by at least three full periods.
/// Preperiod is minimised first, then period. A hit only says the prefix is
/// consistent with periodicity.
pub fn eventually_periodic<T: PartialEq>(seq: &[T]) -> Option<(usize, usize)> {
    let len = seq.len();
    let mut best: Option<(usize, usize)> = None;
    for period in 1..=len / 3 {
        // Walk back from the end while the shift-by-period match holds.
        let mut start = len - period;
        while start > 0 && seq[start - 1] == seq[start - 1 + period] {
            start -= 1;
        }
        if len - start < 3 * period {
            continue;
        }
        if best.map_or(true, |(p, _)| start < p) {
            best = Some((start, period));
        }
    }
    best
}
