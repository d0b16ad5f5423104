//! The Jacobi–Perron iteration over a real number field.
//!
//! Each step takes floors of the current state, then divides the shifted
//! fractional parts by the fractional part of the last coordinate. States are
//! exact field elements, so a repeated state is detected by comparing
//! coordinates, never by numerical closeness.

use crate::exactnum::{floor_rational, AlgebraicReal, FieldElement, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JpError {
    #[error("an input tuple needs at least one value")]
    EmptyInput,
    #[error("input values lie in different number fields")]
    FieldMismatch,
    #[error("max_iter must be at least 1")]
    ZeroIterations,
}

/// `(α_0^(1), …, α_0^(m))`, all in one number field.
#[derive(Clone, Debug)]
pub struct InputTuple {
    values: Vec<FieldElement>,
}

impl InputTuple {
    pub fn new(values: Vec<FieldElement>) -> Result<Self, JpError> {
        let first = values.first().ok_or(JpError::EmptyInput)?;
        if values[1..].iter().any(|v| !v.same_field(first)) {
            return Err(JpError::FieldMismatch);
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn field(&self) -> &Arc<AlgebraicReal> {
        self.values[0].field()
    }
}

/// Quotients `a_n^(1..m)` and the state `α_{n+1}^(1..m)` they lead to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionStep {
    pub quotients: Vec<BigInt>,
    pub state_after: Vec<FieldElement>,
}

/// The last fractional part was exactly zero; the quotients of the final
/// step are still valid partial quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Termination {
    pub quotients: Vec<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpansionStatus {
    /// Step `step` produced a zero fractional part.
    Terminated { step: usize },
    /// The state before step `preperiod + period` equals the state before
    /// step `preperiod`.
    CycleDetected { preperiod: usize, period: usize },
    Truncated { max_iter: usize },
}

#[derive(Clone, Debug)]
pub struct Expansion {
    initial: Vec<FieldElement>,
    steps: Vec<ExpansionStep>,
    terminal: Option<Vec<BigInt>>,
    status: ExpansionStatus,
    zero_quotients: Vec<(usize, usize)>,
}

impl Expansion {
    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn status(&self) -> ExpansionStatus {
        self.status
    }

    pub fn steps(&self) -> &[ExpansionStep] {
        &self.steps
    }

    /// State before step `n`.
    pub fn state(&self, n: usize) -> Option<&[FieldElement]> {
        if n == 0 {
            Some(&self.initial)
        } else {
            self.steps.get(n - 1).map(|s| s.state_after.as_slice())
        }
    }

    /// Every computed quotient row, including the terminal one.
    pub fn quotients(&self) -> Vec<Vec<BigInt>> {
        self.steps
            .iter()
            .map(|s| s.quotients.clone())
            .chain(self.terminal.clone())
            .collect()
    }

    /// `(n, i)` pairs, `n ≥ 1`, where `a_n^(i) = 0` for some `i ≥ 2`.
    pub fn zero_quotients(&self) -> &[(usize, usize)] {
        &self.zero_quotients
    }

    /// The first `len` quotient rows; a detected cycle is unrolled, since
    /// the repeated state forces every later quotient. Shorter when the
    /// expansion terminated or was truncated first.
    pub fn quotient_stream(&self, len: usize) -> Vec<Vec<BigInt>> {
        let mut q = self.quotients();
        if let ExpansionStatus::CycleDetected { preperiod, period } = self.status {
            while q.len() < len {
                let k = preperiod + (q.len() - preperiod) % period;
                q.push(q[k].clone());
            }
        }
        q.truncate(len);
        q
    }

    pub fn report(&self) -> ExpansionReport {
        ExpansionReport {
            m: self.dim(),
            quotients: self
                .quotients()
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
            status: self.status,
            zero_quotients: self.zero_quotients.clone(),
        }
    }
}

/// Wire form `{"m": m, "quotients": [[...], ...], "status": {...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub m: usize,
    pub quotients: Vec<Vec<String>>,
    pub status: ExpansionStatus,
    #[serde(default)]
    pub zero_quotients: Vec<(usize, usize)>,
}

/// One Jacobi–Perron step.
pub fn jp_step(state: &[FieldElement]) -> Result<ExpansionStep, Termination> {
    let m = state.len();
    let quotients: Vec<BigInt> = state.iter().map(FieldElement::floor).collect();
    let frac: Vec<FieldElement> = state
        .iter()
        .zip(&quotients)
        .map(|(x, a)| x.add_rational(&-Rational::from_integer(a.clone())))
        .collect();
    let last = &frac[m - 1];
    let Ok(inv) = last.inv() else {
        return Err(Termination { quotients });
    };
    let mut next = Vec::with_capacity(m);
    next.push(inv.clone());
    for f in &frac[..m - 1] {
        next.push(f * &inv);
    }
    Ok(ExpansionStep {
        quotients,
        state_after: next,
    })
}

fn state_key(state: &[FieldElement]) -> Vec<Vec<Rational>> {
    state.iter().map(|x| x.coords().to_vec()).collect()
}

/// Iterates [`jp_step`] up to `max_iter` times, stopping at the first exact
/// state repetition or at termination.
pub fn expand(input: &InputTuple, max_iter: usize) -> Result<Expansion, JpError> {
    if max_iter == 0 {
        return Err(JpError::ZeroIterations);
    }
    let initial = input.values().to_vec();
    let mut seen: HashMap<Vec<Vec<Rational>>, usize> = HashMap::new();
    seen.insert(state_key(&initial), 0);
    let mut steps: Vec<ExpansionStep> = Vec::new();
    let mut zero_quotients = Vec::new();
    let mut terminal = None;
    let mut status = ExpansionStatus::Truncated { max_iter };
    for n in 0..max_iter {
        let state = steps.last().map_or(&initial, |s| &s.state_after);
        let result = jp_step(state);
        let quotients = match &result {
            Ok(s) => &s.quotients,
            Err(t) => &t.quotients,
        };
        if n >= 1 {
            debug_assert!(quotients[0] >= BigInt::one(), "a_n^(1) < 1 at n = {n}");
            for (i, a) in quotients.iter().enumerate().skip(1) {
                debug_assert!(!a.is_negative(), "a_n^(i) < 0 at n = {n}");
                if a.is_zero() {
                    zero_quotients.push((n, i + 1));
                }
            }
        }
        match result {
            Err(t) => {
                terminal = Some(t.quotients);
                status = ExpansionStatus::Terminated { step: n };
                break;
            }
            Ok(step) => {
                let key = state_key(&step.state_after);
                steps.push(step);
                if let Some(&first) = seen.get(&key) {
                    status = ExpansionStatus::CycleDetected {
                        preperiod: first,
                        period: n + 1 - first,
                    };
                    break;
                }
                seen.insert(key, n + 1);
            }
        }
    }
    Ok(Expansion {
        initial,
        steps,
        terminal,
        status,
        zero_quotients,
    })
}

/// Classical continued fraction of a single field element, computed without
/// the Jacobi–Perron machinery: Euclid's algorithm for rationals, the
/// integer `(P + √D)/Q` recursion for quadratic irrationals, and a direct
/// floor/reciprocal loop otherwise.
///
/// The result carries quotients and status only; its states are the
/// classical ones and agree with [`expand`] for `m = 1`.
pub fn classical_cf(x: &FieldElement, max_iter: usize) -> Result<Expansion, JpError> {
    if max_iter == 0 {
        return Err(JpError::ZeroIterations);
    }
    if let Some(r) = x.as_rational() {
        return Ok(euclid(x, r, max_iter));
    }
    if x.field().degree() == 2 {
        return Ok(quadratic_surd_cf(x, max_iter));
    }
    Ok(generic_cf(x, max_iter))
}

fn bare_expansion(
    x: &FieldElement,
    quotients: Vec<BigInt>,
    terminal: Option<BigInt>,
    status: ExpansionStatus,
) -> Expansion {
    Expansion {
        initial: vec![x.clone()],
        // States are not tracked by the oracle paths.
        steps: quotients
            .into_iter()
            .map(|a| ExpansionStep {
                quotients: vec![a],
                state_after: Vec::new(),
            })
            .collect(),
        terminal: terminal.map(|a| vec![a]),
        status,
        zero_quotients: Vec::new(),
    }
}

fn euclid(x: &FieldElement, r: &Rational, max_iter: usize) -> Expansion {
    let (mut p, mut q) = (r.numer().clone(), r.denom().clone());
    let mut quotients = Vec::new();
    for n in 0..max_iter {
        let (a, rem) = p.div_mod_floor(&q);
        if rem.is_zero() {
            return bare_expansion(x, quotients, Some(a), ExpansionStatus::Terminated { step: n });
        }
        quotients.push(a);
        p = std::mem::replace(&mut q, rem);
    }
    bare_expansion(x, quotients, None, ExpansionStatus::Truncated { max_iter })
}

/// `x = (P + √D) / Q` with integers and `Q | D - P²`.
fn to_surd(x: &FieldElement) -> (BigInt, BigInt, BigInt) {
    let mp = x.field().minpoly();
    let (c, b, a) = (&mp[0], &mp[1], &mp[2]);
    let disc = b * b - BigInt::from(4) * a * c;
    let two_a = Rational::from_integer(BigInt::from(2) * a);
    // θ = (-b + ε√disc) / 2a; ε is fixed by which side of -b/2a θ lies on.
    let theta = FieldElement::generator(x.field().clone());
    let vertex = Rational::from_integer(-b.clone()) / &two_a;
    let above = theta.add_rational(&-vertex.clone()).sign() > 0;
    let eps = if above == two_a.is_positive() { 1 } else { -1 };
    let c0 = &x.coords()[0];
    let c1 = &x.coords()[1];
    let u = c0 + c1 * &vertex;
    let v = c1 * Rational::from_integer(BigInt::from(eps)) / &two_a;
    let l = u.denom().lcm(v.denom());
    let lr = Rational::from_integer(l.clone());
    let sgn = if v.is_negative() { -BigInt::one() } else { BigInt::one() };
    let ul = (&u * &lr).to_integer();
    let vl = (&v * &lr).to_integer();
    let mut d = &vl * &vl * &disc;
    let mut p = &sgn * ul;
    let mut q = sgn * l;
    if !((&d - &p * &p) % &q).is_zero() {
        let qa = q.abs();
        p *= &qa;
        d *= &qa * &qa;
        q *= qa;
    }
    (p, q, d)
}

fn quadratic_surd_cf(x: &FieldElement, max_iter: usize) -> Expansion {
    let (mut p, mut q, d) = to_surd(x);
    let s = d.sqrt();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    seen.insert((p.clone(), q.clone()), 0);
    let mut quotients = Vec::new();
    for n in 0..max_iter {
        // √D lies strictly between s and s+1.
        let a: BigInt = if q.is_positive() {
            (&p + &s).div_floor(&q)
        } else {
            let qa: BigInt = -&q;
            let below: BigInt = (&p + &s).div_floor(&qa);
            -(below + BigInt::one())
        };
        let p_next = &a * &q - &p;
        let q_next = (&d - &p_next * &p_next) / &q;
        quotients.push(a);
        p = p_next;
        q = q_next;
        let key = (p.clone(), q.clone());
        if let Some(&first) = seen.get(&key) {
            let status = ExpansionStatus::CycleDetected {
                preperiod: first,
                period: n + 1 - first,
            };
            return bare_expansion(x, quotients, None, status);
        }
        seen.insert(key, n + 1);
    }
    bare_expansion(x, quotients, None, ExpansionStatus::Truncated { max_iter })
}

fn generic_cf(x: &FieldElement, max_iter: usize) -> Expansion {
    let mut cur = x.clone();
    let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
    seen.insert(cur.coords().to_vec(), 0);
    let mut quotients = Vec::new();
    for n in 0..max_iter {
        let a = cur.floor();
        let frac = cur.add_rational(&-Rational::from_integer(a.clone()));
        if frac.is_zero() {
            return bare_expansion(x, quotients, Some(a), ExpansionStatus::Terminated { step: n });
        }
        quotients.push(a);
        cur = frac.inv().expect("nonzero fractional part");
        if let Some(&first) = seen.get(cur.coords()) {
            let status = ExpansionStatus::CycleDetected {
                preperiod: first,
                period: n + 1 - first,
            };
            return bare_expansion(x, quotients, None, status);
        }
        seen.insert(cur.coords().to_vec(), n + 1);
    }
    bare_expansion(x, quotients, None, ExpansionStatus::Truncated { max_iter })
}

/// Floor of a rational, re-exported for callers that build quotient streams.
pub fn rational_floor(x: &Rational) -> BigInt {
    floor_rational(x)
}
