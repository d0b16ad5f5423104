//! Convergent numerators and denominators.
//!
//! Rows are computed by the order-`m+1` recurrence with non-constant
//! coefficients, and independently as columns of the product of step
//! matrices. Quotients may be integers or rationals.

use crate::exactnum::Rational;
use crate::matrix::Matrix;
use num_bigint::BigInt;
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvergentError {
    #[error("expected {expected} quotients per step, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("row {0} is outside the table")]
    MissingRow(isize),
    #[error("convergent {0} has a zero denominator")]
    ZeroDenominator(isize),
}

/// Exact ring a convergent table can live in.
pub trait Scalar: Clone + Num + PartialOrd + fmt::Display {
    fn to_rational(&self) -> Rational;
}

impl Scalar for BigInt {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(self.clone())
    }
}

impl Scalar for Rational {
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

/// `A_n^(1..m+1)` for `n = -m, …, N`.
///
/// Rows for negative `n` hold the fixed initial conditions and are part of
/// the public indexing: `row(-m)` is valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentTable<T> {
    m: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> ConvergentTable<T> {
    /// Initial rows `n = -m..=0` for the zeroth quotients `a_0`.
    pub fn new(a0: &[T]) -> Result<Self, ConvergentError> {
        let m = a0.len();
        if m == 0 {
            return Err(ConvergentError::ZeroDimension);
        }
        let mut rows = Vec::with_capacity(m + 1);
        for j in (1..=m).rev() {
            // A_{-j}^(i) = [i == j], A_{-j}^(m+1) = 0
            let mut row = vec![T::zero(); m + 1];
            row[j - 1] = T::one();
            rows.push(row);
        }
        let mut row0: Vec<T> = a0.to_vec();
        row0.push(T::one());
        rows.push(row0);
        Ok(Self { m, rows })
    }

    /// Builds the table for rows `0..quotients.len()`.
    pub fn from_quotients(quotients: &[Vec<T>]) -> Result<Self, ConvergentError> {
        let (first, rest) = quotients.split_first().ok_or(ConvergentError::ZeroDimension)?;
        let mut table = Self::new(first)?;
        for q in rest {
            table.extend(q)?;
        }
        Ok(table)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Index of the last row.
    pub fn last_index(&self) -> isize {
        self.rows.len() as isize - self.m as isize - 1
    }

    /// Number of rows with `n ≥ 0`.
    pub fn len(&self) -> usize {
        self.rows.len() - self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, n: isize) -> Option<&[T]> {
        let k = n + self.m as isize;
        if k < 0 {
            return None;
        }
        self.rows.get(k as usize).map(Vec::as_slice)
    }

    /// `A_n^(axis)` for `n = 0..=N`; `axis` is 1-based as in `A^(1)…A^(m+1)`.
    pub fn axis(&self, axis: usize) -> Vec<T> {
        assert!((1..=self.m + 1).contains(&axis), "axis out of range");
        self.rows[self.m..].iter().map(|r| r[axis - 1].clone()).collect()
    }

    /// Appends row `N+1` from the quotients `a_{N+1}^(1..m)`:
    /// `A_n = Σ_j a_n^(j) A_{n-j} + A_{n-m-1}`.
    pub fn extend(&mut self, quotients: &[T]) -> Result<(), ConvergentError> {
        if quotients.len() != self.m {
            return Err(ConvergentError::DimensionMismatch {
                expected: self.m,
                got: quotients.len(),
            });
        }
        let len = self.rows.len();
        let m = self.m;
        let mut next = Vec::with_capacity(m + 1);
        for i in 0..=m {
            // The table always holds rows -m..=0, so A_{n-m-1} exists.
            let mut acc = self.rows[len - m - 1][i].clone();
            for (j, a) in quotients.iter().enumerate() {
                if !a.is_zero() {
                    acc = acc + a.clone() * self.rows[len - 1 - j][i].clone();
                }
            }
            next.push(acc);
        }
        self.rows.push(next);
        Ok(())
    }

    /// The convergent `(A_n^(1)/A_n^(m+1), …, A_n^(m)/A_n^(m+1))`.
    pub fn convergent(&self, n: isize) -> Result<Vec<Rational>, ConvergentError> {
        let row = self.row(n).ok_or(ConvergentError::MissingRow(n))?;
        let den = row[self.m].to_rational();
        if den.is_zero() {
            return Err(ConvergentError::ZeroDenominator(n));
        }
        Ok(row[..self.m].iter().map(|a| a.to_rational() / &den).collect())
    }

    pub fn to_json(&self) -> ConvergentTableJson {
        let rows = (-(self.m as isize)..=self.last_index())
            .map(|n| {
                let row = self.row(n).expect("index in range");
                ConvergentRowJson {
                    n,
                    numerators: row.iter().map(ToString::to_string).collect(),
                    convergent: if n >= 0 {
                        self.convergent(n)
                            .ok()
                            .map(|c| c.iter().map(ToString::to_string).collect())
                    } else {
                        None
                    },
                }
            })
            .collect();
        ConvergentTableJson { m: self.m, rows }
    }

    /// CSV with columns `n, A1..A{m+1}, c1..cm`; convergent cells are empty
    /// for negative rows and zero denominators.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for i in 1..=self.m + 1 {
            out.push_str(&format!(",A{i}"));
        }
        for i in 1..=self.m {
            out.push_str(&format!(",c{i}"));
        }
        out.push('\n');
        for r in self.to_json().rows {
            out.push_str(&r.n.to_string());
            for a in &r.numerators {
                out.push(',');
                out.push_str(a);
            }
            match &r.convergent {
                Some(c) => c.iter().for_each(|x| {
                    out.push(',');
                    out.push_str(x);
                }),
                None => out.push_str(&",".repeat(self.m)),
            }
            out.push('\n');
        }
        out
    }
}

/// One row of a serialized table; every value is an exact rational string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentRowJson {
    pub n: isize,
    pub numerators: Vec<String>,
    pub convergent: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentTableJson {
    pub m: usize,
    pub rows: Vec<ConvergentRowJson>,
}

/// The `(m+1)×(m+1)` step matrix: first column `(a^(1), …, a^(m), 1)`,
/// then the first `m` standard basis vectors.
pub fn step_matrix<T: Scalar>(quotients: &[T]) -> Matrix<T> {
    let m = quotients.len();
    let mut s = Matrix::zeros(m + 1, m + 1);
    for (i, a) in quotients.iter().enumerate() {
        s[(i, 0)] = a.clone();
        s[(i, i + 1)] = T::one();
    }
    s[(m, 0)] = T::one();
    s
}

/// `Π_{j=0}^n S(a_j)`, whose columns are `A_n, A_{n-1}, …, A_{n-m}`.
pub fn matrix_table<T: Scalar>(prefix: &[Vec<T>]) -> Matrix<T> {
    let first = prefix.first().expect("nonempty quotient prefix");
    prefix[1..]
        .iter()
        .fold(step_matrix(first), |acc, q| acc.matmul(&step_matrix(q)))
}

/// Checks `A_n^(i) ≥ Π_{j=1}^n a_j^(1)` for every axis and every
/// `1 ≤ n ≤ N`; `quotients[j]` are the quotients of row `j`.
pub fn check_growth_bound(table: &ConvergentTable<BigInt>, quotients: &[Vec<BigInt>]) -> bool {
    growth_bound_violations(table, quotients).is_empty()
}

/// Every `(n, axis)` at which the growth bound fails; axes are 1-based.
pub fn growth_bound_violations(
    table: &ConvergentTable<BigInt>,
    quotients: &[Vec<BigInt>],
) -> Vec<(usize, usize)> {
    let last = (table.last_index().max(0) as usize).min(quotients.len().saturating_sub(1));
    let mut product = BigInt::one();
    let mut out = Vec::new();
    for n in 1..=last {
        product *= &quotients[n][0];
        let row = table.row(n as isize).expect("row within table");
        for (i, a) in row.iter().enumerate() {
            if *a < product {
                out.push((n, i + 1));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_matrix;
    use proptest::prelude::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn ones(m: usize, len: usize) -> Vec<Vec<BigInt>> {
        vec![vec![b(1); m]; len]
    }

    #[test]
    fn fibonacci_denominators() {
        let t = ConvergentTable::from_quotients(&ones(1, 8)).unwrap();
        let expected: Vec<BigInt> = [1, 1, 2, 3, 5, 8, 13, 21].iter().map(|&x| b(x)).collect();
        assert_eq!(t.axis(2), expected);
    }

    #[test]
    fn tribonacci_denominators() {
        let t = ConvergentTable::from_quotients(&ones(2, 7)).unwrap();
        let expected: Vec<BigInt> = [1, 1, 2, 4, 7, 13, 24].iter().map(|&x| b(x)).collect();
        assert_eq!(t.axis(3), expected);
    }

    #[test]
    fn initial_conditions() {
        let t = ConvergentTable::new(&[b(3), b(4)]).unwrap();
        assert_eq!(t.row(0).unwrap(), &[b(3), b(4), b(1)]);
        assert_eq!(t.row(-1).unwrap(), &[b(1), b(0), b(0)]);
        assert_eq!(t.row(-2).unwrap(), &[b(0), b(1), b(0)]);
        assert!(t.row(-3).is_none());
        assert_eq!(
            t.convergent(0).unwrap(),
            vec![Rational::from_integer(b(3)), Rational::from_integer(b(4))]
        );
    }

    #[test]
    fn dimension_mismatch() {
        let mut t = ConvergentTable::new(&[b(1), b(1)]).unwrap();
        assert_eq!(
            t.extend(&[b(1)]).unwrap_err(),
            ConvergentError::DimensionMismatch { expected: 2, got: 1 }
        );
        assert_eq!(
            ConvergentTable::<BigInt>::new(&[]).unwrap_err(),
            ConvergentError::ZeroDimension
        );
    }

    #[test]
    fn golden_ratio_convergent() {
        let t = ConvergentTable::from_quotients(&ones(1, 5)).unwrap();
        assert_eq!(t.convergent(4).unwrap(), vec![Rational::new(b(8), b(5))]);
    }

    #[test]
    fn all_ones_m2_convergent_row3() {
        // Hand iteration: A^(1) = 1,2,4,7  A^(2) = 1,1,3,6  A^(3) = 1,1,2,4
        let t = ConvergentTable::from_quotients(&ones(2, 4)).unwrap();
        assert_eq!(t.row(3).unwrap(), &[b(7), b(6), b(4)]);
        assert_eq!(
            t.convergent(3).unwrap(),
            vec![Rational::new(b(7), b(4)), Rational::new(b(3), b(2))]
        );
    }

    #[test]
    fn zero_denominator_reported() {
        let t = ConvergentTable::from_quotients(&[vec![b(1), b(0)], vec![b(0), b(0)]]).unwrap();
        assert_eq!(t.convergent(1).unwrap_err(), ConvergentError::ZeroDenominator(1));
    }

    #[test]
    fn single_step_matrix() {
        assert_eq!(
            matrix_table(&ones(2, 1)),
            int_matrix(&[&[1, 1, 0], &[1, 0, 1], &[1, 0, 0]])
        );
        assert_eq!(matrix_table(&ones(1, 3)), int_matrix(&[&[3, 2], &[2, 1]]));
    }

    #[test]
    fn step_matrix_determinant() {
        for m in 1..=5 {
            let q: Vec<BigInt> = (0..m).map(|k| b(k as i64 + 2)).collect();
            let expected = if m % 2 == 0 { b(1) } else { b(-1) };
            assert_eq!(step_matrix(&q).det(), expected, "m = {m}");
        }
    }

    #[test]
    fn rational_quotients() {
        let q = |n: i64, d: i64| Rational::new(b(n), b(d));
        let quotients = vec![vec![q(1, 2), q(0, 1)], vec![q(3, 2), q(-1, 3)], vec![q(2, 1), q(5, 7)]];
        let t = ConvergentTable::from_quotients(&quotients).unwrap();
        let m = matrix_table(&quotients);
        assert_eq!(m.column(0), t.row(2).unwrap().to_vec());
    }

    #[test]
    fn growth_bound_on_fibonacci() {
        let q = ones(1, 20);
        let t = ConvergentTable::from_quotients(&q).unwrap();
        assert!(check_growth_bound(&t, &q));
    }

    #[test]
    fn growth_bound_fails_for_numerator_with_zero_a0() {
        // x = 1/2 has quotients [0; 2]: A_1^(1) = 1 < a_1 = 2.
        let q = vec![vec![b(0)], vec![b(2)]];
        let t = ConvergentTable::from_quotients(&q).unwrap();
        assert_eq!(growth_bound_violations(&t, &q), vec![(1, 1)]);
    }

    fn quotient_prefix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=3).prop_flat_map(|m| {
            prop::collection::vec(
                (1i64..=9, prop::collection::vec(0i64..=9, m - 1)).prop_map(|(a1, rest)| {
                    let mut v = vec![a1];
                    v.extend(rest);
                    v
                }),
                1..=50,
            )
        })
    }

    fn to_big(p: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        p.iter().map(|r| r.iter().map(|&x| b(x)).collect()).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matrix_product_matches_recurrence(prefix in quotient_prefix()) {
            let q = to_big(&prefix);
            let m = q[0].len();
            let t = ConvergentTable::from_quotients(&q).unwrap();
            let p = matrix_table(&q);
            let n = q.len() as isize - 1;
            for k in 0..=m {
                prop_assert_eq!(p.column(k), t.row(n - k as isize).unwrap().to_vec());
            }
            if q.len() > 1 {
                let shorter = matrix_table(&q[..q.len() - 1]);
                for k in 1..=m {
                    prop_assert_eq!(p.column(k), shorter.column(k - 1));
                }
            }
            let sign = if (m * q.len()) % 2 == 0 { b(1) } else { b(-1) };
            prop_assert_eq!(p.det(), sign);
        }
    }
}
