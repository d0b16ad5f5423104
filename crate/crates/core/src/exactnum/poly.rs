//! Dense univariate polynomials over the rationals.
//!
//! Coefficients are stored lowest degree first and kept trimmed, so the zero
//! polynomial is the empty vector.

use super::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub(crate) type RatPoly = Vec<Rational>;

pub(crate) fn trim(p: &mut RatPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub(crate) fn from_int(coeffs: &[BigInt]) -> RatPoly {
    let mut p: RatPoly = coeffs.iter().cloned().map(Rational::from_integer).collect();
    trim(&mut p);
    p
}

/// Degree of a trimmed polynomial; `None` for zero.
pub(crate) fn degree(p: &[Rational]) -> Option<usize> {
    p.len().checked_sub(1)
}

pub(crate) fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}

#[cfg(test)]
pub(crate) fn eval_int(p: &[BigInt], x: &Rational) -> Rational {
    p.iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
}

/// Sign of an integer polynomial at a rational point, computed on the
/// cleared-denominator form so no rational reductions are needed.
pub(crate) fn sign_int_at(p: &[BigInt], x: &Rational) -> i32 {
    // q^d * p(n/q) = sum c_k n^k q^(d-k); q > 0 so the sign is preserved.
    let n = x.numer();
    let q = x.denom();
    let mut coeffs = p.iter().rev();
    let Some(top) = coeffs.next() else {
        return 0;
    };
    let mut acc = top.clone();
    let mut qpow = q.clone();
    for c in coeffs {
        acc = acc * n + c * &qpow;
        qpow *= q;
    }
    signum(&acc)
}

pub(crate) fn signum(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn add(a: &[Rational], b: &[Rational]) -> RatPoly {
    let n = a.len().max(b.len());
    let mut out: RatPoly = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn sub(a: &[Rational], b: &[Rational]) -> RatPoly {
    let neg: RatPoly = b.iter().map(|c| -c).collect();
    add(a, &neg)
}

pub(crate) fn mul(a: &[Rational], b: &[Rational]) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Euclidean division. Panics if `b` is zero.
pub(crate) fn divrem(a: &[Rational], b: &[Rational]) -> (RatPoly, RatPoly) {
    let db = degree(b).expect("polynomial division by zero");
    let lead = b[db].clone();
    let mut rem: RatPoly = a.to_vec();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let factor = &rem[dr] / &lead;
        let shift = dr - db;
        for (k, c) in b.iter().enumerate() {
            rem[shift + k] -= &factor * c;
        }
        quot[shift] = factor;
        rem.pop();
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

pub(crate) fn rem(a: &[Rational], b: &[Rational]) -> RatPoly {
    divrem(a, b).1
}

pub(crate) fn derivative(p: &[Rational]) -> RatPoly {
    let mut out: RatPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
        .collect();
    trim(&mut out);
    out
}

/// Returns `s` with `s * a ≡ 1 (mod m)`, or `None` when `gcd(a, m) ≠ 1`.
pub(crate) fn inverse_mod(a: &[Rational], m: &[Rational]) -> Option<RatPoly> {
    // Invariant: r_k ≡ s_k * a (mod m).
    let (mut r0, mut r1) = (m.to_vec(), rem(a, m));
    let (mut s0, mut s1): (RatPoly, RatPoly) = (Vec::new(), vec![Rational::one()]);
    if r1.is_empty() {
        return None;
    }
    while degree(&r1).unwrap_or(0) > 0 {
        let (q, r) = divrem(&r0, &r1);
        if r.is_empty() {
            // r1 is a non-constant common factor.
            return None;
        }
        let s = sub(&s0, &mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    let c = r1[0].clone();
    let mut out: RatPoly = s1.iter().map(|x| x / &c).collect();
    out = rem(&out, m);
    Some(out)
}

/// Sturm sequence of `p`: p, p', then negated remainders.
pub(crate) fn sturm_sequence(p: &[Rational]) -> Vec<RatPoly> {
    let mut seq = vec![p.to_vec(), derivative(p)];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.iter().map(|c| -c).collect());
    }
    seq
}

fn variations(seq: &[RatPoly], x: &Rational) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| {
            let v = eval(p, x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .filter(|s| *s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the half-open interval `(lo, hi]`.
pub(crate) fn count_roots(seq: &[RatPoly], lo: &Rational, hi: &Rational) -> usize {
    variations(seq, lo).saturating_sub(variations(seq, hi))
}

/// Cauchy bound: every real root has absolute value below the result.
pub(crate) fn root_bound(p: &[BigInt]) -> BigInt {
    let lead = p.last().expect("nonzero polynomial").abs();
    let max = p[..p.len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    // 1 + max|c_k| / |c_d|, rounded up.
    BigInt::one() + num_integer::Integer::div_ceil(&max, &lead) + BigInt::one()
}

/// Rational roots of an integer polynomial by the rational root theorem.
pub(crate) fn has_rational_root(p: &[BigInt]) -> bool {
    if p.is_empty() {
        return true;
    }
    if p[0].is_zero() {
        return true;
    }
    let lead = p.last().unwrap().abs();
    let constant = p[0].abs();
    let num_divs = divisors(&constant);
    let den_divs = divisors(&lead);
    for n in &num_divs {
        for d in &den_divs {
            for s in [1, -1] {
                let x = Rational::new(n * BigInt::from(s), d.clone());
                if sign_int_at(p, &x) == 0 {
                    return true;
                }
            }
        }
    }
    false
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = BigInt::one();
    while &k * &k <= *n {
        if (n % &k).is_zero() {
            let other = n / &k;
            if other != k {
                large.push(other);
            }
            small.push(k.clone());
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
