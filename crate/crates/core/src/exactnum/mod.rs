//! Exact arithmetic: rationals, real algebraic numbers pinned by isolating
//! intervals, and elements of the real number field they generate.

mod algebraic;
mod field;
mod interval;
pub(crate) mod poly;

pub use algebraic::{AlgebraicReal, AlgebraicRealJson, Irreducibility};
pub use field::{FieldElement, FieldElementJson};
pub use interval::Interval;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("operands belong to different number fields")]
    GeneratorMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("interval ({lo}, {hi}) contains {roots} real roots, expected exactly one")]
    NotIsolating { lo: String, hi: String, roots: usize },
    #[error("polynomial vanishes at interval endpoint {0}")]
    RootAtEndpoint(String),
    #[error("polynomial has a rational root, so it is not irreducible")]
    Reducible,
    #[error("expected {expected} coordinates, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-1.25"` / `"1e-30"`.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let err = || ExactError::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(t).ok_or_else(err)
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().ok()?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let scale = exp - frac_part.len() as i64 - 1;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(digits);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -value } else { value })
}

/// Exact `p/q` rendering (integers print without a denominator).
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

/// Floor of a rational with floor semantics on negatives.
pub fn floor_rational(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Decimal rendering of a rational truncated toward zero to `digits`
/// fractional digits.
pub fn to_decimal(x: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (x.abs() * Rational::from_integer(scale.clone())).to_integer();
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let sign = if x.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
}

/// `10^-k` as a rational.
pub fn pow10_inv(k: usize) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), k))
}
