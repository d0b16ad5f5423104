use super::algebraic::AlgebraicReal;
use super::interval::Interval;
use super::poly::{self, RatPoly};
use super::{floor_rational, parse_rational, ExactError, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// An element `c_0 + c_1 θ + … + c_{d-1} θ^{d-1}` of the real field `Q(θ)`.
///
/// Coordinates are always reduced modulo the minimal polynomial of `θ`, so
/// equality of elements is equality of coordinate vectors.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<AlgebraicReal>,
    coords: Vec<Rational>,
}

impl FieldElement {
    pub fn new(field: Arc<AlgebraicReal>, coords: Vec<Rational>) -> Result<Self, ExactError> {
        let d = field.degree();
        if coords.len() != d {
            return Err(ExactError::WrongDegree {
                expected: d,
                got: coords.len(),
            });
        }
        Ok(Self { field, coords })
    }

    pub fn from_rational(field: Arc<AlgebraicReal>, value: Rational) -> Self {
        let mut coords = vec![Rational::zero(); field.degree()];
        coords[0] = value;
        Self { field, coords }
    }

    pub fn from_integer(field: Arc<AlgebraicReal>, value: impl Into<BigInt>) -> Self {
        Self::from_rational(field, Rational::from_integer(value.into()))
    }

    pub fn zero(field: Arc<AlgebraicReal>) -> Self {
        Self::from_rational(field, Rational::zero())
    }

    pub fn one(field: Arc<AlgebraicReal>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    /// The generator `θ` itself.
    pub fn generator(field: Arc<AlgebraicReal>) -> Self {
        if field.degree() == 1 {
            // Root of c_1 x + c_0.
            let p = field.minpoly();
            let root = Rational::new(-p[0].clone(), p[1].clone());
            return Self::from_rational(field, root);
        }
        let mut coords = vec![Rational::zero(); field.degree()];
        coords[1] = Rational::one();
        Self { field, coords }
    }

    /// Builds the element with the given polynomial in `θ`, reducing it
    /// modulo the minimal polynomial.
    pub fn from_poly(field: Arc<AlgebraicReal>, coeffs: &[Rational]) -> Self {
        let reduced = if field.degree() == 1 {
            // Substitute the rational root.
            let p = field.minpoly();
            let root = Rational::new(-p[0].clone(), p[1].clone());
            vec![poly::eval(coeffs, &root)]
        } else {
            poly::rem(coeffs, &field.minpoly_rat())
        };
        Self::from_reduced(field, reduced)
    }

    fn from_reduced(field: Arc<AlgebraicReal>, mut reduced: RatPoly) -> Self {
        reduced.resize(field.degree(), Rational::zero());
        Self {
            field,
            coords: reduced,
        }
    }

    pub fn field(&self) -> &Arc<AlgebraicReal> {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then(|| &self.coords[0])
    }

    pub fn same_field(&self, other: &FieldElement) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || self.field.same_root(&other.field)
    }

    fn check_field(&self, other: &FieldElement) -> Result<(), ExactError> {
        if self.same_field(other) {
            Ok(())
        } else {
            Err(ExactError::GeneratorMismatch)
        }
    }

    fn trimmed(&self) -> RatPoly {
        let mut p = self.coords.clone();
        poly::trim(&mut p);
        p
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, ExactError> {
        self.check_field(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            field: self.field.clone(),
            coords,
        })
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, ExactError> {
        self.check_field(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            field: self.field.clone(),
            coords,
        })
    }

    /// Polynomial product reduced modulo the minimal polynomial.
    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, ExactError> {
        self.check_field(other)?;
        let product = poly::mul(&self.trimmed(), &other.trimmed());
        Ok(Self::from_poly(self.field.clone(), &product))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm modulo
    /// the minimal polynomial.
    pub fn inv(&self) -> Result<FieldElement, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.field.clone(), r.recip()));
        }
        let inv = poly::inverse_mod(&self.trimmed(), &self.field.minpoly_rat())
            // An irreducible modulus is coprime to every nonzero residue.
            .ok_or(ExactError::DivisionByZero)?;
        Ok(Self::from_reduced(self.field.clone(), inv))
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement, ExactError> {
        self.check_field(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn scale(&self, c: &Rational) -> FieldElement {
        Self {
            field: self.field.clone(),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_rational(&self, c: &Rational) -> FieldElement {
        let mut coords = self.coords.clone();
        coords[0] += c;
        Self {
            field: self.field.clone(),
            coords,
        }
    }

    /// Encloses the value using the generator's current working interval.
    fn enclose_now(&self) -> Interval {
        self.field.working_interval().eval_poly(&self.coords)
    }

    /// Runs `decide` on ever tighter enclosures of the value until it
    /// returns an answer. Each failure doubles the number of bisections.
    fn refine_until<T>(&self, mut decide: impl FnMut(&Interval) -> Option<T>) -> T {
        if let Some(t) = decide(&self.enclose_now()) {
            return t;
        }
        let mut steps = 16;
        loop {
            let iv = self.field.tighten(steps);
            if let Some(t) = decide(&iv.eval_poly(&self.coords)) {
                return t;
            }
            steps = (steps * 2).min(1 << 16);
        }
    }

    /// Exact sign: zero is detected on coordinates, everything else by
    /// refining until the value enclosure excludes zero.
    pub fn sign(&self) -> i32 {
        if let Some(r) = self.as_rational() {
            return if r.is_zero() {
                0
            } else if r.is_positive() {
                1
            } else {
                -1
            };
        }
        self.refine_until(|enc| {
            if enc.lo.is_positive() {
                Some(1)
            } else if enc.hi.is_negative() {
                Some(-1)
            } else {
                None
            }
        })
    }

    /// The unique integer `k` with `k ≤ self < k + 1`.
    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return floor_rational(r);
        }
        // Irrational, so the value is never an integer and the loop ends.
        self.refine_until(|enc| {
            let k = floor_rational(&enc.lo);
            (floor_rational(&enc.hi) == k).then_some(k)
        })
    }

    /// A rational interval containing the value, of width at most `width`.
    pub fn enclosure(&self, width: &Rational) -> Interval {
        if let Some(r) = self.as_rational() {
            return Interval::point(r.clone());
        }
        self.refine_until(|enc| (&enc.width() <= width).then(|| enc.clone()))
    }

    pub fn compare(&self, other: &FieldElement) -> Result<Ordering, ExactError> {
        Ok(match self.try_sub(other)?.sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    pub fn abs(&self) -> FieldElement {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_json(&self) -> FieldElementJson {
        FieldElementJson {
            coords: self.coords.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn from_json(field: Arc<AlgebraicReal>, j: &FieldElementJson) -> Result<Self, ExactError> {
        let coords = j
            .coords
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, coords)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.same_field(other)
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match k {
                0 => c.to_string(),
                1 => format!("({c})θ"),
                _ => format!("({c})θ^{k}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        -&self
    }
}

// Operator forms panic on mismatched fields; use the `try_` methods when the
// operands come from untrusted input.
impl Add for &FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field mismatch in addition")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;

    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch in subtraction")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;

    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch in multiplication")
    }
}

/// Wire form: `{"coords": ["p/q", …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldElementJson {
    pub coords: Vec<String>,
}
