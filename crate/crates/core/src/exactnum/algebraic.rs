use super::interval::Interval;
use super::poly::{self, RatPoly};
use super::{parse_rational, ExactError, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Mutex;

/// How irreducibility of the minimal polynomial was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    /// Degree ≤ 3 with no rational root.
    Verified,
    /// Degree ≥ 4: accepted on the caller's word.
    Asserted,
}

/// A real root of an integer polynomial, pinned by an isolating interval.
///
/// The isolating interval is the published identity of the number. A separate
/// working interval, always a subinterval of it, is tightened on demand by
/// sign and floor queries from [`FieldElement`](super::FieldElement)s; it is a
/// cache and never changes which root is meant.
pub struct AlgebraicReal {
    minpoly: Vec<BigInt>,
    interval: Interval,
    irreducibility: Irreducibility,
    sign_at_lo: i32,
    working: Mutex<Interval>,
}

impl Clone for AlgebraicReal {
    fn clone(&self) -> Self {
        Self {
            minpoly: self.minpoly.clone(),
            interval: self.interval.clone(),
            irreducibility: self.irreducibility,
            sign_at_lo: self.sign_at_lo,
            working: Mutex::new(self.working_interval()),
        }
    }
}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraicReal")
            .field("minpoly", &self.minpoly_string())
            .field("interval", &self.interval.to_string())
            .finish()
    }
}

impl AlgebraicReal {
    /// Validates that `(lo, hi)` isolates exactly one root of `minpoly`
    /// (coefficients lowest degree first) and, for degree ≤ 3, that the
    /// polynomial has no rational root.
    pub fn new(minpoly: Vec<BigInt>, lo: Rational, hi: Rational) -> Result<Self, ExactError> {
        let mut minpoly = minpoly;
        while minpoly.last().is_some_and(Zero::is_zero) {
            minpoly.pop();
        }
        if minpoly.len() < 2 {
            return Err(ExactError::InvalidPolynomial(
                "minimal polynomial must have degree at least 1".into(),
            ));
        }
        if lo >= hi {
            return Err(ExactError::InvalidPolynomial(format!(
                "empty isolating interval ({lo}, {hi})"
            )));
        }
        let degree = minpoly.len() - 1;
        let irreducibility = match degree {
            1 => Irreducibility::Verified,
            2 | 3 => {
                if poly::has_rational_root(&minpoly) {
                    return Err(ExactError::Reducible);
                }
                Irreducibility::Verified
            }
            _ => Irreducibility::Asserted,
        };
        let sign_at_lo = poly::sign_int_at(&minpoly, &lo);
        if sign_at_lo == 0 {
            return Err(ExactError::RootAtEndpoint(lo.to_string()));
        }
        if poly::sign_int_at(&minpoly, &hi) == 0 {
            return Err(ExactError::RootAtEndpoint(hi.to_string()));
        }
        let sturm = poly::sturm_sequence(&poly::from_int(&minpoly));
        let roots = poly::count_roots(&sturm, &lo, &hi);
        if roots != 1 {
            return Err(ExactError::NotIsolating {
                lo: lo.to_string(),
                hi: hi.to_string(),
                roots,
            });
        }
        let interval = Interval::new(lo, hi);
        Ok(Self {
            minpoly,
            working: Mutex::new(interval.clone()),
            interval,
            irreducibility,
            sign_at_lo,
        })
    }

    /// The field `Q` itself, presented as `Q(0)` with minimal polynomial `x`.
    pub fn rationals() -> Self {
        Self::new(
            vec![BigInt::zero(), BigInt::one()],
            Rational::from_integer((-1).into()),
            Rational::from_integer(1.into()),
        )
        .expect("x has the single root 0 in (-1, 1)")
    }

    /// Isolates every real root of `minpoly`, in increasing order.
    pub fn real_roots(minpoly: &[BigInt]) -> Result<Vec<Self>, ExactError> {
        let mut p = minpoly.to_vec();
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        if p.len() < 2 {
            return Err(ExactError::InvalidPolynomial("constant polynomial".into()));
        }
        let sturm = poly::sturm_sequence(&poly::from_int(&p));
        let bound = Rational::from_integer(poly::root_bound(&p));
        let mut pending = vec![Interval::new(-bound.clone(), bound)];
        let mut isolated = Vec::new();
        while let Some(iv) = pending.pop() {
            match poly::count_roots(&sturm, &iv.lo, &iv.hi) {
                0 => {}
                1 if poly::sign_int_at(&p, &iv.hi) != 0 => isolated.push(iv),
                _ => {
                    let mid = iv.midpoint();
                    // Nudge the split point off a root so endpoints stay nonzero.
                    let mut split = mid.clone();
                    let mut k = 3u32;
                    while poly::sign_int_at(&p, &split) == 0 {
                        split = &iv.lo + iv.width() * Rational::new(BigInt::one(), BigInt::from(k));
                        k += 1;
                    }
                    pending.push(Interval::new(iv.lo.clone(), split.clone()));
                    pending.push(Interval::new(split, iv.hi.clone()));
                }
            }
        }
        isolated.sort_by(|a, b| a.lo.cmp(&b.lo));
        isolated
            .into_iter()
            .map(|iv| Self::new(p.clone(), iv.lo, iv.hi))
            .collect()
    }

    /// Integer coefficients, lowest degree first.
    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    /// A new `AlgebraicReal` for the same root whose isolating interval has
    /// width at most `width_bound`.
    pub fn refine(&self, width_bound: &Rational) -> AlgebraicReal {
        assert!(width_bound.is_positive(), "width bound must be positive");
        let mut iv = self.interval.clone();
        while &iv.width() > width_bound {
            iv = self.bisect(&iv);
        }
        AlgebraicReal {
            minpoly: self.minpoly.clone(),
            working: Mutex::new(iv.clone()),
            interval: iv,
            irreducibility: self.irreducibility,
            sign_at_lo: self.sign_at_lo,
        }
    }

    /// Whether `self` and `other` denote the same real number.
    pub fn same_root(&self, other: &AlgebraicReal) -> bool {
        if self.minpoly != other.minpoly {
            return false;
        }
        let lo = (&self.interval.lo).max(&other.interval.lo).clone();
        let hi = (&self.interval.hi).min(&other.interval.hi).clone();
        if lo >= hi {
            return false;
        }
        let sturm = poly::sturm_sequence(&poly::from_int(&self.minpoly));
        // Endpoints of either interval are never roots, so (lo, hi] counts are exact.
        poly::count_roots(&sturm, &lo, &hi) == 1
    }

    pub(crate) fn working_interval(&self) -> Interval {
        self.working.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Halves the working interval `steps` times.
    pub(crate) fn tighten(&self, steps: usize) -> Interval {
        let mut guard = self.working.lock().unwrap_or_else(|e| e.into_inner());
        let mut iv = guard.clone();
        for _ in 0..steps {
            iv = self.bisect(&iv);
        }
        *guard = iv.clone();
        iv
    }

    fn bisect(&self, iv: &Interval) -> Interval {
        let mid = iv.midpoint();
        let s = poly::sign_int_at(&self.minpoly, &mid);
        if s == 0 {
            // Only possible for a rational root; shrink symmetrically around it.
            let quarter = iv.width() / Rational::from_integer(4.into());
            return Interval::new(&mid - &quarter, &mid + quarter);
        }
        // Left of the root the sign always equals the sign at the original lo.
        if s == self.sign_at_lo {
            Interval::new(mid, iv.hi.clone())
        } else {
            Interval::new(iv.lo.clone(), mid)
        }
    }

    pub(crate) fn minpoly_rat(&self) -> RatPoly {
        poly::from_int(&self.minpoly)
    }

    fn minpoly_string(&self) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.minpoly.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let var = match k {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{k}"),
            };
            terms.push(if var.is_empty() {
                c.to_string()
            } else if c.is_one() {
                var
            } else if *c == -BigInt::one() {
                format!("-{var}")
            } else {
                format!("{c}{var}")
            });
        }
        terms.join(" + ").replace("+ -", "- ")
    }

    pub fn to_json(&self) -> AlgebraicRealJson {
        AlgebraicRealJson {
            minpoly: self.minpoly.iter().map(ToString::to_string).collect(),
            interval: [self.interval.lo.to_string(), self.interval.hi.to_string()],
        }
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root of {} in {}", self.minpoly_string(), self.interval)
    }
}

/// Wire form: `{"minpoly": ["c0", …, "cd"], "interval": ["lo", "hi"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicRealJson {
    pub minpoly: Vec<String>,
    pub interval: [String; 2],
}

impl TryFrom<&AlgebraicRealJson> for AlgebraicReal {
    type Error = ExactError;

    fn try_from(j: &AlgebraicRealJson) -> Result<Self, ExactError> {
        let minpoly = j
            .minpoly
            .iter()
            .map(|s| {
                s.trim().parse::<BigInt>().map_err(|_| ExactError::Parse {
                    what: "integer coefficient",
                    input: s.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let lo = parse_rational(&j.interval[0])?;
        let hi = parse_rational(&j.interval[1])?;
        AlgebraicReal::new(minpoly, lo, hi)
    }
}
