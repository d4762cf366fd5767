//! Exact rationals and the truncated series ring `Q[q1,q2][[q3]]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("series truncations differ: {0} vs {1}")]
    MismatchedTruncation(u32, u32),
    #[error("q3 exponent {e3} exceeds truncation c_max={c_max}; the coefficient is not known")]
    TruncationExceeded { e3: u32, c_max: u32 },
}

/// `q1^e1 q2^e2 q3^e3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct QMonomial {
    pub e1: u32,
    pub e2: u32,
    pub e3: u32,
}

impl QMonomial {
    pub const ONE: QMonomial = QMonomial { e1: 0, e2: 0, e3: 0 };

    pub const fn new(e1: u32, e2: u32, e3: u32) -> Self {
        QMonomial { e1, e2, e3 }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    pub fn mul(&self, o: &QMonomial) -> QMonomial {
        QMonomial::new(self.e1 + o.e1, self.e2 + o.e2, self.e3 + o.e3)
    }

    /// Exchanges `q1` and `q2`.
    pub fn swap12(&self) -> QMonomial {
        QMonomial::new(self.e2, self.e1, self.e3)
    }

    /// Degree under `deg q1 = deg q2 = 2`, `deg q3 = 0`.
    pub fn degree(&self) -> u32 {
        2 * (self.e1 + self.e2)
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for (name, e) in [("q1", self.e1), ("q2", self.e2), ("q3", self.e3)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Element of `Q[q1,q2][[q3]]` with every `q3` exponent above `c_max` discarded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    terms: BTreeMap<QMonomial, Rational>,
    c_max: u32,
}

impl QSeries {
    pub fn zero(c_max: u32) -> Self {
        QSeries { terms: BTreeMap::new(), c_max }
    }

    pub fn one(c_max: u32) -> Self {
        Self::constant(Rational::one(), c_max)
    }

    pub fn constant(c: Rational, c_max: u32) -> Self {
        Self::monomial(QMonomial::ONE, c, c_max)
    }

    /// `c * m`, or zero if `m` lies beyond the truncation.
    pub fn monomial(m: QMonomial, c: Rational, c_max: u32) -> Self {
        let mut s = Self::zero(c_max);
        s.add_term(m, c);
        s
    }

    /// Builds a series from arbitrary terms, dropping zeros and truncated exponents.
    pub fn from_terms<I: IntoIterator<Item = (QMonomial, Rational)>>(it: I, c_max: u32) -> Self {
        let mut s = Self::zero(c_max);
        for (m, c) in it {
            s.add_term(m, c);
        }
        s
    }

    pub fn c_max(&self) -> u32 {
        self.c_max
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: QMonomial, c: Rational) {
        if m.e3 > self.c_max || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn coeff(&self, m: &QMonomial) -> Result<Rational, CoeffError> {
        if m.e3 > self.c_max {
            return Err(CoeffError::TruncationExceeded { e3: m.e3, c_max: self.c_max });
        }
        Ok(self.terms.get(m).cloned().unwrap_or_else(Rational::zero))
    }

    /// Constant term, i.e. the value at `q1 = q2 = q3 = 0`.
    pub fn at_zero(&self) -> Rational {
        self.terms.get(&QMonomial::ONE).cloned().unwrap_or_else(Rational::zero)
    }

    fn check(&self, o: &QSeries) -> Result<(), CoeffError> {
        if self.c_max != o.c_max {
            return Err(CoeffError::MismatchedTruncation(self.c_max, o.c_max));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &QSeries) -> Result<QSeries, CoeffError> {
        self.check(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &QSeries) -> Result<QSeries, CoeffError> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &QSeries) -> Result<QSeries, CoeffError> {
        self.check(o)?;
        let mut out = QSeries::zero(self.c_max);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> QSeries {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, k: &Rational) -> QSeries {
        if k.is_zero() {
            return QSeries::zero(self.c_max);
        }
        QSeries {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
            c_max: self.c_max,
        }
    }

    /// Re-truncates at `c_max`, which may be lower or higher than the current bound.
    pub fn truncate(&self, c_max: u32) -> QSeries {
        QSeries::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone())), c_max)
    }

    pub fn swap12(&self) -> QSeries {
        QSeries::from_terms(self.terms.iter().map(|(m, c)| (m.swap12(), c.clone())), self.c_max)
    }
}

macro_rules! series_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&QSeries> for &QSeries {
            type Output = QSeries;
            /// Panics if the truncations differ; use the `try_` form to recover.
            fn $method(self, o: &QSeries) -> QSeries {
                self.$checked(o).expect("series truncations must agree")
            }
        }
    };
}

series_op!(Add, add, try_add);
series_op!(Sub, sub, try_sub);
series_op!(Mul, mul, try_mul);

/// Writes `c` as a leading coefficient: `1` is dropped, `-1` becomes `-`.
pub(crate) fn coeff_prefix(c: &Rational) -> String {
    if c.is_one() {
        String::new()
    } else if (-c).is_one() {
        "-".to_string()
    } else {
        format!("{c} ")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            let body = if m.is_one() {
                mag.to_string()
            } else if mag.is_one() {
                m.to_string()
            } else {
                format!("{mag} {m}")
            };
            match (n, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}
