//! Rational functions Q(v) as canonical quotients of integer Laurent polynomials.
//!
//! Every value is kept in a canonical form, so `==` is exact semantic equality:
//! * numerator and denominator have no common factor in Z[v] (integer content
//!   included),
//! * all powers of v are carried by the numerator: the denominator is an honest
//!   polynomial with nonzero constant term,
//! * the denominator's leading coefficient is positive.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::laurent::IntLaurent;

/// An element of Q(v) in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RatFunc {
    num: IntLaurent,
    den: IntLaurent,
}

impl RatFunc {
    /// Builds `num / den`, normalising to canonical form.
    ///
    /// # Panics
    ///
    /// Panics when `den` is zero; use [`RatFunc::try_new`] to handle that case.
    pub fn new(num: IntLaurent, den: IntLaurent) -> Self {
        Self::try_new(num, den).expect("denominator must be nonzero")
    }

    /// Builds `num / den`, reporting division by zero as an error.
    pub fn try_new(num: IntLaurent, den: IntLaurent) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self { num: IntLaurent::zero(), den: IntLaurent::one() });
        }
        let sn = num.valuation().unwrap();
        let sd = den.valuation().unwrap();
        let mut a = num.shifted(-sn);
        let mut b = den.shifted(-sd);
        let g = a.gcd(&b);
        if !g.is_one() {
            a = a.div_exact(&g).expect("gcd divides");
            b = b.div_exact(&g).expect("gcd divides");
        }
        if b.leading_coefficient().is_negative() {
            a = -&a;
            b = -&b;
        }
        Ok(Self { num: a.shifted(sn - sd), den: b })
    }

    pub fn zero() -> Self {
        Self { num: IntLaurent::zero(), den: IntLaurent::one() }
    }

    pub fn one() -> Self {
        Self { num: IntLaurent::one(), den: IntLaurent::one() }
    }

    /// The monomial `c * v^k`.
    pub fn monomial(c: impl Into<BigInt>, k: i64) -> Self {
        Self { num: IntLaurent::monomial(c, k), den: IntLaurent::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Canonical numerator.
    pub fn numerator(&self) -> &IntLaurent {
        &self.num
    }

    /// Canonical denominator.
    pub fn denominator(&self) -> &IntLaurent {
        &self.den
    }

    /// When the value lies in Z[v, v^-1], returns it as a Laurent polynomial.
    pub fn as_laurent(&self) -> Option<&IntLaurent> {
        self.den.is_one().then_some(&self.num)
    }

    /// Multiplicative inverse.
    pub fn inverse(&self) -> Result<Self> {
        Self::try_new(self.den.clone(), self.num.clone())
    }

    /// `self^k`, with negative `k` inverting first.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// The bar involution f(v) -> f(v^-1).
    pub fn bar(&self) -> Self {
        Self::new(self.num.bar(), self.den.bar())
    }

    /// The heart involution f(v) -> f(-v).
    pub fn heart(&self) -> Self {
        Self::new(self.num.heart(), self.den.heart())
    }

    /// Order of vanishing at v = 0 (negative for a pole); `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.num.valuation()
    }

    /// Sign of the lowest-order coefficient of the expansion at v = 0;
    /// 0 for the zero function.
    pub fn lowest_term_sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let n = self.num.coefficient(self.num.valuation().unwrap());
        let d = self.den.coefficient(0);
        if n.is_negative() == d.is_negative() {
            1
        } else {
            -1
        }
    }

    /// A cheap size measure used for pivot selection during elimination.
    pub fn complexity(&self) -> u64 {
        let span = |p: &IntLaurent| match (p.valuation(), p.degree()) {
            (Some(v), Some(d)) => (d - v) as u64 + p.term_count() as u64,
            _ => 0,
        };
        span(&self.num) + span(&self.den)
    }
}

impl From<IntLaurent> for RatFunc {
    fn from(p: IntLaurent) -> Self {
        Self { num: p, den: IntLaurent::one() }
    }
}

impl From<i64> for RatFunc {
    fn from(n: i64) -> Self {
        Self::monomial(n, 0)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        // Cross-reduce before the final normalisation to keep products small.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        RatFunc::new(&n1 * &n2, &d1 * &d2)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by zero rational function");
        self * &RatFunc::new(rhs.den.clone(), rhs.num.clone())
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.term_count() <= 1 {
            write!(f, "{}/({})", self.num, self.den)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: IntLaurent,
            den: IntLaurent,
        }
        let raw = Raw::deserialize(d)?;
        RatFunc::try_new(raw.num, raw.den)
            .map_err(|e| serde::de::Error::custom(format!("invalid rational function: {e}")))
    }
}
