//! Integer Laurent polynomials Z[v, v^-1].
//!
//! `IntLaurent` is a finitely supported map exponent -> coefficient with
//! arbitrary-precision integer coefficients.  Zero coefficients are never
//! stored, so structural equality is semantic equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::Sign;
use num::{BigInt, Integer, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A Laurent polynomial with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntLaurent {
    /// Exponent -> nonzero coefficient.
    coeffs: BTreeMap<i64, BigInt>,
}

impl IntLaurent {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    /// The single term `coeff * v^exp`.
    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        let coeff = coeff.into();
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        Self { coeffs }
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, summing repeats.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c.into());
        }
        out
    }

    /// Adds `coeff * v^exp` in place.
    pub fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coefficient(0).is_one()
    }

    /// The coefficient of `v^exp` (zero when absent).
    pub fn coefficient(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Iterates over (exponent, coefficient) pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Smallest exponent with nonzero coefficient; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Largest exponent with nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Coefficient of the largest exponent (zero polynomial -> 0).
    pub fn leading_coefficient(&self) -> BigInt {
        self.degree().map(|d| self.coefficient(d)).unwrap_or_else(BigInt::zero)
    }

    /// Multiplies by `v^k`.
    pub fn shifted(&self, k: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect();
        Self { coeffs }
    }

    /// Substitutes v -> v^-1 (the bar involution on the coefficient ring).
    pub fn bar(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect();
        Self { coeffs }
    }

    /// Substitutes v -> -v (the heart involution on the coefficient ring).
    pub fn heart(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (*e, if e.rem_euclid(2) == 1 { -c.clone() } else { c.clone() }))
            .collect();
        Self { coeffs }
    }

    /// True when every exponent is even, i.e. the polynomial lies in Z[v^2, v^-2].
    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|e| e % 2 == 0)
    }

    /// True when every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// `self^k` for k >= 0.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Evaluates at v = 1 (sum of coefficients).
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// Positive gcd of all coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by the content (zero stays zero).
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e, c / &g)).collect();
        Self { coeffs }
    }

    /// Multiplies every coefficient by an integer.
    pub fn scaled(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e, c * k)).collect();
        Self { coeffs }
    }

    /// Dense coefficient vector `[c_val, c_{val+1}, ..., c_deg]`; empty for zero.
    pub fn dense(&self) -> (i64, Vec<BigInt>) {
        match (self.valuation(), self.degree()) {
            (Some(v), Some(d)) => {
                let mut out = vec![BigInt::zero(); (d - v + 1) as usize];
                for (e, c) in &self.coeffs {
                    out[(e - v) as usize] = c.clone();
                }
                (v, out)
            }
            _ => (0, Vec::new()),
        }
    }

    /// Rebuilds from a dense vector starting at exponent `val`.
    pub fn from_dense(val: i64, coeffs: &[BigInt]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, c)| (val + i as i64, c.clone())))
    }

    /// Exact division: returns `self / d` when the division leaves no remainder.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (nv, num) = self.dense();
        let (dv, den) = d.dense();
        let q = dense_div_exact(&num, &den)?;
        Some(Self::from_dense(nv - dv, &q))
    }

    /// Gcd in Z[v, v^-1], normalised to valuation 0, primitive up to integer
    /// content gcd, and positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return normalise_gcd(other);
        }
        if other.is_zero() {
            return normalise_gcd(self);
        }
        let (_, a) = self.dense();
        let (_, b) = other.dense();
        let content = self.content().gcd(&other.content());
        let prim = dense_gcd_primitive(&a, &b);
        let g = Self::from_dense(0, &prim).scaled(&content);
        normalise_gcd(&g)
    }
}

/// Shifts to valuation 0 and fixes the sign of the leading coefficient.
fn normalise_gcd(p: &IntLaurent) -> IntLaurent {
    if p.is_zero() {
        return IntLaurent::zero();
    }
    let mut q = p.shifted(-p.valuation().unwrap());
    if q.leading_coefficient().is_negative() {
        q = -&q;
    }
    q
}

/// Primitive gcd of two dense polynomials over Z via the primitive PRS.
fn dense_gcd_primitive(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r0 = primitive_dense(trim(a.to_vec()));
    let mut r1 = primitive_dense(trim(b.to_vec()));
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    while !r1.is_empty() {
        let r2 = pseudo_rem(&r0, &r1);
        r0 = r1;
        r1 = primitive_dense(trim(r2));
    }
    if let Some(lead) = r0.last() {
        if lead.is_negative() {
            for c in &mut r0 {
                *c = -std::mem::take(c);
            }
        }
    }
    if r0.is_empty() {
        vec![BigInt::one()]
    } else {
        r0
    }
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn primitive_dense(p: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in &p {
        g = g.gcd(c);
        if g.is_one() {
            return p;
        }
    }
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder of a by b (b nonzero), as in the primitive PRS.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_b = b.last().unwrap().clone();
    while trim(r.clone()).len() > db {
        r = trim(r);
        let dr = r.len() - 1;
        let lead_r = r.last().unwrap().clone();
        // r <- lead_b * r - lead_r * v^(dr-db) * b
        for c in &mut r {
            *c = &*c * &lead_b;
        }
        for (i, bc) in b.iter().enumerate() {
            r[dr - db + i] -= &lead_r * bc;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Exact dense division; `None` when the remainder is nonzero or a leading
/// coefficient fails to divide.
fn dense_div_exact(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    let num = trim(num.to_vec());
    let den = trim(den.to_vec());
    if den.is_empty() {
        return None;
    }
    if num.is_empty() {
        return Some(Vec::new());
    }
    if num.len() < den.len() {
        return None;
    }
    let mut rem = num;
    let mut quot = vec![BigInt::zero(); rem.len() - den.len() + 1];
    let lead = den.last().unwrap();
    for k in (0..quot.len()).rev() {
        let top = rem[k + den.len() - 1].clone();
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        for (i, dc) in den.iter().enumerate() {
            rem[k + i] -= &q * dc;
        }
        quot[k] = q;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(trim(quot))
}

impl Add for &IntLaurent {
    type Output = IntLaurent;
    fn add(self, rhs: &IntLaurent) -> IntLaurent {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &IntLaurent {
    type Output = IntLaurent;
    fn sub(self, rhs: &IntLaurent) -> IntLaurent {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &IntLaurent {
    type Output = IntLaurent;
    fn neg(self) -> IntLaurent {
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect();
        IntLaurent { coeffs }
    }
}

impl Mul for &IntLaurent {
    type Output = IntLaurent;
    fn mul(self, rhs: &IntLaurent) -> IntLaurent {
        let mut out = IntLaurent::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl From<i64> for IntLaurent {
    fn from(n: i64) -> Self {
        Self::monomial(n, 0)
    }
}

impl fmt::Display for IntLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let (sign, mag) = (c.sign(), c.magnitude());
            if first {
                if sign == Sign::Minus {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign == Sign::Minus {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || *e == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "{}v", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}v^{}", if show_coeff { "*" } else { "" }, e)?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntLaurent {
    /// Serialises as `[[exp, "coeff"], ...]` in ascending exponent order with
    /// decimal-string coefficients.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(i64, String)> = self.terms().map(|(e, c)| (e, c.to_string())).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntLaurent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<(i64, String)> = Vec::deserialize(d)?;
        let mut out = IntLaurent::zero();
        for (e, c) in pairs {
            let coeff: BigInt = c
                .parse()
                .map_err(|_| D::Error::custom(format!("bad integer coefficient {c:?}")))?;
            out.add_term(e, coeff);
        }
        Ok(out)
    }
}
