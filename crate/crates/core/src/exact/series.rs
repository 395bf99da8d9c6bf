//! Laurent expansions at v = 0 and exact membership tests for series rings.

use num::{BigRational, One, Signed, Zero};

use crate::exact::RatFunc;

/// A finite window of the Laurent expansion of a rational function at v = 0.
///
/// `coeffs[k]` is the coefficient of `v^(valuation + k)`; the window covers
/// exponents `valuation ..= order`.  The zero function has an empty window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesView {
    pub valuation: i64,
    pub order: i64,
    pub coeffs: Vec<BigRational>,
}

impl SeriesView {
    /// Coefficient of `v^exp`; `None` beyond the computed order.
    pub fn coefficient(&self, exp: i64) -> Option<BigRational> {
        if exp > self.order {
            return None;
        }
        if exp < self.valuation {
            return Some(BigRational::zero());
        }
        Some(self.coeffs[(exp - self.valuation) as usize].clone())
    }

    /// True when every computed coefficient is a nonnegative integer.
    pub fn is_nonnegative_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && !c.is_negative())
    }
}

/// Expands `f` as a Laurent series at v = 0 through exponent `order`.
///
/// The expansion of a nonzero `f = v^s * a(v)/b(v)` (with `a(0), b(0) != 0`)
/// starts exactly at exponent `s`, so the reported valuation is exact.
pub fn expand_at_0(f: &RatFunc, order: i64) -> SeriesView {
    if f.is_zero() {
        return SeriesView { valuation: 0, order, coeffs: Vec::new() };
    }
    let val = f.valuation().expect("nonzero");
    if order < val {
        return SeriesView { valuation: val, order, coeffs: Vec::new() };
    }
    let (_, num) = f.numerator().shifted(-val).dense();
    let (_, den) = f.denominator().dense();
    let b0 = BigRational::from(den[0].clone());
    let len = (order - val + 1) as usize;
    let mut coeffs = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = if n < num.len() {
            BigRational::from(num[n].clone())
        } else {
            BigRational::zero()
        };
        for j in 1..den.len().min(n + 1) {
            acc -= BigRational::from(den[j].clone()) * &coeffs[n - j];
        }
        coeffs.push(acc / &b0);
    }
    SeriesView { valuation: val, order, coeffs }
}

/// Exact test for membership in Z[[v]].
///
/// For a canonical `f = v^s * p/q` with `p, q` coprime over Z[v], the
/// expansion has integer coefficients if and only if `s >= 0` and the constant
/// term of `q` is a unit.  (One direction is immediate; the other is Fatou's
/// lemma on rational power series.)
pub fn in_z_series(f: &RatFunc) -> bool {
    f.is_zero() || (f.valuation().unwrap() >= 0 && f.denominator().coefficient(0).abs().is_one())
}

/// Exact test for membership in v*Z[[v]].
pub fn in_v_z_series(f: &RatFunc) -> bool {
    f.is_zero() || (f.valuation().unwrap() >= 1 && f.denominator().coefficient(0).abs().is_one())
}

/// Exact test for membership in 1 + v*Z[[v]].
pub fn in_one_plus_v_z(f: &RatFunc) -> bool {
    in_v_z_series(&(f - &RatFunc::one()))
}

/// Exact test for membership in Q(v^2): fixed by the heart involution.
pub fn in_q_of_v_squared(f: &RatFunc) -> bool {
    f.heart() == *f
}

/// Renders a series window as `[[exp, "p/q"], ...]` for JSON output.
pub fn series_pairs(s: &SeriesView) -> Vec<(i64, String)> {
    s.coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (s.valuation + k as i64, c.to_string()))
        .collect()
}
