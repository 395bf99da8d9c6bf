//! Exact dense linear algebra over `Q`, `Z[v, v^-1]`, and `Q(v)`.
//!
//! Three small toolkits, one per scalar domain:
//!
//! * rational matrices ([`num::BigRational`]) — rank, span membership, and
//!   nullspace bases for the hyperplane geometry;
//! * matrices over [`RatFunc`] — products, Gauss–Jordan inversion and
//!   multi-column solves for Gram manipulation and block elimination;
//! * fraction-free (Bareiss) echelon over [`IntLaurent`] — certified rank
//!   and first-independent-column detection without rational blowup.
//!
//! Everything here is exact; there is no pivot-magnitude numerics, only
//! complexity-based pivot selection to keep intermediate entries small.

use num::{BigRational, Zero};

use crate::exact::{IntLaurent, RatFunc};

/// Dense matrix over the rational-function field `Q(v)`.
pub type QMat = Vec<Vec<RatFunc>>;

/// Dense matrix over the rationals.
pub type RMat = Vec<Vec<BigRational>>;

// ---------------------------------------------------------------------------
// Rational matrices
// ---------------------------------------------------------------------------

/// Convert integer row vectors into a rational matrix.
pub fn rows_to_rational(rows: &[Vec<i64>]) -> RMat {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect()
}

/// Row-reduce `m` in place; returns the pivot column of each nonzero row.
fn rat_echelon(m: &mut RMat) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].clone();
        for x in &mut m[row] {
            *x /= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..cols {
                    let sub = &m[row][c] * &f;
                    m[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    pivots
}

/// Rank of a rational matrix.
pub fn rat_rank(m: &RMat) -> usize {
    let mut work = m.clone();
    rat_echelon(&mut work).len()
}

/// Whether `target` lies in the rational span of `vectors`.
pub fn rat_in_span(vectors: &[Vec<BigRational>], target: &[BigRational]) -> bool {
    if target.iter().all(|x| x.is_zero()) {
        return true;
    }
    let mut with: RMat = vectors.to_vec();
    with.push(target.to_vec());
    rat_rank(&vectors.to_vec()) == rat_rank(&with)
}

/// Basis of the right nullspace `{x : m x = 0}` of a rational matrix with
/// `cols` columns (free-variable vectors, one per non-pivot column).
pub fn rat_nullspace(m: &RMat, cols: usize) -> Vec<Vec<BigRational>> {
    let mut work = m.clone();
    let pivots = rat_echelon(&mut work);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut x = vec![BigRational::zero(); cols];
        x[free] = BigRational::from_integer(1.into());
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = -work[row][free].clone();
        }
        basis.push(x);
    }
    basis
}

// ---------------------------------------------------------------------------
// Matrices over Q(v)
// ---------------------------------------------------------------------------

/// The `n x n` identity over `Q(v)`.
pub fn q_identity(n: usize) -> QMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() })
                .collect()
        })
        .collect()
}

/// The `rows x cols` zero matrix over `Q(v)`.
pub fn q_zero(rows: usize, cols: usize) -> QMat {
    vec![vec![RatFunc::zero(); cols]; rows]
}

/// Matrix transpose.
pub fn q_transpose(m: &QMat) -> QMat {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    (0..cols).map(|j| (0..rows).map(|i| m[i][j].clone()).collect()).collect()
}

/// Matrix product `a * b`.
pub fn q_mul(a: &QMat, b: &QMat) -> QMat {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    let mut out = q_zero(rows, cols);
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

/// Matrix–vector product `m * x`.
pub fn q_mat_vec(m: &QMat, x: &[RatFunc]) -> Vec<RatFunc> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(RatFunc::zero(), |acc, (a, b)| &acc + &(a * b))
        })
        .collect()
}

/// Row-vector–matrix product `x^T * m`.
pub fn q_vec_mat(x: &[RatFunc], m: &QMat) -> Vec<RatFunc> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    (0..cols)
        .map(|j| {
            x.iter()
                .zip(m)
                .filter(|(a, _)| !a.is_zero())
                .fold(RatFunc::zero(), |acc, (a, row)| &acc + &(a * &row[j]))
        })
        .collect()
}

/// Solve `a * X = b` for square `a` by Gauss–Jordan elimination, choosing at
/// each step the remaining pivot row of least [`RatFunc::complexity`].
/// Returns `None` when `a` is singular.
pub fn q_solve(a: &QMat, b: &QMat) -> Option<QMat> {
    let n = a.len();
    let mut aug: QMat = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).cloned().collect())
        .collect();
    let width = if n == 0 { 0 } else { aug[0].len() };
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !aug[r][col].is_zero())
            .min_by_key(|&r| (aug[r][col].complexity(), r))?;
        aug.swap(col, pivot);
        let inv = aug[col][col].inverse().ok()?;
        for x in &mut aug[col] {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..width {
                    let sub = &aug[col][c] * &f;
                    aug[r][c] = &aug[r][c] - &sub;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Inverse of a square matrix over `Q(v)`, or `None` when singular.
pub fn q_invert(a: &QMat) -> Option<QMat> {
    q_solve(a, &q_identity(a.len()))
}

/// Extract the submatrix with the given row and column indices.
pub fn q_submatrix(m: &QMat, rows: &[usize], cols: &[usize]) -> QMat {
    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect()
}

// ---------------------------------------------------------------------------
// Fraction-free echelon over Z[v, v^-1]
// ---------------------------------------------------------------------------

/// Clear denominators of a `Q(v)` matrix row by row: each row is scaled by a
/// common multiple of its denominators, which changes neither the row space
/// nor which columns are independent.
pub fn q_scale_rows(m: &QMat) -> Vec<Vec<IntLaurent>> {
    m.iter()
        .map(|row| {
            let mut common = IntLaurent::one();
            for x in row {
                let den = x.denominator();
                let g = common.gcd(den);
                if let Some(q) = den.div_exact(&g) {
                    common = &common * &q;
                }
            }
            row.iter()
                .map(|x| {
                    let q = common
                        .div_exact(x.denominator())
                        .expect("common multiple divisible by each denominator");
                    x.numerator() * &q
                })
                .collect()
        })
        .collect()
}

/// Rank and pivot columns (the first independent columns, scanned left to
/// right) of a matrix over `Z[v, v^-1]`, by single-step fraction-free
/// (Bareiss) elimination.  Pivot rows are chosen by least term count so
/// intermediate entries stay small; row choice does not affect which columns
/// become pivots.
pub fn laurent_rank_pivots(m: &[Vec<IntLaurent>]) -> (usize, Vec<usize>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut w = m.to_vec();
    let mut prev = IntLaurent::one();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows)
            .filter(|&r| !w[r][col].is_zero())
            .min_by_key(|&r| (w[r][col].term_count(), r))
        else {
            continue;
        };
        w.swap(row, p);
        for r in row + 1..rows {
            for c in col + 1..cols {
                let num = &(&w[row][col] * &w[r][c]) - &(&w[r][col] * &w[row][c]);
                w[r][c] = num
                    .div_exact(&prev)
                    .expect("Bareiss elimination divides exactly");
            }
            w[r][col] = IntLaurent::zero();
        }
        prev = w[row][col].clone();
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    (pivots.len(), pivots)
}

/// Rank and pivot columns of a `Q(v)` matrix (rows cleared of denominators
/// first; see [`q_scale_rows`]).
pub fn q_rank_pivots(m: &QMat) -> (usize, Vec<usize>) {
    laurent_rank_pivots(&q_scale_rows(m))
}
