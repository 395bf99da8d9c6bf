//! Triple factorization of the rescaled basis Gram matrix.
//!
//! Given the Gram matrix of the canonical basis and an orbit labeling
//! (a partition of the basis with a dimension κ per orbit), the matrix
//! `M = (v^{-κ(b)-κ(b')} (b:b'))` factors uniquely as `M = S·T·Sp` with
//! `S` block-lower unipotent, `Sp` block-upper unipotent, and `T`
//! block-diagonal over orbits in increasing-κ order.  `S` carries the
//! P-polynomials; the parity audit checks the combinatorial shadow of odd
//! vanishing: every P-polynomial lies in `N[v^-2]` and `T` lives in `Q(v^2)`.

use std::fs;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{in_q_of_v_squared, RatFunc};
use crate::linalg::{q_identity, q_invert, QMat};

/// One orbit of basis elements with its dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub id: String,
    pub kappa: i64,
    pub members: Vec<usize>,
}

/// A partition of the basis indices into orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitLabeling {
    pub orbits: Vec<Orbit>,
}

impl OrbitLabeling {
    pub fn load(path: &Path) -> Result<OrbitLabeling> {
        let text = fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<OrbitLabeling> {
        let labeling: OrbitLabeling = serde_json::from_str(text)
            .map_err(|e| Error::BadLabeling(format!("unreadable labeling: {e}")))?;
        Ok(labeling)
    }

    /// Every index `0..n` labeled exactly once, κ nonnegative.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for orbit in &self.orbits {
            if orbit.kappa < 0 {
                return Err(Error::BadLabeling(format!(
                    "orbit {} has negative dimension {}",
                    orbit.id, orbit.kappa
                )));
            }
            if orbit.members.is_empty() {
                return Err(Error::BadLabeling(format!("orbit {} has no members", orbit.id)));
            }
            for &i in &orbit.members {
                if i >= n {
                    return Err(Error::BadLabeling(format!(
                        "orbit {} labels index {i}, but the basis has {n} elements",
                        orbit.id
                    )));
                }
                if seen[i] {
                    return Err(Error::BadLabeling(format!("index {i} labeled twice")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::BadLabeling(format!("index {i} is not labeled")));
        }
        Ok(())
    }

    /// κ per basis index.
    pub fn kappas(&self, n: usize) -> Result<Vec<i64>> {
        self.validate(n)?;
        let mut out = vec![0i64; n];
        for orbit in &self.orbits {
            for &i in &orbit.members {
                out[i] = orbit.kappa;
            }
        }
        Ok(out)
    }
}

/// The factorization `M = S·T·Sp` over the reordered basis.
#[derive(Clone, Debug)]
pub struct Factorization {
    /// Position in the factor matrices -> original basis index; orbits
    /// sorted by increasing κ, input order preserved within and
    /// between equal-κ orbits.
    pub ordering: Vec<usize>,
    /// Orbit id and κ per position.
    pub orbit_ids: Vec<String>,
    pub kappas: Vec<i64>,
    /// Orbit spans in position coordinates, in elimination order.
    pub blocks: Vec<(String, i64, Range<usize>)>,
    pub s: QMat,
    pub t: QMat,
    pub sp: QMat,
}

/// `M[b][b'] = v^{-κ(b)-κ(b')} (b:b')` over the basis in input order.
pub fn build_m(gram_on_basis: &QMat, labeling: &OrbitLabeling) -> Result<QMat> {
    let n = gram_on_basis.len();
    if gram_on_basis.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("Gram matrix on the basis must be square".into()));
    }
    let kappas = labeling.kappas(n)?;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let scale = RatFunc::monomial(1, -kappas[i] - kappas[j]);
                    &scale * &gram_on_basis[i][j]
                })
                .collect()
        })
        .collect())
}

/// Two-sided block elimination in increasing-κ orbit order.  Equal-κ
/// entries between distinct orbits must already be zero when reached.
pub fn factorize_m(m: &QMat, labeling: &OrbitLabeling) -> Result<Factorization> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("matrix to factorize must be square".into()));
    }
    labeling.validate(n)?;

    let mut order: Vec<usize> = (0..labeling.orbits.len()).collect();
    order.sort_by_key(|&k| labeling.orbits[k].kappa);

    let mut ordering = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    for &k in &order {
        let orbit = &labeling.orbits[k];
        let start = ordering.len();
        ordering.extend(orbit.members.iter().copied());
        blocks.push((orbit.id.clone(), orbit.kappa, start..ordering.len()));
    }
    let mut orbit_ids = vec![String::new(); n];
    let mut kappas = vec![0i64; n];
    for (id, kappa, span) in &blocks {
        for p in span.clone() {
            orbit_ids[p] = id.clone();
            kappas[p] = *kappa;
        }
    }

    // Reorder M into elimination order.
    let mut w: QMat = (0..n)
        .map(|i| (0..n).map(|j| m[ordering[i]][ordering[j]].clone()).collect())
        .collect();

    let mut s = q_identity(n);
    let mut sp = q_identity(n);
    let mut t = vec![vec![RatFunc::zero(); n]; n];

    for (k, (id, kappa, span)) in blocks.iter().enumerate() {
        // Later orbits of the same κ must already be disconnected.
        for (other_id, other_kappa, other_span) in &blocks[k + 1..] {
            if other_kappa != kappa {
                break;
            }
            let coupled = span.clone().any(|r| {
                other_span
                    .clone()
                    .any(|c| !w[r][c].is_zero() || !w[c][r].is_zero())
            });
            if coupled {
                return Err(Error::InconsistentLabeling(id.clone(), other_id.clone()));
            }
        }

        let t_kk: QMat = span
            .clone()
            .map(|r| span.clone().map(|c| w[r][c].clone()).collect())
            .collect();
        let Some(t_inv) = q_invert(&t_kk) else {
            return Err(Error::SingularBlock(id.clone()));
        };
        for (bi, r) in span.clone().enumerate() {
            for (bj, c) in span.clone().enumerate() {
                t[r][c] = t_kk[bi][bj].clone();
            }
        }

        let width = span.len();
        let tail = span.end..n;
        // S block column: W[i][k] T_kk^{-1}; Sp block row: T_kk^{-1} W[k][j].
        for i in tail.clone() {
            for bj in 0..width {
                let mut acc = RatFunc::zero();
                for (bl, l) in span.clone().enumerate() {
                    acc = &acc + &(&w[i][l] * &t_inv[bl][bj]);
                }
                s[i][span.start + bj] = acc;
            }
        }
        for j in tail.clone() {
            for bi in 0..width {
                let mut acc = RatFunc::zero();
                for (bl, l) in span.clone().enumerate() {
                    acc = &acc + &(&t_inv[bi][bl] * &w[l][j]);
                }
                sp[span.start + bi][j] = acc;
            }
        }
        // Schur complement update of the trailing square.
        for i in tail.clone() {
            let row: Vec<RatFunc> =
                (0..width).map(|bj| s[i][span.start + bj].clone()).collect();
            for j in tail.clone() {
                let mut acc = RatFunc::zero();
                for (bl, l) in span.clone().enumerate() {
                    acc = &acc + &(&row[bl] * &w[l][j]);
                }
                w[i][j] = &w[i][j] - &acc;
            }
        }
    }

    Ok(Factorization { ordering, orbit_ids, kappas, blocks, s, t, sp })
}

impl Factorization {
    /// `S·T·Sp` back in the original basis order.
    pub fn reconstruct(&self) -> QMat {
        let n = self.ordering.len();
        let st = crate::linalg::q_mul(&self.s, &self.t);
        let sts = crate::linalg::q_mul(&st, &self.sp);
        let mut out = vec![vec![RatFunc::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                out[self.ordering[i]][self.ordering[j]] = sts[i][j].clone();
            }
        }
        out
    }

    /// P-polynomial for a pair of original basis indices:
    /// `P_{b2,b1} = S[pos(b1)][pos(b2)]`.
    pub fn p_by_original(&self, b2: usize, b1: usize) -> &RatFunc {
        let pos2 = self.ordering.iter().position(|&x| x == b2).expect("basis index");
        let pos1 = self.ordering.iter().position(|&x| x == b1).expect("basis index");
        &self.s[pos1][pos2]
    }
}

/// The matrix of P-polynomials in position coordinates: `P[i][j]` is the
/// multiplicity series of position `j`'s class at position `i`, i.e. the
/// transpose of `S`.
pub fn p_matrix(f: &Factorization) -> QMat {
    crate::linalg::q_transpose(&f.s)
}

/// Result of the parity audits: failures are recorded per entry.
#[derive(Clone, Debug, Default)]
pub struct ParityReport {
    /// P entries outside N[v^-2]: (row, column, entry).
    pub p_failures: Vec<(usize, usize, String)>,
    /// T entries outside Q(v^2).
    pub t_failures: Vec<(usize, usize, String)>,
    /// heart-unfixed entries of the three factors: (factor, row, column).
    pub heart_failures: Vec<(String, usize, usize)>,
}

impl ParityReport {
    pub fn p_parity(&self) -> bool {
        self.p_failures.is_empty()
    }
    pub fn t_even(&self) -> bool {
        self.t_failures.is_empty()
    }
    pub fn heart_fixed(&self) -> bool {
        self.heart_failures.is_empty()
    }
    pub fn all_pass(&self) -> bool {
        self.p_parity() && self.t_even() && self.heart_fixed()
    }
}

/// Whether an entry is a Laurent polynomial in `v^-2` with nonnegative
/// integer coefficients.
fn in_nonneg_v_minus_two(f: &RatFunc) -> bool {
    match f.as_laurent() {
        None => false,
        Some(l) => {
            l.is_nonnegative()
                && l.terms().all(|(exp, _)| exp <= 0 && exp % 2 == 0)
        }
    }
}

/// Per-entry parity checks on a factorization.
pub fn parity_audit(f: &Factorization) -> ParityReport {
    let n = f.ordering.len();
    let mut report = ParityReport::default();
    let p = p_matrix(f);
    for i in 0..n {
        for j in 0..n {
            if !in_nonneg_v_minus_two(&p[i][j]) {
                report.p_failures.push((i, j, p[i][j].to_string()));
            }
            if !f.t[i][j].is_zero() && !in_q_of_v_squared(&f.t[i][j]) {
                report.t_failures.push((i, j, f.t[i][j].to_string()));
            }
            for (name, mat) in [("S", &f.s), ("T", &f.t), ("Sp", &f.sp)] {
                if mat[i][j].heart() != mat[i][j] {
                    report.heart_failures.push((name.to_string(), i, j));
                }
            }
        }
    }
    report
}

/// The combinatorial odd-vanishing statement: no P-parity failures.
pub fn odd_vanishing_report(f: &Factorization) -> bool {
    parity_audit(f).p_parity()
}

/// Machine-readable factorization with its audit flags.
pub fn factorization_json(f: &Factorization) -> serde_json::Value {
    let report = parity_audit(f);
    serde_json::json!({
        "ordering": f.ordering,
        "S": f.s,
        "T": f.t,
        "Sp": f.sp,
        "P": p_matrix(f),
        "audit": {
            "pParity": report.p_parity(),
            "tEven": report.t_even(),
            "heartFixed": report.heart_fixed(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockspace::{canonical_signed_basis, positive_basis, BlockSpace};
    use crate::datum::fixtures::d1;
    use crate::exact::IntLaurent;

    fn laurent(terms: &[(i64, i64)]) -> IntLaurent {
        IntLaurent::from_terms(terms.to_vec())
    }

    fn frac(num: &[(i64, i64)], den: &[(i64, i64)]) -> RatFunc {
        RatFunc::new(laurent(num), laurent(den))
    }

    fn poly(terms: &[(i64, i64)]) -> RatFunc {
        RatFunc::from(laurent(terms))
    }

    fn two_orbits(k0: i64, k1: i64) -> OrbitLabeling {
        OrbitLabeling {
            orbits: vec![
                Orbit { id: "zero".into(), kappa: k0, members: vec![0] },
                Orbit { id: "regular".into(), kappa: k1, members: vec![1] },
            ],
        }
    }

    fn d1_m() -> QMat {
        let u = frac(&[(0, 1)], &[(0, 1), (4, -1)]);
        let d = frac(&[(-4, 1)], &[(0, 1), (4, -1)]);
        vec![vec![u.clone(), u.clone()], vec![u, d]]
    }

    #[test]
    fn labeling_validation() {
        let l = two_orbits(0, 2);
        l.validate(2).unwrap();
        assert!(matches!(l.validate(3), Err(Error::BadLabeling(_))));
        let dup = OrbitLabeling {
            orbits: vec![Orbit { id: "a".into(), kappa: 0, members: vec![0, 0] }],
        };
        assert!(matches!(dup.validate(1), Err(Error::BadLabeling(_))));
        let neg = OrbitLabeling {
            orbits: vec![Orbit { id: "a".into(), kappa: -1, members: vec![0] }],
        };
        assert!(matches!(neg.validate(1), Err(Error::BadLabeling(_))));
        let oob = OrbitLabeling {
            orbits: vec![Orbit { id: "a".into(), kappa: 0, members: vec![1] }],
        };
        assert!(matches!(oob.validate(1), Err(Error::BadLabeling(_))));
    }

    #[test]
    fn labeling_roundtrips_through_json() {
        let l = two_orbits(0, 2);
        let text = serde_json::to_string(&l).unwrap();
        assert_eq!(OrbitLabeling::from_str(&text).unwrap(), l);
        assert!(OrbitLabeling::from_str("{}").is_err());
    }

    #[test]
    fn build_m_on_the_d1_basis_gram() {
        let bs = BlockSpace::build(&d1(), 1).unwrap();
        let sb = canonical_signed_basis(&bs).unwrap();
        let basis = positive_basis(&bs, &sb).unwrap();
        let gram: QMat = basis
            .iter()
            .map(|a| basis.iter().map(|b| bs.pair(a, b)).collect())
            .collect();
        let m = build_m(&gram, &two_orbits(0, 2)).unwrap();
        assert_eq!(m, d1_m());
    }

    #[test]
    fn build_m_trivial_cases() {
        let id = q_identity(2);
        let l = OrbitLabeling {
            orbits: vec![Orbit { id: "a".into(), kappa: 0, members: vec![0, 1] }],
        };
        assert_eq!(build_m(&id, &l).unwrap(), id);
        let g = vec![vec![frac(&[(0, 1)], &[(0, 1), (2, -1)])]];
        let l1 = OrbitLabeling {
            orbits: vec![Orbit { id: "a".into(), kappa: 3, members: vec![0] }],
        };
        let m = build_m(&g, &l1).unwrap();
        assert_eq!(m[0][0], frac(&[(-6, 1)], &[(0, 1), (2, -1)]));
    }

    #[test]
    fn d1_factorization_frozen() {
        let f = factorize_m(&d1_m(), &two_orbits(0, 2)).unwrap();
        assert_eq!(f.ordering, vec![0, 1]);
        assert_eq!(f.s, vec![vec![poly(&[(0, 1)]), RatFunc::zero()],
                             vec![poly(&[(0, 1)]), poly(&[(0, 1)])]]);
        assert_eq!(f.sp, vec![vec![poly(&[(0, 1)]), poly(&[(0, 1)])],
                              vec![RatFunc::zero(), poly(&[(0, 1)])]]);
        assert_eq!(f.t[0][0], frac(&[(0, 1)], &[(0, 1), (4, -1)]));
        assert_eq!(f.t[1][1], poly(&[(-4, 1)]));
        assert!(f.t[0][1].is_zero() && f.t[1][0].is_zero());
        // P_{b1,b2} = 1.
        assert_eq!(f.p_by_original(0, 1), &poly(&[(0, 1)]));
        assert_eq!(f.reconstruct(), d1_m());
        let report = parity_audit(&f);
        assert!(report.all_pass(), "{report:?}");
        assert!(odd_vanishing_report(&f));
    }

    #[test]
    fn identity_factorizes_trivially() {
        let id = q_identity(3);
        let l = OrbitLabeling {
            orbits: vec![
                Orbit { id: "a".into(), kappa: 0, members: vec![0, 1] },
                Orbit { id: "b".into(), kappa: 2, members: vec![2] },
            ],
        };
        let f = factorize_m(&id, &l).unwrap();
        assert_eq!(f.s, id);
        assert_eq!(f.t, id);
        assert_eq!(f.sp, id);
        assert_eq!(p_matrix(&f), id);
        assert!(parity_audit(&f).all_pass());
    }

    #[test]
    fn toy_matrix_fails_the_parity_audit() {
        let m = vec![
            vec![poly(&[(0, 1)]), poly(&[(-1, 1)])],
            vec![poly(&[(-1, 1)]), poly(&[(0, 1)])],
        ];
        let f = factorize_m(&m, &two_orbits(0, 2)).unwrap();
        assert_eq!(f.s[1][0], poly(&[(-1, 1)]));
        assert_eq!(f.t[0][0], poly(&[(0, 1)]));
        assert_eq!(f.t[1][1], poly(&[(0, 1), (-2, -1)]));
        assert_eq!(f.sp[0][1], poly(&[(-1, 1)]));
        let report = parity_audit(&f);
        assert!(!report.p_parity());
        assert!(!odd_vanishing_report(&f));
        assert!(!report.heart_fixed());
        assert_eq!(f.reconstruct(), m);
    }

    #[test]
    fn elimination_reorders_by_kappa() {
        // Same toy matrix, orbits listed with the large orbit first.
        let m = vec![
            vec![poly(&[(0, 1)]), poly(&[(-2, 1)])],
            vec![poly(&[(-2, 1)]), poly(&[(0, 1)])],
        ];
        let l = OrbitLabeling {
            orbits: vec![
                Orbit { id: "big".into(), kappa: 4, members: vec![0] },
                Orbit { id: "small".into(), kappa: 0, members: vec![1] },
            ],
        };
        let f = factorize_m(&m, &l).unwrap();
        assert_eq!(f.ordering, vec![1, 0]);
        assert_eq!(f.blocks[0].0, "small");
        assert_eq!(f.reconstruct(), m);
        assert!(parity_audit(&f).all_pass());
    }

    #[test]
    fn refactorization_is_stable() {
        for (m, l) in [
            (d1_m(), two_orbits(0, 2)),
            (
                vec![
                    vec![poly(&[(0, 1)]), poly(&[(-1, 1)])],
                    vec![poly(&[(-1, 1)]), poly(&[(0, 1)])],
                ],
                two_orbits(0, 2),
            ),
        ] {
            let f = factorize_m(&m, &l).unwrap();
            let g = factorize_m(&f.reconstruct(), &l).unwrap();
            assert_eq!(f.s, g.s);
            assert_eq!(f.t, g.t);
            assert_eq!(f.sp, g.sp);
        }
    }

    #[test]
    fn permutation_equivariance() {
        // A 3x3 matrix with a two-element orbit and a singleton.
        let m = vec![
            vec![poly(&[(0, 1)]), RatFunc::zero(), poly(&[(-2, 1)])],
            vec![RatFunc::zero(), poly(&[(0, 1)]), poly(&[(-2, 2)])],
            vec![poly(&[(-2, 1)]), poly(&[(-2, 2)]), poly(&[(0, 1)])],
        ];
        let l = OrbitLabeling {
            orbits: vec![
                Orbit { id: "a".into(), kappa: 0, members: vec![0, 1] },
                Orbit { id: "b".into(), kappa: 2, members: vec![2] },
            ],
        };
        let f = factorize_m(&m, &l).unwrap();
        assert_eq!(f.reconstruct(), m);
        // Relabel through the permutation sigma(new) = old: (2, 0, 1).
        let sigma = [2usize, 0, 1];
        let pm: QMat = (0..3)
            .map(|i| (0..3).map(|j| m[sigma[i]][sigma[j]].clone()).collect())
            .collect();
        let pl = OrbitLabeling {
            orbits: vec![
                Orbit { id: "a".into(), kappa: 0, members: vec![1, 2] },
                Orbit { id: "b".into(), kappa: 2, members: vec![0] },
            ],
        };
        let g = factorize_m(&pm, &pl).unwrap();
        assert_eq!(g.reconstruct(), pm);
        let inv = |x: usize| sigma.iter().position(|&s| s == x).unwrap();
        for b2 in 0..3 {
            for b1 in 0..3 {
                assert_eq!(
                    f.p_by_original(b2, b1),
                    g.p_by_original(inv(b2), inv(b1)),
                    "P mismatch at ({b2}, {b1})"
                );
            }
        }
    }

    #[test]
    fn equal_kappa_distinct_orbits_must_decouple() {
        let m = vec![
            vec![poly(&[(0, 1)]), poly(&[(0, 1)])],
            vec![poly(&[(0, 1)]), poly(&[(0, 2)])],
        ];
        let l = OrbitLabeling {
            orbits: vec![
                Orbit { id: "a".into(), kappa: 0, members: vec![0] },
                Orbit { id: "b".into(), kappa: 0, members: vec![1] },
            ],
        };
        match factorize_m(&m, &l) {
            Err(Error::InconsistentLabeling(a, b)) => {
                assert_eq!((a.as_str(), b.as_str()), ("a", "b"));
            }
            other => panic!("expected inconsistent labeling, got {other:?}"),
        }
        // The decoupled version factors fine.
        let m2 = vec![
            vec![poly(&[(0, 1)]), RatFunc::zero()],
            vec![RatFunc::zero(), poly(&[(0, 2)])],
        ];
        let f = factorize_m(&m2, &l).unwrap();
        assert!(parity_audit(&f).all_pass());
    }

    #[test]
    fn singular_block_is_reported() {
        let m = vec![
            vec![poly(&[(0, 1)]), poly(&[(0, 1)])],
            vec![poly(&[(0, 1)]), poly(&[(0, 1)])],
        ];
        let l = OrbitLabeling {
            orbits: vec![Orbit { id: "a".into(), kappa: 0, members: vec![0, 1] }],
        };
        assert!(matches!(factorize_m(&m, &l), Err(Error::SingularBlock(id)) if id == "a"));
    }

    #[test]
    fn factorization_json_shape() {
        let f = factorize_m(&d1_m(), &two_orbits(0, 2)).unwrap();
        let value = factorization_json(&f);
        assert_eq!(value["ordering"], serde_json::json!([0, 1]));
        assert_eq!(value["audit"]["pParity"], serde_json::json!(true));
        assert_eq!(value["audit"]["tEven"], serde_json::json!(true));
        assert_eq!(value["audit"]["heartFixed"], serde_json::json!(true));
        assert!(value["S"].is_array() && value["P"].is_array());
    }
}
