//! The combinatorial pairing layer: the integers `tau(phi, phi')` and
//! `h(phi)`, the spiral dimension counts, the Gram entries `[c1|c2]` over
//! `Q(v)`, and the Poincaré factors `a_phi`.
//!
//! All quantities are driven by the car table of a [`BlockDatum`] evaluated
//! at exact rational points of E; the Gram matrix is assembled from chamber
//! representatives, with its symmetry checked rather than assumed.

use num::{BigRational, Signed, Zero};
use rayon::prelude::*;

use crate::arrangement::{membership_e_prime, pairing_value, Chamber, Face, Point};
use crate::datum::BlockDatum;
use crate::error::{Error, Result};
use crate::exact::{IntLaurent, RatFunc};
use crate::linalg::QMat;
use crate::rootsys::{IMat, MatrixGroup, StringRootSet, DEFAULT_GROUP_CAP};

/// The Gram matrix of the pairing `(T̃_{c1} : T̃_{c2}) = [c1|c2]` over the
/// enumerated chambers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub chambers: Vec<Chamber>,
    pub entries: QMat,
}

/// Apply a group element (acting on E) to a point.
pub fn apply_on_e(w: &IMat, phi: &Point) -> Point {
    w.iter()
        .map(|row| {
            row.iter()
                .zip(phi)
                .map(|(&a, x)| BigRational::from_integer(a.into()) * x)
                .sum()
        })
        .collect()
}

/// The shift statistic: over the starred degree-delta entries, the total
/// dimension where `<phi:alpha>+n-2` and `<phi':alpha>+n-2` have opposite
/// signs, minus the same count over the starred degree-0 entries with shifts
/// `<phi:alpha>+n`.
pub fn tau(d: &BlockDatum, phi: &Point, phi2: &Point) -> i64 {
    let crossing = |e_alpha: &[i64], shift: i64| -> bool {
        let s = BigRational::from_integer(shift.into());
        let a = pairing_value(phi, e_alpha) + &s;
        let b = pairing_value(phi2, e_alpha) + &s;
        (&a * &b).is_negative()
    };
    let plus: i64 = d
        .car_star_residue(d.delta())
        .filter(|e| crossing(&e.alpha, e.n - 2))
        .map(|e| e.dim)
        .sum();
    let minus: i64 = d
        .car_star_residue(0)
        .filter(|e| crossing(&e.alpha, e.n))
        .map(|e| e.dim)
        .sum();
    plus - minus
}

/// Dimensions of the spiral pieces at level `n_level`: `dimP` counts car
/// entries (including `alpha = 0`) in residue `n_level mod m` with
/// `<phi:alpha> >= 2*n_level/eta - n`, `dimU` the same with strict inequality
/// over starred entries only.
pub fn spiral_dims(d: &BlockDatum, phi: &Point, n_level: i64) -> (i64, i64) {
    let residue = n_level.rem_euclid(d.m);
    let threshold = |n: i64| {
        BigRational::new((2 * n_level).into(), d.eta.into())
            - BigRational::from_integer(n.into())
    };
    let mut dim_p = 0;
    let mut dim_u = 0;
    for e in d.car.iter().filter(|e| e.i == residue) {
        let value = pairing_value(phi, &e.alpha);
        let t = threshold(e.n);
        if value >= t {
            dim_p += e.dim;
        }
        if value > t && e.alpha.iter().any(|&x| x != 0) {
            dim_u += e.dim;
        }
    }
    (dim_p, dim_u)
}

/// The parity statistic `h(phi) = dim u_0 + dim p_eta`, defined on E'.
pub fn h_value(d: &BlockDatum, phi: &Point) -> Result<i64> {
    if !membership_e_prime(d, phi) {
        return Err(Error::Precondition(format!(
            "h is defined on E', and {phi:?} is not generic"
        )));
    }
    let (_, u0) = spiral_dims(d, phi, 0);
    let (p_eta, _) = spiral_dims(d, phi, d.eta);
    Ok(u0 + p_eta)
}

fn one_minus_v2() -> IntLaurent {
    IntLaurent::from_terms([(0, 1i64), (2, -1)])
}

/// One Gram entry `[c1|c2] = (1-v^2)^{-rankE} * sum_w v^{tau(rep2, w rep1)}`.
pub fn gram_entry(
    d: &BlockDatum,
    group_on_e: &MatrixGroup,
    c1: &Chamber,
    c2: &Chamber,
) -> RatFunc {
    let mut sum = IntLaurent::zero();
    for w in &group_on_e.elements {
        let moved = apply_on_e(w, &c1.representative);
        let t = tau(d, &c2.representative, &moved);
        sum.add_term(t, 1.into());
    }
    RatFunc::new(sum, one_minus_v2().pow(d.rank_e as u32))
}

/// The Gram matrix over the given chambers, entries computed independently
/// in parallel; the symmetry `[c1|c2] = [c2|c1]` is audited entry by entry.
pub fn gram_over(d: &BlockDatum, chambers: &[Chamber]) -> Result<QMat> {
    let group = d.weyl_group_on_e(DEFAULT_GROUP_CAP)?;
    let n = chambers.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let flat: Vec<RatFunc> = pairs
        .par_iter()
        .map(|&(i, j)| gram_entry(d, &group, &chambers[i], &chambers[j]))
        .collect();
    let entries: QMat = flat.chunks(n).map(|row| row.to_vec()).collect();
    for i in 0..n {
        for j in i + 1..n {
            if entries[i][j] != entries[j][i] {
                return Err(Error::Audit(format!(
                    "gram symmetry failed between chambers {i} and {j}: \
                     [{i}|{j}] = {} but [{j}|{i}] = {}",
                    entries[i][j], entries[j][i]
                )));
            }
        }
    }
    Ok(entries)
}

/// Enumerate chambers and build the full Gram matrix.
pub fn build_gram(d: &BlockDatum, seed: u64) -> Result<GramMatrix> {
    let chambers = crate::arrangement::enumerate_chambers(d, seed)?;
    let entries = gram_over(d, &chambers)?;
    Ok(GramMatrix { chambers, entries })
}

/// The Poincaré factor of a face: `v^{d(phi)} * sum_w v^{-2 l(w)}` over the
/// reflection group of the centralizer roots vanishing on the face, with
/// `d(phi)` the positive-root count of that subsystem.  The empty zero set
/// gives 1.
pub fn a_phi(d: &BlockDatum, face: &Face) -> Result<IntLaurent> {
    let vanishing: Vec<Vec<i64>> = d
        .centralizer_roots
        .iter()
        .filter(|r| pairing_value(&face.representative, r).is_zero())
        .cloned()
        .collect();
    if vanishing.is_empty() {
        return Ok(IntLaurent::one());
    }
    let set = StringRootSet::new(vanishing);
    set.validate_closed()?;
    let lengths = set.group_lengths(DEFAULT_GROUP_CAP)?;
    let mut sum = IntLaurent::zero();
    for l in &lengths {
        sum.add_term(-2 * (*l as i64), 1.into());
    }
    let a = &IntLaurent::monomial(1, set.positive_count() as i64) * &sum;
    debug_assert_eq!(a.bar(), a, "a_phi must be bar-invariant");
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{all_faces, enumerate_chambers};
    use crate::datum::fixtures::{d1, d2, d3};

    fn pt(n: i64, den: i64) -> Point {
        vec![BigRational::new(n.into(), den.into())]
    }

    fn frac(num: &[(i64, i64)], den: &[(i64, i64)]) -> RatFunc {
        RatFunc::new(IntLaurent::from_terms(num.to_vec()), IntLaurent::from_terms(den.to_vec()))
    }

    #[test]
    fn tau_frozen_values() {
        let d = d1();
        assert_eq!(tau(&d, &pt(1, 5), &pt(-1, 5)), -2);
        assert_eq!(tau(&d, &pt(1, 5), &pt(6, 5)), 1);
        for k in [-7i64, -2, 1, 3, 9] {
            let phi = pt(k, 5);
            assert_eq!(tau(&d, &phi, &phi), 0);
        }
    }

    #[test]
    fn tau_is_symmetric() {
        let d = d2();
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                assert_eq!(tau(&d, &pt(a, 5), &pt(b, 5)), tau(&d, &pt(b, 5), &pt(a, 5)));
            }
        }
    }

    #[test]
    fn spiral_dims_frozen_values() {
        let d = d1();
        assert_eq!(spiral_dims(&d, &pt(1, 5), 2), (0, 0));
        assert_eq!(spiral_dims(&d, &pt(6, 5), 0), (2, 1));
    }

    #[test]
    fn h_frozen_values_and_precondition() {
        let d = d1();
        assert_eq!(h_value(&d, &pt(1, 5)).unwrap(), 1);
        assert_eq!(h_value(&d, &pt(6, 5)).unwrap(), 2);
        assert_eq!(h_value(&d, &pt(-6, 5)).unwrap(), 2);
        assert!(matches!(h_value(&d, &pt(0, 1)), Err(Error::Precondition(_))));
    }

    #[test]
    fn tau_parity_matches_h() {
        for d in [d1(), d2()] {
            let points: Vec<Point> = [-9i64, -6, -1, 1, 4, 11]
                .iter()
                .map(|&k| pt(k, 5))
                .filter(|p| membership_e_prime(&d, p))
                .collect();
            for a in &points {
                for b in &points {
                    let parity = (h_value(&d, a).unwrap() + h_value(&d, b).unwrap()) % 2;
                    assert_eq!(tau(&d, a, b).rem_euclid(2), parity.rem_euclid(2));
                }
            }
        }
    }

    #[test]
    fn h_is_weyl_invariant() {
        let d = d3();
        let chambers = enumerate_chambers(&d, 1).unwrap();
        let group = d.weyl_group_on_e(1000).unwrap();
        for c in &chambers {
            let h = h_value(&d, &c.representative).unwrap();
            for w in &group.elements {
                let moved = apply_on_e(w, &c.representative);
                assert_eq!(h_value(&d, &moved).unwrap(), h);
            }
        }
    }

    #[test]
    fn d1_gram_matrix() {
        let d = d1();
        let gram = build_gram(&d, 1).unwrap();
        assert_eq!(gram.chambers.len(), 3);
        // Chamber order: 0 = middle (-,-), 1 = t > 1, 2 = t < -1.
        let mid_mid = frac(&[(-2, 1), (0, 1)], &[(0, 1), (2, -1)]);
        let out_mid = frac(&[(-1, 1), (1, 1)], &[(0, 1), (2, -1)]);
        let out_out = frac(&[(0, 2)], &[(0, 1), (2, -1)]);
        assert_eq!(gram.entries[0][0], mid_mid);
        assert_eq!(gram.entries[1][0], out_mid);
        assert_eq!(gram.entries[0][1], out_mid);
        assert_eq!(gram.entries[1][1], out_out);
        assert_eq!(gram.entries[2][2], out_out);
        // W-symmetry makes the two outer rows identical.
        assert_eq!(gram.entries[1], gram.entries[2]);
    }

    #[test]
    fn gram_entries_are_representative_independent() {
        for d in [d1(), d2()] {
            let a = build_gram(&d, 1).unwrap();
            let b = build_gram(&d, 99).unwrap();
            assert_eq!(a.entries, b.entries);
        }
    }

    #[test]
    fn trivial_datum_gram_is_identity() {
        let d = BlockDatum {
            m: 1,
            eta: 2,
            rank_e: 0,
            car: vec![],
            weyl_generators: vec![],
            centralizer_roots: vec![],
        };
        assert!(d.validate(100).is_empty());
        let gram = build_gram(&d, 1).unwrap();
        assert_eq!(gram.chambers.len(), 1);
        assert!(gram.chambers[0].signs.is_empty());
        assert_eq!(gram.entries, vec![vec![RatFunc::one()]]);
    }

    #[test]
    fn a_phi_values() {
        let d = d1();
        let chambers = enumerate_chambers(&d, 1).unwrap();
        let faces = all_faces(&d, &chambers, 1).unwrap();
        let mut values: Vec<IntLaurent> =
            faces.iter().map(|f| a_phi(&d, f).unwrap()).collect();
        values.sort_by_key(|a| a.term_count());
        // Three empty faces give 1; the origin face gives v + v^-1.
        assert_eq!(values.len(), 4);
        assert!(values[..3].iter().all(|a| a.is_one()));
        assert_eq!(values[3], IntLaurent::from_terms([(-1, 1i64), (1, 1)]));
    }

    #[test]
    fn a_phi_full_a2_subsystem() {
        let d = d3();
        let chambers = enumerate_chambers(&d, 1).unwrap();
        let faces = all_faces(&d, &chambers, 1).unwrap();
        let full = faces
            .iter()
            .find(|f| f.zero_roots.len() == 6)
            .expect("the all-minus chamber contains the origin");
        assert_eq!(
            a_phi(&d, full).unwrap(),
            IntLaurent::from_terms([(3, 1i64), (1, 2), (-1, 2), (-3, 1)])
        );
    }
}
