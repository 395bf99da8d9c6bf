//! The rational parameter space E, its nested generic loci E' ⊆ E'' ⊆ E∘,
//! chamber enumeration for the degree-delta hyperplane arrangement, and face
//! enumeration inside chambers.
//!
//! A point of E is a rational vector paired against the alpha-coordinates of
//! the datum by the dot product.  The chamber arrangement consists of the
//! affine hyperplanes `<phi:alpha> + n - 2 = 0` over the starred car entries
//! in residue delta with `n != 2`; chambers are the realizable strict sign
//! vectors, enumerated depth-first with exact Fourier–Motzkin feasibility at
//! every node, minus sign before plus, so the output is in ascending
//! lexicographic order.  Representatives are interior points jittered by
//! large-prime denominators until they pass the relevant genericity test.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::datum::BlockDatum;
use crate::error::{Error, Result};
use crate::linalg::{rat_in_span, rat_nullspace, rat_rank, RMat};
use crate::rootsys::{lex_positive, IVec};

/// A point of E: exact rational coordinates of length `rankE`.
pub type Point = Vec<BigRational>;

/// How many jittered samples to draw before giving up on a region.
pub const DEFAULT_SAMPLE_TRIES: usize = 200;

/// Large primes used as jitter denominators; the excluded loci of E' and E''
/// all have small denominators, so one prime factor here escapes them.
const JITTER_PRIMES: [i64; 12] = [
    1_000_003, 1_000_033, 1_000_037, 1_000_039, 1_000_081, 1_000_099, 1_000_117,
    1_000_121, 1_000_133, 1_000_151, 1_000_159, 1_000_171,
];

/// A chamber: a realizable strict sign vector over the arrangement
/// hyperplanes, together with a rational representative in the chamber
/// intersected with E'.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    /// One entry per hyperplane of [`chamber_hyperplanes`], value +1 or -1.
    pub signs: Vec<i8>,
    pub representative: Point,
}

/// A face of a chamber: a realizable zero set among the candidate roots,
/// with a representative in the open chamber intersected with E''.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Index of the owning chamber in the enumerated chamber list.
    pub chamber: usize,
    /// The roots vanishing on the representative, both signs, sorted.
    pub zero_roots: Vec<IVec>,
    pub representative: Point,
}

/// The pairing `<phi : alpha>` between E and the alpha-coordinates.
pub fn pairing_value(phi: &Point, alpha: &[i64]) -> BigRational {
    phi.iter()
        .zip(alpha)
        .map(|(x, &a)| x * BigRational::from_integer(a.into()))
        .sum()
}

/// The arrangement hyperplanes `(alpha, n)`: starred car entries in residue
/// delta with `n != 2`, in car order.
pub fn chamber_hyperplanes(d: &BlockDatum) -> Vec<(IVec, i64)> {
    d.car_star_residue(d.delta())
        .filter(|e| e.n != 2)
        .map(|e| (e.alpha.clone(), e.n))
        .collect()
}

/// For a starred car entry, the unique candidate `N = eta(<phi:alpha>+n)/2`
/// solving `<phi:alpha> = 2N/eta - n`, provided it is an integer.
fn incidence_n(d: &BlockDatum, phi: &Point, alpha: &[i64], n: i64) -> Option<BigInt> {
    let q = BigRational::from_integer(d.eta.into())
        * (pairing_value(phi, alpha) + BigRational::from_integer(n.into()))
        / BigRational::from_integer(2.into());
    q.is_integer().then(|| q.to_integer())
}

/// Membership in E': phi avoids every hyperplane `H_{alpha,n,N}` with
/// `N ≡ i (mod m)` attached to a starred car entry `(i, alpha, n)`.
pub fn membership_e_prime(d: &BlockDatum, phi: &Point) -> bool {
    d.car_star().all(|e| match incidence_n(d, phi, &e.alpha, e.n) {
        Some(nn) => (nn - BigInt::from(e.i)) % BigInt::from(d.m) != BigInt::zero(),
        None => true,
    })
}

/// Membership in E'': only incidences with `<phi:alpha> != 0` are excluded.
pub fn membership_e_double_prime(d: &BlockDatum, phi: &Point) -> bool {
    d.car_star().all(|e| match incidence_n(d, phi, &e.alpha, e.n) {
        Some(nn) => {
            (nn - BigInt::from(e.i)) % BigInt::from(d.m) != BigInt::zero()
                || pairing_value(phi, &e.alpha).is_zero()
        }
        None => true,
    })
}

/// Membership in E∘: phi avoids the chamber arrangement hyperplanes.
pub fn in_e_circ(d: &BlockDatum, phi: &Point) -> bool {
    chamber_hyperplanes(d).iter().all(|(alpha, n)| {
        pairing_value(phi, alpha) + BigRational::from_integer((*n - 2).into()) != BigRational::zero()
    })
}

/// The strict sign vector of phi over the arrangement, or `None` when phi
/// lies on a hyperplane.
pub fn chamber_signs_of(d: &BlockDatum, phi: &Point) -> Option<Vec<i8>> {
    chamber_hyperplanes(d)
        .iter()
        .map(|(alpha, n)| {
            let f = pairing_value(phi, alpha) + BigRational::from_integer((*n - 2).into());
            if f.is_positive() {
                Some(1)
            } else if f.is_negative() {
                Some(-1)
            } else {
                None
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Strict linear systems: Fourier–Motzkin elimination and interior sampling
// ---------------------------------------------------------------------------

/// A system of strict inequalities `a · x + c > 0` in `dim` variables.
/// Rows are kept in primitive integer form and deduplicated.
struct StrictSystem {
    dim: usize,
    rows: Vec<(Vec<BigRational>, BigRational)>,
    seen: HashSet<(Vec<BigInt>, BigInt)>,
    contradiction: bool,
}

impl StrictSystem {
    fn new(dim: usize) -> Self {
        StrictSystem { dim, rows: Vec::new(), seen: HashSet::new(), contradiction: false }
    }

    /// Insert a row, scaling it by a positive rational to a primitive integer
    /// vector first.  Constant rows are resolved immediately.
    fn push(&mut self, mut coeffs: Vec<BigRational>, mut c: BigRational) {
        debug_assert_eq!(coeffs.len(), self.dim);
        if coeffs.iter().all(|x| x.is_zero()) {
            if !c.is_positive() {
                self.contradiction = true;
            }
            return;
        }
        // Positive primitive scaling: direction of the inequality survives.
        let mut denom = BigInt::one();
        for x in coeffs.iter().chain(std::iter::once(&c)) {
            denom = num::integer::lcm(denom, x.denom().clone());
        }
        let scale = BigRational::from_integer(denom);
        for x in &mut coeffs {
            *x *= &scale;
        }
        c *= &scale;
        let mut content = BigInt::zero();
        for x in coeffs.iter().chain(std::iter::once(&c)) {
            content = num::integer::gcd(content, x.to_integer());
        }
        if content > BigInt::one() {
            let scale = BigRational::from_integer(content);
            for x in &mut coeffs {
                *x /= &scale;
            }
            c /= &scale;
        }
        let key = (
            coeffs.iter().map(|x| x.to_integer()).collect::<Vec<_>>(),
            c.to_integer(),
        );
        if self.seen.insert(key) {
            self.rows.push((coeffs, c));
        }
    }

    /// Eliminate the last variable, producing the projected system.
    fn eliminate_last(&self) -> StrictSystem {
        let k = self.dim - 1;
        let mut out = StrictSystem::new(k);
        let mut lowers: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        let mut uppers: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        for (a, c) in &self.rows {
            if a[k].is_zero() {
                out.push(a[..k].to_vec(), c.clone());
            } else if a[k].is_positive() {
                lowers.push((a.clone(), c.clone()));
            } else {
                uppers.push((a.clone(), c.clone()));
            }
        }
        for (la, lc) in &lowers {
            for (ua, uc) in &uppers {
                // (-ua_k) * lower + la_k * upper cancels variable k.
                let wl = -ua[k].clone();
                let wu = la[k].clone();
                let coeffs: Vec<BigRational> =
                    (0..k).map(|j| &la[j] * &wl + &ua[j] * &wu).collect();
                let c = lc * &wl + uc * &wu;
                out.push(coeffs, c);
            }
        }
        out
    }
}

/// The full elimination ladder of a strict system: `ladder[j]` constrains
/// variables `0..j`, with `ladder[dim]` the input.  `None` when infeasible.
fn fm_ladder(sys: StrictSystem) -> Option<Vec<StrictSystem>> {
    let mut ladder = vec![sys];
    while ladder.last().unwrap().dim > 0 {
        if ladder.last().unwrap().contradiction {
            return None;
        }
        let next = ladder.last().unwrap().eliminate_last();
        ladder.push(next);
    }
    if ladder.last().unwrap().contradiction {
        return None;
    }
    ladder.reverse();
    Some(ladder)
}

/// A strictly interior point of the system described by a ladder, built by
/// forward substitution with a random large-prime jitter around a midpoint.
fn sample_interior(ladder: &[StrictSystem], rng: &mut ChaCha8Rng) -> Point {
    let dim = ladder.len() - 1;
    let mut x: Point = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut lower: Option<BigRational> = None;
        let mut upper: Option<BigRational> = None;
        for (a, c) in &ladder[k + 1].rows {
            if a[k].is_zero() {
                continue;
            }
            let rest: BigRational =
                c + x.iter().zip(&a[..k]).map(|(xi, ai)| xi * ai).sum::<BigRational>();
            let bound = -rest / &a[k];
            if a[k].is_positive() {
                lower = Some(lower.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                upper = Some(upper.map_or(bound.clone(), |u| u.min(bound)));
            }
        }
        let one = BigRational::one();
        let (base, room) = match (&lower, &upper) {
            (Some(l), Some(u)) => {
                let mid = (l + u) / BigRational::from_integer(2.into());
                let half = (u - l) / BigRational::from_integer(2.into());
                (mid, half)
            }
            (Some(l), None) => (l + &one, one.clone()),
            (None, Some(u)) => (u - &one, one.clone()),
            (None, None) => (BigRational::zero(), one.clone()),
        };
        let p = JITTER_PRIMES[rng.gen_range(0..JITTER_PRIMES.len())];
        let j = rng.gen_range(1..p);
        let eps = &room * BigRational::new(j.into(), p.into());
        let value = if rng.gen_bool(0.5) { &base + &eps } else { &base - &eps };
        x.push(value);
    }
    x
}

/// Build the strict system of a (possibly partial) sign assignment over the
/// given hyperplanes, in the coordinates of E.
fn sign_system(hyps: &[(IVec, i64)], signs: &[i8], dim: usize) -> StrictSystem {
    let mut sys = StrictSystem::new(dim);
    for ((alpha, n), &s) in hyps.iter().zip(signs) {
        let sr = BigRational::from_integer(i64::from(s).into());
        let coeffs: Vec<BigRational> =
            alpha.iter().map(|&a| &sr * BigRational::from_integer(a.into())).collect();
        let c = &sr * BigRational::from_integer((*n - 2).into());
        sys.push(coeffs, c);
    }
    sys
}

// ---------------------------------------------------------------------------
// Chambers
// ---------------------------------------------------------------------------

/// Enumerate every chamber of the arrangement, in ascending lexicographic
/// order of sign vectors (minus before plus), each with a representative in
/// the chamber intersected with E'.  Fully deterministic for a fixed seed.
pub fn enumerate_chambers(d: &BlockDatum, seed: u64) -> Result<Vec<Chamber>> {
    let hyps = chamber_hyperplanes(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chambers = Vec::new();
    let mut stack: Vec<Vec<i8>> = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        let Some(ladder) = fm_ladder(sign_system(&hyps, &prefix, d.rank_e)) else {
            continue;
        };
        if prefix.len() == hyps.len() {
            let representative = sample_in_region(d, &ladder, &prefix, None, &mut rng)?;
            chambers.push(Chamber { signs: prefix, representative });
            continue;
        }
        // Depth-first, minus branch explored first (pushed last).
        let mut plus = prefix.clone();
        plus.push(1);
        stack.push(plus);
        let mut minus = prefix;
        minus.push(-1);
        stack.push(minus);
    }
    Ok(chambers)
}

/// Draw points from a feasible ladder until one passes the E' test (or the
/// E'' test plus an exact-zero-set condition when `zero_check` is given).
fn sample_in_region(
    d: &BlockDatum,
    ladder: &[StrictSystem],
    signs: &[i8],
    zero_check: Option<(&[Vec<BigRational>], &dyn Fn(&Point) -> bool)>,
    rng: &mut ChaCha8Rng,
) -> Result<Point> {
    for _ in 0..DEFAULT_SAMPLE_TRIES {
        let raw = sample_interior(ladder, rng);
        let phi = match zero_check {
            Some((basis, _)) => span_point(basis, &raw, d.rank_e),
            None => raw,
        };
        let generic = match zero_check {
            Some((_, check)) => membership_e_double_prime(d, &phi) && check(&phi),
            None => membership_e_prime(d, &phi),
        };
        if generic && chamber_signs_of(d, &phi).as_deref() == Some(signs) {
            return Ok(phi);
        }
    }
    Err(Error::SamplingExhausted { tries: DEFAULT_SAMPLE_TRIES })
}

/// Combine nullspace basis vectors with coordinates `t` into an ambient
/// point; the empty basis yields the origin.
fn span_point(basis: &[Vec<BigRational>], t: &Point, ambient: usize) -> Point {
    let mut phi = vec![BigRational::zero(); ambient];
    for (b, tl) in basis.iter().zip(t) {
        for (xi, bi) in phi.iter_mut().zip(b) {
            *xi += tl * bi;
        }
    }
    phi
}

/// A representative of the chamber with the given sign vector: a rational
/// point realizing all signs strictly and lying in E'.
pub fn representative(d: &BlockDatum, signs: &[i8], seed: u64) -> Result<Point> {
    let hyps = chamber_hyperplanes(d);
    if signs.len() != hyps.len() || signs.iter().any(|s| !matches!(s, -1 | 1)) {
        return Err(Error::Precondition(format!(
            "sign vector must have {} entries of +-1",
            hyps.len()
        )));
    }
    let ladder =
        fm_ladder(sign_system(&hyps, signs, d.rank_e)).ok_or(Error::InfeasibleSignVector)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_in_region(d, &ladder, signs, None, &mut rng)
}

// ---------------------------------------------------------------------------
// Faces
// ---------------------------------------------------------------------------

/// The candidate roots whose vanishing defines faces: alphas of starred car
/// entries together with the centralizer roots, one representative per
/// +-pair, sorted.
fn face_root_pool(d: &BlockDatum) -> Vec<IVec> {
    let mut pool: BTreeSet<IVec> = BTreeSet::new();
    for e in d.car_star() {
        pool.insert(positive_form(&e.alpha));
    }
    for r in &d.centralizer_roots {
        pool.insert(positive_form(r));
    }
    pool.into_iter().collect()
}

fn positive_form(v: &[i64]) -> IVec {
    if lex_positive(v) {
        v.to_vec()
    } else {
        v.iter().map(|x| -x).collect()
    }
}

/// Enumerate the faces of one chamber: the distinct zero sets among the
/// candidate roots realized by points of the open chamber inside E'', each
/// with a representative.  Faces are sorted by zero-set size, then
/// lexicographically; the empty face comes first.
pub fn enumerate_faces(
    d: &BlockDatum,
    chambers: &[Chamber],
    chamber_index: usize,
    seed: u64,
) -> Result<Vec<Face>> {
    let chamber = &chambers[chamber_index];
    let hyps = chamber_hyperplanes(d);
    let pool = face_root_pool(d);
    let pool_rational: RMat = pool
        .iter()
        .map(|v| v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ (chamber_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut faces: Vec<Face> = Vec::new();
    let max_size = d.rank_e.min(pool.len());
    for_each_subset(pool.len(), max_size, |subset| -> Result<()> {
        let span: RMat = subset.iter().map(|&k| pool_rational[k].clone()).collect();
        if !subset.is_empty() && rat_rank(&span) < subset.len() {
            return Ok(());
        }
        let zero_set: Vec<usize> = (0..pool.len())
            .filter(|&k| {
                subset.contains(&k) || rat_in_span(&span, &pool_rational[k])
            })
            .collect();
        if !seen.insert(zero_set.clone()) {
            return Ok(());
        }

        // Parametrize the common kernel of the zero set and restrict the
        // chamber system to it.
        let basis = rat_nullspace(&span, d.rank_e);
        let mut sys = StrictSystem::new(basis.len());
        for ((alpha, n), &s) in hyps.iter().zip(&chamber.signs) {
            let sr = BigRational::from_integer(i64::from(s).into());
            let coeffs: Vec<BigRational> = basis
                .iter()
                .map(|b| {
                    &sr * b
                        .iter()
                        .zip(alpha)
                        .map(|(bi, &ai)| bi * BigRational::from_integer(ai.into()))
                        .sum::<BigRational>()
                })
                .collect();
            sys.push(coeffs, &sr * BigRational::from_integer((*n - 2).into()));
        }
        let Some(ladder) = fm_ladder(sys) else {
            return Ok(());
        };

        let expected = zero_set.clone();
        let pool_ref = &pool;
        let exact_zero_set = move |phi: &Point| {
            (0..pool_ref.len()).all(|k| {
                let vanishes = pairing_value(phi, &pool_ref[k]).is_zero();
                vanishes == expected.binary_search(&k).is_ok()
            })
        };

        // The chamber's own representative realizes the empty face for free.
        let representative = if zero_set.is_empty()
            && exact_zero_set(&chamber.representative)
        {
            chamber.representative.clone()
        } else {
            sample_in_region(
                d,
                &ladder,
                &chamber.signs,
                Some((&basis, &exact_zero_set)),
                &mut rng,
            )?
        };

        let mut zero_roots: Vec<IVec> = Vec::new();
        for &k in &zero_set {
            zero_roots.push(pool[k].clone());
            zero_roots.push(pool[k].iter().map(|x| -x).collect());
        }
        zero_roots.sort();
        faces.push(Face { chamber: chamber_index, zero_roots, representative });
        Ok(())
    })?;

    faces.sort_by(|a, b| {
        (a.zero_roots.len(), &a.zero_roots).cmp(&(b.zero_roots.len(), &b.zero_roots))
    });
    Ok(faces)
}

/// Faces of every chamber, flattened in chamber order.
pub fn all_faces(d: &BlockDatum, chambers: &[Chamber], seed: u64) -> Result<Vec<Face>> {
    let mut out = Vec::new();
    for idx in 0..chambers.len() {
        out.extend(enumerate_faces(d, chambers, idx, seed)?);
    }
    Ok(out)
}

/// Visit every subset of `{0..n}` of size at most `max_size`, smaller sizes
/// first, lexicographic within a size; the callback may fail fast.
fn for_each_subset<E>(
    n: usize,
    max_size: usize,
    mut f: impl FnMut(&[usize]) -> std::result::Result<(), E>,
) -> std::result::Result<(), E> {
    f(&[])?;
    for size in 1..=max_size.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            f(&idx)?;
            // Rightmost index that can still advance.
            let mut k = size;
            while k > 0 && idx[k - 1] == n - size + (k - 1) {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(())
}

/// Group the faces by chamber index.
pub fn faces_by_chamber(faces: &[Face]) -> BTreeMap<usize, Vec<Face>> {
    let mut map: BTreeMap<usize, Vec<Face>> = BTreeMap::new();
    for f in faces {
        map.entry(f.chamber).or_default().push(f.clone());
    }
    map
}
