//! Root systems of types A, B, C, D, G2 and their reflection groups.
//!
//! Roots live in the weight lattice X (coordinates over the fundamental
//! weights); coroots live in the dual lattice Y (coordinates over the simple
//! coroots).  In these bases the pairing Y x X -> Z is the standard dot
//! product, which the explicit `coroot_pairing` matrix records.  Reflection
//! groups are enumerated as integer matrix groups by breadth-first closure,
//! keeping word lengths, with a cap to guard against infinite input.

use std::collections::HashMap;
use std::fmt;

use num::{BigRational, Zero};

use crate::error::{Error, Result};
use crate::exact::IntLaurent;

/// Integer vector (root or coroot coordinates).
pub type IVec = Vec<i64>;
/// Integer matrix, row major.
pub type IMat = Vec<Vec<i64>>;

/// Default cap on group closures.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

pub fn identity_matrix(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    mat_mul_checked(a, b).expect("matrix product overflowed i64")
}

/// Matrix product with overflow detection, for closures of unvalidated groups.
pub fn mat_mul_checked(a: &IMat, b: &IMat) -> Option<IMat> {
    let n = a.len();
    let m = if n == 0 { 0 } else { b[0].len() };
    let k = b.len();
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for l in 0..k {
            let ail = a[i][l];
            if ail == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].checked_add(ail.checked_mul(b[l][j])?)?;
            }
        }
    }
    Some(out)
}

pub fn mat_vec(a: &IMat, v: &[i64]) -> IVec {
    a.iter().map(|row| row.iter().zip(v).map(|(r, x)| r * x).sum()).collect()
}

pub fn transpose(a: &IMat) -> IMat {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

/// Exact inverse of an integer matrix that is invertible over Z.
///
/// Returns an error when the matrix is singular or the inverse is not
/// integral (det != +-1).
pub fn mat_inverse_unimodular(a: &IMat) -> Result<IMat> {
    let n = a.len();
    let mut work: Vec<Vec<BigRational>> = a
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(i64::from(i == j).into())).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !work[r][col].is_zero())
            .ok_or_else(|| Error::Shape("matrix is singular over Q".into()))?;
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let p = work[col][col].clone();
        for j in 0..n {
            work[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..n {
            if r == col || work[r][col].is_zero() {
                continue;
            }
            let f = work[r][col].clone();
            for j in 0..n {
                let w = &f * &work[col][j];
                work[r][j] -= w;
                let v = &f * &inv[col][j];
                inv[r][j] -= v;
            }
        }
    }
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if !inv[i][j].is_integer() {
                return Err(Error::Shape("matrix inverse is not integral".into()));
            }
            let val = inv[i][j].to_integer();
            out[i][j] = i64::try_from(&val)
                .map_err(|_| Error::Shape("matrix inverse entry overflows i64".into()))?;
        }
    }
    Ok(out)
}

/// Generic breadth-first group closure with word lengths.
///
/// Elements are discovered in BFS order starting from the identity, so the
/// element order is deterministic for a fixed generator list.
pub fn close_group<T, K, F, H>(
    identity: T,
    generators: &[T],
    mul: F,
    key: H,
    cap: usize,
) -> Result<(Vec<T>, Vec<usize>)>
where
    T: Clone,
    K: std::hash::Hash + Eq,
    F: Fn(&T, &T) -> Option<T>,
    H: Fn(&T) -> K,
{
    let mut elements = vec![identity.clone()];
    let mut lengths = vec![0usize];
    let mut seen: HashMap<K, usize> = HashMap::new();
    seen.insert(key(&identity), 0);
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &idx in &frontier {
            let base = elements[idx].clone();
            let len = lengths[idx];
            for g in generators {
                let prod = mul(g, &base).ok_or(Error::GroupOverflow)?;
                let k = key(&prod);
                if !seen.contains_key(&k) {
                    if elements.len() >= cap {
                        return Err(Error::GroupCapExceeded { cap });
                    }
                    seen.insert(k, elements.len());
                    next.push(elements.len());
                    elements.push(prod);
                    lengths.push(len + 1);
                }
            }
        }
        frontier = next;
    }
    Ok((elements, lengths))
}

/// A finite group of integer matrices with word lengths over its generators.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    pub generators: Vec<IMat>,
    pub elements: Vec<IMat>,
    pub lengths: Vec<usize>,
    dim: usize,
}

impl MatrixGroup {
    /// Closes `generators` (n x n integer matrices) under multiplication.
    pub fn enumerate(generators: Vec<IMat>, dim: usize, cap: usize) -> Result<Self> {
        for g in &generators {
            if g.len() != dim || g.iter().any(|row| row.len() != dim) {
                return Err(Error::Shape(format!("generator is not {dim}x{dim}")));
            }
        }
        let id = identity_matrix(dim);
        let (elements, lengths) = close_group(
            id,
            &generators,
            mat_mul_checked,
            |m: &IMat| m.iter().flatten().copied().collect::<Vec<i64>>(),
            cap,
        )?;
        Ok(Self { generators, elements, lengths, dim })
    }

    /// The trivial group in dimension `dim`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            generators: Vec::new(),
            elements: vec![identity_matrix(dim)],
            lengths: vec![0],
            dim,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Poincare polynomial: sum of v^(2 * length) over all elements.
    pub fn poincare(&self) -> IntLaurent {
        poincare_from_lengths(&self.lengths)
    }
}

/// Sum of v^(2l) over a multiset of lengths.
pub fn poincare_from_lengths(lengths: &[usize]) -> IntLaurent {
    IntLaurent::from_terms(lengths.iter().map(|&l| (2 * l as i64, 1i64)))
}

/// The supported simple types.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSystemType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    G2,
}

impl RootSystemType {
    /// Parses labels like "A1", "B3", "G2".
    pub fn parse(label: &str) -> Result<Self> {
        let label = label.trim();
        let bad = || Error::Precondition(format!("unknown root system type {label:?}"));
        let (family, rank) = label.split_at(1);
        let n: usize = rank.parse().map_err(|_| bad())?;
        match (family, n) {
            ("A" | "a", n) if n >= 1 => Ok(Self::A(n)),
            ("B" | "b", n) if n >= 2 => Ok(Self::B(n)),
            ("C" | "c", n) if n >= 2 => Ok(Self::C(n)),
            ("D" | "d", n) if n >= 3 => Ok(Self::D(n)),
            ("G" | "g", 2) => Ok(Self::G2),
            _ => Err(bad()),
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            Self::A(n) | Self::B(n) | Self::C(n) | Self::D(n) => n,
            Self::G2 => 2,
        }
    }

    /// Cartan matrix with entries `C[i][j] = <alpha_j, alpha_i^vee>`.
    pub fn cartan(&self) -> IMat {
        let n = self.rank();
        let mut c = identity_matrix(n);
        for row in c.iter_mut() {
            for x in row.iter_mut() {
                *x *= 2;
            }
        }
        let chain = |c: &mut IMat, upto: usize| {
            for i in 0..upto {
                c[i][i + 1] = -1;
                c[i + 1][i] = -1;
            }
        };
        match *self {
            Self::A(_) => chain(&mut c, n - 1),
            Self::B(_) => {
                chain(&mut c, n - 1);
                c[n - 1][n - 2] = -2;
            }
            Self::C(_) => {
                chain(&mut c, n - 1);
                c[n - 2][n - 1] = -2;
                c[n - 1][n - 2] = -1;
            }
            Self::D(_) => {
                chain(&mut c, n - 2);
                c[n - 3][n - 1] = -1;
                c[n - 1][n - 3] = -1;
            }
            Self::G2 => {
                c[0][1] = -1;
                c[1][0] = -3;
            }
        }
        c
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::A(n) => write!(f, "A{n}"),
            Self::B(n) => write!(f, "B{n}"),
            Self::C(n) => write!(f, "C{n}"),
            Self::D(n) => write!(f, "D{n}"),
            Self::G2 => write!(f, "G2"),
        }
    }
}

/// One root together with all three coordinate systems attached to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    /// Coordinates over the fundamental weights.
    pub weight: IVec,
    /// Coordinates over the simple roots.
    pub simple: IVec,
    /// Coordinates of the coroot over the simple coroots.
    pub coroot: IVec,
}

impl Root {
    /// True for roots that are positive (nonnegative simple-root coordinates).
    pub fn is_positive(&self) -> bool {
        self.simple.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
    }
}

/// A finite reduced root system with explicit coroot data.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub kind: RootSystemType,
    pub rank: usize,
    pub cartan: IMat,
    /// The pairing matrix P with `<y : x> = y^T P x`; identity in the
    /// coroot/weight bases used here, kept explicit so non-self-dual lattice
    /// conventions stay visible at call sites.
    pub coroot_pairing: IMat,
    /// All roots, sorted by simple-root coordinates; negatives included.
    pub roots: Vec<Root>,
    /// Indices of the simple roots within `roots`.
    pub simple_indices: Vec<usize>,
    index: HashMap<IVec, usize>,
}

impl RootSystem {
    /// Builds the root system of the given type.
    pub fn new(kind: RootSystemType) -> Result<Self> {
        let rank = kind.rank();
        let cartan = kind.cartan();
        // Simple root i: weight coords = column i of the Cartan matrix,
        // simple-root coords = e_i, coroot coords = e_i.
        let mut triples: Vec<Root> = (0..rank)
            .map(|i| Root {
                weight: (0..rank).map(|a| cartan[a][i]).collect(),
                simple: (0..rank).map(|a| i64::from(a == i)).collect(),
                coroot: (0..rank).map(|a| i64::from(a == i)).collect(),
            })
            .collect();
        let mut seen: HashMap<IVec, usize> = triples
            .iter()
            .enumerate()
            .map(|(k, r)| (r.weight.clone(), k))
            .collect();
        // Close under the simple reflections, transforming all three
        // coordinate systems in parallel.
        let mut head = 0;
        while head < triples.len() {
            let cur = triples[head].clone();
            head += 1;
            for i in 0..rank {
                let wt_pair = cur.weight[i]; // <alpha, alpha_i^vee>
                let weight: IVec = (0..rank)
                    .map(|a| cur.weight[a] - wt_pair * cartan[a][i])
                    .collect();
                if seen.contains_key(&weight) {
                    continue;
                }
                let rt_pair: i64 = (0..rank).map(|j| cartan[i][j] * cur.simple[j]).sum();
                let mut simple = cur.simple.clone();
                simple[i] -= rt_pair;
                let co_pair: i64 = (0..rank).map(|j| cartan[j][i] * cur.coroot[j]).sum();
                let mut coroot = cur.coroot.clone();
                coroot[i] -= co_pair;
                seen.insert(weight.clone(), triples.len());
                triples.push(Root { weight, simple, coroot });
            }
        }
        triples.sort_by(|a, b| a.simple.cmp(&b.simple));
        let index: HashMap<IVec, usize> =
            triples.iter().enumerate().map(|(k, r)| (r.weight.clone(), k)).collect();
        let simple_indices = (0..rank)
            .map(|i| {
                let key: IVec = (0..rank).map(|a| i64::from(a == i)).collect();
                triples.iter().position(|r| r.simple == key).expect("simple root present")
            })
            .collect();
        Ok(Self {
            kind,
            rank,
            cartan,
            coroot_pairing: identity_matrix(rank),
            roots: triples,
            simple_indices,
            index,
        })
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// Looks a root up by its weight coordinates.
    pub fn index_of(&self, weight: &[i64]) -> Option<usize> {
        self.index.get(weight).copied()
    }

    /// The reflection in root `idx` as a matrix on weight coordinates:
    /// `s(x) = x - <x, alpha^vee> alpha`.
    pub fn reflection_matrix(&self, idx: usize) -> IMat {
        let r = &self.roots[idx];
        let n = self.rank;
        let mut m = identity_matrix(n);
        for a in 0..n {
            for b in 0..n {
                m[a][b] -= r.weight[a] * r.coroot[b];
            }
        }
        m
    }

    /// The full Weyl group, generated by the simple reflections.
    pub fn weyl_group(&self, cap: usize) -> Result<MatrixGroup> {
        let gens = self.simple_indices.iter().map(|&i| self.reflection_matrix(i)).collect();
        MatrixGroup::enumerate(gens, self.rank, cap)
    }

    /// Degree of a root under additive degrees assigned to the simple roots.
    pub fn root_degree(&self, idx: usize, degrees: &[i64]) -> i64 {
        self.roots[idx].simple.iter().zip(degrees).map(|(c, d)| c * d).sum()
    }
}

/// A reflection subsystem of a root system, with its own simple system and group.
#[derive(Clone, Debug)]
pub struct Subsystem {
    /// Indices into the ambient root list, closed under its reflections.
    pub root_indices: Vec<usize>,
    /// Indices (into the ambient list) of the subsystem's simple roots.
    pub simple_indices: Vec<usize>,
    pub group: MatrixGroup,
}

/// Closes `subset` (weight coordinates of ambient roots) under its own
/// reflections and returns the subsystem with a canonical simple system.
///
/// The simple system consists of the lexicographically positive roots of the
/// subsystem that are not sums of two positive subsystem roots; lengths in the
/// returned group are with respect to those simple reflections.
pub fn reflection_subgroup(rs: &RootSystem, subset: &[IVec], cap: usize) -> Result<Subsystem> {
    let mut in_sub = vec![false; rs.root_count()];
    let mut stack: Vec<usize> = Vec::new();
    for wt in subset {
        let idx = rs
            .index_of(wt)
            .ok_or_else(|| Error::Precondition(format!("{wt:?} is not a root")))?;
        let neg: IVec = wt.iter().map(|x| -x).collect();
        let nidx = rs.index_of(&neg).expect("root systems are negation closed");
        for k in [idx, nidx] {
            if !in_sub[k] {
                in_sub[k] = true;
                stack.push(k);
            }
        }
    }
    // Closure under reflections of subsystem members.
    loop {
        let members: Vec<usize> = (0..rs.root_count()).filter(|&k| in_sub[k]).collect();
        let mut grew = false;
        for &b in &members {
            let m = rs.reflection_matrix(b);
            for &g in &members {
                let img = mat_vec(&m, &rs.roots[g].weight);
                let k = rs.index_of(&img).expect("reflection of a root is a root");
                if !in_sub[k] {
                    in_sub[k] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let root_indices: Vec<usize> = (0..rs.root_count()).filter(|&k| in_sub[k]).collect();
    let positives: Vec<usize> = root_indices
        .iter()
        .copied()
        .filter(|&k| lex_positive(&rs.roots[k].weight))
        .collect();
    let simple_indices: Vec<usize> = positives
        .iter()
        .copied()
        .filter(|&p| {
            !positives.iter().any(|&q1| {
                positives.iter().any(|&q2| {
                    q1 != p
                        && q2 != p
                        && add_vec(&rs.roots[q1].weight, &rs.roots[q2].weight) == rs.roots[p].weight
                })
            })
        })
        .collect();
    let gens: Vec<IMat> = simple_indices.iter().map(|&i| rs.reflection_matrix(i)).collect();
    let group = if gens.is_empty() {
        MatrixGroup::trivial(rs.rank)
    } else {
        MatrixGroup::enumerate(gens, rs.rank, cap)?
    };
    Ok(Subsystem { root_indices, simple_indices, group })
}

fn add_vec(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Lexicographic positivity: the first nonzero coordinate is positive.
pub fn lex_positive(v: &[i64]) -> bool {
    v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// A root system given only by its set of vectors, with reflections recovered
/// from root strings.
///
/// For roots `b`, `g` in a reduced crystallographic set, the pairing
/// `<g, b^vee>` equals `r - q` where the b-string through g is
/// `g - r b, ..., g + q b`; no inner product is needed.  This is how
/// subsystems of a datum's centralizer roots are handled, where only raw
/// vectors are available.
#[derive(Clone, Debug)]
pub struct StringRootSet {
    pub vectors: Vec<IVec>,
    index: HashMap<IVec, usize>,
}

impl StringRootSet {
    pub fn new(vectors: Vec<IVec>) -> Self {
        let mut vs = vectors;
        vs.sort();
        vs.dedup();
        let index = vs.iter().enumerate().map(|(k, v)| (v.clone(), k)).collect();
        Self { vectors: vs, index }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn contains(&self, v: &[i64]) -> bool {
        self.index.contains_key(v)
    }

    /// `<g, b^vee>` computed from the b-string through g inside this set.
    fn string_pairing(&self, b: usize, g: usize) -> i64 {
        let bv = &self.vectors[b];
        let gv = &self.vectors[g];
        // The string construction below only measures <g, b^vee> for g not
        // proportional to b; handle the proportional cases directly.
        if gv == bv {
            return 2;
        }
        if gv.iter().zip(bv).all(|(x, y)| *x == -*y) {
            return -2;
        }
        let mut r = 0i64;
        loop {
            let cand: IVec = gv.iter().zip(bv).map(|(x, y)| x - (r + 1) * y).collect();
            if self.contains(&cand) {
                r += 1;
            } else {
                break;
            }
        }
        let mut q = 0i64;
        loop {
            let cand: IVec = gv.iter().zip(bv).map(|(x, y)| x + (q + 1) * y).collect();
            if self.contains(&cand) {
                q += 1;
            } else {
                break;
            }
        }
        r - q
    }

    /// The reflection `s_b(g) = g - <g, b^vee> b` as a vector.
    pub fn reflect(&self, b: usize, g: usize) -> IVec {
        let pair = self.string_pairing(b, g);
        self.vectors[g]
            .iter()
            .zip(&self.vectors[b])
            .map(|(x, y)| x - pair * y)
            .collect()
    }

    /// Checks that the set is closed under negation and its own reflections.
    pub fn validate_closed(&self) -> Result<()> {
        for v in &self.vectors {
            let neg: IVec = v.iter().map(|x| -x).collect();
            if !self.contains(&neg) {
                return Err(Error::SubsystemNotClosed(format!("missing -{v:?}")));
            }
        }
        for b in 0..self.len() {
            for g in 0..self.len() {
                let img = self.reflect(b, g);
                if !self.contains(&img) {
                    return Err(Error::SubsystemNotClosed(format!(
                        "s_{:?}({:?}) = {:?} is outside the set",
                        self.vectors[b], self.vectors[g], img
                    )));
                }
            }
        }
        Ok(())
    }

    /// The reflection `s_b` as a permutation of the set.
    fn reflection_permutation(&self, b: usize) -> Vec<usize> {
        (0..self.len())
            .map(|g| *self.index.get(&self.reflect(b, g)).expect("validated closed"))
            .collect()
    }

    /// Canonical simple system: lexicographically positive vectors that are
    /// not sums of two positive vectors of the set.
    pub fn simple_system(&self) -> Vec<usize> {
        let positives: Vec<usize> =
            (0..self.len()).filter(|&k| lex_positive(&self.vectors[k])).collect();
        positives
            .iter()
            .copied()
            .filter(|&p| {
                !positives.iter().any(|&q1| {
                    positives.iter().any(|&q2| {
                        q1 != p
                            && q2 != p
                            && add_vec(&self.vectors[q1], &self.vectors[q2]) == self.vectors[p]
                    })
                })
            })
            .collect()
    }

    /// Word lengths of the reflection group generated by the simple
    /// reflections, acting faithfully on the set by permutations.
    pub fn group_lengths(&self, cap: usize) -> Result<Vec<usize>> {
        self.validate_closed()?;
        if self.is_empty() {
            return Ok(vec![0]);
        }
        let gens: Vec<Vec<usize>> =
            self.simple_system().iter().map(|&b| self.reflection_permutation(b)).collect();
        let id: Vec<usize> = (0..self.len()).collect();
        let compose = |a: &Vec<usize>, b: &Vec<usize>| -> Option<Vec<usize>> {
            Some(b.iter().map(|&i| a[i]).collect())
        };
        let (_, lengths) = close_group(id, &gens, compose, |p: &Vec<usize>| p.clone(), cap)?;
        Ok(lengths)
    }

    /// Number of positive roots (half the set size).
    pub fn positive_count(&self) -> usize {
        self.len() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(label: &str) -> RootSystem {
        RootSystem::new(RootSystemType::parse(label).unwrap()).unwrap()
    }

    #[test]
    fn root_counts() {
        for (label, count) in
            [("A1", 2), ("A2", 6), ("A3", 12), ("B2", 8), ("B3", 18), ("C3", 18), ("D4", 24), ("G2", 12)]
        {
            assert_eq!(system(label).root_count(), count, "{label}");
        }
    }

    #[test]
    fn weyl_group_orders() {
        for (label, order) in [("A1", 2), ("A2", 6), ("B2", 8), ("G2", 12), ("A3", 24), ("D4", 192)] {
            let rs = system(label);
            assert_eq!(rs.weyl_group(DEFAULT_GROUP_CAP).unwrap().order(), order, "{label}");
        }
    }

    #[test]
    fn a1_weight_coordinates() {
        // alpha = 2*omega, so <t alpha^vee : alpha> = 2t.
        let rs = system("A1");
        assert_eq!(rs.roots.iter().map(|r| r.weight.clone()).collect::<Vec<_>>(), vec![vec![-2], vec![2]]);
        let w = rs.weyl_group(100).unwrap();
        assert_eq!(w.order(), 2);
        assert!(w.elements.contains(&vec![vec![-1]]));
    }

    #[test]
    fn poincare_polynomials() {
        let a2 = system("A2").weyl_group(100).unwrap().poincare();
        assert_eq!(a2, IntLaurent::from_terms([(0, 1i64), (2, 2), (4, 2), (6, 1)]));
        let b2 = system("B2").weyl_group(100).unwrap().poincare();
        assert_eq!(b2, IntLaurent::from_terms([(0, 1i64), (2, 2), (4, 2), (6, 2), (8, 1)]));
        use num::BigInt;
        assert_eq!(a2.eval_at_one(), BigInt::from(6));
    }

    #[test]
    fn cap_is_enforced() {
        let rs = system("B3");
        match rs.weyl_group(10) {
            Err(Error::GroupCapExceeded { cap: 10 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn reflection_subgroup_cases() {
        let a2 = system("A2");
        // Empty subset: trivial group.
        let triv = reflection_subgroup(&a2, &[], 100).unwrap();
        assert_eq!(triv.group.order(), 1);
        // All roots: the full Weyl group with the standard simple system.
        let all: Vec<IVec> = a2.roots.iter().map(|r| r.weight.clone()).collect();
        let full = reflection_subgroup(&a2, &all, 100).unwrap();
        assert_eq!(full.group.order(), 6);
        assert_eq!(full.simple_indices.len(), 2);
        assert_eq!(full.group.poincare(), IntLaurent::from_terms([(0, 1i64), (2, 2), (4, 2), (6, 1)]));
        // Long roots of B2 form A1 x A1 of order 4.
        let b2 = system("B2");
        let long = b2_long_roots(&b2);
        assert_eq!(long.len(), 4);
        let sub = reflection_subgroup(&b2, &long, 100).unwrap();
        assert_eq!(sub.root_indices.len(), 4);
        assert_eq!(sub.group.order(), 4);
        assert_eq!(sub.group.poincare(), IntLaurent::from_terms([(0, 1i64), (2, 2), (4, 1)]));
    }

    fn is_long_b2(r: &Root) -> bool {
        // In B2 with alpha_1 long: long roots are +-alpha_1 and +-(alpha_1 + 2 alpha_2).
        let s: Vec<i64> = r.simple.iter().map(|c| c.abs()).collect();
        s == vec![1, 0] || s == vec![1, 2]
    }

    fn b2_long_roots(b2: &RootSystem) -> Vec<IVec> {
        b2.roots.iter().filter(|r| is_long_b2(r)).map(|r| r.weight.clone()).collect()
    }

    #[test]
    fn string_root_set_recovers_a2() {
        let a2 = system("A2");
        let vectors: Vec<IVec> = a2.roots.iter().map(|r| r.weight.clone()).collect();
        let set = StringRootSet::new(vectors);
        set.validate_closed().unwrap();
        assert_eq!(set.positive_count(), 3);
        assert_eq!(set.simple_system().len(), 2);
        let lengths = set.group_lengths(100).unwrap();
        assert_eq!(lengths.len(), 6);
        assert_eq!(poincare_from_lengths(&lengths), IntLaurent::from_terms([(0, 1i64), (2, 2), (4, 2), (6, 1)]));
    }

    #[test]
    fn string_root_set_sees_simple_pairs_as_orthogonal() {
        // {+-alpha, +-beta} with strings computed inside the set is A1 x A1:
        // the connecting root alpha + beta is absent, so the string pairings
        // vanish.  This is the correct intrinsic reading for closed subsets.
        let a2 = system("A2");
        let a = a2.roots[a2.simple_indices[0]].weight.clone();
        let b = a2.roots[a2.simple_indices[1]].weight.clone();
        let neg: IVec = a.iter().map(|x| -x).collect();
        let negb: IVec = b.iter().map(|x| -x).collect();
        let set = StringRootSet::new(vec![a, neg, b, negb]);
        set.validate_closed().unwrap();
        let lengths = set.group_lengths(100).unwrap();
        assert_eq!(lengths.len(), 4);
        assert_eq!(
            poincare_from_lengths(&lengths),
            IntLaurent::from_terms([(0, 1i64), (2, 2), (4, 1)])
        );
    }

    #[test]
    fn string_root_set_rejects_missing_negatives() {
        let set = StringRootSet::new(vec![vec![2, 0], vec![-2, 0], vec![1, 1]]);
        assert!(set.validate_closed().is_err());
        assert!(set.group_lengths(100).is_err());
    }

    #[test]
    fn unimodular_inverse() {
        let m = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(mat_inverse_unimodular(&m).unwrap(), vec![vec![1, -1], vec![0, 1]]);
        let s = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(mat_inverse_unimodular(&s).unwrap(), s);
        assert!(mat_inverse_unimodular(&vec![vec![2, 0], vec![0, 1]]).is_err());
    }
}
