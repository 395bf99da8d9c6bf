//! Weighted root data: the combinatorial input describing a graded Lie
//! algebra block problem.
//!
//! A datum records the grading modulus `m`, the weight `eta` of the polarising
//! cocharacter, the dimension of the parameter space E, a finite multiset
//! `car` of tuples `(i, alpha, n, dim)` (dimension of the `(alpha, n)`-weight
//! space in degree `i`), generators of a finite Weyl-type group acting on the
//! alpha-coordinates, and the set of centralizer roots.  The pairing between E
//! and alpha-coordinates is the standard dot product; the group acts on E by
//! the contragredient matrices.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootsys::{
    mat_inverse_unimodular, mat_vec, transpose, IMat, IVec, MatrixGroup, RootSystem,
    RootSystemType, DEFAULT_GROUP_CAP,
};

/// One line of the car table: `dim g^{alpha, n}_i = dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarEntry {
    /// Degree residue, stored as a representative in `[0, m)`.
    pub i: i64,
    /// Weight vector in the coordinates paired with E.
    pub alpha: IVec,
    /// Second grading component.
    pub n: i64,
    /// Dimension of the corresponding weight space; positive.
    pub dim: i64,
}

/// A weighted root datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDatum {
    pub m: i64,
    pub eta: i64,
    #[serde(rename = "rankE")]
    pub rank_e: usize,
    pub car: Vec<CarEntry>,
    #[serde(rename = "weylGenerators")]
    pub weyl_generators: Vec<IMat>,
    #[serde(rename = "centralizerRoots")]
    pub centralizer_roots: Vec<IVec>,
}

/// The kinds of invariant a datum can violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Structure,
    DuplicateCarEntry,
    CarSymmetry,
    GroupNotFinite,
    GroupMovesCar,
    GroupMovesCentralizer,
    CentralizerNegation,
    Sl2Symmetry,
}

/// A single validation failure, pointing at the offending entry.
#[derive(Clone, Debug)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] {}", self.kind, self.message)
    }
}

/// Joins violations for error display.
pub fn render_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n")
}

impl BlockDatum {
    /// The distinguished residue `eta mod m`.
    pub fn delta(&self) -> i64 {
        self.eta.rem_euclid(self.m)
    }

    /// Entries with `alpha != 0` (the "starred" part of the car table).
    pub fn car_star(&self) -> impl Iterator<Item = &CarEntry> {
        self.car.iter().filter(|e| e.alpha.iter().any(|&x| x != 0))
    }

    /// Entries of `car_star` in a given residue class.
    pub fn car_star_residue(&self, r: i64) -> impl Iterator<Item = &CarEntry> {
        let r = r.rem_euclid(self.m);
        self.car_star().filter(move |e| e.i == r)
    }

    /// The group generated by `weylGenerators`, acting on alpha-coordinates.
    pub fn weyl_group(&self, cap: usize) -> Result<MatrixGroup> {
        MatrixGroup::enumerate(self.weyl_generators.clone(), self.rank_e, cap)
    }

    /// The same group acting on E by contragredient matrices, so that
    /// `<w phi : w alpha> = <phi : alpha>`.
    pub fn weyl_group_on_e(&self, cap: usize) -> Result<MatrixGroup> {
        let gens = self
            .weyl_generators
            .iter()
            .map(|g| mat_inverse_unimodular(&transpose(g)))
            .collect::<Result<Vec<_>>>()?;
        MatrixGroup::enumerate(gens, self.rank_e, cap)
    }

    /// Structural well-formedness: shapes, ranges, positivity.
    fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |msg: String| {
            out.push(Violation { kind: ViolationKind::Structure, message: msg })
        };
        if self.m < 1 {
            push(format!("m must be >= 1, got {}", self.m));
        }
        if self.eta == 0 {
            push("eta must be nonzero".into());
        }
        for (k, e) in self.car.iter().enumerate() {
            if e.alpha.len() != self.rank_e {
                push(format!("car[{k}]: alpha has length {}, expected rankE = {}", e.alpha.len(), self.rank_e));
            }
            if e.dim < 1 {
                push(format!("car[{k}]: dim must be positive, got {}", e.dim));
            }
            if self.m >= 1 && !(0..self.m).contains(&e.i) {
                push(format!("car[{k}]: residue {} is outside [0, {})", e.i, self.m));
            }
        }
        for (k, g) in self.weyl_generators.iter().enumerate() {
            if g.len() != self.rank_e || g.iter().any(|row| row.len() != self.rank_e) {
                push(format!("weylGenerators[{k}] is not a {0}x{0} matrix", self.rank_e));
            }
        }
        for (k, r) in self.centralizer_roots.iter().enumerate() {
            if r.len() != self.rank_e {
                push(format!("centralizerRoots[{k}] has length {}, expected {}", r.len(), self.rank_e));
            }
            if r.iter().all(|&x| x == 0) {
                push(format!("centralizerRoots[{k}] is the zero vector"));
            }
        }
        out
    }

    /// Checks every datum invariant and reports all failures.
    pub fn validate(&self, cap: usize) -> Vec<Violation> {
        let mut out = self.structural_violations();
        if !out.is_empty() {
            // Shape errors make the semantic checks meaningless.
            return out;
        }

        // Car entries are unique on (i, alpha, n).
        let mut index: BTreeMap<(i64, IVec, i64), i64> = BTreeMap::new();
        for e in &self.car {
            if index.insert((e.i, e.alpha.clone(), e.n), e.dim).is_some() {
                out.push(Violation {
                    kind: ViolationKind::DuplicateCarEntry,
                    message: format!("duplicate car entry (i={}, alpha={:?}, n={})", e.i, e.alpha, e.n),
                });
            }
        }

        // Symmetry: (i, alpha, n, dim) -> (-i, -alpha, -n, dim).
        for e in &self.car {
            let key = (
                (-e.i).rem_euclid(self.m),
                e.alpha.iter().map(|x| -x).collect::<IVec>(),
                -e.n,
            );
            match index.get(&key) {
                Some(&d) if d == e.dim => {}
                Some(&d) => out.push(Violation {
                    kind: ViolationKind::CarSymmetry,
                    message: format!(
                        "car entry (i={}, alpha={:?}, n={}) has dim {} but its mirror has dim {d}",
                        e.i, e.alpha, e.n, e.dim
                    ),
                }),
                None => out.push(Violation {
                    kind: ViolationKind::CarSymmetry,
                    message: format!(
                        "car entry (i={}, alpha={:?}, n={}) has no mirror (i={}, alpha={:?}, n={})",
                        e.i, e.alpha, e.n, key.0, key.1, -e.n
                    ),
                }),
            }
        }

        // sl2 symmetry in degree delta: dim g^{alpha,2} = dim g^{-alpha,2}.
        let delta = self.delta();
        for e in self.car.iter().filter(|e| e.i == delta && e.n == 2) {
            if e.alpha.iter().all(|&x| x == 0) {
                continue;
            }
            let key = (delta, e.alpha.iter().map(|x| -x).collect::<IVec>(), 2);
            if index.get(&key) != Some(&e.dim) {
                out.push(Violation {
                    kind: ViolationKind::Sl2Symmetry,
                    message: format!(
                        "entry (i={delta}, alpha={:?}, n=2) has dim {} but (i={delta}, alpha={:?}, n=2) has dim {}",
                        e.alpha, e.dim, key.1, index.get(&key).copied().unwrap_or(0)
                    ),
                });
            }
        }

        // The group is finite.
        let group = match self.weyl_group(cap) {
            Ok(g) => g,
            Err(e) => {
                out.push(Violation {
                    kind: ViolationKind::GroupNotFinite,
                    message: format!("weylGenerators do not generate a finite group: {e}"),
                });
                return out;
            }
        };

        // Generators permute car within each residue, preserving (n, dim),
        // and stabilise the centralizer roots; then so does the whole group.
        let centralizer: HashSet<IVec> = self.centralizer_roots.iter().cloned().collect();
        for (k, g) in group.generators.iter().enumerate() {
            for e in &self.car {
                let img = mat_vec(g, &e.alpha);
                if index.get(&(e.i, img.clone(), e.n)) != Some(&e.dim) {
                    out.push(Violation {
                        kind: ViolationKind::GroupMovesCar,
                        message: format!(
                            "weylGenerators[{k}] sends car entry (i={}, alpha={:?}, n={}) to alpha={:?}, which is absent or has a different dim",
                            e.i, e.alpha, e.n, img
                        ),
                    });
                }
            }
            for r in &self.centralizer_roots {
                let img = mat_vec(g, r);
                if !centralizer.contains(&img) {
                    out.push(Violation {
                        kind: ViolationKind::GroupMovesCentralizer,
                        message: format!(
                            "weylGenerators[{k}] sends centralizer root {r:?} to {img:?}, which is not a centralizer root"
                        ),
                    });
                }
            }
        }

        // Centralizer roots are closed under negation.
        for r in &self.centralizer_roots {
            let neg: IVec = r.iter().map(|x| -x).collect();
            if !centralizer.contains(&neg) {
                out.push(Violation {
                    kind: ViolationKind::CentralizerNegation,
                    message: format!("centralizer root {r:?} has no negative"),
                });
            }
        }

        out
    }
}

/// Reads a datum from a JSON file; structural problems are parse errors,
/// semantic problems are reported as a validation error listing every failed
/// invariant.
pub fn load_datum(path: &Path) -> Result<BlockDatum> {
    let text = std::fs::read_to_string(path)?;
    load_datum_str(&text)
}

/// Same as [`load_datum`], from a string.
pub fn load_datum_str(text: &str) -> Result<BlockDatum> {
    let datum: BlockDatum =
        serde_json::from_str(text).map_err(|e| Error::DatumParse(e.to_string()))?;
    let violations = datum.validate(DEFAULT_GROUP_CAP);
    if violations.is_empty() {
        Ok(datum)
    } else {
        Err(Error::Validation(violations))
    }
}

/// Builds the principal datum of a root system graded by degrees on the
/// simple roots:
///
/// * `car` has one line `(deg(alpha) mod m, alpha, 0, 1)` per root plus the
///   Cartan line `(0, 0, 0, rank)`,
/// * the group is the subgroup of the Weyl group preserving degrees mod m,
/// * the centralizer roots are the roots of degree 0 mod m.
pub fn principal_datum(kind: RootSystemType, degrees: &[i64], m: i64, eta: i64) -> Result<BlockDatum> {
    let rs = RootSystem::new(kind)?;
    if degrees.len() != rs.rank {
        return Err(Error::Precondition(format!(
            "{} needs {} degrees, got {}",
            kind,
            rs.rank,
            degrees.len()
        )));
    }
    if m < 1 {
        return Err(Error::Precondition(format!("m must be >= 1, got {m}")));
    }
    if eta == 0 {
        return Err(Error::Precondition("eta must be nonzero".into()));
    }

    let root_degree =
        |idx: usize| -> i64 { rs.root_degree(idx, degrees) };

    let mut car: Vec<CarEntry> = (0..rs.root_count())
        .map(|idx| CarEntry {
            i: root_degree(idx).rem_euclid(m),
            alpha: rs.roots[idx].weight.clone(),
            n: 0,
            dim: 1,
        })
        .collect();
    car.push(CarEntry { i: 0, alpha: vec![0; rs.rank], n: 0, dim: rs.rank as i64 });

    // Degree-preserving subgroup of the Weyl group.
    let full = rs.weyl_group(DEFAULT_GROUP_CAP)?;
    let preserves = |w: &IMat| -> bool {
        (0..rs.root_count()).all(|idx| {
            let img = mat_vec(w, &rs.roots[idx].weight);
            let j = rs.index_of(&img).expect("Weyl group permutes roots");
            (root_degree(j) - root_degree(idx)) % m == 0
        })
    };
    let members: Vec<IMat> = full.elements.iter().filter(|w| preserves(w)).cloned().collect();

    // Greedy minimal-ish generating set, scanning members in BFS order.
    let mut generators: Vec<IMat> = Vec::new();
    let mut closure_order = 1usize;
    for w in members.iter().skip(1) {
        let mut candidate = generators.clone();
        candidate.push(w.clone());
        let closed = MatrixGroup::enumerate(candidate, rs.rank, DEFAULT_GROUP_CAP)?;
        if closed.order() > closure_order {
            closure_order = closed.order();
            generators = closed.generators;
        }
        if closure_order == members.len() {
            break;
        }
    }

    let centralizer_roots: Vec<IVec> = (0..rs.root_count())
        .filter(|&idx| root_degree(idx).rem_euclid(m) == 0)
        .map(|idx| rs.roots[idx].weight.clone())
        .collect();

    let datum = BlockDatum {
        m,
        eta,
        rank_e: rs.rank,
        car,
        weyl_generators: generators,
        centralizer_roots,
    };
    debug_assert!(datum.validate(DEFAULT_GROUP_CAP).is_empty());
    Ok(datum)
}

/// Convenience constructor from a textual label, e.g. `principal("A1", &[0], 1, 2)`.
pub fn principal(label: &str, degrees: &[i64], m: i64, eta: i64) -> Result<BlockDatum> {
    principal_datum(RootSystemType::parse(label)?, degrees, m, eta)
}

/// Small data sets shared by tests across the crate.
#[cfg(test)]
pub mod fixtures {
    use super::*;

    /// D1: sl2 with the zero grading, m = 1, eta = 2.
    pub fn d1() -> BlockDatum {
        principal("A1", &[0], 1, 2).unwrap()
    }

    /// D2: sl2 graded by deg(alpha) = 1, m = 2, eta = 1.
    pub fn d2() -> BlockDatum {
        principal("A1", &[1], 2, 1).unwrap()
    }

    /// D3: sl3 with the zero grading, m = 1, eta = 2.
    pub fn d3() -> BlockDatum {
        principal("A2", &[0, 0], 1, 2).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{d1, d2, d3};
    use super::*;

    #[test]
    fn principal_a1_zero_grading() {
        let d = d1();
        assert_eq!(d.delta(), 0);
        assert_eq!(d.car.len(), 3);
        assert_eq!(d.car_star().count(), 2);
        assert!(d.car.iter().any(|e| e.alpha == vec![2] && e.i == 0 && e.n == 0 && e.dim == 1));
        assert!(d.car.iter().any(|e| e.alpha == vec![0] && e.dim == 1));
        assert_eq!(d.weyl_group(100).unwrap().order(), 2);
        assert_eq!(d.centralizer_roots.len(), 2);
        assert!(d.validate(100).is_empty());
    }

    #[test]
    fn principal_a1_odd_grading() {
        let d = d2();
        assert_eq!(d.delta(), 1);
        assert_eq!(d.car_star_residue(1).count(), 2);
        assert_eq!(d.car_star_residue(0).count(), 0);
        assert!(d.centralizer_roots.is_empty());
        assert_eq!(d.weyl_group(100).unwrap().order(), 2);
        assert!(d.validate(100).is_empty());
    }

    #[test]
    fn principal_a2_zero_grading() {
        let d = d3();
        assert_eq!(d.car.len(), 7);
        assert_eq!(d.car.iter().map(|e| e.dim).sum::<i64>(), 8);
        assert_eq!(d.weyl_group(100).unwrap().order(), 6);
        assert_eq!(d.centralizer_roots.len(), 6);
        assert!(d.validate(100).is_empty());
    }

    #[test]
    fn grading_splits_the_group() {
        // A2 with deg = (0, 1), m = 2: only Weyl elements preserving degrees
        // mod 2 survive.
        let d = principal("A2", &[0, 1], 2, 1).unwrap();
        assert!(d.validate(1000).is_empty());
        let order = d.weyl_group(1000).unwrap().order();
        assert!(order < 6, "subgroup must be proper, got order {order}");
        assert_eq!(d.centralizer_roots.len(), 2);
    }

    #[test]
    fn symmetry_violation_is_reported() {
        let mut d = d1();
        d.car.retain(|e| e.alpha != vec![-2]);
        let vs = d.validate(100);
        assert!(vs.iter().any(|v| v.kind == ViolationKind::CarSymmetry));
        assert!(vs.iter().any(|v| v.message.contains("alpha=[2]")));
    }

    #[test]
    fn infinite_group_is_reported() {
        // The 1x1 matrix [2] generates an infinite group.
        let mut d = d1();
        d.weyl_generators = vec![vec![vec![2]]];
        let vs = d.validate(1000);
        assert!(vs.iter().any(|v| v.kind == ViolationKind::GroupNotFinite), "{vs:?}");
    }

    #[test]
    fn sl2_symmetry_violation() {
        let d = BlockDatum {
            m: 1,
            eta: 2,
            rank_e: 1,
            car: vec![
                CarEntry { i: 0, alpha: vec![2], n: 2, dim: 1 },
                CarEntry { i: 0, alpha: vec![-2], n: -2, dim: 1 },
            ],
            weyl_generators: vec![],
            centralizer_roots: vec![],
        };
        let vs = d.validate(100);
        assert!(vs.iter().any(|v| v.kind == ViolationKind::Sl2Symmetry), "{vs:?}");
    }

    #[test]
    fn json_roundtrip_and_field_names() {
        let d = d1();
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"rankE\""));
        assert!(json.contains("\"weylGenerators\""));
        assert!(json.contains("\"centralizerRoots\""));
        let back = load_datum_str(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn residue_out_of_range_is_rejected() {
        let mut d = d1();
        d.car[0].i = 5;
        let text = serde_json::to_string(&d).unwrap();
        match load_datum_str(&text) {
            Err(Error::Validation(vs)) => {
                assert!(vs.iter().any(|v| v.message.contains("outside [0, 1)")), "{vs:?}");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn garbage_json_is_a_parse_error() {
        assert!(matches!(load_datum_str("{"), Err(Error::DatumParse(_))));
    }
}
