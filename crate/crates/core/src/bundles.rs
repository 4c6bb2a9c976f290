//! Bundle classes and the component equivalences between their gauge groups.
//!
//! The known results only ever identify gauge groups; they never separate
//! them. Equivalence is therefore reported as `Equivalent` or `Unknown`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surfaces::SurfaceType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Real,
    Quaternionic,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(Family::Real),
            "quat" | "quaternionic" => Ok(Family::Quaternionic),
            _ => Err(format!("unknown family '{s}' (expected real|quat)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Unpointed,
    SinglePointed,
    /// Trivial over one point per fixed circle, plus a swapped pair when `a = 1`.
    MultiPointed,
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unpointed" => Ok(Flavor::Unpointed),
            "single" => Ok(Flavor::SinglePointed),
            "multi" => Ok(Flavor::MultiPointed),
            _ => Err(format!(
                "unknown flavor '{s}' (expected unpointed|single|multi)"
            )),
        }
    }
}

/// First Chern class together with the Stiefel–Whitney classes over the fixed circles.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RealClass {
    pub c: i64,
    pub w: Vec<bool>,
}

impl RealClass {
    pub fn new(c: i64, w: Vec<bool>) -> Self {
        Self { c, w }
    }

    pub fn zero(r: u32) -> Self {
        Self {
            c: 0,
            w: vec![false; r as usize],
        }
    }

    pub fn w_sum(&self) -> u32 {
        self.w.iter().filter(|&&b| b).count() as u32
    }

    /// `w_i = 0` for every `i >= 2`.
    pub fn tail_vanishes(&self) -> bool {
        self.w.iter().skip(1).all(|&b| !b)
    }

    pub fn satisfies_parity(&self) -> bool {
        self.c.rem_euclid(2) as u32 == self.w_sum() % 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleClass {
    Real(RealClass),
    Quaternionic(i64),
}

impl BundleClass {
    pub fn zero(family: Family, surface: &SurfaceType) -> Self {
        match family {
            Family::Real => BundleClass::Real(RealClass::zero(surface.r())),
            Family::Quaternionic => BundleClass::Quaternionic(0),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            BundleClass::Real(_) => Family::Real,
            BundleClass::Quaternionic(_) => Family::Quaternionic,
        }
    }

    pub fn c(&self) -> i64 {
        match self {
            BundleClass::Real(rc) => rc.c,
            BundleClass::Quaternionic(c) => *c,
        }
    }

    pub fn as_real(&self) -> Option<&RealClass> {
        match self {
            BundleClass::Real(rc) => Some(rc),
            BundleClass::Quaternionic(_) => None,
        }
    }

    /// Parses `c:w1w2...wr` (Real) or a bare integer (Quaternionic).
    pub fn parse(s: &str, family: Family) -> Result<Self, ClassError> {
        let s = s.trim();
        match family {
            Family::Quaternionic => s
                .parse::<i64>()
                .map(BundleClass::Quaternionic)
                .map_err(|_| ClassError::Syntax(s.to_string())),
            Family::Real => {
                let (c, w) = s.split_once(':').unwrap_or((s, ""));
                let c = c
                    .parse::<i64>()
                    .map_err(|_| ClassError::Syntax(s.to_string()))?;
                let w = w
                    .chars()
                    .map(|ch| match ch {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(ClassError::Syntax(s.to_string())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(BundleClass::Real(RealClass { c, w }))
            }
        }
    }

    /// Inverse of [`BundleClass::parse`].
    pub fn spec(&self) -> String {
        match self {
            BundleClass::Real(rc) => {
                let bits: String = rc.w.iter().map(|&b| if b { '1' } else { '0' }).collect();
                format!("{}:{}", rc.c, bits)
            }
            BundleClass::Quaternionic(c) => c.to_string(),
        }
    }
}

impl fmt::Display for BundleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleClass::Real(rc) if rc.w.is_empty() => write!(f, "{}", rc.c),
            BundleClass::Real(rc) => {
                write!(f, "({}", rc.c)?;
                for &b in &rc.w {
                    write!(f, ",{}", u8::from(b))?;
                }
                f.write_str(")")
            }
            BundleClass::Quaternionic(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("malformed class '{0}'")]
    Syntax(String),
    #[error("class has {got} Stiefel-Whitney entries but the surface has r = {r}")]
    Length { got: usize, r: u32 },
    #[error("c = {c} violates c ≡ Σw (mod 2)")]
    Parity { c: i64 },
    #[error("Quaternionic class c = {0} must be even")]
    OddQuaternionic(i64),
    #[error("class family does not match the bundle family")]
    FamilyMismatch,
}

pub fn validate_class(
    surface: &SurfaceType,
    class: &BundleClass,
    family: Family,
) -> Result<(), ClassError> {
    match (family, class) {
        (Family::Real, BundleClass::Real(rc)) => {
            if rc.w.len() != surface.r() as usize {
                return Err(ClassError::Length {
                    got: rc.w.len(),
                    r: surface.r(),
                });
            }
            if !rc.satisfies_parity() {
                return Err(ClassError::Parity { c: rc.c });
            }
            Ok(())
        }
        (Family::Quaternionic, BundleClass::Quaternionic(c)) => {
            if c.rem_euclid(2) != 0 {
                Err(ClassError::OddQuaternionic(*c))
            } else {
                Ok(())
            }
        }
        _ => Err(ClassError::FamilyMismatch),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error("rank must be positive")]
    ZeroRank,
    #[error("Quaternionic bundles need even rank, got {0}")]
    OddQuaternionicRank(u64),
}

/// A gauge group: family, pointing flavor, base surface, bundle class and rank.
///
/// `rank` is the rank of the unitary group: `n` for `U(n)` Real bundles and
/// `2n` for `U(2n)` Quaternionic bundles.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GaugeGroupId {
    family: Family,
    flavor: Flavor,
    surface: SurfaceType,
    class: BundleClass,
    rank: u64,
}

impl GaugeGroupId {
    pub fn new(
        family: Family,
        flavor: Flavor,
        surface: SurfaceType,
        class: BundleClass,
        rank: u64,
    ) -> Result<Self, IdError> {
        if rank == 0 {
            return Err(IdError::ZeroRank);
        }
        if family == Family::Quaternionic && !rank.is_multiple_of(2) {
            return Err(IdError::OddQuaternionicRank(rank));
        }
        validate_class(&surface, &class, family)?;
        Ok(Self {
            family,
            flavor,
            surface,
            class,
            rank,
        })
    }

    /// The gauge group of the trivial class.
    pub fn trivial(
        family: Family,
        flavor: Flavor,
        surface: SurfaceType,
        rank: u64,
    ) -> Result<Self, IdError> {
        let class = BundleClass::zero(family, &surface);
        Self::new(family, flavor, surface, class, rank)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn surface(&self) -> SurfaceType {
        self.surface
    }

    pub fn class(&self) -> &BundleClass {
        &self.class
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn with_class(&self, class: BundleClass) -> Result<Self, IdError> {
        Self::new(self.family, self.flavor, self.surface, class, self.rank)
    }
}

/// A class-changing step used by [`canonical_class`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Justification {
    /// Every class has the same `(r+a)`-pointed gauge group up to equivalence of classifying spaces.
    MultiPointedClassFree,
    /// `(c, w_1)` can be changed freely for the single-pointed gauge group.
    SinglePointedFirstCircleFree,
    /// Tensoring with a Real line bundle of class `(2,0,...,0)` shifts `c` by `2n`.
    TensorShift,
    /// For odd `n` all Stiefel–Whitney classes collapse onto the first circle.
    OddRankCollapse,
    /// Quaternionic pointed gauge groups do not depend on the class.
    QuaternionicPointedClassFree,
    /// Quaternionic tensoring shifts `c` by `4n` for `U(2n)` bundles.
    QuaternionicTensorShift,
}

impl Justification {
    /// Whether the identification is an isomorphism of groups, rather than
    /// only an equivalence of classifying spaces.
    pub fn is_isomorphism(&self) -> bool {
        matches!(
            self,
            Justification::TensorShift
                | Justification::OddRankCollapse
                | Justification::QuaternionicTensorShift
        )
    }

    pub fn id(&self) -> &'static str {
        match self {
            Justification::MultiPointedClassFree => "Prop1.4",
            Justification::SinglePointedFirstCircleFree => "Prop1.5",
            Justification::TensorShift => "Prop1.6",
            Justification::OddRankCollapse => "Prop1.7",
            Justification::QuaternionicPointedClassFree => "Prop1.8",
            Justification::QuaternionicTensorShift => "Prop1.9",
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Canonical class for `(family, flavor, surface, rank)` starting from `class`.
///
/// Rules are applied in a fixed order so the result is deterministic; every
/// rule preserves `c ≡ Σw (mod 2)`.
pub fn canonicalize(
    family: Family,
    flavor: Flavor,
    rank: u64,
    class: &BundleClass,
) -> (BundleClass, Vec<Justification>) {
    let mut steps = Vec::new();
    let out = match (family, class) {
        (Family::Real, BundleClass::Real(rc)) => {
            let mut rc = rc.clone();
            match flavor {
                Flavor::MultiPointed => {
                    steps.push(Justification::MultiPointedClassFree);
                    rc = RealClass::zero(rc.w.len() as u32);
                }
                Flavor::SinglePointed => {
                    if let Some(first) = rc.w.first_mut() {
                        steps.push(Justification::SinglePointedFirstCircleFree);
                        *first = false;
                        rc.c = i64::from(rc.w_sum() % 2);
                    }
                }
                Flavor::Unpointed => {
                    if rank % 2 == 1 && !rc.w.is_empty() {
                        steps.push(Justification::OddRankCollapse);
                        let total = rc.w_sum() % 2 == 1;
                        rc.w.iter_mut().for_each(|b| *b = false);
                        rc.w[0] = total;
                    }
                    steps.push(Justification::TensorShift);
                    rc.c = rc.c.rem_euclid(2 * rank as i64);
                }
            }
            BundleClass::Real(rc)
        }
        (Family::Quaternionic, BundleClass::Quaternionic(c)) => match flavor {
            Flavor::Unpointed => {
                steps.push(Justification::QuaternionicTensorShift);
                // rank is 2n, so the shift 4n is 2 * rank
                BundleClass::Quaternionic(c.rem_euclid(2 * rank as i64))
            }
            _ => {
                steps.push(Justification::QuaternionicPointedClassFree);
                BundleClass::Quaternionic(0)
            }
        },
        // mismatched families cannot be built through GaugeGroupId::new
        (_, other) => other.clone(),
    };
    (out, steps)
}

pub fn canonical_class(id: &GaugeGroupId) -> (BundleClass, Vec<Justification>) {
    canonicalize(id.family, id.flavor, id.rank, &id.class)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Equivalence {
    Equivalent(Vec<Justification>),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("gauge groups differ in {0}; only classes may differ")]
pub struct MismatchError(pub &'static str);

pub fn known_equivalent(a: &GaugeGroupId, b: &GaugeGroupId) -> Result<Equivalence, MismatchError> {
    if a.family != b.family {
        return Err(MismatchError("family"));
    }
    if a.flavor != b.flavor {
        return Err(MismatchError("flavor"));
    }
    if a.surface != b.surface {
        return Err(MismatchError("surface"));
    }
    if a.rank != b.rank {
        return Err(MismatchError("rank"));
    }
    if a.class == b.class {
        return Ok(Equivalence::Equivalent(Vec::new()));
    }
    let (ca, mut ja) = canonical_class(a);
    let (cb, jb) = canonical_class(b);
    if ca != cb {
        return Ok(Equivalence::Unknown);
    }
    for j in jb {
        if !ja.contains(&j) {
            ja.push(j);
        }
    }
    Ok(Equivalence::Equivalent(ja))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surf(g: i64, r: i64, a: i64) -> SurfaceType {
        SurfaceType::new(g, r, a).unwrap()
    }

    fn real(c: i64, w: &[u8]) -> BundleClass {
        BundleClass::Real(RealClass::new(c, w.iter().map(|&b| b == 1).collect()))
    }

    #[test]
    fn validate_class_examples() {
        let s = surf(3, 2, 0);
        assert_eq!(validate_class(&s, &real(1, &[1, 0]), Family::Real), Ok(()));
        assert_eq!(
            validate_class(&s, &real(1, &[0, 0]), Family::Real),
            Err(ClassError::Parity { c: 1 })
        );
        assert_eq!(
            validate_class(&s, &BundleClass::Quaternionic(3), Family::Quaternionic),
            Err(ClassError::OddQuaternionic(3))
        );
        assert_eq!(
            validate_class(&s, &real(0, &[0]), Family::Real),
            Err(ClassError::Length { got: 1, r: 2 })
        );
        assert_eq!(validate_class(&s, &real(-1, &[1, 0]), Family::Real), Ok(()));
    }

    #[test]
    fn canonical_multi_pointed() {
        let id = GaugeGroupId::new(
            Family::Real,
            Flavor::MultiPointed,
            surf(3, 2, 0),
            real(5, &[1, 0]),
            4,
        )
        .unwrap();
        let (c, just) = canonical_class(&id);
        assert_eq!(c, real(0, &[0, 0]));
        assert_eq!(just, vec![Justification::MultiPointedClassFree]);
    }

    #[test]
    fn canonical_unpointed_odd_rank() {
        let id = GaugeGroupId::new(
            Family::Real,
            Flavor::Unpointed,
            surf(2, 3, 0),
            real(7, &[1, 1, 1]),
            3,
        )
        .unwrap();
        let (c, just) = canonical_class(&id);
        assert_eq!(c, real(1, &[1, 0, 0]));
        assert_eq!(
            just,
            vec![Justification::OddRankCollapse, Justification::TensorShift]
        );
    }

    #[test]
    fn canonical_quaternionic_unpointed() {
        let id = GaugeGroupId::new(
            Family::Quaternionic,
            Flavor::Unpointed,
            surf(1, 1, 1),
            BundleClass::Quaternionic(10),
            4,
        )
        .unwrap();
        assert_eq!(canonical_class(&id).0, BundleClass::Quaternionic(2));
        let neg = id.with_class(BundleClass::Quaternionic(-2)).unwrap();
        assert_eq!(canonical_class(&neg).0, BundleClass::Quaternionic(6));
    }

    #[test]
    fn canonical_single_pointed() {
        let id = GaugeGroupId::new(
            Family::Real,
            Flavor::SinglePointed,
            surf(4, 3, 1),
            real(3, &[0, 1, 0]),
            2,
        )
        .unwrap();
        assert_eq!(canonical_class(&id).0, real(1, &[0, 1, 0]));
    }

    #[test]
    fn equivalence_examples() {
        let s = surf(3, 2, 0);
        let a =
            GaugeGroupId::new(Family::Real, Flavor::MultiPointed, s, real(0, &[0, 0]), 5).unwrap();
        let b = a.with_class(real(3, &[1, 0])).unwrap();
        assert_eq!(
            known_equivalent(&a, &b),
            Ok(Equivalence::Equivalent(vec![
                Justification::MultiPointedClassFree
            ]))
        );

        let s = surf(1, 2, 0);
        let a = GaugeGroupId::new(Family::Real, Flavor::Unpointed, s, real(0, &[0, 0]), 2).unwrap();
        let b = a.with_class(real(0, &[1, 1])).unwrap();
        assert_eq!(known_equivalent(&a, &b), Ok(Equivalence::Unknown));
        assert_eq!(
            known_equivalent(&a, &a),
            Ok(Equivalence::Equivalent(vec![]))
        );

        let c = GaugeGroupId::new(Family::Real, Flavor::Unpointed, s, real(0, &[0, 0]), 3).unwrap();
        assert_eq!(known_equivalent(&a, &c), Err(MismatchError("rank")));
    }

    #[test]
    fn id_validation() {
        let s = surf(1, 1, 1);
        assert_eq!(
            GaugeGroupId::new(
                Family::Quaternionic,
                Flavor::Unpointed,
                s,
                BundleClass::Quaternionic(0),
                3
            ),
            Err(IdError::OddQuaternionicRank(3))
        );
        assert_eq!(
            GaugeGroupId::new(
                Family::Real,
                Flavor::Unpointed,
                s,
                BundleClass::Quaternionic(0),
                3
            ),
            Err(IdError::Class(ClassError::FamilyMismatch))
        );
    }

    #[test]
    fn class_spec_roundtrip() {
        let c = BundleClass::parse("-3:101", Family::Real).unwrap();
        assert_eq!(c, real(-3, &[1, 0, 1]));
        assert_eq!(c.spec(), "-3:101");
        assert_eq!(BundleClass::parse("4", Family::Real).unwrap(), real(4, &[]));
        assert!(BundleClass::parse("1:12", Family::Real).is_err());
        assert_eq!(
            BundleClass::parse("6", Family::Quaternionic).unwrap(),
            BundleClass::Quaternionic(6)
        );
        assert_eq!(real(0, &[0, 0]).to_string(), "(0,0,0)");
        assert_eq!(real(0, &[]).to_string(), "0");
    }
}
