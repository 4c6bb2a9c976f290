//! Finitely generated abelian groups in primary canonical form.
//!
//! A group is stored as a free rank together with a sorted multiset of
//! prime-power cyclic pieces. Two groups are isomorphic exactly when their
//! stored fields agree, which makes `==` an isomorphism test.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spaces::Atom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("torsion exponent must be at least 1")]
    ZeroExponent,
    #[error("invariant factor 0 is not allowed; encode free summands in the free rank")]
    ZeroFactor,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Cyclic group of order `prime^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(u64, u32)", try_from = "(u64, u32)")]
pub struct TorsionPiece {
    prime: u64,
    exponent: u32,
}

impl TorsionPiece {
    pub fn new(prime: u64, exponent: u32) -> Result<Self, GroupError> {
        if !is_prime(prime) {
            return Err(GroupError::NotPrime(prime));
        }
        if exponent == 0 {
            return Err(GroupError::ZeroExponent);
        }
        Ok(Self { prime, exponent })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

impl From<TorsionPiece> for (u64, u32) {
    fn from(t: TorsionPiece) -> Self {
        (t.prime, t.exponent)
    }
}

impl TryFrom<(u64, u32)> for TorsionPiece {
    type Error = GroupError;

    fn try_from((p, e): (u64, u32)) -> Result<Self, Self::Error> {
        TorsionPiece::new(p, e)
    }
}

#[derive(Deserialize)]
struct RawGroup {
    free_rank: u32,
    torsion: Vec<TorsionPiece>,
}

impl From<RawGroup> for FgAbGroup {
    fn from(raw: RawGroup) -> Self {
        FgAbGroup::new(raw.free_rank, raw.torsion)
    }
}

/// Finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/p^e`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "RawGroup")]
pub struct FgAbGroup {
    free_rank: u32,
    torsion: Vec<TorsionPiece>,
}

impl FgAbGroup {
    pub fn new(free_rank: u32, torsion: impl IntoIterator<Item = TorsionPiece>) -> Self {
        let mut torsion: Vec<_> = torsion.into_iter().collect();
        torsion.sort_unstable();
        Self { free_rank, torsion }
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: u32) -> Self {
        Self::new(rank, [])
    }

    /// `(Z/2)^count`.
    pub fn z2(count: u32) -> Self {
        let two = TorsionPiece {
            prime: 2,
            exponent: 1,
        };
        Self::new(0, std::iter::repeat_n(two, count as usize))
    }

    /// `Z^free_rank ⊕ (Z/2)^twos`, the shape of almost every answer in this crate.
    pub fn z_z2(free_rank: u32, twos: u32) -> Self {
        Self::free(free_rank) + Self::z2(twos)
    }

    /// Splits every factor into prime powers (Chinese remainder theorem).
    pub fn from_invariant_factors(factors: &[u64], free_rank: u32) -> Result<Self, GroupError> {
        let mut torsion = Vec::new();
        for &f in factors {
            if f == 0 {
                return Err(GroupError::ZeroFactor);
            }
            torsion.extend(prime_power_split(f));
        }
        Ok(Self::new(free_rank, torsion))
    }

    pub fn free_rank(&self) -> u32 {
        self.free_rank
    }

    pub fn torsion(&self) -> &[TorsionPiece] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().map(TorsionPiece::order).product()
    }

    /// Invariant factors `d_1 | d_2 | ... | d_k`, all greater than 1.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for t in &self.torsion {
            by_prime.entry(t.prime).or_default().push(t.exponent);
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (p, mut exps) in by_prime {
            // largest exponents go into the last (largest) factor
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (k, e) in exps.into_iter().enumerate() {
                factors[len - 1 - k] *= p.pow(e);
            }
        }
        factors
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torsion = self.torsion.clone();
        torsion.extend_from_slice(&other.torsion);
        Self::new(self.free_rank + other.free_rank, torsion)
    }

    /// `G^m`, the direct sum of `m` copies.
    pub fn power(&self, m: u32) -> Self {
        let mut torsion = Vec::with_capacity(self.torsion.len() * m as usize);
        for _ in 0..m {
            torsion.extend_from_slice(&self.torsion);
        }
        Self::new(self.free_rank * m, torsion)
    }

    /// Localization at `p`: torsion prime to `p` dies, free summands stay.
    pub fn localize(&self, p: u64) -> Self {
        Self {
            free_rank: self.free_rank,
            torsion: self
                .torsion
                .iter()
                .copied()
                .filter(|t| t.prime == p)
                .collect(),
        }
    }

    /// Whether `other` is (isomorphic to) a direct summand obtained by
    /// deleting free rank and torsion pieces from `self`.
    pub fn contains_summand(&self, other: &Self) -> bool {
        self.complement(other).is_some()
    }

    /// `self` with the summands of `other` removed, if they are all present.
    pub fn complement(&self, other: &Self) -> Option<Self> {
        if other.free_rank > self.free_rank {
            return None;
        }
        let mut rest = self.torsion.clone();
        for t in &other.torsion {
            let pos = rest.iter().position(|x| x == t)?;
            rest.remove(pos);
        }
        Some(Self {
            free_rank: self.free_rank - other.free_rank,
            torsion: rest,
        })
    }

    /// Renders repeated pieces with exponents, e.g. `Z^3 x Z/2^2`.
    pub fn render_compact(&self) -> String {
        if self.is_trivial() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let t = self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|x| **x == t).count();
            if run == 1 {
                parts.push(format!("Z/{}", t.order()));
            } else {
                parts.push(format!("Z/{}^{}", t.order(), run));
            }
            i += run;
        }
        parts.join(" x ")
    }
}

fn prime_power_split(mut n: u64) -> Vec<TorsionPiece> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push(TorsionPiece {
                prime: p,
                exponent: e,
            });
        }
        p += 1;
    }
    if n > 1 {
        out.push(TorsionPiece {
            prime: n,
            exponent: 1,
        });
    }
    out
}

impl Add for FgAbGroup {
    type Output = FgAbGroup;

    fn add(self, rhs: Self) -> Self::Output {
        self.direct_sum(&rhs)
    }
}

impl std::iter::Sum for FgAbGroup {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(FgAbGroup::trivial(), |acc, g| acc + g)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{}", t.order())));
        f.write_str(&parts.join(" x "))
    }
}

/// Which primes a p-local statement is valid for.
///
/// `coprime_to_rank` means `p` does not divide the rank of the unitary group
/// (that is `n` for Real bundles and `2n` for Quaternionic ones).
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct PrimeConstraint {
    pub exclude_two: bool,
    pub coprime_to_rank: bool,
    pub equals_rank: bool,
}

impl PrimeConstraint {
    pub const NOT_TWO: Self = Self {
        exclude_two: true,
        coprime_to_rank: false,
        equals_rank: false,
    };
    pub const COPRIME: Self = Self {
        exclude_two: false,
        coprime_to_rank: true,
        equals_rank: false,
    };
    pub const EQUALS_RANK: Self = Self {
        exclude_two: false,
        coprime_to_rank: false,
        equals_rank: true,
    };

    /// Conjunction of two constraints; `None` if they are contradictory.
    pub fn join(self, other: Self) -> Option<Self> {
        let joined = Self {
            exclude_two: self.exclude_two || other.exclude_two,
            coprime_to_rank: self.coprime_to_rank || other.coprime_to_rank,
            equals_rank: self.equals_rank || other.equals_rank,
        };
        if joined.coprime_to_rank && joined.equals_rank {
            None
        } else {
            Some(joined)
        }
    }

    pub fn satisfied_by(&self, p: u64, rank: u64) -> bool {
        is_prime(p)
            && (!self.exclude_two || p != 2)
            && (!self.coprime_to_rank || !rank.is_multiple_of(p))
            && (!self.equals_rank || rank == p)
    }
}

impl fmt::Display for PrimeConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.exclude_two {
            parts.push("p≠2");
        }
        if self.coprime_to_rank {
            parts.push("p∤n");
        }
        if self.equals_rank {
            parts.push("n=p");
        }
        if parts.is_empty() {
            parts.push("any p");
        }
        f.write_str(&parts.join(", "))
    }
}

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    #[default]
    Integral,
    PLocal(PrimeConstraint),
}

impl Locality {
    pub fn join(self, other: Self) -> Option<Self> {
        match (self, other) {
            (Locality::Integral, x) | (x, Locality::Integral) => Some(x),
            (Locality::PLocal(a), Locality::PLocal(b)) => a.join(b).map(Locality::PLocal),
        }
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, Locality::Integral)
    }
}

impl fmt::Display for Locality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locality::Integral => f.write_str("integral"),
            Locality::PLocal(c) => write!(f, "p-local: {c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    NoIntegralData,
    OutOfStableRange,
    ConditionsUnsatisfied,
}

/// A summand `π_degree(atom)` the engine cannot evaluate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnknownSummand {
    pub atom: Atom,
    pub degree: u32,
    pub reason: UnknownReason,
    #[serde(default)]
    pub locality: Locality,
}

impl fmt::Display for UnknownSummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?pi_{}({})", self.degree, self.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerTerm {
    pub group: FgAbGroup,
    pub locality: Locality,
}

/// A homotopy group assembled from factor contributions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAnswer {
    terms: Vec<AnswerTerm>,
    unknowns: Vec<UnknownSummand>,
}

impl GroupAnswer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `group` to the bucket for `locality`, creating it if needed.
    pub fn add(&mut self, locality: Locality, group: FgAbGroup) {
        match self.terms.binary_search_by(|t| t.locality.cmp(&locality)) {
            Ok(i) => {
                let merged = self.terms[i].group.direct_sum(&group);
                self.terms[i].group = merged;
            }
            Err(i) => self.terms.insert(i, AnswerTerm { group, locality }),
        }
    }

    pub fn add_unknown(&mut self, unknown: UnknownSummand) {
        let pos = self.unknowns.partition_point(|u| u <= &unknown);
        self.unknowns.insert(pos, unknown);
    }

    pub fn terms(&self) -> &[AnswerTerm] {
        &self.terms
    }

    pub fn unknowns(&self) -> &[UnknownSummand] {
        &self.unknowns
    }

    pub fn is_exact(&self) -> bool {
        self.unknowns.is_empty()
    }

    /// The integral bucket, or the trivial group if there is none.
    pub fn integral(&self) -> FgAbGroup {
        self.terms
            .iter()
            .find(|t| t.locality.is_integral())
            .map(|t| t.group.clone())
            .unwrap_or_default()
    }

    /// Direct sum of every p-local bucket.
    pub fn p_local_total(&self) -> FgAbGroup {
        self.terms
            .iter()
            .filter(|t| !t.locality.is_integral())
            .map(|t| t.group.clone())
            .sum()
    }

    pub fn total(&self) -> FgAbGroup {
        self.terms.iter().map(|t| t.group.clone()).sum()
    }

    /// Literal localization of every p-local bucket at `p`.
    pub fn strict(&self, p: u64) -> GroupAnswer {
        let mut out = self.clone();
        for t in &mut out.terms {
            if !t.locality.is_integral() {
                t.group = t.group.localize(p);
            }
        }
        out
    }
}

impl fmt::Display for GroupAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for t in &self.terms {
            match t.locality {
                Locality::Integral => parts.push(t.group.render_compact()),
                Locality::PLocal(c) => parts.push(format!("({})_p[{c}]", t.group.render_compact())),
            }
        }
        parts.extend(self.unknowns.iter().map(ToString::to_string));
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(p: u64, e: u32) -> TorsionPiece {
        TorsionPiece::new(p, e).unwrap()
    }

    #[test]
    fn direct_sum_examples() {
        let a = FgAbGroup::new(2, [t(2, 1)]);
        let b = FgAbGroup::new(0, [t(2, 2)]);
        assert_eq!(a.direct_sum(&b), FgAbGroup::new(2, [t(2, 1), t(2, 2)]));
        assert_eq!(FgAbGroup::trivial().direct_sum(&a), a);
        let z_z2 = FgAbGroup::new(1, [t(2, 1)]);
        assert_eq!(z_z2.direct_sum(&z_z2), FgAbGroup::z_z2(2, 2));
    }

    #[test]
    fn invariant_factor_examples() {
        assert_eq!(
            FgAbGroup::from_invariant_factors(&[6], 0).unwrap(),
            FgAbGroup::new(0, [t(2, 1), t(3, 1)])
        );
        assert_eq!(
            FgAbGroup::from_invariant_factors(&[1], 2).unwrap(),
            FgAbGroup::free(2)
        );
        assert_eq!(
            FgAbGroup::from_invariant_factors(&[4, 2], 0).unwrap(),
            FgAbGroup::new(0, [t(2, 1), t(2, 2)])
        );
        assert_eq!(
            FgAbGroup::from_invariant_factors(&[0], 0),
            Err(GroupError::ZeroFactor)
        );
    }

    #[test]
    fn invariant_factors_merge_primes() {
        let g = FgAbGroup::new(0, [t(2, 1), t(2, 2), t(3, 1)]);
        assert_eq!(g.invariant_factors(), vec![2, 12]);
        assert!(FgAbGroup::free(3).invariant_factors().is_empty());
    }

    #[test]
    fn localize_examples() {
        let g = FgAbGroup::new(1, [t(2, 1), t(3, 2)]);
        assert_eq!(g.localize(3), FgAbGroup::new(1, [t(3, 2)]));
        assert_eq!(FgAbGroup::z_z2(1, 1).localize(3), FgAbGroup::free(1));
        assert_eq!(FgAbGroup::z2(2).localize(2), FgAbGroup::z2(2));
    }

    #[test]
    fn render_examples() {
        assert_eq!(FgAbGroup::z_z2(3, 2).to_string(), "Z^3 x Z/2 x Z/2");
        assert_eq!(FgAbGroup::trivial().to_string(), "0");
        assert_eq!(FgAbGroup::new(1, [t(2, 3)]).to_string(), "Z x Z/8");
        assert_eq!(FgAbGroup::z_z2(3, 2).render_compact(), "Z^3 x Z/2^2");
        assert_eq!(FgAbGroup::z2(1).render_compact(), "Z/2");
    }

    #[test]
    fn torsion_piece_validation() {
        assert_eq!(TorsionPiece::new(4, 1), Err(GroupError::NotPrime(4)));
        assert_eq!(TorsionPiece::new(2, 0), Err(GroupError::ZeroExponent));
        assert_eq!(t(3, 2).order(), 9);
    }

    #[test]
    fn json_shape() {
        let g = FgAbGroup::new(2, [t(3, 1), t(2, 1)]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"free_rank":2,"torsion":[[2,1],[3,1]]}"#);
        let back: FgAbGroup =
            serde_json::from_str(r#"{"free_rank":2,"torsion":[[3,1],[2,1]]}"#).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<FgAbGroup>(r#"{"free_rank":0,"torsion":[[6,1]]}"#).is_err());
    }

    #[test]
    fn complement_and_summands() {
        let big = FgAbGroup::z_z2(3, 2);
        assert_eq!(
            big.complement(&FgAbGroup::z_z2(1, 1)),
            Some(FgAbGroup::z_z2(2, 1))
        );
        assert!(!big.contains_summand(&FgAbGroup::z2(3)));
        assert!(!FgAbGroup::free(1).contains_summand(&FgAbGroup::free(2)));
    }

    #[test]
    fn constraints() {
        assert!(PrimeConstraint::COPRIME
            .join(PrimeConstraint::EQUALS_RANK)
            .is_none());
        let c = PrimeConstraint::NOT_TWO
            .join(PrimeConstraint::COPRIME)
            .unwrap();
        assert!(c.satisfied_by(3, 5));
        assert!(!c.satisfied_by(5, 5));
        assert!(!c.satisfied_by(2, 5));
        assert_eq!(c.to_string(), "p≠2, p∤n");
        assert!(PrimeConstraint::EQUALS_RANK.satisfied_by(5, 5));
    }

    #[test]
    fn answer_buckets_merge_and_sort() {
        let mut a = GroupAnswer::new();
        a.add(
            Locality::PLocal(PrimeConstraint::NOT_TWO),
            FgAbGroup::free(1),
        );
        a.add(Locality::Integral, FgAbGroup::free(2));
        a.add(Locality::PLocal(PrimeConstraint::NOT_TWO), FgAbGroup::z2(1));
        assert_eq!(a.terms().len(), 2);
        assert!(a.terms()[0].locality.is_integral());
        assert_eq!(a.p_local_total(), FgAbGroup::z_z2(1, 1));
        assert_eq!(a.to_string(), "Z^2 + (Z x Z/2)_p[p≠2]");
        assert_eq!(a.strict(3).p_local_total(), FgAbGroup::free(1));
    }
}
