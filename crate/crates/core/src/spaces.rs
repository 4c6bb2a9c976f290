//! Formal products of iterated loop spaces with a canonical normal form.

use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundles::{BundleClass, Family, Flavor};
use crate::decompose::RuleApplication;
use crate::groups::{Locality, PrimeConstraint};
use crate::surfaces::SurfaceType;

/// A gauge group left unexpanded by the rewrite rules.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResidualAtom {
    pub family: Family,
    pub flavor: Flavor,
    pub surface: SurfaceType,
    pub class: BundleClass,
}

impl fmt::Display for ResidualAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = match self.family {
            Family::Real => "G",
            Family::Quaternionic => "GQ",
        };
        let flavor = match self.flavor {
            Flavor::Unpointed => "",
            Flavor::SinglePointed => "*",
            Flavor::MultiPointed => "**",
        };
        write!(f, "{family}{flavor}({};{})", self.surface, self.class)
    }
}

/// The building blocks of every decomposition.
///
/// `U` is the unitary group of the ambient rank; `Sp` and `UmodSp` refer to
/// `Sp(n)` and `U(2n)/Sp(n)` when the unitary rank is `2n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    UmodO,
    UmodSO,
    UmodSp,
    U,
    O,
    SO,
    Sp,
    Circle,
    Residual(ResidualAtom),
}

impl Atom {
    pub const CLASSICAL: [Atom; 8] = [
        Atom::UmodO,
        Atom::UmodSO,
        Atom::UmodSp,
        Atom::U,
        Atom::O,
        Atom::SO,
        Atom::Sp,
        Atom::Circle,
    ];

    pub fn name(&self) -> String {
        match self {
            Atom::UmodO => "U/O".into(),
            Atom::UmodSO => "U/SO".into(),
            Atom::UmodSp => "U/Sp".into(),
            Atom::U => "U".into(),
            Atom::O => "O".into(),
            Atom::SO => "SO".into(),
            Atom::Sp => "Sp".into(),
            Atom::Circle => "S1".into(),
            Atom::Residual(r) => r.to_string(),
        }
    }

    pub fn as_residual(&self) -> Option<&ResidualAtom> {
        match self {
            Atom::Residual(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `(Ω^loops atom)^multiplicity`, tagged with the locality it is valid in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub atom: Atom,
    pub loops: u32,
    #[serde(rename = "mult")]
    pub multiplicity: u32,
    #[serde(default)]
    pub locality: Locality,
}

impl Factor {
    pub fn new(atom: Atom, loops: u32, multiplicity: u32) -> Self {
        Self {
            atom,
            loops,
            multiplicity,
            locality: Locality::Integral,
        }
    }

    pub fn looped(atom: Atom, multiplicity: u32) -> Self {
        Self::new(atom, 1, multiplicity)
    }

    pub fn residual(residual: ResidualAtom) -> Self {
        Self::new(Atom::Residual(residual), 0, 1)
    }

    pub fn with_locality(mut self, locality: Locality) -> Self {
        self.locality = locality;
        self
    }

    fn sort_key(&self) -> (&Atom, Reverse<u32>, &Locality) {
        (&self.atom, Reverse(self.loops), &self.locality)
    }

    fn body(&self) -> String {
        let name = self.atom.name();
        let name = if self.loops > 0 && (name.contains('/') || self.atom.as_residual().is_some()) {
            format!("({name})")
        } else {
            name
        };
        match self.loops {
            0 => name,
            1 => format!("O{name}"),
            k => format!("O^{k}{name}"),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self.body();
        if self.loops == 1 || self.multiplicity > 1 {
            write!(f, "({body})^{}", self.multiplicity)?;
        } else {
            f.write_str(&body)?;
        }
        if let Locality::PLocal(c) = self.locality {
            write!(f, " (p-local: {c})")?;
        }
        Ok(())
    }
}

/// A normalized product of factors together with the rules that produced it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceExpr {
    factors: Vec<Factor>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<RuleApplication>,
}

impl SpaceExpr {
    /// The one-point space, the unit for [`SpaceExpr::product`].
    pub fn point() -> Self {
        Self::default()
    }

    pub fn from_factors(factors: impl IntoIterator<Item = Factor>) -> Self {
        let mut e = Self {
            factors: factors.into_iter().collect(),
            provenance: Vec::new(),
        };
        e.normalize();
        e
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn provenance(&self) -> &[RuleApplication] {
        &self.provenance
    }

    pub fn is_point(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn with_provenance(mut self, provenance: Vec<RuleApplication>) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn residuals(&self) -> impl Iterator<Item = (&ResidualAtom, &Factor)> {
        self.factors
            .iter()
            .filter_map(|f| f.atom.as_residual().map(|r| (r, f)))
    }

    /// Total multiplicity of `Ω^loops atom` over all localities.
    pub fn multiplicity(&self, atom: &Atom, loops: u32) -> u32 {
        self.factors
            .iter()
            .filter(|f| &f.atom == atom && f.loops == loops)
            .map(|f| f.multiplicity)
            .sum()
    }

    pub fn product(&self, other: &SpaceExpr) -> SpaceExpr {
        let mut out = self.clone();
        out.factors.extend(other.factors.iter().cloned());
        out.provenance.extend(other.provenance.iter().cloned());
        out.normalize();
        out
    }

    pub fn loop_space(&self) -> SpaceExpr {
        let mut out = self.clone();
        for f in &mut out.factors {
            f.loops += 1;
        }
        out
    }

    fn normalize(&mut self) {
        self.factors.retain(|f| f.multiplicity > 0);
        self.factors.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut merged: Vec<Factor> = Vec::with_capacity(self.factors.len());
        for f in self.factors.drain(..) {
            match merged.last_mut() {
                Some(last) if last.sort_key() == f.sort_key() => {
                    last.multiplicity += f.multiplicity
                }
                _ => merged.push(f),
            }
        }
        self.factors = merged;
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("point");
        }
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" x "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse space expression at '{0}'")]
pub struct ParseExprError(pub String);

/// Parses the output of [`SpaceExpr::render`]. Provenance is not part of the text form.
pub fn parse_expr(s: &str) -> Result<SpaceExpr, ParseExprError> {
    let s = s.trim();
    if s == "point" {
        return Ok(SpaceExpr::point());
    }
    s.split(" x ")
        .map(parse_factor)
        .collect::<Result<Vec<_>, _>>()
        .map(SpaceExpr::from_factors)
}

fn parse_factor(token: &str) -> Result<Factor, ParseExprError> {
    let err = || ParseExprError(token.to_string());
    let (body, locality) = match token.split_once(" (p-local: ") {
        Some((body, tag)) => {
            let tag = tag.strip_suffix(')').ok_or_else(err)?;
            (
                body,
                Locality::PLocal(parse_constraint(tag).ok_or_else(err)?),
            )
        }
        None => (token, Locality::Integral),
    };
    let (body, multiplicity) = match body.rsplit_once(")^") {
        Some((inner, m)) if body.starts_with('(') => {
            (&inner[1..], m.parse::<u32>().map_err(|_| err())?)
        }
        _ => (body, 1),
    };
    let (atom, loops) = parse_body(body).ok_or_else(err)?;
    Ok(Factor {
        atom,
        loops,
        multiplicity,
        locality,
    })
}

fn parse_body(body: &str) -> Option<(Atom, u32)> {
    if let Some(atom) = parse_atom(body) {
        return Some((atom, 0));
    }
    let rest = body.strip_prefix('O')?;
    let (loops, rest) = match rest.strip_prefix('^') {
        Some(r) => {
            let digits = r.find(|c: char| !c.is_ascii_digit())?;
            (r[..digits].parse().ok()?, &r[digits..])
        }
        None => (1, rest),
    };
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(rest);
    Some((parse_atom(inner)?, loops))
}

fn parse_atom(s: &str) -> Option<Atom> {
    Some(match s {
        "U/O" => Atom::UmodO,
        "U/SO" => Atom::UmodSO,
        "U/Sp" => Atom::UmodSp,
        "U" => Atom::U,
        "O" => Atom::O,
        "SO" => Atom::SO,
        "Sp" => Atom::Sp,
        "S1" => Atom::Circle,
        _ => return parse_residual(s).map(Atom::Residual),
    })
}

fn parse_residual(s: &str) -> Option<ResidualAtom> {
    let (family, rest) = match s.strip_prefix("GQ") {
        Some(r) => (Family::Quaternionic, r),
        None => (Family::Real, s.strip_prefix('G')?),
    };
    let (flavor, rest) = if let Some(r) = rest.strip_prefix("**") {
        (Flavor::MultiPointed, r)
    } else if let Some(r) = rest.strip_prefix('*') {
        (Flavor::SinglePointed, r)
    } else {
        (Flavor::Unpointed, rest)
    };
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    let (surface, class) = inner.split_once(';')?;
    let surface: SurfaceType = surface.parse().ok()?;
    let class = match family {
        Family::Quaternionic => BundleClass::Quaternionic(class.parse().ok()?),
        Family::Real => {
            let nums: Vec<i64> = class
                .trim_start_matches('(')
                .trim_end_matches(')')
                .split(',')
                .map(|x| x.parse().ok())
                .collect::<Option<_>>()?;
            let (c, w) = nums.split_first()?;
            BundleClass::Real(crate::bundles::RealClass::new(
                *c,
                w.iter().map(|&b| b == 1).collect(),
            ))
        }
    };
    Some(ResidualAtom {
        family,
        flavor,
        surface,
        class,
    })
}

fn parse_constraint(s: &str) -> Option<PrimeConstraint> {
    let mut c = PrimeConstraint::default();
    for part in s.split(", ") {
        match part {
            "p≠2" => c.exclude_two = true,
            "p∤n" => c.coprime_to_rank = true,
            "n=p" => c.equals_rank = true,
            "any p" => {}
            _ => return None,
        }
    }
    Some(c)
}
