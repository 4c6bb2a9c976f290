//! Weichold types `(g, r, a)` of Real surfaces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The clause of the Weichold classification a triple violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SurfaceViolation {
    #[error("a must be 0 or 1")]
    BadOrientability,
    #[error("g and r must be non-negative")]
    Negative,
    #[error("r < 1 (a=0 requires a fixed circle)")]
    NoFixedCircle,
    #[error("r > g+1")]
    TooManyCirclesOrientable,
    #[error("r != g+1 mod 2")]
    Parity,
    #[error("r > g")]
    TooManyCirclesNonOrientable,
}

/// Checks the two Weichold clauses for an arbitrary integer triple.
pub fn validate(g: i64, r: i64, a: i64) -> Result<(), SurfaceViolation> {
    if a != 0 && a != 1 {
        return Err(SurfaceViolation::BadOrientability);
    }
    if g < 0 || r < 0 {
        return Err(SurfaceViolation::Negative);
    }
    if a == 0 {
        if r < 1 {
            return Err(SurfaceViolation::NoFixedCircle);
        }
        if r > g + 1 {
            return Err(SurfaceViolation::TooManyCirclesOrientable);
        }
        if (g + 1 - r) % 2 != 0 {
            return Err(SurfaceViolation::Parity);
        }
    } else if r > g {
        return Err(SurfaceViolation::TooManyCirclesNonOrientable);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    /// `r = 0`, which forces `a = 1`.
    Case0,
    /// `r > 0`, `a = 0`.
    Case1,
    /// `r > 0`, `a = 1`.
    Case2,
}

#[derive(Deserialize)]
struct RawSurface {
    g: i64,
    r: i64,
    a: i64,
}

impl TryFrom<RawSurface> for SurfaceType {
    type Error = SurfaceViolation;

    fn try_from(raw: RawSurface) -> Result<Self, Self::Error> {
        SurfaceType::new(raw.g, raw.r, raw.a)
    }
}

/// A valid Weichold triple. Construction enforces validity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSurface")]
pub struct SurfaceType {
    g: u32,
    r: u32,
    a: u8,
}

impl SurfaceType {
    pub fn new(g: i64, r: i64, a: i64) -> Result<Self, SurfaceViolation> {
        validate(g, r, a)?;
        Ok(Self {
            g: g as u32,
            r: r as u32,
            a: a as u8,
        })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn a(&self) -> u32 {
        self.a as u32
    }

    /// Number of designated points of the `(r+a)`-pointed gauge group.
    pub fn marked_points(&self) -> u32 {
        self.r + self.a as u32
    }

    pub fn case_kind(&self) -> CaseKind {
        match (self.r, self.a) {
            (0, _) => CaseKind::Case0,
            (_, 0) => CaseKind::Case1,
            _ => CaseKind::Case2,
        }
    }

    /// Number of handle pairs that split off as loop factors of `U`.
    pub fn g_prime(&self) -> u32 {
        let (g, r) = (self.g, self.r);
        if self.a == 0 {
            g + 1 - r
        } else if (g - r) % 2 == 0 {
            g - r
        } else {
            g - r - 1
        }
    }

    /// Genus left over after removing the `g_prime` handles.
    pub fn reduced_genus(&self) -> u32 {
        self.g - self.g_prime()
    }

    /// The type obtained by removing `g_prime` handles.
    pub fn reduced(&self) -> SurfaceType {
        SurfaceType {
            g: self.reduced_genus(),
            ..*self
        }
    }

    pub fn eta(&self) -> u32 {
        u32::from(self.r > 0 && self.a == 1)
    }

    /// Parity of `g - r`, used to label table rows.
    pub fn g_minus_r_even(&self) -> bool {
        (self.g + self.r).is_multiple_of(2)
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.g, self.r, self.a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseTripleError {
    #[error("expected three comma-separated integers g,r,a")]
    Shape,
    #[error("{0}")]
    Invalid(#[from] SurfaceViolation),
}

/// Parses `g,r,a` without checking the Weichold clauses.
pub fn parse_triple(s: &str) -> Result<(i64, i64, i64), ParseTripleError> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<_> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(ParseTripleError::Shape);
    }
    let nums: Result<Vec<i64>, _> = parts.iter().map(|p| p.parse::<i64>()).collect();
    match nums.as_deref() {
        Ok([g, r, a]) => Ok((*g, *r, *a)),
        _ => Err(ParseTripleError::Shape),
    }
}

impl FromStr for SurfaceType {
    type Err = ParseTripleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (g, r, a) = parse_triple(s)?;
        Ok(SurfaceType::new(g, r, a)?)
    }
}

/// All valid types with `g <= g_max`, ordered by `(g, a, r)`.
pub fn enumerate(g_max: u32) -> Vec<SurfaceType> {
    let mut out = Vec::new();
    for g in 0..=g_max {
        // a = 0: r runs over 1..=g+1 with r ≡ g+1 (mod 2)
        let mut r = if (g + 1) % 2 == 0 { 2 } else { 1 };
        while r <= g + 1 {
            out.push(SurfaceType { g, r, a: 0 });
            r += 2;
        }
        for r in 0..=g {
            out.push(SurfaceType { g, r, a: 1 });
        }
    }
    out
}
