//! Homotopy groups: stable tables for the classical atoms, `π₀` of the
//! residual gauge groups, and assembly over a decomposition.

use serde::Serialize;
use thiserror::Error;

use crate::bundles::{Family, Flavor, GaugeGroupId};
use crate::decompose::{decompose, DecomposeError, LocalityRequest};
use crate::groups::{FgAbGroup, GroupAnswer, Locality, UnknownReason, UnknownSummand};
use crate::spaces::{Atom, ResidualAtom, SpaceExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum HomotopyError {
    #[error("degree {degree} is outside the stable range for rank {rank} ({bound})")]
    OutOfRange {
        degree: u32,
        rank: u64,
        bound: &'static str,
    },
    #[error("pi_0 of residual gauge groups needs n > 2, got n = {0}")]
    RankTooSmall(u64),
    #[error("no tabulated pi_0 for {0}")]
    NotTabulated(String),
    #[error("{0} is a residual gauge group, not a classical atom")]
    NotClassical(String),
}

/// The caption bound: Real needs `n > i+2`, Quaternionic `2n > (i+1)/4`.
///
/// `rank` is the unitary rank, so the Quaternionic test reads `4·rank > i+1`.
pub fn in_stable_range(family: Family, rank: u64, degree: u32) -> bool {
    let i = u64::from(degree);
    match family {
        Family::Real => rank > i + 2,
        Family::Quaternionic => 4 * rank > i + 1,
    }
}

fn bound_text(family: Family) -> &'static str {
    match family {
        Family::Real => "requires n > i+2",
        Family::Quaternionic => "requires 2n > (i+1)/4",
    }
}

fn z() -> FgAbGroup {
    FgAbGroup::free(1)
}

fn z2() -> FgAbGroup {
    FgAbGroup::z2(1)
}

/// `π_d` of the stable classical atom, or `None` for a residual.
pub fn stable_pi(atom: &Atom, d: u32) -> Option<FgAbGroup> {
    let zero = FgAbGroup::trivial();
    Some(match atom {
        Atom::U => {
            if d % 2 == 1 {
                z()
            } else {
                zero
            }
        }
        Atom::O | Atom::SO => match d % 8 {
            0 if d == 0 && *atom == Atom::SO => zero,
            0 | 1 => z2(),
            3 | 7 => z(),
            _ => zero,
        },
        Atom::Sp => match d % 8 {
            3 | 7 => z(),
            4 | 5 => z2(),
            _ => zero,
        },
        Atom::UmodO | Atom::UmodSO => match d % 8 {
            _ if d == 0 => zero,
            1 | 5 => z(),
            2 | 3 => z2(),
            _ => zero,
        },
        Atom::UmodSp => match d % 8 {
            _ if d == 0 => zero,
            1 | 5 => z(),
            6 | 7 => z2(),
            _ => zero,
        },
        Atom::Circle => {
            if d == 1 {
                z()
            } else {
                zero
            }
        }
        Atom::Residual(_) => return None,
    })
}

/// `π_d` of a classical atom at the given family and rank, refusing degrees outside the caption bound.
pub fn atom_pi(atom: &Atom, d: u32, family: Family, rank: u64) -> Result<FgAbGroup, HomotopyError> {
    if !in_stable_range(family, rank, d) {
        return Err(HomotopyError::OutOfRange {
            degree: d,
            rank,
            bound: bound_text(family),
        });
    }
    stable_pi(atom, d).ok_or_else(|| HomotopyError::NotClassical(atom.to_string()))
}

/// `π₀` of a residual gauge group, read off the low-degree table.
pub fn residual_pi0(res: &ResidualAtom, rank: u64) -> Result<FgAbGroup, HomotopyError> {
    let s = res.surface;
    let (g, r, a) = (s.g(), s.r(), s.a());
    let single_eq_multi = s.marked_points() == 1;
    match res.family {
        Family::Real => {
            if rank <= 2 {
                return Err(HomotopyError::RankTooSmall(rank));
            }
            match res.flavor {
                Flavor::MultiPointed => Ok(FgAbGroup::z_z2(g + a, r)),
                Flavor::SinglePointed if single_eq_multi => Ok(FgAbGroup::z_z2(g + a, r)),
                // G*((1,1,1)) x OU is the 2-pointed group of (1,1,1)
                Flavor::SinglePointed if (g, r, a) == (1, 1, 1) => Ok(FgAbGroup::z_z2(1, 1)),
                Flavor::Unpointed if res.class.as_real().is_some_and(|c| c.tail_vanishes()) => {
                    Ok(FgAbGroup::z_z2(g, r + 1))
                }
                _ => Err(HomotopyError::NotTabulated(res.to_string())),
            }
        }
        Family::Quaternionic => match res.flavor {
            Flavor::MultiPointed => Ok(FgAbGroup::free(g + a)),
            Flavor::SinglePointed if single_eq_multi => Ok(FgAbGroup::free(g + a)),
            Flavor::SinglePointed if (g, r, a) == (1, 1, 1) => Ok(FgAbGroup::free(1)),
            Flavor::Unpointed => Ok(FgAbGroup::z_z2(g, a)),
            _ => Err(HomotopyError::NotTabulated(res.to_string())),
        },
    }
}

/// `π_i` of a decomposed expression.
pub fn pi_of_expr(
    expr: &SpaceExpr,
    i: u32,
    family: Family,
    rank: u64,
    req: LocalityRequest,
) -> GroupAnswer {
    let mut ans = GroupAnswer::new();
    let in_range = in_stable_range(family, rank, i);
    for f in expr.factors() {
        let d = i + f.loops;
        let unknown = |reason| UnknownSummand {
            atom: f.atom.clone(),
            degree: d,
            reason,
            locality: f.locality,
        };
        if !in_range {
            ans.add_unknown(unknown(UnknownReason::OutOfStableRange));
            continue;
        }
        match &f.atom {
            Atom::Residual(res) if d == 0 => match residual_pi0(res, rank) {
                Ok(g) => ans.add(f.locality, g.power(f.multiplicity)),
                Err(_) => ans.add_unknown(unknown(UnknownReason::ConditionsUnsatisfied)),
            },
            Atom::Residual(_) => {
                let reason = match (req, f.locality) {
                    (LocalityRequest::Integral, Locality::Integral) => {
                        UnknownReason::NoIntegralData
                    }
                    _ => UnknownReason::ConditionsUnsatisfied,
                };
                ans.add_unknown(unknown(reason));
            }
            atom => {
                let g = stable_pi(atom, d).expect("classical atom");
                ans.add(f.locality, g.power(f.multiplicity));
            }
        }
    }
    ans
}

/// `π_i` of a gauge group: decompose, then sum the factor contributions by locality.
pub fn pi(id: &GaugeGroupId, i: u32, req: LocalityRequest) -> Result<GroupAnswer, DecomposeError> {
    let expr = decompose(id, req)?;
    Ok(pi_of_expr(&expr, i, id.family(), id.rank(), req))
}
