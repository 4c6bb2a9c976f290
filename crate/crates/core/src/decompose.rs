//! The rewrite engine: gauge group → product of loop spaces.
//!
//! A decomposition starts from a single residual factor for the requested
//! gauge group. At each step the first residual factor that admits a rule is
//! replaced by the rule's right-hand side. Rules whose right-hand side is the
//! residual itself are discarded, so the engine stops at the irreducible types.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundles::{
    canonical_class, canonicalize, BundleClass, Family, Flavor, GaugeGroupId, RealClass,
};
use crate::groups::{is_prime, Locality, PrimeConstraint};
use crate::spaces::{Atom, Factor, ResidualAtom, SpaceExpr};
use crate::surfaces::SurfaceType;

const MAX_STEPS: usize = 256;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalityRequest {
    #[default]
    Integral,
    AtPrime(u64),
}

impl LocalityRequest {
    pub fn prime(&self) -> Option<u64> {
        match self {
            LocalityRequest::Integral => None,
            LocalityRequest::AtPrime(p) => Some(*p),
        }
    }
}

/// One rewrite step: which rule fired, on what, and the side conditions it checked.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleApplication {
    pub rule: String,
    pub target: String,
    pub conditions: Vec<(String, bool)>,
}

impl fmt::Display for RuleApplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.rule, self.target)?;
        if !self.conditions.is_empty() {
            let conds: Vec<_> = self.conditions.iter().map(|(c, _)| c.as_str()).collect();
            write!(f, " [{}]", conds.join("; "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("rewriting did not terminate within {MAX_STEPS} steps")]
    NoTermination,
}

/// Families of rewrite rules, used to order competing candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    A,
    B,
    GeneralSplitting,
    D1,
    D2,
    D3,
    C,
    Pointed111,
    E,
    QA,
    QB,
    QC,
    QD,
    QE,
}

/// Priority order among applicable rules; earlier kinds win.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    priority: Vec<RuleKind>,
}

impl Strategy {
    pub fn new(priority: Vec<RuleKind>) -> Self {
        Self { priority }
    }

    fn rank(&self, kind: RuleKind) -> usize {
        self.priority
            .iter()
            .position(|&k| k == kind)
            .unwrap_or(self.priority.len())
    }
}

impl Default for Strategy {
    /// Integral rules first; the general (1,1,1) splitting before its odd-rank special case.
    fn default() -> Self {
        use RuleKind::*;
        Self::new(vec![
            A,
            B,
            GeneralSplitting,
            D1,
            D2,
            D3,
            QA,
            QB,
            QD,
            Pointed111,
            C,
            E,
            QC,
            QE,
        ])
    }
}

struct Candidate {
    kind: RuleKind,
    id: String,
    conditions: Vec<(String, bool)>,
    locality: Locality,
    output: Vec<Factor>,
}

impl Candidate {
    fn integral(kind: RuleKind, id: impl Into<String>, output: Vec<Factor>) -> Self {
        Self {
            kind,
            id: id.into(),
            conditions: Vec::new(),
            locality: Locality::Integral,
            output,
        }
    }

    fn p_local(
        kind: RuleKind,
        id: impl Into<String>,
        constraint: PrimeConstraint,
        output: Vec<Factor>,
    ) -> Self {
        Self {
            kind,
            id: id.into(),
            conditions: Vec::new(),
            locality: Locality::PLocal(constraint),
            output,
        }
    }

    fn given(mut self, condition: impl Into<String>) -> Self {
        self.conditions.push((condition.into(), true));
        self
    }
}

fn surf(g: u32, r: u32, a: u32) -> SurfaceType {
    SurfaceType::new(g.into(), r.into(), a.into()).expect("rule targets are valid types")
}

/// Builds a residual in normal form: canonical class, and `(r+a)`-pointed
/// collapsed to single-pointed when there is only one designated point.
pub fn make_residual(
    family: Family,
    flavor: Flavor,
    surface: SurfaceType,
    class: &BundleClass,
    rank: u64,
) -> ResidualAtom {
    let flavor = if flavor == Flavor::MultiPointed && surface.marked_points() == 1 {
        Flavor::SinglePointed
    } else {
        flavor
    };
    let (class, _) = canonicalize(family, flavor, rank, class);
    ResidualAtom {
        family,
        flavor,
        surface,
        class,
    }
}

fn pow(atom: Atom, loops: u32, mult: u32) -> Factor {
    Factor::new(atom, loops, mult)
}

fn omega(atom: Atom, mult: u32) -> Factor {
    Factor::looped(atom, mult)
}

fn parity(even: bool) -> &'static str {
    if even {
        "even"
    } else {
        "odd"
    }
}

struct Ctx {
    rank: u64,
    prime: Option<u64>,
}

impl Ctx {
    fn residual(
        &self,
        family: Family,
        flavor: Flavor,
        surface: SurfaceType,
        class: BundleClass,
    ) -> Factor {
        Factor::residual(make_residual(family, flavor, surface, &class, self.rank))
    }

    fn odd_rank(&self) -> bool {
        self.rank % 2 == 1
    }

    fn odd_prime(&self) -> Option<u64> {
        self.prime.filter(|&p| p != 2)
    }

    fn coprime(&self) -> bool {
        self.prime.is_some_and(|p| !self.rank.is_multiple_of(p))
    }

    fn rank_is_prime(&self) -> bool {
        self.prime == Some(self.rank)
    }
}

fn real_candidates(res: &ResidualAtom, ctx: &Ctx) -> Vec<Candidate> {
    let fam = Family::Real;
    let s = res.surface;
    let (g, r, a) = (s.g(), s.r(), s.a());
    let rc = res
        .class
        .as_real()
        .cloned()
        .unwrap_or_else(|| RealClass::zero(r));
    let zero = |r: u32| BundleClass::Real(RealClass::zero(r));
    let single = Flavor::SinglePointed;
    let mut out = Vec::new();

    let pointed_as_multi =
        res.flavor == Flavor::MultiPointed || (res.flavor == single && s.marked_points() == 1);
    if pointed_as_multi {
        let c = if r == 0 {
            let (target, u, row) = if g % 2 == 0 {
                (surf(0, 0, 1), g, "even")
            } else {
                (surf(1, 0, 1), g - 1, "odd")
            };
            Candidate::integral(
                RuleKind::A,
                format!("ThmA-row(g,0,1)-{row}"),
                vec![
                    ctx.residual(fam, single, target, zero(0)),
                    omega(Atom::U, u),
                ],
            )
        } else if a == 0 {
            Candidate::integral(
                RuleKind::A,
                "ThmA-row(g,r,0)",
                vec![
                    pow(Atom::UmodO, 2, 1),
                    omega(Atom::U, g),
                    omega(Atom::O, r - 1),
                ],
            )
        } else {
            Candidate::integral(
                RuleKind::A,
                format!("ThmA-row(g,r,1)-{}", parity(s.g_minus_r_even())),
                vec![
                    ctx.residual(fam, single, surf(1, 1, 1), zero(1)),
                    omega(Atom::U, g),
                    omega(Atom::O, r - 1),
                ],
            )
        };
        out.push(c.given("any class"));
    } else if res.flavor == single {
        let n_odd = ctx.odd_rank();
        let tail = rc.tail_vanishes();
        if n_odd || tail {
            let cond = if n_odd { "n odd" } else { "w_i = 0 for i >= 2" };
            let c = if a == 0 {
                Candidate::integral(
                    RuleKind::B,
                    "ThmB-row(g,r,0)",
                    vec![
                        pow(Atom::UmodO, 2, 1),
                        omega(Atom::U, g + 1 - r),
                        omega(Atom::O, r - 1),
                        omega(Atom::UmodO, r - 1),
                    ],
                )
            } else {
                Candidate::integral(
                    RuleKind::B,
                    format!("ThmB-row(g,r,1)-{}", parity(s.g_minus_r_even())),
                    vec![
                        ctx.residual(fam, single, surf(1, 1, 1), zero(1)),
                        omega(Atom::U, g - r),
                        omega(Atom::O, r - 1),
                        omega(Atom::UmodO, r - 1),
                    ],
                )
            };
            out.push(c.given("r+a > 1").given(cond));
        } else {
            out.push(
                Candidate::integral(
                    RuleKind::GeneralSplitting,
                    "Thm2.2",
                    vec![
                        ctx.residual(fam, single, s.reduced(), res.class.clone()),
                        omega(Atom::U, s.g_prime()),
                    ],
                )
                .given(format!("g' = {}", s.g_prime())),
            );
        }
    }
    if res.flavor == single && ctx.odd_prime().is_some() {
        {
            let not_two = PrimeConstraint::NOT_TWO;
            match (g, r, a) {
                (0, 0, 1) if ctx.odd_rank() => out.push(
                    Candidate::p_local(
                        RuleKind::C,
                        "ThmC.1",
                        not_two,
                        vec![pow(Atom::UmodO, 2, 1), omega(Atom::UmodO, 1)],
                    )
                    .given("p != 2")
                    .given("n odd"),
                ),
                (1, 0, 1) if ctx.odd_rank() => out.push(
                    Candidate::p_local(
                        RuleKind::C,
                        "ThmC.2",
                        not_two,
                        vec![
                            pow(Atom::UmodO, 2, 1),
                            omega(Atom::UmodO, 1),
                            omega(Atom::U, 1),
                        ],
                    )
                    .given("p != 2")
                    .given("n odd"),
                ),
                (1, 1, 1) => {
                    out.push(
                        Candidate::p_local(
                            RuleKind::Pointed111,
                            "Thm2.17",
                            not_two,
                            vec![
                                ctx.residual(fam, single, surf(0, 0, 1), zero(0)),
                                omega(Atom::O, 1),
                            ],
                        )
                        .given("p != 2"),
                    );
                    if ctx.odd_rank() {
                        out.push(
                            Candidate::p_local(
                                RuleKind::C,
                                "ThmC.3",
                                not_two,
                                vec![
                                    pow(Atom::UmodO, 2, 1),
                                    omega(Atom::UmodO, 1),
                                    omega(Atom::O, 1),
                                ],
                            )
                            .given("p != 2")
                            .given("n odd"),
                        );
                    }
                }
                _ => {}
            }
        }
    }
    if res.flavor == Flavor::Unpointed {
        let gp = s.g_prime();
        if gp > 0 {
            let row = if a == 0 {
                "ThmD.1-row(g,r,0)".to_string()
            } else {
                format!("ThmD.1-row(g,r,1)-{}", parity(s.g_minus_r_even()))
            };
            out.push(
                Candidate::integral(
                    RuleKind::D1,
                    row,
                    vec![
                        ctx.residual(fam, Flavor::Unpointed, s.reduced(), res.class.clone()),
                        omega(Atom::U, gp),
                    ],
                )
                .given(format!("g' = {gp}")),
            );
        }
        if (g, r, a) == (2, 1, 1) {
            out.push(Candidate::integral(
                RuleKind::D2,
                "ThmD.2",
                vec![
                    ctx.residual(fam, Flavor::Unpointed, surf(1, 1, 1), res.class.clone()),
                    omega(Atom::U, 1),
                ],
            ));
        }
        if r > 1 && (ctx.odd_rank() || rc.tail_vanishes()) {
            let target = match (a, g + 1 == r, g == r, g == r + 1) {
                (0, true, _, _) => Some(("ThmD.3-row(r-1,r,0)", surf(0, 1, 0))),
                (1, _, true, _) => Some(("ThmD.3-row(r,r,1)", surf(1, 1, 1))),
                (1, _, _, true) => Some(("ThmD.3-row(r+1,r,1)", surf(2, 1, 1))),
                _ => None,
            };
            if let Some((row, target)) = target {
                let class = BundleClass::Real(RealClass::new(rc.c, vec![rc.w_sum() % 2 == 1]));
                let cond = if ctx.odd_rank() {
                    "n odd"
                } else {
                    "w_i = 0 for i >= 2"
                };
                out.push(
                    Candidate::integral(
                        RuleKind::D3,
                        row,
                        vec![
                            ctx.residual(fam, Flavor::Unpointed, target, class),
                            omega(Atom::O, r - 1),
                            omega(Atom::UmodO, r - 1),
                        ],
                    )
                    .given("r >= 1")
                    .given(cond),
                );
            }
        }
        if let Some(p) = ctx.prime {
            let regime = if ctx.coprime() {
                Some(("1", PrimeConstraint::COPRIME, "p does not divide n"))
            } else if ctx.rank_is_prime() {
                Some(("2", PrimeConstraint::EQUALS_RANK, "n = p"))
            } else {
                None
            };
            if let Some((part, constraint, cond)) = regime {
                if r == 1 && !rc.w[0] {
                    out.push(
                        Candidate::p_local(
                            RuleKind::E,
                            format!("ThmE.{part}a"),
                            constraint,
                            vec![
                                pow(Atom::O, 0, 1),
                                ctx.residual(
                                    fam,
                                    single,
                                    s,
                                    BundleClass::Real(RealClass::new(rc.c, vec![false])),
                                ),
                            ],
                        )
                        .given(cond)
                        .given("w_1 = 0"),
                    );
                }
                let odd_ok = p != 2 && (part == "2" || ctx.odd_rank());
                if odd_ok && r == 0 && g <= 1 {
                    let constraint = constraint
                        .join(PrimeConstraint::NOT_TWO)
                        .expect("compatible");
                    let mut factors = vec![pow(Atom::SO, 0, 1), pow(Atom::UmodSO, 2, 1)];
                    let sub = if g == 0 {
                        "b"
                    } else {
                        factors.push(omega(Atom::U, 1));
                        "c"
                    };
                    let mut c = Candidate::p_local(
                        RuleKind::E,
                        format!("ThmE.{part}{sub}"),
                        constraint,
                        factors,
                    )
                    .given(cond)
                    .given("p != 2");
                    if part == "1" {
                        c = c.given("n odd");
                    }
                    out.push(c);
                }
            }
        }
    }
    out
}

fn quat_candidates(res: &ResidualAtom, ctx: &Ctx) -> Vec<Candidate> {
    let fam = Family::Quaternionic;
    let s = res.surface;
    let (g, r, a) = (s.g(), s.r(), s.a());
    let zero = BundleClass::Quaternionic(0);
    let single = Flavor::SinglePointed;
    let mut out = Vec::new();

    let pointed_as_multi =
        res.flavor == Flavor::MultiPointed || (res.flavor == single && s.marked_points() == 1);
    if pointed_as_multi {
        out.push(if r == 0 {
            let (target, u, row) = if g % 2 == 0 {
                (surf(0, 0, 1), g, "even")
            } else {
                (surf(1, 0, 1), g - 1, "odd")
            };
            Candidate::integral(
                RuleKind::QA,
                format!("ThmQA-row(g,0,1)-{row}"),
                vec![
                    ctx.residual(fam, single, target, zero.clone()),
                    omega(Atom::U, u),
                ],
            )
        } else if a == 0 {
            Candidate::integral(
                RuleKind::QA,
                "ThmQA-row(g,r,0)",
                vec![
                    pow(Atom::UmodSp, 2, 1),
                    omega(Atom::U, g),
                    omega(Atom::Sp, r - 1),
                ],
            )
        } else {
            Candidate::integral(
                RuleKind::QA,
                format!("ThmQA-row(g,r,1)-{}", parity(s.g_minus_r_even())),
                vec![
                    ctx.residual(fam, single, surf(1, 1, 1), zero.clone()),
                    omega(Atom::U, g),
                    omega(Atom::Sp, r - 1),
                ],
            )
        });
    } else if res.flavor == single {
        out.push(
            if a == 0 {
                Candidate::integral(
                    RuleKind::QB,
                    "ThmQB-row(g,r,0)",
                    vec![
                        pow(Atom::UmodSp, 2, 1),
                        omega(Atom::U, g + 1 - r),
                        omega(Atom::Sp, r - 1),
                        omega(Atom::UmodSp, r - 1),
                    ],
                )
            } else {
                Candidate::integral(
                    RuleKind::QB,
                    "ThmQB-row(g,r,1)",
                    vec![
                        ctx.residual(fam, single, surf(1, 1, 1), zero.clone()),
                        omega(Atom::U, g - r),
                        omega(Atom::Sp, r - 1),
                        omega(Atom::UmodSp, r - 1),
                    ],
                )
            }
            .given("r+a > 1"),
        );
    }
    if res.flavor == single && ctx.odd_prime().is_some() {
        {
            let not_two = PrimeConstraint::NOT_TWO;
            let base = vec![pow(Atom::UmodSp, 2, 1), omega(Atom::UmodSp, 1)];
            let extra = match (g, r, a) {
                (0, 0, 1) => Some(("ThmQC.1", None)),
                (1, 0, 1) => Some(("ThmQC.2", Some(omega(Atom::U, 1)))),
                (1, 1, 1) => Some(("ThmQC.3", Some(omega(Atom::Sp, 1)))),
                _ => None,
            };
            if let Some((id, extra)) = extra {
                let mut factors = base;
                factors.extend(extra);
                out.push(Candidate::p_local(RuleKind::QC, id, not_two, factors).given("p != 2"));
            }
        }
    }
    if res.flavor == Flavor::Unpointed {
        let class = res.class.clone();
        let unpointed = Flavor::Unpointed;
        out.push(if r == 0 {
            let (target, u, row) = if g % 2 == 0 {
                (surf(0, 0, 1), g, "even")
            } else {
                (surf(1, 0, 1), g - 1, "odd")
            };
            Candidate::integral(
                RuleKind::QD,
                format!("ThmQD-row(g,0,1)-{row}"),
                vec![
                    ctx.residual(fam, unpointed, target, class),
                    omega(Atom::U, u),
                ],
            )
        } else if a == 0 {
            Candidate::integral(
                RuleKind::QD,
                "ThmQD-row(g,r,0)",
                vec![
                    ctx.residual(fam, unpointed, surf(0, 1, 0), class),
                    omega(Atom::Sp, r - 1),
                    omega(Atom::UmodSp, r - 1),
                    omega(Atom::U, g + 1 - r),
                ],
            )
        } else {
            Candidate::integral(
                RuleKind::QD,
                "ThmQD-row(g,r,1)",
                vec![
                    ctx.residual(fam, unpointed, surf(1, 1, 1), class),
                    omega(Atom::Sp, r - 1),
                    omega(Atom::UmodSp, r - 1),
                    omega(Atom::U, g - r),
                ],
            )
        });
        if ctx.coprime() {
            let coprime = PrimeConstraint::COPRIME;
            let cond = "p does not divide 2n";
            if r == 1 {
                out.push(
                    Candidate::p_local(
                        RuleKind::QE,
                        "ThmQE.1",
                        coprime,
                        vec![
                            pow(Atom::Sp, 0, 1),
                            ctx.residual(fam, single, s, res.class.clone()),
                        ],
                    )
                    .given(cond),
                );
            }
            if r == 0 && g <= 1 {
                let mut factors = vec![pow(Atom::Sp, 0, 1), pow(Atom::UmodSp, 2, 1)];
                let id = if g == 0 {
                    "ThmQE.2"
                } else {
                    factors.push(omega(Atom::U, 1));
                    "ThmQE.3"
                };
                out.push(Candidate::p_local(RuleKind::QE, id, coprime, factors).given(cond));
            }
        }
    }
    out
}

fn is_identity(c: &Candidate, res: &ResidualAtom) -> bool {
    let live: Vec<_> = c.output.iter().filter(|f| f.multiplicity > 0).collect();
    matches!(live.as_slice(), [f] if f.atom.as_residual() == Some(res) && f.loops == 0 && f.multiplicity == 1)
}

/// Decomposes `id` with the default rule priority.
pub fn decompose(id: &GaugeGroupId, req: LocalityRequest) -> Result<SpaceExpr, DecomposeError> {
    decompose_with(id, req, &Strategy::default())
}

pub fn decompose_with(
    id: &GaugeGroupId,
    req: LocalityRequest,
    strategy: &Strategy,
) -> Result<SpaceExpr, DecomposeError> {
    if let Some(p) = req.prime() {
        if !is_prime(p) {
            return Err(DecomposeError::NotPrime(p));
        }
    }
    let ctx = Ctx {
        rank: id.rank(),
        prime: req.prime(),
    };
    let (class, _) = canonical_class(id);
    let root = make_residual(id.family(), id.flavor(), id.surface(), &class, id.rank());
    let mut factors = vec![Factor::residual(root)];
    let mut provenance = Vec::new();

    for _ in 0..MAX_STEPS {
        let mut fired = None;
        for (idx, factor) in factors.iter().enumerate() {
            let Some(res) = factor.atom.as_residual() else {
                continue;
            };
            let cands = match res.family {
                Family::Real => real_candidates(res, &ctx),
                Family::Quaternionic => quat_candidates(res, &ctx),
            };
            let best = cands
                .into_iter()
                .filter(|c| !is_identity(c, res))
                .filter_map(|c| factor.locality.join(c.locality).map(|loc| (loc, c)))
                .min_by_key(|(_, c)| strategy.rank(c.kind));
            if let Some((loc, c)) = best {
                fired = Some((idx, loc, c));
                break;
            }
        }
        let Some((idx, loc, cand)) = fired else {
            return Ok(SpaceExpr::from_factors(factors).with_provenance(provenance));
        };
        let parent = factors.remove(idx);
        provenance.push(RuleApplication {
            rule: cand.id,
            target: parent.atom.to_string(),
            conditions: cand.conditions,
        });
        for mut f in cand.output {
            f.locality = loc;
            f.loops += parent.loops;
            f.multiplicity *= parent.multiplicity;
            factors.push(f);
        }
        factors = SpaceExpr::from_factors(factors).factors().to_vec();
    }
    Err(DecomposeError::NoTermination)
}

/// Checks that every p-local factor's constraint holds for the concrete `(p, rank)`.
pub fn localities_valid(expr: &SpaceExpr, p: u64, rank: u64) -> bool {
    expr.factors().iter().all(|f| match f.locality {
        Locality::Integral => true,
        Locality::PLocal(c) => c.satisfied_by(p, rank),
    })
}
