//! Regenerates the low-degree table and the high-rank tables from the engine,
//! side by side with the published formulas.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::bundles::{Family, Flavor, GaugeGroupId};
use crate::decompose::LocalityRequest;
use crate::groups::{is_prime, FgAbGroup, GroupAnswer};
use crate::homotopy::pi;
use crate::surfaces::{enumerate, SurfaceType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("rank {rank} violates the table bound ({bound}) for degrees up to {max_degree}")]
    Bound {
        rank: u64,
        max_degree: u32,
        bound: &'static str,
    },
    #[error("Quaternionic rank must be even, got {0}")]
    OddQuaternionicRank(u64),
    #[error("pi_0 of residual gauge groups needs n > 2, got n = {0}")]
    RankTooSmall(u64),
}

// ---------------------------------------------------------------------------
// Printed formulas

/// `c0 + cg·g + cr·r + ca·a + ceta·η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Linear {
    pub c0: i64,
    pub g: i64,
    pub r: i64,
    pub a: i64,
    pub eta: i64,
}

impl Linear {
    pub fn eval(&self, t: SurfaceType) -> i64 {
        self.c0
            + self.g * i64::from(t.g())
            + self.r * i64::from(t.r())
            + self.a * i64::from(t.a())
            + self.eta * i64::from(t.eta())
    }

    fn parse(s: &str) -> Option<Linear> {
        let mut out = Linear::default();
        let s = s.replace('-', "+-");
        for term in s.split('+').filter(|t| !t.is_empty()) {
            let (sign, name) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term),
            };
            match name {
                "g" => out.g += sign,
                "r" => out.r += sign,
                "a" => out.a += sign,
                "eta" => out.eta += sign,
                num => out.c0 += sign * num.parse::<i64>().ok()?,
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Base {
    Z,
    Z2,
}

/// One factor of a printed entry such as `(Z2^{1+eta})_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub base: Base,
    pub exponent: Linear,
    pub p_local: bool,
}

/// A printed table entry: a product of monomials, written in the printed notation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Formula {
    pub text: &'static str,
    #[serde(skip)]
    pub monomials: Vec<Monomial>,
}

impl Formula {
    /// Parses entries like `Z^{g-1} x Z2^{r-1} x (Z^{1+a})_p`.
    pub fn parse(text: &'static str) -> Formula {
        let monomials = if text == "0" {
            Vec::new()
        } else {
            text.split(" x ")
                .map(|m| parse_monomial(m).unwrap_or_else(|| panic!("bad formula {text}")))
                .collect()
        };
        Formula { text, monomials }
    }

    /// `(integral part, p-local part)`, or `None` if an exponent goes negative.
    pub fn eval(&self, t: SurfaceType) -> Option<(FgAbGroup, FgAbGroup)> {
        let mut integral = FgAbGroup::trivial();
        let mut local = FgAbGroup::trivial();
        for m in &self.monomials {
            let e = u32::try_from(m.exponent.eval(t)).ok()?;
            let g = match m.base {
                Base::Z => FgAbGroup::free(e),
                Base::Z2 => FgAbGroup::z2(e),
            };
            if m.p_local {
                local = local.direct_sum(&g);
            } else {
                integral = integral.direct_sum(&g);
            }
        }
        Some((integral, local))
    }
}

fn parse_monomial(s: &str) -> Option<Monomial> {
    let (body, p_local) = match s.strip_prefix('(').and_then(|x| x.strip_suffix(")_p")) {
        Some(inner) => (inner, true),
        None => (s, false),
    };
    let (base, exp) = match body.split_once('^') {
        Some((b, e)) => (b, e.trim_start_matches('{').trim_end_matches('}')),
        None => (body, "1"),
    };
    let base = match base {
        "Z" => Base::Z,
        "Z2" => Base::Z2,
        _ => return None,
    };
    Some(Monomial {
        base,
        exponent: Linear::parse(exp)?,
        p_local,
    })
}

/// Real high-rank table, rows `π_{8j+k}`: `(r+a)`-pointed, unpointed.
pub const TABLE2_TEXT: [[&str; 2]; 8] = [
    [
        "Z^{g-1} x Z2^{r-1} x (Z^{1+a})_p x (Z2^{1+eta})_p",
        "Z^{g-1} x Z2^{r-1} x (Z)_p x (Z2^{1+eta})_p",
    ],
    ["(Z2^{1+a})_p", "Z2^{r-1} x (Z2^{2+eta})_p"],
    [
        "Z^{g+r-2} x (Z^{1+eta})_p x (Z2^{a})_p",
        "Z^{g-1} x Z2^{r-1} x (Z)_p x (Z2^{eta})_p",
    ],
    ["(Z)_p", "(Z^2)_p"],
    ["Z^{g-1} x (Z^{1+a})_p", "Z^{g-1} x (Z)_p"],
    ["0", "0"],
    ["Z^{g+r-2} x (Z^{1+eta})_p", "Z^{g-1} x (Z^{1-eta})_p"],
    [
        "Z2^{r-1} x (Z)_p x (Z2^{eta})_p",
        "Z2^{r-1} x (Z^2)_p x (Z2^{eta})_p",
    ],
];

/// Quaternionic high-rank table, transcribed independently of [`TABLE2_TEXT`].
pub const TABLE3_TEXT: [[&str; 2]; 8] = [
    ["Z^{g-1} x (Z^{1+a})_p", "Z^{g-1} x (Z)_p"],
    ["0", "0"],
    ["Z^{g+r-2} x (Z^{1+eta})_p", "Z^{g-1} x (Z^{1-eta})_p"],
    [
        "Z2^{r-1} x (Z)_p x (Z2^{eta})_p",
        "Z2^{r-1} x (Z^2)_p x (Z2^{eta})_p",
    ],
    [
        "Z^{g-1} x Z2^{r-1} x (Z^{1+a})_p x (Z2^{1+eta})_p",
        "Z^{g-1} x Z2^{r-1} x (Z)_p x (Z2^{1+eta})_p",
    ],
    ["(Z2^{1+a})_p", "Z2^{r-1} x (Z2^{2+eta})_p"],
    [
        "Z^{g+r-2} x (Z^{1+eta})_p x (Z2^{a})_p",
        "Z^{g-1} x Z2^{r-1} x (Z)_p x (Z2^{eta})_p",
    ],
    ["(Z)_p", "(Z^2)_p"],
];

pub fn formula(family: Family, k: usize, flavor: Flavor) -> Formula {
    let col = usize::from(flavor == Flavor::Unpointed);
    let text = match family {
        Family::Real => TABLE2_TEXT[k % 8][col],
        Family::Quaternionic => TABLE3_TEXT[k % 8][col],
    };
    Formula::parse(text)
}

// ---------------------------------------------------------------------------
// Low-degree table

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Agrees,
    Corrected,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub engine: GroupAnswer,
    pub published: String,
    pub status: CellStatus,
}

impl Cell {
    fn new(engine: GroupAnswer, published: FgAbGroup) -> Self {
        let status = if !engine.is_exact() {
            CellStatus::Unknown
        } else if engine.total() == published {
            CellStatus::Agrees
        } else {
            CellStatus::Corrected
        };
        Cell {
            engine,
            published: published.render_compact(),
            status,
        }
    }

    pub fn render(&self) -> String {
        match self.status {
            CellStatus::Agrees => self.engine.to_string(),
            CellStatus::Corrected => {
                format!("{} (corrected; published: {})", self.engine, self.published)
            }
            CellStatus::Unknown => format!("{} (published: {})", self.engine, self.published),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub surface: SurfaceType,
    pub pi0_multi: Cell,
    pub pi0_unpointed: Cell,
    pub pi1_multi: Cell,
    pub pi1_unpointed: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1 {
    pub family: Family,
    pub rank: u64,
    pub rows: Vec<Table1Row>,
}

/// Published low-degree values, as functions of the type.
pub fn published_low_degree(family: Family, t: SurfaceType) -> [FgAbGroup; 4] {
    let (g, r, a) = (t.g(), t.r(), t.a());
    match family {
        Family::Real => [
            FgAbGroup::z_z2(g + a, r),
            FgAbGroup::z_z2(g, r + 1),
            FgAbGroup::free(1),
            FgAbGroup::z_z2(1, r),
        ],
        Family::Quaternionic => [
            FgAbGroup::free(g + a),
            FgAbGroup::z_z2(g, a),
            FgAbGroup::free(1),
            FgAbGroup::free(1),
        ],
    }
}

/// Published rows for `n <= 2` (Real family), kept as reference text only.
pub const LOW_RANK_REFERENCE: [(&str, [&str; 4]); 2] = [
    ("n=2", ["Z^{g+a+r}", "Z^{g+r} x Z2", "Z", "Z^{r+1}"]),
    ("n=1", ["Z^{g+a}", "Z^g x Z2", "0", "0"]),
];

fn trivial_id(family: Family, flavor: Flavor, t: SurfaceType, rank: u64) -> GaugeGroupId {
    GaugeGroupId::trivial(family, flavor, t, rank).expect("rank validated by caller")
}

pub fn emit_table1(family: Family, rank: u64, g_max: u32) -> Result<Table1, TableError> {
    match family {
        Family::Real if rank <= 2 => return Err(TableError::RankTooSmall(rank)),
        Family::Quaternionic if !rank.is_multiple_of(2) => {
            return Err(TableError::OddQuaternionicRank(rank))
        }
        _ => {}
    }
    let rows = enumerate(g_max)
        .into_iter()
        .map(|t| {
            let published = published_low_degree(family, t);
            let at = |flavor, i| {
                pi(
                    &trivial_id(family, flavor, t, rank),
                    i,
                    LocalityRequest::Integral,
                )
                .expect("integral request")
            };
            let [p0m, p0u, p1m, p1u] = published;
            Table1Row {
                surface: t,
                pi0_multi: Cell::new(at(Flavor::MultiPointed, 0), p0m),
                pi0_unpointed: Cell::new(at(Flavor::Unpointed, 0), p0u),
                pi1_multi: Cell::new(at(Flavor::MultiPointed, 1), p1m),
                pi1_unpointed: Cell::new(at(Flavor::Unpointed, 1), p1u),
            }
        })
        .collect();
    Ok(Table1 { family, rank, rows })
}

impl Table1 {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let fam = match self.family {
            Family::Real => "Real",
            Family::Quaternionic => "Quaternionic",
        };
        let _ = writeln!(
            s,
            "## Low-degree homotopy groups, {fam}, rank {}\n",
            self.rank
        );
        s.push_str("| type | pi_0 (r+a)-pointed | pi_0 unpointed | pi_1 (r+a)-pointed | pi_1 unpointed |\n");
        s.push_str("|---|---|---|---|---|\n");
        for row in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} |",
                row.surface,
                row.pi0_multi.render(),
                row.pi0_unpointed.render(),
                row.pi1_multi.render(),
                row.pi1_unpointed.render()
            );
        }
        if self.family == Family::Real {
            s.push_str("\nPublished low-rank rows (reference only, not computed):\n\n");
            for (label, cells) in LOW_RANK_REFERENCE {
                let _ = writeln!(s, "- {label}: {}", cells.join(" | "));
            }
        }
        s
    }
}

// ---------------------------------------------------------------------------
// High-rank tables

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Integral and p-local parts agree with the formula.
    Exact,
    /// The engine knows integrally what the formula only states p-locally.
    Stronger,
    Mismatch,
}

impl Verdict {
    pub fn is_match(&self) -> bool {
        !matches!(self, Verdict::Mismatch)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub degree: u32,
    pub flavor: Flavor,
    pub engine: GroupAnswer,
    pub formula: Formula,
    pub expected_integral: Option<FgAbGroup>,
    pub expected_p_local: Option<FgAbGroup>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableInstance {
    pub family: Family,
    pub surface: SurfaceType,
    pub rank: u64,
    pub j: u32,
    pub prime: u64,
    pub rows: Vec<TableRow>,
}

/// Compares an engine answer with an instantiated formula.
pub fn compare(engine: &GroupAnswer, expected: Option<&(FgAbGroup, FgAbGroup)>) -> Verdict {
    let Some((t_int, t_loc)) = expected else {
        return Verdict::Mismatch;
    };
    if !engine.is_exact() {
        return Verdict::Mismatch;
    }
    let e_int = engine.integral();
    let e_loc = engine.p_local_total();
    if &e_int == t_int && &e_loc == t_loc {
        Verdict::Exact
    } else if e_int.contains_summand(t_int) && e_int.direct_sum(&e_loc) == t_int.direct_sum(t_loc) {
        Verdict::Stronger
    } else {
        Verdict::Mismatch
    }
}

/// The prime used to instantiate `(−)_p` entries: the smallest odd prime not dividing the rank.
pub fn comparison_prime(rank: u64) -> u64 {
    (3..)
        .find(|&p| is_prime(p) && !rank.is_multiple_of(p))
        .expect("primes are unbounded")
}

fn check_bound(family: Family, rank: u64, j: u32) -> Result<(), TableError> {
    let max_degree = 8 * j + 7;
    let ok = match family {
        Family::Real => rank > u64::from(max_degree) + 2,
        Family::Quaternionic => 4 * rank > u64::from(max_degree) + 1,
    };
    if ok {
        Ok(())
    } else {
        let bound = match family {
            Family::Real => "n > i+2",
            Family::Quaternionic => "2n > (i+1)/4",
        };
        Err(TableError::Bound {
            rank,
            max_degree,
            bound,
        })
    }
}

fn emit_instance(
    family: Family,
    t: SurfaceType,
    rank: u64,
    j: u32,
) -> Result<TableInstance, TableError> {
    if family == Family::Quaternionic && !rank.is_multiple_of(2) {
        return Err(TableError::OddQuaternionicRank(rank));
    }
    check_bound(family, rank, j)?;
    let prime = comparison_prime(rank);
    let req = LocalityRequest::AtPrime(prime);
    let mut rows = Vec::with_capacity(16);
    for k in 0..8u32 {
        let degree = 8 * j + k;
        for flavor in [Flavor::MultiPointed, Flavor::Unpointed] {
            let engine =
                pi(&trivial_id(family, flavor, t, rank), degree, req).expect("prime request");
            let formula = formula(family, k as usize, flavor);
            let expected = formula.eval(t);
            let verdict = compare(&engine, expected.as_ref());
            let (expected_integral, expected_p_local) =
                expected.map_or((None, None), |(i, l)| (Some(i), Some(l)));
            rows.push(TableRow {
                degree,
                flavor,
                engine,
                formula,
                expected_integral,
                expected_p_local,
                verdict,
            });
        }
    }
    Ok(TableInstance {
        family,
        surface: t,
        rank,
        j,
        prime,
        rows,
    })
}

/// Real family, degrees `8j ..= 8j+7`; needs `n > 8j+9`.
pub fn emit_table2_instance(t: SurfaceType, n: u64, j: u32) -> Result<TableInstance, TableError> {
    emit_instance(Family::Real, t, n, j)
}

/// Quaternionic family at unitary rank `2n`, degrees `8j ..= 8j+7`.
pub fn emit_table3_instance(
    t: SurfaceType,
    rank: u64,
    j: u32,
) -> Result<TableInstance, TableError> {
    emit_instance(Family::Quaternionic, t, rank, j)
}

fn render_expected(i: &Option<FgAbGroup>, l: &Option<FgAbGroup>) -> String {
    match (i, l) {
        (Some(i), Some(l)) if l.is_trivial() => i.render_compact(),
        (Some(i), Some(l)) if i.is_trivial() => format!("({})_p", l.render_compact()),
        (Some(i), Some(l)) => format!("{} + ({})_p", i.render_compact(), l.render_compact()),
        _ => "undefined".into(),
    }
}

impl TableInstance {
    pub fn mismatches(&self) -> impl Iterator<Item = &TableRow> {
        self.rows.iter().filter(|r| !r.verdict.is_match())
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let fam = match self.family {
            Family::Real => "Real",
            Family::Quaternionic => "Quaternionic",
        };
        let _ = writeln!(
            s,
            "## High-rank homotopy groups, {fam}, type {}, rank {}, j = {}, p = {}\n",
            self.surface, self.rank, self.j, self.prime
        );
        s.push_str("| degree | group | engine | formula | instantiated | verdict |\n");
        s.push_str("|---|---|---|---|---|---|\n");
        for row in &self.rows {
            let group = match row.flavor {
                Flavor::MultiPointed => "(r+a)-pointed",
                Flavor::SinglePointed => "single-pointed",
                Flavor::Unpointed => "unpointed",
            };
            let verdict = match row.verdict {
                Verdict::Exact => "exact",
                Verdict::Stronger => "stronger than table",
                Verdict::Mismatch => "MISMATCH",
            };
            let _ = writeln!(
                s,
                "| pi_{} | {group} | {} | {} | {} | {verdict} |",
                row.degree,
                row.engine,
                row.formula.text,
                render_expected(&row.expected_integral, &row.expected_p_local)
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(g: i64, r: i64, a: i64) -> SurfaceType {
        SurfaceType::new(g, r, a).unwrap()
    }

    #[test]
    fn formula_parsing() {
        let f = Formula::parse("Z^{g+r-2} x (Z^{1+eta})_p x (Z2^{a})_p");
        let (i, l) = f.eval(s(5, 2, 1)).unwrap();
        assert_eq!(i, FgAbGroup::free(5));
        assert_eq!(l, FgAbGroup::z_z2(2, 1));
        assert_eq!(
            Formula::parse("0").eval(s(0, 1, 0)),
            Some((FgAbGroup::trivial(), FgAbGroup::trivial()))
        );
        assert_eq!(Formula::parse("Z^{g-1}").eval(s(0, 1, 0)), None);
    }

    #[test]
    fn quaternionic_table_is_a_shift() {
        for k in 0..8 {
            assert_eq!(TABLE3_TEXT[k], TABLE2_TEXT[(k + 4) % 8]);
        }
    }

    #[test]
    fn table1_cells() {
        let t = emit_table1(Family::Real, 5, 3).unwrap();
        let row = t.rows.iter().find(|r| r.surface == s(3, 2, 0)).unwrap();
        assert_eq!(row.pi0_multi.render(), "Z^3 x Z/2^2");
        assert_eq!(row.pi1_multi.render(), "Z/2 (corrected; published: Z)");
        let q = emit_table1(Family::Quaternionic, 6, 2).unwrap();
        let row = q.rows.iter().find(|r| r.surface == s(2, 0, 1)).unwrap();
        assert_eq!(row.pi0_unpointed.render(), "Z^2 x Z/2");
    }

    #[test]
    fn bounds() {
        assert!(emit_table2_instance(s(3, 2, 0), 13, 0).is_ok());
        assert_eq!(
            emit_table2_instance(s(3, 2, 0), 13, 1).unwrap_err(),
            TableError::Bound {
                rank: 13,
                max_degree: 15,
                bound: "n > i+2"
            }
        );
        assert!(emit_table3_instance(s(3, 2, 0), 6, 0).is_ok());
        assert_eq!(
            emit_table3_instance(s(3, 2, 0), 5, 0).unwrap_err(),
            TableError::OddQuaternionicRank(5)
        );
    }

    #[test]
    fn stronger_than_table() {
        let inst = emit_table2_instance(s(3, 2, 0), 13, 0).unwrap();
        let row = inst
            .rows
            .iter()
            .find(|r| r.degree == 4 && r.flavor == Flavor::MultiPointed)
            .unwrap();
        assert_eq!(row.verdict, Verdict::Stronger);
        assert_eq!(row.engine.to_string(), "Z^3");
    }
}
