use proptest::prelude::*;
use realgauge::bundles::{BundleClass, Family, Flavor, GaugeGroupId, RealClass};
use realgauge::decompose::{
    decompose, decompose_with, localities_valid, LocalityRequest, RuleKind,
    Strategy as RulePriority,
};
use realgauge::groups::{FgAbGroup, TorsionPiece};
use realgauge::spaces::{parse_expr, Factor};
use realgauge::surfaces::{enumerate, SurfaceType};

fn group() -> impl Strategy<Value = FgAbGroup> {
    (
        0u32..4,
        prop::collection::vec((prop::sample::select(vec![2u64, 3, 5, 7]), 1u32..4), 0..5),
    )
        .prop_map(|(free, pieces)| {
            FgAbGroup::new(
                free,
                pieces
                    .into_iter()
                    .map(|(p, e)| TorsionPiece::new(p, e).unwrap()),
            )
        })
}

fn surface() -> impl Strategy<Value = SurfaceType> {
    prop::sample::select(enumerate(8))
}

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(vec![Family::Real, Family::Quaternionic])
}

fn flavor() -> impl Strategy<Value = Flavor> {
    prop::sample::select(vec![
        Flavor::Unpointed,
        Flavor::SinglePointed,
        Flavor::MultiPointed,
    ])
}

fn request() -> impl Strategy<Value = LocalityRequest> {
    prop_oneof![
        Just(LocalityRequest::Integral),
        prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(LocalityRequest::AtPrime),
    ]
}

fn gauge_id() -> impl Strategy<Value = GaugeGroupId> {
    (
        family(),
        flavor(),
        surface(),
        1u64..16,
        -20i64..20,
        prop::collection::vec(any::<bool>(), 16),
    )
        .prop_map(|(family, flavor, t, n, c, bits)| {
            let (class, rank) = match family {
                Family::Real => {
                    let w: Vec<bool> = bits[..t.r() as usize].to_vec();
                    let odd = w.iter().filter(|b| **b).count() as i64 % 2;
                    (BundleClass::Real(RealClass::new(2 * c + odd, w)), n)
                }
                Family::Quaternionic => (BundleClass::Quaternionic(2 * c), 2 * n),
            };
            GaugeGroupId::new(family, flavor, t, class, rank).unwrap()
        })
}

proptest! {
    #[test]
    fn direct_sum_is_a_commutative_monoid(a in group(), b in group(), c in group()) {
        prop_assert_eq!(a.direct_sum(&b).direct_sum(&c), a.direct_sum(&b.direct_sum(&c)));
        prop_assert_eq!(a.direct_sum(&b), b.direct_sum(&a));
        prop_assert_eq!(a.direct_sum(&FgAbGroup::trivial()), a.clone());
    }

    #[test]
    fn localization_is_additive_and_idempotent(a in group(), b in group(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assert_eq!(a.direct_sum(&b).localize(p), a.localize(p).direct_sum(&b.localize(p)));
        prop_assert_eq!(a.localize(p).localize(p), a.localize(p));
    }

    #[test]
    fn invariant_factors_round_trip(a in group()) {
        let back = FgAbGroup::from_invariant_factors(&a.invariant_factors(), a.free_rank()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn complement_undoes_direct_sum(a in group(), b in group()) {
        prop_assert_eq!(a.direct_sum(&b).complement(&b), Some(a));
    }

    #[test]
    fn group_json_round_trips(a in group()) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<FgAbGroup>(&text).unwrap(), a);
    }

    #[test]
    fn surface_text_round_trips(t in surface()) {
        prop_assert_eq!(t.to_string().trim_matches(|c| c == '(' || c == ')').parse::<SurfaceType>().unwrap(), t);
    }

    #[test]
    fn class_spec_round_trips(id in gauge_id()) {
        let class = id.class();
        prop_assert_eq!(&BundleClass::parse(&class.spec(), id.family()).unwrap(), class);
    }

    #[test]
    fn decomposition_render_round_trips(id in gauge_id(), req in request()) {
        let expr = decompose(&id, req).unwrap();
        let parsed = parse_expr(&expr.render()).unwrap();
        prop_assert_eq!(parsed.factors(), expr.factors());
    }

    #[test]
    fn decomposition_json_round_trips(id in gauge_id(), req in request()) {
        let expr = decompose(&id, req).unwrap();
        let text = serde_json::to_string(expr.factors()).unwrap();
        let back: Vec<Factor> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.as_slice(), expr.factors());
    }

    #[test]
    fn decomposition_is_deterministic_and_locally_valid(id in gauge_id(), req in request()) {
        let a = decompose(&id, req).unwrap();
        let b = decompose(&id, req).unwrap();
        prop_assert_eq!(a.render(), b.render());
        if let Some(p) = req.prime() {
            prop_assert!(localities_valid(&a, p, id.rank()));
        }
    }
}

fn unpointed_order(first: [RuleKind; 3]) -> RulePriority {
    use RuleKind::*;
    let mut order = vec![A, B, GeneralSplitting];
    order.extend(first);
    order.extend([QA, QB, QD, Pointed111, C, E, QC, QE]);
    RulePriority::new(order)
}

#[test]
fn unpointed_splittings_are_confluent() {
    use RuleKind::*;
    let orders = [
        [D1, D2, D3],
        [D1, D3, D2],
        [D2, D1, D3],
        [D2, D3, D1],
        [D3, D1, D2],
        [D3, D2, D1],
    ];
    for t in enumerate(8) {
        for n in [3u64, 4, 5] {
            let id = GaugeGroupId::trivial(Family::Real, Flavor::Unpointed, t, n).unwrap();
            for req in [LocalityRequest::Integral, LocalityRequest::AtPrime(3)] {
                let reference = decompose(&id, req).unwrap().render();
                for first in orders {
                    let got = decompose_with(&id, req, &unpointed_order(first))
                        .unwrap()
                        .render();
                    assert_eq!(got, reference, "{t} n={n} {req:?} order {first:?}");
                }
            }
        }
    }
}
