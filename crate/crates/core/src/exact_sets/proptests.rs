use proptest::prelude::*;

use super::{rat, IntervalSet, Rational};

const GRID: i64 = 60;

fn arb_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((0..GRID, 1..=GRID / 3), 0..6).prop_map(|pieces| {
        IntervalSet::canonicalize(pieces.into_iter().map(|(lo, w)| {
            let hi = (lo + w).min(GRID);
            let lo = lo.min(hi - 1);
            (rat(lo, GRID), rat(hi, GRID))
        }))
        .unwrap()
    })
}

fn arb_factor() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=12).prop_map(|(p, q)| rat(p.min(q), q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn union_measure_two_ways(a in arb_set(), b in arb_set()) {
        let direct = a.union(&b).measure();
        let via_modularity = a.measure() + b.measure() - a.intersect(&b).measure();
        prop_assert_eq!(direct, via_modularity);
    }
}

proptest! {
    #[test]
    fn canonicalize_idempotent(a in arb_set()) {
        let again = IntervalSet::canonicalize(
            a.intervals().iter().map(|i| (i.lo.clone(), i.hi.clone())),
        ).unwrap();
        prop_assert_eq!(&again, &a);
        for w in a.intervals().windows(2) {
            prop_assert!(w[0].hi < w[1].lo);
        }
    }

    #[test]
    fn de_morgan(a in arb_set(), b in arb_set()) {
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
        prop_assert_eq!(a.intersect(&b).complement(), a.complement().union(&b.complement()));
    }

    #[test]
    fn distributivity(a in arb_set(), b in arb_set(), c in arb_set()) {
        prop_assert_eq!(a.intersect(&b.union(&c)), a.intersect(&b).union(&a.intersect(&c)));
        prop_assert_eq!(a.union(&b.intersect(&c)), a.union(&b).intersect(&a.union(&c)));
    }

    #[test]
    fn complement_measure(a in arb_set()) {
        prop_assert_eq!(a.complement().measure(), Rational::one() - a.measure());
        prop_assert_eq!(a.complement().complement(), a);
    }

    #[test]
    fn scale_translate_scales_measure(a in arb_set(), f in arb_factor(), o in 0i64..=12) {
        let room = Rational::one() - &f;
        let offset = &room * rat(o, 12);
        let image = a.scale_translate(&f, &offset).unwrap();
        prop_assert_eq!(image.measure(), &f * a.measure());
    }

    #[test]
    fn union_all_matches_pairwise(a in arb_set(), b in arb_set(), c in arb_set()) {
        prop_assert_eq!(IntervalSet::union_all([&a, &b, &c]), a.union(&b).union(&c));
    }
}
