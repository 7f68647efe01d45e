use morass_core::gap1::{FakeGap1Morass, Mode};
use morass_core::generic::DenseSetSpec;
use morass_core::mutation::mutate_gap1;
use morass_core::spec_file::{parse_gap1, to_json, Gap1Spec};
use proptest::prelude::*;

/// Split sequences with `δ_ζ < φ_ζ`, up to `len` levels.
fn splits(len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<prop::sample::Index>(), 0..=len).prop_map(|idx| {
        let mut phi = 1;
        idx.iter()
            .map(|i| {
                let d = i.index(phi);
                phi = 2 * phi - d;
                d
            })
            .collect()
    })
}

fn dense_spec() -> impl Strategy<Value = DenseSetSpec> {
    let n = 0usize..10;
    prop_oneof![
        n.clone().prop_map(|alpha| DenseSetSpec::AddColumn { alpha }),
        (n.clone(), n.clone(), n.clone()).prop_map(|(alpha, gamma, beta)| DenseSetSpec::Separate { alpha, gamma, beta }),
        (n.clone(), n.clone(), 1usize..4).prop_map(|(alpha, beta, n)| DenseSetSpec::GrowDifference { alpha, beta, n }),
        (n.clone(), n).prop_map(|(alpha, xi)| DenseSetSpec::AdfTotal { alpha, xi }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap1_spec_round_trips(s in splits(4)) {
        let m = FakeGap1Morass::from_splits(&s).unwrap();
        let back = parse_gap1(&to_json(&Gap1Spec::of(&m))).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn every_gap1_mutant_is_rejected(s in splits(3)) {
        let m = FakeGap1Morass::from_splits(&s).unwrap();
        prop_assert!(m.check_axioms(Mode::Fake).passed());
        let rep = mutate_gap1("random", &Gap1Spec::of(&m));
        prop_assert_eq!(rep.killed, rep.total, "survivors: {:?}", rep.survivors);
    }

    #[test]
    fn dense_spec_text_round_trips(d in dense_spec()) {
        prop_assert_eq!(d.to_string().parse::<DenseSetSpec>().unwrap(), d);
    }

    #[test]
    fn dense_spec_json_round_trips(d in dense_spec()) {
        let text = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(serde_json::from_str::<DenseSetSpec>(&text).unwrap(), d);
    }
}
