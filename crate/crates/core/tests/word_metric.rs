use proptest::prelude::*;
use spectrunc_core::{CayleyGraph, Element, GroupSpec};

fn groups() -> Vec<CayleyGraph> {
    vec![
        CayleyGraph::new(GroupSpec::FreeAbelian(1)),
        CayleyGraph::new(GroupSpec::FreeAbelian(2)),
        CayleyGraph::new(GroupSpec::FreeAbelian(3)),
        CayleyGraph::new(GroupSpec::Heisenberg),
    ]
}

#[test]
fn length_is_inverse_symmetric() {
    for g in groups() {
        let ball = g.ball(6).unwrap();
        for (x, l) in ball.iter() {
            assert_eq!(ball.length_of(&g.inv(x)), Some(l), "{x:?}");
        }
    }
}

#[test]
fn ball_layers_match_bfs_depth() {
    for g in groups() {
        let ball = g.ball(5).unwrap();
        let gens = g.generators();
        assert!(!gens.contains(&g.identity()));
        for s in &gens {
            assert!(gens.contains(&g.inv(s)));
        }
        for (i, (x, l)) in ball.iter().enumerate() {
            assert_eq!(ball.position(x), Some(i));
            let neighbour_lengths: Vec<u32> = gens.iter().filter_map(|s| ball.length_of(&g.mul(x, s))).collect();
            if l > 0 {
                // reached from the previous layer, and no generator jumps two layers
                assert!(neighbour_lengths.contains(&(l - 1)));
            }
            assert!(neighbour_lengths.iter().all(|&m| m + 1 >= l));
        }
        let mut seen = std::collections::HashSet::new();
        assert!(ball.elements().iter().all(|x| seen.insert(x.clone())));
    }
}

#[test]
fn translate_identity() {
    for g in [CayleyGraph::new(GroupSpec::FreeAbelian(2)), CayleyGraph::new(GroupSpec::Heisenberg)] {
        for lambda in 1..=3 {
            for x in g.ball(2 * lambda).unwrap().elements() {
                assert_eq!(g.overlap(x, lambda).unwrap(), g.overlap(&g.inv(x), lambda).unwrap());
            }
        }
    }
}

#[test]
fn growth_report_consistency() {
    for g in groups() {
        let report = g.growth_report(12).unwrap();
        assert!(report.ball_sizes.windows(2).all(|w| w[1] > w[0]));
        for r in 0..=12u32 {
            let (n, d) = report.boundary_ratios[r as usize];
            assert!(n > 0);
            assert_eq!(n as usize, report.ball_sizes[r as usize + 1] - report.ball_sizes[r as usize]);
            assert_eq!(d as usize, report.ball_sizes[r as usize]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_inequality(which in 0usize..4, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let g = &groups()[which];
        let ball = g.ball(4).unwrap();
        let (x, y) = (i.get(ball.elements()), j.get(ball.elements()));
        let lxy = g.word_length(&g.mul(x, y)).unwrap();
        prop_assert!(lxy <= ball.length_of(x).unwrap() + ball.length_of(y).unwrap());
    }

    #[test]
    fn geodesic_words_multiply_back(which in 0usize..4, i in any::<prop::sample::Index>()) {
        let g = &groups()[which];
        let ball = g.ball(5).unwrap();
        let x = i.get(ball.elements());
        let word = g.geodesic_word(x).unwrap();
        prop_assert_eq!(word.len() as u32, ball.length_of(x).unwrap());
        let gens = g.generators();
        prop_assert!(word.iter().all(|s| gens.contains(s)));
        let product = word.iter().fold(g.identity(), |acc, s| g.mul(&acc, s));
        prop_assert_eq!(&product, x);
    }

    #[test]
    fn chain_decomposition(i in any::<prop::sample::Index>(), lambda in 1u32..=4, heisenberg in any::<bool>()) {
        let g = if heisenberg { CayleyGraph::new(GroupSpec::Heisenberg) } else { CayleyGraph::new(GroupSpec::FreeAbelian(2)) };
        let outer = g.ball(2 * lambda + 1).unwrap();
        let x = i.get(outer.elements());
        let word = g.geodesic_word(x).unwrap();
        let chain: usize = word.iter().map(|s| g.folner_deficit(s, lambda).unwrap()).sum();
        prop_assert!(g.folner_deficit(x, lambda).unwrap() <= chain);
    }

    #[test]
    fn heisenberg_group_laws(a in prop::array::uniform3(-20i64..20), b in prop::array::uniform3(-20i64..20), c in prop::array::uniform3(-20i64..20)) {
        let g = CayleyGraph::new(GroupSpec::Heisenberg);
        let (a, b, c) = (Element::new(&a), Element::new(&b), Element::new(&c));
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        prop_assert_eq!(g.mul(&a, &g.inv(&a)), g.identity());
        prop_assert_eq!(g.inv(&g.mul(&a, &b)), g.mul(&g.inv(&b), &g.inv(&a)));
    }
}
