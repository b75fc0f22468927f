//! Cross-module properties checked against brute-force oracles.

mod common;

use common::{brute_kcg, brute_sukp, Gen};
use poolbudget::genio::{
    gen_synthetic, load_instance, pabulib_to_instance, parse_pabulib, save_instance, Family, SyntheticConfig,
};
use poolbudget::knapsack::{
    containment_graph, is_chordal, laminar_conflict_knapsack, perfect_elimination_order, verify_elimination_order,
    KcgInstance, LaminarForest,
};
use poolbudget::model::{payment_excess, social_welfare, validate_instance, wp_payments, ProjectSet};
use poolbudget::oracle::{brute_maxpe, brute_uwo_wp, brute_uwo_wp_containing};
use poolbudget::rational::Rational;
use poolbudget::reductions::{gap_transform, laminar_to_kcg, sukp_to_kcg};
use poolbudget::solvers::{maxpe_single_minded, sukp_laminar_fptas, SingleMindedView};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn exact_kcg_matches_enumeration(seed in any::<u64>(), nodes in 1usize..11, m in 1usize..8) {
        let mut g = Gen::new(seed);
        let family = g.laminar_family(m, nodes);
        let forest = LaminarForest::from_family(&family).unwrap();
        let k = KcgInstance {
            graph: forest.conflict_graph(),
            profits: (0..nodes).map(|_| g.rat(-3, 6)).collect(),
            weights: (0..nodes).map(|_| g.rat(0, 5)).collect(),
            capacity: g.rat(0, 10),
        };
        let sol = laminar_conflict_knapsack(&k, &forest, &Rational::zero()).unwrap();
        prop_assert_eq!(&sol.profit, &brute_kcg(&k));
        prop_assert!(k.graph.is_independent(&sol.chosen));
        prop_assert!(sol.weight <= k.capacity);
        let p: Rational = sol.chosen.iter().map(|&i| &k.profits[i]).sum();
        prop_assert_eq!(p, sol.profit);
    }

    #[test]
    fn approximate_kcg_meets_bound(seed in any::<u64>(), nodes in 1usize..10, den in 2i64..11) {
        let mut g = Gen::new(seed);
        let family = g.laminar_family(6, nodes);
        let forest = LaminarForest::from_family(&family).unwrap();
        let k = KcgInstance {
            graph: forest.conflict_graph(),
            profits: (0..nodes).map(|_| g.rat(0, 9)).collect(),
            weights: (0..nodes).map(|_| g.rat(0, 5)).collect(),
            capacity: g.rat(0, 10),
        };
        let eps = Rational::new(1, den);
        let sol = laminar_conflict_knapsack(&k, &forest, &eps).unwrap();
        prop_assert!(sol.profit >= (Rational::one() - eps) * brute_kcg(&k));
        prop_assert!(sol.weight <= k.capacity);
    }

    #[test]
    fn laminar_containment_graphs_are_chordal(seed in any::<u64>(), count in 1usize..16, m in 1usize..10) {
        let mut g = Gen::new(seed);
        let family = g.laminar_family(m, count);
        let graph = containment_graph(&family);
        prop_assert!(is_chordal(&graph));
        let order = perfect_elimination_order(&graph).unwrap();
        prop_assert!(verify_elimination_order(&graph, &order));
        // the forest sees exactly the comparable pairs
        let forest = LaminarForest::from_family(&family).unwrap();
        let from_forest = forest.conflict_graph();
        prop_assert_eq!(from_forest.edges(), graph.edges());
    }

    #[test]
    fn maxpe_set_is_a_core_of_the_optimum(seed in any::<u64>(), n in 1usize..7, m in 1usize..7) {
        let inst = Gen::new(seed).random_single_minded(n, m);
        let mp = maxpe_single_minded(&inst).unwrap();
        prop_assert_eq!(&mp.excess, &brute_maxpe(&inst).unwrap().objective);
        prop_assert_eq!(payment_excess(&inst, &mp.funded).unwrap(), mp.excess);
        let restricted = brute_uwo_wp_containing(&inst, &mp.funded).unwrap().unwrap();
        prop_assert_eq!(restricted.objective, brute_uwo_wp(&inst).unwrap().objective);
    }

    #[test]
    fn laminar_kcg_reduction_preserves_optimum(seed in any::<u64>(), n in 1usize..8, m in 1usize..7) {
        let inst = Gen::new(seed).laminar_single_minded(n, m);
        let view = SingleMindedView::from_instance(&inst).unwrap();
        let mp = maxpe_single_minded(&inst).unwrap();
        let costs: Vec<Rational> = inst.costs().cloned().collect();
        let red = laminar_to_kcg(&view, &mp.funded, &mp.excess, &costs).unwrap();
        let opt = brute_uwo_wp(&inst).unwrap().objective;
        prop_assert_eq!(brute_kcg(&red.kcg), opt.clone());

        let sol = laminar_conflict_knapsack(&red.kcg, &red.forest, &Rational::zero()).unwrap();
        let demands = view.demands();
        let mut w = mp.funded.clone();
        for &node in &sol.chosen {
            if let Some(a) = red.node_agents[node] {
                w = w.union(&demands[a]);
            }
        }
        prop_assert!(!payment_excess(&inst, &w).unwrap().is_negative());
        prop_assert_eq!(social_welfare(&inst, &w).unwrap(), opt);
    }

    #[test]
    fn sukp_reduction_preserves_objective(seed in any::<u64>(), items in 1usize..9, elements in 1usize..9) {
        let s = Gen::new(seed).laminar_sukp(items, elements);
        let (k, forest) = sukp_to_kcg(&s).unwrap();
        let best = brute_sukp(&s);
        prop_assert_eq!(brute_kcg(&k), best.clone());
        let exact = sukp_laminar_fptas(&s, &Rational::zero()).unwrap();
        prop_assert_eq!(&exact.value, &best);
        prop_assert!(exact.weight <= s.capacity);
        let sol = laminar_conflict_knapsack(&k, &forest, &Rational::zero()).unwrap();
        prop_assert_eq!(sol.profit, best);
    }

    #[test]
    fn gap_transform_separates(seed in any::<u64>(), n in 1usize..4, m in 1usize..5, t in 0i64..8, gap in 1i64..4) {
        let mut g = Gen::new(seed);
        let inst = if g.coin() { g.additive(n, m) } else { g.random_single_minded(n, m) };
        let total: Rational = inst.values_of(&inst.all_projects()).unwrap().iter().sum();
        prop_assume!(total.is_positive());
        let t = Rational::new(t, 2);
        let gap = Rational::from_integer(gap);
        let big = gap_transform(&inst, &t, &gap).unwrap();
        let threshold = Rational::from_integer(2) * &gap * &total;
        let yes = brute_uwo_wp(&big).unwrap().objective >= threshold;
        prop_assert_eq!(yes, brute_maxpe(&inst).unwrap().objective >= t);
    }

    #[test]
    fn random_instances_roundtrip(seed in any::<u64>(), n in 1usize..6, m in 1usize..6) {
        let inst = Gen::new(seed).mixed(n, m);
        let back = load_instance(&save_instance(&inst)).unwrap();
        prop_assert_eq!(&back, &inst);
        let mask = seed % (1 << m);
        let w = ProjectSet::from_mask(mask);
        let pe = payment_excess(&inst, &w).unwrap();
        prop_assert_eq!(wp_payments(&inst, &w).is_ok(), !pe.is_negative());
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn generated_instances_validate(seed in any::<u64>(), fam in 0usize..3, n in 1usize..30, m in 1usize..12) {
        let inst = gen_synthetic(&SyntheticConfig { family: Family::ALL[fam], n, m, seed });
        let v = validate_instance(&inst, false).unwrap();
        prop_assert_eq!(v.instance, inst.clone());
        prop_assert_eq!(load_instance(&save_instance(&inst)).unwrap(), inst);
    }
}

#[test]
fn bundled_pabulib_fixtures_convert_exactly() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/pabulib");
    let mut approval = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let Ok(election) = parse_pabulib(&text) else { continue };
        let inst = pabulib_to_instance(&election).unwrap();
        let all = inst.all_projects();
        let total: Rational = inst.values_of(&all).unwrap().iter().sum();
        assert_eq!(total, inst.cost_of(&all));
        assert_eq!(inst.total_budget(), election.budget().unwrap());
        assert_eq!(load_instance(&save_instance(&inst)).unwrap(), inst);
        validate_instance(&inst, true).unwrap();
        approval += 1;
    }
    assert!(approval >= 2);
}
