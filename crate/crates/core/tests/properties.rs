use std::collections::BTreeSet;

use nested_stack::config_graph::{self, EpsRun, Horizon};
use nested_stack::group::{self, Group, GroupOracle};
use nested_stack::laws;
use nested_stack::memory_tree::{MemorySymbol, MemoryTree, StackOp};
use nested_stack::nsa::{self, ResourceCaps, Verdict};
use nested_stack::{fixtures, pda};
use proptest::prelude::*;
use rand::SeedableRng;

fn alphabet() -> Vec<MemorySymbol> {
    vec![MemorySymbol::new("x"), MemorySymbol::new("y")]
}

fn op_strategy() -> impl Strategy<Value = StackOp> {
    let ops = laws::generators(&alphabet());
    (0..ops.len()).prop_map(move |i| ops[i].clone())
}

proptest! {
    #[test]
    fn op_sequences_keep_trees_valid(seed in any::<u64>(), ops in prop::collection::vec(op_strategy(), 0..40)) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut t = laws::random_tree(&mut rng, &alphabet(), 8);
        for op in &ops {
            match t.apply(op) {
                Some(next) => {
                    prop_assert!(next.validate().is_empty());
                    t = next;
                }
                None => break,
            }
        }
    }

    #[test]
    fn apply_word_is_left_to_right(seed in any::<u64>(), ops in prop::collection::vec(op_strategy(), 0..12)) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = laws::random_tree(&mut rng, &alphabet(), 6);
        let stepwise = ops.iter().try_fold(t.clone(), |acc, op| acc.apply(op));
        prop_assert_eq!(t.apply_word(&ops), stepwise);
    }

    #[test]
    fn free_group_canonical_forms_compose(a in prop::collection::vec(0usize..4, 0..12), b in prop::collection::vec(0usize..4, 0..12)) {
        let g = Group::free(2).unwrap();
        let ab: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
        prop_assert_eq!(g.element(&ab), g.mul(&g.element(&a), &g.element(&b)));
        let inv = g.inverse(&g.element(&a));
        prop_assert!(g.mul(&g.element(&a), &inv).is_empty());
    }

    #[test]
    fn abelian_distance_is_l1(x in -6i64..6, y in -6i64..6) {
        let g = Group::abelian(2).unwrap();
        let mut w = Vec::new();
        w.extend(std::iter::repeat_n(if x >= 0 { 0 } else { 1 }, x.unsigned_abs() as usize));
        w.extend(std::iter::repeat_n(if y >= 0 { 2 } else { 3 }, y.unsigned_abs() as usize));
        prop_assert_eq!(g.distance(&g.identity(), &g.element(&w)), (x.abs() + y.abs()) as usize);
    }
}

#[test]
fn fixtures_round_trip_through_text() {
    for m in fixtures::all() {
        let again = nsa::parse_machine(&m.to_text()).unwrap();
        assert_eq!(again.to_text(), m.to_text());
    }
}

#[test]
fn deterministic_fixtures_have_degree_property() {
    for m in fixtures::all() {
        if nsa::check_deterministic(&m) != nsa::Determinism::Deterministic {
            continue;
        }
        let cg = config_graph::build(&m, Horizon::tree_edges(6));
        config_graph::check_degrees(&cg).unwrap();
        if matches!(nsa::check_limited_erasing(&m), nsa::Erasing::Bounded(_)) {
            assert!(matches!(config_graph::max_eps_run(&cg), EpsRun::Finite(_)));
        }
    }
}

#[test]
fn lifts_are_prefixes_of_accepting_computations() {
    for m in [fixtures::fig2(), fixtures::z_word_problem(), fixtures::f2_word_problem()] {
        assert_eq!(nsa::check_deterministic(&m), nsa::Determinism::Deterministic);
        let words = nsa::enumerate_accepted(&m, 8, ResourceCaps::default()).unwrap();
        assert!(!words.is_empty());
        for w in words {
            let r = nsa::accepts(&m, &w, ResourceCaps::default());
            assert_eq!(r.verdict, Verdict::Accepted);
            let run = r.witness.unwrap().configurations(&m).unwrap();
            let lift = config_graph::lift_path(&m, &w, 1000).unwrap();
            assert!(lift.len() < run.len());
            for (k, s) in lift.iter().enumerate() {
                assert_eq!(s.config, run[k + 1]);
            }
        }
    }
}

#[test]
fn free_group_projection_is_consistent() {
    let m = fixtures::f2_word_problem();
    let g = Group::free(2).unwrap();
    let cg = config_graph::build(&m, Horizon::tree_edges(6));
    let p = config_graph::project(&cg, &g).unwrap();
    assert_eq!(p.images[cg.initial()], g.identity());
    // every accepting vertex sits over the identity
    for v in 0..cg.vertex_count() {
        if cg.vertex(v).is_accepting(&m) {
            assert!(p.images[v].is_empty());
        }
    }
}

#[test]
fn fig2_projection_reports_deterministically() {
    let m = fixtures::fig2();
    let cg = config_graph::build(&m, Horizon::tree_edges(5));
    let trivial = Group::free(0).unwrap();
    // the trivial group has no generator letters, so fig2's letters are unknown
    assert!(matches!(
        config_graph::project(&cg, &trivial),
        Err(config_graph::ProjectionError::Group(group::GroupError::UnknownLetter(_)))
    ));
    let z4 = Group::abelian(4).unwrap();
    let a = config_graph::project(&cg, &z4);
    assert_eq!(a, config_graph::project(&cg, &z4));
    assert!(a.is_err());
}

#[test]
fn anbn_distortion_is_stable_and_quotient_connected() {
    let m = fixtures::anbn();
    let mut seen = BTreeSet::new();
    for h in [6, 8, 10] {
        let cg = config_graph::build(&m, Horizon::tree_edges(h));
        let q = pda::quotient(&cg, &pda::nonerasing_classes(&cg, &m).unwrap());
        assert!(q.is_connected());
        seen.insert(pda::quotient_distortion(&q));
    }
    assert_eq!(seen.len(), 1);
}

#[test]
fn forced_quotient_of_fig2_has_growing_classes() {
    let m = fixtures::fig2();
    let d: Vec<usize> = [4, 6, 8]
        .into_iter()
        .map(|h| {
            let cg = config_graph::build(&m, Horizon::tree_edges(h));
            pda::quotient_distortion(&pda::quotient(&cg, &pda::nonerasing_classes_unchecked(&cg)))
        })
        .collect();
    assert!(d.windows(2).all(|w| w[0] < w[1]), "{d:?}");
}

#[test]
fn fig2_cycles_grow_with_the_horizon() {
    let m = fixtures::fig2();
    let len = |h| {
        let cg = config_graph::build(&m, Horizon::tree_edges(h));
        pda::longest_simple_cycle(&cg, 4).unwrap().len()
    };
    assert!(len(4) < len(6));
}

#[test]
fn separators_respect_window_monotonicity() {
    for g in [Group::free(2).unwrap(), Group::abelian(2).unwrap()] {
        let table = group::narrowness_probe(&g, &[1, 2], &|r| group::default_centers(&g, r), 0);
        for c in &table.cells {
            let rep = c.result.as_ref().unwrap();
            assert_eq!(rep.cut_size, rep.disjoint_paths);
            let wider = group::min_separator(&g, &g.identity(), &c.center, c.r, c.window_r + 2).unwrap();
            if rep.window_limited {
                assert!(wider.cut_size >= rep.cut_size);
            } else {
                assert!(wider.cut_size <= rep.cut_size);
            }
        }
    }
}

#[test]
fn free_group_separators_never_exceed_one() {
    let g = Group::free(2).unwrap();
    for r in 0..3 {
        for center in ["aaaaaaaa", "abababab", "abAAbbaa", "aBaBaBaB"] {
            let c = g.canonical(&center.chars().map(|c| c.to_string()).collect::<Vec<_>>()).unwrap();
            let rep = group::min_separator(&g, &g.identity(), &c, r, c.len() + r).unwrap();
            assert!(rep.cut_size <= 1, "{center} r={r}");
        }
    }
}

#[test]
fn finite_group_probe_has_no_centers() {
    let text = "elements: e s\nidentity: e\ngen: a s\ntable:\ne s\ns e\n";
    let g = Group::finite(group::parse_table(text).unwrap()).unwrap();
    assert!(group::default_centers(&g, 1).is_empty());
    let ball = group::ball(&g, &g.identity(), 5, 100).unwrap();
    assert_eq!(ball.len(), 2);
}

#[test]
fn empty_tree_basics() {
    let t = MemoryTree::empty();
    assert_eq!(t.current_symbol(), None);
    assert_eq!(t.apply(&StackOp::Up(None)), None);
    assert_eq!(t.apply(&StackOp::Pop(MemorySymbol::new("x"))), None);
}
