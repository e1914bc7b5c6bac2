mod common;

use common::{cross_nonadjacent, has_noncollider_path, is_true_collider};
use faithcheck::association::Budget;
use faithcheck::graph::random_dag;
use faithcheck::orientation::{
    candidate_sides, check_nonadjacency, detect_of_failure, orient, orient_all, rule_holds, OrientationError, OrientationQuery, Outcome,
};
use faithcheck::scenarios::{all_builtins, builtin, random_discrete};
use faithcheck::{Dag, IndependenceOracle, Oracle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn query(o: &Oracle, y: &str, l: &[&str], r: &[&str]) -> OrientationQuery {
    OrientationQuery::from_labels(o, y, l, r).unwrap()
}

fn candidate_queries<O: IndependenceOracle + ?Sized>(o: &O) -> Vec<OrientationQuery> {
    let mut out = Vec::new();
    for y in 0..o.num_vars() {
        let sides = candidate_sides(o, y, Budget::UNBOUNDED).unwrap();
        for (i, &a) in sides.iter().enumerate() {
            for &b in &sides[i + 1..] {
                if a.is_disjoint(b) {
                    out.push(OrientationQuery::new(y, a, b));
                }
            }
        }
    }
    out
}

#[derive(Default, Debug)]
struct Tally {
    colliders: usize,
    non_colliders: usize,
    inconclusive: usize,
    premise_violations: usize,
}

/// Orients every candidate query and checks each verdict against `g`.
/// Queries whose cross pairs are adjacent in `g` violate the rule's premise
/// and are only counted.
fn check_soundness(o: &Oracle, g: &Dag, t: &mut Tally) {
    for q in candidate_queries(o) {
        let v = match orient(o, &q) {
            Ok(v) => v,
            Err(OrientationError::Adjacent(..)) => continue,
            Err(e) => panic!("{e}"),
        };
        if !cross_nonadjacent(g, q.left, q.right) {
            t.premise_violations += 1;
            continue;
        }
        match v.outcome {
            Outcome::Collider => {
                t.colliders += 1;
                assert!(is_true_collider(g, q.center, q.left, q.right), "false collider {v:?} in {}", g.describe());
            }
            Outcome::NonCollider => {
                t.non_colliders += 1;
                assert!(has_noncollider_path(g, q.center, q.left, q.right), "false non-collider {v:?} in {}", g.describe());
            }
            Outcome::Inconclusive => t.inconclusive += 1,
        }
    }
}

#[test]
fn example2_orients_the_collider() {
    let s = builtin("example2").unwrap();
    let o = s.oracle();
    let v = orient(o, &query(o, "Y", &["X", "Z"], &["W"])).unwrap();
    assert_eq!(v.outcome, Outcome::Collider);
    assert!(!v.shielding_caveat && !v.failure_detected);
    let mut e = v.oriented_edges.clone();
    e.sort();
    assert_eq!(e, ["W->Y", "X->Y", "Z->Y"]);
    assert_eq!(v.collider_checks.len(), 2);
    assert!(v.collider_checks.iter().all(|f| f.holds && f.sets_checked > 0));
    assert!(!detect_of_failure(o, &query(o, "Y", &["X", "Z"], &["W"])).unwrap());
}

#[test]
fn fig4b_does_not_fire_rule_i() {
    let s = builtin("fig4b").unwrap();
    let o = s.oracle();
    let q = query(o, "Y", &["X", "Z"], &["W"]);
    let v = orient(o, &q).unwrap();
    assert_ne!(v.outcome, Outcome::Collider);
    assert_eq!(v.outcome, Outcome::NonCollider);
    assert!(v.blocked_pair.is_some());
    assert!(!rule_holds(o, &q, true).unwrap().0);
}

#[test]
fn chain_is_a_non_collider() {
    let s = builtin("chain").unwrap();
    let o = s.oracle();
    let q = query(o, "Y", &["X"], &["Z"]);
    let v = orient(o, &q).unwrap();
    assert_eq!(v.outcome, Outcome::NonCollider);
    let b = v.blocked_pair.unwrap();
    assert_eq!(b.given, ["Y"]);
    assert!(!detect_of_failure(o, &q).unwrap());
}

#[test]
fn transitivity_failure_is_detected() {
    let s = builtin("transitivity").unwrap();
    let o = s.oracle();
    let q = query(o, "Y", &["X"], &["Z"]);
    let v = orient(o, &q).unwrap();
    assert_eq!(v.outcome, Outcome::Inconclusive);
    assert!(v.failure_detected);
    assert!(detect_of_failure(o, &q).unwrap());
}

#[test]
fn example2_satisfies_the_collider_condition() {
    let s = builtin("example2").unwrap();
    let o = s.oracle();
    let q = query(o, "Y", &["X", "Z"], &["W"]);
    let (holds, counterexample) = rule_holds(o, &q, true).unwrap();
    assert!(holds && counterexample.is_none());
    assert!(s.annotations().two_of_i.holds);
}

#[test]
fn nonadjacency_checks() {
    let s = builtin("example2").unwrap();
    let o = s.oracle();
    let i = |l: &str| o.index_of(l).unwrap();
    assert!(check_nonadjacency(o, i("X"), i("W"), Budget::UNBOUNDED).unwrap());
    let h = builtin("cancelling3").unwrap();
    let ho = h.oracle();
    assert!(!check_nonadjacency(ho, ho.index_of("X").unwrap(), ho.index_of("Z").unwrap(), Budget::UNBOUNDED).unwrap());
    let coins = Oracle::graph(Dag::parse(&["A", "B"], &[] as &[&str]).unwrap());
    assert!(check_nonadjacency(&coins, 0, 1, Budget::UNBOUNDED).unwrap());
}

#[test]
fn premise_errors() {
    let s = builtin("example2").unwrap();
    let o = s.oracle();
    let overlap = OrientationQuery::from_labels(o, "Y", &["X"], &["X"]).unwrap();
    assert!(matches!(orient(o, &overlap), Err(OrientationError::InvalidQuery(_))));
    let center_inside = OrientationQuery::from_labels(o, "Y", &["Y"], &["W"]).unwrap();
    assert!(matches!(orient(o, &center_inside), Err(OrientationError::InvalidQuery(_))));
    let not_assoc = OrientationQuery::from_labels(o, "Y", &["X"], &["W"]).unwrap();
    assert!(matches!(orient(o, &not_assoc), Err(OrientationError::NotAssociated { .. })));
    // In a triangle the cross pair is 1-associated, hence adjacent.
    let tri = Oracle::graph(Dag::parse(&["A", "B", "C"], &["A->B", "B->C", "A->C"]).unwrap());
    let adj = OrientationQuery::from_labels(&tri, "B", &["A"], &["C"]).unwrap();
    assert!(matches!(orient(&tri, &adj), Err(OrientationError::Adjacent(..))));
}

#[test]
fn no_false_orientations_on_builtins() {
    let mut t = Tally::default();
    for s in all_builtins().unwrap() {
        check_soundness(s.oracle(), s.dag(), &mut t);
    }
    assert!(t.colliders >= 2 && t.non_colliders >= 2, "{t:?}");
    assert!(t.inconclusive >= 1, "{t:?}");
}

#[test]
fn no_false_orientations_on_random_discrete_networks() {
    let mut t = Tally::default();
    for seed in 0..25 {
        let s = random_discrete(5, 0.45, seed).unwrap();
        check_soundness(s.oracle(), s.dag(), &mut t);
    }
    assert!(t.colliders + t.non_colliders >= 20, "{t:?}");
}

#[test]
fn no_false_orientations_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut t = Tally::default();
    for i in 0..60 {
        let g = random_dag(3 + i % 4, 0.45, &mut rng);
        check_soundness(&Oracle::graph(g.clone()), &g, &mut t);
    }
    assert!(t.colliders >= 10 && t.non_colliders >= 10, "{t:?}");
    // A graph oracle is faithful, so the premise is never violated.
    assert_eq!(t.premise_violations, 0);
}

#[test]
fn rules_are_exclusive_on_graph_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut fired = 0;
    for i in 0..60 {
        let g = random_dag(3 + i % 4, 0.5, &mut rng);
        let o = Oracle::graph(g);
        for q in candidate_queries(&o) {
            if orient(&o, &q).is_err() {
                continue;
            }
            let (i_holds, _) = rule_holds(&o, &q, true).unwrap();
            let (ii_holds, _) = rule_holds(&o, &q, false).unwrap();
            assert!(!(i_holds && ii_holds), "{q:?}");
            fired += usize::from(i_holds || ii_holds);
        }
    }
    assert!(fired > 20);
}

#[test]
fn driver_reaches_a_fixed_point() {
    let s = builtin("example2").unwrap();
    let r = orient_all(s.oracle(), Budget::UNBOUNDED).unwrap();
    for e in ["W->Y", "X->Y", "Z->Y"] {
        assert!(r.oriented_edges.contains(&e.to_string()), "{r:?}");
    }
    assert!(r.conflicts.is_empty());
    let fig3 = builtin("fig3").unwrap();
    let r = orient_all(fig3.oracle(), Budget::UNBOUNDED).unwrap();
    for e in &r.oriented_edges {
        let (a, b) = e.split_once("->").unwrap();
        let g = fig3.dag();
        assert!(g.has_edge(g.index_of(a).unwrap(), g.index_of(b).unwrap()), "{e}");
    }
    assert!(r.rounds >= 1);
}

#[test]
fn cancelling3_driver_output_is_outside_the_guarantee() {
    // X and Y are adjacent in truth but look non-adjacent, so the rule's
    // premise fails and the orientation is not covered by soundness.
    let s = builtin("cancelling3").unwrap();
    assert!(!s.annotations().two_af.holds);
    let o = s.oracle();
    let q = query(o, "Z", &["X"], &["Y"]);
    let v = orient(o, &q).unwrap();
    assert!(!cross_nonadjacent(s.dag(), q.left, q.right));
    assert_eq!(v.outcome, Outcome::Collider);
}
