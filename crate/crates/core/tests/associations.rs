mod common;

use common::{half, schur_partial_zero};
use faithcheck::association::{
    find_unfaithful_triples, is_1_associated, is_2_associated, is_minimal_triple, is_strictly_2_associated,
    not_mutually_independent_disjunction, Budget, StrictReading, Witness,
};
use faithcheck::distribution::ratio;
use faithcheck::oracle::{covariance_of, partial_correlation_zero, GaussianSystem};
use faithcheck::scenarios::{builtin, cancelling_paths_3, cancelling_paths_4, random_discrete, Payload};
use faithcheck::{Cpt, Dag, DiscreteJoint, IndependenceOracle, NodeSet, Oracle, Rational};
use num_traits::One;

fn idx(o: &Oracle, l: &str) -> usize {
    o.index_of(l).unwrap()
}

fn triple_labels(o: &Oracle) -> Vec<([String; 3], bool)> {
    let mut t: Vec<_> = find_unfaithful_triples(o, Budget::UNBOUNDED).unwrap().into_iter().map(|t| (t.labels, t.minimal)).collect();
    t.sort();
    t
}

#[test]
fn example1_associations() {
    let s = builtin("example1").unwrap();
    let o = s.oracle();
    let (x, z, y) = (idx(o, "X"), idx(o, "Z"), idx(o, "Y"));
    let r = is_1_associated(o, x, y, Budget::UNBOUNDED).unwrap();
    assert!(!r.holds);
    match r.witness {
        Some(Witness::Separated { statement }) => assert!(statement.given.is_empty()),
        other => panic!("{other:?}"),
    }
    assert!(is_2_associated(o, x, y, z, Budget::UNBOUNDED).unwrap().holds);
    assert!(is_strictly_2_associated(o, y, x, z, Budget::UNBOUNDED, StrictReading::Neither).unwrap().holds);
    assert_eq!(triple_labels(o), vec![(["X".to_string(), "Z".into(), "Y".into()], true)]);
}

#[test]
fn fig3_only_one_triple_is_minimal() {
    let s = builtin("fig3").unwrap();
    let found = triple_labels(s.oracle());
    let minimal: Vec<_> = found.iter().filter(|(_, m)| *m).map(|(l, _)| l.clone()).collect();
    assert_eq!(minimal, vec![["U".to_string(), "Z".into(), "W".into()]]);
    let names: Vec<_> = found.iter().map(|(l, _)| l.join("")).collect();
    for t in ["XZW", "XZY", "UZY"] {
        assert!(names.contains(&t.to_string()), "{t} missing from {names:?}");
    }
}

#[test]
fn independent_coins_have_no_triples() {
    let g = Dag::parse(&["A", "B", "C"], &[] as &[&str]).unwrap();
    let cpts: Vec<Cpt> = ["A", "B", "C"].iter().map(|l| Cpt::coin(*l, half())).collect();
    let o = Oracle::discrete(DiscreteJoint::from_cpts(&g, &cpts).unwrap());
    assert!(find_unfaithful_triples(&o, Budget::UNBOUNDED).unwrap().is_empty());
    assert!(!is_1_associated(&o, 0, 1, Budget::UNBOUNDED).unwrap().holds);
    assert!(!not_mutually_independent_disjunction(&o, [0, 1, 2]).unwrap());
}

#[test]
fn unfaithful_triples_satisfy_both_lemmas() {
    let mut scenarios: Vec<_> = ["example1", "example2", "fig3", "fig4b", "transitivity"].iter().map(|n| builtin(n).unwrap()).collect();
    scenarios.extend((0..40).map(|seed| random_discrete(5, 0.5, seed).unwrap()));
    let mut seen = 0;
    for s in &scenarios {
        let o = s.oracle();
        for t in find_unfaithful_triples(o, Budget::UNBOUNDED).unwrap() {
            seen += 1;
            let [a, b, c] = t.nodes;
            for (p, q, r) in [(a, b, c), (a, c, b), (b, c, a)] {
                assert!(!o.query(p, q, NodeSet::singleton(r)).unwrap(), "{}: {:?}", s.name(), t.labels);
            }
            assert!(not_mutually_independent_disjunction(o, t.nodes).unwrap());
            for &m in &t.nodes {
                let connected = t.nodes.iter().filter(|&&k| k != m).any(|&k| {
                    let rest = NodeSet::singleton(a).with(b).with(c).without(m).without(k);
                    [NodeSet::EMPTY, rest].iter().any(|&s2| !s.dag().d_separated_pair(m, k, s2).unwrap())
                });
                assert!(connected, "{}: {:?}", s.name(), t.labels);
            }
            if t.minimal {
                assert!(is_minimal_triple(o, t.nodes, Budget::UNBOUNDED).unwrap());
            }
        }
    }
    assert!(seen >= 5);
}

#[test]
fn strict_reading_variants_differ_on_a_faithful_collider() {
    let s = builtin("collider").unwrap();
    let o = s.oracle();
    let (x, y, z) = (idx(o, "X"), idx(o, "Y"), idx(o, "Z"));
    assert!(is_2_associated(o, y, x, z, Budget::UNBOUNDED).unwrap().holds);
    let neither = is_strictly_2_associated(o, y, x, z, Budget::UNBOUNDED, StrictReading::Neither).unwrap();
    assert!(!neither.holds);
    assert!(matches!(neither.witness, Some(Witness::OneAssociated { .. })));
}

#[test]
fn chain_middle_is_not_two_associated() {
    let s = builtin("chain").unwrap();
    let o = s.oracle();
    let r = is_2_associated(o, idx(o, "Y"), idx(o, "X"), idx(o, "Z"), Budget::UNBOUNDED).unwrap();
    assert!(!r.holds);
}

#[test]
fn larger_budgets_never_undo_a_separation() {
    for seed in 0..10 {
        let s = random_discrete(5, 0.5, seed).unwrap();
        let o = s.oracle();
        for x in 0..5 {
            for y in 0..5 {
                if x == y {
                    continue;
                }
                let mut separated = false;
                for b in 0..=3 {
                    let r = is_1_associated(o, x, y, Budget::limit(b)).unwrap();
                    if separated {
                        assert!(!r.holds);
                    }
                    separated |= !r.holds;
                    assert_eq!(r.truncated, b < 3);
                }
            }
        }
    }
}

#[test]
fn hesslow_system_associations() {
    let s = cancelling_paths_3(Rational::one(), Rational::one()).unwrap();
    let o = s.oracle();
    let (x, z, y) = (idx(o, "X"), idx(o, "Z"), idx(o, "Y"));
    assert!(is_1_associated(o, x, z, Budget::UNBOUNDED).unwrap().holds);
    assert!(is_2_associated(o, x, y, z, Budget::UNBOUNDED).unwrap().holds);
    assert!(!is_1_associated(o, x, y, Budget::UNBOUNDED).unwrap().holds);
}

fn zero_pairs(cov: &faithcheck::oracle::Matrix, n: usize, exact: impl Fn(usize, usize, NodeSet) -> bool) -> Vec<(usize, usize, NodeSet)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for s in NodeSet::full(n).without(x).without(y).subsets() {
                let mine = partial_correlation_zero(cov, x, y, s).unwrap();
                assert_eq!(mine, schur_partial_zero(cov, x, y, s));
                assert_eq!(mine, exact(x, y, s));
                if mine {
                    out.push((x, y, s));
                }
            }
        }
    }
    out
}

#[test]
fn cancelling_zero_sets_are_the_graph_separations_plus_the_cancelled_pair() {
    for s in [cancelling_paths_3(Rational::one(), Rational::one()).unwrap(), cancelling_paths_4(ratio(2, 1), ratio(-1, 3), ratio(3, 5)).unwrap()] {
        let Payload::Gaussian(sys) = s.payload() else { panic!() };
        let cov = covariance_of(sys);
        let n = s.dag().len();
        let (x, y) = (s.dag().index_of("X").unwrap(), s.dag().index_of("Y").unwrap());
        let mut zeros = zero_pairs(&cov, n, |a, b, c| s.oracle().query(a, b, c).unwrap());
        let mut expected = vec![(x.min(y), x.max(y), NodeSet::EMPTY)];
        for a in 0..n {
            for b in a + 1..n {
                for c in NodeSet::full(n).without(a).without(b).subsets() {
                    if s.dag().d_separated_pair(a, b, c).unwrap() {
                        expected.push((a, b, c));
                    }
                }
            }
        }
        zeros.sort_by_key(|&(a, b, c)| (a, b, c.bits()));
        expected.sort_by_key(|&(a, b, c)| (a, b, c.bits()));
        assert_eq!(zeros, expected, "{}", s.name());
    }
}

#[test]
fn four_node_cancellation_is_detectable() {
    let s = builtin("cancelling4").unwrap();
    let o = s.oracle();
    let (x, z, w, y) = (idx(o, "X"), idx(o, "Z"), idx(o, "W"), idx(o, "Y"));
    assert!(o.query(x, w, NodeSet::singleton(z)).unwrap());
    assert!(o.query(x, y, NodeSet::EMPTY).unwrap());
    assert!(!o.query(x, y, NodeSet::singleton(z)).unwrap());
    let r = is_strictly_2_associated(o, x, w, y, Budget::UNBOUNDED, StrictReading::Neither).unwrap();
    assert!(r.holds, "{r:?}");
}

#[test]
fn rescaling_all_noise_keeps_every_zero() {
    let sys = GaussianSystem::from_edges(
        &["A", "B", "C", "D"],
        &[("A", "B", ratio(1, 2)), ("B", "C", ratio(-2, 1)), ("A", "C", ratio(1, 1)), ("C", "D", ratio(3, 4))],
        vec![ratio(1, 1), ratio(2, 1), ratio(1, 3), ratio(5, 2)],
    )
    .unwrap();
    let base = covariance_of(&sys);
    for f in [ratio(4, 1), ratio(1, 7), ratio(22, 3)] {
        let scaled = covariance_of(&sys.scale_noise(&f).unwrap());
        for x in 0..4 {
            for y in x + 1..4 {
                for s in NodeSet::full(4).without(x).without(y).subsets() {
                    assert_eq!(partial_correlation_zero(&base, x, y, s).unwrap(), partial_correlation_zero(&scaled, x, y, s).unwrap());
                }
            }
        }
    }
}

#[test]
fn covariance_is_symmetric_and_relabel_invariant() {
    let a = GaussianSystem::from_edges(&["P", "Q", "R"], &[("P", "Q", ratio(2, 1)), ("Q", "R", ratio(1, 3))], vec![Rational::one(); 3]).unwrap();
    let b = GaussianSystem::from_edges(&["R", "P", "Q"], &[("P", "Q", ratio(2, 1)), ("Q", "R", ratio(1, 3))], vec![Rational::one(); 3]).unwrap();
    let (ca, cb) = (covariance_of(&a), covariance_of(&b));
    let pos_a = |l: &str| a.labels().iter().position(|x| x == l).unwrap();
    let pos_b = |l: &str| b.labels().iter().position(|x| x == l).unwrap();
    for u in ["P", "Q", "R"] {
        for v in ["P", "Q", "R"] {
            assert_eq!(ca[pos_a(u)][pos_a(v)], ca[pos_a(v)][pos_a(u)]);
            assert_eq!(ca[pos_a(u)][pos_a(v)], cb[pos_b(u)][pos_b(v)]);
        }
    }
}
