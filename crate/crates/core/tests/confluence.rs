mod common;

use common::*;
use hyprewrite::confluence::{
    check_confluence, enumerate_critical_pairs, is_joinable, join, normal_forms, CriticalPair, Joinability,
    Termination, Verdict,
};
use hyprewrite::diagram::{parse_diagram, parse_rules};
use hyprewrite::dpoi::{rule_from_diagrams, DpoRule, GraphWithInterface};
use hyprewrite::hypergraph::{is_isomorphic, Hypergraph};
use hyprewrite::signature::{Signature, Word};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

const UNARY: &str = "colour c\nop f : c -> c\nop g : c -> c\nop h : c -> c\n";
const ASSOC: &str = "colour c\nop m : c c -> c\n";
/// Left-hand-side edges per random rule system.
const MAX_EDGES: usize = 3;

fn rules(sig: &Signature, text: &str) -> Vec<DpoRule> {
    parse_rules(sig, text).unwrap().iter().map(rule_from_diagrams).collect()
}

fn folded(sig: &Signature, s: &str) -> GraphWithInterface {
    GraphWithInterface::from_diagram(&parse_diagram(sig, s).unwrap())
}

#[test]
fn no_rules_no_pairs() {
    let report = check_confluence(&[], Termination::Asserted, false).unwrap();
    assert_eq!(report.verdict, Verdict::Confluent);
    assert!(report.pairs.is_empty());
}

#[test]
fn diverging_unary_rules() {
    let sig = sig(UNARY);
    let rs = rules(&sig, "rule gf : g => f\nrule gh : g => h");
    let report = check_confluence(&rs, Termination::Asserted, false).unwrap();
    assert_eq!(report.verdict, Verdict::NotConfluent);
    let g = folded(&sig, "g");
    let (f, h) = (folded(&sig, "f"), folded(&sig, "h"));
    let witness = report
        .pairs
        .iter()
        .find(|(p, j)| *j == Joinability::NotJoinable && p.rule1 != p.rule2)
        .map(|(p, _)| p)
        .expect("g => f against g => h");
    assert!(is_isomorphic(&witness.overlap, &g.graph).is_some());
    assert!(witness.result1.isomorphic(&f) && witness.result2.isomorphic(&h));

    let nf = normal_forms(&g, &rs, Termination::Asserted);
    assert!(nf.complete);
    assert_eq!(nf.forms.len(), 2);
    assert!(nf.forms.iter().any(|x| x.isomorphic(&f)) && nf.forms.iter().any(|x| x.isomorphic(&h)));
}

#[test]
fn joinable_after_a_step() {
    let sig = sig(UNARY);
    let rs = rules(&sig, "rule gf : g => f\nrule gh : g => h\nrule hf : h => f");
    assert_eq!(check_confluence(&rs, Termination::Asserted, false).unwrap().verdict, Verdict::Confluent);
    let (a, b) = (folded(&sig, "g ; h"), folded(&sig, "f ; g"));
    match join(&a, &b, &rs, Termination::Asserted) {
        Joinability::Joinable(cert) => {
            assert_eq!(cert.left.states.len(), cert.left.rules.len() + 1);
            assert!(cert.left.states[0].isomorphic(&a) && cert.right.states[0].isomorphic(&b));
            assert!(cert.left.states.last().unwrap().isomorphic(&cert.common));
            assert!(cert.right.states.last().unwrap().isomorphic(&cert.common));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn bounded_search_is_inconclusive() {
    let sig = sig(UNARY);
    let rs = rules(&sig, "rule gf : g => f\nrule gh : g => h\nrule grow : f => f ; f");
    let report = check_confluence(&rs, Termination::Bounded(3), false).unwrap();
    assert_eq!(report.verdict, Verdict::Inconclusive);
    let nf = normal_forms(&folded(&sig, "f"), &rs, Termination::Bounded(3));
    assert!(!nf.complete && nf.forms.is_empty());
}

#[test]
fn associativity_overlaps() {
    let sig = sig(ASSOC);
    let rs = rules(&sig, "rule assoc : (m + id[c]) ; m => (id[c] + m) ; m");
    let pairs = enumerate_critical_pairs(&rs, false).unwrap();
    let trees: Vec<&CriticalPair> =
        pairs.iter().filter(|p| p.overlap.node_count() == 7 && p.overlap.edge_count() == 3).collect();
    assert_eq!(trees.len(), 2);
    for p in trees {
        assert!(matches!(is_joinable(p, &rs, Termination::Asserted), Joinability::Joinable(_)));
    }

    // the two left-hand sides folded onto the loop m(0,1) -> 3, m(3,2) -> 0
    let m = sig.op("m").unwrap();
    let build = |iface: Vec<usize>| {
        let mut g = Hypergraph::discrete(&Word::new(vec![sig.colour("c").unwrap(); 4]));
        g.add_edge(&sig, m, vec![1, 2], vec![3]).unwrap();
        g.add_edge(&sig, m, vec![0, 3], vec![0]).unwrap();
        GraphWithInterface::new(g, iface).unwrap()
    };
    let (h1, h2) = (build(vec![1, 2]), build(vec![2, 1]));
    assert!(pairs.iter().any(|p| {
        p.overlap.edge_count() == 2
            && p.overlap.node_count() == 4
            && ((p.result1.isomorphic(&h1) && p.result2.isomorphic(&h2))
                || (p.result1.isomorphic(&h2) && p.result2.isomorphic(&h1)))
    }));
    assert_eq!(join(&h1, &h2, &rs, Termination::Asserted), Joinability::NotJoinable);
    assert!(!brute_iso_with_interface(&h1, &h2));
}

/// Rules that remove at least one edge, so every search terminates, with
/// small left-hand sides.
fn shrinking_rules(rng: &mut StdRng, sig: &Signature, n: usize) -> Vec<DpoRule> {
    loop {
        let mut out = Vec::new();
        while out.len() < n {
            let r = random_dpo_rule(rng, sig);
            if r.rhs.edge_count() < r.lhs.edge_count() {
                out.push(r);
            }
        }
        if out.iter().map(|r| r.lhs.edge_count()).sum::<usize>() <= MAX_EDGES {
            return out;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pairs_are_well_formed(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sig = sig("colour c\nop f : c -> c\nop m : c c -> c\n");
        let rs = shrinking_rules(&mut rng, &sig, 2);
        for p in enumerate_critical_pairs(&rs, true).unwrap() {
            prop_assert!(p.apex.is_discrete());
            let (l1, l2) = (&rs[p.rule1].lhs, &rs[p.rule2].lhs);
            prop_assert!(p.match1.is_valid(l1, &p.overlap) && p.match2.is_valid(l2, &p.overlap));
            let mut hit = vec![false; p.overlap.node_count()];
            for &n in p.match1.nodes.iter().chain(&p.match2.nodes) {
                hit[n] = true;
            }
            prop_assert!(hit.iter().all(|&x| x));
            let mut hit = vec![false; p.overlap.edge_count()];
            for &e in p.match1.edges.iter().chain(&p.match2.edges) {
                hit[e] = true;
            }
            prop_assert!(hit.iter().all(|&x| x));
            let via1 = p.apex_to_context1.then(&p.context1_to_overlap);
            let via2 = p.apex_to_context2.then(&p.context2_to_overlap);
            prop_assert_eq!(via1.nodes, via2.nodes);
            prop_assert_eq!(p.result1.interface.len(), p.apex.node_count());
            prop_assert_eq!(p.result1.word(), p.result2.word());
        }
    }

    #[test]
    fn disjoint_pairs_join(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sig = sig("colour c\nop f : c -> c\nop m : c c -> c\n");
        let rs = shrinking_rules(&mut rng, &sig, 2);
        let report = check_confluence(&rs, Termination::Asserted, true).unwrap();
        for (p, j) in &report.pairs {
            if p.disjoint {
                prop_assert!(matches!(j, Joinability::Joinable(_)));
            }
        }
        prop_assert!(report.verdict != Verdict::Inconclusive);
    }

    #[test]
    fn verdict_ignores_rule_order(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sig = sig("colour c\nop f : c -> c\nop m : c c -> c\n");
        let mut rs = shrinking_rules(&mut rng, &sig, 3);
        let before = check_confluence(&rs, Termination::Asserted, false).unwrap().verdict;
        rs.shuffle(&mut rng);
        prop_assert_eq!(check_confluence(&rs, Termination::Asserted, false).unwrap().verdict, before);
    }

    #[test]
    fn verdict_matches_reachability(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sig = sig("colour c\nop f : c -> c\nop m : c c -> c\n");
        let rs = shrinking_rules(&mut rng, &sig, 2);
        let report = check_confluence(&rs, Termination::Asserted, false).unwrap();
        let mut oracle = JoinOracle::new(&sig, &rs, 400);
        for (p, j) in &report.pairs {
            if let Some(o) = oracle.joinable(&p.result1, &p.result2) {
                prop_assert_eq!(o, matches!(j, Joinability::Joinable(_)));
            }
        }
    }
}
