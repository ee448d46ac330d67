// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::{rng, rng_seeded};
use proptest::prelude::*;
use qinfo::channels::{classical_channel, Channel};
use qinfo::matkit::{herm_eig, CMatrix};
use qinfo::randkit::{haar_unitary, random_channel};
use qinfo::sdpcore::{solve, RMat, SdpOptions, SdpProblem};
use qinfo::states::{basis_state, max_entangled, unitary_error_basis, PureState};
use qinfo::zeroerr::{
    confusability_graph, graph_independence, graph_op_system, op_system_from_channel, theta_lower_from_witness,
    theta_tilde, verify_independent_states, Graph, OperatorSystem,
};
use qinfo::Error;
use rand::Rng;

fn brute_force_independent_set(g: &Graph) -> Vec<usize> {
    let n = g.vertices();
    let mut best: Vec<usize> = Vec::new();
    for mask in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if set.len() > best.len() && set.iter().all(|&u| set.iter().all(|&v| !g.has_edge(u, v))) {
            best = set;
        }
    }
    best
}

fn same_span(a: &OperatorSystem, b: &OperatorSystem) -> bool {
    a.dim() == b.dim() && a.is_subsystem_of(b) && b.is_subsystem_of(a)
}

/// Classical Lovász number as a real SDP over the graph.
fn lovasz_theta(g: &Graph) -> f64 {
    let n = g.vertices();
    let mut p = SdpProblem::new(vec![n]).unwrap();
    p.set_objective(0, RMat::from_element(n, n, 1.0)).unwrap();
    p.add_constraint(vec![(0, RMat::identity(n, n))], 1.0).unwrap();
    for (u, v) in g.edges() {
        let mut a = RMat::zeros(n, n);
        a[(u, v)] = 0.5;
        a[(v, u)] = 0.5;
        p.add_constraint(vec![(0, a)], 0.0).unwrap();
    }
    solve(&p, &SdpOptions::default()).unwrap().dual
}

fn typewriter(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|y| (0..n).map(|x| if y == x || y == (x + 1) % n { 0.5 } else { 0.0 }).collect()).collect()
}

#[test]
fn operator_system_validation() {
    let mut g = rng("zeroerr.opsys");
    let s = OperatorSystem::from_spanning(3, &[CMatrix::identity(3), CMatrix::unit(3, 3, 0, 1), CMatrix::unit(3, 3, 1, 0)])
        .unwrap();
    assert_eq!(s.dim(), 3);
    assert!(s.residual(&CMatrix::identity(3)) <= 1e-10);
    assert!(matches!(
        OperatorSystem::from_spanning(2, &[CMatrix::unit(2, 2, 0, 0)]),
        Err(Error::NotOperatorSystem(_))
    ));
    assert!(matches!(
        OperatorSystem::from_spanning(2, &[CMatrix::identity(2), CMatrix::unit(2, 2, 0, 1)]),
        Err(Error::NotOperatorSystem(_))
    ));
    assert!(matches!(OperatorSystem::from_spanning(2, &[CMatrix::identity(3)]), Err(Error::Dimension(_))));

    // S^⊥ has a Hermitian basis of the complementary dimension.
    let perp = s.perp_hermitian_basis();
    assert_eq!(perp.len(), 9 - 3);
    for k in &perp {
        assert!(k.is_hermitian(1e-12));
        assert!(s.project(k).frobenius() <= 1e-10);
    }
    let u = haar_unitary(3, &mut g);
    let rot: Vec<CMatrix> = s.basis().iter().map(|b| u.matmul(b).matmul(&u.adjoint())).collect();
    assert_eq!(OperatorSystem::from_spanning(3, &rot).unwrap().dim(), 3);
}

#[test]
fn op_system_from_channel_examples() {
    let mut g = rng("zeroerr.channel");
    let u = Channel::unitary(haar_unitary(3, &mut g)).unwrap();
    assert_eq!(op_system_from_channel(&u).unwrap().dim(), 1);

    for n in 2..=3 {
        let weyl: Vec<CMatrix> = unitary_error_basis(n).iter().map(|w| w.scale_re(1.0 / n as f64)).collect();
        let ch = Channel::new(n, n, weyl).unwrap();
        assert_eq!(op_system_from_channel(&ch).unwrap().dim(), n * n);
    }

    let kernel = typewriter(5);
    let s = op_system_from_channel(&classical_channel(&kernel).unwrap()).unwrap();
    let sg = graph_op_system(&confusability_graph(&kernel).unwrap());
    assert_eq!(s.dim(), 5 + 2 * 5);
    assert!(same_span(&s, &sg));

    let cp = Channel::new(2, 2, vec![CMatrix::identity(2).scale_re(0.5)]).unwrap();
    assert!(matches!(op_system_from_channel(&cp), Err(Error::NotTracePreserving(_))));
}

#[test]
fn graph_op_system_examples() {
    for n in 1..=5 {
        let d = graph_op_system(&Graph::empty(n));
        assert_eq!(d.dim(), n);
        assert!(d.basis().iter().all(|b| b.nnz() == 1 && b.diag().iter().any(|z| z.re == 1.0)));
        assert_eq!(graph_op_system(&Graph::complete(n)).dim(), n * n);
    }
    let p3 = graph_op_system(&Graph::path(3));
    assert_eq!(p3.dim(), 7);
    for i in 0..3 {
        for j in 0..3 {
            let r = p3.residual(&CMatrix::unit(3, 3, i, j));
            if i.abs_diff(j) <= 1 {
                assert!(r <= 1e-12);
            } else {
                assert!((r - 1.0).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn confusability_examples() {
    let id: Vec<Vec<f64>> = (0..4).map(|y| (0..4).map(|x| if x == y { 1.0 } else { 0.0 }).collect()).collect();
    assert_eq!(confusability_graph(&id).unwrap(), Graph::empty(4));
    let uniform = vec![vec![1.0 / 3.0; 4]; 3];
    assert_eq!(confusability_graph(&uniform).unwrap(), Graph::complete(4));
    assert_eq!(confusability_graph(&typewriter(5)).unwrap(), Graph::cycle(5));
    let bad = vec![vec![0.5, 1.0], vec![0.4, 0.0]];
    assert!(matches!(confusability_graph(&bad), Err(Error::NotStochastic(_))));
}

#[test]
fn independence_examples() {
    for n in 1..=8 {
        assert_eq!(graph_independence(&Graph::empty(n)).unwrap(), n);
        assert_eq!(graph_independence(&Graph::complete(n)).unwrap(), 1);
    }
    assert_eq!(brute_force_independent_set(&Graph::cycle(5)).len(), 2);
    assert_eq!(graph_independence(&Graph::cycle(5)).unwrap(), 2);
    assert_eq!(graph_independence(&Graph::cycle(7)).unwrap(), 3);
    assert_eq!(graph_independence(&Graph::path(6)).unwrap(), 3);
    assert_eq!(graph_independence(&Graph::empty(0)).unwrap(), 0);
    assert_eq!(graph_independence(&Graph::cycle(30)).unwrap(), 15);
    assert!(matches!(graph_independence(&Graph::empty(31)), Err(Error::TooLarge(31))));
}

#[test]
fn independent_state_examples() {
    let diag = graph_op_system(&Graph::empty(3));
    let one = [basis_state(vec![3], 1)];
    assert!(verify_independent_states(&OperatorSystem::full(3), &one).unwrap());
    let all: Vec<PureState> = (0..3).map(|i| basis_state(vec![3], i)).collect();
    assert!(verify_independent_states(&diag, &all).unwrap());

    // In M_n no two states are independent.
    let bell = max_entangled(2);
    let full = OperatorSystem::full(4);
    assert!(verify_independent_states(&full, &[bell.clone()]).unwrap());
    let other = PureState::normalized(vec![2, 2], vec![1.0.into(), 0.0.into(), 0.0.into(), (-1.0).into()]).unwrap();
    assert!(!verify_independent_states(&full, &[bell, other]).unwrap());
    assert!(matches!(verify_independent_states(&diag, &[basis_state(vec![2], 0)]), Err(Error::Dimension(_))));
}

#[test]
fn graph_system_independence_matches_graph() {
    let mut g = rng("zeroerr.alpha");
    for t in 0..30 {
        let n = 3 + t % 6;
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| g.random_bool(0.4)).collect();
        let gr = Graph::new(n, &edges).unwrap();
        let set = brute_force_independent_set(&gr);
        assert_eq!(graph_independence(&gr).unwrap(), set.len());
        let s = graph_op_system(&gr);
        let states: Vec<PureState> = set.iter().map(|&v| basis_state(vec![n], v)).collect();
        assert!(verify_independent_states(&s, &states).unwrap());
        // Any vertex set one larger contains an edge.
        for extra in (0..n).filter(|v| !set.contains(v)) {
            let mut bigger = states.clone();
            bigger.push(basis_state(vec![n], extra));
            assert!(!verify_independent_states(&s, &bigger).unwrap());
        }
    }
}

#[test]
fn theta_tilde_values() {
    for n in 2..=3 {
        let r = theta_tilde(&OperatorSystem::full(n), None).unwrap();
        assert!((r.value() - 1.0).abs() <= 1e-4, "{r:?}");
        assert!(r.primal <= r.dual + 1e-8);
        let r = theta_tilde(&OperatorSystem::scalars(n), None).unwrap();
        assert!((r.value() - (n * n) as f64).abs() <= 1e-3, "{r:?}");
    }
    let c5 = Graph::cycle(5);
    let r = theta_tilde(&graph_op_system(&c5), None).unwrap();
    assert!((r.value() - lovasz_theta(&c5)).abs() <= 1e-3, "{} vs {}", r.value(), lovasz_theta(&c5));
    assert!(r.gap.abs() <= 1e-6 * (1.0 + r.dual.abs()));
}

#[test]
fn theta_tilde_is_multiplicative_on_small_systems() {
    for s in [OperatorSystem::scalars(2), graph_op_system(&Graph::empty(2))] {
        let single = theta_tilde(&s, None).unwrap().value();
        let double = theta_tilde(&s.tensor(&s), None).unwrap().value();
        assert!(double >= single * single - 1e-4, "{double} vs {single}²");
        assert!((double - single * single).abs() <= 1e-3, "{double} vs {single}²");
    }
}

#[test]
fn larger_systems_have_smaller_theta() {
    let chain = [
        OperatorSystem::scalars(3),
        graph_op_system(&Graph::empty(3)),
        graph_op_system(&Graph::path(3)),
        OperatorSystem::full(3),
    ];
    for w in chain.windows(2) {
        assert!(w[0].is_subsystem_of(&w[1]));
    }
    let vals: Vec<f64> = chain.iter().map(|s| theta_tilde(s, None).unwrap().value()).collect();
    assert!(vals.windows(2).all(|w| w[0] >= w[1] - 1e-4), "{vals:?}");
}

#[test]
fn witness_examples() {
    let s = graph_op_system(&Graph::cycle(5));
    assert!((theta_lower_from_witness(&s, &CMatrix::zeros(5, 5)).unwrap() - 1.0).abs() < 1e-12);
    for n in 2..=4 {
        let mut d = vec![-1.0; n];
        d[0] = (n - 1) as f64;
        let v = theta_lower_from_witness(&OperatorSystem::scalars(n), &CMatrix::from_real_diag(&d)).unwrap();
        assert!((v - n as f64).abs() < 1e-12);
    }
    let sc = OperatorSystem::scalars(2);
    assert!(matches!(theta_lower_from_witness(&sc, &CMatrix::identity(2)), Err(Error::NotFeasibleWitness(_))));
    assert!(matches!(
        theta_lower_from_witness(&sc, &CMatrix::from_real_diag(&[-2.0, 2.0])),
        Err(Error::NotFeasibleWitness(_))
    ));
    assert!(matches!(theta_lower_from_witness(&sc, &CMatrix::zeros(3, 3)), Err(Error::Dimension(_))));

    // Random feasible witnesses never exceed ϑ̃.
    let upper = theta_tilde(&s, None).unwrap().value();
    let perp = s.perp_hermitian_basis();
    let mut g = rng("zeroerr.witness");
    for _ in 0..200 {
        let mut h = CMatrix::zeros(5, 5);
        for k in &perp {
            h += &k.scale_re(g.random_range(-1.0..1.0));
        }
        let lo = herm_eig(&h).unwrap().values[0];
        let m = h.scale_re(g.random_range(0.0..1.0) / lo.abs());
        let v = theta_lower_from_witness(&s, &m).unwrap();
        assert!(v <= upper + 1e-6, "{v} > {upper}");
    }
}

#[test]
fn parse_edge_list_examples() {
    let g = Graph::parse_edge_list("# pentagon\n0 1\n1 2\n2 3\n\n3 4\n4 0\n").unwrap();
    assert_eq!(g, Graph::cycle(5));
    let g = Graph::parse_edge_list("6\n0 1\n").unwrap();
    assert_eq!(g.vertices(), 6);
    assert_eq!(g.edges(), vec![(0, 1)]);
    assert_eq!(Graph::parse_edge_list("").unwrap().vertices(), 0);
    for bad in ["0 x", "1 2 3", "2 2", "3\n0 5"] {
        assert!(matches!(Graph::parse_edge_list(bad), Err(Error::InvalidGraph(_))), "{bad:?}");
    }
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..13).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            let edges: Vec<(usize, usize)> = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            Graph::new(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn independence_matches_brute_force(g in arb_graph()) {
        prop_assert_eq!(graph_independence(&g).unwrap(), brute_force_independent_set(&g).len());
    }

    #[test]
    fn graph_systems_are_operator_systems(g in arb_graph()) {
        let s = graph_op_system(&g);
        let n = g.vertices();
        prop_assert_eq!(s.dim(), n + 2 * g.edges().len());
        prop_assert!(s.residual(&CMatrix::identity(n)) <= 1e-10);
        for b in s.basis() {
            prop_assert!(s.residual(&b.adjoint()) <= 1e-10);
        }
        let rebuilt = OperatorSystem::from_spanning(n, s.basis()).unwrap();
        prop_assert!(same_span(&s, &rebuilt));
    }

    #[test]
    fn edge_list_roundtrip(g in arb_graph()) {
        let mut text = format!("{}\n", g.vertices());
        for (u, v) in g.edges() {
            text.push_str(&format!("{u} {v}\n"));
        }
        prop_assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn channel_systems_are_operator_systems(seed in any::<u64>(), n in 2usize..4, k in 1usize..4) {
        let mut g = rng_seeded(seed, "zeroerr.prop.channel");
        let ch = random_channel(n, n, k, &mut g);
        let s = op_system_from_channel(&ch).unwrap();
        prop_assert!(s.residual(&CMatrix::identity(n)) <= 1e-10);
        prop_assert!(s.dim() <= (k * k).min(n * n));
        for b in s.basis() {
            prop_assert!(s.residual(&b.adjoint()) <= 1e-10);
        }
    }
}
