// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::{rng, rng_seeded};
use proptest::prelude::*;
use qinfo::entwit::{
    default_phi_eigs, min_rank_subspace, phi_map, ppt_test, rank2_complement, rank2_subspace, reshape_vector,
    verify_min_rank, MatrixSubspace, RANK_TOL,
};
use qinfo::matkit::{herm_eig, hs_inner, partial_transpose, svd, CMatrix};
use qinfo::randkit::{random_pure, random_state};
use qinfo::states::{max_entangled, schmidt_rank, werner, State};
use qinfo::Error;

fn rank_of(x: &CMatrix) -> usize {
    svd(x).rank(RANK_TOL)
}

fn gram_is_identity(s: &MatrixSubspace) -> bool {
    let b = s.basis();
    b.iter().enumerate().all(|(i, x)| {
        b.iter().enumerate().all(|(j, y)| {
            let want = if i == j { 1.0 } else { 0.0 };
            (hs_inner(x, y).unwrap() - qinfo::matkit::r(want)).norm() <= 1e-10
        })
    })
}

#[test]
fn ppt_examples() {
    let mut g = rng("entwit.ppt");
    let prod = random_state(&[2], &mut g).tensor(&random_state(&[3], &mut g));
    assert!(ppt_test(&prod, 1).unwrap());

    let bell = max_entangled(2).density();
    assert!(!ppt_test(&bell, 1).unwrap());
    let lo = herm_eig(&partial_transpose(bell.rho(), &[2, 2], 1).unwrap()).unwrap().values[0];
    assert!((lo + 0.5).abs() < 1e-12);

    assert!(ppt_test(&werner(2, 0.2).unwrap(), 1).unwrap());
    assert!(!ppt_test(&werner(2, 0.6).unwrap(), 1).unwrap());
    assert!(matches!(ppt_test(&bell, 0), Err(Error::Dimension(_))));
}

#[test]
fn rank2_subspace_examples() {
    let s = rank2_subspace(2, &default_phi_eigs(2)).unwrap();
    assert_eq!(s.ambient(), (4, 4));
    assert_eq!(s.dim(), 8);
    assert!(gram_is_identity(&s));

    let mut g = rng("entwit.rank2");
    for _ in 0..200 {
        assert!(rank_of(&s.random_element(&mut g)) >= 2);
    }

    // B = 0 gives diag(A, A), whose rank is 2·rank(A): exactly 2 for rank-one A.
    for n in 2..=3 {
        let s = rank2_subspace(n, &default_phi_eigs(n)).unwrap();
        let mut x = CMatrix::zeros(2 * n, 2 * n);
        x[(0, 0)] = qinfo::matkit::r(1.0);
        x[(n, n)] = qinfo::matkit::r(1.0);
        assert!(s.residual(&x) < 1e-12);
        assert_eq!(rank_of(&x), 2);
        let mut y = CMatrix::zeros(2 * n, 2 * n);
        y.set_block(0, 0, &CMatrix::identity(n));
        y.set_block(n, n, &CMatrix::identity(n));
        assert!(s.residual(&y) < 1e-12);
        assert_eq!(rank_of(&y), 2 * n);
    }

    assert!(matches!(rank2_subspace(2, &[1.0, 1.0, 2.0, 3.0]), Err(Error::EigsNotDistinct)));
    assert!(matches!(rank2_subspace(2, &[1.0, -2.0, 2.0, 3.0]), Err(Error::EigsNotDistinct)));
    assert!(matches!(rank2_subspace(2, &[1.0, 2.0]), Err(Error::EigsNotDistinct)));
}

#[test]
fn phi_map_has_requested_spectrum() {
    // Φ is diagonal in the Weyl basis with eigenvalues p_α.
    let n = 3;
    let eigs = default_phi_eigs(n);
    for (w, p) in qinfo::states::unitary_error_basis(n).iter().zip(&eigs) {
        let out = phi_map(n, &eigs, w);
        assert!(out.max_abs_diff(&w.scale_re(*p)) < 1e-12);
    }
}

#[test]
fn rank2_complement_examples() {
    let s = rank2_subspace(2, &default_phi_eigs(2)).unwrap();
    let c = rank2_complement(&s);
    assert_eq!(c.dim(), 8);
    assert_eq!(s.dim() + c.dim(), 16);
    assert!(gram_is_identity(&c));
    for a in s.basis() {
        for b in c.basis() {
            assert!(hs_inner(a, b).unwrap().norm() <= 1e-10);
        }
    }
    // Complement elements have the form [[K, L], [−Φ(L), −K]].
    let eigs = default_phi_eigs(2);
    let mut g = rng("entwit.complement");
    for _ in 0..200 {
        let y = c.random_element(&mut g);
        assert!(rank_of(&y) >= 2);
        let k = y.block(0, 2, 0, 2);
        let l = y.block(0, 2, 2, 4);
        assert!(y.block(2, 4, 2, 4).max_abs_diff(&(-&k)) < 1e-10);
        assert!(y.block(2, 4, 0, 2).max_abs_diff(&(-&phi_map(2, &eigs, &l))) < 1e-10);
    }
}

#[test]
fn min_rank_subspace_examples() {
    let full = min_rank_subspace(3, 4, 0).unwrap();
    assert_eq!(full.dim(), 12);
    assert_eq!(min_rank_subspace(3, 3, 1).unwrap().dim(), 4);
    let l0 = min_rank_subspace(4, 4, 1).unwrap();
    let mut g = rng("entwit.l0");
    for _ in 0..500 {
        assert!(rank_of(&l0.random_element(&mut g)) >= 2);
    }
    assert!(matches!(min_rank_subspace(3, 3, 3), Err(Error::KOutOfRange { k: 3, m: 3, n: 3 })));
    assert!(matches!(min_rank_subspace(2, 5, 2), Err(Error::KOutOfRange { .. })));
}

#[test]
fn min_rank_dimension_table() {
    for m in 1..=6 {
        for n in 1..=6 {
            for k in 0..m.min(n) {
                let s = min_rank_subspace(m, n, k).unwrap();
                assert_eq!(s.dim(), (m - k) * (n - k), "({m},{n},{k})");
            }
        }
    }
}

#[test]
fn verify_min_rank_examples() {
    let s = min_rank_subspace(3, 3, 1).unwrap();
    assert_eq!(verify_min_rank(&s, 1, 200, 3), (2, true));
    let full = min_rank_subspace(3, 3, 0).unwrap();
    assert!(verify_min_rank(&full, 0, 50, 3).1);

    let mut polluted = vec![CMatrix::unit(3, 3, 0, 0)];
    polluted.extend(s.basis().iter().cloned());
    let p = MatrixSubspace::from_spanning((3, 3), &polluted).unwrap();
    let (lo, ok) = verify_min_rank(&p, 1, 200, 3);
    assert_eq!(lo, 1);
    assert!(!ok);

    // Same seed, same answer.
    assert_eq!(verify_min_rank(&s, 1, 50, 9), verify_min_rank(&s, 1, 50, 9));
}

#[test]
fn schmidt_rank_is_reshaped_rank() {
    let mut g = rng("entwit.reshape");
    for t in 0..100 {
        let (m, n) = (2 + t % 3, 2 + (t / 3) % 3);
        let r = 1 + t % m.min(n);
        // Sum of r random product vectors: generically Schmidt rank r.
        let mut v = vec![qinfo::matkit::ZERO; m * n];
        for _ in 0..r {
            let p = random_pure(&[m, n], &mut g);
            let f = qinfo::states::schmidt_decompose(&p, 1).unwrap();
            let a = f.left_vecs.column(0);
            let b = f.right_vecs.column(0);
            for (x, z) in v.iter_mut().zip(qinfo::matkit::kron_vec(&a, &b)) {
                *x += z;
            }
        }
        let psi = qinfo::states::PureState::normalized(vec![m, n], v).unwrap();
        let gamma = reshape_vector(psi.vec(), m, n).unwrap();
        let sr = schmidt_rank(&psi, 1, 1e-9).unwrap();
        assert_eq!(sr, svd(&gamma).rank(1e-9));
        assert_eq!(sr, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn separable_mixtures_are_ppt(seed in any::<u64>(), terms in 1usize..6, da in 2usize..4, db in 2usize..4) {
        let mut g = rng_seeded(seed, "entwit.prop.sep");
        let mut rho = CMatrix::zeros(da * db, da * db);
        for _ in 0..terms {
            let p = random_state(&[da], &mut g).tensor(&random_state(&[db], &mut g));
            rho += &p.rho().scale_re(1.0 / terms as f64);
        }
        let st = State::new(vec![da, db], rho).unwrap();
        prop_assert!(ppt_test(&st, 1).unwrap());
    }

    #[test]
    fn rank2_subspace_has_no_rank_one_element(seed in any::<u64>(), n in 2usize..4) {
        let s = rank2_subspace(n, &default_phi_eigs(n)).unwrap();
        let mut g = rng_seeded(seed, "entwit.prop.rank2");
        for _ in 0..40 {
            prop_assert!(rank_of(&s.random_element(&mut g)) >= 2);
        }
    }
}
