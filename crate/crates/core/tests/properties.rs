use nalgebra::DMatrix;
use proptest::prelude::*;
use qwalk::catalog::CatalogGraph;
use qwalk::coins::{dft, grover, random_unitary};
use qwalk::measured::simulate;
use qwalk::scalar::{max_abs_diff, unitarity_residual, Cx};
use qwalk::spectral::{decompose, iht_subspace, overlap};
use qwalk::symmetry::{classify, generate_candidates, JointPermutation};
use qwalk::walk::{build_unitary, final_projector};
use qwalk::{build_hypercube, CayleyGraph, FiniteGroup, Perm, WalkState};

fn small_graph(i: usize) -> CayleyGraph {
    [CatalogGraph::Cube3, CatalogGraph::S3Two, CatalogGraph::S3Three, CatalogGraph::S4H2][i % 4].build().unwrap()
}

fn permutation_matrix(p: &JointPermutation, n: usize) -> DMatrix<Cx<f64>> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(p.apply_index(i), i)] = Cx::new(1.0, 0.0);
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric_rank_round_trip(n in 1usize..7, raw in any::<u64>()) {
        let g = FiniteGroup::symmetric(n).unwrap();
        let idx = (raw % g.order() as u64) as usize;
        let e = g.element(idx).unwrap();
        prop_assert_eq!(e.index(), idx);
        prop_assert_eq!(g.from_one_line(e.one_line().unwrap()).unwrap(), e);
    }

    #[test]
    fn z2_rank_round_trip(d in 1u32..12, raw in any::<u64>()) {
        let g = FiniteGroup::z2_pow(d).unwrap();
        let idx = (raw % g.order() as u64) as usize;
        let e = g.element(idx).unwrap();
        prop_assert_eq!(e.bits(), Some(idx as u64));
        prop_assert_eq!(g.from_bits(idx as u64).unwrap(), e);
    }

    #[test]
    fn s5_group_axioms(a in 0usize..120, b in 0usize..120, c in 0usize..120) {
        let g = FiniteGroup::symmetric(5).unwrap();
        let (a, b, c) = (g.element(a).unwrap(), g.element(b).unwrap(), g.element(c).unwrap());
        let ab_c = g.compose(&g.compose(&a, &b).unwrap(), &c).unwrap();
        let a_bc = g.compose(&a, &g.compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!(g.compose(&a, &g.inverse(&a).unwrap()).unwrap(), g.identity());
        prop_assert_eq!(g.compose(&g.identity(), &b).unwrap(), b);
    }

    #[test]
    fn conjugation_is_a_bijection(s in 0usize..24) {
        let g = FiniteGroup::symmetric(4).unwrap();
        let sigma = g.element(s).unwrap();
        let inv = g.inverse(&sigma).unwrap();
        let mut images: Vec<usize> = g
            .enumerate()
            .unwrap()
            .iter()
            .map(|h| g.compose(&g.compose(&sigma, h).unwrap(), &inv).unwrap().index())
            .collect();
        images.sort_unstable();
        prop_assert_eq!(images, (0..24).collect::<Vec<_>>());
    }

    #[test]
    fn perm_inverse_and_composition(images in Just((0..7).collect::<Vec<usize>>()).prop_shuffle()) {
        let p = Perm::from_images(images).unwrap();
        prop_assert!(p.compose(&p.inverse()).is_identity());
        prop_assert!(p.inverse().compose(&p).is_identity());
    }

    #[test]
    fn walk_is_unitary_and_norm_preserving(g in 0usize..4, coin_seed in any::<u64>(), state_seed in any::<u64>()) {
        let graph = small_graph(g);
        let u = build_unitary(&graph, random_unitary::<f64>(graph.degree(), coin_seed).unwrap()).unwrap();
        prop_assert!(graph.shift_map().is_permutation());
        prop_assert!(unitarity_residual(&u.dense()) < 1e-12);
        let psi = WalkState::random(u.dim(), state_seed);
        let out = u.apply(&psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let back = u.apply_inverse(&out).unwrap();
        prop_assert!((back.amplitudes() - psi.amplitudes()).camax() < 1e-12);
        let dense = u.dense() * psi.amplitudes();
        prop_assert!((dense - out.amplitudes()).camax() < 1e-12);
    }

    #[test]
    fn spectral_reconstruction(g in 0usize..4, coin_seed in any::<u64>()) {
        let graph = small_graph(g);
        let u = build_unitary(&graph, random_unitary::<f64>(graph.degree(), coin_seed).unwrap()).unwrap();
        let dec = decompose(&u, 1e-7).unwrap();
        prop_assert!(max_abs_diff(&dec.reconstruct(), &u.dense()) < 1e-9);
        prop_assert!(unitarity_residual(&dec.full_basis()) < 1e-9);
        prop_assert_eq!(dec.clusters().iter().map(|c| c.multiplicity()).sum::<usize>(), u.dim());
    }

    #[test]
    fn measured_walk_bookkeeping(g in 0usize..4, vertex in 0usize..24, state_seed in any::<u64>(), grover_coin in any::<bool>()) {
        let graph = small_graph(g);
        let d = graph.degree();
        let coin = if grover_coin { grover(d).unwrap() } else { dft(d).unwrap() };
        let u = build_unitary(&graph, coin).unwrap();
        let proj = final_projector(&graph, &[vertex % graph.n_vertices()]).unwrap();
        let rep = iht_subspace(&decompose(&u, 1e-7).unwrap(), &proj, 1e-8).unwrap();
        let psi = WalkState::random(u.dim(), state_seed);
        let r = simulate(&u, &proj, &psi, 400).unwrap();
        prop_assert!(r.conservation_error() < 1e-9);
        prop_assert!(r.q.iter().all(|&q| (0.0..=1.0 + 1e-12).contains(&q)));
        prop_assert!(r.survival_trace.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        let ov = overlap(&psi, &rep).unwrap();
        prop_assert!(r.survival_trace.iter().all(|&s| s >= ov - 1e-9));
        // IHT vectors have no weight on the final rows
        for &row in proj.rows() {
            prop_assert!(rep.iht_basis.row(row).iter().all(|x| x.norm() < 1e-9));
        }
    }
}

#[test]
fn walk_symmetries_commute_with_the_walk_operator() {
    for (graph, coin) in [
        (build_hypercube(3).unwrap(), grover::<f64>(3).unwrap()),
        (build_hypercube(3).unwrap(), dft::<f64>(3).unwrap()),
        (CatalogGraph::S3Three.build().unwrap(), grover::<f64>(3).unwrap()),
        (CatalogGraph::S4H2.build().unwrap(), dft::<f64>(3).unwrap()),
    ] {
        let u = build_unitary(&graph, coin.clone()).unwrap();
        let dense = u.dense();
        let n = u.dim();
        let rep = classify(&graph, &coin, 1e-10).unwrap();
        for p in &rep.w2 {
            let pm = permutation_matrix(p, n);
            assert!(max_abs_diff(&(&pm * &dense * pm.adjoint()), &dense) < 1e-12, "{p}");
        }
        // joint automorphisms outside W2 move the coin, so they cannot commute with U
        for p in rep.a2().filter(|p| !rep.w2.contains(p)) {
            let pm = permutation_matrix(p, n);
            assert!(max_abs_diff(&(&pm * &dense * pm.adjoint()), &dense) > 1e-6, "{p}");
        }
    }
}

#[test]
fn walk_symmetries_preserve_eigenspaces() {
    let graph = CatalogGraph::S4H1.build().unwrap();
    let coin = grover::<f64>(3).unwrap();
    let u = build_unitary(&graph, coin.clone()).unwrap();
    let dec = decompose(&u, 1e-7).unwrap();
    let n = u.dim();
    let rep = classify(&graph, &coin, 1e-10).unwrap();
    let cands = generate_candidates(&graph).unwrap();
    for p in cands.iter().filter(|p| rep.w2.contains(p)) {
        let pm = permutation_matrix(p, n);
        for c in dec.clusters() {
            let moved = &pm * &c.basis;
            let residual = &moved - &c.basis * (c.basis.adjoint() * &moved);
            assert!(residual.iter().all(|x| x.norm() < 1e-8), "{p} moves the eigenspace at phase {}", c.phase);
        }
    }
}

#[test]
fn grover_symmetry_counts_dominate() {
    for g in [CatalogGraph::Cube3, CatalogGraph::Cube4, CatalogGraph::S3Three, CatalogGraph::S4H2, CatalogGraph::S4Four] {
        let graph = g.build().unwrap();
        let d = graph.degree();
        let w = |coin: qwalk::CoinOperator| classify(&graph, &coin, 1e-10).unwrap().w2_count();
        let (gr, df, rn) = (w(grover(d).unwrap()), w(dft(d).unwrap()), w(random_unitary(d, 11).unwrap()));
        assert!(gr >= df && df >= rn, "{g}: {gr} {df} {rn}");
    }
}

#[test]
fn single_precision_pipeline() {
    let graph = build_hypercube(3).unwrap();
    let u = build_unitary(&graph, grover::<f32>(3).unwrap()).unwrap();
    let dec = decompose(&u, <f32 as qwalk::Real>::CLUSTER_TOL).unwrap();
    let proj = final_projector(&graph, &[7]).unwrap();
    let rep = iht_subspace(&dec, &proj, <f32 as qwalk::Real>::RANK_TOL).unwrap();
    assert_eq!(rep.total, 6);
}
