use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrametra::ultrametric::*;
use ultrametra::vladimirov::{apply_direct, ExteriorPolicy, OperatorSpec};
use ultrametra::wavelets::{BallFunction, Grid};

fn ancestors(tree: &UltrametricTree, mut n: usize) -> Vec<usize> {
    let mut out = vec![n];
    while let Some(p) = tree.node(n).parent {
        out.push(p);
        n = p;
    }
    out
}

/// Lowest common ancestor found by intersecting ancestor chains.
fn lca(tree: &UltrametricTree, a: usize, b: usize) -> usize {
    let up_b = ancestors(tree, tree.leaf(b));
    ancestors(tree, tree.leaf(a)).into_iter().find(|n| up_b.contains(n)).unwrap()
}

fn dense_pdo(tree: &UltrametricTree) -> DMatrix<f64> {
    let n = tree.leaf_count();
    let nu = tree.leaf_measures();
    let mut m = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            if x != y {
                let t = tree.node(lca(tree, x, y)).kernel.unwrap();
                m[(x, y)] -= t * nu[y];
                m[(x, x)] += t * nu[y];
            }
        }
    }
    m
}

fn real(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

#[test]
fn eigenvalues_match_dense_diagonalisation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let tree = UltrametricTree::random(&mut rng, 64).unwrap();
        let nu = tree.leaf_measures();
        let m = dense_pdo(&tree);
        let n = tree.leaf_count();
        let sym = DMatrix::from_fn(n, n, |a, b| m[(a, b)] * nu[a].sqrt() / nu[b].sqrt());
        let sym = (&sym + sym.transpose()) * 0.5;
        let mut dense: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        let mut ours = vec![0.0];
        for id in tree.internal_nodes() {
            let lam = tree_eigenvalue(&tree, id).unwrap();
            ours.extend(std::iter::repeat_n(lam, tree.node(id).children.len() - 1));
        }
        dense.sort_by(f64::total_cmp);
        ours.sort_by(f64::total_cmp);
        assert_eq!(dense.len(), ours.len());
        for (a, b) in dense.iter().zip(&ours) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }

        for w in tree_wavelets(&tree) {
            let lam = tree_eigenvalue(&tree, w.node).unwrap();
            let d = pdo_apply(&tree, &real(&w.values)).unwrap();
            for (dv, v) in d.iter().zip(&w.values) {
                assert!((dv.re - lam * v).abs() < 1e-10 && dv.im == 0.0);
            }
        }
    }
}

#[test]
fn wavelets_complete_an_orthonormal_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let tree = UltrametricTree::random(&mut rng, 40).unwrap();
        let nu = tree.leaf_measures();
        let total: f64 = nu.iter().sum();
        let mut basis = vec![vec![1.0 / total.sqrt(); tree.leaf_count()]];
        basis.extend(tree_wavelets(&tree).into_iter().map(|w| w.values));
        assert_eq!(basis.len(), tree.leaf_count());
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g: f64 = a.iter().zip(b).zip(&nu).map(|((x, y), v)| x * y * v).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn ternary_node_gram_schmidt() {
    let leaf = |m| TreeSpec { measure: Some(m), ..Default::default() };
    let spec = TreeSpec { kernel: Some(1.0), children: vec![leaf(0.2), leaf(0.3), leaf(0.5)], ..Default::default() };
    let tree = UltrametricTree::from_spec(&spec).unwrap();
    let w = tree_wavelets(&tree);
    assert_eq!(w.len(), 2);
    // first wavelet: 1_{c1} minus its mean, normalised
    let raw = [1.0 - 0.2, -0.2, -0.2];
    let norm = (0.2 * raw[0] * raw[0] + 0.8 * 0.04f64).sqrt();
    for (v, r) in w[0].values.iter().zip(raw) {
        assert!((v - r / norm).abs() < 1e-14);
    }
}

#[test]
fn constants_are_annihilated() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tree = UltrametricTree::random(&mut rng, 30).unwrap();
    let f = vec![Complex64::new(2.5, -1.0); tree.leaf_count()];
    assert!(pdo_apply(&tree, &f).unwrap().iter().all(|v| v.norm() < 1e-12));
}

#[test]
fn z2_tree_matches_the_vladimirov_operator() {
    let alpha = 1.3;
    let spec = OperatorSpec::new(alpha, 2, 0, ExteriorPolicy::FullSpaceTail).unwrap();
    let g = spec.gamma();
    let t = |k: i32| g * 2f64.powf(k as f64 * (1.0 + alpha));
    let leaf = || TreeSpec { measure: Some(0.25), ..Default::default() };
    let ball = |k, children| TreeSpec { kernel: Some(t(k)), children, ..Default::default() };
    // Z_2 → {even, odd} → cells mod 4; leaf order is 0, 2, 1, 3
    let tree = UltrametricTree::from_spec(&ball(0, vec![ball(1, vec![leaf(), leaf()]), ball(1, vec![leaf(), leaf()])])).unwrap();
    let order = monna_order(2, 2);

    let grid = Grid::new(2, 1, 0, 2).unwrap();
    let vals = vec![Complex64::new(1.0, 0.5), Complex64::new(-2.0, 0.0), Complex64::new(0.25, 1.0), Complex64::new(3.0, -1.0)];
    let f = BallFunction::new(grid, vals.clone()).unwrap();
    let direct = apply_direct(&f, &spec).unwrap();
    let tree_f: Vec<Complex64> = order.iter().map(|&c| vals[c]).collect();
    let d = pdo_apply(&tree, &tree_f).unwrap();
    let exterior = g * spec.exterior_tail();
    for (i, &c) in order.iter().enumerate() {
        assert!((d[i] + tree_f[i] * exterior - direct.values()[c]).norm() < 1e-12);
    }
}

#[test]
fn gibbs_density_is_stationary() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let tree = UltrametricTree::random(&mut rng, 64).unwrap();
        let beta = rng.random_range(0.0..3.0);
        let l = drift_generator(&tree, beta).unwrap();
        let g = nalgebra::DVector::from_vec(gibbs_density(&tree, beta).unwrap());
        let scale = l.abs().max() * g.abs().max();
        assert!((&l * &g).abs().max() <= 1e-12 * scale.max(1.0));
    }
}

#[test]
fn flat_landscape_is_a_pdo() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut spec = UltrametricTree::random(&mut rng, 20).unwrap().to_spec();
    fn flatten(s: &mut TreeSpec) {
        if s.children.is_empty() {
            s.energy = Some(0.0);
        }
        s.children.iter_mut().for_each(flatten);
    }
    flatten(&mut spec);
    let beta = 1.7;
    let landscape = UltrametricTree::from_spec(&spec).unwrap();
    let l = drift_generator(&landscape, beta).unwrap();
    fn to_kernel(s: &mut TreeSpec, beta: f64) {
        if !s.children.is_empty() {
            let nu: f64 = leaf_total(s);
            s.kernel = Some((-beta * s.energy.unwrap()).exp() / nu);
        }
        s.children.iter_mut().for_each(|c| to_kernel(c, beta));
    }
    fn leaf_total(s: &TreeSpec) -> f64 {
        if s.children.is_empty() { s.measure.unwrap() } else { s.children.iter().map(leaf_total).sum() }
    }
    to_kernel(&mut spec, beta);
    let pdo = UltrametricTree::from_spec(&spec).unwrap();
    let f: Vec<Complex64> = (0..pdo.leaf_count()).map(|i| Complex64::new((i as f64).sin(), 0.0)).collect();
    let d = pdo_apply(&pdo, &f).unwrap();
    let lf = &l * nalgebra::DVector::from_iterator(f.len(), f.iter().map(|z| z.re));
    for (a, b) in d.iter().zip(lf.iter()) {
        assert!((a.re - b).abs() < 1e-12);
    }
}

#[test]
fn parisi_blocks_in_monna_order() {
    for (p, m) in [(2u64, 3u32), (3, 2)] {
        let q: Vec<f64> = (0..m).map(|k| 1.0 + k as f64).collect();
        let mat = parisi_matrix(&q, p, m).unwrap();
        let order = monna_order(p, m);
        let size = order.len();
        // in Monna order, a block of size p^{m−k} on the diagonal is one ball of radius p^{-k}
        for k in 0..m as usize {
            let block = (p as usize).pow(m - k as u32);
            for a in 0..size {
                for b in 0..size {
                    let (x, y) = (order[a], order[b]);
                    let same_ball = a / block == b / block;
                    let close = (x as i64 - y as i64).rem_euclid((p as i64).pow(k as u32)) == 0;
                    assert_eq!(same_ball, close);
                    if a != b && same_ball && a / (block / p as usize) != b / (block / p as usize) {
                        assert_eq!(mat[(x, y)], q[k]);
                    }
                }
            }
        }
    }
    let c = parisi_matrix(&[4.0, 4.0, 4.0], 3, 3).unwrap();
    assert!(c.iter().all(|&v| v == 0.0 || v == 4.0));
}

#[test]
fn parisi_from_a_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tree = UltrametricTree::random(&mut rng, 16).unwrap();
    let q = parisi_matrix_tree(&tree).unwrap();
    for a in 0..tree.leaf_count() {
        for b in 0..tree.leaf_count() {
            let want = if a == b { 0.0 } else { tree.node(lca(&tree, a, b)).kernel.unwrap() };
            assert_eq!(q[(a, b)], want);
        }
    }
}

#[test]
fn two_point_density_converges_within_the_bound() {
    let d = ZpDensity::new(2, 1, vec![1.2, 0.8]).unwrap();
    let r = convergence_report(&d, 0, 1, 100).unwrap();
    assert_eq!(r.violations, 0);
    assert!(r.monotone);
    for row in &r.rows {
        assert!(row.distance <= (-(row.n as f64) / 24.0).exp());
        assert!((row.distance - 0.2f64.powi(row.n as i32)).abs() < 1e-15);
    }
}

#[test]
fn distance_is_measured_in_units_of_the_uniform_level() {
    // supported on 2Z_2 (D = 1/2), constant on 4Z_2 (Δ = 1/4); the sum walks on Z/2 with t = −0.6
    let d = ZpDensity::from_weights(2, 2, &[1.0, 0.0, 4.0, 0.0]).unwrap();
    let r = convergence_report(&d, 1, 2, 60).unwrap();
    assert_eq!(r.violations, 0);
    for row in &r.rows {
        let t = 0.6f64.powi(row.n as i32);
        assert!((row.distance - 2.0 * t).abs() < 1e-12);
        assert!((row.scaled - t).abs() < 1e-12);
    }
    // the raw sup-distance would exceed the bound at n = 1
    assert!(r.rows[0].distance > r.rows[0].bound);
}

#[test]
fn nearly_degenerate_density_breaks_the_bound() {
    let delta = 1e-4;
    let d = ZpDensity::from_weights(2, 2, &[1.0 - 3.0 * delta, delta, delta, delta]).unwrap();
    let r = convergence_report(&d, 0, 2, 100).unwrap();
    assert!(r.monotone);
    assert!(r.rows[0].violated);
    assert_eq!(r.violations, 100);
}

fn density(p: u64, m: u32) -> impl Strategy<Value = ZpDensity> {
    let size = p.pow(m) as usize;
    prop::collection::vec(0.001f64..1.0, size).prop_map(move |w| ZpDensity::from_weights(p, m, &w).unwrap())
}

proptest! {
    #[test]
    fn convolution_preserves_mass_and_contracts((d, e) in (density(3, 2), density(3, 2))) {
        let c = convolve(&d, &e).unwrap();
        let mass: f64 = c.values().iter().sum::<f64>() / 9.0;
        prop_assert!((mass - 1.0).abs() < 1e-12);
        prop_assert!(c.distance_to_uniform(0) <= d.distance_to_uniform(0) + 1e-12);
        let u = ZpDensity::uniform(3, 2).unwrap();
        prop_assert!(convolve(&u, &d).unwrap().distance_to_uniform(0) < 1e-12);
    }

    #[test]
    fn parisi_depends_only_on_the_norm(a in 0usize..27, b in 0usize..27, c in 0usize..27, e in 0usize..27) {
        let q = parisi_matrix(&[0.3, 1.1, 2.9], 3, 3).unwrap();
        let norm = |x: usize, y: usize| {
            let mut d = x.abs_diff(y);
            if d == 0 { return 3; }
            let mut k = 0;
            while d.is_multiple_of(3) { d /= 3; k += 1; }
            k
        };
        if norm(a, b) == norm(c, e) {
            prop_assert_eq!(q[(a, b)], q[(c, e)]);
        }
    }
}
