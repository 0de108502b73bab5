use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrametra::vladimirov::*;
use ultrametra::wavelets::*;
use ultrametra::{PAdic, Rational};

fn random_function(grid: Grid, rng: &mut impl Rng) -> BallFunction {
    let vals = (0..grid.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    BallFunction::new(grid, vals).unwrap()
}

#[test]
fn wavelets_are_eigenfunctions() {
    for p in [2u64, 3, 5] {
        for alpha in [0.5, 1.0, 2.0] {
            for gamma in [-1, 0, 1] {
                let grid = Grid::new(p, 1, 2, 2).unwrap();
                let n = Translation::new(p, vec![1]).unwrap();
                let idx = WaveletIndex::one_d(p, gamma, n, 1).unwrap();
                let psi = sample_wavelet(&idx, grid).unwrap();
                let spec = OperatorSpec::new(alpha, p, 2, ExteriorPolicy::FullSpaceTail).unwrap();
                let d = apply_direct(&psi, &spec).unwrap();
                let lam = eigenvalue(p, alpha, gamma);
                let err = d.max_abs_diff(&psi.scale(Complex64::new(lam, 0.0))).unwrap();
                assert!(err <= 1e-9 * lam.max(1.0), "p={p} α={alpha} γ={gamma}: {err}");
            }
        }
    }
}

#[test]
fn spectral_and_direct_agree_on_mean_zero_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2u64, 3] {
        let grid = Grid::new(p, 1, 1, 3).unwrap();
        let mut f = random_function(grid, &mut rng);
        let mean = f.integral() * (p as f64).powi(-1);
        f.values_mut().iter_mut().for_each(|v| *v -= mean);
        let spec = OperatorSpec::new(1.3, p, 1, ExteriorPolicy::FullSpaceTail).unwrap();
        let direct = apply_direct(&f, &spec).unwrap();
        let coeffs = analyze(&f, AnalyzeOptions { gamma_min: -2, gamma_max: 1, n_bound: None }).unwrap().coeffs;
        let spectral = synthesize(&apply_spectral(&coeffs, p, 1.3), grid).unwrap();
        assert!(direct.max_abs_diff(&spectral).unwrap() < 1e-8);
    }
}

#[test]
fn composite_rule_on_random_affine_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = [2u64, 3, 5][rng.random_range(0..3)];
        let grid = Grid::new(p, 1, rng.random_range(0..2), rng.random_range(1..3)).unwrap();
        let f = random_function(grid, &mut rng);
        let a_val = rng.random_range(-1..=1);
        let a_unit = loop {
            let u: i64 = rng.random_range(1..30);
            if u % p as i64 != 0 {
                break u;
            }
        };
        let a = Rational::from_integer(a_unit.into()) * Rational::from_integer((p as i64).into()).pow(a_val);
        let a = PAdic::from_rational(&a, p, 12).unwrap();
        let den = [1i64, p as i64, 7 * p as i64 * p as i64][rng.random_range(0..3)];
        let b = Rational::new(rng.random_range(-20i64..20).into(), den.into());
        let b = PAdic::from_rational(&b, p, 12).unwrap();
        let alpha = rng.random_range(0.3..2.5);
        let r = composite_rule_check(&f, &a, &b, alpha).unwrap();
        worst = worst.max(r.max_deviation);
    }
    assert!(worst < 1e-9, "worst deviation {worst}");
}

#[test]
fn operator_is_symmetric_and_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = OperatorSpec::new(0.8, 3, 1, ExteriorPolicy::Absorbing).unwrap();
    let grid = Grid::new(3, 1, 1, 2).unwrap();
    for _ in 0..20 {
        let f = random_function(grid, &mut rng);
        let g = random_function(grid, &mut rng);
        let a = f.inner_product(&apply_direct(&g, &spec).unwrap()).unwrap();
        let b = apply_direct(&f, &spec).unwrap().inner_product(&g).unwrap();
        assert!((a - b).norm() < 1e-10);
        assert!(f.inner_product(&apply_direct(&f, &spec).unwrap()).unwrap().re >= 0.0);
    }
}

fn density(grid: Grid) -> BallFunction {
    // the indicator of Z_p, normalised
    BallFunction::unit_ball(grid).unwrap()
}

#[test]
fn heat_reproduces_initial_data_and_is_a_semigroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = Grid::new(2, 1, 2, 3).unwrap();
    let f0 = random_function(grid, &mut rng);
    for policy in [ExteriorPolicy::Absorbing, ExteriorPolicy::FullSpaceTail] {
        let spec = OperatorSpec::new(1.0, 2, 2, policy).unwrap();
        let sol = heat_solve(&f0, &spec, &[0.0, 0.3]).unwrap();
        assert!(sol.states[0].max_abs_diff(&f0).unwrap() < 1e-10);
        assert!(sol.rates().iter().all(|&r| r > 0.0));
    }

    let spec = OperatorSpec::new(1.0, 2, 2, ExteriorPolicy::Absorbing).unwrap();
    let (t1, t2) = (0.17, 0.41);
    let once = heat_solve(&f0, &spec, &[t1 + t2]).unwrap();
    let half = heat_solve(&f0, &spec, &[t1]).unwrap();
    let twice = heat_solve(&half.states[0], &spec, &[t2]).unwrap();
    assert!(once.states[0].max_abs_diff(&twice.states[0]).unwrap() < 1e-8);

    let mut g0 = f0.clone();
    let mean = g0.integral() * 0.25;
    g0.values_mut().iter_mut().for_each(|v| *v -= mean);
    let spec = OperatorSpec::new(1.0, 2, 2, ExteriorPolicy::FullSpaceTail).unwrap();
    let once = heat_solve(&g0, &spec, &[t1 + t2]).unwrap();
    let half = heat_solve(&g0, &spec, &[t1]).unwrap();
    let twice = heat_solve(&half.states[0], &spec, &[t2]).unwrap();
    assert!(once.states[0].max_abs_diff(&twice.states[0]).unwrap() < 1e-8);
}

#[test]
fn spectral_and_absorbing_heat_agree_for_short_times() {
    let grid = Grid::new(2, 1, 0, 4).unwrap();
    let f0 = density(grid);
    let times = [0.0, 0.02, 0.05, 0.1];
    let abs = heat_solve(&f0, &OperatorSpec::new(1.0, 2, 3, ExteriorPolicy::Absorbing).unwrap(), &times).unwrap();
    let full = heat_solve(&f0, &OperatorSpec::new(1.0, 2, 3, ExteriorPolicy::FullSpaceTail).unwrap(), &times).unwrap();
    for (a, b) in abs.states.iter().zip(&full.states) {
        assert!(a.max_abs_diff(b).unwrap() < 1e-4);
    }
}

#[test]
fn survival_decreases_and_matches_the_lowest_mode() {
    let grid = Grid::new(3, 1, 0, 2).unwrap();
    let f0 = density(grid);
    let spec = OperatorSpec::new(1.0, 3, 1, ExteriorPolicy::Absorbing).unwrap();
    let sol = heat_solve(&f0, &spec, &[]).unwrap();
    let mut last = 1.0 + 1e-12;
    for k in 0..40 {
        let s = survival(&sol, k as f64 * 0.25).unwrap();
        assert!(s <= last && s > 0.0);
        last = s;
    }
    // The domain indicator is the slowest mode, with rate Γ·T_ext.
    let slow = spec.gamma() * spec.exterior_tail();
    let min_rate = sol.rates().into_iter().fold(f64::INFINITY, f64::min);
    assert!((min_rate - slow).abs() < 1e-10);
    let s1 = survival(&sol, 30.0).unwrap();
    let s2 = survival(&sol, 31.0).unwrap();
    assert!(((s1 / s2).ln() - slow).abs() < 1e-6);
}
