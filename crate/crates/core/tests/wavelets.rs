use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use ultrametra::wavelets::*;
use ultrametra::PAdic;

#[test]
fn mother_wavelet_on_integers() {
    for p in [2u64, 3, 5, 7] {
        for a in -40i64..40 {
            let x = PAdic::from_integer(a, p, 6).unwrap();
            let want = Complex64::from_polar(1.0, TAU * a.rem_euclid(p as i64) as f64 / p as f64);
            assert!((eval_mother_wavelet(&x).unwrap() - want).norm() < 1e-12, "p={p} a={a}");
        }
        // |x|_p = p lies outside the support
        let x = PAdic::from_rational(&ultrametra::Rational::new(1.into(), (p as i64).into()), p, 6).unwrap();
        assert_eq!(eval_mother_wavelet(&x).unwrap(), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn one_dimensional_gram_is_identity() {
    for p in [2u64, 3, 5] {
        // scales p^{-2} … p^2
        let g = Grid::new(p, 1, 2, 3).unwrap();
        let r = wavelet_gram(g).unwrap();
        assert_eq!(r.size, (p.pow(5) - 1) as usize);
        assert!(r.max_deviation() < 1e-10, "p={p}: {r:?}");
    }
}

#[test]
fn wavelets_have_mean_zero_and_unit_modulus_cube() {
    for p in [2u64, 3, 5] {
        let g = Grid::new(p, 1, 1, 2).unwrap();
        for idx in enumerate_wavelets(g).unwrap() {
            let psi = sample_wavelet(&idx, g).unwrap();
            assert!(psi.integral().norm() < 1e-12);
            // |ψ|² = p^{-γ} on the support, so p^γ|ψ|²ψ = ψ
            let scale = (p as f64).powi(idx.gamma);
            for v in psi.values() {
                assert!((v * v.norm_sqr() * scale - v).norm() < 1e-12);
            }
            if idx.gamma == 0 {
                for v in psi.values() {
                    assert!((v * v.norm_sqr() - v).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn multidimensional_and_matrix_grams() {
    let unit = Grid::new(2, 2, 0, 1).unwrap();
    let at_origin: Vec<_> = enumerate_wavelets(unit).unwrap().into_iter().filter(|i| i.gamma == 0).collect();
    assert_eq!(at_origin.len(), 3);
    let r = wavelet_gram(Grid::new(2, 2, 1, 1).unwrap()).unwrap();
    assert!(r.max_deviation() < 1e-10);
    let r = wavelet_gram(Grid::new(3, 2, 1, 1).unwrap()).unwrap();
    assert!(r.max_deviation() < 1e-10);
    let r = matrix_wavelet_gram(Grid::new(2, 2, 1, 2).unwrap(), -2..=2).unwrap();
    assert!(r.max_deviation() < 1e-10);
}

fn random_coeffs(rng: &mut ChaCha8Rng, pool: &[WaveletIndex], count: usize) -> BTreeMap<WaveletIndex, Complex64> {
    let mut out = BTreeMap::new();
    while out.len() < count {
        let idx = pool[rng.random_range(0..pool.len())].clone();
        out.insert(idx, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    }
    out
}

#[test]
fn analysis_inverts_synthesis() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (p, d, n, m) in [(2u64, 1u32, 2i32, 3i32), (3, 1, 1, 2), (5, 1, 1, 1), (2, 2, 1, 1)] {
        let g = Grid::new(p, d, n, m).unwrap();
        let pool = enumerate_wavelets(g).unwrap();
        for count in [1usize, 20, 100].map(|c| c.min(pool.len())) {
            let c = random_coeffs(&mut rng, &pool, count);
            let f = synthesize(&c, g).unwrap();
            let a = analyze(&f, AnalyzeOptions::full(g, 0)).unwrap();
            for idx in &pool {
                let want = c.get(idx).copied().unwrap_or_default();
                let got = a.coeffs.get(idx).copied().unwrap_or_default();
                assert!((want - got).norm() <= 1e-10, "{idx:?}");
            }
        }
    }
}

#[test]
fn parseval_for_mean_zero_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (p, d, n, m) in [(2u64, 1u32, 1i32, 4i32), (3, 1, 2, 2), (2, 2, 1, 1)] {
        let g = Grid::new(p, d, n, m).unwrap();
        let mut vals: Vec<Complex64> =
            (0..g.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let mean = vals.iter().sum::<Complex64>() / vals.len() as f64;
        vals.iter_mut().for_each(|v| *v -= mean);
        let f = BallFunction::new(g, vals).unwrap();
        let a = analyze(&f, AnalyzeOptions::full(g, 0)).unwrap();
        assert!(a.defect.abs() < 1e-9, "{}", a.defect);
        assert!((a.captured - f.norm_sq()).abs() < 1e-9);
        let back = synthesize(&a.coeffs, g).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-10);
    }
}

#[test]
fn two_adic_wavelets_are_haar_wavelets() {
    let g = Grid::new(2, 1, 0, 4).unwrap();
    assert_eq!(monna_conjugate_check(&WaveletIndex::mother(), g).unwrap().max_deviation, 0.0);
    let wide = Grid::new(2, 1, 2, 4).unwrap();
    for n in Translation::all(2, 1).unwrap() {
        let idx = WaveletIndex::one_d(2, 1, n, 1).unwrap();
        assert_eq!(monna_conjugate_check(&idx, wide).unwrap().max_deviation, 0.0);
    }
    assert!(monna_conjugate_check(&WaveletIndex::mother(), Grid::new(3, 1, 0, 2).unwrap()).is_err());
}
