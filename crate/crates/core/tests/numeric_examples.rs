mod common;

use std::f64::consts::PI;

use metaplectic::linalg::{Mat, INVERTIBILITY_RTOL};
use metaplectic::numeric::{
    apply_metaplectic, chirp_apply, free_apply_direct, gaussian_apply, lp_norm, multiplier_apply, partial_ft,
    phase_align, phase_align_distance, rescale_apply, stft, tf_shift, GaussianChirp, Grid, GridFunction,
    PhaseTolerance,
};
use metaplectic::symplectic::{dj_factorize, random_free, v_lower, v_upper};
use metaplectic::{IndexSet, SymplecticMatrix};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{max_abs_diff, random_chirp};

fn gaussian(grid: &Grid, a: f64) -> GridFunction {
    GridFunction::from_fn(*grid, |x| Complex64::new((-PI * a * x[0] * x[0]).exp(), 0.0))
}

fn scalar(v: f64) -> Mat {
    Mat::from_element(1, 1, v)
}

#[test]
fn chirp_examples() {
    let grid = Grid::self_dual(1, 64).unwrap();
    let f = random_chirp(&mut ChaCha8Rng::seed_from_u64(1), 1).sample(&grid).unwrap();
    assert_eq!(chirp_apply(&scalar(0.0), &f).unwrap().values(), f.values());
    let g = chirp_apply(&scalar(0.7), &f).unwrap();
    for (a, b) in f.values().iter().zip(g.values()) {
        assert!((a.norm() - b.norm()).abs() < 1e-14);
    }
    for p in [1.0, 3.0, f64::INFINITY] {
        assert!((lp_norm(&g, p).unwrap() - lp_norm(&f, p).unwrap()).abs() < 1e-12);
    }
    let m = chirp_apply(&scalar(0.7), &GaussianChirp::standard(1)).unwrap();
    assert!((m.m()[(0, 0)] - Complex64::new(0.7, 1.0)).norm() < 1e-15);
}

#[test]
fn rescale_examples() {
    let grid = Grid::self_dual(1, 256).unwrap();
    let f = gaussian(&grid, 1.0);
    assert!(max_abs_diff(&rescale_apply(&scalar(1.0), &f).unwrap(), &f) < 1e-12);
    let g = rescale_apply(&scalar(2.0), &f).unwrap();
    let expected = gaussian(&grid, 4.0).scale(Complex64::new(2f64.sqrt(), 0.0));
    assert!(max_abs_diff(&g, &expected) < 1e-8);
    let h = rescale_apply(&scalar(0.6), &random_chirp(&mut ChaCha8Rng::seed_from_u64(2), 1).sample(&grid).unwrap())
        .unwrap();
    let src = random_chirp(&mut ChaCha8Rng::seed_from_u64(2), 1).sample(&grid).unwrap();
    assert!((h.l2_norm() - src.l2_norm()).abs() < 1e-8);
    let exact = rescale_apply(&scalar(2.0), &GaussianChirp::standard(1)).unwrap();
    assert!((exact.m()[(0, 0)] - Complex64::new(0.0, 4.0)).norm() < 1e-15);
    assert!((exact.gamma() - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);
}

#[test]
fn multiplier_examples() {
    let grid = Grid::self_dual(1, 256).unwrap();
    let f = random_chirp(&mut ChaCha8Rng::seed_from_u64(3), 1).sample(&grid).unwrap();
    assert_eq!(multiplier_apply(&scalar(0.0), &f).unwrap().values(), f.values());

    for k in [-1.2, 0.4, 2.0] {
        let j = SymplecticMatrix::standard_j(1);
        let conj = &(&j.inverse() * &v_lower(&scalar(-k)).unwrap()) * &j;
        assert_eq!(conj.entries(), v_upper(&scalar(k)).unwrap().entries());
    }

    // (𝔪_P f)(x) = |P|^{-1/2} e^{-iπ sgn(P)/4} ∫ e^{iπ(x-t)²/P} f(t) dt
    let p = 1.5;
    let g = gaussian(&grid, 1.0);
    let h = grid.step();
    let pts = grid.points();
    let direct: Vec<Complex64> = pts
        .iter()
        .map(|&x| {
            let s: Complex64 = pts
                .iter()
                .zip(g.values())
                .map(|(&t, v)| v * Complex64::from_polar(1.0, PI * (x - t) * (x - t) / p))
                .sum();
            s * h * Complex64::from_polar(p.abs().powf(-0.5), -PI / 4.0)
        })
        .collect();
    let direct = GridFunction::new(grid, direct).unwrap();
    let piped = multiplier_apply(&scalar(p), &g).unwrap();
    assert!(phase_align_distance(&piped, &direct).unwrap() < 1e-6);
}

#[test]
fn pipeline_examples() {
    let grid = Grid::self_dual(1, 256).unwrap();
    let j = dj_factorize(&SymplecticMatrix::standard_j(1), INVERTIBILITY_RTOL).unwrap();
    let g = GaussianChirp::standard(1).sample(&grid).unwrap();
    assert!(max_abs_diff(&apply_metaplectic(&j, &g).unwrap(), &g) < 1e-12);

    let (a, c) = (1.6, -0.45);
    let s = SymplecticMatrix::new(Mat::from_row_slice(2, 2, &[a, 0.0, c, 1.0 / a])).unwrap();
    let f = random_chirp(&mut ChaCha8Rng::seed_from_u64(4), 1);
    let out = apply_metaplectic(&dj_factorize(&s, INVERTIBILITY_RTOL).unwrap(), &f.sample(&grid).unwrap()).unwrap();
    let expected = GridFunction::from_fn(grid, |t| {
        Complex64::from_polar(a.abs().powf(-0.5), PI * c / a * t[0] * t[0]) * f.eval(&[t[0] / a])
    });
    assert!(max_abs_diff(&out, &expected) < 1e-9);
}

#[test]
fn direct_quadrature_examples() {
    let grid = Grid::self_dual(1, 256).unwrap();
    let f = random_chirp(&mut ChaCha8Rng::seed_from_u64(5), 1);
    let fs = f.sample(&grid).unwrap();
    let j = SymplecticMatrix::standard_j(1);
    let ft = partial_ft(&IndexSet::full(1), &fs);
    assert!(phase_align_distance(&free_apply_direct(&j, &fs).unwrap(), &ft).unwrap() < 1e-9);

    for seed in 0..10 {
        let s = random_free(seed, 1).unwrap();
        let direct = free_apply_direct(&s, &fs).unwrap();
        let exact = gaussian_apply(&s, &f).unwrap().sample(&grid).unwrap();
        assert!(phase_align_distance(&direct, &exact).unwrap() < 1e-6, "seed {seed}");
        assert!((direct.l2_norm() / fs.l2_norm() - 1.0).abs() < 1e-5);
    }
    assert!(free_apply_direct(&SymplecticMatrix::identity(1), &fs).is_err());
}

#[test]
fn gaussian_examples() {
    let g = GaussianChirp::standard(1);
    let out = gaussian_apply(&SymplecticMatrix::standard_j(1), &g).unwrap();
    assert!((out.m()[(0, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    assert!((out.gamma().norm() - 1.0).abs() < 1e-14);
}

#[test]
fn shift_examples() {
    let grid = Grid::self_dual(1, 256).unwrap();
    let f = random_chirp(&mut ChaCha8Rng::seed_from_u64(6), 1);
    let fs = f.sample(&grid).unwrap();
    assert!(max_abs_diff(&tf_shift(&[0.0], &[0.0], 0.0, &fs).unwrap(), &fs) < 1e-12);
    let moved = tf_shift(&[0.37], &[0.0], 0.0, &fs).unwrap();
    let expected = GridFunction::from_fn(grid, |t| f.eval(&[t[0] - 0.37]));
    assert!(max_abs_diff(&moved, &expected) < 1e-9);
    let full = tf_shift(&[-0.8], &[1.1], 0.25, &fs).unwrap();
    assert!((full.l2_norm() - fs.l2_norm()).abs() < 1e-10);
}

#[test]
fn stft_moyal() {
    let grid = Grid::self_dual(1, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (f, g) = (random_chirp(&mut rng, 1).sample(&grid).unwrap(), random_chirp(&mut rng, 1).sample(&grid).unwrap());
    let v = stft(&g, &f).unwrap();
    assert!((v.l2_norm() / (f.l2_norm() * g.l2_norm()) - 1.0).abs() < 1e-6);
}

#[test]
fn phase_alignment_examples() {
    let grid = Grid::self_dual(1, 64).unwrap();
    let f = random_chirp(&mut ChaCha8Rng::seed_from_u64(8), 1).sample(&grid).unwrap();
    assert!(phase_align_distance(&f, &f).unwrap() < 1e-15);
    assert!(phase_align_distance(&f, &f.scale(Complex64::new(-1.0, 0.0))).unwrap() < 1e-15);
    let noise = GridFunction::from_fn(grid, |x| Complex64::new((3.0 * x[0]).sin(), 0.0) * (-x[0] * x[0]).exp());
    let eps = 1e-4;
    let perturbed = GridFunction::new(
        grid,
        f.values().iter().zip(noise.values()).map(|(a, b)| a * Complex64::i() + b * eps).collect(),
    )
    .unwrap();
    let (c, dist) = phase_align(&perturbed, &f).unwrap();
    assert!((c - Complex64::i()).norm() < 1e-3);
    assert!((dist - eps * noise.l2_norm() / f.l2_norm()).abs() < 0.5 * eps * noise.l2_norm() / f.l2_norm());
    assert!(phase_align(&f, &GridFunction::zeros(grid)).is_err());
    assert!(PhaseTolerance::new(0.0).is_err());
    assert!(PhaseTolerance::new(1e-6).unwrap().accepts(&f, &f.scale(Complex64::i())).unwrap());
}
