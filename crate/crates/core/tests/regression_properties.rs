#![allow(clippy::needless_range_loop)]

use barstress::regress::{
    aic, fit_4pl, fit_quartic, r_squared, FitOptions, FitResult, FourPl, Model,
};
use barstress::synth::{synth_bar_trajectory, TrajectorySpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

/// Least-squares quartic from the normal equations in exact rational arithmetic.
fn rational_quartic(points: &[(f64, f64)]) -> [f64; 5] {
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); 6]; 5];
    for &(x, y) in points {
        let x = exact(x);
        let y = exact(y);
        let mut pw = vec![BigRational::from_integer(BigInt::from(1))];
        for k in 1..9 {
            let next = &pw[k - 1] * &x;
            pw.push(next);
        }
        for i in 0..5 {
            for j in 0..5 {
                m[i][j] += &pw[i + j];
            }
            m[i][5] += &pw[i] * &y;
        }
    }
    for col in 0..5 {
        let pivot = (col..5).find(|&r| !m[r][col].is_zero()).expect("non-singular");
        m.swap(col, pivot);
        for r in 0..5 {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..6 {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    std::array::from_fn(|i| (&m[i][5] / &m[i][i]).to_f64().unwrap())
}

fn quartic_of(fit: &FitResult<f64>) -> [f64; 5] {
    match fit.model {
        Model::Quartic(q) => q.coefficients,
        _ => unreachable!(),
    }
}

fn four_pl_of(fit: &FitResult<f64>) -> FourPl<f64> {
    match fit.model {
        Model::FourPl(m) => m,
        _ => unreachable!(),
    }
}

#[test]
fn quartic_matches_exact_normal_equations_on_published_series() {
    let pts = [(0.0, 0.701), (15.0, 0.729), (30.0, 0.874), (45.0, 1.297), (60.0, 1.541)];
    let got = quartic_of(&fit_quartic(&pts).unwrap());
    let want = rational_quartic(&pts);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-8 * w.abs());
    }
}

fn distinct_xs(gaps: &[f64]) -> Vec<f64> {
    gaps.iter()
        .scan(0.0, |acc, g| {
            *acc += g;
            Some(*acc)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn quartic_matches_exact_oracle(
        gaps in prop::collection::vec(1.0f64..8.0, 5..12),
        ys in prop::collection::vec(-10.0f64..10.0, 12),
    ) {
        let xs = distinct_xs(&gaps);
        prop_assume!(xs.last().copied().unwrap_or(0.0) <= 60.0);
        let pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
        let got = quartic_of(&fit_quartic(&pts).unwrap());
        let want = rational_quartic(&pts);
        // compare in the basis scaled to [0, 1] so every degree carries equal weight
        let s = xs.iter().fold(0.0f64, |m, x| m.max(*x));
        let scaled = |c: &[f64; 5]| -> Vec<f64> { c.iter().enumerate().map(|(k, v)| v * s.powi(k as i32)).collect() };
        let (g, w) = (scaled(&got), scaled(&want));
        let norm = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in g.iter().zip(&w) {
            prop_assert!((a - b).abs() <= 1e-8 * norm);
        }
    }

    #[test]
    fn r_squared_is_scale_invariant(
        ys in prop::collection::vec(-5.0f64..5.0, 3..20),
        noise in prop::collection::vec(-0.5f64..0.5, 20),
        k in 1e-3f64..1e3,
    ) {
        let preds: Vec<f64> = ys.iter().zip(&noise).map(|(y, e)| y + e).collect();
        let r0 = r_squared(&ys, &preds);
        prop_assume!(r0.is_ok());
        let ys_k: Vec<f64> = ys.iter().map(|v| v * k).collect();
        let preds_k: Vec<f64> = preds.iter().map(|v| v * k).collect();
        let r0 = r0.unwrap();
        let r1 = r_squared(&ys_k, &preds_k).unwrap();
        prop_assert!((r0 - r1).abs() <= 1e-12 * r0.abs().max(1.0));
        prop_assert!(r1 <= 1.0);
    }

    #[test]
    fn aic_penalty_is_two_per_parameter(rss in 1e-8f64..1e3, n in 1usize..200, k in 1usize..10) {
        let d = aic(rss, n, k + 1).unwrap() - aic(rss, n, k).unwrap();
        prop_assert!((d - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn four_pl_is_equivariant_in_x_scale(
        a in 0.5f64..1.0,
        span in 0.5f64..2.0,
        b in 1.5f64..6.0,
        c in 15.0f64..45.0,
        s in 0.2f64..5.0,
    ) {
        let truth = FourPl::new(a, b, c, a + span);
        let wobble = [0.004, -0.003, 0.002, -0.004, 0.001, 0.003, -0.002, 0.0, -0.001, 0.002, -0.003, 0.004, -0.002];
        let pts: Vec<(f64, f64)> = (0..13)
            .map(|i| {
                let x = i as f64 * 5.0;
                (x, truth.eval(x).unwrap() + wobble[i])
            })
            .collect();
        let stretched: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x * s, y)).collect();
        let opts = FitOptions::default();
        let f0 = fit_4pl(&pts, &opts).unwrap();
        let f1 = fit_4pl(&stretched, &opts).unwrap();
        let (m0, m1) = (four_pl_of(&f0), four_pl_of(&f1));
        prop_assert!((m1.c - s * m0.c).abs() <= 1e-6 * s * m0.c);
        prop_assert!((m1.b - m0.b).abs() <= 1e-6 * m0.b);
        prop_assert!((f1.rss - f0.rss).abs() <= 1e-9);
    }

    #[test]
    fn more_starts_never_worsen_the_fit(ys in prop::collection::vec(0.5f64..2.5, 6), extra in 2usize..24) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64 * 3.0, y)).collect();
        let one = fit_4pl(&pts, &FitOptions { multistart_count: 1, ..FitOptions::default() }).unwrap();
        let many = fit_4pl(&pts, &FitOptions { multistart_count: extra, ..FitOptions::default() }).unwrap();
        prop_assert!(many.rss <= one.rss);
        prop_assert!(many.rss >= 0.0 && many.r_squared <= 1.0);
    }
}

#[test]
fn noisy_trajectories_recover_the_generator() {
    let truth = FourPl::new(0.7, 3.0, 30.0, 2.4);
    let times: Vec<f64> = (0..13).map(|i| i as f64 * 5.0).collect();
    let fits: Vec<FourPl<f64>> = (0..100)
        .map(|seed| {
            let pts = synth_bar_trajectory(&TrajectorySpec {
                model: Model::FourPl(truth),
                times: times.clone(),
                sigma: 0.01,
                seed,
            })
            .unwrap();
            four_pl_of(&fit_4pl(&pts, &FitOptions::default()).unwrap())
        })
        .collect();
    let params = |m: &FourPl<f64>| [m.a, m.b, m.c, m.d];
    let want = params(&truth);
    for p in 0..4 {
        let est: Vec<f64> = fits.iter().map(|m| params(m)[p]).collect();
        let mean = est.iter().sum::<f64>() / est.len() as f64;
        let sd = (est.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (est.len() - 1) as f64).sqrt();
        let inside = est.iter().filter(|v| (*v - want[p]).abs() <= 3.0 * sd).count();
        assert!(inside >= 95, "parameter {p}: {inside}/100 within 3 sd");
        assert!((mean - want[p]).abs() <= 3.0 * sd / 10.0, "parameter {p}: bias {}", mean - want[p]);
    }
}

#[test]
fn noiseless_published_model_reproduces_published_residuals() {
    let model = FourPl::new(0.7113, 5.0082, 41.0507, 1.6653);
    let times = vec![0.0, 15.0, 30.0, 45.0, 60.0];
    let observed: [f64; 5] = [0.701, 0.729, 0.874, 1.297, 1.541];
    let pts = synth_bar_trajectory(&TrajectorySpec {
        model: Model::FourPl(model),
        times,
        sigma: 0.0,
        seed: 0,
    })
    .unwrap();
    let rss: f64 = pts.iter().zip(&observed).map(|((_, y), o)| (y - o).powi(2)).sum();
    approx::assert_abs_diff_eq!(rss, 2.4e-4, epsilon = 0.2e-4);
}

