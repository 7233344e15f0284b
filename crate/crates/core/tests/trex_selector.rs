use physiosel_core::linalg::Matrix;
use physiosel_core::synth::{run_fdr_experiment, Correlation, SynthSpec};
use physiosel_core::trex::{
    calibrate_and_select, da_nn_penalize, forward_path, generate_dummies, relative_occurrences, voting_grid,
    RandomExperimentResult, TrexParams, Variant,
};
use physiosel_core::Sequential;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn noise_matrix(n: usize, p: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::from_fn(n, p, |_, _| StandardNormal.sample(rng));
    for j in 0..p {
        standardize(m.col_mut(j));
    }
    m
}

fn standardize(x: &mut [f64]) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let s = (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)).sqrt();
    x.iter_mut().for_each(|v| *v = (*v - m) / s);
}

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn response_equal_to_column_three_enters_first() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = noise_matrix(80, 12, &mut rng);
    let y = x.col(3).to_vec();
    let d = generate_dummies(80, 12, 5, 0);
    let r = forward_path(&x, &d, &y, 1, 0).unwrap();
    assert_eq!(r.order[0], 3);
    // cross-check: the first entrant has the largest absolute correlation
    let best =
        (0..12).map(|j| corr(x.col(j), &y).abs()).chain((0..12).map(|j| corr(d.col(j), &y).abs())).fold(0.0, f64::max);
    assert!((corr(x.col(3), &y).abs() - best).abs() < 1e-12);
}

#[test]
fn first_entrant_is_exchangeable_under_the_null() {
    // 1000 seeds: the binomial SE is 1.6 points, so a 5-point band is 3 SEs
    let (n, p, l, reps) = (60, 15, 15, 1000);
    let mut real_first = 0;
    for s in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + s);
        let x = noise_matrix(n, p, &mut rng);
        let mut y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        standardize(&mut y);
        let d = generate_dummies(n, l, s, 0);
        let r = forward_path(&x, &d, &y, 1, 0).unwrap();
        if r.order[0] < p {
            real_first += 1;
        }
    }
    let freq = real_first as f64 / reps as f64;
    let expect = p as f64 / (p + l) as f64;
    assert!((freq - expect).abs() <= 0.05, "real-first frequency {freq}");
}

#[test]
fn full_budget_runs_until_every_dummy_entered() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = noise_matrix(200, 10, &mut rng);
    let y: Vec<f64> = (0..200)
        .map(|i| x.get(i, 0) + 0.5 * x.get(i, 1) + Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect();
    let d = generate_dummies(200, 6, 9, 2);
    let r = forward_path(&x, &d, &y, 6, 2).unwrap();
    assert!(!r.exhausted);
    assert_eq!(r.order.iter().filter(|&&j| j >= 10).count(), 6);
    assert!(*r.order.last().unwrap() >= 10);
    assert_eq!(r.termination, r.order.len());
}

#[test]
fn occurrences_are_nested_in_the_dummy_budget() {
    let results = vec![
        RandomExperimentResult { k: 0, order: vec![0, 3, 1, 4], termination: 4, exhausted: false },
        RandomExperimentResult { k: 1, order: vec![3, 2, 0, 5], termination: 4, exhausted: false },
    ];
    let t1 = relative_occurrences(&results, 3, 3, 1);
    let t2 = relative_occurrences(&results, 3, 3, 2);
    assert_eq!(t1.phi, vec![0.5, 0.0, 0.0]);
    assert_eq!(t2.phi, vec![1.0, 0.5, 0.5]);
    for j in 0..3 {
        assert!(t1.phi[j] <= t2.phi[j]);
    }
}

fn small_params(k: usize, seed: u64) -> TrexParams {
    TrexParams { k, seed, alpha_grid: vec![0.1], ..TrexParams::default() }
}

fn planted(n: usize, p: usize, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = noise_matrix(n, p, &mut rng);
    let mut y: Vec<f64> = (0..n)
        .map(|i| {
            0.6 * x.get(i, 0)
                + 0.6 * x.get(i, 5)
                + 0.6 * x.get(i, 9)
                + Distribution::<f64>::sample(&StandardNormal, &mut rng)
        })
        .collect();
    standardize(&mut y);
    (x, y)
}

#[test]
fn selection_is_deterministic() {
    let (x, y) = planted(100, 30, 1);
    let a = calibrate_and_select(&x, &y, 0.1, &small_params(30, 4), &Sequential).unwrap();
    let b = calibrate_and_select(&x, &y, 0.1, &small_params(30, 4), &Sequential).unwrap();
    assert_eq!(a, b);
    assert!(a.fdp_hat <= 0.1);
    assert!(a.selected.iter().all(|&j| a.phi_penalized[j] > a.v));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn positive_rescaling_of_the_response_keeps_the_selection(seed in 0u64..500, scale in 0.01f64..100.0) {
        let (x, y) = planted(80, 20, seed);
        let ys: Vec<f64> = y.iter().map(|v| v * scale + 3.0).collect();
        let a = calibrate_and_select(&x, &y, 0.1, &small_params(20, seed), &Sequential).unwrap();
        let b = calibrate_and_select(&x, &ys, 0.1, &small_params(20, seed), &Sequential).unwrap();
        prop_assert_eq!(a.selected, b.selected);
    }
}

proptest! {
    #[test]
    fn penalized_occurrences_never_exceed_the_raw_ones(
        phi in prop::collection::vec(0.0f64..=1.0, 2..12),
        seed in 0u64..1000,
        rho in 0.3f64..0.95,
    ) {
        let p = phi.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = noise_matrix(8, p, &mut rng);
        let mut c = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                c[i * p + j] = if i == j { 1.0 } else { corr(x.col(i), x.col(j)) };
            }
        }
        let pen = da_nn_penalize(&phi, &c, rho).unwrap();
        for j in 0..p {
            prop_assert!(pen[j] >= 0.0 && pen[j] <= phi[j]);
        }
        let mut id = vec![0.0; p * p];
        for i in 0..p {
            id[i * p + i] = 1.0;
        }
        prop_assert_eq!(da_nn_penalize(&phi, &id, rho).unwrap(), phi.clone());
        // selected-set size is nonincreasing in the voting threshold
        let grid = voting_grid(100);
        let sizes: Vec<usize> = grid.iter().map(|v| pen.iter().filter(|x| **x > *v).count()).collect();
        prop_assert!(sizes.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn identity_correlation_reduces_the_dependency_aware_variant_to_plain() {
    let n = 64;
    let p = 8;
    // Walsh columns: distinct nonzero masks give orthogonal, centred columns
    let x = Matrix::from_fn(n, p, |i, j| if (i & (j + 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 });
    let mut xs = x.clone();
    for j in 0..p {
        standardize(xs.col_mut(j));
    }
    for a in 0..p {
        for b in 0..a {
            assert!(corr(xs.col(a), xs.col(b)).abs() < 1e-12, "{a} {b}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut y: Vec<f64> =
        (0..n).map(|i| xs.get(i, 2) + 0.8 * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
    standardize(&mut y);
    let plain = TrexParams { variant: Variant::Plain, ..small_params(40, 3) };
    let da = TrexParams { variant: Variant::DaNn, ..small_params(40, 3) };
    let a = calibrate_and_select(&xs, &y, 0.1, &plain, &Sequential).unwrap();
    let b = calibrate_and_select(&xs, &y, 0.1, &da, &Sequential).unwrap();
    assert_eq!(a.selected, b.selected);
    assert_eq!(a.phi, b.phi_penalized);
}

#[test]
fn null_design_with_fifty_columns_controls_fdr() {
    let spec = SynthSpec {
        n: 100,
        p: 50,
        support: vec![],
        correlation: Correlation::Independent,
        noise_sd: 1.0,
        groups: None,
        seed: 21,
    };
    let report = run_fdr_experiment(&spec, &[0.1], &[Variant::DaNn], 100, &TrexParams::default(), &Sequential).unwrap();
    let row = &report.rows[0];
    assert!(row.fdr <= 0.1 + 0.06, "fdr {}", row.fdr);
}

#[test]
fn strong_planted_signals_among_fifty_are_recovered() {
    let spec = SynthSpec::planted(100, 50, 3, 0.5, Correlation::Independent, 22);
    let report = run_fdr_experiment(&spec, &[0.1], &[Variant::DaNn], 100, &TrexParams::default(), &Sequential).unwrap();
    let row = &report.rows[0];
    let all_three = report.outcomes.iter().filter(|o| o.tpp == 1.0).count();
    assert!(all_three >= 90, "all three recovered in {all_three} reps");
    assert!(row.fdr <= 0.16, "fdr {}", row.fdr);
}
