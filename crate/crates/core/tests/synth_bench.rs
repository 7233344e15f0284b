use physiosel_core::synth::{generate, generate_stream, run_fdr_experiment, Correlation, GroupSpec, SynthSpec};
use physiosel_core::trex::{TrexParams, Variant};
use physiosel_core::Sequential;

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

fn spec(correlation: Correlation, support: Vec<(usize, f64)>) -> SynthSpec {
    SynthSpec { n: 500, p: 30, support, correlation, noise_sd: 1.0, groups: None, seed: 8 }
}

#[test]
fn independent_columns_are_nearly_uncorrelated() {
    let d = generate(&spec(Correlation::Independent, vec![])).unwrap();
    for a in 0..30 {
        for b in 0..a {
            assert!(corr(d.x.col(a), d.x.col(b)).abs() < 0.2);
        }
    }
}

#[test]
fn ar1_neighbours_follow_rho() {
    let d = generate(&spec(Correlation::Ar1 { rho: 0.8 }, vec![])).unwrap();
    for j in 0..29 {
        let r = corr(d.x.col(j), d.x.col(j + 1));
        assert!((r - 0.8).abs() < 0.1, "column {j}: {r}");
    }
}

#[test]
fn empty_support_leaves_the_response_unrelated() {
    let d = generate(&spec(Correlation::Independent, vec![])).unwrap();
    assert!(d.truth.is_empty());
    for j in 0..30 {
        assert!(corr(d.x.col(j), &d.y).abs() < 0.2);
    }
}

#[test]
fn outputs_are_standardized_and_reproducible() {
    let mut s = spec(Correlation::Ar1 { rho: 0.5 }, vec![(2, 0.4), (7, -0.3)]);
    s.groups = Some(GroupSpec { count: 25, sd: 0.5 });
    let a = generate_stream(&s, 4).unwrap();
    let b = generate_stream(&s, 4).unwrap();
    let c = generate_stream(&s, 5).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.y, c.y);
    assert_eq!(a.truth, vec![2, 7]);
    assert_eq!(a.groups.as_ref().unwrap().iter().max(), Some(&24));
    let n = 500.0;
    let m = a.y.iter().sum::<f64>() / n;
    let v = a.y.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    assert!(m.abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut s = spec(Correlation::Ar1 { rho: 1.0 }, vec![]);
    assert!(generate(&s).is_err());
    s.correlation = Correlation::Independent;
    s.noise_sd = 0.0;
    assert!(generate(&s).is_err());
}

#[test]
fn benchmark_table_is_reproducible() {
    let s = SynthSpec {
        n: 60,
        p: 12,
        support: vec![(0, 0.6)],
        correlation: Correlation::Independent,
        noise_sd: 0.8,
        groups: None,
        seed: 3,
    };
    let params = TrexParams { k: 10, ..TrexParams::default() };
    let a = run_fdr_experiment(&s, &[0.1, 0.2], &[Variant::Plain, Variant::DaNn], 50, &params, &Sequential).unwrap();
    let b = run_fdr_experiment(&s, &[0.1, 0.2], &[Variant::Plain, Variant::DaNn], 50, &params, &Sequential).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rows.len(), 4);
    assert_eq!(a.outcomes.len(), 200);
    for r in &a.rows {
        assert!(r.fdr_se.is_finite() && r.tpr_se.is_finite());
    }
}
