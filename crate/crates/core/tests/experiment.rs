mod common;

use stratdisc::analysis::{simple_count_variance, stratified_count_variance};
use stratdisc::experiment::{
    compare_samplers, compare_samplers_with_threads, count_moments, estimate_expected_discrepancy,
    tail_integral_expectation, Method, Verdict,
};
use stratdisc::{AnchoredBox, RunConfig, SamplerKind};

#[test]
fn jittered_beats_simple_in_two_dimensions() {
    for m in [2, 3, 4] {
        let r = compare_samplers(&RunConfig::new(2, m, 2000, 1)).unwrap();
        assert_eq!(r.method, "exact");
        assert_eq!(r.verdict, Some(Verdict::Confirmed), "m={m}: {:?}", r.difference);
        let simple = r.run(SamplerKind::Simple).unwrap();
        let jit = r.run(SamplerKind::Jittered).unwrap();
        assert!(jit.summary.mean < simple.summary.mean);
    }
}

#[test]
fn null_comparison_is_calibrated() {
    let mut covered = 0;
    for seed in 0..100 {
        let mut c = RunConfig::new(2, 2, 300, 10_000 + seed);
        c.samplers = vec![SamplerKind::Simple, SamplerKind::Simple];
        let w = compare_samplers(&c).unwrap().difference.unwrap();
        if w.ci_low <= 0.0 && 0.0 <= w.ci_high {
            covered += 1;
        }
    }
    assert!(covered >= 95, "CI covered 0 in {covered}/100 trials");
}

#[test]
fn samples_are_in_range_and_tail_integral_is_the_mean() {
    for (d, m, method) in [
        (1, 5, Method::Exact),
        (2, 3, Method::Auto),
        (3, 2, Method::Cover { delta: 0.1 }),
    ] {
        let mut c = RunConfig::new(d, m, 1000, 7);
        c.method = method;
        let r = compare_samplers(&c).unwrap();
        for run in &r.runs {
            assert!(run.samples.iter().all(|x| (0.0..=1.0).contains(x)));
            let mean = run.samples.iter().sum::<f64>() / run.samples.len() as f64;
            assert!((run.summary.mean - mean).abs() <= 1e-12);
            assert!((tail_integral_expectation(&run.samples).unwrap() - mean).abs() <= 1e-12);
        }
        let w = r.difference.unwrap();
        assert!(w.ci_low <= w.ci_high);
    }
}

#[test]
fn thread_count_does_not_change_samples() {
    let c = RunConfig::new(2, 4, 200, 2718);
    let one = compare_samplers_with_threads(&c, 1).unwrap();
    let four = compare_samplers_with_threads(&c, 4).unwrap();
    for (a, b) in one.runs.iter().zip(&four.runs) {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.samples), bits(&b.samples));
    }
}

#[test]
fn estimate_uses_the_same_streams_as_compare() {
    let c = RunConfig::new(2, 3, 100, 5);
    let full = compare_samplers(&c).unwrap();
    let alone = estimate_expected_discrepancy(&c, SamplerKind::Jittered).unwrap();
    assert_eq!(alone.samples, full.run(SamplerKind::Jittered).unwrap().samples);
    let mut only_simple = c.clone();
    only_simple.samplers = vec![SamplerKind::Simple];
    assert!(estimate_expected_discrepancy(&only_simple, SamplerKind::Jittered).is_err());
}

#[test]
fn count_variances_follow_the_closed_forms() {
    let g = RunConfig::new(2, 4, 2, 0).partition().unwrap();
    let boxes = [[0.3, 0.8], [0.55, 0.55], [0.9, 0.12], [0.71, 0.33], [0.2, 0.2]];
    for (i, corner) in boxes.iter().enumerate() {
        let bx = AnchoredBox::new(corner.to_vec()).unwrap();
        let fractions = g.covered_fractions(&bx).unwrap();
        let uniform = vec![bx.volume(); 16];
        for (kind, want, probs) in [
            (SamplerKind::Jittered, stratified_count_variance(&g, &bx).unwrap(), &fractions),
            (SamplerKind::Simple, simple_count_variance(16, &bx).unwrap(), &uniform),
        ] {
            let emp = count_moments(&g, &bx, kind, 50_000, 300 + i as u64).unwrap();
            assert!(
                (emp.variance - want).abs() <= 3.0 * common::null_variance_se(probs, 50_000),
                "{kind:?} {corner:?}: {} vs {want}",
                emp.variance
            );
        }
    }
}
