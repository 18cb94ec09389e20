use distwarm::distributions::quantile_series;
use distwarm::warming::{
    amplification_test, classify_typology, dominance_test, run_pipeline, typology_evidence,
    AmplificationMode, Period, PipelineConfig, QuantileFamily, QuantileSeries, Region,
    DEFAULT_TAUS,
};
use distwarm::{AnnualSample, AnnualSample32, DominanceVerdict, Error, TypologyLabel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// `n` draws per year of `a + b t + (1 + g t) z`, `t = 0..years`.
fn panel(
    seed: u64,
    first: i32,
    years: usize,
    n: usize,
    a: f64,
    b: f64,
    g: f64,
) -> Vec<AnnualSample<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..years)
        .map(|t| {
            let t = t as f64;
            let values = (0..n)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    a + b * t + (1.0 + g * t) * z
                })
                .collect();
            AnnualSample::new(first + t as i32, values).unwrap()
        })
        .collect()
}

#[test]
fn amplification_of_a_series_on_itself() {
    let samples = panel(1, 1950, 70, 200, 14.0, 0.02, 0.0);
    for tau in DEFAULT_TAUS {
        let q = quantile_series(&samples, tau).unwrap();
        let r = amplification_test(&q, &q, AmplificationMode::Inner, None).unwrap();
        assert!(
            (r.slope_on_mean - 1.0).abs() < 1e-12,
            "{tau}: {}",
            r.slope_on_mean
        );
        assert!(r.p_one_sided >= 0.5);
    }
}

#[test]
fn dominance_of_a_region_over_itself_is_none() {
    let samples = panel(2, 1950, 60, 200, 14.0, 0.02, 0.002);
    let q = QuantileSeries::from_samples(&samples, &DEFAULT_TAUS).unwrap();
    let r = dominance_test(&q, &q, 0.10, None).unwrap();
    assert_eq!(r.verdict, DominanceVerdict::None);
    assert_eq!(r.rows.len(), 11);
}

#[test]
fn mixed_tails_give_a_partial_verdict() {
    // A widens and B narrows with equal means: A gains in the upper tail only
    let a = panel(3, 1950, 60, 400, 14.0, 0.0, 0.01);
    let b = panel(4, 1950, 60, 400, 14.0, 0.0, -0.005);
    let qa = QuantileSeries::from_samples(&a, &DEFAULT_TAUS).unwrap();
    let qb = QuantileSeries::from_samples(&b, &DEFAULT_TAUS).unwrap();
    let ab = dominance_test(&qa, &qb, 0.05, None).unwrap();
    assert_eq!(ab.verdict, DominanceVerdict::PartialAUpper);
    let ba = dominance_test(&qb, &qa, 0.05, None).unwrap();
    assert_eq!(ba.verdict, DominanceVerdict::PartialBUpper);
}

#[test]
fn grid_mismatch_is_an_error() {
    let a = panel(5, 1950, 30, 50, 0.0, 0.0, 0.0);
    let qa = QuantileSeries::from_samples(&a, &DEFAULT_TAUS).unwrap();
    let qb = QuantileSeries::from_samples(&a, &[0.25, 0.5, 0.75]).unwrap();
    assert!(matches!(
        dominance_test(&qa, &qb, 0.1, None),
        Err(Error::Misaligned(_))
    ));
}

#[test]
fn clear_shapes_are_classified() {
    let cases = [
        (0.0, 0.0, TypologyLabel::W0),
        (0.03, -0.005, TypologyLabel::W2),
        (0.03, 0.005, TypologyLabel::W3),
    ];
    for (i, (b, g, want)) in cases.into_iter().enumerate() {
        let samples = panel(10 + i as u64, 1950, 70, 360, 14.0, b, g);
        let ev = typology_evidence(&samples, &DEFAULT_TAUS, None).unwrap();
        let v = classify_typology(ev, 0.01, QuantileFamily::Bonferroni);
        assert_eq!(v.label, want, "case {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn typology_ignores_a_common_shift(seed in 0u64..1000, shift in -20.0f64..20.0, g in -0.01f64..0.01) {
        let samples = panel(seed, 1950, 40, 120, 10.0, 0.02, g);
        let shifted: Vec<_> = samples.iter().map(|s| s.map(|v| v + shift).unwrap()).collect();
        let a = classify_typology(typology_evidence(&samples, &DEFAULT_TAUS, None).unwrap(), 0.1, QuantileFamily::PerTest);
        let b = classify_typology(typology_evidence(&shifted, &DEFAULT_TAUS, None).unwrap(), 0.1, QuantileFamily::PerTest);
        prop_assert_eq!(a.label, b.label);
        prop_assert_eq!(a.low_confidence, b.low_confidence);
    }
}

#[test]
fn pipeline_with_reference_over_two_periods() {
    let region = panel(20, 1950, 70, 360, 14.0, 0.03, 0.005);
    let reference = panel(21, 1950, 70, 360, 13.0, 0.02, 0.0);
    let config = PipelineConfig {
        periods: vec![
            Period::new(1950, 2019).unwrap(),
            Period::new(1970, 2019).unwrap(),
        ],
        split_year: Some(1990),
        ..PipelineConfig::default()
    };
    let report = run_pipeline(
        Region {
            name: "south",
            samples: &region,
        },
        Some(Region {
            name: "world",
            samples: &reference,
        }),
        &config,
    )
    .unwrap();
    assert_eq!(report.reference.as_deref(), Some("world"));
    let path = report.typology_path();
    assert_eq!(path.len(), 2);
    assert_eq!(path[0].0.to_string(), "1950-2019");
    for p in &report.periods {
        assert_eq!(p.trends.len(), 19);
        assert_eq!(p.quantile_trends.len(), 11);
        assert_eq!(p.cotrend.len(), 7);
        assert_eq!(p.spacing.len(), 4);
        assert!(!p.adf.is_empty());
        assert!(!p.acceleration.is_empty());
        let inner = p
            .amplification
            .iter()
            .filter(|a| a.mode == AmplificationMode::Inner)
            .count();
        let outer = p
            .amplification
            .iter()
            .filter(|a| a.mode == AmplificationMode::Outer)
            .count();
        assert_eq!((inner, outer), (11, 11));
        assert!(p.dominance.is_some());
    }
    assert_eq!(report.periods[0].years, 70);
    assert_eq!(report.periods[1].years, 50);
    // widening with a faster mean: W3, and the region dominates the reference
    assert_eq!(path[0].1, TypologyLabel::W3);
    let dom = report.periods[0].dominance.as_ref().unwrap();
    assert_eq!(dom.verdict, DominanceVerdict::ADominates);
}

#[test]
fn pipeline_without_reference() {
    let region = panel(22, 1950, 40, 100, 14.0, 0.02, 0.0);
    let report = run_pipeline(
        Region {
            name: "x",
            samples: &region,
        },
        None,
        &PipelineConfig::default(),
    )
    .unwrap();
    assert_eq!(report.periods.len(), 1);
    let p = &report.periods[0];
    assert!(p.dominance.is_none());
    assert!(p.acceleration.is_empty());
    assert!(p
        .amplification
        .iter()
        .all(|a| a.mode == AmplificationMode::Inner));
}

#[test]
fn pipeline_rejects_bad_periods() {
    let region = panel(23, 1950, 40, 50, 14.0, 0.0, 0.0);
    let r = Region {
        name: "x",
        samples: &region,
    };
    let short = PipelineConfig {
        periods: vec![Period::new(1980, 1985).unwrap()],
        ..PipelineConfig::default()
    };
    assert!(run_pipeline(r, None, &short).is_err());
    let outside = PipelineConfig {
        periods: vec![Period::new(1940, 1989).unwrap()],
        ..PipelineConfig::default()
    };
    let err = run_pipeline(r, None, &outside).unwrap_err();
    assert!(err.to_string().contains("outside data range"), "{err}");
    let bad_level = PipelineConfig {
        level: 1.5,
        ..PipelineConfig::default()
    };
    assert!(run_pipeline(r, None, &bad_level).is_err());
    assert!(Period::new(2000, 1990).is_err());
    assert!("1950-".parse::<Period>().is_err());
}

#[test]
fn f32_pipeline_agrees_with_f64() {
    let region = panel(24, 1950, 50, 200, 14.0, 0.03, 0.004);
    let single: Vec<AnnualSample32> = region.iter().map(|s| s.cast()).collect();
    let config = PipelineConfig::default();
    let r64 = run_pipeline(
        Region {
            name: "x",
            samples: &region,
        },
        None,
        &config,
    )
    .unwrap();
    let r32 = run_pipeline(
        Region {
            name: "x",
            samples: &single,
        },
        None,
        &config,
    )
    .unwrap();
    for (a, b) in r64.periods[0].trends.iter().zip(&r32.periods[0].trends) {
        assert_eq!(a.name, b.name);
        let tol = 1e-3 * (1.0 + a.trend.beta.abs());
        assert!(
            (a.trend.beta - b.trend.beta as f64).abs() < tol,
            "{}",
            a.name
        );
    }
    assert_eq!(r64.typology_path()[0].1, r32.typology_path()[0].1);
}
