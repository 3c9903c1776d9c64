use heis_overdet::lab::{
    default_grid, master_grid, run_entry, run_suite, sample_group, sample_reduced, GridEntry,
    IdentityId, IdentityReport, PointRecord, SampleConfig, SuiteReport, ALL_IDENTITIES,
};
use heis_overdet::Error;
use proptest::prelude::*;

fn small() -> SampleConfig {
    SampleConfig::default().with_points(64)
}

#[test]
fn every_identity_passes_on_a_small_sample() {
    let report = run_suite(&default_grid(), &small()).unwrap();
    for r in &report.reports {
        assert!(r.pass, "{} n={} alpha={:?}: {:e}", r.identity_id, r.n, r.alpha, r.max_rel_err);
    }
    assert!(report.pass);
}

#[test]
fn grid_shapes() {
    let grid = default_grid();
    // α-free identities once per n, the rest six times; magik n ≥ 2,
    // magikuno n = 1, tordue n = 2
    let alpha_free = 2 * 4;
    let alpha_rows = 6 * (6 * 4 + 3 + 1 + 1);
    assert_eq!(grid.len(), alpha_free + alpha_rows);
    assert_eq!(master_grid().len(), 6 * (3 + 1 + 1 + 4));
    assert!(grid.iter().all(|e| e.identity.accepts(e.n)));
}

#[test]
fn perturbed_right_hand_side_fails() {
    for id in [IdentityId::Magik, IdentityId::UalphaPde, IdentityId::FundamentalSolution] {
        let mut e = GridEntry::new(id, 2, Some(2.0));
        e.rhs_perturbation = 1e-6;
        let r = run_entry(&e, &small()).unwrap();
        assert!(!r.pass, "{id} still passes with a perturbed rhs");
        assert!(r.max_rel_err > 1e-7);
        assert!(r.argmax_point.is_some());
    }
}

#[test]
fn invalid_entries_are_rejected() {
    let cfg = small();
    let bad = [
        GridEntry::new(IdentityId::Magikuno, 2, Some(2.0)),
        GridEntry::new(IdentityId::Tordue, 3, Some(2.0)),
        GridEntry::new(IdentityId::Cyln, 5, Some(2.0)),
        GridEntry::new(IdentityId::Cyln, 1, Some(0.0)),
        GridEntry::new(IdentityId::Cyln, 1, Some(4.5)),
        GridEntry::new(IdentityId::Cyln, 1, None),
    ];
    for e in &bad {
        assert!(matches!(run_entry(e, &cfg), Err(Error::InvalidInput(_))), "{e:?}");
    }
    assert!(run_entry(&GridEntry::new(IdentityId::Dhrho, 1, None), &cfg.clone().with_points(0)).is_err());
}

#[test]
fn alpha_free_identities_ignore_alpha() {
    let r = run_entry(&GridEntry::new(IdentityId::Dhrho, 2, Some(3.0)), &small()).unwrap();
    assert_eq!(r.alpha, None);
}

#[test]
fn samples_are_prefix_stable() {
    let a = SampleConfig::default().with_points(10);
    let b = SampleConfig::default().with_points(500);
    for i in 0..10 {
        assert_eq!(sample_group(&a, 2, i).0, sample_group(&b, 2, i).0);
        assert_eq!(sample_reduced(&a, 3, i).0.coords(), sample_reduced(&b, 3, i).0.coords());
    }
    let other = SampleConfig::default().with_seed(7);
    assert_ne!(sample_group(&a, 2, 0).0, sample_group(&other, 2, 0).0);
}

#[test]
fn reduced_samples_respect_the_configured_shape() {
    let cfg = SampleConfig::default();
    for i in 0..200 {
        let (p, _) = sample_reduced(&cfg, 3, i);
        let rho = p.gauge4().powf(0.25);
        assert!(rho >= cfg.rho_range.0 * (1.0 - 1e-12) && rho <= cfg.rho_range.1 * (1.0 + 1e-12));
        for s in p.s() {
            assert!(*s >= cfg.simplex_floor * p.sigma() * (1.0 - 1e-12));
        }
        let ratio = p.t() / p.sigma();
        assert!(ratio >= -5.0 - 1e-12 && ratio <= 5.0 + 1e-12);
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let grid: Vec<GridEntry> =
        master_grid().into_iter().filter(|e| e.n <= 2 && e.alpha == Some(3.9)).collect();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_suite(&grid, &small()).unwrap())
    };
    assert_eq!(run(1).to_json().unwrap(), run(4).to_json().unwrap());
}

#[test]
fn identity_ids_round_trip() {
    for id in ALL_IDENTITIES {
        assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
        assert_eq!(id.to_string(), id.as_str());
        let json = serde_json::to_string(&id).unwrap();
        assert_eq!(json, format!("\"{}\"", id.as_str()));
    }
    for bad in ["", "Magik", "magik ", "derfa"] {
        assert!(bad.parse::<IdentityId>().is_err());
    }
}

#[test]
fn tampered_reports_are_rejected() {
    let report = run_suite(&[GridEntry::new(IdentityId::Dhrho, 1, None)], &small()).unwrap();
    let json = report.to_json().unwrap();
    assert_eq!(SuiteReport::from_json(&json).unwrap(), report);
    let lying = json.replacen("\"pass\": true", "\"pass\": false", 1);
    assert!(SuiteReport::from_json(&lying).is_err());
    assert!(SuiteReport::from_json("{").is_err());
}

fn report_strategy() -> impl Strategy<Value = IdentityReport> {
    (
        prop::sample::select(ALL_IDENTITIES.to_vec()),
        1usize..=4,
        prop::option::of(0.01..4.0f64),
        any::<u64>(),
        0.0..1e-6f64,
        1e-14..1e-6f64,
        prop::collection::vec(-10.0..10.0f64, 3..9),
    )
        .prop_map(|(id, n, alpha, seed, err, tol, coords)| IdentityReport {
            identity_id: id,
            n,
            alpha,
            num_points: 1000,
            seed,
            max_rel_err: err,
            argmax_point: Some(PointRecord { kind: "group".into(), index: seed % 1000, coords }),
            pass: err <= tol,
            tolerance: tol,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn suite_report_json_round_trips(reports in prop::collection::vec(report_strategy(), 0..6)) {
        let pass = reports.iter().all(|r| r.pass);
        let suite = SuiteReport { reports, pass };
        let json = suite.to_json().unwrap();
        prop_assert_eq!(SuiteReport::from_json(&json).unwrap(), suite);
    }
}
