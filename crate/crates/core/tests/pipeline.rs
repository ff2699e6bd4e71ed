//! End-to-end use of the library through files: space and trials on disk,
//! analysis, a sweep, and the CSV/SVG round trip.

use cped_core::bench::{generate, sweep_sets};
use cped_core::report::{read_csv, render_svg, write_csv};
use cped_core::space::trials_to_jsonl;
use cped_core::{
    analyze, apply_filtering, load_trials, parse_space, ChartSpec, EstimatorConfig, Extension,
    Method, QuantilePair, SyntheticObjective,
};

#[test]
fn files_to_report() {
    let dir = tempfile::tempdir().unwrap();
    let generated = generate(SyntheticObjective::ActivationDisjoint, 400, 3).unwrap();
    let space_path = dir.path().join("space.json");
    let trials_path = dir.path().join("trials.jsonl");
    std::fs::write(&space_path, generated.space().to_json()).unwrap();
    std::fs::write(&trials_path, trials_to_jsonl(&generated)).unwrap();

    let space = parse_space(&std::fs::read_to_string(&space_path).unwrap()).unwrap();
    let set = load_trials(&trials_path, &space).unwrap();
    assert_eq!(set.len(), 400);

    let q = QuantilePair::new(1.0, 0.5).unwrap();
    let config = EstimatorConfig::default();
    let report = analyze(&set, q, Method::Cped, None, &config).unwrap();
    let best = report
        .normalized
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert_eq!(best.0, "c");
    assert!((report.normalized.values().sum::<f64>() - 1.0).abs() < 1e-9);

    // Loading from disk must not change the analysis.
    let direct = analyze(&generated, q, Method::Cped, None, &config).unwrap();
    assert_eq!(direct.raw, report.raw);
}

#[test]
fn every_method_on_the_same_trials() {
    let set = generate(SyntheticObjective::RegimeDomains, 300, 1).unwrap();
    let q = QuantilePair::new(0.75, 0.1).unwrap();
    let config = EstimatorConfig::default();
    for (method, extension) in [
        (Method::Cped, None),
        (Method::Standard, None),
        (Method::NaiveWithin, None),
        (Method::Ped, Some(Extension::Filtering)),
        (Method::Ped, Some(Extension::Imputation)),
        (Method::Ped, Some(Extension::Expansion)),
    ] {
        let report = analyze(&set, q, method, extension, &config).unwrap();
        assert_eq!(report.normalized.len(), 3, "{method} {extension:?}");
        assert!(report.raw.values().all(|v| *v >= 0.0));
    }
    assert!(analyze(&set, q, Method::Ped, None, &config).is_err());

    // With inactive children, expansion is refused and filtering drops trials.
    let gated = generate(SyntheticObjective::ActivationDisjoint, 300, 1).unwrap();
    assert!(analyze(&gated, q, Method::Ped, Some(Extension::Expansion), &config).is_err());
    let filtered = apply_filtering(&gated, "x").unwrap();
    assert!(filtered.evalset.len() < gated.len());
}

#[test]
fn sweep_survives_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sets: Vec<_> = (0..2)
        .map(|seed| {
            (
                seed,
                generate(SyntheticObjective::ActivationOverlap, 200, seed).unwrap(),
            )
        })
        .collect();
    let result = sweep_sets(
        &sets,
        1.0,
        0.1,
        Method::Cped,
        None,
        EstimatorConfig::default(),
        false,
    )
    .unwrap();
    assert_eq!(result.rows.len(), 9 * 3);

    let path = dir.path().join("sweep.csv");
    write_csv(&result, &path).unwrap();
    let back = read_csv(&path).unwrap();
    let spec = ChartSpec::for_result(&back, false);
    let svg = render_svg(&back, &spec).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));

    // The CSV is a fixed point: writing what was read gives the same bytes.
    let again = dir.path().join("again.csv");
    write_csv(&back, &again).unwrap();
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&again).unwrap()
    );
}
