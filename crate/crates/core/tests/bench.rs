use pcn_qst::bench::{
    chain_seed, emit_report, run_convergence_study, run_timing_study, BoxStats, ConvergenceConfig, ConvergenceReport,
    ReportFormat, StudyData, TimingConfig, TimingReport,
};
use pcn_qst::inference::{pcn_chain, posterior_expectation, LikelihoodKind, PriorConfig, SamplerConfig, Sigma2Rule};
use pcn_qst::states::fidelity;
use pcn_qst::Error;
use proptest::prelude::*;

fn small_config() -> ConvergenceConfig {
    ConvergenceConfig {
        retained: 64,
        thins: vec![1, 2, 4],
        chains: 5,
        ..Default::default()
    }
}

#[test]
fn csv_and_json_emission() {
    let report = run_convergence_study(&small_config()).unwrap();
    assert_eq!(report.records.len(), 15);
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("conv.csv");
    let written = emit_report(&report, &csv, ReportFormat::Csv).unwrap();
    assert_eq!(written, vec![csv.clone(), dir.path().join("conv.summary.csv")]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), report.records.len() + 1);
    assert_eq!(
        text.lines().next().unwrap(),
        "thin,chain,seed,mean_fidelity,delta_fidelity,acceptance_rate,density_evals,sampling_evals,wall_seconds"
    );
    let summary = std::fs::read_to_string(&written[1]).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 3);

    let again = dir.path().join("again.csv");
    emit_report(&report, &again, ReportFormat::Csv).unwrap();
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());

    let json = dir.path().join("conv.json");
    assert_eq!(
        emit_report(&report, &json, ReportFormat::Json).unwrap(),
        vec![json.clone()]
    );
    let back: ConvergenceReport = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn studies_are_reproducible_apart_from_wall_time() {
    let a = run_convergence_study(&small_config()).unwrap();
    let b = run_convergence_study(&small_config()).unwrap();
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(
            (x.mean_fidelity, x.delta_fidelity, x.density_evals),
            (y.mean_fidelity, y.delta_fidelity, y.density_evals)
        );
    }
}

#[test]
fn permuting_chains_leaves_summaries_unchanged() {
    let report = run_convergence_study(&small_config()).unwrap();
    let mut records = report.records.clone();
    records.reverse();
    records.rotate_left(4);
    let permuted = ConvergenceReport::from_records(report.config.clone(), report.true_fidelity, records).unwrap();
    assert_eq!(permuted.summaries, report.summaries);
}

#[test]
fn unit_thinning_reproduces_independent_runs() {
    let cfg = ConvergenceConfig {
        retained: 128,
        thins: vec![1],
        chains: 4,
        ..Default::default()
    };
    let report = run_convergence_study(&cfg).unwrap();
    let data = StudyData::simulate(cfg.d, cfg.lambda, cfg.shots_per_setting, cfg.data_seed).unwrap();
    let lik = data.likelihood(LikelihoodKind::Full, Sigma2Rule::InverseN).unwrap();
    let prior = PriorConfig::new(1.0, 4).unwrap();
    for rec in &report.records {
        assert_eq!(rec.seed, chain_seed(cfg.seed, rec.chain));
        let sc = SamplerConfig {
            retained: 128,
            thin: 1,
            burn_in: cfg.burn_in,
            seed: rec.seed,
            ..Default::default()
        };
        let chain = pcn_chain(&prior, &lik, &sc).unwrap();
        let (f, df) = posterior_expectation(&chain, |rho| fidelity(rho, &data.target).unwrap()).unwrap();
        assert_eq!((f, df), (rec.mean_fidelity, rec.delta_fidelity));
    }
    let seeds: std::collections::BTreeSet<u64> = report.records.iter().map(|r| r.seed).collect();
    assert_eq!(seeds.len(), 4);
}

#[test]
fn delta_fidelity_medians_fall_with_thinning() {
    let cfg = ConvergenceConfig {
        thins: (0..5).map(|k| 1 << k).collect(),
        chains: 10,
        ..Default::default()
    };
    let report = run_convergence_study(&cfg).unwrap();
    let medians: Vec<f64> = report.summaries.iter().map(|s| s.delta_fidelity.median).collect();
    for w in medians.windows(2) {
        assert!(w[1] <= w[0] * 1.05, "{medians:?}");
    }
    assert!(medians[4] < 0.5 * medians[0], "{medians:?}");
    let costs: Vec<f64> = report.summaries.iter().map(|s| s.cost).collect();
    assert!(costs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn timing_rows_and_ratios() {
    let cfg = TimingConfig {
        ds: vec![2, 3],
        retained: 256,
        burn_in: 64,
        ..Default::default()
    };
    let report = run_timing_study(&cfg).unwrap();
    assert_eq!(report.rows.len(), 4);
    assert_eq!(report.ratios.len(), 2);
    for row in &report.rows {
        assert_eq!(row.evals_per_proposal, 1.0);
        assert_eq!(row.samples, 256);
        assert!(row.mean_sample_seconds > 0.0);
    }
    assert!(report.ratios[0].ops_ratio < report.ratios[1].ops_ratio);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let written = emit_report(&report, &path, ReportFormat::Csv).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 5);
    assert_eq!(
        std::fs::read_to_string(&written[1]).unwrap().lines().next().unwrap(),
        "d,time_ratio,ops_ratio"
    );
    let json = dir.path().join("t.json");
    emit_report(&report, &json, ReportFormat::Json).unwrap();
    let back: TimingReport = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn invalid_study_configs() {
    assert!(matches!(
        run_timing_study(&TimingConfig {
            ds: vec![4],
            ..Default::default()
        }),
        Err(Error::UnsupportedDimension(4))
    ));
    assert!(run_convergence_study(&ConvergenceConfig {
        chains: 0,
        ..small_config()
    })
    .is_err());
    assert!(run_convergence_study(&ConvergenceConfig {
        thins: vec![],
        ..small_config()
    })
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn box_stats_are_ordered(mut values in prop::collection::vec(-10.0f64..10.0, 1..60)) {
        let s = BoxStats::of(&values).unwrap();
        prop_assert!(s.min <= s.lower_whisker && s.lower_whisker <= s.q1);
        prop_assert!(s.q1 <= s.median && s.median <= s.q3);
        prop_assert!(s.q3 <= s.upper_whisker && s.upper_whisker <= s.max);
        let iqr = s.q3 - s.q1;
        prop_assert!(s.lower_whisker >= s.q1 - 1.5 * iqr - 1e-12);
        prop_assert!(s.upper_whisker <= s.q3 + 1.5 * iqr + 1e-12);
        values.reverse();
        prop_assert_eq!(BoxStats::of(&values).unwrap(), s);
    }
}
