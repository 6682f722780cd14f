mod support;

use std::collections::{BTreeMap, BTreeSet};

use algorec_core::eval::{
    best_threshold, f1_score, ks_p_value, ks_statistic, ks_two_sample, lower_bound_mode, macro_f1, make_split, mean, read_results,
    reduced_dataset, sweep_thresholds, write_csv, write_json, write_results, Confusion, EvalMode, GroundTruth, Label, MethodFilter,
    MetricsReport, PipelineRun, Side, SplitError, SweepOptions, CSV_COLUMNS, DEFAULT_KEEP_FRACTION, DEFAULT_THINNED, THRESHOLDS,
};
use algorec_core::structural::parse_dsl;
use algorec_core::{Algorithm, MethodRecord};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn bless() -> bool {
    std::env::var_os("ALGOREC_BLESS").is_some()
}

fn golden(name: &str, actual: &str) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if bless() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "{name} drifted");
}

fn fixture() -> (Vec<MethodRecord>, GroundTruth) {
    let records = minicorpus_records();
    let truth = minicorpus_truth(&records);
    (records, truth)
}

#[test]
fn minicorpus_jsonl_is_in_sync_with_java_tree() {
    let (records, truth) = fixture();
    let dir = fixtures_dir().join("minicorpus");
    let corpus_text: String = records
        .iter()
        .map(|r| serde_json::to_string(&r.to_line()).unwrap() + "\n")
        .collect();
    let truth_text = truth.to_jsonl();
    if bless() {
        std::fs::write(dir.join("corpus.jsonl"), &corpus_text).unwrap();
        std::fs::write(dir.join("truth.jsonl"), &truth_text).unwrap();
    }
    assert_eq!(std::fs::read_to_string(dir.join("corpus.jsonl")).unwrap(), corpus_text);
    assert_eq!(std::fs::read_to_string(dir.join("truth.jsonl")).unwrap(), truth_text);
    let loaded = GroundTruth::load(&dir.join("truth.jsonl")).unwrap();
    assert_eq!(loaded.to_jsonl(), truth_text);
}

#[test]
fn minicorpus_shape() {
    let (records, truth) = fixture();
    assert!(records.len() >= 140, "{} methods", records.len());
    for (algo, (pos, neg)) in truth.counts() {
        assert!(pos >= 10 && neg >= 10, "{algo}: {pos} positives, {neg} negatives");
    }
    assert_eq!(truth.algorithms(), Algorithm::ALL.to_vec());
    let failed: Vec<_> = records.iter().filter(|r| r.ast.is_none()).map(|r| r.method_id.as_str()).collect();
    assert_eq!(failed, ["dumps/fib_dump.txt:1:fibonacci"]);
    let unlabeled = records.iter().filter(|r| !truth.is_labeled_anywhere(&r.method_id)).count();
    assert_eq!(unlabeled, 3);
    // the signature appears exactly where the file name says it does
    for r in &records {
        if let Some((algo, _)) = label_from_path(&r.file_path) {
            if r.file_path.starts_with("dumps/") {
                continue;
            }
            let sig = stem_of(&r.file_path).contains("sig");
            assert_eq!(r.source.contains(mock_signature(algo)), sig, "{}", r.method_id);
        }
    }
}

#[test]
fn structural_exclusions_match_hand_lists() {
    let (records, truth) = fixture();
    let expected = hand_excluded(&hand_expected());
    let run = mock_run(&records, &truth, &MethodFilter::shipped_structural(), EvalMode::Standard);
    for algo in Algorithm::ALL {
        let got: BTreeSet<&str> = run
            .rows
            .iter()
            .filter(|r| r.algorithm == algo && r.excluded)
            .map(|r| stem_of(r.method_id.split(':').next().unwrap()))
            .collect();
        let want: BTreeSet<&str> = expected[&algo].iter().map(String::as_str).collect();
        assert_eq!(got, want, "{algo}");
    }
    // the unparseable snippet fails open
    let fib = run.rows.iter().find(|r| r.method_id.starts_with("dumps/")).unwrap();
    assert!(!fib.excluded);
    assert_eq!(fib.raw_score, Some(4));
}

#[test]
fn st4_confusion_matches_hand_oracle() {
    let (records, truth) = fixture();
    let expected = hand_expected();
    for (key, filter) in [("none", MethodFilter::None), ("structural", MethodFilter::shipped_structural())] {
        let report = sweep_thresholds(&mock_run(&records, &truth, &filter, EvalMode::Standard), SweepOptions::default());
        let st4 = report.at(4).unwrap();
        for algo in Algorithm::ALL {
            let want = expected_confusion(&expected["st4"][algo.id()][key]);
            assert_eq!(st4.algorithm(algo).unwrap().confusion, want, "{key} {algo}");
        }
    }
}

#[test]
fn every_threshold_matches_recount() {
    let (records, truth) = fixture();
    let excluded = hand_excluded(&hand_expected());
    let words = recall_focused_words();
    for (structural, filter) in [(false, MethodFilter::None), (true, MethodFilter::shipped_structural())] {
        for mode in [EvalMode::Standard, EvalMode::LowerBound] {
            // the hand lists only cover each algorithm's own directory
            if structural && mode == EvalMode::LowerBound {
                continue;
            }
            let report = sweep_thresholds(&mock_run(&records, &truth, &filter, mode), SweepOptions::default());
            let mut f1s = BTreeMap::new();
            for t in &report.thresholds {
                let mut per = Vec::new();
                for algo in Algorithm::ALL {
                    let want = recount(
                        &records,
                        &excluded,
                        &words,
                        algo,
                        t.threshold,
                        structural,
                        mode == EvalMode::LowerBound,
                    );
                    let got = t.algorithm(algo).unwrap();
                    assert_eq!(got.confusion, want, "{} ST {} {algo} {mode}", filter.label(), t.threshold);
                    per.push(want.f1());
                }
                let m = per.iter().sum::<f64>() / per.len() as f64;
                assert!((t.macro_f1 - m).abs() < 1e-12);
                f1s.insert(t.threshold, m);
            }
            let best = f1s.values().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!((report.best().macro_f1 - best).abs() < 1e-12);
        }
    }
}

#[test]
fn structural_lower_bound_only_adds_false_positives() {
    let (records, truth) = fixture();
    let filter = MethodFilter::shipped_structural();
    let standard = sweep_thresholds(&mock_run(&records, &truth, &filter, EvalMode::Standard), SweepOptions::default());
    let lower = sweep_thresholds(&mock_run(&records, &truth, &filter, EvalMode::LowerBound), SweepOptions::default());
    for (s, l) in standard.thresholds.iter().zip(&lower.thresholds) {
        for (a, b) in s.algorithms.iter().zip(&l.algorithms) {
            assert_eq!((a.confusion.tp, a.confusion.fn_), (b.confusion.tp, b.confusion.fn_));
            assert!(b.confusion.fp >= a.confusion.fp);
        }
    }
}

#[test]
fn reductions_and_excluded_positives_recount() {
    let (records, truth) = fixture();
    let excluded = hand_excluded(&hand_expected());
    let report = sweep_thresholds(
        &mock_run(&records, &truth, &MethodFilter::shipped_structural(), EvalMode::Standard),
        SweepOptions::default(),
    );
    let (mut ex_total, mut total) = (0usize, 0usize);
    let mut per = Vec::new();
    for algo in Algorithm::ALL {
        let n = truth.labeled(algo).count();
        let ex = excluded[&algo].len();
        let etp = excluded[&algo].iter().filter(|s| s.starts_with("pos")).count();
        assert_eq!(report.excluded_true_positives[&algo], etp, "{algo}");
        assert!((report.reduction_per_algorithm[&algo] - ex as f64 / n as f64).abs() < 1e-9);
        per.push(ex as f64 / n as f64);
        ex_total += ex;
        total += n;
    }
    assert!((report.reduction_micro - ex_total as f64 / total as f64).abs() < 1e-9);
    assert!((report.reduction_macro - per.iter().sum::<f64>() / per.len() as f64).abs() < 1e-9);

    let none = sweep_thresholds(
        &mock_run(&records, &truth, &MethodFilter::None, EvalMode::Standard),
        SweepOptions::default(),
    );
    assert_eq!(none.reduction_micro, 0.0);
    assert!(none.excluded_true_positives.values().all(|v| *v == 0));
}

#[test]
fn structural_filter_never_adds_false_positives() {
    let (records, truth) = fixture();
    let none = sweep_thresholds(
        &mock_run(&records, &truth, &MethodFilter::None, EvalMode::Standard),
        SweepOptions::default(),
    );
    let st = sweep_thresholds(
        &mock_run(&records, &truth, &MethodFilter::shipped_structural(), EvalMode::Standard),
        SweepOptions::default(),
    );
    for (a, b) in none.thresholds.iter().zip(&st.thresholds) {
        for (x, y) in a.algorithms.iter().zip(&b.algorithms) {
            assert!(y.confusion.fp <= x.confusion.fp);
            assert!(y.confusion.tp <= x.confusion.tp);
        }
    }
}

#[test]
fn confusion_conserves_population() {
    let (records, truth) = fixture();
    let counts = truth.counts();
    for mode in [EvalMode::Standard, EvalMode::LowerBound] {
        let report = sweep_thresholds(
            &mock_run(&records, &truth, &MethodFilter::shipped_structural(), mode),
            SweepOptions::default(),
        );
        for t in &report.thresholds {
            for m in &t.algorithms {
                let (pos, neg) = counts[&m.algorithm];
                assert_eq!(m.confusion.tp + m.confusion.fn_, pos);
                if mode == EvalMode::Standard {
                    assert_eq!(m.confusion.total(), pos + neg);
                } else {
                    assert!(m.confusion.fp + m.confusion.tn >= neg);
                }
            }
        }
    }
}

#[test]
fn lower_bound_adds_unlabeled_positives() {
    let (records, truth) = fixture();
    let expected = hand_expected();
    let std_run = mock_run(&records, &truth, &MethodFilter::None, EvalMode::Standard);
    let lb_run = mock_run(&records, &truth, &MethodFilter::None, EvalMode::LowerBound);
    let standard = sweep_thresholds(&std_run, SweepOptions::default());
    let lower = sweep_thresholds(&lb_run, SweepOptions::default());
    for algo in Algorithm::ALL {
        let extra = expected["lower_bound_st4_extra_fp"][algo.id()].as_u64().unwrap() as usize;
        let s = standard.at(4).unwrap().algorithm(algo).unwrap();
        let l = lower.at(4).unwrap().algorithm(algo).unwrap();
        assert_eq!(l.confusion.tp, s.confusion.tp);
        assert_eq!(l.confusion.fp, s.confusion.fp + extra, "{algo}");
        assert!(l.precision <= s.precision);
    }
    // re-scoring a standard run in lower-bound mode only sees the labeled rows
    let rescored = lower_bound_mode(&std_run, SweepOptions::default());
    assert_eq!(rescored.meta.mode, EvalMode::LowerBound);
    assert_eq!(rescored.at(4).unwrap().algorithms, standard.at(4).unwrap().algorithms);
}

#[test]
fn lower_bound_fixture_precision() {
    let dir = fixtures_dir().join("lower_bound");
    let corpus = algorec_core::code_model::load_corpus(&dir.join("corpus.jsonl")).unwrap().records;
    let truth = GroundTruth::load(&dir.join("truth.jsonl")).unwrap();
    let run = mock_run(&corpus, &truth, &MethodFilter::None, EvalMode::LowerBound);
    let m = sweep_thresholds(&run, SweepOptions::default());
    let gcd = m.at(4).unwrap().algorithm(Algorithm::Gcd).unwrap();
    assert_eq!(
        gcd.confusion,
        Confusion {
            tp: 10,
            fp: 1,
            fn_: 0,
            tn: 5
        }
    );
    assert_eq!(gcd.precision, 10.0 / 11.0);
    let standard = sweep_thresholds(
        &mock_run(&corpus, &truth, &MethodFilter::None, EvalMode::Standard),
        SweepOptions::default(),
    );
    assert_eq!(standard.at(4).unwrap().algorithm(Algorithm::Gcd).unwrap().precision, 1.0);
}

#[test]
fn pass_all_structural_filter_equals_no_filter() {
    let (records, truth) = fixture();
    let patterns = Algorithm::ALL
        .iter()
        .map(|a| parse_dsl(&format!("#algorithm: {}\n(method)\n", a.id())).unwrap())
        .collect();
    let pass_all = MethodFilter::structural("structural:pass_all", patterns).unwrap();
    let a = sweep_thresholds(&mock_run(&records, &truth, &pass_all, EvalMode::Standard), SweepOptions::default());
    let b = sweep_thresholds(
        &mock_run(&records, &truth, &MethodFilter::None, EvalMode::Standard),
        SweepOptions::default(),
    );
    assert_eq!(a.thresholds, b.thresholds);
    assert_eq!(a.reduction_micro, 0.0);
}

#[test]
fn threshold_sweep_properties() {
    sweep_property_trials(1000, 0x5eed).unwrap();
}

#[test]
fn best_threshold_ties_go_high() {
    assert_eq!(best_threshold(&[(1, 0.5), (2, 0.7), (3, 0.7), (4, 0.1)]), 3);
    assert_eq!(best_threshold(&[(1, 0.0), (2, 0.0), (3, 0.0), (4, 0.0)]), 4);
    assert_eq!(best_threshold(&[(1, 0.9), (2, 0.2), (3, 0.2), (4, 0.2)]), 1);
}

#[test]
fn macro_f1_worked_case() {
    assert_eq!(macro_f1(&[1.0, 0.5, 0.75, 0.6, 0.8, 0.9, 0.7]), 0.75);
    assert_eq!(f1_score(0.5, 1.0), 2.0 / 3.0);
    assert_eq!(f1_score(0.0, 0.0), 0.0);
    let c = Confusion {
        tp: 3,
        fp: 1,
        fn_: 2,
        tn: 4,
    };
    assert_eq!(c.precision(), 0.75);
    assert_eq!(c.recall(), 0.6);
    assert!((c.f1() - 2.0 * 0.75 * 0.6 / 1.35).abs() < 1e-15);
    assert_eq!(Confusion::default().precision(), 0.0);
}

proptest! {
    #[test]
    fn macro_f1_is_the_mean(f1s in prop::collection::vec(0.0f64..=1.0, 1..20)) {
        let m = macro_f1(&f1s);
        let naive = f1s.iter().sum::<f64>() / f1s.len() as f64;
        prop_assert!((m - naive).abs() < 1e-12);
        prop_assert_eq!(m, mean(&f1s));
        let lo = f1s.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = f1s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m >= lo - 1e-15 && m <= hi + 1e-15);
    }

    #[test]
    fn f1_between_min_and_max(tp in 0usize..50, fp in 0usize..50, fn_ in 0usize..50) {
        let c = Confusion { tp, fp, fn_, tn: 0 };
        let (p, r, f) = (c.precision(), c.recall(), c.f1());
        prop_assert!(f <= p.max(r) + 1e-15 && f >= p.min(r) - 1e-15);
    }
}

#[test]
fn ks_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let n = rng.gen_range(1..40);
        let m = rng.gen_range(1..40);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..15) as f64).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0..15) as f64).collect();
        let d = ks_statistic(&a, &b);
        assert!((d - ks_bruteforce(&a, &b)).abs() < 1e-12, "{a:?} {b:?}");
        let r = ks_two_sample(&a, &b);
        assert_eq!(r.statistic, d);
        assert!((0.0..=1.0).contains(&r.p_value));
    }
    assert_eq!(ks_statistic(&[1.0, 2.0], &[2.0, 1.0]), 0.0);
    assert_eq!(ks_statistic(&[1.0], &[2.0]), 1.0);
    assert_eq!(ks_p_value(0.01, 50, 50), 1.0);
}

#[test]
fn ks_p_value_decreases_with_distance() {
    let mut last = 1.0;
    for k in 1..=20 {
        let p = ks_p_value(k as f64 / 20.0, 60, 40);
        assert!(p <= last);
        last = p;
    }
}

#[test]
fn split_is_stratified_and_deterministic() {
    let (records, truth) = fixture();
    let a = make_split(&records, &truth, 0.7, 11).unwrap();
    let b = make_split(&records, &truth, 0.7, 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
    let c = make_split(&records, &truth, 0.7, 12).unwrap();
    assert_ne!(a.assignment, c.assignment);

    assert_eq!(a.assignment.len(), records.len());
    for algo in truth.algorithms() {
        for want in [Label::Positive, Label::Negative] {
            let ids: Vec<&str> = truth.labeled(algo).filter(|(_, l)| *l == want).map(|(id, _)| id).collect();
            let test = ids.iter().filter(|id| a.side(id) == Some(Side::Test)).count();
            let target = (0.7 * ids.len() as f64).round() as isize;
            assert!((test as isize - target).abs() <= 1, "{algo} {want}: {test} vs {target}");
        }
    }
    let test_n = a.assignment.values().filter(|s| **s == Side::Test).count();
    assert!((test_n as f64 / records.len() as f64 - 0.7).abs() < 0.05);
    assert!(a.ks.statistic >= 0.0 && a.ks.statistic <= 1.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("split.json");
    std::fs::write(&path, a.to_json()).unwrap();
    assert_eq!(algorec_core::eval::SplitSpec::load(&path).unwrap(), a);
}

#[test]
fn split_rejects_bad_input() {
    let (records, truth) = fixture();
    assert!(matches!(make_split(&records, &truth, 1.0, 0), Err(SplitError::InvalidRatio(_))));
    assert!(matches!(make_split(&records, &truth, 0.0, 0), Err(SplitError::InvalidRatio(_))));
    let mut thin = GroundTruth::new();
    thin.insert(Algorithm::Gcd, records[0].method_id.clone(), Label::Positive).unwrap();
    assert!(matches!(
        make_split(&records, &thin, 0.5, 0),
        Err(SplitError::TooFewPositives { count: 1, .. })
    ));
}

#[test]
fn split_sides_partition_results() {
    let (records, truth) = fixture();
    let split = make_split(&records, &truth, 0.7, 3).unwrap();
    let library = algorec_core::shipped::example_library();
    let backend = algorec_core::llm::MockBackend::new();
    let style = algorec_core::llm::StyleSpec::new(algorec_core::llm::StyleKind::Score);
    let filter = MethodFilter::None;
    let run = |selection| {
        let cfg = algorec_core::eval::PipelineConfig {
            filter: &filter,
            style: &style,
            library: &library,
            backend: &backend,
            batch: Default::default(),
            mode: EvalMode::Standard,
            split: Some(&split),
            selection,
            exec: Default::default(),
        };
        algorec_core::eval::run_pipeline(&records, &truth, &cfg).unwrap().run
    };
    use algorec_core::eval::SplitSelection;
    let (t, v, all) = (run(SplitSelection::Test), run(SplitSelection::Validation), run(SplitSelection::All));
    assert_eq!(t.rows.len() + v.rows.len(), all.rows.len());
    assert!(t.rows.iter().all(|r| split.side(&r.method_id) == Some(Side::Test)));
    assert!(v.rows.iter().all(|r| split.side(&r.method_id) == Some(Side::Validation)));
}

#[test]
fn reduced_dataset_thins_negatives() {
    let (records, truth) = fixture();
    let reduced = reduced_dataset(&records, &truth, None, DEFAULT_KEEP_FRACTION, &DEFAULT_THINNED, 5);
    let before = truth.counts();
    let after = reduced.truth.counts();
    for algo in Algorithm::ALL {
        let (p0, n0) = before[&algo];
        let (p1, n1) = after[&algo];
        assert_eq!(p1, p0);
        if DEFAULT_THINNED.contains(&algo) {
            assert_eq!(n1, (DEFAULT_KEEP_FRACTION * n0 as f64).round() as usize);
        } else {
            assert_eq!(n1, n0);
        }
    }
    let dropped = records.len() - reduced.corpus.len();
    let thinned_neg: usize = DEFAULT_THINNED.iter().map(|a| before[a].1 - after[a].1).sum();
    assert_eq!(dropped, thinned_neg);
    reduced.truth.validate(reduced.corpus.iter().map(|r| r.method_id.as_str())).unwrap();
    assert!(reduced.ks.is_none());

    let split = make_split(&records, &truth, 0.7, 1).unwrap();
    let with_split = reduced_dataset(&records, &truth, Some(&split), 0.5, &DEFAULT_THINNED, 5);
    assert!(with_split.ks.is_some());
    let again = reduced_dataset(&records, &truth, Some(&split), 0.5, &DEFAULT_THINNED, 5);
    assert_eq!(with_split.truth.to_jsonl(), again.truth.to_jsonl());
}

fn report_fixture() -> Vec<MetricsReport> {
    let (records, truth) = fixture();
    [MethodFilter::None, MethodFilter::shipped_structural()]
        .iter()
        .map(|f| {
            sweep_thresholds(
                &mock_run(&records, &truth, f, EvalMode::Standard),
                SweepOptions { per_algorithm: true },
            )
        })
        .collect()
}

#[test]
fn report_files_are_byte_stable() {
    let reports = report_fixture();
    let mut csv = Vec::new();
    write_csv(&reports, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(csv.lines().count(), 1 + 2 * THRESHOLDS.len() * Algorithm::ALL.len());
    golden("report_minicorpus.csv", &csv);

    let mut json = Vec::new();
    write_json(&reports, &mut json).unwrap();
    let json = String::from_utf8(json).unwrap();
    golden("report_minicorpus.json", &json);
    let back: Vec<MetricsReport> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, reports);

    let dir = tempfile::tempdir().unwrap();
    let (c, j) = algorec_core::eval::write_report(&reports, dir.path(), "r").unwrap();
    assert_eq!(std::fs::read_to_string(c).unwrap(), csv);
    assert_eq!(std::fs::read_to_string(j).unwrap(), json);
}

#[test]
fn results_jsonl_round_trips() {
    let (records, truth) = fixture();
    let runs: Vec<PipelineRun> = [MethodFilter::None, MethodFilter::shipped_structural()]
        .iter()
        .map(|f| mock_run(&records, &truth, f, EvalMode::LowerBound))
        .collect();
    let mut buf = Vec::new();
    write_results(&runs, &mut buf).unwrap();
    let back = read_results(std::io::Cursor::new(&buf)).unwrap();
    assert_eq!(back, runs);
    assert!(read_results(std::io::Cursor::new(b"{not json}\n")).is_err());
}

#[test]
fn truth_errors_are_reported() {
    let err = GroundTruth::parse(
        "{\"method_id\":\"a\",\"algorithm\":\"quick_sort\",\"label\":\"positive\"}\n",
        "t.jsonl",
    )
    .unwrap_err();
    assert!(err.to_string().contains("quick_sort"), "{err}");
    let dup = "{\"method_id\":\"a\",\"algorithm\":\"gcd\",\"label\":\"positive\"}\n{\"method_id\":\"a\",\"algorithm\":\"gcd\",\"label\":\"negative\"}\n";
    assert!(GroundTruth::parse(dup, "t.jsonl").is_err());
    let one = GroundTruth::parse(
        "{\"method_id\":\"ghost\",\"algorithm\":\"gcd\",\"label\":\"positive\"}\n",
        "t.jsonl",
    )
    .unwrap();
    assert!(one.validate(["a", "b"]).is_err());
}
