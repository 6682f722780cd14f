//! Ground truth, splits, the filter-then-classify pipeline, threshold sweeps
//! and reports.

mod metrics;
mod pipeline;
mod report;
mod split;
mod truth;

pub use metrics::{
    best_threshold, confusion, f1_score, lower_bound_mode, macro_f1, mean, ratio, sweep_thresholds, AlgorithmMetrics, Confusion,
    MetricsReport, SweepOptions, ThresholdMetrics, THRESHOLDS,
};
pub use pipeline::{
    read_results, run_pipeline, write_results, EvalMode, MethodFilter, PipelineConfig, PipelineError, PipelineOutput, PipelineRun,
    ResultRow, RunMeta,
};
pub use report::{write_csv, write_json, write_report, ReportError, CSV_COLUMNS};
pub use split::{
    ks_p_value, ks_statistic, ks_two_sample, make_split, reduced_dataset, split_ks, KsResult, ReducedDataset, Side, SplitError,
    SplitSelection, SplitSpec, DEFAULT_KEEP_FRACTION, DEFAULT_TEST_RATIO, DEFAULT_THINNED, KS_ALPHA,
};
pub use truth::{GroundTruth, Label, TruthError, TruthRow};
