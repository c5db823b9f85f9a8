//! Evaluation protocol: sampling, metrics and reports.

pub mod harness;
pub mod metrics;
pub mod report;

pub use harness::{
    run_trials, sample_test_users, AttackKind, EvalConfig, SplitSpec, TargetOutcome, TargetSampling, TestSample,
};
pub use metrics::{f_score, metrics_topk, TopKMetrics};
pub use report::{
    confidence_sweep, performance_gain, top_fraction_precision, ConfidencePoint, Estimator, EvalReport, Gain,
    MetricRow, SweepPoint,
};
