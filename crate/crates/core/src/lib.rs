//! Simulator and experiment harness for preference alignment of small
//! Gaussian-mixture "models".
//!
//! A ground-truth eight-mode mixture plays the data distribution. A six-mode
//! fit of it is the high-recall model; distilling that fit into three or four
//! components with sharpened sampling gives a low-recall model. The two
//! orderings of distillation and alignment (KA: distill then align, AK: align
//! then distill) are run with PPO, GRPO and DPO and compared on precision,
//! recall, target precision and reward.

pub mod align;
pub mod distill;
pub mod error;
pub mod metrics;
pub mod mog;
pub mod numerics;
pub mod pipeline;
pub mod report;
pub mod reward;
pub mod stats;
pub mod svg;
pub mod sweep;

pub use align::{
    align, dpo_align, dpo_loss, grpo_align, ppo_align, Algorithm, AlignConfig, TrainLog,
    TrainRecord,
};
pub use distill::{fit_mle, run_kd, run_sft, FitConfig, StudentInit};
pub use error::{Error, Result};
pub use metrics::{
    evaluate_metrics, high_reward_fraction, normalization_check, starvation_factor, MetricsReport,
    Starvation,
};
pub use mog::{
    grad_log_density, log_density, make_ground_truth, make_target, sample, tempered_weights,
    weights_of, GroundTruthSpec, MoGParams, ParamGrad, Point2,
};
pub use numerics::{baseline_update, finite_diff_check, sgd_step, OptimizerState, ScalarBaseline};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineFailure, PipelineRun, Stage, Variant};
pub use report::{emit_report, Metric};
pub use reward::{fold_reward, oracle_reward, prefer, shaped_reward, PreferencePair, RewardSpec};
pub use stats::{boxplot_stats, BoxStats};
pub use sweep::{run_sweep, SweepResult, SweepRow, SweepSpec};
