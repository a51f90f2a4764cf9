//! Reference-free visual quality evaluation for in-image machine
//! translation: a 14-dimension scoring protocol with defect-area-ratio
//! severity quantization, judge-output parsing, alignment rewards, dataset
//! balancing, diversity sampling, threshold calibration, and the
//! meta-evaluation statistics used to validate the metric.
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p vectra --example parse_judge_output
//! cargo run -p vectra --example score_assessment
//! cargo run -p vectra --example compute_reward
//! cargo run -p vectra --example aggregate_annotators
//! cargo run -p vectra --example balance_dataset
//! cargo run -p vectra --example diversity_sampling
//! cargo run -p vectra --example calibrate_threshold
//! cargo run -p vectra --example meta_evaluation
//! ```
//!
//! The same capabilities are wired into the `vectra` binary as subcommands
//! operating on JSONL manifests; see the README.

pub mod annotation;
pub mod balance;
pub mod calibration;
pub mod manifest;
pub mod metaeval;
pub mod parser;
pub mod reward;
pub mod sampling;
pub mod scoring;
pub mod types;

pub use types::{
    dimension_category, parse_score_label, Assessment, Category, CoreError, Dar,
    DimensionAssessment, DimensionId, ReasonFields, SampleRecord, ScoreLevel,
};

/// Toolkit wire-format version, bumped when any JSONL schema changes.
pub const SCHEMA_VERSION: u32 = 1;
