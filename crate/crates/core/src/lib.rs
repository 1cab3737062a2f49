//! Behavioral model of DRAM latency faults and the full precharge-latency
//! PUF pipeline built on top of it.
//!
//! The crate is organized as a pipeline:
//!
//! 1. [`profile`] describes a bank's process characteristics (cell class
//!    mix, per-bit-position balance, noise, retention leakage) and ships
//!    calibrated presets for six reference DDR3 banks.
//! 2. [`bank`] realizes a profile as a deterministic, seeded bank whose
//!    cells can be read at nominal or violated timing parameters.
//! 3. [`campaign`] runs the measurement grid (patterns x repeats) against a
//!    bank or ingested traces, and [`classify`] sorts every cell into the
//!    non-faulty / pattern-independent / pattern-dependent / noisy taxonomy.
//! 4. [`select`] finds qualified rows and eligible bit positions through the
//!    Hamming-weight window, and [`golden`] enrolls them as a golden data
//!    set, extracts keys, and verifies fresh responses.
//! 5. [`metrics`] computes diffuseness, uniqueness, reliability, Jaccard
//!    robustness comparisons, and [`evaltime`] models evaluation latency.
//!
//! Everything is `no_std` + `alloc`; all randomness is counter-based and
//! derived from explicit seeds, so results are bit-identical regardless of
//! how work is partitioned across threads.

#![no_std]

extern crate alloc;

pub mod bank;
pub mod bits;
pub mod campaign;
pub mod classify;
pub mod condition;
pub mod error;
pub mod evaltime;
pub mod frame;
pub mod geometry;
pub mod golden;
pub mod metrics;
pub mod profile;
pub mod retention;
pub mod rng;
pub mod select;
pub mod timing;

pub use bank::{CellBehavior, NoiseMode, SimulatedBank};
pub use bits::BitMatrix;
pub use campaign::{run_campaign, FrameSource, MeasurementSet, SimulatedSource};
pub use classify::{classify, distribution_summary, CellClass, CellClassMap, ClassDistribution};
pub use condition::{ConditionLabel, OperatingCondition};
pub use error::Error;
pub use evaltime::{eval_time, EvalTimeBudget, EvalTimeEstimate};
pub use frame::{Provenance, ReadoutFrame};
pub use geometry::{expand_pattern, linearize, BankGeometry, CellAddress};
pub use golden::{extract_key, generate_golden, verify_response, GoldenDataSet, KeyRecord, VerifyOutcome};
pub use metrics::{
    diffuseness_report, hamming_distance, hamming_weight, jaccard_index, reliability_report,
    robustness_comparison, uniqueness_report, DiffusenessReport, HdReport, JaccardReport,
};
pub use profile::ProcessProfile;
pub use select::{build_bit_string, eligible_row_bits, select, SelectionParams, SelectionResult};
pub use timing::TimingParameters;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
