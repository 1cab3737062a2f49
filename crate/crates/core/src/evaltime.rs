//! Parametric evaluation-time model.
//!
//! Hardware evaluation time is not simulable at the desk, so it is modeled:
//! a budget assigns fixed and per-burst latencies to the four stages of a
//! challenge/response round trip (host send, execution, host receive,
//! store), and the burst count is how many 8-word bursts cover the golden
//! cells a key needs. The reference budget is calibrated against bench
//! measurements of the evaluation rig; wall-clock time of this simulator is
//! a separate number and never reported through this model.

use crate::error::Error;
use crate::golden::GoldenDataSet;
use crate::Result;
use alloc::vec::Vec;

/// Per-stage latency budget, in microseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalTimeBudget {
    pub words_per_burst: usize,
    pub fixed_host_send_us: f64,
    pub per_burst_host_send_us: f64,
    pub per_burst_exec_us: f64,
    pub per_burst_host_receive_us: f64,
    pub per_burst_store_us: f64,
    pub fixed_store_us: f64,
}

impl EvalTimeBudget {
    /// Reference calibration: 56.3968 us per burst end to end with a
    /// 2.43 us command overhead, of which 2.6288 us per burst are spent on
    /// the rig itself (execution plus readback).
    pub fn reference() -> Self {
        Self {
            words_per_burst: 8,
            fixed_host_send_us: 2.43,
            per_burst_host_send_us: 30.0,
            per_burst_exec_us: 1.5,
            per_burst_host_receive_us: 1.1288,
            per_burst_store_us: 23.768,
            fixed_store_us: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.words_per_burst == 0 {
            return Err(Error::Config(alloc::string::String::from(
                "words_per_burst must be positive",
            )));
        }
        for (name, value) in [
            ("fixed_host_send_us", self.fixed_host_send_us),
            ("per_burst_host_send_us", self.per_burst_host_send_us),
            ("per_burst_exec_us", self.per_burst_exec_us),
            ("per_burst_host_receive_us", self.per_burst_host_receive_us),
            ("per_burst_store_us", self.per_burst_store_us),
            ("fixed_store_us", self.fixed_store_us),
        ] {
            if !(value >= 0.0) {
                return Err(Error::Config(alloc::format!(
                    "{name} must be non-negative, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Modeled evaluation time for one key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalTimeEstimate {
    /// Bursts needed to cover the key's golden cells (fractional when it is
    /// a mean over rows).
    pub burst_count: f64,
    pub t_host_send_us: f64,
    pub t_exec_us: f64,
    pub t_host_receive_us: f64,
    pub t_store_us: f64,
    /// Full round trip: send + exec + receive + store.
    pub t_eval1_us: f64,
    /// On-rig time only: exec + receive.
    pub t_eval2_us: f64,
}

/// Evaluate the budget at a burst count.
pub fn eval_time(budget: &EvalTimeBudget, burst_count: f64) -> Result<EvalTimeEstimate> {
    budget.validate()?;
    if !(burst_count >= 0.0) {
        return Err(Error::Config(alloc::format!(
            "burst count must be non-negative, got {burst_count}"
        )));
    }
    let t_host_send_us = budget.fixed_host_send_us + burst_count * budget.per_burst_host_send_us;
    let t_exec_us = burst_count * budget.per_burst_exec_us;
    let t_host_receive_us = burst_count * budget.per_burst_host_receive_us;
    let t_store_us = budget.fixed_store_us + burst_count * budget.per_burst_store_us;
    Ok(EvalTimeEstimate {
        burst_count,
        t_host_send_us,
        t_exec_us,
        t_host_receive_us,
        t_store_us,
        t_eval1_us: t_host_send_us + t_exec_us + t_host_receive_us + t_store_us,
        t_eval2_us: t_exec_us + t_host_receive_us,
    })
}

/// Bursts needed to cover the first `key_length` golden cells of a row,
/// reading consecutive bursts from column 0.
pub fn row_burst_count(
    gds: &GoldenDataSet,
    row: usize,
    key_length: usize,
    words_per_burst: usize,
) -> Result<usize> {
    if words_per_burst == 0 {
        return Err(Error::Config(alloc::string::String::from(
            "words_per_burst must be positive",
        )));
    }
    let indices = gds.row_golden_indices(row)?;
    if indices.len() < key_length || key_length == 0 {
        return Err(Error::ShortRow {
            row,
            available: indices.len(),
            requested: key_length,
        });
    }
    let width = gds.geometry.word_width();
    let last = indices[key_length - 1];
    let col = (last / width) % gds.geometry.cols();
    Ok(col / words_per_burst + 1)
}

/// Mean burst count over the qualified rows that can serve a key of
/// `key_length` bits.
pub fn mean_burst_count(
    gds: &GoldenDataSet,
    key_length: usize,
    words_per_burst: usize,
) -> Result<f64> {
    let mut counts: Vec<usize> = Vec::new();
    for &row in &gds.rows {
        match row_burst_count(gds, row, key_length, words_per_burst) {
            Ok(count) => counts.push(count),
            Err(Error::ShortRow { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if counts.is_empty() {
        return Err(Error::InsufficientData(alloc::format!(
            "no qualified row can serve a {key_length}-bit key"
        )));
    }
    Ok(counts.iter().sum::<usize>() as f64 / counts.len() as f64)
}
