//! Retention-failure baseline: what a refresh-starvation PUF sees.
//!
//! Every cell owns a leak rate `base * m_i * exp(kT * dT + kV * dV)` with a
//! lognormal per-cell multiplier `m_i`, and an exponential unit survival
//! draw fixed per cell. Prolonging the refresh interval past the implied
//! retention time flips the stored 1 to 0. A small lognormal per-session
//! jitter smears the threshold, so repeated measurements agree on all but
//! the boundary cells.

use crate::bank::{NoiseMode, SimulatedBank};
use crate::bits::BitMatrix;
use crate::condition::OperatingCondition;
use crate::error::Error;
use crate::frame::{Provenance, ReadoutFrame};
use crate::rng::{derive, inv_norm_cdf, norm_cdf, unit_f64};
use crate::Result;

const D_RET_LEAK: u64 = 0x20;
const D_RET_SURVIVAL: u64 = 0x21;
const D_RET_JITTER: u64 = 0x22;

impl SimulatedBank {
    /// Log of the per-cell leak rate under a condition, without jitter.
    fn log_leak_rate(&self, idx: usize, condition: &OperatingCondition) -> f64 {
        let model = &self.profile().retention;
        let seed = self.profile().seed;
        let u = unit_f64(derive(seed, D_RET_LEAK, idx as u64)).clamp(1e-12, 1.0 - 1e-12);
        let z = inv_norm_cdf(u);
        libm::log(model.base_leak_rate_per_s)
            + model.leak_sigma * z
            + model.temperature_coefficient_per_c * condition.delta_t_c
            + model.voltage_coefficient_per_mv * condition.delta_v_mv
    }

    /// Log of the per-cell survival threshold (exponential unit draw).
    fn log_survival(&self, idx: usize) -> f64 {
        let seed = self.profile().seed;
        let u = unit_f64(derive(seed, D_RET_SURVIVAL, idx as u64)).clamp(1e-12, 1.0 - 1e-12);
        // ln(-ln(1 - u)) is the log of an Exp(1) draw.
        libm::log(-libm::log(1.0 - u))
    }

    /// Read the bank after storing all-1s and prolonging the refresh
    /// interval. Flips are 1 -> 0 only.
    pub fn retention_readout(
        &self,
        interval_s: f64,
        condition: &OperatingCondition,
        noise: NoiseMode,
    ) -> Result<ReadoutFrame> {
        if !(interval_s >= 0.0) {
            return Err(Error::Precondition(alloc::format!(
                "refresh interval must be non-negative, got {interval_s}"
            )));
        }
        let geom = self.geometry();
        let mut bits = ReadoutFrame::written_reference(0xFF, geom);
        if interval_s > 0.0 {
            let jitter_sigma = self.profile().retention.session_jitter_sigma;
            let log_interval = libm::log(interval_s);
            for idx in 0..geom.total_cells() {
                let jitter = match noise {
                    NoiseMode::Disabled => 0.0,
                    NoiseMode::Seeded(seed) | NoiseMode::SeededWithDrift(seed) => {
                        let u = unit_f64(derive(seed, D_RET_JITTER, idx as u64))
                            .clamp(1e-12, 1.0 - 1e-12);
                        jitter_sigma * inv_norm_cdf(u)
                    }
                };
                let margin =
                    self.log_leak_rate(idx, condition) + log_interval + jitter - self.log_survival(idx);
                if margin > 0.0 {
                    bits.set(idx, false);
                }
            }
        }
        ReadoutFrame::new(
            geom,
            bits,
            Provenance::Simulated,
            0xFF,
            self.profile().timing,
            *condition,
        )
    }

    /// Cells flipped by a retention readout.
    pub fn retention_failed_set(
        &self,
        interval_s: f64,
        condition: &OperatingCondition,
        noise: NoiseMode,
    ) -> Result<BitMatrix> {
        Ok(self.retention_readout(interval_s, condition, noise)?.failed_bits())
    }

    /// Expected failure fraction at an interval, marginalizing the session
    /// jitter.
    pub fn expected_retention_fraction(
        &self,
        interval_s: f64,
        condition: &OperatingCondition,
    ) -> f64 {
        if interval_s <= 0.0 {
            return 0.0;
        }
        let geom = self.geometry();
        let jitter_sigma = self.profile().retention.session_jitter_sigma;
        let log_interval = libm::log(interval_s);
        let mut total = 0.0;
        for idx in 0..geom.total_cells() {
            let margin =
                self.log_leak_rate(idx, condition) + log_interval - self.log_survival(idx);
            total += if jitter_sigma > 0.0 {
                norm_cdf(margin / jitter_sigma)
            } else if margin > 0.0 {
                1.0
            } else {
                0.0
            };
        }
        total / geom.total_cells() as f64
    }

    /// Smallest refresh interval (to 1% bisection tolerance) whose expected
    /// failure fraction reaches `target`.
    pub fn calibrate_interval(
        &self,
        target: f64,
        condition: &OperatingCondition,
    ) -> Result<f64> {
        if target == 0.0 {
            return Ok(0.0);
        }
        if !(0.0 < target && target < 1.0) {
            return Err(Error::Precondition(alloc::format!(
                "target fraction must be in (0, 1), got {target}"
            )));
        }
        let mut hi = 1.0;
        let mut grow = 0;
        while self.expected_retention_fraction(hi, condition) < target {
            hi *= 4.0;
            grow += 1;
            if grow > 40 {
                return Err(Error::Calibration(alloc::format!(
                    "target fraction {target} unreachable under the retention model"
                )));
            }
        }
        let mut lo = 0.0;
        while (hi - lo) > 0.01 * hi {
            let mid = 0.5 * (lo + hi);
            if self.expected_retention_fraction(mid, condition) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}
