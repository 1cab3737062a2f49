//! Process profiles: everything that makes one bank behave like itself.
//!
//! A profile couples a cell-class mix with the structural knobs that shape
//! where each class lands (per-bit-position balance, forced bit positions,
//! pattern-dependent clustering), the reduced-t_RP fault thresholds, the
//! noisy-cell response to voltage and temperature, the retention leakage
//! model, and the residual drift observed between enrollment and field
//! evaluation sessions.
//!
//! Six presets ship with the crate, calibrated to measurements of DDR3
//! banks from two vendors (four banks from vendor A, two from vendor B).

use crate::condition::{ConditionLabel, OperatingCondition};
use crate::error::Error;
use crate::geometry::{BankGeometry, DESK_GEOMETRY};
use crate::timing::TimingParameters;
use crate::Result;
use alloc::string::String;
use alloc::vec::Vec;

const MIX_SUM_TOLERANCE: f64 = 1e-9;

/// Fractions of each cell class; they must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMix {
    pub pi0: f64,
    pub pi1: f64,
    pub pattern_dependent: f64,
    pub noisy: f64,
    pub non_faulty: f64,
}

impl ClassMix {
    pub fn new(pi0: f64, pi1: f64, pattern_dependent: f64, noisy: f64, non_faulty: f64) -> Result<Self> {
        let mix = Self {
            pi0,
            pi1,
            pattern_dependent,
            noisy,
            non_faulty,
        };
        mix.validate()?;
        Ok(mix)
    }

    /// Build from percentages as they appear in characterization tables,
    /// rescaling so the fractions sum to exactly 1 (table rows carry
    /// rounding residue of up to one part per thousand).
    pub fn from_percentages(pi0: f64, pi1: f64, pattern_dependent: f64, noisy: f64, non_faulty: f64) -> Result<Self> {
        let sum = pi0 + pi1 + pattern_dependent + noisy + non_faulty;
        if !(sum > 0.0) {
            return Err(Error::Config(String::from("class percentages sum to zero")));
        }
        Self::new(
            pi0 / sum,
            pi1 / sum,
            pattern_dependent / sum,
            noisy / sum,
            non_faulty / sum,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [
            ("pi0", self.pi0),
            ("pi1", self.pi1),
            ("pattern_dependent", self.pattern_dependent),
            ("noisy", self.noisy),
            ("non_faulty", self.non_faulty),
        ];
        for (name, value) in parts {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Config(alloc::format!(
                    "class fraction {name} must be in [0, 1], got {value}"
                )));
            }
        }
        let sum = self.pi0 + self.pi1 + self.pattern_dependent + self.noisy + self.non_faulty;
        if (sum - 1.0).abs() > MIX_SUM_TOLERANCE {
            return Err(Error::Config(alloc::format!(
                "class fractions must sum to 1 (+-1e-9), got {sum}"
            )));
        }
        Ok(())
    }

    /// Fraction of pattern-independent cells (either value).
    pub fn pattern_independent(&self) -> f64 {
        self.pi0 + self.pi1
    }

    /// Share of pattern-independent cells that read 1.
    pub fn pi_one_share(&self) -> f64 {
        if self.pattern_independent() == 0.0 {
            0.0
        } else {
            self.pi1 / self.pattern_independent()
        }
    }
}

/// Per-bit-position balance plan.
///
/// Words behave like stacked 2-D arrays: each bit position of the word is
/// served by its own array, and the arrays differ in how their
/// pattern-independent cells split between 0 and 1. The plan assigns each
/// of the `word_width` positions a one-rate: `balanced_lanes` positions get
/// stratified normal quantiles around `balanced_mean`, the rest share a
/// skew rate chosen so the aggregate matches the class mix exactly. A
/// seeded permutation decides which positions are the balanced ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanePlan {
    pub balanced_lanes: usize,
    pub balanced_mean: f64,
    pub balanced_sd: f64,
}

impl LanePlan {
    pub fn validate(&self, word_width: usize) -> Result<()> {
        if self.balanced_lanes > word_width {
            return Err(Error::Config(alloc::format!(
                "balanced_lanes ({}) exceeds word width ({word_width})",
                self.balanced_lanes
            )));
        }
        if !(0.0..=1.0).contains(&self.balanced_mean) {
            return Err(Error::Config(String::from("balanced_mean must be in [0, 1]")));
        }
        if !(self.balanced_sd >= 0.0) {
            return Err(Error::Config(String::from("balanced_sd must be non-negative")));
        }
        Ok(())
    }
}

/// A bit position whose cells always read the same value regardless of
/// class sampling (models arrays pinned hard to one rail).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitPositionBias {
    pub bit: usize,
    pub value: bool,
}

/// Row/column stripes where pattern-dependent cells cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdClustering {
    pub row_period: usize,
    pub col_period: usize,
    /// Multiplier on the pattern-dependent probability inside stripes;
    /// outside density is reduced to keep the aggregate on target.
    pub boost: f64,
}

/// Noisy-cell population parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyParams {
    /// Fraction of noisy cells biased toward reading 1.
    pub bias_toward_one: f64,
    /// Per-read flip probability range (distance from the biased rail).
    pub flip_min: f64,
    pub flip_max: f64,
    /// Probability shift of reading 1 per mV of supply offset.
    pub voltage_sensitivity_per_mv: f64,
    /// Probability shift of reading 1 per degree C of temperature offset.
    pub temperature_sensitivity_per_c: f64,
}

impl NoisyParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.bias_toward_one) {
            return Err(Error::Config(String::from("bias_toward_one must be in [0, 1]")));
        }
        if !(0.0 <= self.flip_min && self.flip_min <= self.flip_max && self.flip_max <= 0.5) {
            return Err(Error::Config(String::from(
                "flip range must satisfy 0 <= flip_min <= flip_max <= 0.5",
            )));
        }
        Ok(())
    }
}

/// Reduced-precharge fault thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrpThresholds {
    /// Largest t_RP at which any error appears.
    pub first_error_ns: f64,
    /// The empirically chosen evaluation point; every faulty cell expresses
    /// its class at or below this value.
    pub puf_ns: f64,
    /// Below this value the previously activated row fails to close and its
    /// content bleeds into the readout.
    pub min_close_ns: f64,
    /// Shape of the per-cell fault onset between `puf_ns` and
    /// `first_error_ns`; large values concentrate onsets near `puf_ns`,
    /// giving the steep error-vs-t_RP knee.
    pub onset_exponent: f64,
    /// Fraction of faulty cells that already fail at `first_error_ns`.
    pub early_onset_fraction: f64,
    /// Probability that a cell returns the previous row's bit when read
    /// below `min_close_ns`.
    pub carryover_probability: f64,
}

impl TrpThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.puf_ns > 0.0 && self.first_error_ns >= self.puf_ns) {
            return Err(Error::Config(String::from(
                "need 0 < puf_ns <= first_error_ns",
            )));
        }
        if !(self.min_close_ns >= 0.0) {
            return Err(Error::Config(String::from("min_close_ns must be non-negative")));
        }
        if !(self.onset_exponent >= 1.0) {
            return Err(Error::Config(String::from("onset_exponent must be >= 1")));
        }
        if !(0.0..=1.0).contains(&self.early_onset_fraction)
            || !(0.0..=1.0).contains(&self.carryover_probability)
        {
            return Err(Error::Config(String::from(
                "early_onset_fraction and carryover_probability must be in [0, 1]",
            )));
        }
        Ok(())
    }
}

/// Retention leakage model. Each cell owns a retention time; prolonging the
/// refresh interval past it flips the stored 1 to 0. Temperature shortens
/// retention exponentially, voltage has a weak effect, and a per-session
/// jitter term smears the threshold slightly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetentionModel {
    /// Median per-cell leak rate at the nominal corner, per second.
    pub base_leak_rate_per_s: f64,
    /// Exponential leak-rate factor per degree C.
    pub temperature_coefficient_per_c: f64,
    /// Exponential leak-rate factor per mV (weak, negative for banks where
    /// higher supply retains charge longer).
    pub voltage_coefficient_per_mv: f64,
    /// Sigma of the lognormal per-cell leak multiplier.
    pub leak_sigma: f64,
    /// Sigma of the lognormal per-session threshold jitter.
    pub session_jitter_sigma: f64,
}

impl RetentionModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_leak_rate_per_s > 0.0) {
            return Err(Error::Config(String::from("base_leak_rate_per_s must be positive")));
        }
        if !(self.leak_sigma >= 0.0) || !(self.session_jitter_sigma >= 0.0) {
            return Err(Error::Config(String::from("sigmas must be non-negative")));
        }
        Ok(())
    }
}

/// Voltage/temperature offsets this module tolerates at each named corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionTable {
    pub lvrt_dv_mv: f64,
    pub hvrt_dv_mv: f64,
    pub nvht_dt_c: f64,
}

impl ConditionTable {
    /// Resolve a named corner to a concrete condition.
    pub fn resolve(&self, label: ConditionLabel) -> Result<OperatingCondition> {
        match label {
            ConditionLabel::Nvrt => Ok(OperatingCondition::nvrt()),
            ConditionLabel::Lvrt => OperatingCondition::new(label, self.lvrt_dv_mv, 0.0),
            ConditionLabel::Hvrt => OperatingCondition::new(label, self.hvrt_dv_mv, 0.0),
            ConditionLabel::Nvht => OperatingCondition::new(label, 0.0, self.nvht_dt_c),
            ConditionLabel::Custom => Err(Error::Config(String::from(
                "custom conditions need explicit offsets",
            ))),
        }
    }
}

/// The complete description of how one bank behaves.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessProfile {
    pub name: String,
    pub geometry: BankGeometry,
    pub seed: u64,
    pub class_mix: ClassMix,
    pub lane_plan: LanePlan,
    pub bit_position_bias: Vec<BitPositionBias>,
    pub pd_clustering: Option<PdClustering>,
    pub noisy: NoisyParams,
    pub trp: TrpThresholds,
    pub retention: RetentionModel,
    /// Per-read residual flip probability observed in field evaluation
    /// sessions (drift relative to the enrollment rig). Enrollment reads do
    /// not carry it; see `NoiseMode`.
    pub session_flip_prob: f64,
    pub timing: TimingParameters,
    pub conditions: ConditionTable,
}

impl ProcessProfile {
    pub fn validate(&self) -> Result<()> {
        self.class_mix.validate()?;
        self.lane_plan.validate(self.geometry.word_width())?;
        self.noisy.validate()?;
        self.trp.validate()?;
        self.retention.validate()?;
        if !(0.0..=1.0).contains(&self.session_flip_prob) {
            return Err(Error::Config(String::from("session_flip_prob must be in [0, 1]")));
        }
        for bias in &self.bit_position_bias {
            if bias.bit >= self.geometry.word_width() {
                return Err(Error::OutOfBounds {
                    field: "bit",
                    value: bias.bit,
                    limit: self.geometry.word_width(),
                });
            }
        }
        if let Some(pd) = &self.pd_clustering {
            if pd.row_period == 0 || pd.col_period == 0 || !(pd.boost >= 1.0) {
                return Err(Error::Config(String::from(
                    "pd_clustering needs non-zero periods and boost >= 1",
                )));
            }
        }
        // The lane plan must be able to realize the mix: the skew rate
        // computed for the non-balanced positions has to be a probability.
        self.skew_one_rate()?;
        Ok(())
    }

    /// One-rate shared by the non-balanced bit positions, chosen so that the
    /// average over all positions equals the class-mix one-share.
    pub fn skew_one_rate(&self) -> Result<f64> {
        let width = self.geometry.word_width() as f64;
        let balanced = self.lane_plan.balanced_lanes as f64;
        let target = width * self.class_mix.pi_one_share();
        if self.lane_plan.balanced_lanes == self.geometry.word_width() {
            return Ok(self.lane_plan.balanced_mean);
        }
        let skew = (target - balanced * self.lane_plan.balanced_mean) / (width - balanced);
        if !(0.0..=1.0).contains(&skew) {
            return Err(Error::Config(alloc::format!(
                "lane plan cannot realize the class mix: skew one-rate {skew}"
            )));
        }
        Ok(skew)
    }

    /// Resolve a named operating corner for this module.
    pub fn condition(&self, label: ConditionLabel) -> Result<OperatingCondition> {
        self.conditions.resolve(label)
    }

    /// Whether a preset with this name ships with the crate.
    pub fn preset_names() -> [&'static str; 6] {
        [
            "vendor-a-bank-a",
            "vendor-a-bank-b",
            "vendor-a-bank-c",
            "vendor-a-bank-d",
            "vendor-b-bank-a",
            "vendor-b-bank-b",
        ]
    }

    /// A calibrated preset at the desk-scale geometry.
    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        Self::preset_with_geometry(name, seed, DESK_GEOMETRY)
    }

    /// A calibrated preset at an explicit geometry.
    pub fn preset_with_geometry(name: &str, seed: u64, geometry: BankGeometry) -> Result<Self> {
        let spec = PRESETS
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Config(alloc::format!("unknown profile preset '{name}'")))?;
        let profile = Self {
            name: String::from(name),
            geometry,
            seed,
            class_mix: ClassMix::from_percentages(
                spec.pi0_pct,
                spec.pi1_pct,
                spec.pd_pct,
                spec.noisy_pct,
                spec.non_faulty_pct,
            )?,
            lane_plan: LanePlan {
                balanced_lanes: spec.balanced_lanes,
                balanced_mean: spec.balanced_mean,
                balanced_sd: spec.balanced_sd,
            },
            bit_position_bias: Vec::new(),
            pd_clustering: Some(PdClustering {
                row_period: 97,
                col_period: 31,
                boost: 8.0,
            }),
            noisy: NoisyParams {
                bias_toward_one: spec.noisy_bias_toward_one,
                flip_min: 0.10,
                flip_max: 0.45,
                voltage_sensitivity_per_mv: spec.noisy_voltage_sensitivity,
                temperature_sensitivity_per_c: 0.0015,
            },
            trp: TrpThresholds {
                first_error_ns: spec.first_error_ns,
                puf_ns: spec.t_rp_puf_ns,
                min_close_ns: spec.min_close_ns,
                onset_exponent: 70.0,
                early_onset_fraction: 5e-4,
                carryover_probability: 0.9,
            },
            retention: RetentionModel {
                base_leak_rate_per_s: 1e-4,
                temperature_coefficient_per_c: 0.055,
                voltage_coefficient_per_mv: -0.0005,
                leak_sigma: 2.0,
                session_jitter_sigma: 0.08,
            },
            session_flip_prob: spec.session_flip_prob,
            timing: TimingParameters::ddr3_nominal(),
            conditions: ConditionTable {
                lvrt_dv_mv: spec.lvrt_dv_mv,
                hvrt_dv_mv: 55.0,
                nvht_dt_c: 20.0,
            },
        };
        profile.validate()?;
        Ok(profile)
    }
}

struct PresetSpec {
    name: &'static str,
    t_rp_puf_ns: f64,
    first_error_ns: f64,
    min_close_ns: f64,
    pi0_pct: f64,
    pi1_pct: f64,
    pd_pct: f64,
    noisy_pct: f64,
    non_faulty_pct: f64,
    balanced_lanes: usize,
    balanced_mean: f64,
    balanced_sd: f64,
    session_flip_prob: f64,
    noisy_bias_toward_one: f64,
    noisy_voltage_sensitivity: f64,
    lvrt_dv_mv: f64,
}

/// Calibration table for the six reference banks. Class percentages come
/// from characterization at t_RP,PUF; lane plans and session drift rates
/// are fitted so key balance, burst counts, and intra-distance statistics
/// of the simulated banks track the reference measurements.
const PRESETS: [PresetSpec; 6] = [
    PresetSpec {
        name: "vendor-a-bank-a",
        t_rp_puf_ns: 2.5,
        first_error_ns: 7.5,
        min_close_ns: 1.0,
        pi0_pct: 85.825,
        pi1_pct: 12.631,
        pd_pct: 0.006,
        noisy_pct: 1.537,
        non_faulty_pct: 0.001,
        balanced_lanes: 14,
        balanced_mean: 0.54,
        balanced_sd: 0.08,
        session_flip_prob: 0.0048,
        noisy_bias_toward_one: 0.5,
        noisy_voltage_sensitivity: -0.0005,
        lvrt_dv_mv: -20.0,
    },
    PresetSpec {
        name: "vendor-a-bank-b",
        t_rp_puf_ns: 2.5,
        first_error_ns: 7.5,
        min_close_ns: 1.0,
        pi0_pct: 72.663,
        pi1_pct: 18.790,
        pd_pct: 0.135,
        noisy_pct: 8.413,
        non_faulty_pct: 0.0,
        balanced_lanes: 22,
        balanced_mean: 0.533,
        balanced_sd: 0.08,
        session_flip_prob: 0.0047,
        noisy_bias_toward_one: 0.5,
        noisy_voltage_sensitivity: -0.0005,
        lvrt_dv_mv: -20.0,
    },
    PresetSpec {
        name: "vendor-a-bank-c",
        t_rp_puf_ns: 2.5,
        first_error_ns: 7.5,
        min_close_ns: 1.0,
        pi0_pct: 72.793,
        pi1_pct: 17.202,
        pd_pct: 0.133,
        noisy_pct: 9.872,
        non_faulty_pct: 0.0,
        balanced_lanes: 20,
        balanced_mean: 0.492,
        balanced_sd: 0.08,
        session_flip_prob: 0.0049,
        noisy_bias_toward_one: 0.5,
        noisy_voltage_sensitivity: -0.0005,
        lvrt_dv_mv: -20.0,
    },
    PresetSpec {
        name: "vendor-a-bank-d",
        t_rp_puf_ns: 5.0,
        first_error_ns: 7.5,
        min_close_ns: 4.0,
        pi0_pct: 7.820,
        pi1_pct: 10.560,
        pd_pct: 0.310,
        noisy_pct: 81.030,
        non_faulty_pct: 0.280,
        balanced_lanes: 44,
        balanced_mean: 0.4584,
        balanced_sd: 0.08,
        session_flip_prob: 0.0154,
        noisy_bias_toward_one: 0.5,
        noisy_voltage_sensitivity: -0.0005,
        lvrt_dv_mv: -20.0,
    },
    PresetSpec {
        name: "vendor-b-bank-a",
        t_rp_puf_ns: 2.5,
        first_error_ns: 7.5,
        min_close_ns: 1.0,
        pi0_pct: 8.226,
        pi1_pct: 63.674,
        pd_pct: 0.519,
        noisy_pct: 27.580,
        non_faulty_pct: 0.001,
        balanced_lanes: 7,
        balanced_mean: 0.68,
        balanced_sd: 0.05,
        session_flip_prob: 0.0197,
        noisy_bias_toward_one: 0.8,
        noisy_voltage_sensitivity: 0.0005,
        lvrt_dv_mv: -55.0,
    },
    PresetSpec {
        name: "vendor-b-bank-b",
        t_rp_puf_ns: 2.5,
        first_error_ns: 7.5,
        min_close_ns: 1.0,
        pi0_pct: 6.339,
        pi1_pct: 53.530,
        pd_pct: 0.113,
        noisy_pct: 40.017,
        non_faulty_pct: 0.001,
        balanced_lanes: 9,
        balanced_mean: 0.705,
        balanced_sd: 0.05,
        session_flip_prob: 0.0193,
        noisy_bias_toward_one: 0.8,
        noisy_voltage_sensitivity: 0.0005,
        lvrt_dv_mv: -55.0,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for name in ProcessProfile::preset_names() {
            let profile = ProcessProfile::preset(name, 1).unwrap();
            profile.validate().unwrap();
        }
    }

    #[test]
    fn mix_must_sum_to_one() {
        assert!(ClassMix::new(0.5, 0.5, 0.0, 0.0, 0.0).is_ok());
        assert!(ClassMix::new(0.5, 0.6, 0.0, 0.0, 0.0).is_err());
        assert!(ClassMix::new(0.5, -0.1, 0.2, 0.2, 0.2).is_err());
    }

    #[test]
    fn percentages_are_normalized() {
        let mix = ClassMix::from_percentages(72.663, 18.790, 0.135, 8.413, 0.0).unwrap();
        mix.validate().unwrap();
        let sum = mix.pi0 + mix.pi1 + mix.pattern_dependent + mix.noisy + mix.non_faulty;
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_preset_is_a_config_error() {
        assert!(matches!(
            ProcessProfile::preset("vendor-z", 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn condition_table_resolves_named_corners() {
        let profile = ProcessProfile::preset("vendor-a-bank-a", 1).unwrap();
        let lvrt = profile.condition(ConditionLabel::Lvrt).unwrap();
        assert_eq!(lvrt.delta_v_mv, -20.0);
        let nvht = profile.condition(ConditionLabel::Nvht).unwrap();
        assert_eq!(nvht.delta_t_c, 20.0);
        assert!(profile.condition(ConditionLabel::Custom).is_err());
    }
}
