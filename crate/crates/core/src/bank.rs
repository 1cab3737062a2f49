//! Seeded behavioral DRAM bank.
//!
//! `build_bank` assigns every cell a fault class drawn from the profile;
//! the assignment is a pure function of `(profile, seed, cell index)`, so a
//! bank is never materialized — reads recompute behaviors on the fly and
//! are safe to run concurrently.
//!
//! Read model:
//!
//! * nominal timing: every cell returns its written bit;
//! * reduced t_RP: faulty cells express their class across the whole row
//!   once t_RP drops past their onset, with the steep knee between the
//!   first-error threshold and t_RP,PUF; below the row-close minimum the
//!   previous row's content bleeds in;
//! * reduced t_RCD: the same fault surface, confined to the first accessed
//!   cache line; all other cells read back exactly;
//! * reduced t_RAS: no errors (idealization of "almost none").

use crate::bits::BitMatrix;
use crate::condition::OperatingCondition;
use crate::error::Error;
use crate::frame::{Provenance, ReadoutFrame};
use crate::geometry::{pattern_bit, CellAddress};
use crate::profile::ProcessProfile;
use crate::rng::{derive, inv_norm_cdf, unit_f64, SplitMix64};
use crate::Result;
use alloc::vec::Vec;

// Derivation domains. Arbitrary but fixed: changing any of them changes
// every simulated bank.
const D_CLASS: u64 = 0x01;
const D_PI_VALUE: u64 = 0x02;
const D_NOISY_BIAS: u64 = 0x03;
const D_NOISY_FLIP: u64 = 0x04;
const D_PD_TABLE: u64 = 0x05;
const D_PD_EXT: u64 = 0x06;
const D_ONSET_EARLY: u64 = 0x07;
const D_ONSET_POS: u64 = 0x08;
const D_LANE_PERM: u64 = 0x09;
const D_READ_NOISY: u64 = 0x0A;
const D_READ_DRIFT: u64 = 0x0B;
const D_READ_CARRY: u64 = 0x0C;

/// The campaign patterns; pattern-dependent truth tables are defined over
/// these four and extended to the rest of the pattern space.
pub const CAMPAIGN_PATTERNS: [u8; 4] = [0xFF, 0xAA, 0x55, 0x00];

/// Noisy-cell parameters: probability of reading 1 per access at the
/// nominal corner, plus linear condition sensitivities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyCell {
    pub p_one: f64,
    pub voltage_sensitivity_per_mv: f64,
    pub temperature_sensitivity_per_c: f64,
}

impl NoisyCell {
    /// Effective probability of reading 1 under a condition, clamped to
    /// `[0, 1]`.
    pub fn p_one_at(&self, condition: &OperatingCondition) -> f64 {
        let p = self.p_one
            + condition.delta_v_mv * self.voltage_sensitivity_per_mv
            + condition.delta_t_c * self.temperature_sensitivity_per_c;
        p.clamp(0.0, 1.0)
    }

    /// Deterministic value used when noise sampling is disabled: the rail
    /// the cell is biased toward at the nominal corner.
    pub fn majority(&self) -> bool {
        self.p_one >= 0.5
    }
}

/// Pattern-dependent output map: explicit outputs for the four campaign
/// patterns, extended to arbitrary patterns through the written bit and the
/// XOR of the neighboring written bits (the coupling surrogate).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PdMap {
    /// Outputs for [0xFF, 0xAA, 0x55, 0x00].
    pub campaign: [bool; 4],
    /// Outputs for other patterns, indexed by `written_bit * 2 + neighbor_xor`.
    pub extended: [bool; 4],
    /// Word bit position parity the map was built for (decides written bits).
    pub even_position: bool,
}

impl PdMap {
    /// Output for a written pattern at word bit position `bit`.
    pub fn output(&self, pattern: u8, bit: usize) -> bool {
        if let Some(i) = CAMPAIGN_PATTERNS.iter().position(|&p| p == pattern) {
            return self.campaign[i];
        }
        let written = pattern_bit(pattern, bit);
        let left = pattern_bit(pattern, bit + 1);
        let right = pattern_bit(pattern, bit + 7);
        let idx = usize::from(written) * 2 + usize::from(left ^ right);
        self.extended[idx]
    }
}

/// What one cell does when the fault surface is active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellBehavior {
    NonFaulty,
    PatternIndependent(bool),
    PatternDependent(PdMap),
    Noisy(NoisyCell),
}

impl CellBehavior {
    pub fn is_pattern_independent(&self) -> bool {
        matches!(self, CellBehavior::PatternIndependent(_))
    }
}

/// How much randomness a read carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// Deterministic fault surface: noisy cells freeze to their nominal
    /// rail, no drift, row carryover applies to every cell. Used for golden
    /// replays.
    Disabled,
    /// Sample noisy-cell flicker with this seed. Models reads on the
    /// stabilized enrollment rig.
    Seeded(u64),
    /// Flicker plus the profile's residual per-read drift. Models field
    /// evaluation sessions some time after enrollment.
    SeededWithDrift(u64),
}

impl NoiseMode {
    fn seed(&self) -> Option<u64> {
        match self {
            NoiseMode::Disabled => None,
            NoiseMode::Seeded(s) | NoiseMode::SeededWithDrift(s) => Some(*s),
        }
    }

    fn drift(&self) -> bool {
        matches!(self, NoiseMode::SeededWithDrift(_))
    }
}

/// A bank realized from a profile. Immutable; reads are pure functions of
/// `(bank, arguments, noise seed)`.
#[derive(Debug, Clone)]
pub struct SimulatedBank {
    profile: ProcessProfile,
    /// One-rate of pattern-independent cells per word bit position.
    lane_one_rate: Vec<f64>,
    /// Forced value per bit position, if any.
    forced: Vec<Option<bool>>,
    /// Valid pattern-dependent campaign tables per position parity.
    pd_tables_even: Vec<u8>,
    pd_tables_odd: Vec<u8>,
    /// Pattern-dependent density multipliers inside/outside stripes.
    pd_in_factor: f64,
    pd_out_factor: f64,
}

/// Assign cell behaviors for a whole bank.
pub fn build_bank(profile: ProcessProfile) -> Result<SimulatedBank> {
    profile.validate()?;
    let width = profile.geometry.word_width();
    let plan = profile.lane_plan;
    let skew = profile.skew_one_rate()?;

    let mut lane_one_rate: Vec<f64> = Vec::with_capacity(width);
    for k in 0..plan.balanced_lanes {
        let q = (k as f64 + 0.5) / plan.balanced_lanes as f64;
        let rate = plan.balanced_mean + plan.balanced_sd * inv_norm_cdf(q);
        lane_one_rate.push(rate.clamp(0.001, 0.999));
    }
    lane_one_rate.resize(width, skew);
    let mut perm = SplitMix64::new(derive(profile.seed, D_LANE_PERM, 0));
    perm.shuffle(&mut lane_one_rate);

    let mut forced = alloc::vec![None; width];
    for bias in &profile.bit_position_bias {
        forced[bias.bit] = Some(bias.value);
    }

    let (pd_in_factor, pd_out_factor) = match &profile.pd_clustering {
        Some(pd) => {
            let stripe = 1.0 / pd.row_period as f64 + 1.0 / pd.col_period as f64
                - 1.0 / (pd.row_period * pd.col_period) as f64;
            if stripe * pd.boost > 1.0 {
                return Err(Error::Config(alloc::format!(
                    "pd_clustering boost {} saturates the stripe fraction {stripe}",
                    pd.boost
                )));
            }
            (pd.boost, (1.0 - stripe * pd.boost) / (1.0 - stripe))
        }
        None => (1.0, 1.0),
    };

    Ok(SimulatedBank {
        lane_one_rate,
        forced,
        pd_tables_even: valid_pd_tables(true),
        pd_tables_odd: valid_pd_tables(false),
        pd_in_factor,
        pd_out_factor,
        profile,
    })
}

/// Campaign truth tables that are neither constant nor the identity on the
/// written bit for this position parity.
fn valid_pd_tables(even_position: bool) -> Vec<u8> {
    // Table bit i = output for CAMPAIGN_PATTERNS[i].
    let identity: u8 = CAMPAIGN_PATTERNS
        .iter()
        .enumerate()
        .map(|(i, &p)| u8::from(pattern_bit(p, if even_position { 0 } else { 1 })) << i)
        .sum();
    (0u8..16)
        .filter(|&t| t != 0 && t != 0x0F && t != identity)
        .collect()
}

impl SimulatedBank {
    pub fn profile(&self) -> &ProcessProfile {
        &self.profile
    }

    pub fn geometry(&self) -> crate::geometry::BankGeometry {
        self.profile.geometry
    }

    /// One-rate assigned to a word bit position.
    pub fn lane_one_rate(&self, bit: usize) -> f64 {
        self.lane_one_rate[bit]
    }

    /// The behavior planted at a cell.
    pub fn behavior_at(&self, addr: CellAddress) -> Result<CellBehavior> {
        let idx = crate::geometry::linearize(addr, self.profile.geometry)?;
        Ok(self.behavior(idx))
    }

    /// The behavior planted at a linear cell index.
    pub fn behavior(&self, idx: usize) -> CellBehavior {
        let geom = self.profile.geometry;
        let bit = idx % geom.word_width();
        if let Some(value) = self.forced[bit] {
            return CellBehavior::PatternIndependent(value);
        }
        let word = idx / geom.word_width();
        let col = word % geom.cols();
        let row = word / geom.cols();

        let mix = &self.profile.class_mix;
        let pd_prob = mix.pattern_dependent * self.pd_factor(row, col);
        let u = self.unit(D_CLASS, idx);
        if u < pd_prob {
            return CellBehavior::PatternDependent(self.pd_map(idx, bit));
        }
        if u < pd_prob + mix.noisy {
            return CellBehavior::Noisy(self.noisy_cell(idx));
        }
        if u < pd_prob + mix.noisy + mix.non_faulty {
            return CellBehavior::NonFaulty;
        }
        let one = self.unit(D_PI_VALUE, idx) < self.lane_one_rate[bit];
        CellBehavior::PatternIndependent(one)
    }

    fn pd_factor(&self, row: usize, col: usize) -> f64 {
        match &self.profile.pd_clustering {
            Some(pd) => {
                if row % pd.row_period == 0 || col % pd.col_period == 0 {
                    self.pd_in_factor
                } else {
                    self.pd_out_factor
                }
            }
            None => 1.0,
        }
    }

    fn noisy_cell(&self, idx: usize) -> NoisyCell {
        let noisy = &self.profile.noisy;
        let toward_one = self.unit(D_NOISY_BIAS, idx) < noisy.bias_toward_one;
        let flip =
            noisy.flip_min + (noisy.flip_max - noisy.flip_min) * self.unit(D_NOISY_FLIP, idx);
        NoisyCell {
            p_one: if toward_one { 1.0 - flip } else { flip },
            voltage_sensitivity_per_mv: noisy.voltage_sensitivity_per_mv,
            temperature_sensitivity_per_c: noisy.temperature_sensitivity_per_c,
        }
    }

    fn pd_map(&self, idx: usize, bit: usize) -> PdMap {
        let even_position = bit % 2 == 0;
        let tables = if even_position {
            &self.pd_tables_even
        } else {
            &self.pd_tables_odd
        };
        let pick = (self.unit(D_PD_TABLE, idx) * tables.len() as f64) as usize;
        let table = tables[pick.min(tables.len() - 1)];
        let ext = (derive(self.profile.seed, D_PD_EXT, idx as u64) & 0x0F) as u8;
        PdMap {
            campaign: [
                table & 1 != 0,
                table & 2 != 0,
                table & 4 != 0,
                table & 8 != 0,
            ],
            extended: [ext & 1 != 0, ext & 2 != 0, ext & 4 != 0, ext & 8 != 0],
            even_position,
        }
    }

    /// t_RP below which this cell's fault class expresses.
    fn onset_ns(&self, idx: usize) -> f64 {
        let trp = &self.profile.trp;
        if self.unit(D_ONSET_EARLY, idx) < trp.early_onset_fraction {
            return trp.first_error_ns;
        }
        let u = self.unit(D_ONSET_POS, idx);
        trp.puf_ns + (trp.first_error_ns - trp.puf_ns) * libm::pow(u, trp.onset_exponent)
    }

    #[inline]
    fn unit(&self, domain: u64, idx: usize) -> f64 {
        unit_f64(derive(self.profile.seed, domain, idx as u64))
    }

    /// Value of one cell with its fault class active.
    fn faulty_value(
        &self,
        idx: usize,
        bit: usize,
        pattern: u8,
        condition: &OperatingCondition,
        noise: NoiseMode,
    ) -> bool {
        match self.behavior(idx) {
            CellBehavior::NonFaulty => pattern_bit(pattern, bit),
            CellBehavior::PatternIndependent(v) => v,
            CellBehavior::PatternDependent(map) => map.output(pattern, bit),
            CellBehavior::Noisy(cell) => match noise.seed() {
                None => cell.majority(),
                Some(seed) => {
                    unit_f64(derive(seed, D_READ_NOISY, idx as u64)) < cell.p_one_at(condition)
                }
            },
        }
    }

    #[inline]
    fn drift_flip(&self, idx: usize, noise: NoiseMode) -> bool {
        match (noise.drift(), noise.seed()) {
            (true, Some(seed)) => {
                unit_f64(derive(seed, D_READ_DRIFT, idx as u64)) < self.profile.session_flip_prob
            }
            _ => false,
        }
    }

    fn blank_frame(&self, pattern: u8) -> BitMatrix {
        ReadoutFrame::written_reference(pattern, self.profile.geometry)
    }

    /// Read at nominal timing: the written image, exactly.
    pub fn read_nominal(&self, pattern: u8) -> ReadoutFrame {
        ReadoutFrame::new(
            self.profile.geometry,
            self.blank_frame(pattern),
            Provenance::Simulated,
            pattern,
            self.profile.timing,
            OperatingCondition::nvrt(),
        )
        .expect("written image matches geometry")
    }

    /// Read after a precharge violation.
    ///
    /// `previous_row` is the 8-bit pattern stored in the previously
    /// activated row; it is required when `t_rp_ns` is below the profile's
    /// row-close minimum.
    pub fn read_reduced_trp(
        &self,
        pattern: u8,
        t_rp_ns: f64,
        condition: &OperatingCondition,
        previous_row: Option<u8>,
        noise: NoiseMode,
    ) -> Result<ReadoutFrame> {
        if !(t_rp_ns > 0.0) {
            return Err(Error::Precondition(alloc::format!(
                "t_RP must be positive, got {t_rp_ns}"
            )));
        }
        let carryover = t_rp_ns < self.profile.trp.min_close_ns;
        if carryover && previous_row.is_none() {
            return Err(Error::Precondition(alloc::string::String::from(
                "t_RP below the row-close minimum requires previous_row content",
            )));
        }

        let geom = self.profile.geometry;
        let width = geom.word_width();
        let mut bits = self.blank_frame(pattern);
        let saturated = t_rp_ns <= self.profile.trp.puf_ns;
        let quiescent = t_rp_ns > self.profile.trp.first_error_ns;

        for idx in 0..geom.total_cells() {
            let bit = idx % width;
            if carryover {
                let carries = match noise.seed() {
                    None => true,
                    Some(seed) => {
                        unit_f64(derive(seed, D_READ_CARRY, idx as u64))
                            < self.profile.trp.carryover_probability
                    }
                };
                if carries {
                    let prev = pattern_bit(previous_row.unwrap(), bit);
                    bits.set(idx, prev != self.drift_flip(idx, noise));
                    continue;
                }
            }
            let expressed = saturated || (!quiescent && t_rp_ns <= self.onset_ns(idx));
            let mut value = if expressed {
                self.faulty_value(idx, bit, pattern, condition, noise)
            } else {
                pattern_bit(pattern, bit)
            };
            value ^= self.drift_flip(idx, noise);
            if value != pattern_bit(pattern, bit) {
                bits.set(idx, value);
            }
        }

        ReadoutFrame::new(
            geom,
            bits,
            Provenance::Simulated,
            pattern,
            self.profile.timing.with_t_rp(t_rp_ns)?,
            *condition,
        )
    }

    /// Read after an activation violation: the fault surface applies only
    /// inside the first accessed cache line, everything else is exact.
    pub fn read_reduced_trcd(
        &self,
        pattern: u8,
        t_rcd_ns: f64,
        condition: &OperatingCondition,
        noise: NoiseMode,
    ) -> Result<ReadoutFrame> {
        if !(t_rcd_ns > 0.0 && t_rcd_ns < self.profile.timing.t_rcd_ns) {
            return Err(Error::Precondition(alloc::format!(
                "t_RCD must be in (0, {}), got {t_rcd_ns}",
                self.profile.timing.t_rcd_ns
            )));
        }
        let geom = self.profile.geometry;
        let width = geom.word_width();
        let line_words = geom.cache_line_words().min(geom.cols());
        let mut bits = self.blank_frame(pattern);

        for row in 0..geom.rows() {
            for col in 0..line_words {
                let base = (row * geom.cols() + col) * width;
                for bit in 0..width {
                    let idx = base + bit;
                    let mut value = self.faulty_value(idx, bit, pattern, condition, noise);
                    value ^= self.drift_flip(idx, noise);
                    if value != pattern_bit(pattern, bit) {
                        bits.set(idx, value);
                    }
                }
            }
        }

        ReadoutFrame::new(
            geom,
            bits,
            Provenance::Simulated,
            pattern,
            self.profile.timing.with_t_rcd(t_rcd_ns)?,
            *condition,
        )
    }

    /// Read after a restoration violation: modeled as error-free.
    pub fn read_reduced_tras(&self, pattern: u8, t_ras_ns: f64) -> Result<ReadoutFrame> {
        if !(t_ras_ns > 0.0 && t_ras_ns < self.profile.timing.t_ras_ns) {
            return Err(Error::Precondition(alloc::format!(
                "t_RAS must be in (0, {}), got {t_ras_ns}",
                self.profile.timing.t_ras_ns
            )));
        }
        ReadoutFrame::new(
            self.profile.geometry,
            self.blank_frame(pattern),
            Provenance::Simulated,
            pattern,
            self.profile.timing.with_t_ras(t_ras_ns)?,
            OperatingCondition::nvrt(),
        )
    }

    /// Read at the profile's t_RP,PUF.
    pub fn read_at_puf(
        &self,
        pattern: u8,
        condition: &OperatingCondition,
        noise: NoiseMode,
    ) -> Result<ReadoutFrame> {
        self.read_reduced_trp(pattern, self.profile.trp.puf_ns, condition, None, noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BankGeometry;
    use crate::profile::{ClassMix, LanePlan, ProcessProfile};

    fn profile_with_mix(mix: ClassMix, geometry: BankGeometry, seed: u64) -> ProcessProfile {
        let mut p = ProcessProfile::preset("vendor-a-bank-a", seed).unwrap();
        p.geometry = geometry;
        p.class_mix = mix;
        p.lane_plan = LanePlan {
            balanced_lanes: 0,
            balanced_mean: 0.5,
            balanced_sd: 0.0,
        };
        p.pd_clustering = None;
        p
    }

    #[test]
    fn all_pi0_mix_plants_only_pi0() {
        let geom = BankGeometry::new(8, 8, 8).unwrap();
        let mix = ClassMix::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let bank = build_bank(profile_with_mix(mix, geom, 3)).unwrap();
        for idx in 0..geom.total_cells() {
            assert_eq!(bank.behavior(idx), CellBehavior::PatternIndependent(false));
        }
    }

    #[test]
    fn same_seed_builds_identical_banks() {
        let a = build_bank(ProcessProfile::preset("vendor-a-bank-a", 42).unwrap()).unwrap();
        let b = build_bank(ProcessProfile::preset("vendor-a-bank-a", 42).unwrap()).unwrap();
        for idx in (0..a.geometry().total_cells()).step_by(997) {
            assert_eq!(a.behavior(idx), b.behavior(idx));
        }
        let fa = a
            .read_at_puf(0xAA, &OperatingCondition::nvrt(), NoiseMode::Seeded(7))
            .unwrap();
        let fb = b
            .read_at_puf(0xAA, &OperatingCondition::nvrt(), NoiseMode::Seeded(7))
            .unwrap();
        assert_eq!(fa.bits, fb.bits);
    }

    #[test]
    fn planted_frequencies_track_the_mix() {
        let bank = build_bank(ProcessProfile::preset("vendor-a-bank-a", 11).unwrap()).unwrap();
        let total = bank.geometry().total_cells();
        let mut counts = [0usize; 4];
        for idx in 0..total {
            match bank.behavior(idx) {
                CellBehavior::PatternIndependent(false) => counts[0] += 1,
                CellBehavior::PatternIndependent(true) => counts[1] += 1,
                CellBehavior::PatternDependent(_) => counts[2] += 1,
                CellBehavior::Noisy(_) => counts[3] += 1,
                CellBehavior::NonFaulty => {}
            }
        }
        let pct = |c: usize| 100.0 * c as f64 / total as f64;
        assert!((pct(counts[0]) - 85.825).abs() < 0.5, "pi0 {}", pct(counts[0]));
        assert!((pct(counts[1]) - 12.631).abs() < 0.5, "pi1 {}", pct(counts[1]));
        assert!((pct(counts[2]) - 0.006).abs() < 0.5);
        assert!((pct(counts[3]) - 1.537).abs() < 0.5, "noisy {}", pct(counts[3]));
    }

    #[test]
    fn forced_positions_override_the_mix() {
        let geom = BankGeometry::new(8, 8, 8).unwrap();
        let mix = ClassMix::new(0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let mut profile = profile_with_mix(mix, geom, 5);
        profile.bit_position_bias = alloc::vec![
            crate::profile::BitPositionBias { bit: 4, value: false },
            crate::profile::BitPositionBias { bit: 5, value: false },
        ];
        let bank = build_bank(profile).unwrap();
        for idx in 0..geom.total_cells() {
            let expected = !matches!(idx % 8, 4 | 5);
            assert_eq!(
                bank.behavior(idx),
                CellBehavior::PatternIndependent(expected),
                "idx {idx}"
            );
        }
    }

    #[test]
    fn nominal_read_returns_the_written_image() {
        let bank = build_bank(ProcessProfile::preset("vendor-b-bank-a", 9).unwrap()).unwrap();
        for pattern in [0xAA, 0x00, 0x5C] {
            assert_eq!(bank.read_nominal(pattern).errors_vs_written(), 0);
        }
    }

    #[test]
    fn pi0_cells_fail_under_all_ones_at_puf() {
        let geom = BankGeometry::new(4, 8, 8).unwrap();
        let mix = ClassMix::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let bank = build_bank(profile_with_mix(mix, geom, 1)).unwrap();
        let frame = bank
            .read_at_puf(0xFF, &OperatingCondition::nvrt(), NoiseMode::Seeded(1))
            .unwrap();
        assert_eq!(frame.errors_vs_written(), geom.total_cells());
        let frame = bank
            .read_at_puf(0x00, &OperatingCondition::nvrt(), NoiseMode::Seeded(1))
            .unwrap();
        assert_eq!(frame.errors_vs_written(), 0);
    }

    #[test]
    fn all_ones_pattern_fails_far_more_than_all_zeros_on_pi0_dominant_bank() {
        let bank = build_bank(ProcessProfile::preset("vendor-a-bank-a", 17).unwrap()).unwrap();
        let ones = bank
            .read_at_puf(0xFF, &OperatingCondition::nvrt(), NoiseMode::Seeded(2))
            .unwrap()
            .errors_vs_written();
        let zeros = bank
            .read_at_puf(0x00, &OperatingCondition::nvrt(), NoiseMode::Seeded(3))
            .unwrap()
            .errors_vs_written();
        assert!(
            ones > 4 * zeros,
            "expected 0xFF failures to dominate: {ones} vs {zeros}"
        );
    }

    #[test]
    fn noisy_cell_with_half_bias_reads_one_about_half_the_time() {
        let geom = BankGeometry::new(1, 1, 1).unwrap();
        let mix = ClassMix::new(0.0, 0.0, 0.0, 1.0, 0.0).unwrap();
        let mut profile = profile_with_mix(mix, geom, 77);
        profile.noisy.flip_min = 0.5;
        profile.noisy.flip_max = 0.5;
        let bank = build_bank(profile).unwrap();
        let mut ones = 0usize;
        for read in 0..1000u64 {
            let frame = bank
                .read_at_puf(0x00, &OperatingCondition::nvrt(), NoiseMode::Seeded(read))
                .unwrap();
            if frame.bits.get(0) {
                ones += 1;
            }
        }
        let fraction = ones as f64 / 1000.0;
        assert!((0.45..=0.55).contains(&fraction), "fraction {fraction}");
    }

    #[test]
    fn error_volume_grows_as_trp_shrinks() {
        let bank = build_bank(ProcessProfile::preset("vendor-a-bank-a", 23).unwrap()).unwrap();
        let total = bank.geometry().total_cells() as f64;
        let fraction = |t_rp: f64| {
            bank.read_reduced_trp(
                0xFF,
                t_rp,
                &OperatingCondition::nvrt(),
                None,
                NoiseMode::Seeded(5),
            )
            .unwrap()
            .errors_vs_written() as f64
                / total
        };
        let at_first = fraction(7.5);
        let at_mid = fraction(5.0);
        let at_puf = fraction(2.5);
        assert!(at_first > 0.0 && at_first < 0.01, "first errors {at_first}");
        assert!(at_mid < 0.01, "mid {at_mid}");
        assert!(at_mid >= at_first);
        assert!(at_puf > 0.5, "saturated {at_puf}");
        assert_eq!(fraction(9.0), 0.0);
    }

    #[test]
    fn carryover_below_min_close_requires_previous_row() {
        let bank = build_bank(ProcessProfile::preset("vendor-a-bank-d", 3).unwrap()).unwrap();
        let err = bank.read_reduced_trp(
            0xFF,
            2.5,
            &OperatingCondition::nvrt(),
            None,
            NoiseMode::Seeded(1),
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
        // With the previous row supplied, most cells return its content.
        let frame = bank
            .read_reduced_trp(
                0xFF,
                2.5,
                &OperatingCondition::nvrt(),
                Some(0x00),
                NoiseMode::Seeded(1),
            )
            .unwrap();
        let zeros = frame.bits.len() - frame.bits.count_ones();
        assert!(zeros as f64 > 0.8 * frame.bits.len() as f64);
    }

    #[test]
    fn reduced_trcd_confines_errors_to_the_first_cache_line() {
        let bank = build_bank(ProcessProfile::preset("vendor-a-bank-a", 31).unwrap()).unwrap();
        let frame = bank
            .read_reduced_trcd(0xFF, 5.0, &OperatingCondition::nvrt(), NoiseMode::Seeded(4))
            .unwrap();
        let geom = bank.geometry();
        let failed = frame.failed_bits();
        let line = geom.cache_line_words();
        let mut outside = 0usize;
        for idx in 0..geom.total_cells() {
            if failed.get(idx) {
                let col = (idx / geom.word_width()) % geom.cols();
                if col >= line {
                    outside += 1;
                }
            }
        }
        assert_eq!(outside, 0);
        assert!(failed.count_ones() > 0);
    }

    #[test]
    fn reduced_tras_reads_are_error_free() {
        let bank = build_bank(ProcessProfile::preset("vendor-b-bank-b", 13).unwrap()).unwrap();
        let frame = bank.read_reduced_tras(0xAA, 10.0).unwrap();
        assert_eq!(frame.errors_vs_written(), 0);
        assert_eq!(frame.bits, bank.read_nominal(0xAA).bits);
    }

    #[test]
    fn pd_maps_are_never_constant_or_identity() {
        for even in [true, false] {
            for table in valid_pd_tables(even) {
                assert_ne!(table, 0);
                assert_ne!(table, 0x0F);
            }
            assert_eq!(valid_pd_tables(even).len(), 13);
        }
    }

    #[test]
    fn pi_cells_are_condition_invariant_at_puf() {
        let bank = build_bank(ProcessProfile::preset("vendor-a-bank-a", 51).unwrap()).unwrap();
        let nvrt = bank
            .read_at_puf(0xFF, &OperatingCondition::nvrt(), NoiseMode::Seeded(8))
            .unwrap();
        let nvht = bank
            .read_at_puf(
                0xFF,
                &bank.profile().condition(crate::condition::ConditionLabel::Nvht).unwrap(),
                NoiseMode::Seeded(8),
            )
            .unwrap();
        for idx in 0..bank.geometry().total_cells() {
            if bank.behavior(idx).is_pattern_independent() {
                assert_eq!(nvrt.bits.get(idx), nvht.bits.get(idx));
            }
        }
    }
}
