//! Measurement campaigns: the (pattern x repeat) grid of readouts that
//! feeds classification, plus the failed-bit sets used by the robustness
//! comparison.

use crate::bank::{NoiseMode, SimulatedBank};
use crate::bits::BitMatrix;
use crate::condition::OperatingCondition;
use crate::error::Error;
use crate::frame::ReadoutFrame;
use crate::geometry::BankGeometry;
use crate::rng::derive;
use crate::Result;
use alloc::vec::Vec;

const D_CAMPAIGN_READ: u64 = 0x30;

/// Anything that can produce the frame for a (pattern, repeat) grid slot:
/// a simulated bank or a directory of ingested traces.
pub trait FrameSource {
    fn geometry(&self) -> BankGeometry;
    fn frame(&self, pattern: u8, repeat: usize) -> Result<ReadoutFrame>;
}

/// Frame source backed by a simulated bank read at t_RP,PUF. Each grid
/// slot derives its own noise seed, so repeats differ exactly the way
/// repeated measurements do.
pub struct SimulatedSource<'a> {
    pub bank: &'a SimulatedBank,
    pub t_rp_puf_ns: f64,
    pub condition: OperatingCondition,
    pub noise: NoiseMode,
}

impl<'a> SimulatedSource<'a> {
    /// Source at the profile's own t_RP,PUF.
    pub fn at_puf(bank: &'a SimulatedBank, condition: OperatingCondition, noise: NoiseMode) -> Self {
        Self {
            bank,
            t_rp_puf_ns: bank.profile().trp.puf_ns,
            condition,
            noise,
        }
    }

    fn slot_noise(&self, pattern: u8, repeat: usize) -> NoiseMode {
        let slot = (u64::from(pattern) << 32) | repeat as u64;
        match self.noise {
            NoiseMode::Disabled => NoiseMode::Disabled,
            NoiseMode::Seeded(seed) => NoiseMode::Seeded(derive(seed, D_CAMPAIGN_READ, slot)),
            NoiseMode::SeededWithDrift(seed) => {
                NoiseMode::SeededWithDrift(derive(seed, D_CAMPAIGN_READ, slot))
            }
        }
    }
}

impl FrameSource for SimulatedSource<'_> {
    fn geometry(&self) -> BankGeometry {
        self.bank.geometry()
    }

    fn frame(&self, pattern: u8, repeat: usize) -> Result<ReadoutFrame> {
        self.bank.read_reduced_trp(
            pattern,
            self.t_rp_puf_ns,
            &self.condition,
            None,
            self.slot_noise(pattern, repeat),
        )
    }
}

/// The complete campaign: one frame per (pattern, repeat), all sharing one
/// geometry, one t_RP,PUF, and one condition.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    geometry: BankGeometry,
    patterns: Vec<u8>,
    repeats: usize,
    t_rp_puf_ns: f64,
    condition: OperatingCondition,
    /// Pattern-major: `frames[p * repeats + r]`.
    frames: Vec<ReadoutFrame>,
}

impl MeasurementSet {
    /// Assemble from frames collected elsewhere (trace ingestion). The grid
    /// must be complete; missing slots are reported.
    pub fn from_frames(
        patterns: Vec<u8>,
        repeats: usize,
        t_rp_puf_ns: f64,
        mut available: Vec<ReadoutFrame>,
    ) -> Result<Self> {
        if patterns.is_empty() || repeats == 0 {
            return Err(Error::Precondition(alloc::string::String::from(
                "campaign needs at least one pattern and one repeat",
            )));
        }
        let first_geometry = available
            .first()
            .map(|f| f.geometry)
            .ok_or_else(|| Error::IncompleteCampaign {
                missing: patterns.iter().flat_map(|&p| (0..repeats).map(move |r| (p, r))).collect(),
            })?;
        let condition = available[0].condition;
        for frame in &available {
            if frame.geometry != first_geometry {
                return Err(Error::Consistency(alloc::string::String::from(
                    "campaign frames disagree on geometry",
                )));
            }
            if frame.condition != condition {
                return Err(Error::Consistency(alloc::string::String::from(
                    "campaign frames disagree on operating condition",
                )));
            }
        }

        let mut frames: Vec<ReadoutFrame> = Vec::with_capacity(patterns.len() * repeats);
        let mut missing: Vec<(u8, usize)> = Vec::new();
        for &pattern in &patterns {
            let mut of_pattern: Vec<ReadoutFrame> = Vec::new();
            let mut i = 0;
            while i < available.len() {
                if available[i].pattern == pattern {
                    of_pattern.push(available.remove(i));
                } else {
                    i += 1;
                }
            }
            for repeat in 0..repeats {
                match of_pattern.get(repeat) {
                    Some(frame) => frames.push(frame.clone()),
                    None => missing.push((pattern, repeat)),
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::IncompleteCampaign { missing });
        }
        Ok(Self {
            geometry: first_geometry,
            patterns,
            repeats,
            t_rp_puf_ns,
            condition,
            frames,
        })
    }

    pub fn geometry(&self) -> BankGeometry {
        self.geometry
    }

    pub fn patterns(&self) -> &[u8] {
        &self.patterns
    }

    pub fn repeats(&self) -> usize {
        self.repeats
    }

    pub fn t_rp_puf_ns(&self) -> f64 {
        self.t_rp_puf_ns
    }

    pub fn condition(&self) -> &OperatingCondition {
        &self.condition
    }

    pub fn frame(&self, pattern_index: usize, repeat: usize) -> &ReadoutFrame {
        &self.frames[pattern_index * self.repeats + repeat]
    }

    pub fn frames(&self) -> &[ReadoutFrame] {
        &self.frames
    }

    /// Cells that read incorrectly anywhere in the campaign: the union of
    /// per-frame failed bits over every pattern and repeat.
    pub fn failed_bit_set(&self) -> BitMatrix {
        let mut failed = BitMatrix::zeros(self.geometry.total_cells());
        for frame in &self.frames {
            failed
                .union_with(&frame.failed_bits())
                .expect("frames share the geometry");
        }
        failed
    }
}

/// Run the (patterns x repeats) grid against a source.
pub fn run_campaign<S: FrameSource>(
    source: &S,
    patterns: &[u8],
    repeats: usize,
    t_rp_puf_ns: f64,
) -> Result<MeasurementSet> {
    if repeats < 2 {
        return Err(Error::Precondition(alloc::format!(
            "classification needs at least 2 repeats, got {repeats}"
        )));
    }
    if patterns.is_empty() {
        return Err(Error::Precondition(alloc::string::String::from(
            "campaign needs at least one pattern",
        )));
    }
    for (i, p) in patterns.iter().enumerate() {
        if patterns[..i].contains(p) {
            return Err(Error::Precondition(alloc::format!(
                "duplicate campaign pattern 0x{p:02X}"
            )));
        }
    }
    let mut frames = Vec::with_capacity(patterns.len() * repeats);
    for &pattern in patterns {
        for repeat in 0..repeats {
            frames.push(source.frame(pattern, repeat)?);
        }
    }
    MeasurementSet::from_frames(patterns.to_vec(), repeats, t_rp_puf_ns, frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::build_bank;
    use crate::profile::{ClassMix, LanePlan, ProcessProfile};

    fn small_bank(mix: ClassMix, seed: u64) -> SimulatedBank {
        let mut profile = ProcessProfile::preset("vendor-a-bank-a", seed).unwrap();
        profile.geometry = BankGeometry::new(4, 8, 8).unwrap();
        profile.class_mix = mix;
        profile.lane_plan = LanePlan {
            balanced_lanes: 0,
            balanced_mean: 0.5,
            balanced_sd: 0.0,
        };
        profile.pd_clustering = None;
        build_bank(profile).unwrap()
    }

    #[test]
    fn four_patterns_five_repeats_is_twenty_frames() {
        let bank = small_bank(ClassMix::new(0.5, 0.5, 0.0, 0.0, 0.0).unwrap(), 1);
        let source = SimulatedSource::at_puf(&bank, OperatingCondition::nvrt(), NoiseMode::Seeded(1));
        let ms = run_campaign(&source, &crate::bank::CAMPAIGN_PATTERNS, 5, 2.5).unwrap();
        assert_eq!(ms.frames().len(), 20);
    }

    #[test]
    fn non_faulty_bank_yields_identical_error_free_frames() {
        let bank = small_bank(ClassMix::new(0.0, 0.0, 0.0, 0.0, 1.0).unwrap(), 2);
        let source = SimulatedSource::at_puf(&bank, OperatingCondition::nvrt(), NoiseMode::Seeded(9));
        let ms = run_campaign(&source, &[0xAA], 2, 2.5).unwrap();
        assert_eq!(ms.frame(0, 0).errors_vs_written(), 0);
        assert_eq!(ms.frame(0, 0).bits, ms.frame(0, 1).bits);
    }

    #[test]
    fn noisy_bank_shows_disagreeing_repeats() {
        let bank = small_bank(ClassMix::new(0.0, 0.0, 0.0, 1.0, 0.0).unwrap(), 3);
        let source = SimulatedSource::at_puf(&bank, OperatingCondition::nvrt(), NoiseMode::Seeded(4));
        let ms = run_campaign(&source, &[0xFF], 5, 2.5).unwrap();
        let mut disagreements = 0usize;
        for idx in 0..bank.geometry().total_cells() {
            let first = ms.frame(0, 0).bits.get(idx);
            if (1..5).any(|r| ms.frame(0, r).bits.get(idx) != first) {
                disagreements += 1;
            }
        }
        assert!(disagreements > 0);
    }

    #[test]
    fn missing_grid_slots_are_listed() {
        let bank = small_bank(ClassMix::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap(), 4);
        let f1 = bank
            .read_at_puf(0xFF, &OperatingCondition::nvrt(), NoiseMode::Seeded(0))
            .unwrap();
        let err = MeasurementSet::from_frames(alloc::vec![0xFF, 0x00], 2, 2.5, alloc::vec![f1]);
        match err {
            Err(Error::IncompleteCampaign { missing }) => {
                assert!(missing.contains(&(0xFF, 1)));
                assert!(missing.contains(&(0x00, 0)));
                assert!(missing.contains(&(0x00, 1)));
            }
            other => panic!("expected incomplete campaign, got {other:?}"),
        }
    }

    #[test]
    fn fewer_than_two_repeats_is_rejected() {
        let bank = small_bank(ClassMix::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap(), 5);
        let source = SimulatedSource::at_puf(&bank, OperatingCondition::nvrt(), NoiseMode::Seeded(0));
        assert!(matches!(
            run_campaign(&source, &[0xFF], 1, 2.5),
            Err(Error::Precondition(_))
        ));
    }
}
