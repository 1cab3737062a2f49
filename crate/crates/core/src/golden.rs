//! Enrollment: the golden data set, key extraction, and verification.
//!
//! The golden data set marks the pattern-independent cells at qualified
//! (row, bit) positions, stores their constant values and the t_RP,PUF they
//! were measured at, and fingerprints the source campaign so stale
//! enrollments are detectable.

use crate::bits::BitMatrix;
use crate::classify::CellClassMap;
use crate::error::Error;
use crate::frame::ReadoutFrame;
use crate::geometry::BankGeometry;
use crate::select::{SelectionParams, SelectionResult};
use crate::Result;
use alloc::string::String;
use alloc::vec::Vec;

/// Key bits are emitted column by column, and within a column in ascending
/// eligible-bit order.
pub const EXTRACTION_ORDER: &str = "word-major:beta-ascending";

/// The enrollment artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenDataSet {
    pub geometry: BankGeometry,
    pub t_rp_puf_ns: f64,
    pub params: SelectionParams,
    /// Marked cells, one bit per cell of the bank.
    pub locations: BitMatrix,
    /// Stored value per cell; meaningful only where `locations` is set.
    pub values: BitMatrix,
    /// Qualified rows, ascending.
    pub rows: Vec<usize>,
    /// Eligible bit positions per qualified row, aligned with `rows`.
    pub bits_per_row: Vec<Vec<usize>>,
    /// Content hash of the source class map.
    pub fingerprint: u64,
    pub extraction_order: String,
}

impl GoldenDataSet {
    pub fn eligible_bits(&self, row: usize) -> Option<&[usize]> {
        self.rows
            .binary_search(&row)
            .ok()
            .map(|i| self.bits_per_row[i].as_slice())
    }

    pub fn marked_count(&self) -> usize {
        self.locations.count_ones()
    }

    /// Linear indices of the golden cells of one row, in extraction order.
    pub fn row_golden_indices(&self, row: usize) -> Result<Vec<usize>> {
        let bits = self
            .eligible_bits(row)
            .ok_or(Error::NotQualified { row })?;
        let width = self.geometry.word_width();
        let mut indices = Vec::new();
        for col in 0..self.geometry.cols() {
            let base = (row * self.geometry.cols() + col) * width;
            for &bit in bits {
                let idx = base + bit;
                if self.locations.get(idx) {
                    indices.push(idx);
                }
            }
        }
        Ok(indices)
    }
}

/// FNV-1a over the class map content; identifies the source campaign.
pub fn fingerprint_class_map(cm: &CellClassMap) -> u64 {
    let mut hash: u64 = 0xCBF2_9CE4_8422_2325;
    let mut eat = |byte: u8| {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    };
    for value in [
        cm.geometry().rows() as u64,
        cm.geometry().cols() as u64,
        cm.geometry().word_width() as u64,
        cm.t_rp_puf_ns().to_bits(),
    ] {
        for byte in value.to_le_bytes() {
            eat(byte);
        }
    }
    for &pattern in cm.patterns() {
        eat(pattern);
    }
    for &code in cm.class_codes() {
        eat(code);
    }
    hash
}

/// Produce the golden data set from a classified map and its selection.
pub fn generate_golden(
    cm: &CellClassMap,
    sel: &SelectionResult,
    t_rp_puf_ns: f64,
) -> Result<GoldenDataSet> {
    let geom = cm.geometry();
    for lane in &sel.lanes {
        if lane.row >= geom.rows() || lane.bit >= geom.word_width() {
            return Err(Error::Consistency(alloc::format!(
                "selection lane ({}, {}) is outside the class-map geometry",
                lane.row,
                lane.bit
            )));
        }
    }

    let width = geom.word_width();
    let mut locations = BitMatrix::zeros(geom.total_cells());
    let mut values = BitMatrix::zeros(geom.total_cells());
    for (row_index, &row) in sel.rows.iter().enumerate() {
        for col in 0..geom.cols() {
            let base = (row * geom.cols() + col) * width;
            for &bit in &sel.bits_per_row[row_index] {
                let idx = base + bit;
                if let Some(value) = cm.class(idx).pi_value() {
                    locations.set(idx, true);
                    if value {
                        values.set(idx, true);
                    }
                }
            }
        }
    }

    Ok(GoldenDataSet {
        geometry: geom,
        t_rp_puf_ns,
        params: sel.params,
        locations,
        values,
        rows: sel.rows.clone(),
        bits_per_row: sel.bits_per_row.clone(),
        fingerprint: fingerprint_class_map(cm),
        extraction_order: String::from(EXTRACTION_ORDER),
    })
}

/// A fixed-length key extracted from one qualified row. The row index is
/// the challenge.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyRecord {
    pub key_address: usize,
    pub bits: BitMatrix,
    pub extraction_order: String,
}

/// Extract the first `length` golden values of a row, in extraction order.
pub fn extract_key(gds: &GoldenDataSet, row: usize, length: usize) -> Result<KeyRecord> {
    let indices = gds.row_golden_indices(row)?;
    if indices.len() < length {
        return Err(Error::ShortRow {
            row,
            available: indices.len(),
            requested: length,
        });
    }
    let mut bits = BitMatrix::zeros(0);
    for &idx in indices.iter().take(length) {
        bits.push(gds.values.get(idx));
    }
    Ok(KeyRecord {
        key_address: row,
        bits,
        extraction_order: gds.extraction_order.clone(),
    })
}

/// Outcome of verifying a fresh response against the enrollment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOutcome {
    pub accepted: bool,
    /// Fractional Hamming distance over the row's golden cells.
    pub fractional_hd: f64,
    pub compared_bits: usize,
    pub mismatches: usize,
}

/// Compare a response frame against the golden values of one row; accept
/// when the fractional Hamming distance is at most `threshold`.
pub fn verify_response(
    gds: &GoldenDataSet,
    row: usize,
    response: &ReadoutFrame,
    threshold: f64,
) -> Result<VerifyOutcome> {
    if response.geometry != gds.geometry {
        return Err(Error::Consistency(alloc::format!(
            "response geometry {}x{}x{} does not match the enrollment",
            response.geometry.rows(),
            response.geometry.cols(),
            response.geometry.word_width()
        )));
    }
    let indices = gds.row_golden_indices(row)?;
    if indices.is_empty() {
        return Err(Error::InsufficientData(alloc::format!(
            "row {row} holds no golden cells"
        )));
    }
    let mut mismatches = 0usize;
    for &idx in &indices {
        if response.bits.get(idx) != gds.values.get(idx) {
            mismatches += 1;
        }
    }
    let fractional_hd = mismatches as f64 / indices.len() as f64;
    Ok(VerifyOutcome {
        accepted: fractional_hd <= threshold,
        fractional_hd,
        compared_bits: indices.len(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::{build_bank, NoiseMode};
    use crate::condition::OperatingCondition;
    use crate::frame::Provenance;
    use crate::select::tests::worked_example_map;
    use crate::select::{select, SelectionParams};
    use crate::timing::TimingParameters;

    fn worked_example_golden() -> (crate::classify::CellClassMap, GoldenDataSet) {
        let cm = worked_example_map();
        let params = SelectionParams::new(5.0 / 16.0, 11.0 / 16.0).unwrap();
        let sel = select(&cm, params);
        let gds = generate_golden(&cm, &sel, 2.5).unwrap();
        (cm, gds)
    }

    #[test]
    fn worked_example_marks_32_locations_with_matching_values() {
        let (_, gds) = worked_example_golden();
        assert_eq!(gds.marked_count(), 32);
        let key = extract_key(&gds, 0, 32).unwrap();
        let got: alloc::string::String =
            key.bits.iter().map(|b| if b { '1' } else { '0' }).collect();
        assert_eq!(got, "11001010001101000111000111011001");
    }

    #[test]
    fn empty_selection_yields_an_empty_golden_set() {
        let cm = worked_example_map();
        // A window nothing passes (lane weights are 15/16 at most).
        let sel = select(&cm, SelectionParams::new(0.95, 0.99).unwrap());
        let gds = generate_golden(&cm, &sel, 2.5).unwrap();
        assert_eq!(gds.marked_count(), 0);
        assert!(gds.rows.is_empty());
    }

    #[test]
    fn enrollment_is_idempotent() {
        let (_, a) = worked_example_golden();
        let (_, b) = worked_example_golden();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint, b.fingerprint);
    }

    #[test]
    fn key_length_one_is_the_first_golden_bit() {
        let (_, gds) = worked_example_golden();
        let key = extract_key(&gds, 0, 1).unwrap();
        assert_eq!(key.bits.len(), 1);
        assert!(key.bits.get(0));
    }

    #[test]
    fn short_rows_report_the_available_count() {
        let (_, gds) = worked_example_golden();
        match extract_key(&gds, 0, 64) {
            Err(Error::ShortRow {
                row: 0,
                available: 32,
                requested: 64,
            }) => {}
            other => panic!("expected short-row error, got {other:?}"),
        }
    }

    #[test]
    fn replayed_golden_response_verifies_with_zero_distance() {
        let (cm, gds) = worked_example_golden();
        let mut bits = crate::bits::BitMatrix::zeros(cm.geometry().total_cells());
        for idx in 0..cm.geometry().total_cells() {
            if gds.locations.get(idx) {
                bits.set(idx, gds.values.get(idx));
            }
        }
        let frame = ReadoutFrame::new(
            cm.geometry(),
            bits,
            Provenance::Simulated,
            0xFF,
            TimingParameters::ddr3_nominal(),
            OperatingCondition::nvrt(),
        )
        .unwrap();
        let outcome = verify_response(&gds, 0, &frame, 0.0).unwrap();
        assert!(outcome.accepted);
        assert_eq!(outcome.fractional_hd, 0.0);
    }

    #[test]
    fn fully_inverted_response_is_rejected() {
        let (cm, gds) = worked_example_golden();
        let mut bits = crate::bits::BitMatrix::zeros(cm.geometry().total_cells());
        for idx in 0..cm.geometry().total_cells() {
            if gds.locations.get(idx) {
                bits.set(idx, !gds.values.get(idx));
            }
        }
        let frame = ReadoutFrame::new(
            cm.geometry(),
            bits,
            Provenance::Simulated,
            0xFF,
            TimingParameters::ddr3_nominal(),
            OperatingCondition::nvrt(),
        )
        .unwrap();
        let outcome = verify_response(&gds, 0, &frame, 0.99).unwrap();
        assert!(!outcome.accepted);
        assert_eq!(outcome.fractional_hd, 1.0);
    }

    #[test]
    fn geometry_mismatch_is_a_consistency_error() {
        let (_, gds) = worked_example_golden();
        let other_geom = crate::geometry::BankGeometry::new(2, 16, 4).unwrap();
        let frame = ReadoutFrame::new(
            other_geom,
            crate::bits::BitMatrix::zeros(other_geom.total_cells()),
            Provenance::Simulated,
            0xFF,
            TimingParameters::ddr3_nominal(),
            OperatingCondition::nvrt(),
        )
        .unwrap();
        assert!(matches!(
            verify_response(&gds, 0, &frame, 0.3),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn noiseless_replay_from_a_simulated_bank_has_zero_distance_at_any_condition() {
        let bank = build_bank(crate::profile::ProcessProfile::preset("vendor-a-bank-a", 77).unwrap())
            .unwrap();
        let condition = OperatingCondition::nvrt();
        let source = crate::campaign::SimulatedSource::at_puf(&bank, condition, NoiseMode::Seeded(1));
        let ms =
            crate::campaign::run_campaign(&source, &crate::bank::CAMPAIGN_PATTERNS, 5, 2.5).unwrap();
        let cm = crate::classify::classify(&ms).unwrap();
        let sel = select(&cm, SelectionParams::new(0.25, 0.75).unwrap());
        let gds = generate_golden(&cm, &sel, 2.5).unwrap();
        assert!(gds.marked_count() > 0);
        let nvht = bank
            .profile()
            .condition(crate::condition::ConditionLabel::Nvht)
            .unwrap();
        for condition in [OperatingCondition::nvrt(), nvht] {
            let replay = bank.read_at_puf(0xFF, &condition, NoiseMode::Disabled).unwrap();
            for &row in gds.rows.iter().take(8) {
                let outcome = verify_response(&gds, row, &replay, 0.0).unwrap();
                assert_eq!(outcome.mismatches, 0, "row {row} at {condition}");
            }
        }
    }
}
