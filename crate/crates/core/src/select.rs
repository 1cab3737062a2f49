//! Qualified-cell selection.
//!
//! For every row and word bit position `b`, the values of the
//! pattern-independent cells in that lane form a string `V_b`. A lane
//! qualifies when the Hamming weight of `V_b`, as a fraction of its length,
//! falls strictly inside the `(h_min, h_max)` window and the lane is at
//! least `min_lane_len` cells long. Rows owning at least one qualified lane
//! form the qualified set, in ascending row order with ascending bit lists.

use crate::bits::BitMatrix;
use crate::classify::CellClassMap;
use crate::error::Error;
use crate::Result;
use alloc::vec::Vec;

/// Hamming-weight window, as fractions of the lane length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionParams {
    pub h_min: f64,
    pub h_max: f64,
    /// Lanes shorter than this carry too little evidence and are
    /// disqualified outright.
    pub min_lane_len: usize,
}

pub const DEFAULT_MIN_LANE_LEN: usize = 16;

impl SelectionParams {
    pub fn new(h_min: f64, h_max: f64) -> Result<Self> {
        Self::with_min_lane_len(h_min, h_max, DEFAULT_MIN_LANE_LEN)
    }

    pub fn with_min_lane_len(h_min: f64, h_max: f64, min_lane_len: usize) -> Result<Self> {
        if !(0.0 <= h_min && h_min < h_max && h_max <= 1.0) {
            return Err(Error::Config(alloc::format!(
                "need 0 <= h_min < h_max <= 1, got ({h_min}, {h_max})"
            )));
        }
        Ok(Self {
            h_min,
            h_max,
            min_lane_len,
        })
    }

    /// Strict window test on a lane of `len` cells with `weight` ones.
    /// Empty lanes never pass.
    pub fn passes(&self, weight: usize, len: usize) -> bool {
        if len == 0 || len < self.min_lane_len {
            return false;
        }
        let w = weight as f64;
        let n = len as f64;
        w > self.h_min * n && w < self.h_max * n
    }
}

/// Why a lane was kept or dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneDisposition {
    Qualified,
    Empty,
    BelowFloor,
    WeightOutOfWindow,
}

/// Audit record for one (row, bit) lane.
#[derive(Debug, Clone)]
pub struct LaneAudit {
    pub row: usize,
    pub bit: usize,
    pub len: usize,
    pub weight: usize,
    pub disposition: LaneDisposition,
    /// The lane string, kept for qualified lanes.
    pub string: Option<BitMatrix>,
}

/// Output of the selection pass.
#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub params: SelectionParams,
    /// Qualified rows, ascending.
    pub rows: Vec<usize>,
    /// Eligible bit positions per qualified row, ascending, aligned with
    /// `rows`.
    pub bits_per_row: Vec<Vec<usize>>,
    /// One audit record per (row, bit) lane, row-major.
    pub lanes: Vec<LaneAudit>,
}

impl SelectionResult {
    /// Eligible bit positions of a row, if it qualified.
    pub fn eligible_bits(&self, row: usize) -> Option<&[usize]> {
        self.rows
            .binary_search(&row)
            .ok()
            .map(|i| self.bits_per_row[i].as_slice())
    }

    pub fn is_qualified(&self, row: usize) -> bool {
        self.rows.binary_search(&row).is_ok()
    }

    /// Lanes disqualified only for being shorter than the floor.
    pub fn below_floor_count(&self) -> usize {
        self.lanes
            .iter()
            .filter(|l| l.disposition == LaneDisposition::BelowFloor)
            .count()
    }
}

/// The lane string `V_b` for one (row, bit): pattern-independent values in
/// ascending column order, other classes skipped. An empty string is a
/// valid result.
pub fn build_bit_string(cm: &CellClassMap, row: usize, bit: usize) -> Result<BitMatrix> {
    let geom = cm.geometry();
    if row >= geom.rows() {
        return Err(Error::OutOfBounds {
            field: "row",
            value: row,
            limit: geom.rows(),
        });
    }
    if bit >= geom.word_width() {
        return Err(Error::OutOfBounds {
            field: "bit",
            value: bit,
            limit: geom.word_width(),
        });
    }
    let width = geom.word_width();
    let mut string = BitMatrix::zeros(0);
    for col in 0..geom.cols() {
        let idx = (row * geom.cols() + col) * width + bit;
        if let Some(value) = cm.class(idx).pi_value() {
            string.push(value);
        }
    }
    Ok(string)
}

/// Run the selection over the whole map.
pub fn select(cm: &CellClassMap, params: SelectionParams) -> SelectionResult {
    let geom = cm.geometry();
    let width = geom.word_width();
    let mut rows = Vec::new();
    let mut bits_per_row = Vec::new();
    let mut lanes = Vec::with_capacity(geom.rows() * width);

    for row in 0..geom.rows() {
        let mut eligible: Vec<usize> = Vec::new();
        for bit in 0..width {
            let string = build_bit_string(cm, row, bit).expect("in-bounds lane");
            let len = string.len();
            let weight = string.count_ones();
            let disposition = if params.passes(weight, len) {
                eligible.push(bit);
                LaneDisposition::Qualified
            } else if len == 0 {
                LaneDisposition::Empty
            } else if len < params.min_lane_len {
                LaneDisposition::BelowFloor
            } else {
                LaneDisposition::WeightOutOfWindow
            };
            lanes.push(LaneAudit {
                row,
                bit,
                len,
                weight,
                disposition,
                string: (disposition == LaneDisposition::Qualified).then_some(string),
            });
        }
        if !eligible.is_empty() {
            rows.push(row);
            bits_per_row.push(eligible);
        }
    }

    SelectionResult {
        params,
        rows,
        bits_per_row,
        lanes,
    }
}

/// All eligible data bits of a qualified row, word-major: for each column
/// in ascending order, the pattern-independent values at the row's eligible
/// bit positions in ascending order. Non-PI cells at eligible positions are
/// skipped.
pub fn eligible_row_bits(
    cm: &CellClassMap,
    result: &SelectionResult,
    row: usize,
) -> Result<BitMatrix> {
    let bits = result
        .eligible_bits(row)
        .ok_or(Error::NotQualified { row })?;
    let geom = cm.geometry();
    let width = geom.word_width();
    let mut out = BitMatrix::zeros(0);
    for col in 0..geom.cols() {
        let base = (row * geom.cols() + col) * width;
        for &bit in bits {
            if let Some(value) = cm.class(base + bit).pi_value() {
                out.push(value);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::classify::CellClass;
    use crate::geometry::BankGeometry;
    use alloc::vec;

    /// The worked 16-word, 4-bit example row. Lane strings (bit 0..3):
    /// weights 15 / 7 / 2 / 9 over 16 words.
    pub(crate) fn worked_example_map() -> CellClassMap {
        let geom = BankGeometry::new(1, 16, 4).unwrap();
        let v: [[u8; 16]; 4] = [
            [1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            [1, 0, 1, 1, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 1, 0],
            [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0],
            [1, 0, 0, 0, 0, 1, 1, 0, 1, 1, 0, 1, 1, 1, 0, 1],
        ];
        let mut classes = vec![0u8; geom.total_cells()];
        for col in 0..16 {
            for bit in 0..4 {
                classes[col * 4 + bit] = if v[bit][col] == 1 {
                    CellClass::PatternIndependent1 as u8
                } else {
                    CellClass::PatternIndependent0 as u8
                };
            }
        }
        CellClassMap::from_classes(geom, 2.5, vec![0xFF, 0xAA, 0x55, 0x00], classes).unwrap()
    }

    #[test]
    fn worked_example_lane_weights() {
        let cm = worked_example_map();
        let weights: Vec<usize> = (0..4)
            .map(|bit| build_bit_string(&cm, 0, bit).unwrap().count_ones())
            .collect();
        assert_eq!(weights, vec![15, 7, 2, 9]);
        let v1 = build_bit_string(&cm, 0, 0).unwrap();
        let expected: Vec<bool> = [1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]
            .iter()
            .map(|&b| b == 1)
            .collect();
        assert_eq!(v1.iter().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn worked_example_selects_bits_two_and_four() {
        let cm = worked_example_map();
        let params = SelectionParams::new(5.0 / 16.0, 11.0 / 16.0).unwrap();
        let result = select(&cm, params);
        assert_eq!(result.rows, vec![0]);
        // One-based bits {2, 4} are zero-based {1, 3}.
        assert_eq!(result.bits_per_row, vec![vec![1, 3]]);
    }

    #[test]
    fn worked_example_row_bits_match_the_expected_string() {
        let cm = worked_example_map();
        let params = SelectionParams::new(5.0 / 16.0, 11.0 / 16.0).unwrap();
        let result = select(&cm, params);
        let m = eligible_row_bits(&cm, &result, 0).unwrap();
        let expected = "11001010001101000111000111011001";
        let got: alloc::string::String =
            m.iter().map(|b| if b { '1' } else { '0' }).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn empty_lane_is_a_valid_empty_string() {
        let geom = BankGeometry::new(1, 4, 2).unwrap();
        let classes = vec![CellClass::NonFaulty as u8; geom.total_cells()];
        let cm = CellClassMap::from_classes(geom, 2.5, vec![0xFF, 0x00], classes).unwrap();
        let lane = build_bit_string(&cm, 0, 0).unwrap();
        assert_eq!(lane.len(), 0);
        let result = select(&cm, SelectionParams::new(0.25, 0.75).unwrap());
        assert!(result.rows.is_empty());
    }

    #[test]
    fn lane_length_counts_only_pi_cells() {
        let geom = BankGeometry::new(1, 8, 1).unwrap();
        let classes = vec![
            CellClass::PatternIndependent1 as u8,
            CellClass::Noisy as u8,
            CellClass::PatternIndependent0 as u8,
            CellClass::PatternDependent as u8,
            CellClass::PatternIndependent1 as u8,
            CellClass::NonFaulty as u8,
            CellClass::PatternIndependent0 as u8,
            CellClass::PatternIndependent1 as u8,
        ];
        let cm = CellClassMap::from_classes(geom, 2.5, vec![0xFF, 0x00], classes).unwrap();
        let lane = build_bit_string(&cm, 0, 0).unwrap();
        assert_eq!(lane.len(), 5);
        assert_eq!(lane.count_ones(), 3);
    }

    #[test]
    fn widening_the_window_never_removes_lanes() {
        let cm = worked_example_map();
        let narrow = select(&cm, SelectionParams::new(6.0 / 16.0, 8.0 / 16.0).unwrap());
        let wide = select(&cm, SelectionParams::new(1.0 / 16.0, 15.0 / 16.0).unwrap());
        for (i, row) in narrow.rows.iter().enumerate() {
            let wide_bits = wide.eligible_bits(*row).unwrap();
            for bit in &narrow.bits_per_row[i] {
                assert!(wide_bits.contains(bit));
            }
        }
    }

    #[test]
    fn strictness_at_the_window_edges() {
        let params = SelectionParams::with_min_lane_len(5.0 / 16.0, 11.0 / 16.0, 0).unwrap();
        assert!(!params.passes(5, 16));
        assert!(params.passes(6, 16));
        assert!(params.passes(10, 16));
        assert!(!params.passes(11, 16));
        assert!(!params.passes(0, 0));
    }

    #[test]
    fn below_floor_lanes_are_counted_in_the_audit() {
        let geom = BankGeometry::new(1, 4, 1).unwrap();
        let classes = vec![CellClass::PatternIndependent1 as u8; 4];
        let cm = CellClassMap::from_classes(geom, 2.5, vec![0xFF, 0x00], classes).unwrap();
        let result = select(&cm, SelectionParams::new(0.25, 0.75).unwrap());
        assert!(result.rows.is_empty());
        assert_eq!(result.below_floor_count(), 1);
    }

    #[test]
    fn eligible_row_bits_rejects_unqualified_rows() {
        let cm = worked_example_map();
        let result = select(&cm, SelectionParams::new(5.0 / 16.0, 11.0 / 16.0).unwrap());
        assert!(matches!(
            eligible_row_bits(&cm, &result, 7),
            Err(Error::OutOfBounds { .. }) | Err(Error::NotQualified { .. })
        ));
    }
}
