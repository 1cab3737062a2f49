//! Cell classification from a completed campaign.
//!
//! A cell is noisy if any pattern's repeats disagree. Otherwise it has one
//! deterministic value per pattern: if that always equals the written bit
//! the cell is non-faulty; if it is the same constant for every pattern it
//! is pattern-independent; anything else is pattern-dependent.

use crate::bits::BitMatrix;
use crate::campaign::MeasurementSet;
use crate::condition::OperatingCondition;
use crate::error::Error;
use crate::geometry::{pattern_bit, BankGeometry};
use crate::Result;
use alloc::vec::Vec;

/// The class of one cell as measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum CellClass {
    NonFaulty = 0,
    PatternIndependent0 = 1,
    PatternIndependent1 = 2,
    PatternDependent = 3,
    Noisy = 4,
}

impl CellClass {
    pub fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            0 => CellClass::NonFaulty,
            1 => CellClass::PatternIndependent0,
            2 => CellClass::PatternIndependent1,
            3 => CellClass::PatternDependent,
            4 => CellClass::Noisy,
            _ => {
                return Err(Error::Consistency(alloc::format!(
                    "invalid cell class code {code}"
                )))
            }
        })
    }

    pub fn is_pattern_independent(&self) -> bool {
        matches!(
            self,
            CellClass::PatternIndependent0 | CellClass::PatternIndependent1
        )
    }

    /// The constant value of a pattern-independent cell.
    pub fn pi_value(&self) -> Option<bool> {
        match self {
            CellClass::PatternIndependent0 => Some(false),
            CellClass::PatternIndependent1 => Some(true),
            _ => None,
        }
    }
}

/// Per-cell classification of a whole bank, plus the observed per-pattern
/// value planes for measurement-invariant cells.
#[derive(Debug, Clone)]
pub struct CellClassMap {
    geometry: BankGeometry,
    t_rp_puf_ns: f64,
    condition: OperatingCondition,
    patterns: Vec<u8>,
    classes: Vec<u8>,
    /// Observed value per pattern; meaningful only where the cell is not
    /// noisy.
    value_planes: Vec<BitMatrix>,
}

impl CellClassMap {
    /// Assemble a map directly (tests, ingestion of external class data).
    /// Value planes are synthesized from the classes: pattern-independent
    /// cells carry their constant, non-faulty cells the written bit,
    /// pattern-dependent and noisy cells are left at the written bit.
    pub fn from_classes(
        geometry: BankGeometry,
        t_rp_puf_ns: f64,
        patterns: Vec<u8>,
        classes: Vec<u8>,
    ) -> Result<Self> {
        if classes.len() != geometry.total_cells() {
            return Err(Error::Consistency(alloc::format!(
                "class map holds {} cells, geometry needs {}",
                classes.len(),
                geometry.total_cells()
            )));
        }
        for &code in &classes {
            CellClass::from_code(code)?;
        }
        let width = geometry.word_width();
        let mut value_planes = Vec::with_capacity(patterns.len());
        for &pattern in &patterns {
            let mut plane = BitMatrix::zeros(geometry.total_cells());
            for (idx, &code) in classes.iter().enumerate() {
                let value = match CellClass::from_code(code)? {
                    CellClass::PatternIndependent0 => false,
                    CellClass::PatternIndependent1 => true,
                    _ => pattern_bit(pattern, idx % width),
                };
                if value {
                    plane.set(idx, true);
                }
            }
            value_planes.push(plane);
        }
        Ok(Self {
            geometry,
            t_rp_puf_ns,
            condition: OperatingCondition::nvrt(),
            patterns,
            classes,
            value_planes,
        })
    }

    pub fn geometry(&self) -> BankGeometry {
        self.geometry
    }

    pub fn t_rp_puf_ns(&self) -> f64 {
        self.t_rp_puf_ns
    }

    pub fn condition(&self) -> &OperatingCondition {
        &self.condition
    }

    pub fn patterns(&self) -> &[u8] {
        &self.patterns
    }

    pub fn class(&self, idx: usize) -> CellClass {
        CellClass::from_code(self.classes[idx]).expect("codes validated at construction")
    }

    pub fn class_codes(&self) -> &[u8] {
        &self.classes
    }

    /// Observed value of a non-noisy cell under a campaign pattern.
    pub fn observed_value(&self, pattern_index: usize, idx: usize) -> bool {
        self.value_planes[pattern_index].get(idx)
    }

    pub fn total_cells(&self) -> usize {
        self.classes.len()
    }
}

/// Class percentages over a whole bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistribution {
    pub pi0_pct: f64,
    pub pi1_pct: f64,
    pub pattern_dependent_pct: f64,
    pub noisy_pct: f64,
    pub non_faulty_pct: f64,
}

impl ClassDistribution {
    pub fn sum(&self) -> f64 {
        self.pi0_pct + self.pi1_pct + self.pattern_dependent_pct + self.noisy_pct + self.non_faulty_pct
    }
}

/// Classify every cell of a completed campaign.
///
/// The campaign patterns must write both a 0 and a 1 to every bit position
/// (0xFF and 0x00 together always satisfy this).
pub fn classify(ms: &MeasurementSet) -> Result<CellClassMap> {
    let geometry = ms.geometry();
    let width = geometry.word_width();
    let patterns = ms.patterns();

    for position in 0..width.min(8) {
        let mut wrote_zero = false;
        let mut wrote_one = false;
        for &pattern in patterns {
            if pattern_bit(pattern, position) {
                wrote_one = true;
            } else {
                wrote_zero = true;
            }
        }
        if !(wrote_zero && wrote_one) {
            return Err(Error::ClassificationCoverage {
                bit_position: position,
            });
        }
    }

    let total = geometry.total_cells();
    // Per-pattern observed value (first repeat) and disagreement mask,
    // folded frame by frame with byte-wide operations.
    let mut value_planes: Vec<BitMatrix> = Vec::with_capacity(patterns.len());
    let mut noisy = BitMatrix::zeros(total);
    for (pattern_index, _) in patterns.iter().enumerate() {
        let first = ms.frame(pattern_index, 0).bits.clone();
        for repeat in 1..ms.repeats() {
            let other = &ms.frame(pattern_index, repeat).bits;
            let disagree: Vec<u8> = first
                .as_bytes()
                .iter()
                .zip(other.as_bytes())
                .map(|(a, b)| a ^ b)
                .collect();
            let disagree = BitMatrix::from_bytes(disagree, total)?;
            noisy.union_with(&disagree)?;
        }
        value_planes.push(first);
    }

    let mut classes = alloc::vec![0u8; total];
    for idx in 0..total {
        let bit = idx % width;
        classes[idx] = if noisy.get(idx) {
            CellClass::Noisy as u8
        } else {
            let mut all_written = true;
            let mut constant = true;
            let first_value = value_planes[0].get(idx);
            for (pattern_index, &pattern) in patterns.iter().enumerate() {
                let value = value_planes[pattern_index].get(idx);
                if value != pattern_bit(pattern, bit) {
                    all_written = false;
                }
                if value != first_value {
                    constant = false;
                }
            }
            if all_written {
                CellClass::NonFaulty as u8
            } else if constant {
                if first_value {
                    CellClass::PatternIndependent1 as u8
                } else {
                    CellClass::PatternIndependent0 as u8
                }
            } else {
                CellClass::PatternDependent as u8
            }
        };
    }

    Ok(CellClassMap {
        geometry,
        t_rp_puf_ns: ms.t_rp_puf_ns(),
        condition: *ms.condition(),
        patterns: patterns.to_vec(),
        classes,
        value_planes,
    })
}

/// Percentages of each class; sums to 100 within 1e-6.
pub fn distribution_summary(cm: &CellClassMap) -> ClassDistribution {
    let mut counts = [0usize; 5];
    for &code in cm.class_codes() {
        counts[code as usize] += 1;
    }
    let total = cm.total_cells() as f64;
    let pct = |c: usize| 100.0 * counts[c] as f64 / total;
    ClassDistribution {
        non_faulty_pct: pct(0),
        pi0_pct: pct(1),
        pi1_pct: pct(2),
        pattern_dependent_pct: pct(3),
        noisy_pct: pct(4),
    }
}
