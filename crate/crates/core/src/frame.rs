//! One readout: a full bank image under a specific write pattern, timing,
//! and operating condition.

use crate::bits::BitMatrix;
use crate::condition::OperatingCondition;
use crate::error::Error;
use crate::geometry::{linearize, pattern_bit, BankGeometry, CellAddress};
use crate::timing::TimingParameters;
use crate::Result;

/// Where a frame came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Simulated,
    Ingested,
}

/// A bit matrix of `rows x cols x word_width` cells captured in one read
/// pass, plus the context needed to interpret it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutFrame {
    pub geometry: BankGeometry,
    pub bits: BitMatrix,
    pub provenance: Provenance,
    /// The 8-bit pattern written before the readout.
    pub pattern: u8,
    pub timing: TimingParameters,
    pub condition: OperatingCondition,
}

impl ReadoutFrame {
    pub fn new(
        geometry: BankGeometry,
        bits: BitMatrix,
        provenance: Provenance,
        pattern: u8,
        timing: TimingParameters,
        condition: OperatingCondition,
    ) -> Result<Self> {
        if bits.len() != geometry.total_cells() {
            return Err(Error::Consistency(alloc::format!(
                "frame holds {} bits, geometry needs {}",
                bits.len(),
                geometry.total_cells()
            )));
        }
        Ok(Self {
            geometry,
            bits,
            provenance,
            pattern,
            timing,
            condition,
        })
    }

    pub fn get(&self, addr: CellAddress) -> Result<bool> {
        Ok(self.bits.get(linearize(addr, self.geometry)?))
    }

    pub fn set(&mut self, addr: CellAddress, value: bool) -> Result<()> {
        let index = linearize(addr, self.geometry)?;
        self.bits.set(index, value);
        Ok(())
    }

    /// The image the write pass left in the bank.
    pub fn written_reference(pattern: u8, geometry: BankGeometry) -> BitMatrix {
        let mut bits = BitMatrix::zeros(geometry.total_cells());
        let word_width = geometry.word_width();
        let words = geometry.total_cells() / word_width;
        for word in 0..words {
            let base = word * word_width;
            for bit in 0..word_width {
                if pattern_bit(pattern, bit) {
                    bits.set(base + bit, true);
                }
            }
        }
        bits
    }

    /// Cells reading differently from the written pattern.
    pub fn failed_bits(&self) -> BitMatrix {
        let reference = Self::written_reference(self.pattern, self.geometry);
        let mut failed = BitMatrix::zeros(self.bits.len());
        for (i, (got, wrote)) in self.bits.iter().zip(reference.iter()).enumerate() {
            if got != wrote {
                failed.set(i, true);
            }
        }
        failed
    }

    /// Hamming distance to the written image.
    pub fn errors_vs_written(&self) -> usize {
        let reference = Self::written_reference(self.pattern, self.geometry);
        self.bits.hamming(&reference).expect("same geometry")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BankGeometry;

    fn frame(pattern: u8) -> ReadoutFrame {
        let geom = BankGeometry::new(2, 4, 8).unwrap();
        ReadoutFrame::new(
            geom,
            ReadoutFrame::written_reference(pattern, geom),
            Provenance::Simulated,
            pattern,
            TimingParameters::ddr3_nominal(),
            OperatingCondition::nvrt(),
        )
        .unwrap()
    }

    #[test]
    fn written_reference_tiles_the_pattern() {
        let f = frame(0xAA);
        for row in 0..2 {
            for col in 0..4 {
                for bit in 0..8 {
                    let expected = bit % 2 == 1;
                    assert_eq!(f.get(CellAddress::new(row, col, bit)).unwrap(), expected);
                }
            }
        }
        assert_eq!(f.errors_vs_written(), 0);
    }

    #[test]
    fn set_then_get_round_trips() {
        let mut f = frame(0x00);
        let addr = CellAddress::new(1, 2, 3);
        f.set(addr, true).unwrap();
        assert!(f.get(addr).unwrap());
        assert_eq!(f.errors_vs_written(), 1);
        assert_eq!(f.failed_bits().count_ones(), 1);
    }

    #[test]
    fn frame_length_must_match_geometry() {
        let geom = BankGeometry::new(2, 4, 8).unwrap();
        let bits = BitMatrix::zeros(17);
        assert!(ReadoutFrame::new(
            geom,
            bits,
            Provenance::Simulated,
            0,
            TimingParameters::ddr3_nominal(),
            OperatingCondition::nvrt()
        )
        .is_err());
    }
}
