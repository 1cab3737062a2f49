//! Bank geometry, cell addressing, and pattern expansion.

use crate::error::Error;
use crate::Result;

/// Dimensions of a single DRAM bank: rows, columns (words per row), and
/// word width in bits.
///
/// The desk-scale default is 256 x 64 x 64 (1 Mi cells); production 1 GB
/// modules are 16384 x 1024 x 64.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankGeometry {
    rows: usize,
    cols: usize,
    word_width: usize,
}

/// Desk-scale default geometry: runs in milliseconds, large enough for
/// stable statistics.
pub const DESK_GEOMETRY: BankGeometry = BankGeometry {
    rows: 256,
    cols: 64,
    word_width: 64,
};

/// Full-scale geometry of a 1 GB module.
pub const FULL_GEOMETRY: BankGeometry = BankGeometry {
    rows: 16384,
    cols: 1024,
    word_width: 64,
};

impl BankGeometry {
    pub fn new(rows: usize, cols: usize, word_width: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config(alloc::format!(
                "geometry must be non-degenerate, got {rows}x{cols}x{word_width}"
            )));
        }
        if word_width == 0 || word_width > 64 {
            return Err(Error::Config(alloc::format!(
                "word width must be in 1..=64, got {word_width}"
            )));
        }
        rows.checked_mul(cols)
            .and_then(|rc| rc.checked_mul(word_width))
            .ok_or_else(|| {
                Error::Config(alloc::format!(
                    "total cell count overflows the addressable range ({rows}x{cols}x{word_width})"
                ))
            })?;
        Ok(Self {
            rows,
            cols,
            word_width,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn word_width(&self) -> usize {
        self.word_width
    }

    pub fn total_cells(&self) -> usize {
        self.rows * self.cols * self.word_width
    }

    /// Bits in one row (cols x word width).
    pub fn row_bits(&self) -> usize {
        self.cols * self.word_width
    }

    /// Words covered by the first 64-byte cache line of a row (rounded up
    /// when a word straddles the boundary). 8 words for 64-bit words.
    pub fn cache_line_words(&self) -> usize {
        (512 + self.word_width - 1) / self.word_width
    }
}

/// Zero-based cell address `(row, col, bit)`. Rendered reports convert to
/// the one-based convention; the core never does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellAddress {
    pub row: usize,
    pub col: usize,
    pub bit: usize,
}

impl CellAddress {
    pub fn new(row: usize, col: usize, bit: usize) -> Self {
        Self { row, col, bit }
    }
}

/// Linear index of a cell: `(row * cols + col) * word_width + bit`.
/// Bijective over the bank.
pub fn linearize(addr: CellAddress, geom: BankGeometry) -> Result<usize> {
    if addr.row >= geom.rows {
        return Err(Error::OutOfBounds {
            field: "row",
            value: addr.row,
            limit: geom.rows,
        });
    }
    if addr.col >= geom.cols {
        return Err(Error::OutOfBounds {
            field: "col",
            value: addr.col,
            limit: geom.cols,
        });
    }
    if addr.bit >= geom.word_width {
        return Err(Error::OutOfBounds {
            field: "bit",
            value: addr.bit,
            limit: geom.word_width,
        });
    }
    Ok((addr.row * geom.cols + addr.col) * geom.word_width + addr.bit)
}

/// Inverse of [`linearize`].
pub fn delinearize(index: usize, geom: BankGeometry) -> Result<CellAddress> {
    if index >= geom.total_cells() {
        return Err(Error::OutOfBounds {
            field: "linear index",
            value: index,
            limit: geom.total_cells(),
        });
    }
    let bit = index % geom.word_width;
    let word = index / geom.word_width;
    Ok(CellAddress {
        row: word / geom.cols,
        col: word % geom.cols,
        bit,
    })
}

/// Bit a pattern writes at word bit position `bit`: the 8-bit pattern is
/// tiled across the word, bit 0 being the least significant pattern bit.
#[inline]
pub fn pattern_bit(pattern: u8, bit: usize) -> bool {
    (pattern >> (bit % 8)) & 1 == 1
}

/// Tile an 8-bit pattern across a word. Returns the word as a u64 with
/// LSB-first bit order; `word_width` must be a multiple of 8.
pub fn expand_pattern(pattern: u8, word_width: usize) -> Result<u64> {
    if word_width == 0 || word_width > 64 || word_width % 8 != 0 {
        return Err(Error::Config(alloc::format!(
            "word width must be a multiple of 8 in 8..=64, got {word_width}"
        )));
    }
    let mut word = 0u64;
    for byte in 0..word_width / 8 {
        word |= u64::from(pattern) << (8 * byte);
    }
    Ok(word)
}
