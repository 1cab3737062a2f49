//! Operating conditions: voltage and temperature offsets from nominal.
//!
//! The nominal operating point is 1.5 V and 25 degrees Celsius; conditions
//! are expressed as signed offsets from it.

use crate::error::Error;
use crate::Result;
use core::fmt;

/// The named operating corners plus a free-form custom label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConditionLabel {
    /// Nominal voltage, room temperature.
    Nvrt,
    /// Low voltage, room temperature.
    Lvrt,
    /// High voltage, room temperature.
    Hvrt,
    /// Nominal voltage, high temperature.
    Nvht,
    Custom,
}

impl fmt::Display for ConditionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ConditionLabel::Nvrt => "NVRT",
            ConditionLabel::Lvrt => "LVRT",
            ConditionLabel::Hvrt => "HVRT",
            ConditionLabel::Nvht => "NVHT",
            ConditionLabel::Custom => "custom",
        };
        f.write_str(name)
    }
}

/// One operating condition. `NVRT` and the zero offset pair imply each
/// other; the constructor enforces both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingCondition {
    pub delta_v_mv: f64,
    pub delta_t_c: f64,
    pub label: ConditionLabel,
}

impl OperatingCondition {
    pub fn new(label: ConditionLabel, delta_v_mv: f64, delta_t_c: f64) -> Result<Self> {
        let is_zero = delta_v_mv == 0.0 && delta_t_c == 0.0;
        if label == ConditionLabel::Nvrt && !is_zero {
            return Err(Error::Config(alloc::format!(
                "NVRT requires zero offsets, got dV={delta_v_mv} mV dT={delta_t_c} C"
            )));
        }
        if label != ConditionLabel::Nvrt && is_zero {
            return Err(Error::Config(alloc::string::String::from(
                "zero offsets must be labeled NVRT",
            )));
        }
        Ok(Self {
            delta_v_mv,
            delta_t_c,
            label,
        })
    }

    /// The nominal corner.
    pub fn nvrt() -> Self {
        Self {
            delta_v_mv: 0.0,
            delta_t_c: 0.0,
            label: ConditionLabel::Nvrt,
        }
    }

    pub fn is_nominal(&self) -> bool {
        self.label == ConditionLabel::Nvrt
    }
}

impl fmt::Display for OperatingCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (dV={:+} mV, dT={:+} C)",
            self.label, self.delta_v_mv, self.delta_t_c
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nvrt_is_exactly_the_zero_offset() {
        assert!(OperatingCondition::new(ConditionLabel::Nvrt, 0.0, 0.0).is_ok());
        assert!(OperatingCondition::new(ConditionLabel::Nvrt, -20.0, 0.0).is_err());
        assert!(OperatingCondition::new(ConditionLabel::Lvrt, 0.0, 0.0).is_err());
        assert!(OperatingCondition::new(ConditionLabel::Lvrt, -20.0, 0.0).is_ok());
    }
}
