//! DRAM timing parameters.

use crate::error::Error;
use crate::Result;

const T_RC_TOLERANCE_NS: f64 = 1e-9;

/// The timing symbols of one DRAM configuration, in nanoseconds.
///
/// Only `t_RP`, `t_RCD`, and `t_RAS` drive faults in the model; `t_CL` and
/// `t_WR` are carried for completeness of trace headers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingParameters {
    pub t_rp_ns: f64,
    pub t_rcd_ns: f64,
    pub t_ras_ns: f64,
    pub t_cl_ns: f64,
    pub t_wr_ns: f64,
    pub t_rc_ns: f64,
}

impl TimingParameters {
    /// Build from the five primary symbols; `t_RC` is derived as
    /// `t_RAS + t_RP`.
    pub fn from_parts(
        t_rp_ns: f64,
        t_rcd_ns: f64,
        t_ras_ns: f64,
        t_cl_ns: f64,
        t_wr_ns: f64,
    ) -> Result<Self> {
        Self::new(t_rp_ns, t_rcd_ns, t_ras_ns, t_cl_ns, t_wr_ns, t_ras_ns + t_rp_ns)
    }

    /// Build with an explicit `t_RC`; it must equal `t_RAS + t_RP` within
    /// 1e-9 ns.
    pub fn new(
        t_rp_ns: f64,
        t_rcd_ns: f64,
        t_ras_ns: f64,
        t_cl_ns: f64,
        t_wr_ns: f64,
        t_rc_ns: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("t_RP", t_rp_ns),
            ("t_RCD", t_rcd_ns),
            ("t_RAS", t_ras_ns),
            ("t_CL", t_cl_ns),
            ("t_WR", t_wr_ns),
            ("t_RC", t_rc_ns),
        ] {
            if !(value > 0.0) {
                return Err(Error::Config(alloc::format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if (t_rc_ns - (t_ras_ns + t_rp_ns)).abs() > T_RC_TOLERANCE_NS {
            return Err(Error::Config(alloc::format!(
                "t_RC ({t_rc_ns}) must equal t_RAS + t_RP ({})",
                t_ras_ns + t_rp_ns
            )));
        }
        Ok(Self {
            t_rp_ns,
            t_rcd_ns,
            t_ras_ns,
            t_cl_ns,
            t_wr_ns,
            t_rc_ns,
        })
    }

    /// Nominal DDR3-1600 timings (t_RC just under 50 ns).
    pub fn ddr3_nominal() -> Self {
        Self::from_parts(13.75, 13.75, 35.0, 13.75, 15.0).expect("nominal timings are valid")
    }

    /// Copy with a reduced precharge time.
    pub fn with_t_rp(&self, t_rp_ns: f64) -> Result<Self> {
        Self::from_parts(t_rp_ns, self.t_rcd_ns, self.t_ras_ns, self.t_cl_ns, self.t_wr_ns)
    }

    /// Copy with a reduced activation time.
    pub fn with_t_rcd(&self, t_rcd_ns: f64) -> Result<Self> {
        Self::from_parts(self.t_rp_ns, t_rcd_ns, self.t_ras_ns, self.t_cl_ns, self.t_wr_ns)
    }

    /// Copy with a reduced restoration time.
    pub fn with_t_ras(&self, t_ras_ns: f64) -> Result<Self> {
        Self::from_parts(self.t_rp_ns, self.t_rcd_ns, t_ras_ns, self.t_cl_ns, self.t_wr_ns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_rc_is_enforced_at_construction() {
        assert!(TimingParameters::new(13.75, 13.75, 35.0, 13.75, 15.0, 48.75).is_ok());
        assert!(TimingParameters::new(13.75, 13.75, 35.0, 13.75, 15.0, 48.0).is_err());
    }

    #[test]
    fn nominal_is_in_the_expected_range() {
        let t = TimingParameters::ddr3_nominal();
        assert!((t.t_rc_ns - 48.75).abs() < 1e-12);
    }

    #[test]
    fn non_positive_values_are_rejected() {
        assert!(TimingParameters::from_parts(0.0, 13.75, 35.0, 13.75, 15.0).is_err());
        assert!(TimingParameters::from_parts(13.75, -1.0, 35.0, 13.75, 15.0).is_err());
    }
}
