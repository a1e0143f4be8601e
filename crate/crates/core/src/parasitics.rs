//! Parasitic plate-to-substrate capacitance and leakage conductance, and
//! their effect on the steady-state output.

use serde::Serialize;

use crate::capacitance::capacitance_profile;
use crate::error::{Error, Result};
use crate::model::{conversion_cycle_time, DeviceDesign};
use crate::scalar::Real;
use crate::static_design::{predict_from_capacitances, CyclePrediction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParasiticModel<T> {
    /// Displacement-independent capacitance in parallel with the comb.
    pub c_par: T,
    /// Leakage resistance across the output node; `inf` for none.
    pub r_par: T,
}

impl<T: Real> ParasiticModel<T> {
    pub fn none() -> Self {
        ParasiticModel {
            c_par: T::zero(),
            r_par: T::infinity(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_par >= T::zero()) || !self.c_par.is_finite() {
            return Err(Error::invalid("c_par must be >= 0"));
        }
        if !(self.r_par > T::zero()) {
            return Err(Error::invalid("r_par must be > 0"));
        }
        Ok(())
    }

    /// Load in parallel with the leakage path.
    pub fn effective_load(&self, r_l: T) -> T {
        if self.r_par.is_infinite() {
            r_l
        } else {
            r_l * self.r_par / (r_l + self.r_par)
        }
    }
}

/// Parasitic capacitance as the excess of a measured over a calculated value.
pub fn estimate_cpar<T: Real>(c_measured: T, c_calculated: T) -> Result<T> {
    if !(c_measured >= c_calculated) {
        return Err(Error::invalid(format!(
            "measured capacitance {c_measured} F is below the calculated {c_calculated} F"
        )));
    }
    Ok(c_measured - c_calculated)
}

/// Steady-state prediction with `c_par` added to both capacitance extremes
/// and the load shunted by `r_par`.
pub fn degraded_output<T: Real>(
    design: &DeviceDesign<T>,
    parasitic: &ParasiticModel<T>,
) -> Result<CyclePrediction<T>> {
    design.validate()?;
    parasitic.validate()?;
    let profile = capacitance_profile(design)?;
    let dt = conversion_cycle_time(&design.source)?;
    let c = &design.circuit;
    let mut p = predict_from_capacitances(
        profile.c_max + parasitic.c_par,
        profile.c_min + parasitic.c_par,
        c.storage_capacitance,
        parasitic.effective_load(c.load_resistance),
        c.input_voltage,
        dt,
    )?;
    // power reaching the intended load
    p.p_out = p.v_sat * p.v_sat / c.load_resistance;
    Ok(p)
}
