use rayon::prelude::*;
use serde::Serialize;

use super::{simulate, SimOptions};
use crate::error::{Error, Result};
use crate::model::{DeviceDesign, VibrationSource};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassCandidate<T> {
    pub mass: T,
    /// Spring constant placing the resonance on the source frequency.
    pub spring_constant: T,
    /// Largest `|z|` in the second half of the run.
    pub max_displacement: T,
    pub reached: bool,
    /// Set when the run itself failed.
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassSizing<T> {
    pub target: T,
    pub candidates: Vec<MassCandidate<T>>,
    /// Smallest candidate mass reaching the target.
    pub mass: T,
    pub spring_constant: T,
}

/// Resonance-matched mass/spring sizing: for each candidate mass the spring
/// is set to `m (2π f)²`, the transient is simulated, and the smallest mass
/// whose steady peak displacement reaches `z_target` is returned.
pub fn size_attached_mass<T: Real>(
    design: &DeviceDesign<T>,
    source: &VibrationSource<T>,
    z_target: T,
    masses: &[T],
    options: &SimOptions<T>,
) -> Result<MassSizing<T>> {
    if masses.is_empty() {
        return Err(Error::invalid("mass range must be non-empty"));
    }
    if !(z_target >= T::zero()) || z_target > design.z_stop() {
        return Err(Error::invalid(format!(
            "target displacement {} m outside [0, z_stop = {} m]",
            z_target,
            design.z_stop()
        )));
    }
    let omega = source.angular_frequency();
    let candidates: Vec<MassCandidate<T>> = masses
        .par_iter()
        .map(|&mass| {
            let mut d = design.clone();
            d.mechanics.shuttle_mass = mass;
            d.mechanics.spring_constant = mass * omega * omega;
            let run = simulate(&d, source, options);
            let (peak, failed) = match run {
                Ok(trace) => (
                    trace.peak_displacement_after(trace.final_state.t * T::half()),
                    false,
                ),
                Err(_) => (T::nan(), true),
            };
            MassCandidate {
                mass,
                spring_constant: d.mechanics.spring_constant,
                max_displacement: peak,
                reached: !failed && peak >= z_target,
                failed,
            }
        })
        .collect();
    let best = candidates
        .iter()
        .filter(|c| c.reached)
        .min_by(|a, b| a.mass.partial_cmp(&b.mass).unwrap())
        .copied()
        .ok_or(Error::TargetNotReached {
            target: z_target.as_f64(),
        })?;
    Ok(MassSizing {
        target: z_target,
        candidates,
        mass: best.mass,
        spring_constant: best.spring_constant,
    })
}
