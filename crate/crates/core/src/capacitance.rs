//! Parallel-plate model of the dielectric-coated gap-closing comb.
//!
//! Each movable finger sees two gaps, one closing and one opening, each a
//! series stack of coating / air / coating. Fringing is neglected and the
//! overlap area per face stays `L_f * t_dev` for any displacement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DeviceDesign, EPS_0};
use crate::scalar::{positive, Real};

/// Coating / air / coating stack across one finger gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapStack<T> {
    pub air_gap: T,
    /// Coating thickness on each of the two walls.
    pub dielectric_thickness: T,
    pub dielectric_constant: T,
    pub plate_area: T,
}

impl<T: Real> GapStack<T> {
    /// Air-equivalent gap `g + 2 t_d / eps_r`.
    pub fn effective_gap(&self) -> T {
        self.air_gap + T::two() * self.dielectric_thickness / self.dielectric_constant
    }
}

/// Capacitance of a single gap stack.
pub fn gap_stack_capacitance<T: Real>(stack: &GapStack<T>) -> Result<T> {
    let g = stack.effective_gap();
    if !positive(g) {
        return Err(Error::invalid("effective gap must be > 0"));
    }
    Ok(T::lit(EPS_0) * stack.plate_area / g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacitanceProfile<T> {
    pub c_max: T,
    pub c_min: T,
    pub z_stop: T,
    pub per_finger_max: T,
    pub per_finger_min: T,
}

/// Precomputed comb constants. The methods skip the travel checks and are
/// meant for hot loops that already keep `|z| <= z_stop`.
#[derive(Debug, Clone, Copy)]
pub struct CombModel<T> {
    /// `N * eps_0 * A`.
    scale: T,
    gap: T,
    /// Air-equivalent thickness of both coatings, `2 t_d / eps_r`.
    coating: T,
    z_stop: T,
}

impl<T: Real> CombModel<T> {
    pub fn new(design: &DeviceDesign<T>) -> Self {
        let n = T::from_u32(design.geometry.finger_count).unwrap();
        let m = &design.materials;
        CombModel {
            scale: n * T::lit(EPS_0) * design.face_area(),
            gap: design.geometry.initial_gap,
            coating: T::two() * m.dielectric_thickness / m.dielectric_constant,
            z_stop: design.z_stop(),
        }
    }

    pub fn z_stop(&self) -> T {
        self.z_stop
    }

    #[inline]
    pub fn capacitance(&self, z: T) -> T {
        let g = self.gap + self.coating;
        self.scale * ((g - z).recip() + (g + z).recip())
    }

    #[inline]
    pub fn gradient(&self, z: T) -> T {
        let g = self.gap + self.coating;
        let a = g - z;
        let b = g + z;
        self.scale * ((a * a).recip() - (b * b).recip())
    }

    /// Force on the shuttle from charge `q`, pointing toward increasing C.
    #[inline]
    pub fn force(&self, z: T, q: T) -> T {
        let c = self.capacitance(z);
        let v = q / c;
        T::half() * v * v * self.gradient(z)
    }

    fn check(&self, z: T, inclusive: bool) -> Result<()> {
        let inside = if inclusive {
            z.abs() <= self.z_stop
        } else {
            z.abs() < self.z_stop
        };
        if inside {
            Ok(())
        } else {
            Err(Error::OutOfTravel {
                z: z.as_f64(),
                limit: self.z_stop.as_f64(),
            })
        }
    }
}

/// Total comb capacitance at displacement `z`, valid for `|z| <= z_stop`.
pub fn comb_capacitance<T: Real>(z: T, design: &DeviceDesign<T>) -> Result<T> {
    let model = CombModel::new(design);
    model.check(z, true)?;
    Ok(model.capacitance(z))
}

/// Analytic `dC/dz`, valid strictly inside the travel limits.
pub fn capacitance_gradient<T: Real>(z: T, design: &DeviceDesign<T>) -> Result<T> {
    let model = CombModel::new(design);
    model.check(z, false)?;
    Ok(model.gradient(z))
}

pub fn capacitance_profile<T: Real>(design: &DeviceDesign<T>) -> Result<CapacitanceProfile<T>> {
    let model = CombModel::new(design);
    if !(model.z_stop > T::zero()) {
        return Err(Error::invalid("travel limit must be > 0"));
    }
    let c_min = comb_capacitance(T::zero(), design)?;
    let c_max = comb_capacitance(model.z_stop, design)?;
    let n = T::from_u32(design.geometry.finger_count).unwrap();
    Ok(CapacitanceProfile {
        c_max,
        c_min,
        z_stop: model.z_stop,
        per_finger_max: c_max / n,
        per_finger_min: c_min / n,
    })
}

/// Electrostatic force `½ (q/C)² dC/dz` at constant charge.
pub fn electrostatic_force<T: Real>(z: T, q: T, design: &DeviceDesign<T>) -> Result<T> {
    let model = CombModel::new(design);
    model.check(z, false)?;
    Ok(model.force(z, q))
}
