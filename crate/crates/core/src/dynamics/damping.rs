use crate::model::{DeviceDesign, AIR_VISCOSITY};
use crate::scalar::Real;

/// Squeeze-film damping coefficient in N·s/m:
/// `b(z) = b_scale µ N L_f t³ [1/(d - z)³ + 1/(d + z)³]`.
///
/// Gaps are air gaps; `|z|` is expected to stay within the stops.
pub fn damping_coefficient<T: Real>(z: T, design: &DeviceDesign<T>) -> T {
    let g = &design.geometry;
    let n = T::from_u32(g.finger_count).unwrap();
    let t3 = g.structure_thickness.powi(3);
    let prefactor =
        design.mechanics.damping_scale * T::lit(AIR_VISCOSITY) * n * g.finger_length * t3;
    let a = g.initial_gap - z;
    let b = g.initial_gap + z;
    prefactor * ((a * a * a).recip() + (b * b * b).recip())
}

/// Viscous squeeze-film force, opposing the velocity.
pub fn mech_damping_force<T: Real>(z: T, z_dot: T, design: &DeviceDesign<T>) -> T {
    -damping_coefficient(z, design) * z_dot
}
