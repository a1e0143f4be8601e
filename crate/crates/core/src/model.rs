//! Shared domain types for a converter design point and their validation.
//!
//! All quantities are SI base units (m, kg, s, F, Ω, V, W). Convenience units
//! only appear at the configuration boundary.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{positive, Real};

/// Vacuum permittivity in F/m.
pub const EPS_0: f64 = 8.854e-12;

/// Dynamic viscosity of air in Pa·s, used by the squeeze-film damping model.
pub const AIR_VISCOSITY: f64 = 1.85e-5;

/// Geometry of the shuttle and the gap-closing comb.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceGeometry<T> {
    pub shuttle_width: T,
    pub shuttle_length: T,
    pub finger_length: T,
    pub finger_width: T,
    /// Structural layer thickness, i.e. the finger height out of plane.
    pub structure_thickness: T,
    /// Finger gap at rest.
    pub initial_gap: T,
    /// Air gap left when the shuttle rests on a mechanical stop.
    pub min_gap: T,
    pub finger_count: u32,
    /// Edge length available for finger cells in the layout.
    pub usable_edge_length: T,
    pub chip_area: T,
}

/// Side-wall dielectric coating.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaterialProps<T> {
    /// Coating thickness on each side wall.
    pub dielectric_thickness: T,
    pub dielectric_constant: T,
    /// Smallest air gap allowed between uncoated fingers. Applies only when
    /// `dielectric_thickness == 0`, since bare fingers would short at the
    /// coated minimum gap.
    pub bare_min_gap: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitParams<T> {
    pub input_voltage: T,
    pub storage_capacitance: T,
    pub load_resistance: T,
    pub max_output_voltage: T,
    pub min_output_power: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanicalParams<T> {
    /// Total moving mass (plate plus any attached mass).
    pub shuttle_mass: T,
    pub spring_constant: T,
    /// Dimensionless multiplier on the squeeze-film damping model.
    pub damping_scale: T,
    /// Coefficient of restitution at the mechanical stops.
    pub restitution: T,
}

/// Sinusoidal base excitation, optionally backed by a measured spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VibrationSource<T> {
    /// Peak frame acceleration in m/s².
    pub acceleration: T,
    pub frequency: T,
    /// Measured (frequency, acceleration) pairs, kept for reporting.
    pub spectrum: Vec<(T, T)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceDesign<T> {
    pub geometry: DeviceGeometry<T>,
    pub materials: MaterialProps<T>,
    pub circuit: CircuitParams<T>,
    pub mechanics: MechanicalParams<T>,
    pub source: VibrationSource<T>,
}

/// One violated design invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: &str, message: &str) -> Self {
        Violation {
            field: field.to_string(),
            message: message.to_string(),
        }
    }
}

impl<T: Real> VibrationSource<T> {
    pub fn sine(acceleration: T, frequency: T) -> Self {
        VibrationSource {
            acceleration,
            frequency,
            spectrum: Vec::new(),
        }
    }

    pub fn angular_frequency(&self) -> T {
        T::tau() * self.frequency
    }
}

impl<T: Real> DeviceDesign<T> {
    /// The published design point, with `V_in = 3.3 V`, the finger count
    /// calibrated to `C_max ≈ 7 nF` and the matching edge budget.
    pub fn table1() -> Self {
        let l = T::lit;
        DeviceDesign {
            geometry: DeviceGeometry {
                shuttle_width: l(10e-3),
                shuttle_length: l(8e-3),
                finger_length: l(1200e-6),
                finger_width: l(10e-6),
                structure_thickness: l(200e-6),
                initial_gap: l(35e-6),
                min_gap: l(0.1e-6),
                finger_count: 377,
                usable_edge_length: l(33.95e-3),
                chip_area: l(1e-4),
            },
            materials: MaterialProps {
                dielectric_thickness: l(500e-10),
                dielectric_constant: l(7.0),
                bare_min_gap: l(0.5e-6),
            },
            circuit: CircuitParams {
                input_voltage: l(3.3),
                storage_capacitance: l(20e-9),
                load_resistance: l(8e6),
                max_output_voltage: l(40.0),
                min_output_power: l(200e-6),
            },
            mechanics: MechanicalParams {
                shuttle_mass: l(7.2e-3),
                spring_constant: l(4.3e3),
                damping_scale: T::one(),
                restitution: T::zero(),
            },
            source: VibrationSource::sine(l(2.25), l(120.0)),
        }
    }

    /// Air gap at the stop. Uncoated fingers cannot close below `bare_min_gap`.
    pub fn stop_gap(&self) -> T {
        let g = &self.geometry;
        if self.materials.dielectric_thickness > T::zero() {
            g.min_gap
        } else {
            g.min_gap.max(self.materials.bare_min_gap)
        }
    }

    /// Travel limit `z_stop = d - stop_gap`.
    pub fn z_stop(&self) -> T {
        self.geometry.initial_gap - self.stop_gap()
    }

    /// Overlap area of one finger face.
    pub fn face_area(&self) -> T {
        self.geometry.finger_length * self.geometry.structure_thickness
    }

    /// Same design with `d`, `t_d` and `N` replaced.
    pub fn with_gap(&self, initial_gap: T, dielectric_thickness: T, finger_count: u32) -> Self {
        let mut out = self.clone();
        out.geometry.initial_gap = initial_gap;
        out.geometry.finger_count = finger_count;
        out.materials.dielectric_thickness = dielectric_thickness;
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = validate_design(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDesign(v))
        }
    }
}

/// Lists every violated invariant of `design`. An empty list means valid.
pub fn validate_design<T: Real>(design: &DeviceDesign<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let g = &design.geometry;
    let lengths = [
        ("geometry.shuttle_width", g.shuttle_width),
        ("geometry.shuttle_length", g.shuttle_length),
        ("geometry.finger_length", g.finger_length),
        ("geometry.finger_width", g.finger_width),
        ("geometry.structure_thickness", g.structure_thickness),
        ("geometry.initial_gap", g.initial_gap),
        ("geometry.min_gap", g.min_gap),
        ("geometry.usable_edge_length", g.usable_edge_length),
        ("geometry.chip_area", g.chip_area),
    ];
    for (field, value) in lengths {
        if !positive(value) {
            out.push(Violation::new(field, "must be > 0"));
        }
    }
    if g.finger_count < 1 {
        out.push(Violation::new("geometry.finger_count", "N >= 1"));
    }
    if !(g.min_gap < g.initial_gap) {
        out.push(Violation::new("geometry.min_gap", "d_min < d"));
    }
    let z_stop = design.z_stop();
    if !(z_stop > T::zero() && z_stop < g.initial_gap) {
        out.push(Violation::new(
            "geometry.initial_gap",
            "travel limit z_stop = d - d_min must satisfy 0 < z_stop < d",
        ));
    }
    let pitch = T::two() * (g.initial_gap + g.finger_width);
    let n = T::from_u32(g.finger_count).unwrap_or_else(T::infinity);
    if positive(pitch) && n * pitch > g.usable_edge_length {
        out.push(Violation::new(
            "geometry.finger_count",
            "N * 2(d + W_f) must fit within usable_edge_length",
        ));
    }

    let m = &design.materials;
    if !(m.dielectric_thickness >= T::zero()) || !m.dielectric_thickness.is_finite() {
        out.push(Violation::new(
            "materials.dielectric_thickness",
            "must be >= 0",
        ));
    }
    if !(m.dielectric_constant >= T::one()) || !m.dielectric_constant.is_finite() {
        out.push(Violation::new(
            "materials.dielectric_constant",
            "eps_r >= 1",
        ));
    }
    if !positive(m.bare_min_gap) {
        out.push(Violation::new("materials.bare_min_gap", "must be > 0"));
    }

    let c = &design.circuit;
    for (field, value) in [
        ("circuit.input_voltage", c.input_voltage),
        ("circuit.storage_capacitance", c.storage_capacitance),
        ("circuit.load_resistance", c.load_resistance),
        ("circuit.max_output_voltage", c.max_output_voltage),
        ("circuit.min_output_power", c.min_output_power),
    ] {
        if !positive(value) {
            out.push(Violation::new(field, "must be > 0"));
        }
    }

    let mech = &design.mechanics;
    if !positive(mech.shuttle_mass) {
        out.push(Violation::new("mechanics.shuttle_mass", "m > 0"));
    }
    if !positive(mech.spring_constant) {
        out.push(Violation::new("mechanics.spring_constant", "k > 0"));
    }
    if !(mech.damping_scale >= T::zero()) || !mech.damping_scale.is_finite() {
        out.push(Violation::new("mechanics.damping_scale", "must be >= 0"));
    }
    if !(mech.restitution >= T::zero() && mech.restitution <= T::one()) {
        out.push(Violation::new(
            "mechanics.restitution",
            "restitution in [0,1]",
        ));
    }

    let s = &design.source;
    if !(s.acceleration >= T::zero()) || !s.acceleration.is_finite() {
        out.push(Violation::new("source.acceleration", "A >= 0"));
    }
    if !positive(s.frequency) {
        out.push(Violation::new("source.frequency", "f > 0"));
    }
    if s.spectrum
        .iter()
        .any(|&(f, a)| !positive(f) || !(a >= T::zero()) || !a.is_finite())
    {
        out.push(Violation::new(
            "source.spectrum",
            "entries need f > 0 and a >= 0",
        ));
    }
    out
}

/// Conversion cycle time `Δt = 1/(2f)`: two conversions per vibration period.
pub fn conversion_cycle_time<T: Real>(source: &VibrationSource<T>) -> Result<T> {
    if !positive(source.frequency) {
        return Err(Error::invalid("frequency must be > 0"));
    }
    Ok(T::one() / (T::two() * source.frequency))
}

/// Undamped natural frequency in Hz.
pub fn natural_frequency<T: Real>(spring_constant: T, mass: T) -> Result<T> {
    if !positive(spring_constant) || !positive(mass) {
        return Err(Error::invalid("spring constant and mass must be > 0"));
    }
    Ok((spring_constant / mass).sqrt() / T::tau())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_is_valid() {
        assert!(validate_design(&DeviceDesign::<f64>::table1()).is_empty());
        assert!(validate_design(&DeviceDesign::<f32>::table1()).is_empty());
    }

    #[test]
    fn min_gap_equal_to_gap_is_flagged() {
        let mut d = DeviceDesign::<f64>::table1();
        d.geometry.min_gap = d.geometry.initial_gap;
        let v = validate_design(&d);
        assert!(v.iter().any(|v| v.message == "d_min < d"), "{v:?}");
    }

    #[test]
    fn restitution_out_of_range_is_flagged() {
        let mut d = DeviceDesign::<f64>::table1();
        d.mechanics.restitution = 1.5;
        let v = validate_design(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "mechanics.restitution");
        assert_eq!(v[0].message, "restitution in [0,1]");
    }

    #[test]
    fn nan_fields_are_flagged() {
        let mut d = DeviceDesign::<f64>::table1();
        d.circuit.load_resistance = f64::NAN;
        d.source.frequency = -1.0;
        let v = validate_design(&d);
        let fields: Vec<_> = v.iter().map(|v| v.field.as_str()).collect();
        assert!(fields.contains(&"circuit.load_resistance"));
        assert!(fields.contains(&"source.frequency"));
    }

    #[test]
    fn fingers_must_fit_layout() {
        let mut d = DeviceDesign::<f64>::table1();
        d.geometry.finger_count = 400;
        assert!(validate_design(&d)
            .iter()
            .any(|v| v.field == "geometry.finger_count"));
    }

    #[test]
    fn bare_fingers_use_wider_stop_gap() {
        let mut d = DeviceDesign::<f64>::table1();
        assert_eq!(d.stop_gap(), 0.1e-6);
        d.materials.dielectric_thickness = 0.0;
        assert_eq!(d.stop_gap(), 0.5e-6);
    }

    #[test]
    fn cycle_time_examples() {
        let dt = conversion_cycle_time::<f64>(&VibrationSource::sine(1.0, 120.0)).unwrap();
        assert!((dt - 1.0 / 240.0).abs() < 1e-15);
        assert_eq!(
            conversion_cycle_time::<f64>(&VibrationSource::sine(1.0, 0.5)).unwrap(),
            1.0
        );
        assert_eq!(
            conversion_cycle_time::<f64>(&VibrationSource::sine(1.0, 800.0)).unwrap(),
            6.25e-4
        );
        assert!(conversion_cycle_time::<f64>(&VibrationSource::sine(1.0, 0.0)).is_err());
    }

    #[test]
    fn natural_frequency_examples() {
        let f = natural_frequency::<f64>(960.0, 3.8e-5).unwrap();
        assert!((f - 800.0).abs() < 2.0, "{f}");
        let f = natural_frequency::<f64>(4300.0, 7.2e-3).unwrap();
        assert!((f - 123.0).abs() < 1.0, "{f}");
        let m = 0.37;
        let k = m * std::f64::consts::TAU.powi(2);
        assert!((natural_frequency::<f64>(k, m).unwrap() - 1.0).abs() < 1e-15);
        assert!(natural_frequency::<f64>(0.0, 1.0).is_err());
        assert!(natural_frequency::<f64>(1.0, -1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cycle_time_times_two_f_is_one(f in 1e-3f64..1e6) {
                let dt = conversion_cycle_time::<f64>(&VibrationSource::sine(1.0, f)).unwrap();
                prop_assert!((dt * 2.0 * f - 1.0).abs() < 4.0 * f64::EPSILON);
            }

            #[test]
            fn natural_frequency_is_homogeneous(k in 1e-2f64..1e6, m in 1e-6f64..10.0, s in 1e-3f64..1e3) {
                let a = natural_frequency::<f64>(k, m).unwrap();
                let b = natural_frequency::<f64>(k * s, m * s).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a);
            }

            #[test]
            fn validation_is_pure(r in -1.0f64..2.0, dmin in 0.0f64..50e-6) {
                let mut d = DeviceDesign::<f64>::table1();
                d.mechanics.restitution = r;
                d.geometry.min_gap = dmin;
                prop_assert_eq!(validate_design(&d), validate_design(&d));
            }
        }
    }
}
