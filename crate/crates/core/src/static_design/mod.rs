//! Closed-form steady-state analysis of the charge-constrained conversion
//! cycle, the design constraints derived from it, and grid sweeps.

mod sweep;

pub use sweep::{
    optimal_cell, optimal_gap, sweep_gap, sweep_load_storage, Optimum, SweepAxis, SweepCell,
    SweepKind, SweepTable,
};

use serde::Serialize;

use crate::capacitance::capacitance_profile;
use crate::error::{Error, Result};
use crate::model::{conversion_cycle_time, DeviceDesign};
use crate::scalar::{positive, Real};

/// Ratio used to decide whether one quantity is "much larger" than another.
pub const REGIME_RATIO: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct RegimeFlags {
    /// `C_stor > 20 C_min`.
    pub storage_dominates: bool,
    /// `R_L C_stor > 20 Δt`.
    pub slow_discharge: bool,
    /// `R_L C_min < Δt / 20`, needed on top of the two above for the
    /// fully simplified saturation voltage.
    pub fast_variable_discharge: bool,
    /// Storage time constant shorter than a conversion cycle: the storage
    /// capacitor drains completely between transfers.
    pub discharge_dominated: bool,
}

impl RegimeFlags {
    pub fn evaluate<T: Real>(c_min: T, c_stor: T, r_l: T, dt: T) -> Self {
        let ratio = T::lit(REGIME_RATIO);
        RegimeFlags {
            storage_dominates: c_stor > ratio * c_min,
            slow_discharge: r_l * c_stor > ratio * dt,
            fast_variable_discharge: r_l * c_min * ratio < dt,
            discharge_dominated: r_l * c_stor < dt,
        }
    }
}

/// Steady-state prediction for one design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CyclePrediction<T> {
    pub c_max: T,
    pub c_min: T,
    /// Pre-transfer output voltage in steady state.
    pub v_sat: T,
    pub p_out: T,
    /// Peak-to-peak output ripple relative to `v_sat`.
    pub ripple_fraction: T,
    pub flags: RegimeFlags,
}

/// Result of the exact steady-state voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Saturation<T> {
    pub voltage: T,
    pub discharge_dominated: bool,
}

fn require_positive<T: Real>(pairs: &[(&str, T)]) -> Result<()> {
    for &(name, v) in pairs {
        if !positive(v) {
            return Err(Error::invalid(format!("{name} must be > 0, got {v}")));
        }
    }
    Ok(())
}

/// Steady-state pre-transfer output voltage of the switched cycle:
///
/// `V_sat = (C_max/C_stor) V_in / ((1 + C_min/C_stor) exp(Δt/(R_L C_stor)) - 1)`
///
/// The denominator is evaluated as `expm1(x + ln1p(r))` so that near-unity
/// cases keep full precision. When the exponential overflows the voltage is
/// `+0` and the result is marked discharge-dominated.
pub fn v_sat_exact<T: Real>(
    c_max: T,
    c_min: T,
    c_stor: T,
    r_l: T,
    v_in: T,
    dt: T,
) -> Result<Saturation<T>> {
    require_positive(&[
        ("c_max", c_max),
        ("c_min", c_min),
        ("c_stor", c_stor),
        ("r_l", r_l),
        ("v_in", v_in),
        ("dt", dt),
    ])?;
    let x = dt / (r_l * c_stor);
    let denom = (x + (c_min / c_stor).ln_1p()).exp_m1();
    let voltage = if denom.is_finite() {
        (c_max / c_stor) * v_in / denom
    } else {
        T::zero()
    };
    Ok(Saturation {
        voltage,
        discharge_dominated: !denom.is_finite() || x > T::one(),
    })
}

/// Slow-discharge approximation
/// `C_max V_in / (C_min (1 + Δt/(R_L C_min) + Δt/(R_L C_stor)))`.
pub fn v_sat_approx<T: Real>(c_max: T, c_min: T, c_stor: T, r_l: T, v_in: T, dt: T) -> Result<T> {
    require_positive(&[
        ("c_max", c_max),
        ("c_min", c_min),
        ("c_stor", c_stor),
        ("r_l", r_l),
        ("v_in", v_in),
    ])?;
    if !(dt >= T::zero()) {
        return Err(Error::invalid("dt must be >= 0"));
    }
    Ok(c_max * v_in / (c_min * (T::one() + dt / (r_l * c_min) + dt / (r_l * c_stor))))
}

/// Fully simplified form `C_max V_in R_L / Δt`.
pub fn v_sat_simplified<T: Real>(c_max: T, r_l: T, v_in: T, dt: T) -> Result<T> {
    require_positive(&[("c_max", c_max), ("r_l", r_l), ("v_in", v_in), ("dt", dt)])?;
    Ok(c_max * v_in * r_l / dt)
}

pub fn p_out<T: Real>(v_sat: T, r_l: T) -> Result<T> {
    require_positive(&[("r_l", r_l)])?;
    Ok(v_sat * v_sat / r_l)
}

/// `(C_max V_in / Δt)² R_L`.
pub fn p_out_simplified<T: Real>(c_max: T, v_in: T, r_l: T, dt: T) -> Result<T> {
    let v = v_sat_simplified(c_max, r_l, v_in, dt)?;
    p_out(v, r_l)
}

/// Largest load meeting both the voltage ceiling and the power floor.
pub fn max_load_resistance<T: Real>(v_max: T, p_min: T) -> Result<T> {
    require_positive(&[("v_max", v_max), ("p_min", p_min)])?;
    Ok(v_max * v_max / p_min)
}

/// `C_max` needed for `p_min` under the simplified power expression.
pub fn required_cmax<T: Real>(p_min: T, r_l: T, v_in: T, dt: T) -> Result<T> {
    require_positive(&[("p_min", p_min), ("r_l", r_l), ("v_in", v_in), ("dt", dt)])?;
    Ok(dt / v_in * (p_min / r_l).sqrt())
}

/// Number of finger cells of pitch `2 (d + W_f)` that fit in `e_budget`.
pub fn finger_count_for_layout<T: Real>(gap: T, finger_width: T, e_budget: T) -> Result<u32> {
    require_positive(&[
        ("gap", gap),
        ("finger_width", finger_width),
        ("e_budget", e_budget),
    ])?;
    let pitch = T::two() * (gap + finger_width);
    let n = (e_budget / pitch).floor();
    match n.to_u32() {
        Some(0) | None => Err(Error::LayoutTooSmall {
            pitch: pitch.as_f64(),
            budget: e_budget.as_f64(),
        }),
        Some(n) => Ok(n),
    }
}

/// Steady-state ripple `exp(Δt/(R_L C_stor)) - 1` relative to `V_sat`.
pub(crate) fn ripple_fraction<T: Real>(c_stor: T, r_l: T, dt: T) -> T {
    (dt / (r_l * c_stor)).exp_m1()
}

/// Prediction from explicit capacitance extremes and circuit values.
pub fn predict_from_capacitances<T: Real>(
    c_max: T,
    c_min: T,
    c_stor: T,
    r_l: T,
    v_in: T,
    dt: T,
) -> Result<CyclePrediction<T>> {
    let sat = v_sat_exact(c_max, c_min, c_stor, r_l, v_in, dt)?;
    let mut flags = RegimeFlags::evaluate(c_min, c_stor, r_l, dt);
    flags.discharge_dominated |= sat.discharge_dominated;
    Ok(CyclePrediction {
        c_max,
        c_min,
        v_sat: sat.voltage,
        p_out: p_out(sat.voltage, r_l)?,
        ripple_fraction: ripple_fraction(c_stor, r_l, dt),
        flags,
    })
}

/// Geometric capacitance profile followed by the exact steady-state cycle.
pub fn predict_cycle<T: Real>(design: &DeviceDesign<T>) -> Result<CyclePrediction<T>> {
    design.validate()?;
    let profile = capacitance_profile(design)?;
    let dt = conversion_cycle_time(&design.source)?;
    let c = &design.circuit;
    predict_from_capacitances(
        profile.c_max,
        profile.c_min,
        c.storage_capacitance,
        c.load_resistance,
        c.input_voltage,
        dt,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const CMAX: f64 = 7e-9;
    const CMIN: f64 = 100e-12;
    const CSTOR: f64 = 20e-9;
    const RL: f64 = 8e6;
    const VIN: f64 = 3.3;
    const DT: f64 = 1.0 / 240.0;

    /// Direct evaluation of the textbook form, used as the oracle.
    fn naive_exact(c_max: f64, c_min: f64, c_stor: f64, r_l: f64, v_in: f64, dt: f64) -> f64 {
        (c_max / c_stor) * v_in / ((1.0 + c_min / c_stor) * (dt / (r_l * c_stor)).exp() - 1.0)
    }

    #[test]
    fn exact_table1() {
        let s = v_sat_exact(CMAX, CMIN, CSTOR, RL, VIN, DT).unwrap();
        let oracle = naive_exact(CMAX, CMIN, CSTOR, RL, VIN, DT);
        assert!((s.voltage - oracle).abs() < 1e-9 * oracle);
        assert!((s.voltage - 36.65).abs() < 0.05, "{}", s.voltage);
        assert!(!s.discharge_dominated);
    }

    #[test]
    fn exact_no_discharge_limit() {
        let s = v_sat_exact(CMAX, CMIN, CSTOR, 1e15, VIN, DT).unwrap();
        assert!((s.voltage - 231.0).abs() < 0.01, "{}", s.voltage);
    }

    #[test]
    fn exact_discharge_dominated() {
        let s = v_sat_exact(CMAX, CMIN, CSTOR, 2.5e3, VIN, DT).unwrap();
        assert!(s.voltage < 1e-30);
        assert!(s.discharge_dominated);
        // exp overflow maps to +0 rather than a fault
        let s = v_sat_exact(CMAX, CMIN, CSTOR, 1e-3, VIN, DT).unwrap();
        assert_eq!(s.voltage, 0.0);
        assert!(s.discharge_dominated);
    }

    #[test]
    fn exact_rejects_non_positive() {
        assert!(v_sat_exact(0.0, CMIN, CSTOR, RL, VIN, DT).is_err());
        assert!(v_sat_exact(CMAX, CMIN, CSTOR, RL, VIN, -1.0).is_err());
    }

    #[test]
    fn approx_table1() {
        let a = v_sat_approx(CMAX, CMIN, CSTOR, RL, VIN, DT).unwrap();
        assert!((a - 37.05).abs() < 0.05, "{a}");
        let e = v_sat_exact(CMAX, CMIN, CSTOR, RL, VIN, DT).unwrap().voltage;
        assert!(((a - e) / e).abs() < 0.05);
        assert!((v_sat_approx(CMAX, CMIN, CSTOR, RL, VIN, 0.0).unwrap() - 231.0).abs() < 1e-9);
    }

    #[test]
    fn approx_reduces_to_simplified_form() {
        // C_stor -> inf and R_L C_min << dt
        let r_l = 1e3;
        let a = v_sat_approx(CMAX, CMIN, 1e3, r_l, VIN, DT).unwrap();
        let s = v_sat_simplified(CMAX, r_l, VIN, DT).unwrap();
        assert!(((a - s) / s).abs() < 1e-4);
    }

    #[test]
    fn simplified_table1_and_linearity() {
        let s = v_sat_simplified(CMAX, RL, VIN, DT).unwrap();
        assert!((s - 44.352).abs() < 1e-9, "{s}");
        assert!((v_sat_simplified(CMAX, RL / 2.0, VIN, DT).unwrap() - s / 2.0).abs() < 1e-12);
        assert!((v_sat_simplified(CMAX, RL, VIN, 2.0 * DT).unwrap() - s / 2.0).abs() < 1e-12);
    }

    #[test]
    fn power_examples() {
        assert!((p_out::<f64>(40.0, 8e6).unwrap() - 200e-6).abs() < 1e-18);
        let e = v_sat_exact(CMAX, CMIN, CSTOR, RL, VIN, DT).unwrap().voltage;
        assert!((p_out::<f64>(e, RL).unwrap() - 168e-6).abs() < 1e-6);
        assert_eq!(p_out::<f64>(0.0, RL).unwrap(), 0.0);
        let ps = p_out_simplified(CMAX, VIN, RL, DT).unwrap();
        assert!((ps - (CMAX * VIN / DT).powi(2) * RL).abs() < 1e-18);
    }

    #[test]
    fn load_bound_examples() {
        assert!((max_load_resistance::<f64>(40.0, 200e-6).unwrap() - 8e6).abs() < 1e-6);
        assert!((max_load_resistance::<f64>(20.0, 200e-6).unwrap() - 2e6).abs() < 1e-6);
        assert!((max_load_resistance::<f64>(40.0, 800e-6).unwrap() - 2e6).abs() < 1e-6);
    }

    #[test]
    fn required_cmax_examples() {
        let c = required_cmax(200e-6, 8e6, 3.3, DT).unwrap();
        assert!((c - 6.3134e-9).abs() < 0.001e-9, "{c}");
        let c4 = required_cmax(800e-6, 8e6, 3.3, DT).unwrap();
        assert!((c4 / c - 2.0).abs() < 1e-12);
        let cv = required_cmax(200e-6, 8e6, 6.6, DT).unwrap();
        assert!((c / cv - 2.0).abs() < 1e-12);
    }

    #[test]
    fn finger_count_examples() {
        assert_eq!(
            finger_count_for_layout(35e-6, 10e-6, 33.95e-3).unwrap(),
            377
        );
        assert_eq!(finger_count_for_layout(35e-6, 10e-6, 33.9e-3).unwrap(), 376);
        assert_eq!(
            finger_count_for_layout(70e-6, 10e-6, 33.95e-3).unwrap(),
            212
        );
        assert_eq!(finger_count_for_layout(35e-6, 10e-6, 90e-6).unwrap(), 1);
        assert!(matches!(
            finger_count_for_layout(35e-6, 10e-6, 80e-6),
            Err(Error::LayoutTooSmall { .. })
        ));
    }

    #[test]
    fn table1_prediction() {
        let p = predict_cycle(&DeviceDesign::<f64>::table1()).unwrap();
        assert!((p.v_sat - 40.3).abs() < 0.1, "{}", p.v_sat);
        assert!((p.p_out - 203e-6).abs() < 1e-6, "{}", p.p_out);
        assert!(p.flags.storage_dominates && p.flags.slow_discharge);
        assert!(!p.flags.discharge_dominated);
        assert!((p.ripple_fraction - 0.02638).abs() < 1e-4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn approx_converges_in_regime(
                cmax in 1e-9f64..1e-8, cmin in 1e-11f64..1e-9,
                k_stor in 20.01f64..1e3, k_tau in 20.01f64..1e4, dt in 1e-4f64..1e-2,
            ) {
                let c_stor = cmin * k_stor;
                let r_l = k_tau * dt / c_stor;
                let e = v_sat_exact(cmax, cmin, c_stor, r_l, 3.3, dt).unwrap().voltage;
                let a = v_sat_approx(cmax, cmin, c_stor, r_l, 3.3, dt).unwrap();
                prop_assert!(((a - e) / e).abs() < 0.05, "{} {}", a, e);
            }

            #[test]
            fn exact_monotone(f in 1.01f64..2.0) {
                let base = v_sat_exact(CMAX, CMIN, CSTOR, RL, VIN, DT).unwrap().voltage;
                prop_assert!(v_sat_exact(CMAX * f, CMIN, CSTOR, RL, VIN, DT).unwrap().voltage > base);
                prop_assert!(v_sat_exact(CMAX, CMIN, CSTOR, RL, VIN * f, DT).unwrap().voltage > base);
                prop_assert!(v_sat_exact(CMAX, CMIN * f, CSTOR, RL, VIN, DT).unwrap().voltage < base);
            }

            #[test]
            fn required_cmax_round_trip(p in 1e-6f64..1e-2, r_l in 1e4f64..1e8, v in 0.5f64..10.0, dt in 1e-4f64..1e-1) {
                let c = required_cmax(p, r_l, v, dt).unwrap();
                let back = p_out_simplified(c, v, r_l, dt).unwrap();
                prop_assert!(((back - p) / p).abs() < 1e-12);
            }
        }
    }
}
