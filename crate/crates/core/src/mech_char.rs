//! Linear mechanical characterization: steady-state frequency response,
//! half-power quality factor extraction and the resonance inversions used
//! to read measured devices.

use serde::Serialize;

use crate::dynamics::damping_coefficient;
use crate::error::{Error, Result};
use crate::model::DeviceDesign;
use crate::scalar::{positive, Real};

/// Steady displacement amplitude of a linear oscillator driven by frame
/// acceleration `A` at `f`: `m A / sqrt((k - m ω²)² + (b ω)²)`.
pub fn oscillator_amplitude<T: Real>(mass: T, stiffness: T, damping: T, accel: T, f: T) -> T {
    let w = T::tau() * f;
    let reactive = stiffness - mass * w * w;
    let resistive = damping * w;
    mass * accel / (reactive * reactive + resistive * resistive).sqrt()
}

/// Uncharged linear response of the design, with the squeeze-film damping
/// linearized at `z = 0`.
pub fn linear_response<T: Real>(design: &DeviceDesign<T>, accel: T, f: T) -> Result<T> {
    if !positive(accel) || !positive(f) {
        return Err(Error::invalid("acceleration and frequency must be > 0"));
    }
    let m = &design.mechanics;
    Ok(oscillator_amplitude(
        m.shuttle_mass,
        m.spring_constant,
        damping_coefficient(T::zero(), design),
        accel,
        f,
    ))
}

/// `k = (2π f₀)² m`.
pub fn spring_from_resonance<T: Real>(f0: T, mass: T) -> Result<T> {
    if !positive(f0) || !positive(mass) {
        return Err(Error::invalid("f0 and mass must be > 0"));
    }
    let w = T::tau() * f0;
    Ok(w * w * mass)
}

/// `b = m ω₀ / Q`.
pub fn damping_from_q<T: Real>(mass: T, f0: T, q: T) -> Result<T> {
    if !positive(mass) || !positive(f0) || !(q > T::zero()) {
        return Err(Error::invalid("mass, f0 and Q must be > 0"));
    }
    Ok(mass * T::tau() * f0 / q)
}

/// Damping multiplier that gives the design quality factor `q` at its own
/// natural frequency.
pub fn calibrate_damping_scale<T: Real>(design: &DeviceDesign<T>, q: T) -> Result<T> {
    let m = &design.mechanics;
    let f0 = crate::model::natural_frequency(m.spring_constant, m.shuttle_mass)?;
    let target = damping_from_q(m.shuttle_mass, f0, q)?;
    let mut unit = design.clone();
    unit.mechanics.damping_scale = T::one();
    let per_unit = damping_coefficient(T::zero(), &unit);
    if !positive(per_unit) {
        return Err(Error::invalid("squeeze-film coefficient is zero"));
    }
    Ok(target / per_unit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityEstimate<T> {
    /// Grid frequency of the peak.
    pub f0: T,
    pub peak_amplitude: T,
    pub f_low: T,
    pub f_high: T,
    pub bandwidth: T,
    pub q: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyResponse<T> {
    /// `(frequency, amplitude)` pairs, increasing in frequency.
    pub points: Vec<(T, T)>,
    pub quality: QualityEstimate<T>,
}

/// Interpolated frequency where the amplitude crosses `level` between two
/// grid points.
fn crossing<T: Real>(a: (T, T), b: (T, T), level: T) -> T {
    let (fa, ya) = a;
    let (fb, yb) = b;
    fa + (level - ya) * (fb - fa) / (yb - ya)
}

/// Half-power quality factor `f₀ / Δf` of a sampled amplitude response.
pub fn quality_factor<T: Real>(points: &[(T, T)]) -> Result<QualityEstimate<T>> {
    if points.len() < 3 {
        return Err(Error::invalid("response needs at least 3 points"));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::invalid("frequencies must be strictly increasing"));
    }
    let (ipk, &(f0, peak)) = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .unwrap();
    if ipk == 0 || ipk == points.len() - 1 {
        return Err(Error::invalid("response peak lies on the grid boundary"));
    }
    let level = peak / T::two().sqrt();
    let left = (1..=ipk)
        .rev()
        .find(|&i| points[i - 1].1 < level)
        .map(|i| crossing(points[i - 1], points[i], level));
    let right = (ipk..points.len() - 1)
        .find(|&i| points[i + 1].1 < level)
        .map(|i| crossing(points[i], points[i + 1], level));
    match (left, right) {
        (Some(f_low), Some(f_high)) => {
            let bandwidth = f_high - f_low;
            Ok(QualityEstimate {
                f0,
                peak_amplitude: peak,
                f_low,
                f_high,
                bandwidth,
                q: f0 / bandwidth,
            })
        }
        _ => Err(Error::invalid(
            "half-power crossings not found on both sides of the peak",
        )),
    }
}

/// Samples the linear response of `design` on `freqs` and extracts Q.
pub fn frequency_response<T: Real>(
    design: &DeviceDesign<T>,
    accel: T,
    freqs: &[T],
) -> Result<FrequencyResponse<T>> {
    let points = freqs
        .iter()
        .map(|&f| linear_response(design, accel, f).map(|a| (f, a)))
        .collect::<Result<Vec<_>>>()?;
    let quality = quality_factor(&points)?;
    Ok(FrequencyResponse { points, quality })
}

/// Evenly spaced grid of `n` frequencies around the natural frequency,
/// spanning a few half-power bandwidths.
pub fn resonance_grid<T: Real>(design: &DeviceDesign<T>, n: usize) -> Result<Vec<T>> {
    let m = &design.mechanics;
    let f0 = crate::model::natural_frequency(m.spring_constant, m.shuttle_mass)?;
    let b = damping_coefficient(T::zero(), design);
    let q = if b > T::zero() {
        m.shuttle_mass * T::tau() * f0 / b
    } else {
        T::lit(1e6)
    };
    let half_span = (T::lit(5.0) * f0 / q).min(f0 * T::lit(0.9));
    let n = n.max(3);
    let lo = f0 - half_span;
    let step = T::two() * half_span / T::from_usize(n - 1).unwrap();
    Ok((0..n)
        .map(|i| lo + step * T::from_usize(i).unwrap())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(q: f64, n: usize) -> Vec<(f64, f64)> {
        let (m, f0) = (3.8e-5, 800.0);
        let k = spring_from_resonance::<f64>(f0, m).unwrap();
        let b = damping_from_q::<f64>(m, f0, q).unwrap();
        (0..n)
            .map(|i| {
                let f = 400.0 + 800.0 * i as f64 / (n - 1) as f64;
                (f, oscillator_amplitude(m, k, b, 40.0, f))
            })
            .collect()
    }

    #[test]
    fn static_limit() {
        let d = DeviceDesign::<f64>::table1();
        let a = linear_response(&d, 2.25, 1e-3).unwrap();
        let static_defl = 7.2e-3 * 2.25 / 4300.0;
        assert!(((a - static_defl) / static_defl).abs() < 1e-6);
        let a2 = linear_response(&d, 4.5, 50.0).unwrap();
        assert!((a2 / linear_response(&d, 2.25, 50.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn resonant_amplitude_is_q_a_over_w0_squared() {
        let (m, f0, q) = (3.8e-5, 800.0, 9.6);
        let k = spring_from_resonance::<f64>(f0, m).unwrap();
        let b = damping_from_q::<f64>(m, f0, q).unwrap();
        let a = oscillator_amplitude(m, k, b, 40.0, f0);
        let w0 = std::f64::consts::TAU * f0;
        assert!((a - q * 40.0 / (w0 * w0)).abs() < 1e-12);
        assert!((a - 15.2e-6).abs() < 0.1e-6, "{a}");
    }

    #[test]
    fn recovers_q_of_synthetic_oscillator() {
        let est = quality_factor(&synthetic(9.6, 4001)).unwrap();
        assert!((est.q - 9.6).abs() < 0.02 * 9.6, "{}", est.q);
        let fine = quality_factor(&synthetic(9.6, 8001)).unwrap();
        assert!(((fine.q - est.q) / est.q).abs() < 0.005);
    }

    #[test]
    fn overdamped_response_has_no_crossings() {
        assert!(quality_factor(&synthetic(0.4, 2001)).is_err());
    }

    #[test]
    fn boundary_peak_is_rejected() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 + 1.0, 10.0 - i as f64)).collect();
        assert!(quality_factor(&pts).is_err());
    }

    #[test]
    fn resonance_inversions() {
        let k = spring_from_resonance::<f64>(800.0, 0.038e-3).unwrap();
        assert!((k - 960.0).abs() < 5.0, "{k}");
        let k = spring_from_resonance::<f64>(123.0, 7.2e-3).unwrap();
        assert!((k - 4.3e3).abs() < 50.0, "{k}");
        let k4 = spring_from_resonance::<f64>(123.0, 4.0 * 7.2e-3).unwrap();
        assert!((k4 / k - 4.0).abs() < 1e-12);

        let b = damping_from_q::<f64>(3.8e-5, 800.0, 9.6).unwrap();
        assert!((b - 0.0199).abs() < 1e-4, "{b}");
        assert!(damping_from_q::<f64>(3.8e-5, 800.0, f64::INFINITY).unwrap() == 0.0);
        assert!((damping_from_q::<f64>(3.8e-5, 800.0, 19.2).unwrap() - b / 2.0).abs() < 1e-15);
    }

    #[test]
    fn calibrated_design_has_requested_q() {
        let mut d = DeviceDesign::<f64>::table1();
        d.mechanics.damping_scale = calibrate_damping_scale(&d, 9.6).unwrap();
        let grid = resonance_grid(&d, 4001).unwrap();
        let r = frequency_response(&d, 2.25, &grid).unwrap();
        assert!((r.quality.q - 9.6).abs() < 0.02 * 9.6, "{}", r.quality.q);
    }

    mod props {
        use super::*;
        use crate::model::natural_frequency;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn spring_frequency_round_trip(k in 1e-1f64..1e6, m in 1e-7f64..1.0) {
                let f = natural_frequency(k, m).unwrap();
                let back = spring_from_resonance::<f64>(f, m).unwrap();
                prop_assert!(((back - k) / k).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn peak_sits_below_natural_frequency() {
        let q: f64 = 9.6;
        let est = quality_factor(&synthetic(q, 40001)).unwrap();
        let expected = 800.0 * (1.0 - 1.0 / (2.0 * q * q)).sqrt();
        assert!((est.f0 - expected).abs() < 0.05, "{} {}", est.f0, expected);
        assert!(((est.f0 - 800.0) / 800.0).abs() < 0.003);
    }
}
