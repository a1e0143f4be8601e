use serde::Serialize;

use super::SimTrace;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum number of post-transient conversion cycles.
pub const MIN_STEADY_CYCLES: usize = 10;
/// Number of trailing cycles checked for drift.
pub const DRIFT_WINDOW: usize = 5;
/// Largest relative spread allowed over the drift window.
pub const MAX_DRIFT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState<T> {
    /// Mean pre-transfer storage voltage.
    pub v_sat: T,
    /// Mean drop of the storage voltage between consecutive transfers.
    pub ripple: T,
    /// Relative spread of the last pre-transfer voltages.
    pub drift: T,
    /// Mean capacitance at the SW1 instants.
    pub c_max: T,
    /// Mean capacitance at the SW2 instants.
    pub c_min: T,
    /// Mean time between transfers.
    pub transfer_interval: T,
    pub cycles: usize,
}

fn mean<T: Real>(xs: impl Iterator<Item = T>) -> T {
    let (sum, n) = xs.fold((T::zero(), 0usize), |(s, n), x| (s + x, n + 1));
    sum / T::from_usize(n.max(1)).unwrap()
}

/// Steady-state output of a trace, using the cycles that close in the
/// second half of the run.
pub fn steady_state_voltage<T: Real>(trace: &SimTrace<T>) -> Result<SteadyState<T>> {
    let t_from = trace.final_state.t * T::half();
    let cycles: Vec<_> = trace
        .cycles
        .iter()
        .filter(|c| c.t >= t_from && c.c_at_charge.is_finite())
        .collect();
    if cycles.len() < MIN_STEADY_CYCLES {
        return Err(Error::NotConverged(format!(
            "{} post-transient cycles, need {MIN_STEADY_CYCLES}",
            cycles.len()
        )));
    }
    let v_sat = mean(cycles.iter().map(|c| c.v_stor_before));
    let ripple = mean(
        cycles
            .windows(2)
            .map(|w| w[0].v_stor_after - w[1].v_stor_before),
    );
    let tail = &cycles[cycles.len() - DRIFT_WINDOW..];
    let hi = tail
        .iter()
        .map(|c| c.v_stor_before)
        .fold(T::neg_infinity(), T::max);
    let lo = tail
        .iter()
        .map(|c| c.v_stor_before)
        .fold(T::infinity(), T::min);
    let tail_mean = mean(tail.iter().map(|c| c.v_stor_before));
    let drift = if tail_mean > T::zero() {
        (hi - lo) / tail_mean
    } else {
        T::zero()
    };
    if drift >= T::lit(MAX_DRIFT) {
        return Err(Error::NotConverged(format!(
            "storage voltage still drifting by {:.3}% over the last {DRIFT_WINDOW} cycles",
            drift.as_f64() * 100.0
        )));
    }
    let span = cycles[cycles.len() - 1].t - cycles[0].t;
    Ok(SteadyState {
        v_sat,
        ripple,
        drift,
        c_max: mean(cycles.iter().map(|c| c.c_at_charge)),
        c_min: mean(cycles.iter().map(|c| c.c_at_transfer)),
        transfer_interval: span / T::from_usize(cycles.len() - 1).unwrap(),
        cycles: cycles.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CycleRecord, SimOptions, SimState};

    fn trace_with(cycles: Vec<CycleRecord<f64>>, t_end: f64) -> SimTrace<f64> {
        let mut final_state = SimState::rest();
        final_state.t = t_end;
        SimTrace {
            frequency: 120.0,
            options: SimOptions {
                dt: 1e-5,
                duration: t_end,
                sample_stride: 1,
                event_tolerance: 1e-12,
            },
            samples: vec![],
            events: vec![],
            cycles,
            final_state,
        }
    }

    fn record(index: usize, t: f64, before: f64, after: f64) -> CycleRecord<f64> {
        CycleRecord {
            index,
            t,
            c_at_charge: 7e-9,
            c_at_transfer: 46e-12,
            v_stor_before: before,
            v_stor_after: after,
            mech_work: 0.0,
            source_energy: 0.0,
            load_energy: 0.0,
            switch_loss: 0.0,
            stored_start: 0.0,
            stored_end: 0.0,
        }
    }

    #[test]
    fn constant_trace_has_no_ripple() {
        let cycles = (0..40)
            .map(|k| record(k, k as f64 * 0.01, 5.0, 5.0))
            .collect();
        let s = steady_state_voltage(&trace_with(cycles, 0.4)).unwrap();
        assert_eq!(s.v_sat, 5.0);
        assert_eq!(s.ripple, 0.0);
        assert_eq!(s.drift, 0.0);
        assert_eq!(s.cycles, 20);
        assert!((s.transfer_interval - 0.01).abs() < 1e-12);
    }

    #[test]
    fn short_trace_is_not_converged() {
        let cycles = (0..8)
            .map(|k| record(k, k as f64 * 0.01, 5.0, 5.0))
            .collect();
        assert!(matches!(
            steady_state_voltage(&trace_with(cycles, 0.08)),
            Err(Error::NotConverged(_))
        ));
    }

    #[test]
    fn drifting_trace_is_not_converged() {
        let cycles = (0..40)
            .map(|k| record(k, k as f64 * 0.01, 1.0 + k as f64, 1.5 + k as f64))
            .collect();
        assert!(steady_state_voltage(&trace_with(cycles, 0.4)).is_err());
    }

    #[test]
    fn ripple_is_drop_between_transfers() {
        let cycles = (0..40)
            .map(|k| record(k, k as f64 * 0.01, 40.0, 41.0))
            .collect();
        let s = steady_state_voltage(&trace_with(cycles, 0.4)).unwrap();
        assert!((s.ripple - 1.0).abs() < 1e-12);
    }
}
