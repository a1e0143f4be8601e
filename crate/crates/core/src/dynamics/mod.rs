//! Hybrid electro-mechanical transient model: the shuttle's equation of
//! motion integrated with a fixed-step classical Runge–Kutta scheme, with
//! switch events at capacitance extrema and mechanical stop impacts.

mod cycle_map;
mod damping;
mod simulator;
mod sizing;
mod steady;

pub use cycle_map::{cycle_map, AffineCycleMap};
pub use damping::{damping_coefficient, mech_damping_force};
pub use simulator::{detect_events, simulate, step, Simulator};
pub use sizing::{size_attached_mass, MassCandidate, MassSizing};
pub use steady::{steady_state_voltage, SteadyState};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::VibrationSource;
use crate::scalar::{positive, Real};

/// Minimum integration steps per vibration period.
pub const MIN_STEPS_PER_PERIOD: f64 = 200.0;

/// Default integration steps per vibration period.
pub const DEFAULT_STEPS_PER_PERIOD: u32 = 4000;

/// Switch bookkeeping between events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    /// Charged by the source, both switches open, charge held constant.
    ChargedConstantQ,
    /// Charge transferred, waiting for the next capacitance maximum.
    AwaitingCmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimState<T> {
    pub t: T,
    pub z: T,
    pub z_dot: T,
    /// Charge on the variable capacitor.
    pub q_v: T,
    /// Storage (load terminal) voltage.
    pub v_stor: T,
    pub phase: Phase,
}

impl<T: Real> SimState<T> {
    pub fn rest() -> Self {
        SimState {
            t: T::zero(),
            z: T::zero(),
            z_dot: T::zero(),
            q_v: T::zero(),
            v_stor: T::zero(),
            phase: Phase::AwaitingCmax,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    /// SW1 closes at a capacitance maximum: `q_v = C V_in`.
    Sw1Charge,
    /// SW2 closes at a capacitance minimum: charge shared with storage.
    Sw2Transfer,
    StopImpact,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::Sw1Charge => "SW1_CHARGE",
            EventKind::Sw2Transfer => "SW2_TRANSFER",
            EventKind::StopImpact => "STOP_IMPACT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEvent<T> {
    pub t: T,
    pub kind: EventKind,
    /// Capacitance at the event instant.
    pub capacitance: T,
    pub before: SimState<T>,
    pub after: SimState<T>,
}

/// Energy accounting for one conversion cycle, closed at an SW2 transfer
/// and opened at the previous one. All energies in J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleRecord<T> {
    pub index: usize,
    /// Transfer time closing the cycle.
    pub t: T,
    pub c_at_charge: T,
    pub c_at_transfer: T,
    pub v_stor_before: T,
    pub v_stor_after: T,
    /// Work done by the structure against the electrostatic force.
    pub mech_work: T,
    /// Energy drawn from the input source at SW1.
    pub source_energy: T,
    pub load_energy: T,
    /// Dissipation of the ideal switches when connecting unequal voltages.
    pub switch_loss: T,
    /// Energy on both capacitors at the start and end of the cycle.
    pub stored_start: T,
    pub stored_end: T,
}

impl<T: Real> CycleRecord<T> {
    /// Relative mismatch of `load + Δstored + loss = work + source`.
    pub fn balance_error(&self) -> T {
        let out = self.load_energy + (self.stored_end - self.stored_start) + self.switch_loss;
        let input = self.mech_work + self.source_energy;
        let scale = input.abs().max(out.abs()).max(T::min_positive_value());
        (out - input).abs() / scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOptions<T> {
    /// Fixed integration step.
    pub dt: T,
    pub duration: T,
    /// Record every `sample_stride`-th step.
    pub sample_stride: usize,
    /// Width of the bracket left by event bisection, in seconds.
    pub event_tolerance: T,
}

impl<T: Real> SimOptions<T> {
    pub fn for_source(source: &VibrationSource<T>, steps_per_period: u32, duration: T) -> Self {
        let steps = T::from_u32(steps_per_period).unwrap();
        SimOptions {
            dt: T::one() / (source.frequency * steps),
            duration,
            sample_stride: (steps_per_period as usize / 50).max(1),
            event_tolerance: T::lit(1e-12),
        }
    }

    /// Same options with the integration step halved and the sampling
    /// stride doubled, so samples land on the same instants.
    pub fn refined(&self) -> Self {
        SimOptions {
            dt: self.dt * T::half(),
            sample_stride: self.sample_stride * 2,
            ..self.clone()
        }
    }

    pub fn validate(&self, source: &VibrationSource<T>) -> Result<()> {
        if !positive(self.dt) {
            return Err(Error::invalid("dt_sim must be > 0"));
        }
        if !positive(self.duration) {
            return Err(Error::invalid("duration must be > 0"));
        }
        if self.sample_stride == 0 {
            return Err(Error::invalid("sample stride must be >= 1"));
        }
        if !positive(self.event_tolerance) {
            return Err(Error::invalid("event tolerance must be > 0"));
        }
        let per_period = T::one() / (source.frequency * self.dt);
        if per_period < T::lit(MIN_STEPS_PER_PERIOD) * T::lit(1.0 - 1e-9) {
            return Err(Error::invalid(format!(
                "dt_sim gives {per_period} steps per period, need at least {MIN_STEPS_PER_PERIOD}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace<T> {
    pub frequency: T,
    pub options: SimOptions<T>,
    pub samples: Vec<SimState<T>>,
    pub events: Vec<SimEvent<T>>,
    pub cycles: Vec<CycleRecord<T>>,
    pub final_state: SimState<T>,
}

impl<T: Real> SimTrace<T> {
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &SimEvent<T>> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// Largest `|z|` reached at displacement extrema after `t_from`.
    pub fn peak_displacement_after(&self, t_from: T) -> T {
        let from_events = self
            .events
            .iter()
            .filter(|e| e.t >= t_from && e.kind != EventKind::Sw2Transfer)
            .map(|e| e.before.z.abs());
        let from_samples = self
            .samples
            .iter()
            .filter(|s| s.t >= t_from)
            .map(|s| s.z.abs());
        from_events.chain(from_samples).fold(T::zero(), T::max)
    }
}
