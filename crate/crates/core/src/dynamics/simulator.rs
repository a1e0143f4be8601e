use super::{
    damping_coefficient, CycleRecord, EventKind, Phase, SimEvent, SimOptions, SimState, SimTrace,
};
use crate::capacitance::CombModel;
use crate::error::{Error, Result};
use crate::model::{validate_design, DeviceDesign, VibrationSource};
use crate::scalar::Real;

const MAX_BISECTIONS: usize = 200;

/// Mechanical part of the state advanced by the integrator, plus the running
/// work done against the electrostatic force.
#[derive(Debug, Clone, Copy)]
struct Kinematics<T> {
    t: T,
    z: T,
    z_dot: T,
    work: T,
}

#[derive(Debug, Clone, Copy, Default)]
struct Totals<T> {
    work: T,
    source: T,
    load: T,
    loss: T,
}

/// Stateful stepper for one run. The public [`step`] and [`simulate`]
/// functions wrap this.
pub struct Simulator<'a, T: Real> {
    design: &'a DeviceDesign<T>,
    comb: CombModel<T>,
    mass: T,
    stiffness: T,
    drive_accel: T,
    omega: T,
    v_in: T,
    c_stor: T,
    tau: T,
    restitution: T,
    gap: T,
    dt: T,
    tolerance: T,
    /// Sign of `z * z_dot` (i.e. of dC/dt) seen last; 0 before any motion.
    last_sign: i8,
    in_contact: bool,
    totals: Totals<T>,
    work: T,
    window_start: Totals<T>,
    window_stored: T,
    c_at_charge: T,
    cycles: Vec<CycleRecord<T>>,
    events: Vec<SimEvent<T>>,
}

fn sign<T: Real>(x: T) -> i8 {
    if x > T::zero() {
        1
    } else if x < T::zero() {
        -1
    } else {
        0
    }
}

impl<'a, T: Real> Simulator<'a, T> {
    pub fn new(
        design: &'a DeviceDesign<T>,
        source: &VibrationSource<T>,
        options: &SimOptions<T>,
    ) -> Result<Self> {
        // V_in = 0 is allowed here: it runs the uncharged mechanics
        let violations: Vec<_> = validate_design(design)
            .into_iter()
            .filter(|v| {
                !(v.field == "circuit.input_voltage" && design.circuit.input_voltage == T::zero())
            })
            .collect();
        if !violations.is_empty() {
            return Err(Error::InvalidDesign(violations));
        }
        options.validate(source)?;
        let c = &design.circuit;
        let mut sim = Simulator {
            design,
            comb: CombModel::new(design),
            mass: design.mechanics.shuttle_mass,
            stiffness: design.mechanics.spring_constant,
            drive_accel: source.acceleration,
            omega: source.angular_frequency(),
            v_in: c.input_voltage,
            c_stor: c.storage_capacitance,
            tau: c.load_resistance * c.storage_capacitance,
            restitution: design.mechanics.restitution,
            gap: design.geometry.initial_gap,
            dt: options.dt,
            tolerance: options.event_tolerance,
            last_sign: 0,
            in_contact: false,
            totals: Totals::default(),
            work: T::zero(),
            window_start: Totals::default(),
            window_stored: T::zero(),
            c_at_charge: T::nan(),
            cycles: Vec::new(),
            events: Vec::new(),
        };
        sim.window_stored = sim.stored_energy(&SimState::rest());
        Ok(sim)
    }

    /// Prepares bookkeeping for a run starting at `state`.
    pub fn reset(&mut self, state: &SimState<T>) {
        self.last_sign = sign(state.z * state.z_dot);
        self.in_contact = false;
        self.totals = Totals::default();
        self.work = T::zero();
        self.window_start = Totals::default();
        self.window_stored = self.stored_energy(state);
        self.c_at_charge = T::nan();
        self.cycles.clear();
        self.events.clear();
    }

    pub fn events(&self) -> &[SimEvent<T>] {
        &self.events
    }

    pub fn cycles(&self) -> &[CycleRecord<T>] {
        &self.cycles
    }

    pub fn capacitance(&self, z: T) -> T {
        self.comb.capacitance(z)
    }

    fn stored_energy(&self, s: &SimState<T>) -> T {
        s.q_v * s.q_v / (T::two() * self.comb.capacitance(s.z))
            + T::half() * self.c_stor * s.v_stor * s.v_stor
    }

    #[inline]
    fn acceleration(&self, t: T, z: T, z_dot: T, q: T) -> T {
        let spring = -self.stiffness * z;
        let damping = -damping_coefficient(z, self.design) * z_dot;
        // frame acceleration is -A sin(wt), so the inertial drive is +m A sin(wt)
        let drive = self.mass * self.drive_accel * (self.omega * t).sin();
        (spring + damping + self.comb.force(z, q) + drive) / self.mass
    }

    #[inline]
    fn derivative(&self, t: T, z: T, z_dot: T, q: T) -> (T, T, T) {
        let f_e = self.comb.force(z, q);
        (z_dot, self.acceleration(t, z, z_dot, q), -f_e * z_dot)
    }

    fn rk4(&self, s: &Kinematics<T>, q: T, h: T) -> Kinematics<T> {
        let half = h * T::half();
        let six = T::lit(6.0);
        let (k1z, k1v, k1w) = self.derivative(s.t, s.z, s.z_dot, q);
        let (k2z, k2v, k2w) =
            self.derivative(s.t + half, s.z + half * k1z, s.z_dot + half * k1v, q);
        let (k3z, k3v, k3w) =
            self.derivative(s.t + half, s.z + half * k2z, s.z_dot + half * k2v, q);
        let (k4z, k4v, k4w) = self.derivative(s.t + h, s.z + h * k3z, s.z_dot + h * k3v, q);
        let two = T::two();
        Kinematics {
            t: s.t + h,
            z: s.z + h / six * (k1z + two * k2z + two * k3z + k4z),
            z_dot: s.z_dot + h / six * (k1v + two * k2v + two * k3v + k4v),
            work: s.work + h / six * (k1w + two * k2w + two * k3w + k4w),
        }
    }

    /// Storage capacitor discharge through the load over `h`.
    fn decay(&mut self, state: &mut SimState<T>, h: T) {
        let v0 = state.v_stor;
        let v1 = v0 * (-h / self.tau).exp();
        self.totals.load = self.totals.load + T::half() * self.c_stor * (v0 * v0 - v1 * v1);
        state.v_stor = v1;
    }

    fn check_trial(&self, k: &Kinematics<T>) -> Result<()> {
        let ok = k.z.is_finite() && k.z_dot.is_finite() && k.z.abs() < self.gap;
        if ok {
            Ok(())
        } else {
            Err(Error::StateFault {
                t: k.t.as_f64(),
                message: format!(
                    "non-physical state z = {:e} m, z_dot = {:e} m/s; reduce dt_sim",
                    k.z.as_f64(),
                    k.z_dot.as_f64()
                ),
            })
        }
    }

    /// Smallest sub-step in `(0, h]` after which `crossed` holds, to the
    /// event tolerance.
    fn localize(
        &self,
        kin: &Kinematics<T>,
        q: T,
        h: T,
        crossed: impl Fn(&Kinematics<T>) -> bool,
    ) -> (T, Kinematics<T>) {
        let mut lo = T::zero();
        let mut hi = h;
        let mut at_hi = self.rk4(kin, q, h);
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= self.tolerance {
                break;
            }
            let mid = (lo + hi) * T::half();
            let trial = self.rk4(kin, q, mid);
            if crossed(&trial) {
                hi = mid;
                at_hi = trial;
            } else {
                lo = mid;
            }
        }
        (hi, at_hi)
    }

    fn push_event(&mut self, kind: EventKind, before: SimState<T>, after: SimState<T>) {
        self.events.push(SimEvent {
            t: after.t,
            kind,
            capacitance: self.comb.capacitance(after.z),
            before,
            after,
        });
    }

    fn charge(&mut self, state: &mut SimState<T>) {
        let before = *state;
        let c = self.comb.capacitance(state.z);
        let q_new = c * self.v_in;
        let v_old = state.q_v / c;
        self.totals.source = self.totals.source + self.v_in * (q_new - state.q_v);
        self.totals.loss = self.totals.loss + T::half() * c * (self.v_in - v_old).powi(2);
        state.q_v = q_new;
        state.phase = Phase::ChargedConstantQ;
        self.c_at_charge = c;
        self.push_event(EventKind::Sw1Charge, before, *state);
    }

    fn transfer(&mut self, state: &mut SimState<T>) {
        let before = *state;
        let c = self.comb.capacitance(state.z);
        let cs = self.c_stor;
        let v_c = state.q_v / c;
        let v_common = (state.q_v + cs * state.v_stor) / (c + cs);
        self.totals.loss =
            self.totals.loss + T::half() * (c * cs / (c + cs)) * (v_c - state.v_stor).powi(2);
        state.q_v = c * v_common;
        state.v_stor = v_common;
        state.phase = Phase::AwaitingCmax;
        self.push_event(EventKind::Sw2Transfer, before, *state);

        self.totals.work = self.work;
        let stored_end = self.stored_energy(state);
        let w = &self.window_start;
        self.cycles.push(CycleRecord {
            index: self.cycles.len(),
            t: state.t,
            c_at_charge: self.c_at_charge,
            c_at_transfer: c,
            v_stor_before: before.v_stor,
            v_stor_after: state.v_stor,
            mech_work: self.totals.work - w.work,
            source_energy: self.totals.source - w.source,
            load_energy: self.totals.load - w.load,
            switch_loss: self.totals.loss - w.loss,
            stored_start: self.window_stored,
            stored_end,
        });
        self.window_start = self.totals;
        self.window_stored = stored_end;
    }

    fn impact(&mut self, state: &mut SimState<T>) {
        let before = *state;
        let z_stop = self.comb.z_stop();
        state.z = if state.z > T::zero() { z_stop } else { -z_stop };
        state.z_dot = -self.restitution * state.z_dot;
        // bounces slower than this settle into contact
        if state.z_dot.abs() <= T::lit(1e-9) {
            state.z_dot = T::zero();
            self.in_contact = true;
        }
        self.push_event(EventKind::StopImpact, before, *state);
    }

    /// Advances `state` by one integration step, applying any events inside
    /// it. Events are appended to the simulator's log.
    pub fn advance(&mut self, state: &SimState<T>) -> Result<SimState<T>> {
        let mut cur = *state;
        let t_end = state.t + self.dt;
        let mut charged = false;
        let mut transferred = false;
        let z_stop = self.comb.z_stop();
        let floor = self.tolerance * T::lit(1e-3);

        loop {
            let h = t_end - cur.t;
            if h <= floor {
                break;
            }

            if self.in_contact {
                let side = if cur.z > T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let (z, q) = (cur.z, cur.q_v);
                let pushing = |t: T| side * self.acceleration(t, z, T::zero(), q) > T::zero();
                if pushing(cur.t) {
                    if pushing(t_end) {
                        self.decay(&mut cur, h);
                        cur.t = t_end;
                        break;
                    }
                    let (mut lo, mut hi) = (cur.t, t_end);
                    for _ in 0..MAX_BISECTIONS {
                        if hi - lo <= self.tolerance {
                            break;
                        }
                        let mid = (lo + hi) * T::half();
                        if pushing(mid) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let h = hi - cur.t;
                    self.decay(&mut cur, h);
                    cur.t = hi;
                }
                self.in_contact = false;
                continue;
            }

            let kin = Kinematics {
                t: cur.t,
                z: cur.z,
                z_dot: cur.z_dot,
                work: self.work,
            };
            let trial = self.rk4(&kin, cur.q_v, h);
            self.check_trial(&trial)?;

            let hits_stop = trial.z.abs() > z_stop;
            let new_sign = sign(trial.z * trial.z_dot);
            let switches = self.last_sign != 0 && new_sign != 0 && new_sign != self.last_sign;

            if !hits_stop && !switches {
                self.decay(&mut cur, h);
                cur.t = t_end;
                cur.z = trial.z;
                cur.z_dot = trial.z_dot;
                self.work = trial.work;
                if self.last_sign == 0 {
                    self.last_sign = new_sign;
                }
                break;
            }

            let q = cur.q_v;
            let stop_at = hits_stop.then(|| self.localize(&kin, q, h, |k| k.z.abs() > z_stop));
            let last = self.last_sign;
            let switch_at = switches.then(|| {
                self.localize(&kin, q, h, |k| {
                    let s = sign(k.z * k.z_dot);
                    s != 0 && s != last
                })
            });
            let stop_first = match (&stop_at, &switch_at) {
                (Some((hs, _)), Some((hw, _))) => hs <= hw,
                (Some(_), None) => true,
                _ => false,
            };
            let (h_event, at) = if stop_first {
                stop_at.unwrap()
            } else {
                switch_at.unwrap()
            };
            self.check_trial(&at)?;
            self.decay(&mut cur, h_event);
            cur.t = at.t;
            cur.z = at.z;
            cur.z_dot = at.z_dot;
            self.work = at.work;

            if stop_first {
                self.impact(&mut cur);
                if self.last_sign > 0 {
                    // capacitance peaks at the stop
                    self.charge(&mut cur);
                    charged = true;
                }
                self.last_sign = -1;
            } else if last > 0 {
                self.charge(&mut cur);
                charged = true;
                self.last_sign = -1;
            } else {
                self.transfer(&mut cur);
                transferred = true;
                self.last_sign = 1;
            }
            if charged && transferred {
                return Err(Error::StepTooCoarse { t: cur.t.as_f64() });
            }
        }
        cur.t = t_end;
        Ok(cur)
    }
}

/// One integration step from `state`, events included.
pub fn step<T: Real>(
    state: &SimState<T>,
    design: &DeviceDesign<T>,
    source: &VibrationSource<T>,
    options: &SimOptions<T>,
) -> Result<SimState<T>> {
    let mut sim = Simulator::new(design, source, options)?;
    sim.reset(state);
    sim.advance(state)
}

/// Events implied by the transition `prev -> next` without localization:
/// a capacitance maximum (`z ż` turns from positive to negative), a
/// capacitance minimum (negative to positive) or travel past a stop.
pub fn detect_events<T: Real>(
    prev: &SimState<T>,
    next: &SimState<T>,
    design: &DeviceDesign<T>,
) -> Vec<EventKind> {
    let mut out = Vec::new();
    if next.z.abs() > design.z_stop() {
        out.push(EventKind::StopImpact);
    }
    let a = sign(prev.z * prev.z_dot);
    let b = sign(next.z * next.z_dot);
    match (a, b) {
        (1, -1) => out.push(EventKind::Sw1Charge),
        (-1, 1) => out.push(EventKind::Sw2Transfer),
        _ => {}
    }
    out
}

/// Runs the transient from rest for `options.duration`.
pub fn simulate<T: Real>(
    design: &DeviceDesign<T>,
    source: &VibrationSource<T>,
    options: &SimOptions<T>,
) -> Result<SimTrace<T>> {
    let mut sim = Simulator::new(design, source, options)?;
    let mut state = SimState::rest();
    sim.reset(&state);
    let steps = (options.duration / options.dt)
        .round()
        .to_usize()
        .unwrap_or(0);
    let mut samples = Vec::with_capacity(steps / options.sample_stride + 2);
    samples.push(state);
    let t0 = state.t;
    for n in 1..=steps {
        state = sim.advance(&state)?;
        // avoid drift from repeated addition
        state.t = t0 + T::from_usize(n).unwrap() * options.dt;
        if n % options.sample_stride == 0 {
            samples.push(state);
        }
    }
    Ok(SimTrace {
        frequency: source.frequency,
        options: options.clone(),
        samples,
        events: std::mem::take(&mut sim.events),
        cycles: std::mem::take(&mut sim.cycles),
        final_state: state,
    })
}
