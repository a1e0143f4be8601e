use std::f64::consts::PI;

use eharvest::dynamics::{
    simulate, size_attached_mass, step, EventKind, Phase, SimOptions, SimState,
    DEFAULT_STEPS_PER_PERIOD,
};
use eharvest::{Design, Source};

fn options(source: &Source, duration: f64) -> SimOptions<f64> {
    SimOptions::for_source(source, DEFAULT_STEPS_PER_PERIOD, duration)
}

/// Undamped, uncharged structure tuned to the drive frequency.
fn free_resonator(accel: f64) -> (Design, Source) {
    let mut d = Design::table1();
    let source = Source::sine(accel, 120.0);
    let w = source.angular_frequency();
    d.circuit.input_voltage = 0.0;
    d.mechanics.damping_scale = 0.0;
    d.mechanics.spring_constant = d.mechanics.shuttle_mass * w * w;
    (d, source)
}

#[test]
fn undamped_resonance_grows_linearly() {
    let (d, source) = free_resonator(0.1);
    let w = source.angular_frequency();
    let trace = simulate(&d, &source, &options(&source, 10.0 / 120.0)).unwrap();
    let exact = |t: f64| 0.1 / (2.0 * w * w) * ((w * t).sin() - w * t * (w * t).cos());
    let peak = trace
        .samples
        .iter()
        .map(|s| exact(s.t).abs())
        .fold(0.0, f64::max);
    for s in &trace.samples {
        assert!((s.z - exact(s.t)).abs() <= 1e-2 * peak, "t = {}", s.t);
        assert_eq!(s.q_v, 0.0);
        assert_eq!(s.v_stor, 0.0);
    }
    assert!(trace.events_of(EventKind::StopImpact).next().is_none());
}

#[test]
fn unforced_resonator_conserves_energy() {
    let (d, source) = free_resonator(0.0);
    let k = d.mechanics.spring_constant;
    let m = d.mechanics.shuttle_mass;
    let opts = options(&source, 1.0 / 120.0);
    let mut state = SimState {
        z: 10e-6,
        ..SimState::rest()
    };
    let energy = |s: &SimState<f64>| 0.5 * k * s.z * s.z + 0.5 * m * s.z_dot * s.z_dot;
    let e0 = energy(&state);
    for _ in 0..DEFAULT_STEPS_PER_PERIOD {
        state = step(&state, &d, &source, &opts).unwrap();
    }
    assert!((energy(&state) - e0).abs() / e0 < 1e-9);
    assert!((state.z - 10e-6).abs() < 1e-9);
}

#[test]
fn no_excitation_stays_at_rest() {
    let d = Design::table1();
    let source = Source::sine(0.0, 120.0);
    let trace = simulate(&d, &source, &options(&source, 0.05)).unwrap();
    assert!(trace.samples.iter().all(|s| s.z == 0.0 && s.z_dot == 0.0));
    assert!(trace.events.is_empty());
    assert!(trace.cycles.is_empty());
}

#[test]
fn storage_decays_through_load_between_events() {
    let mut d = Design::table1();
    d.circuit.storage_capacitance = 20e-9;
    d.circuit.load_resistance = 8e6;
    // one step of 1.6 ms at the minimum resolution
    let source = Source::sine(0.0, 3.125);
    let opts = SimOptions {
        dt: 1.6e-3,
        ..SimOptions::for_source(&source, 200, 1.0)
    };
    let start = SimState {
        v_stor: 1.0,
        ..SimState::rest()
    };
    let next = step(&start, &d, &source, &opts).unwrap();
    assert!((next.v_stor - (-0.01f64).exp()).abs() < 1e-12);
    assert_eq!(next.z, 0.0);
    assert_eq!(next.q_v, 0.0);
}

#[test]
fn plastic_impact_stops_at_the_limit() {
    let mut d = Design::table1();
    d.mechanics.damping_scale = 1e-3;
    d.mechanics.restitution = 0.0;
    let source = Source::sine(2.25, 120.0);
    let trace = simulate(&d, &source, &options(&source, 0.3)).unwrap();
    let z_stop = d.z_stop();
    let impacts: Vec<_> = trace.events_of(EventKind::StopImpact).collect();
    assert!(!impacts.is_empty());
    for e in &impacts {
        assert_eq!(e.after.z_dot, 0.0);
        assert_eq!(e.after.z.abs(), z_stop);
    }
    assert!(trace.samples.iter().all(|s| s.z.abs() <= z_stop));
}

#[test]
fn elastic_impact_does_not_add_speed() {
    let (mut d, source) = free_resonator(2.25);
    d.mechanics.restitution = 0.5;
    let trace = simulate(&d, &source, &options(&source, 0.1)).unwrap();
    let z_stop = d.z_stop();
    let impacts: Vec<_> = trace.events_of(EventKind::StopImpact).collect();
    assert!(!impacts.is_empty());
    for e in &impacts {
        assert!(e.after.z_dot.abs() <= e.before.z_dot.abs());
        assert!(e.after.z_dot * e.before.z_dot <= 0.0);
    }
    assert!(trace.samples.iter().all(|s| s.z.abs() <= z_stop));
}

#[test]
fn zero_input_voltage_harvests_nothing() {
    let mut d = Design::table1();
    d.circuit.input_voltage = 0.0;
    let source = Source::sine(2.25, 120.0);
    let trace = simulate(&d, &source, &options(&source, 0.2)).unwrap();
    assert!(trace.peak_displacement_after(0.0) > 1e-6);
    assert!(trace
        .samples
        .iter()
        .all(|s| s.v_stor == 0.0 && s.q_v == 0.0));
    assert!(trace.events_of(EventKind::Sw1Charge).count() > 10);
}

#[test]
fn runs_are_deterministic() {
    let d = Design::table1();
    let source = Source::sine(2.25, 120.0);
    let opts = options(&source, 0.1);
    let a = simulate(&d, &source, &opts).unwrap();
    let b = simulate(&d, &source, &opts).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn events_alternate_and_cycles_balance() {
    let mut d = Design::table1();
    d.mechanics.damping_scale = 0.3;
    let source = Source::sine(2.25, 120.0);
    let trace = simulate(&d, &source, &options(&source, 0.5)).unwrap();
    let switch: Vec<_> = trace
        .events
        .iter()
        .filter(|e| e.kind != EventKind::StopImpact)
        .collect();
    assert!(switch.len() > 100);
    for pair in switch.windows(2) {
        assert_ne!(pair[0].kind, pair[1].kind);
        assert!(pair[0].t <= pair[1].t);
    }
    for e in &switch {
        let expected = match e.kind {
            EventKind::Sw1Charge => Phase::ChargedConstantQ,
            _ => Phase::AwaitingCmax,
        };
        assert_eq!(e.after.phase, expected);
    }
    assert!(trace.cycles.len() > 50);
    for c in &trace.cycles[1..] {
        assert!(
            c.balance_error() < 0.02,
            "cycle {} error {}",
            c.index,
            c.balance_error()
        );
    }
}

#[test]
fn sizing_finds_the_anchor_mass() {
    let mut d = Design::table1();
    // calibrated so 7 to 8 g just reaches the stop region at 2.25 m/s²
    d.mechanics.damping_scale = 0.1;
    let source = Source::sine(2.25, 120.0);
    let masses: Vec<f64> = (1..=15).map(|g| g as f64 * 1e-3).collect();
    let sizing = size_attached_mass(&d, &source, 34.8e-6, &masses, &options(&source, 2.0)).unwrap();
    assert!(
        (4e-3..=12e-3).contains(&sizing.mass),
        "m* = {}",
        sizing.mass
    );
    let w = 2.0 * PI * 120.0;
    assert!((sizing.spring_constant - sizing.mass * w * w).abs() < 1e-9 * sizing.spring_constant);
    assert_eq!(sizing.candidates.len(), 15);
}

#[test]
fn sizing_edge_cases() {
    let d = Design::table1();
    let source = Source::sine(2.25, 120.0);
    let opts = options(&source, 0.05);
    let masses = [3e-3, 1e-3, 2e-3];
    let s = size_attached_mass(&d, &source, 0.0, &masses, &opts).unwrap();
    assert_eq!(s.mass, 1e-3);
    assert!(size_attached_mass(&d, &source, d.z_stop() * 1.01, &masses, &opts).is_err());
    assert!(size_attached_mass(&d, &source, 1e-6, &[], &opts).is_err());
}

#[test]
fn sizing_at_default_damping_misses_the_anchor() {
    let d = Design::table1();
    let source = Source::sine(2.25, 120.0);
    let masses = [5e-3, 10e-3, 15e-3];
    let err =
        size_attached_mass(&d, &source, 34.8e-6, &masses, &options(&source, 2.0)).unwrap_err();
    assert!(
        matches!(err, eharvest::Error::TargetNotReached { .. }),
        "{err}"
    );
}
