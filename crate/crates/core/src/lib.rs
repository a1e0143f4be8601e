//! Design and transient simulation of electrostatic vibration-to-electricity
//! converters built on a dielectric-coated, gap-closing comb capacitor.
//!
//! The crate covers the closed-form charge-cycle analysis and design sweeps
//! ([`static_design`]), the comb capacitance model ([`capacitance`]), a
//! hybrid electro-mechanical simulator with switch events ([`dynamics`]),
//! linear mechanical characterization ([`mech_char`]) and parasitic loading
//! ([`parasitics`]). Every model is generic over the scalar type through
//! [`Real`]; the aliases below fix it to `f64`, which is what the command
//! line tool uses.

// NaN-rejecting checks are written as `!(x > 0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacitance;
pub mod cli;
pub mod config;
pub mod dynamics;
mod error;
pub mod mech_char;
pub mod model;
pub mod output;
pub mod parasitics;
mod scalar;
pub mod spectrum;
pub mod static_design;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Design = model::DeviceDesign<f64>;
pub type Geometry = model::DeviceGeometry<f64>;
pub type Materials = model::MaterialProps<f64>;
pub type Circuit = model::CircuitParams<f64>;
pub type Mechanics = model::MechanicalParams<f64>;
pub type Source = model::VibrationSource<f64>;
pub type Profile = capacitance::CapacitanceProfile<f64>;
pub type Prediction = static_design::CyclePrediction<f64>;
pub type Sweep = static_design::SweepTable<f64>;
pub type State = dynamics::SimState<f64>;
pub type Options = dynamics::SimOptions<f64>;
pub type Trace = dynamics::SimTrace<f64>;
pub type Response = mech_char::FrequencyResponse<f64>;
pub type Parasitics = parasitics::ParasiticModel<f64>;
