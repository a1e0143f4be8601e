//! TOML run configuration.
//!
//! Dimensioned values are unit-suffixed strings (`"35 um"`, `"8 MOhm"`);
//! dimensionless ones are plain numbers. Unknown keys are rejected.
//! [`RunConfig::from_design`] writes every quantity back in SI so that a
//! design survives a config round trip bit for bit.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{SimOptions, DEFAULT_STEPS_PER_PERIOD};
use crate::error::{Error, Result};
use crate::model::{
    CircuitParams, DeviceDesign, DeviceGeometry, MaterialProps, MechanicalParams, VibrationSource,
};
use crate::parasitics::{estimate_cpar, ParasiticModel};
use crate::spectrum::ingest_spectrum;
use crate::units::{format_quantity, parse_quantity, Dimension};

/// Configuration bundled with the binary: the reference 1 cm² design.
pub const TABLE1_TOML: &str = include_str!("../configs/table1.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub materials: MaterialsConfig,
    pub circuit: CircuitConfig,
    pub mechanics: MechanicsConfig,
    pub source: SourceConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub sizing: SizingConfig,
    #[serde(default)]
    pub parasitics: ParasiticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub shuttle_width: String,
    pub shuttle_length: String,
    pub finger_length: String,
    pub finger_width: String,
    pub structure_thickness: String,
    pub initial_gap: String,
    pub min_gap: String,
    pub finger_count: u32,
    pub usable_edge_length: String,
    pub chip_area: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsConfig {
    pub dielectric_thickness: String,
    pub dielectric_constant: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bare_min_gap: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub input_voltage: String,
    pub storage_capacitance: String,
    pub load_resistance: String,
    pub max_output_voltage: String,
    pub min_output_power: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicsConfig {
    pub shuttle_mass: String,
    pub spring_constant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restitution: Option<f64>,
}

/// Either an explicit `acceleration`/`frequency` pair or a spectrum, inline
/// as `[frequency_hz, accel_ms2]` rows or from a CSV file. With a spectrum
/// and no explicit pair the dominant peak drives the device.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceleration: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_per_period: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_tolerance: Option<String>,
}

/// A list of values, or `start`/`stop` with either `step` or `points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeSpec {
    List(Vec<String>),
    Span(SpanSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanSpec {
    pub start: String,
    pub stop: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<RangeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dielectric_thickness: Option<RangeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_resistance: Option<RangeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub storage_capacitance: Option<RangeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<RangeSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizingConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_displacement: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<RangeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParasiticsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_par: Option<String>,
    /// Measured rest capacitance; `c_par` is its excess over the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_measured: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_par: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

fn q(field: &str, text: &str, dim: Dimension) -> Result<f64> {
    parse_quantity(text, dim).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{field}: {msg}")),
        other => other,
    })
}

/// Drops accumulated rounding noise from grid points (13 significant digits).
fn tidy(v: f64) -> f64 {
    format!("{v:.12e}").parse().unwrap_or(v)
}

fn s(value: f64, dim: Dimension) -> String {
    format_quantity(value, dim)
}

impl RangeSpec {
    /// Expands to values in SI. Spans include `stop` when it lies on the grid.
    pub fn values(&self, field: &str, dim: Dimension) -> Result<Vec<f64>> {
        match self {
            RangeSpec::List(items) => items.iter().map(|t| q(field, t, dim)).collect(),
            RangeSpec::Span(span) => {
                let start = q(field, &span.start, dim)?;
                let stop = q(field, &span.stop, dim)?;
                if stop < start {
                    return Err(Error::Config(format!("{field}: stop below start")));
                }
                match (&span.step, span.points) {
                    (Some(step), None) => {
                        let step = q(field, step, dim)?;
                        if !(step > 0.0) {
                            return Err(Error::Config(format!("{field}: step must be > 0")));
                        }
                        let n = ((stop - start) / step * (1.0 + 1e-9)).floor() as usize;
                        Ok((0..=n).map(|i| tidy(start + step * i as f64)).collect())
                    }
                    (None, Some(points)) if points >= 2 => {
                        let h = (stop - start) / (points - 1) as f64;
                        Ok((0..points).map(|i| tidy(start + h * i as f64)).collect())
                    }
                    (None, Some(1)) if start == stop => Ok(vec![start]),
                    _ => Err(Error::Config(format!(
                        "{field}: give exactly one of step or points (>= 2)"
                    ))),
                }
            }
        }
    }

    pub fn span(start: &str, stop: &str, step: &str) -> Self {
        RangeSpec::Span(SpanSpec {
            start: start.into(),
            stop: stop.into(),
            step: Some(step.into()),
            points: None,
        })
    }

    pub fn list(items: &[&str]) -> Self {
        RangeSpec::List(items.iter().map(|s| s.to_string()).collect())
    }

    /// Parses the command-line form `start:stop:step` or `a,b,c`.
    pub fn parse_cli(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [start, stop, step] => Ok(RangeSpec::span(start, stop, step)),
            [single] => Ok(RangeSpec::List(
                single.split(',').map(|s| s.trim().to_string()).collect(),
            )),
            _ => Err(Error::Config(format!(
                "range {text:?} must be start:stop:step or a comma list"
            ))),
        }
    }
}

/// Parses `--grid` strings such as `gap=5um:100um:2.5um;td=0A,500A`.
pub fn parse_grid(text: &str) -> Result<Vec<(String, RangeSpec)>> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|part| {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("grid entry {part:?} needs key=range")))?;
            Ok((key.trim().to_string(), RangeSpec::parse_cli(value)?))
        })
        .collect()
}

impl SweepConfig {
    pub fn gaps(&self) -> Result<Vec<f64>> {
        self.gap
            .clone()
            .unwrap_or_else(|| RangeSpec::span("5 um", "100 um", "2.5 um"))
            .values("sweep.gap", Dimension::Length)
    }

    pub fn dielectric_thicknesses(&self) -> Result<Vec<f64>> {
        self.dielectric_thickness
            .clone()
            .unwrap_or_else(|| RangeSpec::list(&["0 A", "500 A"]))
            .values("sweep.dielectric_thickness", Dimension::Length)
    }

    pub fn loads(&self) -> Result<Vec<f64>> {
        self.load_resistance
            .clone()
            .unwrap_or_else(|| RangeSpec::span("1 MOhm", "20 MOhm", "1 MOhm"))
            .values("sweep.load_resistance", Dimension::Resistance)
    }

    pub fn storages(&self) -> Result<Vec<f64>> {
        self.storage_capacitance
            .clone()
            .unwrap_or_else(|| RangeSpec::span("5 nF", "100 nF", "5 nF"))
            .values("sweep.storage_capacitance", Dimension::Capacitance)
    }

    /// `None` means a grid centred on the design's resonance.
    pub fn frequencies(&self) -> Result<Option<Vec<f64>>> {
        self.frequency
            .as_ref()
            .map(|r| r.values("sweep.frequency", Dimension::Frequency))
            .transpose()
    }

    /// Applies a `--grid` override. `keys` maps accepted short names to
    /// the sweep fields they replace.
    pub fn apply_grid(&mut self, entries: Vec<(String, RangeSpec)>) -> Result<()> {
        for (key, range) in entries {
            let slot = match key.as_str() {
                "gap" | "initial_gap" => &mut self.gap,
                "td" | "dielectric_thickness" => &mut self.dielectric_thickness,
                "load" | "r_l" | "load_resistance" => &mut self.load_resistance,
                "storage" | "c_stor" | "storage_capacitance" => &mut self.storage_capacitance,
                "freq" | "frequency" => &mut self.frequency,
                other => return Err(Error::Config(format!("unknown grid key {other:?}"))),
            };
            *slot = Some(range);
        }
        Ok(())
    }
}

impl SizingConfig {
    pub fn masses(&self) -> Result<Vec<f64>> {
        self.mass
            .clone()
            .unwrap_or_else(|| RangeSpec::span("1 g", "15 g", "1 g"))
            .values("sizing.mass", Dimension::Mass)
    }

    /// Defaults to 90% of the stop displacement.
    pub fn target(&self, design: &DeviceDesign<f64>) -> Result<f64> {
        match &self.target_displacement {
            Some(t) => q("sizing.target_displacement", t, Dimension::Length),
            None => Ok(0.9 * design.z_stop()),
        }
    }

    pub fn duration(&self) -> Result<f64> {
        q(
            "sizing.duration",
            self.duration.as_deref().unwrap_or("2 s"),
            Dimension::Time,
        )
    }
}

impl SimulationConfig {
    pub fn steps_per_period(&self) -> u32 {
        self.steps_per_period.unwrap_or(DEFAULT_STEPS_PER_PERIOD)
    }

    pub fn duration(&self) -> Result<f64> {
        q(
            "simulation.duration",
            self.duration.as_deref().unwrap_or("5 s"),
            Dimension::Time,
        )
    }

    /// Integration options for `source`; `duration` overrides the config.
    pub fn options(
        &self,
        source: &VibrationSource<f64>,
        duration: Option<f64>,
    ) -> Result<SimOptions<f64>> {
        let duration = match duration {
            Some(d) => d,
            None => self.duration()?,
        };
        let mut opts = SimOptions::for_source(source, self.steps_per_period(), duration);
        if let Some(stride) = self.sample_stride {
            opts.sample_stride = stride;
        }
        if let Some(tol) = &self.event_tolerance {
            opts.event_tolerance = q("simulation.event_tolerance", tol, Dimension::Time)?;
        }
        opts.validate(source)?;
        Ok(opts)
    }
}

impl ParasiticsConfig {
    /// Parasitic model; `c_model` is the computed rest capacitance used when
    /// only a measured value is given.
    pub fn model(&self, c_model: f64) -> Result<ParasiticModel<f64>> {
        let c_par = match (&self.c_par, &self.c_measured) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "parasitics: give c_par or c_measured, not both".into(),
                ))
            }
            (Some(c), None) => q("parasitics.c_par", c, Dimension::Capacitance)?,
            (None, Some(c)) => estimate_cpar(
                q("parasitics.c_measured", c, Dimension::Capacitance)?,
                c_model,
            )?,
            (None, None) => 0.0,
        };
        let r_par = match &self.r_par {
            Some(r) => q("parasitics.r_par", r, Dimension::Resistance)?,
            None => f64::INFINITY,
        };
        let model = ParasiticModel { c_par, r_par };
        model.validate()?;
        Ok(model)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn table1() -> Self {
        Self::parse(TABLE1_TOML).expect("bundled configuration parses")
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    /// Builds the design without validating it, so callers can report
    /// every violation. Relative spectrum paths resolve against `base_dir`.
    pub fn design(&self, base_dir: &Path) -> Result<DeviceDesign<f64>> {
        use Dimension::*;
        let g = &self.geometry;
        let geometry = DeviceGeometry {
            shuttle_width: q("geometry.shuttle_width", &g.shuttle_width, Length)?,
            shuttle_length: q("geometry.shuttle_length", &g.shuttle_length, Length)?,
            finger_length: q("geometry.finger_length", &g.finger_length, Length)?,
            finger_width: q("geometry.finger_width", &g.finger_width, Length)?,
            structure_thickness: q(
                "geometry.structure_thickness",
                &g.structure_thickness,
                Length,
            )?,
            initial_gap: q("geometry.initial_gap", &g.initial_gap, Length)?,
            min_gap: q("geometry.min_gap", &g.min_gap, Length)?,
            finger_count: g.finger_count,
            usable_edge_length: q("geometry.usable_edge_length", &g.usable_edge_length, Length)?,
            chip_area: q("geometry.chip_area", &g.chip_area, Area)?,
        };
        let m = &self.materials;
        let materials = MaterialProps {
            dielectric_thickness: q(
                "materials.dielectric_thickness",
                &m.dielectric_thickness,
                Length,
            )?,
            dielectric_constant: m.dielectric_constant,
            bare_min_gap: match &m.bare_min_gap {
                Some(v) => q("materials.bare_min_gap", v, Length)?,
                None => DeviceDesign::<f64>::table1().materials.bare_min_gap,
            },
        };
        let c = &self.circuit;
        let circuit = CircuitParams {
            input_voltage: q("circuit.input_voltage", &c.input_voltage, Voltage)?,
            storage_capacitance: q(
                "circuit.storage_capacitance",
                &c.storage_capacitance,
                Capacitance,
            )?,
            load_resistance: q("circuit.load_resistance", &c.load_resistance, Resistance)?,
            max_output_voltage: q("circuit.max_output_voltage", &c.max_output_voltage, Voltage)?,
            min_output_power: q("circuit.min_output_power", &c.min_output_power, Power)?,
        };
        let k = &self.mechanics;
        let mechanics = MechanicalParams {
            shuttle_mass: q("mechanics.shuttle_mass", &k.shuttle_mass, Mass)?,
            spring_constant: q("mechanics.spring_constant", &k.spring_constant, Stiffness)?,
            damping_scale: k.damping_scale.unwrap_or(1.0),
            restitution: k.restitution.unwrap_or(0.0),
        };
        let source = self.source(base_dir)?;
        Ok(DeviceDesign {
            geometry,
            materials,
            circuit,
            mechanics,
            source,
        })
    }

    fn source(&self, base_dir: &Path) -> Result<VibrationSource<f64>> {
        let src = &self.source;
        let mut spectrum: Option<VibrationSource<f64>> = match (&src.spectrum_file, &src.spectrum) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "source: give spectrum or spectrum_file, not both".into(),
                ))
            }
            (Some(file), None) => Some(ingest_spectrum(&base_dir.join(file))?),
            (None, Some(rows)) => {
                let mut text = String::from("frequency_hz,accel_ms2\n");
                for [f, a] in rows {
                    text.push_str(&format!("{f:e},{a:e}\n"));
                }
                Some(
                    crate::spectrum::parse_spectrum(text.as_bytes())
                        .map_err(|e| Error::Config(format!("source.spectrum: {e}")))?,
                )
            }
            (None, None) => None,
        };
        let explicit = match (&src.acceleration, &src.frequency) {
            (Some(a), Some(f)) => Some((
                q("source.acceleration", a, Dimension::Acceleration)?,
                q("source.frequency", f, Dimension::Frequency)?,
            )),
            (None, None) => None,
            _ => {
                return Err(Error::Config(
                    "source: acceleration and frequency must be given together".into(),
                ))
            }
        };
        match (explicit, spectrum.take()) {
            (Some((a, f)), Some(mut sp)) => {
                sp.acceleration = a;
                sp.frequency = f;
                Ok(sp)
            }
            (Some((a, f)), None) => Ok(VibrationSource::sine(a, f)),
            (None, Some(sp)) => Ok(sp),
            (None, None) => Err(Error::Config(
                "source: need acceleration and frequency, or a spectrum".into(),
            )),
        }
    }

    /// Configuration that reproduces `design` exactly, with every quantity
    /// written in SI. Run sections keep their defaults.
    pub fn from_design(design: &DeviceDesign<f64>) -> Self {
        use Dimension::*;
        let g = &design.geometry;
        let m = &design.materials;
        let c = &design.circuit;
        let k = &design.mechanics;
        let src = &design.source;
        RunConfig {
            geometry: GeometryConfig {
                shuttle_width: s(g.shuttle_width, Length),
                shuttle_length: s(g.shuttle_length, Length),
                finger_length: s(g.finger_length, Length),
                finger_width: s(g.finger_width, Length),
                structure_thickness: s(g.structure_thickness, Length),
                initial_gap: s(g.initial_gap, Length),
                min_gap: s(g.min_gap, Length),
                finger_count: g.finger_count,
                usable_edge_length: s(g.usable_edge_length, Length),
                chip_area: s(g.chip_area, Area),
            },
            materials: MaterialsConfig {
                dielectric_thickness: s(m.dielectric_thickness, Length),
                dielectric_constant: m.dielectric_constant,
                bare_min_gap: Some(s(m.bare_min_gap, Length)),
            },
            circuit: CircuitConfig {
                input_voltage: s(c.input_voltage, Voltage),
                storage_capacitance: s(c.storage_capacitance, Capacitance),
                load_resistance: s(c.load_resistance, Resistance),
                max_output_voltage: s(c.max_output_voltage, Voltage),
                min_output_power: s(c.min_output_power, Power),
            },
            mechanics: MechanicsConfig {
                shuttle_mass: s(k.shuttle_mass, Mass),
                spring_constant: s(k.spring_constant, Stiffness),
                damping_scale: Some(k.damping_scale),
                restitution: Some(k.restitution),
            },
            source: SourceConfig {
                acceleration: Some(s(src.acceleration, Acceleration)),
                frequency: Some(s(src.frequency, Frequency)),
                spectrum_file: None,
                spectrum: (!src.spectrum.is_empty())
                    .then(|| src.spectrum.iter().map(|&(f, a)| [f, a]).collect()),
            },
            simulation: SimulationConfig::default(),
            sweep: SweepConfig::default(),
            sizing: SizingConfig::default(),
            parasitics: ParasiticsConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn here() -> &'static Path {
        Path::new(".")
    }

    #[test]
    fn bundled_config_is_the_reference_design() {
        let d = RunConfig::table1().design(here()).unwrap();
        assert_eq!(d, DeviceDesign::<f64>::table1());
    }

    #[test]
    fn design_round_trip_is_exact() {
        let mut d = DeviceDesign::<f64>::table1();
        d.geometry.initial_gap = 37.5e-6 / 3.0;
        d.mechanics.damping_scale = 0.1 + 0.2;
        d.source.spectrum = vec![(60.0, 1.0), (120.0, 2.25)];
        let text = RunConfig::from_design(&d).to_toml().unwrap();
        let back = RunConfig::parse(&text).unwrap().design(here()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn config_round_trip_is_exact() {
        let cfg = RunConfig::table1();
        let again = RunConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.design(here()).unwrap(), cfg.design(here()).unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = TABLE1_TOML.replace("[geometry]", "[geometry]\nfinger_colour = 3");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("finger_colour"), "{err}");
    }

    #[test]
    fn bad_units_name_the_field() {
        let mut cfg = RunConfig::table1();
        cfg.geometry.initial_gap = "35 nF".into();
        let err = cfg.design(here()).unwrap_err().to_string();
        assert!(err.contains("geometry.initial_gap"), "{err}");
    }

    #[test]
    fn ranges_expand() {
        let gaps = SweepConfig::default().gaps().unwrap();
        assert_eq!(gaps.len(), 39);
        assert_eq!(gaps[0], 5e-6);
        assert_eq!(gaps[38], 100e-6);
        assert_eq!(gaps[1], 7.5e-6);
        assert_eq!(SizingConfig::default().masses().unwrap()[8], 9e-3);
        let pts = RangeSpec::Span(SpanSpec {
            start: "1 g".into(),
            stop: "3 g".into(),
            step: None,
            points: Some(5),
        })
        .values("m", Dimension::Mass)
        .unwrap();
        assert_eq!(pts.len(), 5);
        assert!(RangeSpec::span("2 g", "1 g", "1 g")
            .values("m", Dimension::Mass)
            .is_err());
        assert!(RangeSpec::span("1 g", "2 g", "0 g")
            .values("m", Dimension::Mass)
            .is_err());
    }

    #[test]
    fn grid_strings() {
        let entries = parse_grid("gap=5um:100um:2.5um; td=0A,500A").unwrap();
        let mut sweep = SweepConfig::default();
        sweep.apply_grid(entries).unwrap();
        assert_eq!(sweep.gaps().unwrap().len(), 39);
        assert_eq!(sweep.dielectric_thicknesses().unwrap(), vec![0.0, 500e-10]);
        assert!(parse_grid("gap").is_err());
        assert!(sweep.apply_grid(parse_grid("colour=1m").unwrap()).is_err());
    }

    #[test]
    fn source_variants() {
        let mut cfg = RunConfig::table1();
        cfg.source = SourceConfig {
            spectrum: Some(vec![[60.0, 1.0], [120.0, 2.25]]),
            ..Default::default()
        };
        let d = cfg.design(here()).unwrap();
        assert_eq!((d.source.acceleration, d.source.frequency), (2.25, 120.0));
        cfg.source = SourceConfig {
            acceleration: Some("1 m/s2".into()),
            ..Default::default()
        };
        assert!(cfg.design(here()).is_err());
        cfg.source = SourceConfig::default();
        assert!(cfg.design(here()).is_err());
    }

    #[test]
    fn parasitic_sections() {
        let p = ParasiticsConfig {
            c_measured: Some("550 pF".into()),
            r_par: Some("2.5 kOhm".into()),
            ..Default::default()
        };
        let m = p.model(50e-12).unwrap();
        assert!((m.c_par - 500e-12).abs() < 1e-24);
        assert_eq!(m.r_par, 2500.0);
        assert_eq!(
            ParasiticsConfig::default().model(50e-12).unwrap(),
            ParasiticModel::none()
        );
        let both = ParasiticsConfig {
            c_par: Some("1 pF".into()),
            c_measured: Some("1 pF".into()),
            r_par: None,
        };
        assert!(both.model(0.0).is_err());
    }
}
