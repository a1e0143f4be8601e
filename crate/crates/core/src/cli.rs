//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid usage, configuration or design,
//! 2 numerical failure (no convergence, no feasible cell, target missed),
//! 3 I/O or serialization failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::capacitance::{capacitance_profile, CombModel};
use crate::config::{parse_grid, OutputFormat, RangeSpec, RunConfig};
use crate::dynamics::{simulate, size_attached_mass, steady_state_voltage, SteadyState};
use crate::error::{Error, Result};
use crate::mech_char::{frequency_response, resonance_grid};
use crate::model::{conversion_cycle_time, natural_frequency, validate_design, DeviceDesign};
use crate::output::{
    write_json, write_key_values, write_response_csv, write_sizing_csv, write_sweep_csv,
    write_trace_csv,
};
use crate::parasitics::degraded_output;
use crate::spectrum::ingest_spectrum;
use crate::static_design::{
    max_load_resistance, optimal_cell, optimal_gap, predict_cycle, required_cmax, sweep_gap,
    sweep_load_storage, v_sat_approx, v_sat_exact, v_sat_simplified, CyclePrediction,
};
use crate::units::{parse_quantity, Dimension};

#[derive(Debug, Parser)]
#[command(
    name = "eharvest",
    version,
    about = "Electrostatic vibration energy converter design and simulation"
)]
struct Cli {
    /// TOML run configuration; the bundled reference design when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Drive from the dominant peak of a `frequency_hz,accel_ms2` CSV.
    #[arg(long, global = true)]
    spectrum: Option<PathBuf>,
    /// Suppress the summary on stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the design and list every violated constraint.
    Validate,
    /// Closed-form steady-state prediction.
    Static,
    /// Initial gap against dielectric thickness.
    SweepGap(GridArgs),
    /// Load resistance against storage capacitance.
    SweepLoad(GridArgs),
    /// Transient simulation with switch events.
    Simulate(SimArgs),
    /// Linear frequency response and quality factor.
    FreqResponse(GridArgs),
    /// Smallest resonance-matched mass reaching the target displacement.
    SizeMass(SizeArgs),
    /// Output degradation by parasitic capacitance and leakage.
    Parasitics,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Axis overrides, e.g. `gap=5um:100um:2.5um;td=0A,500A`.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// Simulated time, e.g. `2 s`.
    #[arg(long)]
    duration: Option<String>,
    #[arg(long)]
    steps_per_period: Option<u32>,
}

#[derive(Debug, Args)]
struct SizeArgs {
    /// Mass range, e.g. `1g:15g:1g`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    duration: Option<String>,
    /// Target peak displacement, e.g. `30 um`.
    #[arg(long)]
    target: Option<String>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_)
        | Error::OutOfTravel { .. }
        | Error::InvalidDesign(_)
        | Error::Config(_)
        | Error::LayoutTooSmall { .. }
        | Error::Spectrum { .. } => 1,
        Error::NoFeasibleCell
        | Error::TargetNotReached { .. }
        | Error::StepTooCoarse { .. }
        | Error::StateFault { .. }
        | Error::NotConverged(_) => 2,
        Error::Io { .. } | Error::Serialize(_) => 3,
    }
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

struct Context {
    config: RunConfig,
    design: DeviceDesign<f64>,
    out: PathBuf,
    format: OutputFormat,
    quiet: bool,
}

impl Context {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn path(&self, stem: &str) -> PathBuf {
        let ext = match self.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        self.out.join(format!("{stem}.{ext}"))
    }

    fn json<R: Serialize>(&self, stem: &str, command: &str, results: R) -> Result<PathBuf> {
        write_json(
            &self.out.join(format!("{stem}.json")),
            command,
            &self.config,
            results,
        )
    }

    fn wrote(&self, paths: &[PathBuf]) {
        for p in paths {
            self.say(format!("wrote {}", p.display()));
        }
    }

    fn valid_design(&self) -> Result<&DeviceDesign<f64>> {
        self.design.validate()?;
        Ok(&self.design)
    }
}

fn load_context(cli: &Cli) -> Result<Context> {
    let (config, base) = match &cli.config {
        Some(path) => (
            RunConfig::load(path)?,
            path.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (RunConfig::table1(), PathBuf::from(".")),
    };
    let mut design = config.design(&base)?;
    if let Some(path) = &cli.spectrum {
        design.source = ingest_spectrum(path)?;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let format = cli.format.or(config.output.format).unwrap_or_default();
    Ok(Context {
        config,
        design,
        out,
        format,
        quiet: cli.quiet,
    })
}

fn execute(cli: &Cli) -> Result<i32> {
    let mut ctx = load_context(cli)?;
    match &cli.command {
        Command::Validate => validate(&ctx),
        Command::Static => static_report(&ctx),
        Command::SweepGap(args) => {
            apply_grid(&mut ctx, args.grid.as_deref())?;
            sweep_gap_cmd(&ctx)
        }
        Command::SweepLoad(args) => {
            apply_grid(&mut ctx, args.grid.as_deref())?;
            sweep_load_cmd(&ctx)
        }
        Command::Simulate(args) => simulate_cmd(&ctx, args),
        Command::FreqResponse(args) => {
            apply_grid(&mut ctx, args.grid.as_deref())?;
            freq_response_cmd(&ctx)
        }
        Command::SizeMass(args) => size_mass_cmd(&mut ctx, args),
        Command::Parasitics => parasitics_cmd(&ctx),
    }
}

fn apply_grid(ctx: &mut Context, grid: Option<&str>) -> Result<()> {
    if let Some(text) = grid {
        ctx.config.sweep.apply_grid(parse_grid(text)?)?;
    }
    Ok(())
}

fn validate(ctx: &Context) -> Result<i32> {
    let violations = validate_design(&ctx.design);
    if violations.is_empty() {
        ctx.say("design valid");
        return Ok(0);
    }
    for v in &violations {
        eprintln!("{}: {}", v.field, v.message);
    }
    Ok(1)
}

#[derive(Serialize)]
struct StaticReport {
    cycle_time: f64,
    z_stop: f64,
    prediction: CyclePrediction<f64>,
    v_sat_approx: f64,
    v_sat_simplified: f64,
    required_cmax: f64,
    max_load_resistance: f64,
    voltage_ok: bool,
    power_ok: bool,
}

fn static_report(ctx: &Context) -> Result<i32> {
    let d = ctx.valid_design()?;
    let c = &d.circuit;
    let dt = conversion_cycle_time(&d.source)?;
    let p = predict_cycle(d)?;
    let r = StaticReport {
        cycle_time: dt,
        z_stop: d.z_stop(),
        prediction: p,
        v_sat_approx: v_sat_approx(
            p.c_max,
            p.c_min,
            c.storage_capacitance,
            c.load_resistance,
            c.input_voltage,
            dt,
        )?,
        v_sat_simplified: v_sat_simplified(p.c_max, c.load_resistance, c.input_voltage, dt)?,
        required_cmax: required_cmax(c.min_output_power, c.load_resistance, c.input_voltage, dt)?,
        max_load_resistance: max_load_resistance(c.max_output_voltage, c.min_output_power)?,
        voltage_ok: p.v_sat <= c.max_output_voltage,
        power_ok: p.p_out >= c.min_output_power,
    };
    ctx.say(format!("C_max  {:.6e} F", p.c_max));
    ctx.say(format!("C_min  {:.6e} F", p.c_min));
    ctx.say(format!("V_sat  {:.4} V", p.v_sat));
    ctx.say(format!("P_out  {:.4e} W", p.p_out));
    if p.flags.discharge_dominated {
        ctx.say("warning: discharge-dominated regime");
    }
    let path = match ctx.format {
        OutputFormat::Json => ctx.json("static", "static", &r)?,
        OutputFormat::Csv => write_key_values(
            &ctx.path("static"),
            &[
                ("cycle_time", r.cycle_time, "s"),
                ("z_stop", r.z_stop, "m"),
                ("c_max", p.c_max, "F"),
                ("c_min", p.c_min, "F"),
                ("v_sat", p.v_sat, "V"),
                ("p_out", p.p_out, "W"),
                ("ripple_fraction", p.ripple_fraction, "1"),
                ("v_sat_approx", r.v_sat_approx, "V"),
                ("v_sat_simplified", r.v_sat_simplified, "V"),
                ("required_cmax", r.required_cmax, "F"),
                ("max_load_resistance", r.max_load_resistance, "Ohm"),
                ("voltage_ok", f64::from(u8::from(r.voltage_ok)), "1"),
                ("power_ok", f64::from(u8::from(r.power_ok)), "1"),
                (
                    "discharge_dominated",
                    f64::from(u8::from(p.flags.discharge_dominated)),
                    "1",
                ),
            ],
        )?,
    };
    ctx.wrote(&[path]);
    Ok(0)
}

fn sweep_gap_cmd(ctx: &Context) -> Result<i32> {
    let d = ctx.valid_design()?;
    let s = &ctx.config.sweep;
    let table = sweep_gap(d, &s.gaps()?, &s.dielectric_thicknesses()?)?;
    let best = optimal_gap(&table, d.circuit.max_output_voltage);
    let path = match ctx.format {
        OutputFormat::Csv => write_sweep_csv(&ctx.path("sweep_gap"), &table)?,
        OutputFormat::Json => ctx.json(
            "sweep_gap",
            "sweep-gap",
            serde_json::json!({ "table": &table, "optimum": best.as_ref().ok() }),
        )?,
    };
    ctx.wrote(&[path]);
    match best {
        Ok(b) => {
            ctx.say(format!(
                "optimum d = {:.4e} m, t_d = {:.4e} m, N = {}, V_sat = {:.4} V, P_out = {:.4e} W",
                b.x, b.y, b.finger_count, b.v_sat, b.p_out
            ));
            Ok(0)
        }
        Err(e) => Err(e),
    }
}

fn sweep_load_cmd(ctx: &Context) -> Result<i32> {
    let d = ctx.valid_design()?;
    let s = &ctx.config.sweep;
    let table = sweep_load_storage(d, &s.loads()?, &s.storages()?)?;
    let best = optimal_cell(&table, d.circuit.max_output_voltage);
    let path = match ctx.format {
        OutputFormat::Csv => write_sweep_csv(&ctx.path("sweep_load"), &table)?,
        OutputFormat::Json => ctx.json(
            "sweep_load",
            "sweep-load",
            serde_json::json!({ "table": &table, "optimum": best.as_ref().ok() }),
        )?,
    };
    ctx.wrote(&[path]);
    let b = best?;
    ctx.say(format!(
        "optimum R_L = {:.4e} Ohm, C_stor = {:.4e} F, V_sat = {:.4} V, P_out = {:.4e} W",
        b.x, b.y, b.v_sat, b.p_out
    ));
    Ok(0)
}

#[derive(Serialize)]
struct SimSummary {
    steady: Option<SteadyState<f64>>,
    steady_error: Option<String>,
    /// Closed-form voltage at the capacitances the run actually reached.
    v_sat_predicted: Option<f64>,
}

fn simulate_cmd(ctx: &Context, args: &SimArgs) -> Result<i32> {
    let d = ctx.valid_design()?;
    let mut sim = ctx.config.simulation.clone();
    if let Some(n) = args.steps_per_period {
        sim.steps_per_period = Some(n);
    }
    let duration = args
        .duration
        .as_deref()
        .map(|t| parse_quantity(t, Dimension::Time))
        .transpose()?;
    let options = sim.options(&d.source, duration)?;
    let trace = simulate(d, &d.source, &options)?;
    let steady = steady_state_voltage(&trace);
    let predicted = match &steady {
        Ok(s) => {
            let c = &d.circuit;
            let dt = conversion_cycle_time(&d.source)?;
            v_sat_exact(
                s.c_max,
                s.c_min,
                c.storage_capacitance,
                c.load_resistance,
                c.input_voltage,
                dt,
            )
            .ok()
            .map(|v| v.voltage)
        }
        Err(_) => None,
    };
    let summary = SimSummary {
        steady: steady.as_ref().ok().copied(),
        steady_error: steady.as_ref().err().map(|e| e.to_string()),
        v_sat_predicted: predicted,
    };
    let paths = match ctx.format {
        OutputFormat::Csv => {
            let comb = CombModel::new(d);
            let mut p = write_trace_csv(&ctx.out, &trace, |z| comb.capacitance(z))?;
            p.push(ctx.json("simulate_summary", "simulate", &summary)?);
            p
        }
        OutputFormat::Json => vec![ctx.json(
            "trace",
            "simulate",
            serde_json::json!({ "summary": &summary, "trace": &trace }),
        )?],
    };
    ctx.wrote(&paths);
    ctx.say(format!(
        "{} events, {} cycles, final v_stor = {:.4} V",
        trace.events.len(),
        trace.cycles.len(),
        trace.final_state.v_stor
    ));
    match steady {
        Ok(s) => {
            ctx.say(format!(
                "steady V_sat = {:.4} V (ripple {:.3e} V, C_max {:.4e} F, C_min {:.4e} F)",
                s.v_sat, s.ripple, s.c_max, s.c_min
            ));
            if let Some(v) = predicted {
                ctx.say(format!("closed form at reached capacitances: {v:.4} V"));
            }
            Ok(0)
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct ResponseSummary {
    natural_frequency: f64,
    f0: f64,
    bandwidth: f64,
    q: f64,
    peak_amplitude: f64,
}

fn freq_response_cmd(ctx: &Context) -> Result<i32> {
    let d = ctx.valid_design()?;
    let grid = match ctx.config.sweep.frequencies()? {
        Some(g) => g,
        None => resonance_grid(d, 2001)?,
    };
    let response = frequency_response(d, d.source.acceleration, &grid)?;
    let qe = response.quality;
    let summary = ResponseSummary {
        natural_frequency: natural_frequency(
            d.mechanics.spring_constant,
            d.mechanics.shuttle_mass,
        )?,
        f0: qe.f0,
        bandwidth: qe.bandwidth,
        q: qe.q,
        peak_amplitude: qe.peak_amplitude,
    };
    let mut paths = Vec::new();
    if ctx.format == OutputFormat::Csv {
        paths.push(write_response_csv(&ctx.path("freq_response"), &response)?);
        paths.push(ctx.json("freq_response", "freq-response", &summary)?);
    } else {
        paths.push(ctx.json(
            "freq_response",
            "freq-response",
            serde_json::json!({ "summary": &summary, "points": &response.points }),
        )?);
    }
    ctx.wrote(&paths);
    ctx.say(format!(
        "f0 = {:.4} Hz, bandwidth = {:.4} Hz, Q = {:.4}",
        qe.f0, qe.bandwidth, qe.q
    ));
    Ok(0)
}

fn size_mass_cmd(ctx: &mut Context, args: &SizeArgs) -> Result<i32> {
    if let Some(g) = &args.grid {
        let range = match parse_grid(g) {
            Ok(entries) if entries.len() == 1 && entries[0].0 == "mass" => entries[0].1.clone(),
            _ => RangeSpec::parse_cli(g)?,
        };
        ctx.config.sizing.mass = Some(range);
    }
    if let Some(t) = &args.target {
        ctx.config.sizing.target_displacement = Some(t.clone());
    }
    if let Some(t) = &args.duration {
        ctx.config.sizing.duration = Some(t.clone());
    }
    let d = ctx.valid_design()?;
    let sizing = &ctx.config.sizing;
    let masses = sizing.masses()?;
    let target = sizing.target(d)?;
    let options = ctx
        .config
        .simulation
        .options(&d.source, Some(sizing.duration()?))?;
    let result = size_attached_mass(d, &d.source, target, &masses, &options)?;
    let path = match ctx.format {
        OutputFormat::Csv => write_sizing_csv(&ctx.path("mass_sizing"), &result)?,
        OutputFormat::Json => ctx.json("mass_sizing", "size-mass", &result)?,
    };
    ctx.wrote(&[path]);
    ctx.say(format!(
        "mass = {:.4e} kg, spring constant = {:.4e} N/m (target {:.4e} m)",
        result.mass, result.spring_constant, result.target
    ));
    Ok(0)
}

fn parasitics_cmd(ctx: &Context) -> Result<i32> {
    let d = ctx.valid_design()?;
    let profile = capacitance_profile(d)?;
    let model = ctx.config.parasitics.model(profile.c_min)?;
    let clean = predict_cycle(d)?;
    let degraded = degraded_output(d, &model)?;
    let path = match ctx.format {
        OutputFormat::Json => ctx.json(
            "parasitics",
            "parasitics",
            serde_json::json!({ "model": model, "clean": clean, "degraded": degraded }),
        )?,
        OutputFormat::Csv => write_key_values(
            &ctx.path("parasitics"),
            &[
                ("c_par", model.c_par, "F"),
                ("r_par", model.r_par, "Ohm"),
                ("v_sat_clean", clean.v_sat, "V"),
                ("p_out_clean", clean.p_out, "W"),
                ("v_sat_degraded", degraded.v_sat, "V"),
                ("p_out_degraded", degraded.p_out, "W"),
                (
                    "discharge_dominated",
                    f64::from(u8::from(degraded.flags.discharge_dominated)),
                    "1",
                ),
            ],
        )?,
    };
    ctx.wrote(&[path]);
    ctx.say(format!(
        "V_sat {:.4} V -> {:.4e} V, P_out {:.4e} W -> {:.4e} W",
        clean.v_sat, degraded.v_sat, clean.p_out, degraded.p_out
    ));
    if degraded.flags.discharge_dominated {
        ctx.say("warning: discharge-dominated regime");
    }
    Ok(0)
}
