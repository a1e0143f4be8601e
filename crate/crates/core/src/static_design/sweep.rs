use rayon::prelude::*;
use serde::Serialize;

use super::predict_from_capacitances;
use super::{finger_count_for_layout, CyclePrediction};
use crate::capacitance::capacitance_profile;
use crate::error::{Error, Result};
use crate::model::{conversion_cycle_time, DeviceDesign};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Initial gap × dielectric thickness.
    Gap,
    /// Load resistance × storage capacitance.
    LoadStorage,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAxis<T> {
    pub name: &'static str,
    pub unit: &'static str,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell<T> {
    pub i: usize,
    pub j: usize,
    pub x: T,
    pub y: T,
    pub finger_count: u32,
    pub c_max: T,
    pub c_min: T,
    pub v_sat: T,
    pub p_out: T,
    pub voltage_ok: bool,
    pub power_ok: bool,
    pub discharge_dominated: bool,
    /// Set when the cell could not be evaluated; numeric fields are NaN.
    pub error: Option<String>,
}

impl<T: Real> SweepCell<T> {
    fn failed(i: usize, j: usize, x: T, y: T, finger_count: u32, err: Error) -> Self {
        SweepCell {
            i,
            j,
            x,
            y,
            finger_count,
            c_max: T::nan(),
            c_min: T::nan(),
            v_sat: T::nan(),
            p_out: T::nan(),
            voltage_ok: false,
            power_ok: false,
            discharge_dominated: false,
            error: Some(err.to_string()),
        }
    }

    fn from_prediction(
        (i, j, x, y): (usize, usize, T, T),
        finger_count: u32,
        p: &CyclePrediction<T>,
        design: &DeviceDesign<T>,
    ) -> Self {
        SweepCell {
            i,
            j,
            x,
            y,
            finger_count,
            c_max: p.c_max,
            c_min: p.c_min,
            v_sat: p.v_sat,
            p_out: p.p_out,
            voltage_ok: p.v_sat <= design.circuit.max_output_voltage,
            power_ok: p.p_out >= design.circuit.min_output_power,
            discharge_dominated: p.flags.discharge_dominated,
            error: None,
        }
    }

    pub fn is_feasible(&self, v_max: T) -> bool {
        self.error.is_none() && self.v_sat <= v_max
    }
}

/// Full grid of evaluated design points, row-major over `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable<T> {
    pub kind: SweepKind,
    pub x_axis: SweepAxis<T>,
    pub y_axis: SweepAxis<T>,
    pub cells: Vec<SweepCell<T>>,
}

impl<T: Real> SweepTable<T> {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell<T> {
        &self.cells[i * self.y_axis.values.len() + j]
    }

    /// Cells with a fixed `y` index, in `x` order.
    pub fn column(&self, j: usize) -> impl Iterator<Item = &SweepCell<T>> {
        self.cells.iter().filter(move |c| c.j == j)
    }
}

fn grid<T: Real>(xs: &[T], ys: &[T]) -> Vec<(usize, usize, T, T)> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            out.push((i, j, x, y));
        }
    }
    out
}

fn check_axes<T>(a: &[T], b: &[T]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        Err(Error::invalid("sweep ranges must be non-empty"))
    } else {
        Ok(())
    }
}

fn gap_cell<T: Real>(design: &DeviceDesign<T>, point: (usize, usize, T, T)) -> SweepCell<T> {
    let (i, j, gap, td) = point;
    let g = &design.geometry;
    let n = match finger_count_for_layout(gap, g.finger_width, g.usable_edge_length) {
        Ok(n) => n,
        Err(e) => return SweepCell::failed(i, j, gap, td, 0, e),
    };
    let candidate = design.with_gap(gap, td, n);
    let eval = || -> Result<CyclePrediction<T>> {
        candidate.validate()?;
        let profile = capacitance_profile(&candidate)?;
        let dt = conversion_cycle_time(&candidate.source)?;
        let c = &candidate.circuit;
        predict_from_capacitances(
            profile.c_max,
            profile.c_min,
            c.storage_capacitance,
            c.load_resistance,
            c.input_voltage,
            dt,
        )
    };
    match eval() {
        Ok(p) => SweepCell::from_prediction(point, n, &p, &candidate),
        Err(e) => SweepCell::failed(i, j, gap, td, n, e),
    }
}

/// Sweeps initial gap against dielectric thickness. The finger count is
/// recomputed from the layout budget for every gap. Failing cells are
/// flagged, never fatal.
pub fn sweep_gap<T: Real>(
    design: &DeviceDesign<T>,
    gaps: &[T],
    dielectric_thicknesses: &[T],
) -> Result<SweepTable<T>> {
    check_axes(gaps, dielectric_thicknesses)?;
    let cells = grid(gaps, dielectric_thicknesses)
        .into_par_iter()
        .map(|p| gap_cell(design, p))
        .collect();
    Ok(SweepTable {
        kind: SweepKind::Gap,
        x_axis: SweepAxis {
            name: "initial_gap",
            unit: "m",
            values: gaps.to_vec(),
        },
        y_axis: SweepAxis {
            name: "dielectric_thickness",
            unit: "m",
            values: dielectric_thicknesses.to_vec(),
        },
        cells,
    })
}

/// Sweeps load resistance against storage capacitance at the design's fixed
/// capacitance profile.
pub fn sweep_load_storage<T: Real>(
    design: &DeviceDesign<T>,
    loads: &[T],
    storages: &[T],
) -> Result<SweepTable<T>> {
    check_axes(loads, storages)?;
    design.validate()?;
    let profile = capacitance_profile(design)?;
    let dt = conversion_cycle_time(&design.source)?;
    let n = design.geometry.finger_count;
    let cells = grid(loads, storages)
        .into_par_iter()
        .map(|point| {
            let (i, j, r_l, c_stor) = point;
            let mut candidate = design.clone();
            candidate.circuit.load_resistance = r_l;
            candidate.circuit.storage_capacitance = c_stor;
            match predict_from_capacitances(
                profile.c_max,
                profile.c_min,
                c_stor,
                r_l,
                design.circuit.input_voltage,
                dt,
            ) {
                Ok(p) => SweepCell::from_prediction(point, n, &p, &candidate),
                Err(e) => SweepCell::failed(i, j, r_l, c_stor, n, e),
            }
        })
        .collect();
    Ok(SweepTable {
        kind: SweepKind::LoadStorage,
        x_axis: SweepAxis {
            name: "load_resistance",
            unit: "ohm",
            values: loads.to_vec(),
        },
        y_axis: SweepAxis {
            name: "storage_capacitance",
            unit: "F",
            values: storages.to_vec(),
        },
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum<T> {
    pub i: usize,
    pub j: usize,
    pub x: T,
    pub y: T,
    pub finger_count: u32,
    pub v_sat: T,
    pub p_out: T,
}

/// Feasible cell (`v_sat <= v_max`) with the largest output power. Ties go
/// to the larger `x`.
pub fn optimal_cell<T: Real>(table: &SweepTable<T>, v_max: T) -> Result<Optimum<T>> {
    if table.cells.is_empty() {
        return Err(Error::invalid("sweep table is empty"));
    }
    table
        .cells
        .iter()
        .filter(|c| c.is_feasible(v_max) && !c.p_out.is_nan())
        .max_by(|a, b| {
            a.p_out
                .partial_cmp(&b.p_out)
                .unwrap()
                .then(a.x.partial_cmp(&b.x).unwrap())
        })
        .map(|c| Optimum {
            i: c.i,
            j: c.j,
            x: c.x,
            y: c.y,
            finger_count: c.finger_count,
            v_sat: c.v_sat,
            p_out: c.p_out,
        })
        .ok_or(Error::NoFeasibleCell)
}

/// Best feasible `(d, t_d)` of a gap sweep.
pub fn optimal_gap<T: Real>(table: &SweepTable<T>, v_max: T) -> Result<Optimum<T>> {
    if table.kind != SweepKind::Gap {
        return Err(Error::invalid("optimal_gap needs a gap sweep table"));
    }
    optimal_cell(table, v_max)
}
