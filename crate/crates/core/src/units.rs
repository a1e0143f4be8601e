//! Unit-suffixed quantities such as `"35 um"`, `"500 A"` or `"8 MOhm"`.
//!
//! Values are converted to SI base units at parse time by shifting the
//! decimal exponent, so `"0.1 um"` parses to the same `f64` as `0.1e-6`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Area,
    Mass,
    Capacitance,
    Resistance,
    Voltage,
    Power,
    Stiffness,
    Acceleration,
    Frequency,
    Time,
}

impl Dimension {
    /// Unit written when serializing, always SI.
    pub fn si_unit(self) -> &'static str {
        match self {
            Dimension::Length => "m",
            Dimension::Area => "m2",
            Dimension::Mass => "kg",
            Dimension::Capacitance => "F",
            Dimension::Resistance => "Ohm",
            Dimension::Voltage => "V",
            Dimension::Power => "W",
            Dimension::Stiffness => "N/m",
            Dimension::Acceleration => "m/s2",
            Dimension::Frequency => "Hz",
            Dimension::Time => "s",
        }
    }

    /// `(symbol, decimal exponent of the base unit, prefix power)`.
    /// A prefix power of 0 means the symbol takes no prefix.
    fn base_units(self) -> &'static [(&'static str, i32, i32)] {
        match self {
            Dimension::Length => &[("m", 0, 1), ("A", -10, 0), ("Å", -10, 0)],
            Dimension::Area => &[("m2", 0, 2), ("m^2", 0, 2)],
            Dimension::Mass => &[("g", -3, 1)],
            Dimension::Capacitance => &[("F", 0, 1)],
            Dimension::Resistance => &[("Ohm", 0, 1), ("ohm", 0, 1), ("Ω", 0, 1)],
            Dimension::Voltage => &[("V", 0, 1)],
            Dimension::Power => &[("W", 0, 1)],
            Dimension::Stiffness => &[("N/m", 0, 1)],
            Dimension::Acceleration => &[("m/s2", 0, 0), ("m/s^2", 0, 0)],
            Dimension::Frequency => &[("Hz", 0, 1)],
            Dimension::Time => &[("s", 0, 1)],
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Length => "length",
            Dimension::Area => "area",
            Dimension::Mass => "mass",
            Dimension::Capacitance => "capacitance",
            Dimension::Resistance => "resistance",
            Dimension::Voltage => "voltage",
            Dimension::Power => "power",
            Dimension::Stiffness => "stiffness",
            Dimension::Acceleration => "acceleration",
            Dimension::Frequency => "frequency",
            Dimension::Time => "time",
        };
        f.write_str(name)
    }
}

const PREFIXES: &[(&str, i32)] = &[
    ("G", 9),
    ("M", 6),
    ("k", 3),
    ("c", -2),
    ("m", -3),
    ("u", -6),
    ("µ", -6),
    ("μ", -6),
    ("n", -9),
    ("p", -12),
    ("f", -15),
];

/// Decimal exponent that converts a value in `unit` to SI.
fn unit_exponent(unit: &str, dim: Dimension) -> Option<i32> {
    let bases = dim.base_units();
    if let Some(&(_, e, _)) = bases.iter().find(|(sym, _, _)| *sym == unit) {
        return Some(e);
    }
    for &(sym, e, power) in bases {
        if power == 0 {
            continue;
        }
        if let Some(prefix) = unit.strip_suffix(sym) {
            if let Some(&(_, pe)) = PREFIXES.iter().find(|(p, _)| *p == prefix) {
                return Some(e + pe * power);
            }
        }
    }
    None
}

/// Applies the exponent in decimal, so the result is the correctly rounded
/// value of the written number.
fn scale(num: &str, exponent: i32) -> Option<f64> {
    let (mantissa, e) = match num.find(['e', 'E']) {
        Some(i) => (&num[..i], num[i + 1..].parse::<i32>().ok()?),
        None => (num, 0),
    };
    format!("{mantissa}e{}", e + exponent).parse().ok()
}

/// Parses `"<number> <unit>"` (space optional) into SI base units.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    let s = text.trim();
    let boundaries: Vec<usize> = s
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(s.len()))
        .collect();
    for &i in boundaries.iter().rev() {
        let (num, unit) = s.split_at(i);
        let Ok(value) = num.trim().parse::<f64>() else {
            continue;
        };
        let unit = unit.trim();
        if unit.is_empty() {
            return Err(Error::Config(format!(
                "quantity {text:?} needs a {dim} unit such as {:?}",
                dim.si_unit()
            )));
        }
        return match unit_exponent(unit, dim) {
            Some(e) if value.is_finite() => scale(num.trim(), e)
                .ok_or_else(|| Error::Config(format!("cannot parse quantity {text:?}"))),
            Some(_) => Err(Error::Config(format!("quantity {text:?} is not finite"))),
            None => Err(Error::Config(format!(
                "unknown {dim} unit {unit:?} in {text:?}"
            ))),
        };
    }
    Err(Error::Config(format!("cannot parse quantity {text:?}")))
}

/// Formats an SI value so that [`parse_quantity`] returns it bit for bit.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    format!("{value:e} {}", dim.si_unit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Dimension::*;

    #[test]
    fn parses_convenience_units() {
        assert_eq!(parse_quantity("35 um", Length).unwrap(), 35e-6);
        assert_eq!(parse_quantity("35um", Length).unwrap(), 35e-6);
        assert_eq!(parse_quantity("500 A", Length).unwrap(), 500e-10);
        assert_eq!(parse_quantity("500 Å", Length).unwrap(), 500e-10);
        assert_eq!(parse_quantity("10 mm", Length).unwrap(), 10e-3);
        assert_eq!(parse_quantity("1 cm2", Area).unwrap(), 1e-4);
        assert_eq!(parse_quantity("7.2 g", Mass).unwrap(), 7.2e-3);
        assert_eq!(parse_quantity("0.038 g", Mass).unwrap(), 0.038e-3);
        assert_eq!(parse_quantity("2 kg", Mass).unwrap(), 2.0);
        assert_eq!(parse_quantity("20 nF", Capacitance).unwrap(), 20e-9);
        assert_eq!(parse_quantity("8 MOhm", Resistance).unwrap(), 8e6);
        assert_eq!(parse_quantity("2.5 kΩ", Resistance).unwrap(), 2.5e3);
        assert_eq!(parse_quantity("3.3 V", Voltage).unwrap(), 3.3);
        assert_eq!(parse_quantity("200 uW", Power).unwrap(), 200e-6);
        assert_eq!(parse_quantity("4.3 kN/m", Stiffness).unwrap(), 4.3e3);
        assert_eq!(parse_quantity("2.25 m/s2", Acceleration).unwrap(), 2.25);
        assert_eq!(parse_quantity("120 Hz", Frequency).unwrap(), 120.0);
        assert_eq!(parse_quantity("5 s", Time).unwrap(), 5.0);
        assert_eq!(parse_quantity("1e-12 s", Time).unwrap(), 1e-12);
        assert_eq!(parse_quantity("0.1 um", Length).unwrap(), 0.1e-6);
        assert_eq!(parse_quantity("2.5E3 mm", Length).unwrap(), 2.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_quantity("35", Length).is_err());
        assert!(parse_quantity("35 nF", Length).is_err());
        assert!(parse_quantity("um", Length).is_err());
        assert!(parse_quantity("inf m", Length).is_err());
        assert!(parse_quantity("3 xm", Length).is_err());
        assert!(parse_quantity("3 km/s2", Acceleration).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn format_parse_round_trip(v in proptest::num::f64::NORMAL) {
                for dim in [Length, Area, Mass, Capacitance, Resistance, Voltage, Power, Stiffness, Acceleration, Frequency, Time] {
                    prop_assert_eq!(parse_quantity(&format_quantity(v, dim), dim).unwrap(), v);
                }
            }
        }
    }
}
