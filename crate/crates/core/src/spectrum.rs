//! Measured vibration spectra: CSV with header `frequency_hz,accel_ms2`.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::VibrationSource;

pub const SPECTRUM_HEADER: [&str; 2] = ["frequency_hz", "accel_ms2"];

/// Reads a spectrum file and drives at its dominant peak.
pub fn ingest_spectrum(path: &Path) -> Result<VibrationSource<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_spectrum(file).map_err(|e| match e {
        Error::Spectrum { message, .. } => Error::Spectrum {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn parse_spectrum(reader: impl Read) -> Result<VibrationSource<f64>> {
    let fail = |message: String| Error::Spectrum {
        path: "<input>".into(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| fail(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect::<Vec<_>>();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(fail("empty file".into()));
    }
    if header != SPECTRUM_HEADER {
        return Err(fail(format!(
            "expected header {}, found {}",
            SPECTRUM_HEADER.join(","),
            header.join(",")
        )));
    }
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| fail(format!("line {line}: {e}")))?;
        if record.len() != 2 {
            return Err(fail(format!("line {line}: expected 2 fields")));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| fail(format!("line {line}: not a number: {s:?}")))
        };
        let f = parse(&record[0])?;
        let a = parse(&record[1])?;
        if !(f > 0.0 && f.is_finite()) || !(a >= 0.0 && a.is_finite()) {
            return Err(fail(format!(
                "line {line}: need frequency > 0 and accel >= 0"
            )));
        }
        if let Some(&(prev, _)) = points.last() {
            if !(f > prev) {
                return Err(fail(format!(
                    "line {line}: frequency column not strictly increasing"
                )));
            }
        }
        points.push((f, a));
    }
    let &(f, a) = points
        .iter()
        .fold(None, |best: Option<&(f64, f64)>, p| match best {
            Some(b) if b.1 >= p.1 => Some(b),
            _ => Some(p),
        })
        .ok_or_else(|| fail("no data rows".into()))?;
    Ok(VibrationSource {
        acceleration: a,
        frequency: f,
        spectrum: points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_peak() {
        let s = parse_spectrum("frequency_hz,accel_ms2\n120,2.25\n".as_bytes()).unwrap();
        assert_eq!((s.acceleration, s.frequency), (2.25, 120.0));
        assert_eq!(s.spectrum.len(), 1);
    }

    #[test]
    fn picks_dominant_peak() {
        let s = parse_spectrum("frequency_hz,accel_ms2\n60,1.0\n120,2.25\n240,0.5\n".as_bytes())
            .unwrap();
        assert_eq!(s.frequency, 120.0);
        assert_eq!(s.spectrum.len(), 3);
    }

    #[test]
    fn errors() {
        assert!(parse_spectrum("".as_bytes()).is_err());
        assert!(parse_spectrum("frequency_hz,accel_ms2\n".as_bytes()).is_err());
        assert!(parse_spectrum("freq,accel\n1,2\n".as_bytes()).is_err());
        assert!(parse_spectrum("frequency_hz,accel_ms2\n1,x\n".as_bytes()).is_err());
        assert!(parse_spectrum("frequency_hz,accel_ms2\n1,2,3\n".as_bytes()).is_err());
        assert!(parse_spectrum("frequency_hz,accel_ms2\n120,1\n60,2\n".as_bytes()).is_err());
        assert!(parse_spectrum("frequency_hz,accel_ms2\n-1,1\n".as_bytes()).is_err());
    }
}
