use std::fs;
use std::path::Path;

use eharvest::spectrum::ingest_spectrum;

#[test]
fn example_spectrum_peaks_at_120_hz() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/spectrum_example.csv");
    let s = ingest_spectrum(&path).unwrap();
    assert_eq!(s.frequency, 120.0);
    assert_eq!(s.acceleration, 2.25);
    assert_eq!(s.spectrum.len(), 4);
}

#[test]
fn rejects_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("empty.csv", ""),
        ("header.csv", "freq,accel\n120,2.25\n"),
        ("text.csv", "frequency_hz,accel_ms2\n120,fast\n"),
        ("negative.csv", "frequency_hz,accel_ms2\n120,-1\n"),
        ("order.csv", "frequency_hz,accel_ms2\n120,1\n60,2\n"),
        ("rows.csv", "frequency_hz,accel_ms2\n"),
    ];
    for (name, body) in cases {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        assert!(ingest_spectrum(&p).is_err(), "{name}");
    }
    assert!(ingest_spectrum(&dir.path().join("missing.csv")).is_err());
}

#[test]
fn ties_keep_the_lower_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("tie.csv");
    fs::write(&p, "frequency_hz,accel_ms2\n50,1.5\n100,3\n150,3\n").unwrap();
    let s = ingest_spectrum(&p).unwrap();
    assert_eq!((s.frequency, s.acceleration), (100.0, 3.0));
}
