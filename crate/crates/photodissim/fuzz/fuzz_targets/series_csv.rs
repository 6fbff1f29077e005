#![no_main]

use libfuzzer_sys::fuzz_target;
use photodissim::analysis::IntensitySeries;

// The series reader must never panic; anything it accepts satisfies the
// series invariants and survives a write/read cycle.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(series) = IntensitySeries::from_csv(text) {
            assert!(series.values().iter().all(|v| (0.0..=1.0).contains(v)));
            let again = IntensitySeries::from_csv(&series.to_csv()).expect("roundtrip");
            assert_eq!(series.len(), again.len());
        }
    }
});
