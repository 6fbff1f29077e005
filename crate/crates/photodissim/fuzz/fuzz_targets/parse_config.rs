#![no_main]

use libfuzzer_sys::fuzz_target;

// The scenario parser must never panic on arbitrary documents,
// whichever way the complete-positivity override is set.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = photodissim::config::parse_config(text, false);
        let _ = photodissim::config::parse_config(text, true);
    }
});
