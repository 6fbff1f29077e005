#![no_main]

use libfuzzer_sys::fuzz_target;
use photodissim::config::InitialState;

// Any accepted initial-state expression must produce a physical state.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(state) = InitialState::parse(text) {
            let v = state.state_vector();
            assert!(v.trace_deviation() < 1e-9);
            assert!(v.hermiticity_deviation() < 1e-9);
            assert!(v.min_eigenvalue() > -1e-9);
        }
    }
});
