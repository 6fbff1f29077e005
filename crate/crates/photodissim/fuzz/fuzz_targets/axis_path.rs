#![no_main]

use libfuzzer_sys::fuzz_target;
use photodissim::config::parse_config;
use photodissim::run::apply_axis;

const BASE: &str = "[hamiltonian]\nomega0 = 1.0\nnu = 1.0\n";

// Sweep-axis application must never panic, for any path and value.
fuzz_target!(|input: (&str, f64)| {
    let (axis, value) = input;
    let mut cfg = parse_config(BASE, true).expect("static base config");
    let _ = apply_axis(&mut cfg, axis, value);
});
