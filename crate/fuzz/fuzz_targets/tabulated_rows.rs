#![no_main]

use ahnls::dirac::Field;
use ahnls_cli::config::tabulated_from_rows;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let rows: Vec<[f64; 3]> = data
        .chunks_exact(24)
        .map(|c| {
            let f = |i: usize| f64::from_le_bytes(c[8 * i..8 * i + 8].try_into().unwrap());
            [f(0), f(1), f(2)]
        })
        .collect();
    if let Ok(p) = tabulated_from_rows(&rows) {
        for [x, _, _] in &rows {
            let _ = p.value(*x);
            let _ = p.derivative(*x + 0.5);
        }
    }
});
