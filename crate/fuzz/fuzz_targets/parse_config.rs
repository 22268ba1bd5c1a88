#![no_main]

use ahnls_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = RunConfig::parse_with_seed(text, Some(0)) {
            let _ = config.grid.points();
            let _ = config.potential.build();
        }
    }
});
