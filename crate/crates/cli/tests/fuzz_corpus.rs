//! Replays the checked-in fuzz corpus through the same entry points as the fuzz targets.

use std::path::PathBuf;

use ahnls::dirac::Field;
use ahnls_cli::config::tabulated_from_rows;
use ahnls_cli::RunConfig;

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .expect("corpus directory")
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn config_seeds_parse() {
    let seeds = corpus("parse_config");
    assert!(!seeds.is_empty());
    for (name, data) in seeds {
        let config = RunConfig::parse_with_seed(std::str::from_utf8(&data).unwrap(), Some(0))
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!config.grid.points().is_empty());
    }
}

#[test]
fn tabulated_seeds_do_not_panic() {
    let mut accepted = 0;
    for (_, data) in corpus("tabulated_rows") {
        let rows: Vec<[f64; 3]> = data
            .chunks_exact(24)
            .map(|c| {
                let f = |i: usize| f64::from_le_bytes(c[8 * i..8 * i + 8].try_into().unwrap());
                [f(0), f(1), f(2)]
            })
            .collect();
        if let Ok(p) = tabulated_from_rows(&rows) {
            accepted += 1;
            for [x, _, _] in &rows {
                assert!(p.value(*x).is_finite());
            }
        }
    }
    assert!(accepted >= 2);
}
