use std::path::Path;
use std::process::Command;

fn ahnls(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ahnls")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const BUMP: &str = r#"
suites = ["lemma42", "reality"]
[potential]
kind = "compact-bump"
amplitude = [1.0, 0.0]
center = 0.0
radius = 2.0
"#;

#[test]
fn unknown_suite_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &BUMP.replace("\"reality\"", "\"foo\""));
    let out = ahnls(&["verify", "--config", &cfg, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("foo"));
}

#[test]
fn missing_seed_and_missing_file_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", BUMP);
    assert_eq!(ahnls(&["verify", "--config", &cfg]).status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    assert_eq!(ahnls(&["verify", "--config", missing.to_str().unwrap(), "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", BUMP);
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let out = ahnls(&["verify", "--config", &cfg, "--seed", "9", "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let mut files: Vec<_> = std::fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        runs.push(files);
    }
    assert_eq!(runs[0].len(), 5);
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn seeds_change_the_sampled_cases() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", BUMP);
    let read = |seed: &str| {
        let out_dir = dir.path().join(seed);
        ahnls(&["verify", "--config", &cfg, "--seed", seed, "--out", out_dir.to_str().unwrap(), "--format", "csv"]);
        std::fs::read_to_string(out_dir.join("lemma42.csv")).unwrap()
    };
    assert_ne!(read("1"), read("2"));
}

#[test]
fn scan_reports_the_constant_potential_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "scan.toml",
        "seed = 3\n[potential]\nkind = \"constant\"\nvalue = [1.0, 0.0]\n[grid]\nre = [0.0, 0.0]\nim = [2.0, 2.0]\ncounts = [1, 1]\n",
    );
    let out_dir = dir.path().join("scan");
    let out = ahnls(&["scan", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(out_dir.join("scan.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let row = rdr.records().next().unwrap().unwrap();
    // stored as 1/X on the Plus sheet
    assert_eq!((&row[3], &row[7]), ("+", "1"));
    let w: f64 = row[5].parse().unwrap();
    assert!((1.0 / w - (-1.0 - 2f64.sqrt())).abs() < 1e-8);
}
