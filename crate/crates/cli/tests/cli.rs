//! End-to-end runs of the `conjugate` binary: exit codes, outputs and
//! reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conjugate_cli::config::ExperimentConfig;

fn conjugate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conjugate")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write_config(dir: &Path, src: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, src).unwrap();
    path
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

/// Content hashes of every output listed in a run record.
fn output_hashes(record: &Path) -> Vec<String> {
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(record).unwrap()).unwrap();
    json["outputs"].as_array().unwrap().iter().map(|o| o["content_sha256"].as_str().unwrap().to_string()).collect()
}

const PARABOLA_COUNT: &str = r#"
[run]
seed = 3
q = [4, 8, 16]

[manifold]
variables = ["x"]
components = ["x^2 + 2"]
lo = ["0"]
hi = ["1"]

[profile]
n = 2

[count]
gamma = "1/2"
c = ["1", "4"]
retain = 3
"#;

const SMALL_TAILOR: &str = r#"
[run]
seed = 7
q = [1000]

[manifold]
variables = ["x"]
components = ["x^2 + 2"]
lo = ["1/10"]
hi = ["9/10"]

[profile]
n = 3
psi = ["1, -1", "1, -1"]
phi = ["1, 1", "1, 1"]

[tailor]
delta0 = "1/4"
delta_min = "1"
delta_max = "1"
c_f = "1"
samples = 6
denominator = 1000003
"#;

const SMALL_MEASURE: &str = r#"
[run]
seed = 11
q = [100]

[manifold]
variables = ["x"]
components = ["x^2 + 2"]
lo = ["0"]
hi = ["1"]

[profile]
n = 3

[measure]
family = "original_case"
eps = ["1/2", "1/4", "1/8"]
samples = 400
"#;

#[test]
fn schur_prints_the_polynomial_and_its_value() {
    let o = conjugate(&["schur", "--lambda", "2,1", "--tau", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "T0^2*T1 + T0*T1^2");

    // too many parts for the number of variables
    let o = conjugate(&["schur", "--lambda", "2,1", "--tau", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0");

    // 1^2·2 + 1·2^2
    let o = conjugate(&["schur", "--lambda", "2,1", "--tau", "2", "--point", "1,2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn malformed_input_exits_with_validation_code() {
    assert_eq!(conjugate(&["schur", "--lambda", "1,2x", "--tau", "2"]).status.code(), Some(2));
    assert_eq!(conjugate(&["symord"]).status.code(), Some(2));
    assert_eq!(conjugate(&["count", "--config", "/nonexistent/config.toml"]).status.code(), Some(2));
    assert_eq!(conjugate(&["--jobs", "0", "schur", "--lambda", "1", "--tau", "1"]).status.code(), Some(2));
}

#[test]
fn symord_values_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = conjugate(&["symord", "--veronese", "2", "--out", out]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("4"));
    assert!(dir.path().join("symord_certificate.txt").exists());

    let o = conjugate(&["symord", "--map", "x, y", "--vars", "x, y", "--out", out]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("infinite"));

    let o = conjugate(&["symord", "--veronese", "5", "--budget-ms", "300", "--out", out]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn empty_q_schedule_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &PARABOLA_COUNT.replace("q = [4, 8, 16]", "q = []"));
    let o = conjugate(&["count", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &PARABOLA_COUNT.replace("retain = 3", "retain = 3\nbogus = 1"));
    let o = conjugate(&["count", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_round_trips_and_hash_is_stable() {
    for name in
        ["count_exponent.toml", "count_sweep.toml", "tailor.toml", "measure.toml", "scaling.toml", "goodness.toml"]
    {
        let cfg = ExperimentConfig::load(&config_path(name)).unwrap();
        let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again, "{name}");
        assert_eq!(cfg.hash().unwrap(), again.hash().unwrap(), "{name}");
    }
    // presentation changes leave the hash alone, semantic changes do not
    let base = ExperimentConfig::from_toml(PARABOLA_COUNT).unwrap();
    let renamed =
        ExperimentConfig::from_toml(&PARABOLA_COUNT.replace("[\"x\"]", "[\"t\"]").replace("x^2 + 2", "2 + t^2"))
            .unwrap();
    let rescaled = ExperimentConfig::from_toml(&PARABOLA_COUNT.replace("\"1/2\"", "\"2/4\"")).unwrap();
    let changed = ExperimentConfig::from_toml(&PARABOLA_COUNT.replace("\"1/2\"", "\"1/3\"")).unwrap();
    assert_eq!(base.hash().unwrap(), renamed.hash().unwrap());
    assert_eq!(base.hash().unwrap(), rescaled.hash().unwrap());
    assert_ne!(base.hash().unwrap(), changed.hash().unwrap());
}

#[test]
fn count_matches_known_value_and_replays_a_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config_path("count_exponent.toml");
    let o = conjugate(&["count", "--config", cfg.to_str().unwrap(), "--q", "16", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("count.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][..5], ["16", "1/2", "4", "229", "0"]);

    let full = tempfile::tempdir().unwrap();
    let sweep = write_config(full.path(), PARABOLA_COUNT);
    let o = conjugate(&["count", "--config", sweep.to_str().unwrap(), "--out", full.path().to_str().unwrap()]);
    assert!(o.status.success());
    let all = csv_rows(&full.path().join("count.csv"));
    assert_eq!(all.len(), 6);
    let row = &all[3];
    let single = tempfile::tempdir().unwrap();
    let o = conjugate(&[
        "count",
        "--config",
        sweep.to_str().unwrap(),
        "--q",
        &row[0],
        "--c",
        &row[2],
        "--out",
        single.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let replay = csv_rows(&single.path().join("count.csv"));
    assert_eq!(replay[0][..5], row[..5]);
}

#[test]
fn identical_seed_gives_identical_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = write_config(a.path(), SMALL_MEASURE);
    for dir in [&a, &b] {
        let o = conjugate(&["measure", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ha = output_hashes(&a.path().join("measure.run.json"));
    assert_eq!(ha, output_hashes(&b.path().join("measure.run.json")));

    let c = tempfile::tempdir().unwrap();
    let o =
        conjugate(&["measure", "--config", cfg.to_str().unwrap(), "--seed", "12", "--out", c.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_ne!(ha, output_hashes(&c.path().join("measure.run.json")));
}

#[test]
fn measure_fraction_shrinks_with_eps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_MEASURE);
    let o = conjugate(&["measure", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let rows = csv_rows(&dir.path().join("measure.csv"));
    assert_eq!(rows.len(), 3);
    let fractions: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(fractions.windows(2).all(|w| w[1] <= w[0]), "{fractions:?}");
}

#[test]
fn tailor_output_is_independent_of_jobs() {
    let mut hashes = Vec::new();
    for jobs in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), SMALL_TAILOR);
        let o = conjugate(&[
            "--jobs",
            jobs,
            "tailor",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let rows = csv_rows(&dir.path().join("tailor.csv"));
        assert_eq!(rows.len(), 6);
        hashes.push(output_hashes(&dir.path().join("tailor.run.json")));
    }
    assert_eq!(hashes[0], hashes[1]);
}
