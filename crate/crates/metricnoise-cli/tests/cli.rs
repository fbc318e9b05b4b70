//! End-to-end tests of the `metricnoise` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use metricnoise::dgp::{generate, DgpFamily, DgpSpec};
use metricnoise::resampling::{run_test, ResamplingConfig};
use metricnoise::spectral::{SpectralConfig, StatisticKind};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metricnoise"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary ran")
}

fn json_file(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_then_test_matches_in_process_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let dgp = write(dir.path(), "dgp.json", r#"{"family":"univ_tar1","n":60,"burn_in":100}"#);
    let data = dir.path().join("data.csv");
    let out = run(bin().args(["simulate", "--config"]).arg(&dgp).args(["--seed", "42", "--out"]).arg(&data));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let config = write(
        dir.path(),
        "run.json",
        r#"{"object_kind":"vector","metric":"vector_euclidean","statistic":"cvm",
            "method":"wild_bootstrap","replicates":150,"seed":9}"#,
    );
    let result_path = dir.path().join("result.json");
    let out = run(bin()
        .args(["test", "--input"])
        .arg(&data)
        .args(["--config"])
        .arg(&config)
        .args(["--out"])
        .arg(&result_path));
    assert!(out.status.success());
    let file_result = json_file(&result_path);

    // same computation without touching the filesystem
    let spec = DgpSpec { family: DgpFamily::UnivTar1, n: 60, grid_points: None, burn_in: Some(100) };
    let series = generate(&spec, 42).unwrap();
    let in_process = run_test(
        &series,
        StatisticKind::Cvm,
        &SpectralConfig::default(),
        &ResamplingConfig { replicates: 150, seed: 9, ..ResamplingConfig::default() },
    )
    .unwrap();

    assert_eq!(
        file_result["statistic_value"].as_f64().unwrap().to_bits(),
        in_process.statistic.value.to_bits(),
        "CSV round trip must be lossless"
    );
    assert_eq!(file_result["p_value"].as_f64().unwrap(), in_process.p_value);
    assert_eq!(file_result["reject"].as_bool().unwrap(), in_process.reject);
    let adcv = file_result["adcv"].as_array().unwrap();
    assert_eq!(adcv.len(), 56);
    for (a, b) in adcv.iter().zip(&in_process.adcv) {
        assert_eq!(a.as_f64().unwrap().to_bits(), b.to_bits());
    }
}

#[test]
fn functional_simulate_round_trips_through_test() {
    let dir = tempfile::tempdir().unwrap();
    let dgp = write(dir.path(), "dgp.json", r#"{"family":"func_bb","n":30,"grid_points":50}"#);
    let data = dir.path().join("curves.csv");
    let out = run(bin().args(["simulate", "--config"]).arg(&dgp).args(["--seed", "5", "--out"]).arg(&data));
    assert!(out.status.success());

    // bridge curves end at zero, hence a trailing 0 on every data row
    let text = fs::read_to_string(&data).unwrap();
    for row in text.lines().skip(1) {
        assert_eq!(row.rsplit(',').next().unwrap(), "0");
    }

    let config = write(
        dir.path(),
        "run.json",
        r#"{"object_kind":"curve","metric":"curve_l2","statistic":"ks","replicates":99,"seed":3}"#,
    );
    let result_path = dir.path().join("result.json");
    let out = run(bin()
        .args(["test", "--input"])
        .arg(&data)
        .args(["--config"])
        .arg(&config)
        .args(["--out"])
        .arg(&result_path)
        .args(["--dump-process"])
        .arg(dir.path().join("process.csv")));
    assert!(out.status.success());
    let result = json_file(&result_path);
    assert_eq!(result["adcv"].as_array().unwrap().len(), 26);
    let process = fs::read_to_string(dir.path().join("process.csv")).unwrap();
    assert!(process.starts_with("zeta,s_n\n"));
    assert_eq!(process.lines().count(), 1 + 513);
}

#[test]
fn degenerate_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "const.csv", &"1.5\n".repeat(12));
    let config = write(
        dir.path(),
        "run.json",
        r#"{"object_kind":"vector","metric":"vector_euclidean","replicates":50}"#,
    );
    let result_path = dir.path().join("result.json");
    let out = run(bin()
        .args(["test", "--input"])
        .arg(&data)
        .args(["--config"])
        .arg(&config)
        .args(["--out"])
        .arg(&result_path));
    assert_eq!(out.status.code(), Some(2));
    let result = json_file(&result_path);
    assert_eq!(result["p_value"].as_f64().unwrap(), 1.0);
    assert!(result["flags"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f.as_str() == Some("degenerate_sample")));
}

#[test]
fn invalid_alpha_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "data.csv", &"1.0\n2.0\n".repeat(6));
    let config = write(
        dir.path(),
        "bad.json",
        r#"{"object_kind":"vector","metric":"vector_euclidean","alpha":1.5}"#,
    );
    let out = run(bin().args(["test", "--input"]).arg(&data).args(["--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("alpha"), "stderr: {stderr}");
}

#[test]
fn malformed_input_names_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "data.csv", "1.0\n2.0\nbogus\n4.0\n5.0\n6.0\n7.0\n8.0\n");
    let config = write(
        dir.path(),
        "run.json",
        r#"{"object_kind":"vector","metric":"vector_euclidean"}"#,
    );
    let out = run(bin().args(["test", "--input"]).arg(&data).args(["--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 3"), "stderr: {stderr}");
}

#[test]
fn test_output_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let dgp = write(dir.path(), "dgp.json", r#"{"family":"univ_nma2","n":40}"#);
    let data = dir.path().join("data.csv");
    assert!(run(bin().args(["simulate", "--config"]).arg(&dgp).args(["--seed", "8", "--out"]).arg(&data))
        .status
        .success());
    let config = write(
        dir.path(),
        "run.json",
        r#"{"object_kind":"vector","metric":"vector_euclidean","statistic":"ks",
            "method":"permutation","replicates":120,"seed":4}"#,
    );
    let mut outputs = Vec::new();
    for threads in ["1", "2"] {
        let result_path = dir.path().join(format!("result_{threads}.json"));
        let out = run(bin()
            .args(["test", "--threads", threads, "--input"])
            .arg(&data)
            .args(["--config"])
            .arg(&config)
            .args(["--out"])
            .arg(&result_path));
        assert!(out.status.success());
        outputs.push(fs::read(&result_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "result files differ across thread counts");
}

#[test]
fn minimal_experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "exp.json",
        r#"{
            "dgp": {"family": "univ_iid", "n": 24},
            "metrics": ["vector_euclidean"],
            "statistics": ["cvm"],
            "methods": ["wild_bootstrap", "permutation"],
            "monte_carlo": 2,
            "replicates": 40,
            "base_seed": 3
        }"#,
    );
    let base = dir.path().join("report");
    let out = run(bin().args(["experiment", "--config"]).arg(&spec).args(["--out"]).arg(&base));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    for line in csv.lines().skip(1) {
        let rate: f64 = line.split(',').nth(8).unwrap().parse().unwrap();
        assert!(rate == 0.0 || rate == 0.5 || rate == 1.0, "rate {rate} with M=2");
    }
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn experiment_rejects_bad_alpha_with_field_name() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "exp.json",
        r#"{
            "dgp": {"family": "univ_iid", "n": 24},
            "metrics": ["vector_euclidean"],
            "monte_carlo": 2,
            "alpha": 1.5
        }"#,
    );
    let out = run(bin()
        .args(["experiment", "--config"])
        .arg(&spec)
        .args(["--out"])
        .arg(dir.path().join("r")));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn adcv_subcommand_dumps_lag_table() {
    let dir = tempfile::tempdir().unwrap();
    let dgp = write(dir.path(), "dgp.json", r#"{"family":"univ_iid","n":20}"#);
    let data = dir.path().join("data.csv");
    assert!(run(bin().args(["simulate", "--config"]).arg(&dgp).args(["--seed", "1", "--out"]).arg(&data))
        .status
        .success());
    let config = write(
        dir.path(),
        "run.json",
        r#"{"object_kind":"vector","metric":"vector_euclidean","max_lag":10}"#,
    );
    let out = run(bin().args(["adcv", "--input"]).arg(&data).args(["--config"]).arg(&config));
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("k,adcv\n"));
    assert_eq!(stdout.lines().count(), 11);
}

#[test]
fn spd_csv_round_trips_through_test() {
    let dir = tempfile::tempdir().unwrap();
    let dgp = write(dir.path(), "dgp.json", r#"{"family":"caw","dim":2,"rho":0.5,"n":30,"burn_in":40}"#);
    let data = dir.path().join("spd.csv");
    assert!(run(bin().args(["simulate", "--config"]).arg(&dgp).args(["--seed", "2", "--out"]).arg(&data))
        .status
        .success());
    let config = write(
        dir.path(),
        "run.json",
        r#"{"object_kind":"spd","metric":"spd_log_euclidean","replicates":60,"seed":11,"spd_dim":2}"#,
    );
    let result_path = dir.path().join("result.json");
    let out = run(bin()
        .args(["test", "--input"])
        .arg(&data)
        .args(["--config"])
        .arg(&config)
        .args(["--out"])
        .arg(&result_path));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result = json_file(&result_path);
    assert!(result["statistic_value"].as_f64().unwrap() >= 0.0);
}

#[test]
fn distribution_csv_supports_all_representations() {
    let dir = tempfile::tempdir().unwrap();
    let dgp = write(dir.path(), "dgp.json", r#"{"family":"atm","betas":[0.5],"n":20,"grid_points":41,"burn_in":30}"#);
    for (repr, metric) in [("quantile", "dist_w2"), ("cdf", "dist_ks"), ("cdf", "dist_kl")] {
        let data = dir.path().join(format!("dist_{repr}_{metric}.csv"));
        assert!(run(bin()
            .args(["simulate", "--config"])
            .arg(&dgp)
            .args(["--seed", "6", "--out"])
            .arg(&data)
            .args(["--repr", repr]))
        .status
        .success());
        let config = write(
            dir.path(),
            &format!("run_{repr}_{metric}.json"),
            &format!(
                r#"{{"object_kind":"distribution","metric":"{metric}","replicates":40,
                    "distribution_representation":"{repr}"}}"#
            ),
        );
        let out = run(bin().args(["test", "--input"]).arg(&data).args(["--config"]).arg(&config));
        assert!(
            out.status.success(),
            "{repr}/{metric}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
