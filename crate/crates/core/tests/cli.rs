use std::path::Path;
use std::process::{Command, Output};

use haptic_uplink::experiment::{parse_config, render, ExperimentSpec, Mode};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haptic-uplink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

#[test]
fn t_ib_sweep_has_one_row_per_point_and_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = cli(&[
        "sweep",
        "--param",
        "t_ib",
        "--from",
        "1ms",
        "--to",
        "3ms",
        "--steps",
        "41",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("total rate C = 1000000 b/s"), "{stderr}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with(
        "scheme,tti_s,t_ib_s,drop_rate,remainder_bits,epsilon,d0_s,status,config_hash\n"
    ));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 164);
    assert!(rows.iter().all(|r| r.split(',').count() == 9));
    let hashes: std::collections::HashSet<_> =
        rows.iter().map(|r| r.rsplit(',').next().unwrap()).collect();
    assert_eq!(hashes.len(), 164);
}

#[test]
fn tti_sweep_tracks_grant_period() {
    let o = cli(&[
        "drop",
        "--param",
        "tti",
        "--values",
        "0.125ms,0.25ms,0.5ms,1ms",
        "--scheme",
        "SPS",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    // at 0.125 ms the grant period is 1.25 ms and 2 ms bursts are drop-free
    assert!(
        rows[0].starts_with("SPS,0.000125000,0.002000000,116,116,0,"),
        "{}",
        rows[0]
    );
}

#[test]
fn empty_scheme_list_is_a_config_error() {
    let o = cli(&["bound", "--scheme", ""]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment.schemes"));
}

#[test]
fn config_errors_name_their_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "[haptic]\nt_b = \"1.5s\"\n[radio]\nt_pg = \"0.1ms\"\n",
    )
    .unwrap();
    let o = cli(&["bound", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("haptic.t_b") && err.contains("radio.t_pg"),
        "{err}"
    );

    let o = cli(&[
        "bound",
        "--config",
        dir.path().join("missing.toml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_comparison_exits_with_two() {
    let o = cli(&[
        "compare",
        "--scheme",
        "SPS",
        "--horizon",
        "100s",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# compare"));
    assert_eq!(data_rows(&text).len(), 2);
}

#[test]
fn simulate_writes_json_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.json");
    let o = cli(&[
        "simulate",
        "--scheme",
        "FA,DS",
        "--horizon",
        "20s",
        "--seed",
        "1,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(&out)).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[0]["scheme"], "FastUplink");
}

#[test]
fn infeasible_points_become_rows() {
    let config =
        parse_config("[leftover]\nlambda_rate = 100\n[experiment]\nschemes = [\"DS\", \"SPS\"]\n")
            .unwrap();
    let out = render(&ExperimentSpec {
        mode: Mode::Bound,
        config,
        out: None,
    })
    .unwrap();
    let rows = data_rows(&out.text);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains(",infeasible,")));
    assert_eq!(out.infeasible, 2);
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn worker_count_does_not_change_output() {
    let text = "[experiment]\nparam = \"t_ib\"\nfrom = \"1ms\"\nto = \"3ms\"\nsteps = 9\n";
    let mut config = parse_config(text).unwrap();
    let spec = |config| ExperimentSpec {
        mode: Mode::Sweep,
        config,
        out: None,
    };
    let many = render(&spec(config.clone())).unwrap().text;
    config.workers = Some(1);
    assert_eq!(render(&spec(config)).unwrap().text, many);
}

#[test]
fn misaligned_tti_sweep_is_rejected_for_simulation() {
    let o = cli(&[
        "simulate",
        "--param",
        "tti",
        "--values",
        "0.3ms",
        "--horizon",
        "20s",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("whole number of TTIs"));
}
