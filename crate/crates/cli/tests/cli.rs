use std::path::PathBuf;
use std::process::{Command, Output};

fn zsz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zsz"))
        .args(args)
        .env_remove("ZSZ_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zsz-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn build_fixture_prints_parameters() {
    let o = zsz(&["build", "--fixture", "ZSZ144-3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("n=144 k=12"));
    assert!(out.contains("check_weight x=6 z=6"));
}

#[test]
fn classical_mode_gives_repetition_code() {
    let o = zsz(&["build", "--l", "3", "--m", "1", "--q", "1", "--a", "1+x"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("n=3 k=1 d=3"));
}

#[test]
fn unknown_fixture_and_bad_usage_exit_one() {
    let o = zsz(&["build", "--fixture", "NOPE"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOPE"));
    assert_eq!(zsz(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(zsz(&["build"]).status.code(), Some(1));
    assert_eq!(zsz(&["--help"]).status.code(), Some(0));
}

#[test]
fn route_reports_verification_and_cyclic_flag() {
    let o = zsz(&["route", "--fixture", "ZSZ144-3", "--side", "X"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rounds"][0]["verified"], true);
    assert_eq!(v["rounds"][0]["cyclic_only"], false);

    let dir = scratch_dir("route");
    let o = zsz(&["route", "--fixture", "BB144-2", "--out-dir", dir.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rounds"].as_array().unwrap().len(), 2);
    assert!(v["rounds"].as_array().unwrap().iter().all(|r| r["cyclic_only"] == true));
    let round = std::fs::read_to_string(dir.join("round_x.txt")).unwrap();
    assert!(round.lines().all(|l| l.starts_with("move ")));
    assert!(dir.join("summary.json").exists());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn identity_monomial_routes_to_empty_script() {
    let o = zsz(&["route", "--fixture", "ZSZ144-3", "--monomial", "1", "--action", "right"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    assert!(out.contains("\"moves\":0"));
    let o = zsz(&["route", "--fixture", "ZSZ144-3", "--monomial", "x^2*y"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().count() > 1);
}

#[test]
fn simulate_is_reproducible_across_workers() {
    let dir = scratch_dir("sim");
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        "# tiny run\ncode = ZSZ80\nmode = global\np = 0, 4e-3\nrounds = 2\nshots = 64\nseed = 7\n",
    )
    .unwrap();
    let run = |workers: &str| {
        let o = zsz(&["simulate", "--config", cfg.to_str().unwrap(), "--workers", workers]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert!(one.starts_with("# zsz-sim csv v1\n"));
    assert!(one.contains("\nZSZ80,0,2,64,0,0,0,,7,0\n"));

    // Flags override the file; invalid settings are usage errors.
    let o = zsz(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--shots",
        "32",
        "--p",
        "0",
    ]);
    assert!(stdout(&o).contains("ZSZ80,0,2,32,0"));
    let o = zsz(&["simulate", "--config", cfg.to_str().unwrap(), "--set", "p=2"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn threshold_reads_csv_and_finds_crossing() {
    let dir = scratch_dir("thr");
    let csv = dir.join("curves.csv");
    let mut text =
        String::from("# zsz-sim csv v1\ncode,p,d_or_cycles,shots,failures,bler,stderr,bler_per_cycle,seed,wall_time\n");
    for p in [3e-4f64, 6e-4, 1e-3, 2e-3, 4e-3] {
        let small = 0.1 * (p / 1e-3).powi(2);
        let large = 0.1 * (p / 1e-3).powi(3);
        text += &format!("ZSZ80,{p},10,10000,0,{small},0.001,,0,0\n");
        text += &format!("ZSZ108,{p},10,10000,0,{large},0.001,,0,0\n");
    }
    std::fs::write(&csv, text).unwrap();
    let o = zsz(&["threshold", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pairs"][0]["smaller"], "ZSZ80");
    let x = v["pairs"][0]["crossing"].as_f64().unwrap();
    assert!((x / 1e-3 - 1.0).abs() < 0.05);

    std::fs::write(&csv, "# zsz-sim csv v1\nZSZ80,1e-3,10,10,0,0.1,0.01,,0,0\n").unwrap();
    assert_eq!(zsz(&["threshold", csv.to_str().unwrap()]).status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn analyze_and_distance_emit_json() {
    let o = zsz(&["analyze", "--fixture", "ZSZ80", "--radius", "4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["code"]["n"], 80);
    assert_eq!(v["ball_growth"].as_array().unwrap().len(), 5);
    assert!(v["colors"].as_u64().unwrap() >= 7);

    let o = zsz(&["distance", "--fixture", "ZSZ80", "--trials", "200"]);
    assert!(o.status.success());
    let first = stdout(&o).lines().next().unwrap().to_string();
    let d: usize = first.trim_start_matches("d<=").parse().unwrap();
    assert!((2..=12).contains(&d));
}

#[test]
fn search_prints_fixture_lines() {
    let o = zsz(&[
        "search",
        "--ell",
        "6",
        "--m",
        "3",
        "--q",
        "1",
        "--samples",
        "20",
        "--k-min",
        "2",
        "--trials",
        "20",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for line in stdout(&o).lines() {
        let f = fixture_k(line);
        assert!(f >= 2);
    }
}

/// `k` field of a fixture line.
fn fixture_k(line: &str) -> usize {
    let fields: Vec<&str> = line.split_whitespace().collect();
    fields[fields.len() - 2].parse().unwrap()
}
