use std::path::Path;
use std::process::{Command, Output};

fn trinav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trinav"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, format!("[scenario]\nduration = 2.0\n{extra}")).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn selftest_passes() {
    let o = trinav(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn run_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = trinav(&[
        "run",
        "--config",
        &cfg,
        "--algos",
        "tq,twosample",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("twosample vs tq"));
    let tq = out.join("tq.csv");
    let header = std::fs::read_to_string(&tq).unwrap();
    assert!(
        header.starts_with("t,att_err_rad,verr_n,verr_u,verr_e,perr_n,perr_u,perr_e,converged\n")
    );
    assert!(!out.join("rk4.csv").exists());

    let json = dir.path().join("summary.json");
    let o = trinav(&[
        "compare",
        tq.to_str().unwrap(),
        out.join("twosample.csv").to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(json).unwrap();
    assert!(text.contains("\"attitude_orders\""));
}

#[test]
fn simulate_output_feeds_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let sim = dir.path().join("sim");
    let o = trinav(&["simulate", "--config", &cfg, "--out", sim.to_str().unwrap()]);
    assert!(o.status.success());
    let imu = std::fs::read_to_string(sim.join("imu.csv")).unwrap();
    assert!(imu.starts_with("t,dthx,dthy,dthz,dvx,dvy,dvz\n"));
    assert_eq!(imu.lines().count(), 201);
    assert_eq!(
        std::fs::read_to_string(sim.join("truth.csv"))
            .unwrap()
            .lines()
            .count(),
        202
    );

    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = trinav(&[
        "run",
        "--config",
        &cfg,
        "--algos",
        "tq",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = trinav(&[
        "run",
        "--config",
        &cfg,
        "--algos",
        "tq",
        "--out",
        b.to_str().unwrap(),
        "--imu",
        sim.join("imu.csv").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(a.join("tq.csv")).unwrap(),
        std::fs::read(b.join("tq.csv")).unwrap()
    );
}

#[test]
fn strict_flag_fails_on_unconverged_windows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[solver]\nmax_iters = 1\n");
    let out = dir.path().join("out");
    let args = [
        "run",
        "--config",
        &cfg,
        "--algos",
        "tq",
        "--out",
        out.to_str().unwrap(),
    ];
    assert!(trinav(&args).status.success());
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(trinav(&strict).status.code(), Some(1));
    let csv = std::fs::read_to_string(out.join("tq.csv")).unwrap();
    assert!(csv.lines().skip(2).all(|l| l.ends_with(",0")));
}

#[test]
fn bad_arguments_are_reported() {
    let o = trinav(&["run", "--preset", "paper-vi", "--algos", "kalman"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown algorithm"));
    let o = trinav(&["run", "--preset", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = trinav(&["run", "--preset", "paper-vi", "--config", "x.toml"]);
    assert!(!o.status.success());
    let o = trinav(&["run", "--preset", "paper-vi", "--decimate", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
