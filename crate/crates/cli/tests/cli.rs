use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_epj-sim");

fn reference_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml")
}

fn sim(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("EPJ_SIM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Reference config with one `key = value` line replaced.
fn edited_config(dir: &Path, key: &str, line: &str) -> PathBuf {
    let text = fs::read_to_string(reference_config()).unwrap();
    let edited: String = text
        .lines()
        .map(|l| {
            if l.split('=').next().map(str::trim) == Some(key) {
                line.to_string()
            } else {
                l.to_string()
            }
        })
        .map(|l| l + "\n")
        .collect();
    let path = dir.join(format!("{key}.toml"));
    fs::write(&path, edited).unwrap();
    path
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .collect()
}

#[test]
fn run_with_joint_ends_relocked() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = sim(&["run", "--epj", "on", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("t,theta_a,theta_b,omega_a,omega_b,phi,latch,com_x,com_y,energy\n"));
    let last = data_rows(&csv).pop().unwrap().to_string();
    assert_eq!(last.split(',').nth(6), Some("Relocked"));
    assert!(stdout(&o).starts_with("omega_end=-0.36"), "{}", stdout(&o));
}

#[test]
fn run_without_joint_spins_at_constant_rate() {
    let o = sim(&["run", "--epj", "off"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let rows = data_rows(&csv);
    assert!(rows.len() > 1000);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        assert_eq!((f[3], f[4], f[6]), ("-3.46", "-3.46", "Locked"));
    }
    assert!(stderr(&o).contains("omega_end=-3.46"));
}

#[test]
fn slack_spring_trips_the_watchdog() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited_config(dir.path(), "k_n_per_m", "k_n_per_m = 0");
    let o = sim(&["run", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("latch never closed"), "{}", stderr(&o));
}

#[test]
fn broken_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited_config(dir.path(), "leg_g", "");
    let o = sim(&["run", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("masses.leg_g"));
    let o = sim(&["run", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_reduces_spin_and_leaves_config_alone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ref.toml");
    fs::copy(reference_config(), &cfg).unwrap();
    let before = fs::read(&cfg).unwrap();
    let out = dir.path().join("cmp.csv");
    let o = sim(&[
        "compare",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&cfg).unwrap(), before);

    let text = stdout(&o);
    assert!(text.contains("paper-reported, not expected to match"));
    let ratio: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("omega_reduction_ratio: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio > 0.8 && ratio < 1.0, "{ratio}");

    let csv = fs::read_to_string(&out).unwrap();
    let rows = data_rows(&csv);
    let field = |row: &str, i: usize| row.split(',').nth(i).unwrap().parse::<f64>().unwrap();
    assert!(field(rows[0], 5).abs() < field(rows[1], 5).abs());
    // apex: joint jump does not rise higher
    assert!(field(rows[0], 6) <= field(rows[1], 6));
}

#[test]
fn pre_closed_joint_gives_zero_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited_config(dir.path(), "k_n_per_m", "k_n_per_m = 0");
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("initial_latch = \"open\"", "initial_latch = \"locked\"");
    fs::write(&cfg, text).unwrap();
    let o = sim(&["compare", "--config", path_str(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("omega_reduction_ratio: 0\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn stiffness_sweep_reports_sign_change() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let o = sim(&[
        "sweep",
        "stiffness_k",
        "200",
        "3000",
        "57",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with(
        "param_name,param_value,omega_end,apex_m,distance_m,distance_corrected_m,status\n"
    ));
    assert_eq!(data_rows(&csv).len(), 57);
    assert_eq!(csv.lines().filter(|l| l.starts_with("#root,")).count(), 1);
    assert!(stdout(&o).contains("sign_changes=1"));
}

#[test]
fn two_point_sweep() {
    let o = sim(&["sweep", "stiffness_k", "1000", "2000", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(data_rows(&stdout(&o)).len(), 2);
}

#[test]
fn joint_x_sweep_flips_forward_to_backward() {
    let o = sim(&["sweep", "joint_x", "25", "36", "12"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stderr(&o).contains("transition=forward_to_backward"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn unknown_parameter_exits_2() {
    let o = sim(&["sweep", "joint_z", "1", "2", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn optimize_finds_non_flipping_stiffness() {
    let o = sim(&["optimize", "stiffness_k", "1500", "1700"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let abs: f64 = text
        .split("|omega_end| = ")
        .nth(1)
        .and_then(|s| s.split(' ').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(abs <= 1e-4, "{text}");
}

#[test]
fn optimize_without_sign_change_exits_4() {
    let o = sim(&["optimize", "stiffness_k", "200", "1000"]);
    assert_eq!(o.status.code(), Some(4));
    let err = stderr(&o);
    assert!(
        err.contains("stiffness_k = 200") && err.contains("at 1000"),
        "{err}"
    );
}

#[test]
fn joint_x_root_lies_in_sweep_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("root.csv");
    let o = sim(&["optimize", "joint_x", "30", "31", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let root: f64 = row[3].parse().unwrap();
    assert!(root > 30.0 && root < 31.0);
    assert_eq!(row[6], "true");
}

#[test]
fn sweep_csv_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for threads in ["1", "4", "0"] {
        let out = dir.path().join(format!("k{threads}.csv"));
        let o = Command::new(BIN)
            .args([
                "sweep",
                "stiffness_k",
                "200",
                "3000",
                "20",
                "--out",
                path_str(&out),
            ])
            .env("EPJ_SIM_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        bodies.push(fs::read(&out).unwrap());
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn bad_thread_count_exits_2() {
    let o = Command::new(BIN)
        .args(["compare"])
        .env("EPJ_SIM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seedless_flag_is_accepted() {
    let a = sim(&["--seedless-deterministic", "run"]);
    let b = sim(&["run"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
