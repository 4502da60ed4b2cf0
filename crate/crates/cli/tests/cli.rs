use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathological")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 csv")
}

/// Data rows (header row included) of a CSV with a `#` preamble.
fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let lines = data_lines(csv);
    let idx = lines[0].split(',').position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    lines[1..].iter().map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn bump_default_passes_and_streams_to_stdout() {
    let o = run(&["bump", "--csv", "-"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# pathological "));
    assert!(out.contains("# config bump.alpha = 0.2"));
    assert!(!out.contains("# config wave."), "only the command's section is echoed");
    // three levels times two windows
    assert_eq!(data_lines(&out).len(), 1 + 6);
    assert!(column(&out, "gap_pairs").iter().all(|&p| p > 0.0));
}

#[test]
fn bump_separation_violation_exits_2() {
    let o = run(&["bump", "--csv", "-", "--set", "bump.alpha=0.3", "--set", "bump.beta=1.4"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bump separation (beta*n >= n+2)"), "{}", stderr(&o));
}

#[test]
fn impossible_candidate_exits_2() {
    let o = run(&["bump", "--csv", "-", "--set", "bump.alpha=0.5", "--set", "bump.n_min=5", "--set", "bump.n_max=5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("construction impossible"), "{}", stderr(&o));
}

#[test]
fn unknown_key_and_bad_value_exit_2() {
    assert_eq!(code(&run(&["bump", "--set", "bump.colour=red"])), 2);
    assert_eq!(code(&run(&["wave", "--set", "wave.k0=one"])), 2);
    assert_eq!(code(&run(&["nonsense"])), 2);
}

#[test]
fn wave_default_monotone_and_gate() {
    let o = run(&["wave", "--csv", "-"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let lam = column(&out, "lambda_n");
    let lb = column(&out, "log_ultra_norm_lb");
    let mut modes: Vec<(f64, f64)> = lam.iter().copied().zip(lb.iter().copied()).collect();
    modes.dedup();
    assert_eq!(modes.len(), 8);
    assert!(modes.windows(2).all(|w| w[1].1 > w[0].1), "{modes:?}");

    let o = run(&["wave", "--csv", "-", "--set", "wave.beta=2"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("beta > 1/(1-alpha)"), "{}", stderr(&o));
}

#[test]
fn wave_tolerance_flag_leaves_results_unchanged() {
    let a = stdout(&run(&["wave", "--csv", "-"]));
    let b = run(&["wave", "--csv", "-", "--tol", "1e-10"]);
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    let b = stdout(&b);
    assert!(b.contains("# config wave.tol = 1e-10"));
    for name in ["log_E", "log_ultra_norm_lb"] {
        for (x, y) in column(&a, name).iter().zip(column(&b, name)) {
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{name}: {x} vs {y}");
        }
    }
}

#[test]
fn identical_config_gives_identical_bytes() {
    for cmd in ["exercise", "wave"] {
        let a = run(&[cmd, "--csv", "-", "--seed", "7"]);
        let b = run(&[cmd, "--csv", "-", "--seed", "7"]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn transport_default_reports_ell() {
    let o = run(&["transport", "--csv", "-"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("ell_2 = 2.93050"), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(column(&out, "n"), (1..=16).map(f64::from).collect::<Vec<_>>());
}

#[test]
fn transport_small_grid_exits_2_with_hint() {
    let o = run(&["transport", "--csv", "-", "--set", "transport.grid=128"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("minimum grid size is 512"), "{}", stderr(&o));
}

#[test]
fn transport_sweep_gives_one_row_per_value() {
    let o = run(&["transport", "--csv", "-", "--sweep", "n=1..64", "--set", "transport.t_grid=0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# sweep: transport.n = 1..64"));
    assert_eq!(data_lines(&out).len(), 1 + 64);
    assert_eq!(column(&out, "transport.n"), column(&out, "n"));
}

#[test]
fn transport_large_amplitude_fails_verification() {
    let o = run(&["transport", "--csv", "-", "--set", "transport.amplitude=3", "--set", "transport.n_max=2", "--set", "transport.t_grid=0"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("FAIL u_1 bounded by 1"), "{}", stderr(&o));
}

#[test]
fn config_file_is_read_and_echoed() {
    let path = std::env::temp_dir().join(format!("pathological-cli-test-{}.conf", std::process::id()));
    std::fs::write(&path, "# exercise settings\nexercise.n_min = 2\nexercise.n_max = 4 # inclusive\n").unwrap();
    let o = run(&["exercise", "--csv", "-", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# config exercise.n_max = 4"));
    assert_eq!(column(&out, "n"), vec![2.0, 3.0, 4.0]);
    // the Lipschitz reading grows with n while the Hölder reading stays within H
    let lip = column(&out, "local_lip_const");
    assert!(lip.windows(2).all(|w| w[1] > w[0]));
    assert!(column(&out, "holder_const").iter().all(|&h| h <= 1.0 + 1e-9));
}

#[test]
fn csv_file_output() {
    let path = std::env::temp_dir().join(format!("pathological-cli-out-{}.csv", std::process::id()));
    let o = run(&["exercise", "--csv", path.to_str().unwrap(), "--set", "exercise.n_max=3"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(o.stdout.is_empty());
    assert_eq!(data_lines(&text)[0], "n,holder_const,local_lip_const,sup_distance");
}
