use projlmo::cli::{run, CommandOutput, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};

fn projlmo(args: &[&str]) -> CommandOutput {
    run(std::iter::once("projlmo").chain(args.iter().copied()))
}

fn csv_rows(out: &CommandOutput) -> Vec<Vec<String>> {
    out.stdout
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn verify_unit_ball_passes() {
    let out = projlmo(&[
        "verify",
        "--set",
        "ball2 c=0,0 r=1",
        "--seed",
        "7",
        "--trials",
        "1000",
    ]);
    assert_eq!(out.exit_code, EXIT_OK, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("PASS"));
    assert!(!out.stdout.contains("FAIL"));
}

#[test]
fn verify_one_point_simplex() {
    let out = projlmo(&["verify", "--set", "simplex n=1", "--trials", "200"]);
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.stdout);
}

#[test]
fn verify_rejects_inverted_box() {
    let out = projlmo(&["verify", "--set", "box l=1,0 u=0,1"]);
    assert_eq!(out.exit_code, EXIT_USAGE);
    assert!(out.stderr.contains("lower bound"));
}

#[test]
fn verify_accepts_json_sets() {
    let out = projlmo(&[
        "verify",
        "--set",
        r#"{"kind":"simplex","dim":3}"#,
        "--trials",
        "100",
    ]);
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.stderr);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(projlmo(&["frobnicate"]).exit_code, EXIT_USAGE);
    assert_eq!(projlmo(&["verify", "--trials", "0"]).exit_code, EXIT_USAGE);
}

#[test]
fn lambdastar_on_square() {
    let out = projlmo(&[
        "lambdastar",
        "--set",
        "polytope v=1,1;1,-1;-1,1;-1,-1",
        "--x",
        "0.3,1",
    ]);
    assert_eq!(out.exit_code, EXIT_OK);
    let row = &csv_rows(&out)[0];
    assert_eq!(row[0].parse::<f64>().unwrap(), 4.0);
    assert_eq!(row[2], "true");
    assert_eq!(row[4], "2");
    assert_eq!(row[6], "-1.0000000000000000e0;-1.0000000000000000e0");
}

#[test]
fn lambdastar_without_budget_reports_not_exact() {
    let out = projlmo(&[
        "lambdastar",
        "--set",
        "polytope v=1,1;1,-1;-1,1;-1,-1",
        "--x",
        "0.3,1",
        "--max-doublings",
        "0",
    ]);
    assert_eq!(out.exit_code, EXIT_CHECK_FAILED);
    assert!(out.stderr.contains("not yet exact"));
    assert_eq!(csv_rows(&out)[0][5], "false");
}

#[test]
fn lambdastar_needs_polytope() {
    let out = projlmo(&["lambdastar", "--set", "ball2 c=0,0 r=1", "--x", "1,0"]);
    assert_eq!(out.exit_code, EXIT_USAGE);
}

#[test]
fn fw_reaches_ball_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = projlmo(&[
        "fw",
        "--set",
        "ball2 c=0,0 r=1",
        "--target",
        "2,0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.stderr);
    let trace = std::fs::read_to_string(&path).unwrap();
    assert!(trace.starts_with("k,objective,fw_gap,epsilon\n"));
    let last = trace.lines().last().unwrap();
    let objective: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    // Objective at (1, 0) is 0.5; distance 1e-4 changes it by about 1e-4.
    assert!((objective - 0.5).abs() <= 2e-4);
    let distance_line = out
        .stderr
        .lines()
        .find(|l| l.starts_with("distance_to_projection"))
        .unwrap();
    let distance: f64 = distance_line
        .split(':')
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(distance <= 1e-4);
}

#[test]
fn fw_exact_schedule_on_simplex() {
    let out = projlmo(&[
        "fw",
        "--set",
        "simplex n=3",
        "--target",
        "0,0,0",
        "--schedule",
        "exact",
        "--stop-gap",
        "1e-6",
    ]);
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.stderr);
}

#[test]
fn bench_rejects_zero_trials() {
    assert_eq!(projlmo(&["bench", "--trials", "0"]).exit_code, EXIT_USAGE);
}

#[test]
fn bench_prints_table() {
    let out = projlmo(&["bench", "--set", "ball1 n=4 r=2", "--trials", "20"]);
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(out.stdout.lines().count() >= 2);
}

#[test]
fn singleton_sweep_is_identically_zero() {
    let out = projlmo(&["sweep", "--set", "singleton p=1,2", "--x", "1,0"]);
    assert_eq!(out.exit_code, EXIT_OK);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 7);
    for row in rows {
        for value in &row[1..] {
            assert_eq!(value.parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn sweep_on_cube_hits_zero_gap() {
    let out = projlmo(&[
        "sweep",
        "--set",
        "ballinf n=2 r=1",
        "--x",
        "0.3,1",
        "--lambda-grid",
        "1:16:5",
    ]);
    assert_eq!(out.exit_code, EXIT_OK);
    let gaps: Vec<f64> = csv_rows(&out)
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    // proj(-lambda x) is the corner once both coordinates clip, i.e. lambda >= 1/0.3.
    assert!(gaps[0] > 0.0);
    assert_eq!(*gaps.last().unwrap(), 0.0);
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn sweep_rejects_bad_grid() {
    let out = projlmo(&[
        "sweep",
        "--set",
        "ball2 c=0,0 r=1",
        "--x",
        "1,0",
        "--lambda-grid",
        "0:1:3",
    ]);
    assert_eq!(out.exit_code, EXIT_USAGE);
}
