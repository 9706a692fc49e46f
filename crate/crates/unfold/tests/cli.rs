use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_unfold");

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("problems")
        .join(name)
}

fn run(args: &[&str], out: &Path, env: &[(&str, &str)]) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .envs(env.iter().copied())
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Every file of a run, by name.
fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn split_reproduces_the_three_curve_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["split", problem("three_curves.json").to_str().unwrap()],
        dir.path(),
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let tree = json(&dir.path().join("split.json"));
    let root = &tree["root"];
    assert_eq!(root["e"], 0);
    assert_eq!(root["iota"], 2);
    let compact = &root["children"][0];
    assert_eq!(compact["kind"], "compact_like");
    assert_eq!(compact["e"], 2);
    assert_eq!(compact["children"].as_array().unwrap().len(), 2);
}

#[test]
fn directions_lists_both_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["directions", problem("three_curves.json").to_str().unwrap()],
        dir.path(),
        &[],
    );
    assert!(out.status.success());
    let atlas = json(&dir.path().join("directions.json"));
    assert_eq!(atlas["levels"], serde_json::json!([2, 3]));
    let sizes: Vec<usize> = atlas["singular"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["angles"].as_array().unwrap().len())
        .collect();
    assert_eq!(sizes, vec![4, 6]);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let p = problem("two_points.json");
    let t = problem("three_curves.json");
    let cases: [&[&str]; 3] = [
        &["fatou", p.to_str().unwrap(), "--grid", "3"],
        &["horn", p.to_str().unwrap()],
        &[
            "stability-sweep",
            t.to_str().unwrap(),
            "--grid",
            "6",
            "--seed",
            "7",
        ],
    ];
    for args in cases {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert!(
            run(args, a.path(), &[("UNFOLD_THREADS", "1")])
                .status
                .success(),
            "{args:?}"
        );
        assert!(
            run(args, b.path(), &[("UNFOLD_THREADS", "4")])
                .status
                .success(),
            "{args:?}"
        );
        assert_eq!(artifacts(a.path()), artifacts(b.path()), "{args:?}");
    }
}

#[test]
fn the_seed_drives_the_sweep() {
    let t = problem("three_curves.json");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        let args = [
            "stability-sweep",
            t.to_str().unwrap(),
            "--grid",
            "4",
            "--seed",
            seed,
        ];
        assert!(run(&args, dir.path(), &[]).status.success());
    }
    assert_ne!(
        fs::read(a.path().join("stability.csv")).unwrap(),
        fs::read(b.path().join("stability.csv")).unwrap()
    );
}

#[test]
fn emitted_json_reparses_with_seventeen_digit_floats() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem("two_points.json");
    for cmd in ["horn", "conjugacy"] {
        assert!(
            run(&[cmd, p.to_str().unwrap()], dir.path(), &[])
                .status
                .success(),
            "{cmd}"
        );
    }
    let horn = json(&dir.path().join("horn.json"));
    assert_eq!(horn["x"], serde_json::json!([0.02, 0.0]));
    assert!(horn["a"].as_array().unwrap().len() >= 2);
    let text = fs::read_to_string(dir.path().join("horn.json")).unwrap();
    assert!(text.contains("2.0000000000000000e-2"));
    let witness = json(&dir.path().join("conjugacy.json"));
    assert_eq!(witness["status"], "Consistent");
}

#[test]
fn fatou_grid_satisfies_the_abel_equation() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem("two_points.json");
    assert!(run(
        &["fatou", p.to_str().unwrap(), "--grid", "3", "--petal", "1"],
        dir.path(),
        &[]
    )
    .status
    .success());
    let csv = fs::read_to_string(dir.path().join("fatou.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re_y,im_y,re_psi,im_psi,abel_residual"));
    let residuals: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(!residuals.is_empty());
    assert!(residuals.iter().all(|r| *r < 1e-9), "{residuals:?}");
}

#[test]
fn schema_violations_exit_2_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = fs::read_to_string(problem("two_points.json")).unwrap();
    fs::write(&bad, text.replace("\"unfold/1\"", "\"unfold/0\"")).unwrap();
    let out = run(&["split", bad.to_str().unwrap()], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error at schema"));

    fs::write(&bad, "{\"schema\": \"unfold/1\", \"normal_form\": 3}").unwrap();
    let out = run(&["split", bad.to_str().unwrap()], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1, column"));

    let out = run(
        &["conjugacy", problem("three_curves.json").to_str().unwrap()],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("options.conjugator"));

    let out = run(
        &[
            "fatou",
            problem("two_points.json").to_str().unwrap(),
            "--petal",
            "9",
        ],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "horn",
            problem("two_points.json").to_str().unwrap(),
            "--budget",
            "3",
        ],
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
    let diag = json(&dir.path().join("diagnostic.json"));
    assert_eq!(diag["command"], "horn");
    assert_eq!(diag["kind"], "budget_exhausted");
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"kind\": \"budget_exhausted\""));
}
