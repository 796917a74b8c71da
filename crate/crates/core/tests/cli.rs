use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cardioseq::synthetic::{separable, to_cleveland_text};
use tempfile::TempDir;

fn cardioseq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cardioseq"))
        .args(args)
        .current_dir(dir)
        .env_remove("CARDIOSEQ_OUT")
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn workspace(n: usize) -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("toy.data"),
        to_cleveland_text(&separable(n, 42)),
    )
    .unwrap();
    dir
}

#[test]
fn validate_summarizes_a_dataset() {
    let dir = workspace(30);
    let out = cardioseq(&["validate", "--data", "toy.data"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("toy.data: 30 records"));
    assert!(stdout.contains("class balance: absent 15, present 15"));
}

#[test]
fn malformed_rows_name_the_line() {
    let dir = workspace(3);
    let path = dir.path().join("bad.data");
    let mut body = to_cleveland_text(&separable(3, 1));
    body = body.replacen('\n', "\n1,2,3\n", 1);
    fs::write(&path, body).unwrap();
    let out = cardioseq(&["validate", "--data", "bad.data"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(
        text(&out.stderr).contains("line 2"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn missing_file_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let out = cardioseq(&["validate", "--data", "nope.data"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("cannot open"));
}

#[test]
fn train_writes_curve_and_reaches_full_accuracy() {
    let dir = workspace(200);
    let out = cardioseq(&["train", "--data", "toy.data", "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("final train accuracy 1.000000"));
    let curve = fs::read_to_string(dir.path().join("run/curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 51);
    let model = fs::read(dir.path().join("run/model.txt")).unwrap();
    assert!(dir.path().join("run/scaler.txt").is_file());

    let again = cardioseq(
        &["train", "--data", "toy.data", "--out", "run2"],
        dir.path(),
    );
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(model, fs::read(dir.path().join("run2/model.txt")).unwrap());

    let record = "1,1,1,1,1,1,1,1,1,1,1,1,1";
    let p = cardioseq(&["predict", "run/model.txt", record], dir.path());
    assert_eq!(p.status.code(), Some(0));
    assert!(text(&p.stdout).starts_with("class 1, p = "));
}

#[test]
fn zero_epochs_is_allowed() {
    let dir = workspace(20);
    let out = cardioseq(
        &["train", "--data", "toy.data", "--epochs", "0", "--out", "z"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("no epochs run"));
    assert_eq!(
        fs::read_to_string(dir.path().join("z/curve.csv"))
            .unwrap()
            .lines()
            .count(),
        1
    );
}

#[test]
fn untrained_logistic_predicts_even_odds() {
    let dir = workspace(20);
    let out = cardioseq(
        &[
            "train",
            "--data",
            "toy.data",
            "--model",
            "dv-logistic",
            "--dv-epochs",
            "0",
            "--out",
            "m",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    for record in ["0,0,0,0,0,0,0,0,0,0,0,0,0", "?,?,?,?,?,?,?,?,?,?,?,?,?"] {
        let p = cardioseq(&["predict", "m/model.txt", record], dir.path());
        assert_eq!(text(&p.stdout), "class 0, p = 0.500000 0.500000\n");
    }
    let short = cardioseq(&["predict", "m/model.txt", "1,2"], dir.path());
    assert_eq!(short.status.code(), Some(2));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = workspace(20);
    fs::write(dir.path().join("bad.conf"), "epochs = 3\nbogus = 1\n").unwrap();
    let out = cardioseq(
        &["train", "--data", "toy.data", "--config", "bad.conf"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("bogus"));
    let out = cardioseq(
        &["train", "--data", "toy.data", "--epochs", "many"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = cardioseq(&["cv", "--data", "toy.data", "--k", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = workspace(20);
    fs::write(
        dir.path().join("run.conf"),
        "# quick\nepochs = 2\nout = fromfile\n",
    )
    .unwrap();
    let out = cardioseq(
        &[
            "train", "--data", "toy.data", "--config", "run.conf", "--epochs", "3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let curve = fs::read_to_string(dir.path().join("fromfile/curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 4);
}

#[test]
fn diverging_training_is_a_run_failure() {
    let dir = workspace(40);
    let out = cardioseq(
        &[
            "train",
            "--data",
            "toy.data",
            "--lr",
            "1e300",
            "--dropout",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("non-finite"));
}

#[test]
fn cv_reports_are_reproducible() {
    let dir = workspace(60);
    let args = |out: &'static str| {
        [
            "cv", "--data", "toy.data", "--epochs", "3", "--k", "5", "--out", out,
        ]
    };
    assert_eq!(cardioseq(&args("a"), dir.path()).status.code(), Some(0));
    assert_eq!(cardioseq(&args("b"), dir.path()).status.code(), Some(0));
    for file in ["cv-cnn.txt", "cv-cnn.csv"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        assert_eq!(a, fs::read(dir.path().join("b").join(file)).unwrap());
    }
}

#[test]
fn compare_writes_a_table() {
    let dir = workspace(40);
    let out = cardioseq(
        &[
            "compare",
            "--data",
            "toy.data",
            "--model",
            "dv-logistic,cnn",
            "--epochs",
            "2",
            "--dv-epochs",
            "20",
            "--k",
            "4",
            "--out",
            "cmp",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("cmp/comparison.csv")).unwrap();
    assert!(csv.contains("dv-logistic"));
    assert!(csv.contains("cnn"));
    assert!(dir.path().join("cmp/comparison.txt").is_file());
}
