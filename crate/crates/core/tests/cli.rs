use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pa_seed::cli::read_oracle_csv;
use pa_seed::growth::enumerate_growth;
use pa_seed::trees::Tree;
use tempfile::TempDir;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pa-seed")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

struct Files {
    _dir: TempDir,
    path3: String,
    star5: String,
    path5: String,
    vertex: String,
    vertex_l2: String,
    dir: PathBuf,
}

fn files() -> Files {
    let dir = TempDir::new().unwrap();
    let p = |name, text| write(dir.path(), name, text).to_str().unwrap().to_string();
    Files {
        path3: p("path3.tree", "3\n0 1\n1 2\n"),
        star5: p("star5.tree", "5\n0 1\n0 2\n0 3\n0 4\n"),
        path5: p("path5.tree", "# a path\n5\n0 1\n1 2\n2 3\n3 4\n"),
        vertex: p("vertex.tree", "1\n"),
        vertex_l2: p("vertex_l2.tree", "1\nell: 2\n"),
        dir: dir.path().to_path_buf(),
        _dir: dir,
    }
}

#[test]
fn moments_prints_exact_rows() {
    let f = files();
    let out = stdout(&["moments", "--tau", &f.vertex_l2, "--seed", &f.path3, "--alpha", "1/1", "--n-list", "3,4"]);
    assert_eq!(out, "n,expectation_num,expectation_den,float\n3,0,1,0e0\n4,1,1,1e0\n");
}

#[test]
fn grow_is_reproducible() {
    let f = files();
    let a = f.dir.join("a.tree");
    let b = f.dir.join("b.tree");
    for out in [&a, &b] {
        stdout(&["grow", "--seed", &f.path3, "--alpha", "1/1", "--n", "10", "--seed-rng", "7", "--out", out.to_str().unwrap()]);
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert_eq!(Tree::parse(std::str::from_utf8(&x).unwrap()).unwrap().vertex_count(), 10);
    let planar = stdout(&["grow", "--seed", &f.path3, "--n", "6", "--trajectory"]);
    assert_eq!(planar.lines().filter(|l| l.starts_with("# step")).count(), 3);
}

#[test]
fn blind_prints_tab_separated_fields() {
    let f = files();
    let out = stdout(&["blind", "--seed1", &f.star5, "--seed2", &f.path5, "--tau", &f.vertex]);
    assert!(out.contains("is_blind\tfalse\n"));
    assert!(out.contains("witness\td=4\n"));
}

#[test]
fn observe_and_exponents() {
    let f = files();
    assert_eq!(stdout(&["observe", "--tau", &f.vertex_l2, "--tree", &f.star5]), "6\n");
    let out = stdout(&["observe", "--tau", &f.vertex_l2, "--tree", &f.star5, "--region", "outside", "--seed-size", "1"]);
    assert_eq!(out, "0\n");
    let out = stdout(&["exponents", "--tau", &f.vertex_l2, "--alpha", "1"]);
    assert!(out.contains("critical\ttrue") && out.contains("log_power\t1"));
}

#[test]
fn oracle_round_trips() {
    let f = files();
    let text = stdout(&["oracle", "--seed", &f.path3, "--alpha", "1/2", "--n", "6"]);
    let law = read_oracle_csv(&text).unwrap();
    let expected = enumerate_growth(&Tree::path(3), "1/2".parse().unwrap(), 6, false).unwrap();
    assert_eq!(law, expected);
    assert!(!text.contains('\r'));
}

#[test]
fn distinguish_and_couple_outputs() {
    let f = files();
    let report = stdout(&[
        "distinguish", "--seed1", &f.star5, "--seed2", &f.path5, "--alpha", "1", "--n-list", "20,40", "--reps", "200",
        "--seed-rng", "3", "--threads", "2",
    ]);
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["plan"]["ell"], serde_json::json!([3]));
    assert_eq!(json["estimates"].as_array().unwrap().len(), 2);
    let csv = stdout(&["couple", "--seed1", &f.star5, "--seed2", &f.path5, "--tau", &f.vertex_l2, "--n", "30", "--reps", "5"]);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "replicate,first,second,first_outside,second_outside");
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[3], cols[4]);
    }
}

#[test]
fn exit_codes() {
    let f = files();
    let bad = write(&f.dir, "bad.tree", "3\n0 1\n");
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["observe", "--tau", &f.vertex, "--tree", bad.to_str().unwrap()]), 2);
    assert_eq!(code(&["observe", "--tau", &f.vertex, "--tree", "/nonexistent"]), 2);
    assert_eq!(code(&["moments", "--tau", &f.vertex_l2, "--seed", &f.path3, "--n-list", "4,3"]), 2);
    assert_eq!(code(&["bogus"]), 2);
    assert_eq!(code(&["oracle", "--seed", &f.path3, "--n", "14"]), 3);
    assert_eq!(code(&["distinguish", "--seed1", &f.star5, "--seed2", &f.star5, "--n-list", "10"]), 4);
    assert!(String::from_utf8(run(&["--help"]).stdout).unwrap().contains("3  an enumeration or search cap"));
}
