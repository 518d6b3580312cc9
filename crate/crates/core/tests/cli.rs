use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use terrainvis::fixtures;
use terrainvis::io::{parse_instance, parse_map, AnyMap};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_terrainvis"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("fix-{name}.terrain"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fixture_files_match_the_built_in_fixtures() {
    for name in fixtures::NAMES {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed, fixtures::by_name(name).unwrap(), "{name}");
    }
}

#[test]
fn vis_of_peak() {
    let out = run(&["vis", fixture("peak").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "map vis\n[0, 1] visible\n[1, 2] invisible\n");
}

#[test]
fn check_passes_on_every_fixture() {
    for kind in ["vis", "colvis", "vorvis"] {
        let mut args = vec!["check", kind];
        let paths: Vec<String> = fixtures::NAMES
            .iter()
            .map(|n| fixture(n).to_string_lossy().into_owned())
            .collect();
        args.extend(paths.iter().map(String::as_str));
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{kind}: {}", stdout(&out));
    }
    let apex = fixture("apex");
    let out = run(&["check", "vorvis", "--algo", "dnc", apex.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn check_random_instances() {
    let out = run(&["check", "colvis", "--random", "20", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 20);
    let out = run(&["check", "vis", "--random", "10", "--radius", "9/2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn generated_comb_piped_into_colvis() {
    let gen = run(&["gen", "comb", "--m", "3", "--teeth", "4"]);
    assert!(gen.status.success());
    let out = run_with_stdin(&["colvis", "-"], &gen.stdout);
    assert!(out.status.success());
    let map = parse_map(&stdout(&out)).unwrap();
    assert!(matches!(map, AnyMap::Colvis(_)));
    assert!(map.len() >= 12, "{} regions", map.len());
}

#[test]
fn vorvis_labels_are_vertex_indices() {
    let gen = run(&["gen", "random", "--n", "12", "--m", "3", "--seed", "7"]);
    let inst = parse_instance(&stdout(&gen)).unwrap();
    let out = run_with_stdin(&["vorvis", "-"], &gen.stdout);
    let indices = inst.viewpoints.indices();
    for line in stdout(&out).lines().skip(1) {
        let label = line.rsplit(' ').next().unwrap();
        if label != "none" {
            assert!(indices.contains(&label.parse().unwrap()), "{line}");
        }
    }
}

#[test]
fn json_output() {
    let out = run(&[
        "vorvis",
        fixture("apex").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "vorvis");
    assert_eq!(v["intervals"][0]["hi"], "2");
    assert_eq!(v["intervals"][1]["label"], 1);
}

#[test]
fn radius_flag_limits_sight() {
    let out = run(&["colvis", fixture("flat").to_str().unwrap(), "--radius", "3"]);
    assert_eq!(
        stdout(&out),
        "map colvis\n[0, 3] {0}\n[3, 7] {}\n[7, 10] {1}\n"
    );
}

#[test]
fn oracle_agrees_on_valley() {
    let out = run(&["oracle", "vis", fixture("valley").to_str().unwrap()]);
    assert_eq!(
        stdout(&out),
        "map vis\n[0, 2] visible\n[2, 28/9] invisible\n[28/9, 4] visible\n"
    );
}

#[test]
fn bad_input_exits_2() {
    let out = run_with_stdin(&["vis", "-"], b"terrain 1.5d\nn 3\n0 0\n1 1\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let collinear = b"terrain 1.5d\nn 3\n0 0\n1 1\n2 2\nviewpoints 0\n";
    let out = run_with_stdin(&["validate", "-"], collinear);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("collinear"));
    let out = run_with_stdin(&["colvis", "-"], collinear);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["vis", "/nonexistent/file.terrain"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_accepts_general_position() {
    let out = run(&["validate", fixture("apex").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("valley.svg");
    let out = run(&[
        "render",
        "vorvis",
        fixture("valley").to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<polyline"));
}

#[test]
fn witness_generator_round_trips() {
    let gen = run(&["gen", "witness", "--m", "2", "--teeth", "3"]);
    assert!(gen.status.success());
    let out = run_with_stdin(&["check", "vis", "-"], &gen.stdout);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn bench_prints_a_table() {
    let out = run(&[
        "bench",
        "--m",
        "2",
        "--min-log",
        "4",
        "--max-log",
        "5",
        "--full-max-log",
        "5",
        "--oracle-max-log",
        "4",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 3);
}
