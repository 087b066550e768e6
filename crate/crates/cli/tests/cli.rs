use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ditkit_core::qasm::parse;
use ditkit_core::{circuit_unitary, Matrix};
use tempfile::TempDir;

const REFERENCE_PROGRAM: &str = "DITQASM 2.0;
qreg reg_1 [2][2, 3];
qreg reg_2 [2][4, 7];
creg meas[4];
h reg_2[0] ctl reg_1[0] reg_1[1] [0,0];
csum reg_2[0], reg_1[0];
rxy (0, 2, pi, pi/2) reg_1[1]; 
rxy (0, 1, pi, pi/2) reg_2[1]; 
measure reg_1[0] -> meas[0];
measure reg_1[1] -> meas[1];
measure reg_2[0] -> meas[2];
measure reg_2[1] -> meas[3];
";

const BELL3: &str = "DITQASM 2.0;
qreg q [2][3, 2];
creg m[2];
h q[0];
csum q[0], q[1];
measure q[0] -> m[0];
measure q[1] -> m[1];
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ditkit")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn parse_prints_canonical_program() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "mixed.qasm", REFERENCE_PROGRAM);
    let out = run(&["parse", s(&input)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("DITQASM 2.0;"));
    let again = parse(&text).unwrap();
    assert_eq!(again.dims(), &[2, 3, 4, 7]);
    assert_eq!(again.instructions().len(), 8);
}

#[test]
fn parse_output_is_a_fixed_point() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "mixed.qasm", REFERENCE_PROGRAM);
    let first = dir.path().join("a.qasm");
    assert_eq!(code(&run(&["parse", s(&input), "-o", s(&first)])), 0);
    let second = run(&["parse", s(&first)]);
    assert_eq!(stdout(&second), std::fs::read_to_string(&first).unwrap());
}

#[test]
fn parse_reports_missing_header() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "empty.qasm", "");
    let out = run(&["parse", s(&input)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing DITQASM header"));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.qasm");
    for cmd in ["parse", "simulate", "compile", "stats"] {
        assert_eq!(code(&run(&[cmd, s(&missing)])), 2, "{cmd}");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&run(&["simulate", "--frobnicate"])), 2);
    assert_eq!(code(&run(&[])), 2);
}

#[test]
fn dump_state_lists_support() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bell3.qasm", BELL3);
    for backend in ["dense", "dd"] {
        let out = run(&["simulate", s(&input), "--shots", "0", "--dump-state", "--backend", backend]);
        assert_eq!(code(&out), 0);
        let text = stdout(&out);
        let lines: Vec<Vec<&str>> = text.lines().map(|l| l.split('\t').collect()).collect();
        let keys: Vec<&str> = lines.iter().map(|l| l[0]).collect();
        assert_eq!(keys, ["0,0", "1,1", "2,0"], "{backend}");
        for l in &lines {
            let re: f64 = l[1].parse().unwrap();
            let im: f64 = l[2].parse().unwrap();
            assert!((re - 1.0 / 3f64.sqrt()).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
}

#[test]
fn deterministic_circuit_gives_one_line() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "zero.qasm", "DITQASM 2.0;\nqreg q [2][3, 4];\n");
    let out = run(&["simulate", s(&input), "--shots", "100"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0,0\t100\n");
}

#[test]
fn counts_are_reproducible_per_seed() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bell3.qasm", BELL3);
    let noise = write(
        &dir,
        "noise.json",
        r#"{"entries":[{"gate":"csum","prob_x":0.1,"prob_z":0.05,"policy":"all"}]}"#,
    );
    let args = ["simulate", s(&input), "--shots", "500", "--seed", "42", "--noise", s(&noise)];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let total: u64 = stdout(&a).lines().map(|l| l.split('\t').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 500);
}

#[test]
fn backends_sample_identically() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "mixed.qasm", REFERENCE_PROGRAM);
    let dense = run(&["simulate", s(&input), "--shots", "300", "--seed", "9", "--backend", "dense"]);
    let dd = run(&["simulate", s(&input), "--shots", "300", "--seed", "9", "--backend", "dd"]);
    assert_eq!(code(&dense), 0);
    assert_eq!(dense.stdout, dd.stdout);
}

#[test]
fn bad_noise_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bell3.qasm", BELL3);
    let noise = write(&dir, "noise.json", "{not json");
    assert_eq!(code(&run(&["simulate", s(&input), "--noise", s(&noise)])), 2);
    let noise = write(&dir, "noise2.json", r#"{"entries":[{"gate":"x","prob_x":1.5,"prob_z":0,"policy":"all"}]}"#);
    assert_eq!(code(&run(&["simulate", s(&input), "--noise", s(&noise)])), 2);
}

#[test]
fn bad_backend_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bell3.qasm", BELL3);
    assert_eq!(code(&run(&["simulate", s(&input), "--backend", "tensor"])), 2);
}

fn phase_aligned_distance(a: &Matrix, b: &Matrix) -> f64 {
    let (mut pos, mut best) = ((0, 0), 0.0);
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            if a[(r, c)].norm() > best {
                best = a[(r, c)].norm();
                pos = (r, c);
            }
        }
    }
    let phase = b[pos] / a[pos];
    (a.map(|x| x * phase) - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

#[test]
fn log_passes_preserve_rotation_slice() {
    let dir = TempDir::new().unwrap();
    let slice = "DITQASM 2.0;
qreg reg_1 [2][2, 3];
qreg reg_2 [2][4, 7];
rxy (0, 2, pi, pi/2) reg_1[1];
rxy (0, 1, pi, pi/2) reg_2[1];
h reg_1[1];
";
    let input = write(&dir, "slice.qasm", slice);
    let output = dir.path().join("out.qasm");
    let out = run(&["compile", s(&input), "--passes", "LogLocQRPass", "-o", s(&output)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("after.gates\t"));
    let before = circuit_unitary(&parse(slice).unwrap(), 1 << 12).unwrap();
    let compiled = parse(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert!(compiled.gates().all(|g| matches!(g.name(), "rxy" | "rz")));
    let after = circuit_unitary(&compiled, 1 << 12).unwrap();
    assert!(phase_aligned_distance(&before, &after) < 1e-9);
}

#[test]
fn compile_on_bundled_device() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bell3.qasm", BELL3);
    let out = run(&["compile", s(&input), "--device", "faketraps2six"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let compiled = parse(&stdout(&out)).unwrap();
    assert!(compiled.gates().all(|g| matches!(g.native_name().as_str(), "rxy" | "rz" | "crot" | "pswap")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected_log_fidelity"));
}

#[test]
fn compile_errors() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bell3.qasm", BELL3);
    assert_eq!(code(&run(&["compile", s(&input), "--passes", "NoSuchPass"])), 2);
    assert_eq!(code(&run(&["compile", s(&input), "--passes", "PhyLocQRPass"])), 2);
    assert_eq!(code(&run(&["compile", s(&input), "--device", "no-such-device"])), 2);
    let bad_device = write(&dir, "dev.json", r#"{"name": 3}"#);
    assert_eq!(code(&run(&["compile", s(&input), "--device", s(&bad_device)])), 2);

    let mixed = write(&dir, "mixed.qasm", REFERENCE_PROGRAM);
    let out = run(&["compile", s(&mixed), "--passes", "LogEntQRPass"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`h`"));
}

#[test]
fn compile_empty_circuit() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "empty.qasm", "DITQASM 2.0;\nqreg q [1][3];\n");
    let output = dir.path().join("out.qasm");
    let out = run(&["compile", s(&input), "-o", s(&output)]);
    assert_eq!(code(&out), 0);
    let report = stdout(&out);
    assert!(report.contains("before.gates\t0") && report.contains("after.gates\t0"));
    assert_eq!(parse(&std::fs::read_to_string(&output).unwrap()).unwrap().gates().count(), 0);
}

#[test]
fn stats_reports_counts() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "mixed.qasm", REFERENCE_PROGRAM);
    let out = run(&["stats", s(&input)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for line in ["qudits\t4", "total_dim\t168", "gates\t4", "measurements\t4", "count.rxy\t2", "count.csum\t1"] {
        assert!(text.lines().any(|l| l == line), "{line} missing from\n{text}");
    }
}
