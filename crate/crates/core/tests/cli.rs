use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qsim::format::{parse_sparse, read_chunks, ChunkFormat};
use tempfile::TempDir;

fn qsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsim"))
        .args(args)
        .env_remove("QSIM_MAX_EXPLICIT_QUBITS")
        .output()
        .expect("run qsim")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Qubits 1 and 2 start in |1>, so the input is |011>.
const CNOT_011: &str = "qubits 3\ninit 1 0 0 1 0\ninit 2 0 0 1 0\nx 1 c 2\n";

#[test]
fn run_cnot_on_011() {
    let dir = TempDir::new().unwrap();
    let circuit = write(dir.path(), "cnot.qc", CNOT_011);
    let out_path = dir.path().join("out.txt");
    let out = qsim(&["run", "--circuit", s(&circuit), "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    for (i, line) in lines.iter().enumerate() {
        let expected = if i == 0b010 {
            format!("{i} 1 0")
        } else {
            format!("{i} 0 0")
        };
        assert_eq!(*line, expected);
    }
}

#[test]
fn run_empty_circuit_is_input() {
    let dir = TempDir::new().unwrap();
    let circuit = write(
        dir.path(),
        "empty.qc",
        "qubits 2\ninit 1 0.6 0 0 0.8\ninit 2 0 0 1 0\n",
    );
    let out = qsim(&[
        "run",
        "--circuit",
        s(&circuit),
        "--chunk-size",
        "1",
        "--workers",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0 0 0\n1 0 0\n2 0.6 0\n3 0 0.8\n");
}

#[test]
fn run_partial_range_binary() {
    let dir = TempDir::new().unwrap();
    let circuit = write(
        dir.path(),
        "big.qc",
        "qubits 40\ninit 21 0.6 0 0.8 0\nx 3 c 21\nswap 1 40\n",
    );
    let out_path = dir.path().join("out.bin");
    let out = qsim(&[
        "run",
        "--circuit",
        s(&circuit),
        "--start",
        "1048576",
        "--len",
        "1024",
        "--chunk-size",
        "256",
        "--format",
        "binary",
        "--out",
        s(&out_path),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bytes = fs::read(&out_path).unwrap();
    assert_eq!(bytes.len(), 4 * 16 + 1024 * 16);
    let chunks = read_chunks(&bytes[..], ChunkFormat::Binary).unwrap();
    assert_eq!(
        chunks.iter().map(|c| c.start).collect::<Vec<_>>(),
        vec![1048576, 1048832, 1049088, 1049344]
    );
    // Index 2^20 + 4 has bit 21 and bit 3 set; its source is 2^20, amplitude 0.8.
    assert_eq!(chunks[0].amps[4].re, 0.8);
    assert_eq!(chunks[0].amps[0].re, 0.0);
}

#[test]
fn run_post_report() {
    let dir = TempDir::new().unwrap();
    let circuit = write(dir.path(), "cnot.qc", CNOT_011);
    let out = qsim(&[
        "run",
        "--circuit",
        s(&circuit),
        "--post",
        "--top-k",
        "1",
        "--report-format",
        "kv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("total=1\n"));
    assert!(text.contains("top.0=2:1\n"));
    assert!(text.contains("marginal.1=0\nmarginal.2=1\nmarginal.3=0\n"));
}

#[test]
fn run_errors() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.qc", "qubits 2\nx 3\n");
    let out = qsim(&["run", "--circuit", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let good = write(dir.path(), "good.qc", "qubits 2\n");
    assert_eq!(
        qsim(&["run", "--circuit", s(&good), "--start", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qsim(&["run", "--circuit", s(&good), "--start", "2", "--len", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qsim(&["run", "--circuit", s(&good), "--chunk-size", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(qsim(&["run"]).status.code(), Some(1));
    assert_eq!(
        qsim(&["run", "--circuit", "/nonexistent/x.qc"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qsim(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qsim(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_to_unwritable_output_is_runtime_failure() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "good.qc", "qubits 2\n");
    let out = qsim(&[
        "run",
        "--circuit",
        s(&good),
        "--out",
        "/nonexistent/dir/out.txt",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compile_cnot_is_self_transpose() {
    let dir = TempDir::new().unwrap();
    let circuit = write(dir.path(), "cnot.qc", "qubits 3\nx 1 c 2\n");
    let sparse = dir.path().join("cnot.sparse");
    let out = qsim(&["compile", "--circuit", s(&circuit), "--out", s(&sparse)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("unitary: yes"));
    let u = parse_sparse(fs::read(&sparse).unwrap().as_slice()).unwrap();
    assert_eq!(u.dim(), 8);
    assert!(u.is_symmetric());
}

#[test]
fn compile_example_matrix_circuit() {
    let dir = TempDir::new().unwrap();
    let circuit = write(
        dir.path(),
        "ex.qc",
        "qubits 2\nx 1 c 2\nx 2\nswap 1 2\ncphase pi c 1 2\n",
    );
    let sparse = dir.path().join("ex.sparse");
    let out = qsim(&["compile", "--circuit", s(&circuit), "--out", s(&sparse)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&sparse).unwrap(),
        "sparse-u v1 dim=4\n0 3 1 0\n1 0 1 0\n2 2 1 0\n3 1 -1 0\n"
    );
    let verify = qsim(&["verify", "--sparse", s(&sparse)]);
    assert_eq!(verify.status.code(), Some(0));
}

#[test]
fn compile_cap() {
    let dir = TempDir::new().unwrap();
    let circuit = write(dir.path(), "big.qc", "qubits 27\nx 1\n");
    let sparse = dir.path().join("big.sparse");
    let out = qsim(&["compile", "--circuit", s(&circuit), "--out", s(&sparse)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("qsim run"));

    let small = write(dir.path(), "small.qc", "qubits 5\n");
    let capped = qsim(&[
        "compile",
        "--circuit",
        s(&small),
        "--out",
        s(&sparse),
        "--max-qubits",
        "4",
    ]);
    assert_eq!(capped.status.code(), Some(2));
    let env = Command::new(env!("CARGO_BIN_EXE_qsim"))
        .args(["compile", "--circuit", s(&small), "--out", s(&sparse)])
        .env("QSIM_MAX_EXPLICIT_QUBITS", "4")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
}

#[test]
fn verify_circuit_against_dense() {
    let dir = TempDir::new().unwrap();
    let text = "qubits 6\ninit 2 0.6 0 0 0.8\ninit 5 0 1 0 0\nx 1 c 2 3\ncphase 0.3 c 4\nswap 2 6\nx 6\ncphase pi c 1 6\nx 4 c 6\n";
    let circuit = write(dir.path(), "r.qc", text);
    let out = qsim(&["verify", "--circuit", s(&circuit), "--against-dense"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = stdout(&out);
    assert!(report.contains("PASS dense state oracle"));
    assert!(!report.contains("FAIL"));

    let wide = write(dir.path(), "wide.qc", "qubits 11\n");
    assert_eq!(
        qsim(&["verify", "--circuit", s(&wide), "--against-dense"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_corrupted_sparse() {
    let dir = TempDir::new().unwrap();
    let sparse = write(
        dir.path(),
        "bad.sparse",
        "sparse-u v1 dim=4\n0 3 1 0\n1 0 1 0\n2 3 1 0\n3 1 -1 0\n",
    );
    let out = qsim(&["verify", "--sparse", s(&sparse)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL bijectivity"));
}

#[test]
fn verify_needs_one_source() {
    assert_eq!(qsim(&["verify"]).status.code(), Some(1));
}

#[test]
fn bench_single_row() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("b.csv");
    let out = qsim(&[
        "bench",
        "--min-qubits",
        "4",
        "--max-qubits",
        "4",
        "--repeats",
        "1",
        "--csv",
        s(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "M,steps,W,chunk,seconds,growth,output_hash");
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1].split(',').nth(5), Some(""));
}

#[test]
fn bench_hash_reproducible() {
    let hashes = |workers: &str| {
        let out = qsim(&[
            "bench",
            "--min-qubits",
            "6",
            "--max-qubits",
            "8",
            "--repeats",
            "1",
            "--workers",
            workers,
            "--seed",
            "42",
        ]);
        assert_eq!(out.status.code(), Some(0));
        stdout(&out)
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    let first = hashes("1");
    assert_eq!(first.len(), 3);
    assert_eq!(first, hashes("1"));
    assert_eq!(first, hashes("4"));
}

#[test]
fn bench_invalid_range() {
    assert_eq!(
        qsim(&["bench", "--min-qubits", "5", "--max-qubits", "4"])
            .status
            .code(),
        Some(1)
    );
}
