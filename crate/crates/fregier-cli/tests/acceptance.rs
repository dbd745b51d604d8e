//! Acceptance check for the command-line contract: every subcommand runs on
//! its documented example with the documented exit code, and all outputs are
//! byte-stable across repeated runs.

use std::process::{Command, Output};

/// Writes straight to the process stdout (fd 1), bypassing the harness's
/// per-test output capture, so the summary line is always visible.
fn report(line: String) {
    #[cfg(unix)]
    {
        use std::io::Write;
        use std::mem::ManuallyDrop;
        use std::os::unix::io::FromRawFd;
        let mut out = ManuallyDrop::new(unsafe { std::fs::File::from_raw_fd(1) });
        let _ = writeln!(out, "{line}");
    }
    #[cfg(not(unix))]
    println!("{line}");
}

fn criterion<F>(n: u32, title: &str, body: F)
where
    F: FnOnce() + std::panic::UnwindSafe,
{
    let outcome = std::panic::catch_unwind(body);
    let verdict = if outcome.is_ok() { "pass" } else { "FAIL" };
    report(format!("criterion {n:>2} ({title}): {verdict}"));
    if let Err(payload) = outcome {
        std::panic::resume_unwind(payload);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fregier"))
        .args(args)
        .env_remove("FREGIER_TOLERANCE")
        .output()
        .expect("failed to spawn fregier binary")
}

/// Runs the same invocation twice, checks the exit code both times, and
/// checks that stdout and stderr are byte-identical between the runs.
fn stable_run(args: &[&str], code: i32) -> Output {
    let first = run(args);
    let second = run(args);
    assert_eq!(
        first.status.code(),
        Some(code),
        "{args:?}: stdout {} stderr {}",
        String::from_utf8_lossy(&first.stdout),
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(second.status.code(), Some(code), "{args:?} (second run)");
    assert_eq!(first.stdout, second.stdout, "{args:?}: stdout not byte-stable");
    assert_eq!(first.stderr, second.stderr, "{args:?}: stderr not byte-stable");
    first
}

#[test]
fn criterion_12_cli_contract() {
    criterion(12, "CLI contract", || {
        // point: Frégier point of the unit circle seen from (1, 1, 0).
        let out = stable_run(
            &["point", "--geometry", "euclidean", "--conic", "-1,1,1,0,0,0", "--point", "1,1,0"],
            0,
        );
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["on_normal"], serde_json::Value::Bool(true));
        assert_eq!(v["methods_agree"], serde_json::Value::Bool(true));

        // locus: fitted locus of a family member against its closed form.
        let out = stable_run(&["locus", "--family", "hy_horocycle", "--params", "lambda=1"], 0);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["match"], serde_json::Value::Bool(true));

        // locus: degenerate shapes are reported, not silently fitted.
        let out = stable_run(&["locus", "--geometry", "euclidean", "--conic", "-1,1,1,0,0,0"], 0);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["singular"]["kind"].as_str(), Some("point"));

        // classify: pencil class with the absolute of the ambient geometry.
        let out = stable_run(&["classify", "--geometry", "hyperbolic", "--conic", "1,-1,-2,0,0,0"], 0);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["class"].as_str(), Some("bitangent"));

        // scan: CSV sweep with a root summary on stderr.
        let out = stable_run(
            &["scan", "--family", "hy_general", "--params", "a=2", "--sweep", "b:0.05:3:0.001"],
            0,
        );
        assert!(out.stdout.starts_with(b"param,det,singular\n"));
        assert!(String::from_utf8_lossy(&out.stderr).contains("# 2 roots"));

        // render: SVG scene, byte-stable across two runs.
        let dir = tempfile::tempdir().unwrap();
        let mut files = Vec::new();
        for name in ["a.svg", "b.svg"] {
            let path = dir.path().join(name);
            let out = run(&[
                "render", "--out", path.to_str().unwrap(), "--geometry", "hyperbolic",
                "--conic", "-1,1,2,0,0,0", "--show-absolute", "--show-locus", "--triangles", "3",
            ]);
            assert_eq!(out.status.code(), Some(0));
            files.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(files[0], files[1], "render not byte-stable");

        // Documented failure exit codes: 2 input/domain, 3 instability, 4 I/O.
        stable_run(
            &["classify", "--geometry", "euclidean", "--conic", "-1,1,1,0,0,0"],
            2,
        );
        stable_run(&["locus", "--geometry", "euclidean", "--conic", "-1,1,-1.001,0,0,0"], 3);
        stable_run(
            &["render", "--out", "/nonexistent-dir/x.svg", "--geometry", "euclidean", "--conic", "-1,1,1,0,0,0"],
            4,
        );
    });
}
