//! Checks the generated header and drives the library from C.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/semuav.h")
}

#[test]
fn header_declares_the_api() {
    let raw = std::fs::read_to_string(header()).unwrap();
    let text = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    for sym in [
        "typedef struct SemParams SemParams;",
        "typedef struct SemSolution SemSolution;",
        "} SemSummary;",
        "SEM_STATUS_OK = 0",
        "SEM_STATUS_INFEASIBLE",
        "SemStatus sem_params_default(SemParams **out);",
        "SemStatus sem_solve(const SemParams *params, const char *scheme, SemSolution **out);",
        "SemStatus sem_solution_summary(const SemSolution *solution, SemSummary *out);",
        "void sem_params_free(SemParams *params);",
        "const char *sem_last_error(void);",
        "SemStatus sem_lambert_wm1(double x, double *out);",
    ] {
        assert!(text.contains(sym), "missing `{sym}`");
    }
}

/// Directory holding the built `libsemuav_ffi.a` (target/<profile>).
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_solves() {
    let lib = lib_dir().join("libsemuav_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("demo.c");
    let bin = dir.path().join("demo");
    std::fs::write(&src, include_str!("../examples/demo.c")).unwrap();
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");
    let out = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "demo failed: {stdout}{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("energy"), "{stdout}");
    assert!(stdout.contains("status 5"), "{stdout}");
}
