use std::path::Path;
use std::process::Command;

const PROGRAM: &str = r#"
#include "levelcurve.h"
#include <stdio.h>

int main(void) {
    double outer[32], inner[32];
    for (int j = 0; j < 32; ++j) { outer[j] = 1.0; inner[j] = 0.5; }
    LcProblem *pb = NULL;
    if (lc_problem_new_planar(LC_EQUATION_P_LAPLACE, 2.0, outer, 32, inner, 32, 17, &pb) != LC_STATUS_OK) return 1;
    LcSolution *sol = NULL;
    if (lc_solve(pb, &sol) != LC_STATUS_OK) return 2;
    LcCheckResult r;
    if (lc_solution_check(sol, LC_PROFILE_KIND_MAX_GRAD_OVER_K1, LC_CHECK_KIND_CONVEX, -1e-3, &r) != LC_STATUS_OK) return 3;
    lc_solution_free(sol);
    lc_problem_free(pb);
    if (lc_problem_new_planar(LC_EQUATION_P_LAPLACE, 2.0, inner, 32, outer, 32, 17, &pb) != LC_STATUS_INVALID_PROBLEM) return 4;
    printf("%s %d\n", lc_version(), r.pass);
    return 0;
}
"#;

fn include_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
}

#[test]
fn header_is_current_and_valid_c() {
    let header = std::fs::read_to_string(include_dir().join("levelcurve.h")).unwrap();
    for name in ["lc_problem_new_planar", "lc_solve", "lc_jets_check", "lc_last_error_message", "LC_STATUS_PANIC"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(include_dir().join("levelcurve.h"))
        .output()
        .expect("run cc");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn c_program_links_against_static_library() {
    // target/<profile>/deps/<test> -> target/<profile>/liblevelcurve_ffi.a
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("liblevelcurve_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new("cc")
        .arg("-std=c99")
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .expect("run cc");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), format!("{} 1", env!("CARGO_PKG_VERSION")));
}
