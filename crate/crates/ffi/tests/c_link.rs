//! Compile a small C program against the generated header and the static
//! library, then run it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "fairdiv.h"

int main(void) {
    const double v[] = {10, 0, 0, 10};
    FairdivInstance *inst = NULL;
    if (fairdiv_instance_new(2, 2, v, &inst) != FAIRDIV_STATUS_OK) return 10;
    FairdivAllocation *alloc = NULL;
    if (fairdiv_allocate(inst, FAIRDIV_ALGORITHM_PROPM, &alloc) != FAIRDIV_STATUS_OK) return 11;
    double u[2];
    if (fairdiv_utilities(inst, alloc, u, 2) != FAIRDIV_STATUS_OK) return 12;
    double mms;
    if (fairdiv_mms_exact(inst, 0, &mms) != FAIRDIV_STATUS_OK) return 13;
    if (fairdiv_mms_exact(inst, 5, &mms) != FAIRDIV_STATUS_OUT_OF_RANGE) return 14;
    printf("%g %g %s\n", u[0], u[1], fairdiv_last_error());
    fairdiv_allocation_free(alloc);
    fairdiv_instance_free(inst);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps/
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib_dir = target_dir();
    let staticlib = lib_dir.join("libfairdiv_ffi.a");
    assert!(staticlib.exists(), "missing {}", staticlib.display());
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let work = Path::new(env!("CARGO_TARGET_TMPDIR")).join("c_link");
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("main.c");
    let exe = work.join("main");
    std::fs::write(&src, PROGRAM).unwrap();

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("a C compiler is on PATH");
    assert!(status.success());

    let out = Command::new(&exe).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("10 10 "), "{stdout}");
    assert!(stdout.contains("agent index 5"), "{stdout}");
}
