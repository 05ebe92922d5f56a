//! Compiles a C program against the generated header and links it with the
//! static library.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let profile_dir = deps.parent().unwrap();
    let lib = profile_dir.join("libpathrule_ffi.a");
    assert!(lib.is_file(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests").join("c_smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());

    let train = dir.path().join("train.txt");
    std::fs::write(
        &train,
        "p0\tparent\tc0\nc0\tparent\tg0\np0\tgrand\tg0\np1\tparent\tc1\nc1\tparent\tg1\np1\tgrand\tg1\np2\tparent\tc2\nc2\tparent\tg2\n",
    )
    .unwrap();
    let out = Command::new(&exe).arg(&train).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "g2 1.000\n");
}
