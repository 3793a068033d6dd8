use std::path::{Path, PathBuf};
use std::process::Command;

/// Static library built alongside this test. The copy in `deps/` is the one
/// refreshed by `cargo test`; the uplifted one may be stale.
fn static_library() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    [deps, deps.parent().unwrap()].iter().map(|d| d.join("libwpucn_ffi.a")).find(|p| p.exists()).unwrap()
}

#[test]
fn c_program_links_against_header_and_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = static_library();
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("client");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/client.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields[0], "4");
    assert!(fields[1].parse::<f64>().unwrap() > 0.0);
    assert_eq!(fields[2], "1");
}
