use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Directory holding the built library artifacts (`target/<profile>`).
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(manifest_dir().join("include/bellsim.h")).unwrap();
    for name in [
        "bellsim_version",
        "bellsim_last_error_message",
        "bellsim_state_singlet",
        "bellsim_state_from_amplitudes",
        "bellsim_state_free",
        "bellsim_joint_expectation",
        "bellsim_bell_quantity",
        "bellsim_run_new",
        "bellsim_run_trial",
        "bellsim_run_free",
        "bellsim_coincidence_estimate",
        "bellsim_replica_expectation",
        "bellsim_visibility_bound",
        "typedef struct BellsimState BellsimState",
        "typedef struct BellsimRun BellsimRun",
        "BELLSIM_STATUS_NULL_POINTER = 1",
    ] {
        assert!(header.contains(name), "header is missing {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    // test builds only produce the rlib; build the static library as well
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let built = Command::new(cargo)
        .args(["build", "--quiet", "-p", "bellsim-ffi", "--lib"])
        .current_dir(manifest_dir())
        .status()
        .unwrap();
    assert!(built.success());
    let lib = artifact_dir().join("libbellsim_ffi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(manifest_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("ok"));
}
