//! Compiles `tests/smoke.c` against the generated header and the built
//! dynamic library, then runs it.  Skipped when no C compiler is on PATH.

use std::path::PathBuf;
use std::process::Command;

fn find_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|cand| {
        Command::new(cand)
            .arg("--version")
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false)
    })
}

#[test]
fn c_program_compiles_links_and_runs() {
    let Some(cc) = find_cc() else {
        eprintln!("skipping: no C compiler found");
        return;
    };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let profile_dir = crate_dir.join("../../target").join(profile);
    // `cargo build` hard-links the cdylib into the profile directory, but a
    // bare `cargo test` leaves it only under deps/; accept either, and build
    // it ourselves as a last resort (the outer cargo has released the build
    // lock by the time tests execute).
    let lib_dir = [profile_dir.clone(), profile_dir.join("deps")]
        .into_iter()
        .find(|d| d.join("libcournot_capi.so").exists())
        .unwrap_or_else(|| {
            let mut args = vec!["build", "-p", "cournot-capi"];
            if profile == "release" {
                args.push("--release");
            }
            let build = Command::new(env!("CARGO"))
                .args(&args)
                .current_dir(&crate_dir)
                .output()
                .expect("cargo runs");
            assert!(
                build.status.success(),
                "cargo build failed:\n{}",
                String::from_utf8_lossy(&build.stderr)
            );
            profile_dir.clone()
        });
    assert!(
        lib_dir.join("libcournot_capi.so").exists(),
        "dynamic library missing at {}",
        lib_dir.join("libcournot_capi.so").display()
    );

    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let compile = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Wextra")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/smoke.c"))
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lcournot_capi")
        .arg("-lm")
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("compiler runs");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe)
        .env("LD_LIBRARY_PATH", &lib_dir)
        .output()
        .expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke test exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("C smoke test passed"));
}
