//! Golden tests for the command-line interface.
//!
//! Each case in `common::cli_cases` runs the real binary and compares
//! stdout, stderr, and the exit code byte-for-byte against files under
//! `tests/golden/`. To regenerate after an intentional output change:
//!
//! ```text
//! WEFPAY_UPDATE_GOLDENS=1 cargo test -p wefpay --test cli
//! ```

mod common;

#[test]
fn cli_matches_golden_files() {
    let update = std::env::var_os("WEFPAY_UPDATE_GOLDENS").is_some();
    let failures = common::run_cli_cases(update);
    assert!(failures.is_empty(), "{} golden mismatches:\n{}", failures.len(), failures.join("\n"));
    if update {
        // Make an accidental always-update configuration visible: the run
        // that rewrites goldens should not be mistaken for a verification.
        eprintln!("golden files rewritten; rerun without WEFPAY_UPDATE_GOLDENS to verify");
    }
}
