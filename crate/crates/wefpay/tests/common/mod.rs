//! Helpers shared by the integration test targets: a deterministic stream
//! of random feasible (instance, allocation) pairs, and the CLI golden-file
//! runner used by both the `cli` target and the acceptance gate.
//!
//! Not every target uses every helper.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use wefpay::fixtures::{gen_random_pair, Lcg, WeightMode};
use wefpay::io::Document;
use wefpay::model::{Allocation, Instance, Rational};

/// `count` seeded random feasible pairs with 2..=`max_agents` agents and
/// 0..=`max_items` items. `tag` decorrelates streams across tests;
/// `mix_weights` alternates equal and drawn entitlements.
pub fn random_feasible_pairs(
    tag: u64,
    count: usize,
    max_agents: usize,
    max_items: usize,
    mix_weights: bool,
) -> Vec<(Instance, Allocation)> {
    let mut meta = Lcg::new(tag);
    (0..count)
        .map(|k| {
            let n = 2 + meta.below(max_agents as u64 - 1) as usize;
            let m = meta.below(max_items as u64 + 1) as usize;
            let mode = if mix_weights && meta.below(2) == 1 {
                WeightMode::IntegerRange
            } else {
                WeightMode::Equal
            };
            gen_random_pair(tag ^ (k as u64).wrapping_mul(0x9E3779B97F4A7C15), n, m, 12, mode)
                .expect("a feasible allocation is drawn within the attempt budget")
        })
        .collect()
}

/// One CLI invocation checked against frozen golden files. `{dir}` in an
/// argument expands to the scratch directory holding the input files.
pub struct CliCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub fn cli_cases() -> Vec<CliCase> {
    vec![
        // Generated files, one per family.
        CliCase { name: "gen_two_agent_transfer", args: &["gen", "--family", "two-agent-transfer"], exit: 0 },
        CliCase { name: "gen_single_prize", args: &["gen", "--family", "single-prize", "--n", "3", "--t", "6"], exit: 0 },
        CliCase { name: "gen_weighted_prize", args: &["gen", "--family", "weighted-prize", "--weights", "1,2,3", "--t", "5"], exit: 0 },
        CliCase { name: "gen_missing_one", args: &["gen", "--family", "missing-one", "--n", "3", "--t", "2"], exit: 0 },
        CliCase { name: "gen_half_prizes", args: &["gen", "--family", "half-prizes", "--n", "4", "--t", "8"], exit: 0 },
        CliCase { name: "gen_inflated_prizes", args: &["gen", "--family", "inflated-prizes", "--n", "3", "--t", "8"], exit: 0 },
        CliCase { name: "gen_random", args: &["gen", "--family", "random", "--seed", "7", "--n", "3", "--m", "3", "--max-value", "10", "--weight-mode", "integer-range"], exit: 0 },
        CliCase { name: "gen_unknown_family", args: &["gen", "--family", "nope"], exit: 2 },
        // Checking.
        CliCase { name: "check_wef_yes", args: &["check", "{dir}/intro.json", "--payments", "15,-15"], exit: 0 },
        CliCase { name: "check_wef_boundary", args: &["check", "{dir}/intro.json", "--payments", "10,-10"], exit: 0 },
        CliCase { name: "check_wef_no", args: &["check", "{dir}/intro.json", "--payments", "0,0"], exit: 1 },
        CliCase { name: "check_missing_payments", args: &["check", "{dir}/intro.json"], exit: 2 },
        // Minimal subsidy.
        CliCase { name: "subsidy_text", args: &["subsidy", "{dir}/prize3.json"], exit: 0 },
        CliCase { name: "subsidy_json", args: &["subsidy", "{dir}/prize3.json", "--json"], exit: 0 },
        // Optimization on the file's allocation.
        CliCase { name: "opt_p2_text", args: &["opt", "{dir}/prize3.json", "--objective", "P2"], exit: 0 },
        CliCase { name: "opt_p3max_json", args: &["opt", "{dir}/intro.json", "--objective", "P3max", "--json"], exit: 0 },
        CliCase { name: "opt_p4_half", args: &["opt", "{dir}/half4.json", "--objective", "P4"], exit: 0 },
        CliCase { name: "opt_p3norm_weighted", args: &["opt", "{dir}/wprize.json", "--objective", "P3norm"], exit: 0 },
        CliCase { name: "opt_infeasible", args: &["opt", "{dir}/infeasible.json", "--objective", "P2"], exit: 1 },
        // Exhaustive search.
        CliCase { name: "search_p1_missing", args: &["search", "{dir}/missing3.json", "--objective", "P1"], exit: 0 },
        CliCase { name: "search_p2_json", args: &["search", "{dir}/intro.json", "--objective", "P2", "--json"], exit: 0 },
        CliCase { name: "search_too_large", args: &["search", "{dir}/toolarge.json", "--objective", "P2"], exit: 2 },
        // Transforms.
        CliCase { name: "transform_balance", args: &["transform", "{dir}/intro.json", "--kind", "balance", "--payments", "20,0"], exit: 0 },
        CliCase { name: "transform_to_subsidy", args: &["transform", "{dir}/intro.json", "--kind", "to-subsidy", "--payments", "10,-10"], exit: 0 },
        CliCase { name: "transform_slide", args: &["transform", "{dir}/intro.json", "--kind", "slide", "--z", "5", "--payments", "20,0"], exit: 0 },
        CliCase { name: "transform_normalize", args: &["transform", "{dir}/intro.json", "--kind", "normalize", "--payments", "25,5"], exit: 0 },
        CliCase { name: "transform_not_balanced", args: &["transform", "{dir}/intro.json", "--kind", "to-subsidy", "--payments", "20,0"], exit: 1 },
        // Provable bounds.
        CliCase { name: "bounds_prize3", args: &["bounds", "{dir}/prize3.json"], exit: 0 },
        CliCase { name: "bounds_weighted", args: &["bounds", "{dir}/wprize.json"], exit: 0 },
    ]
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_wefpay")
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Writes every input file the golden cases reference into `dir`. The
/// family files come from the binary itself so the goldens cover the
/// `--out` path too; the degenerate inputs come from the library.
pub fn prepare_inputs(dir: &Path) {
    let families: &[(&str, &[&str])] = &[
        ("intro.json", &["gen", "--family", "two-agent-transfer"]),
        ("prize3.json", &["gen", "--family", "single-prize", "--n", "3", "--t", "6"]),
        ("wprize.json", &["gen", "--family", "weighted-prize", "--weights", "1,2,3", "--t", "5"]),
        ("missing3.json", &["gen", "--family", "missing-one", "--n", "3", "--t", "2"]),
        ("half4.json", &["gen", "--family", "half-prizes", "--n", "4", "--t", "8"]),
    ];
    for (file, args) in families {
        let out = dir.join(file);
        let status = Command::new(bin())
            .args(*args)
            .arg("--out")
            .arg(&out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "generating {}", file);
    }

    // The one-item instance where the low-value agent keeps the item: no
    // payments can fix that.
    let infeasible = Document::new(
        Instance::new(
            vec![Rational::from_integer(1.into()); 2],
            vec![
                vec![Rational::from_integer(20.into())],
                vec![Rational::from_integer(30.into())],
            ],
        )
        .unwrap(),
        Some(Allocation::new(vec![0], 2).unwrap()),
        None,
        Default::default(),
    )
    .unwrap();
    fs::write(dir.join("infeasible.json"), infeasible.to_json_string()).unwrap();

    // 6^12 allocations: beyond the search guard.
    let toolarge = Document::new(
        Instance::new(
            vec![Rational::from_integer(1.into()); 6],
            vec![vec![Rational::from_integer(1.into()); 12]; 6],
        )
        .unwrap(),
        None,
        None,
        Default::default(),
    )
    .unwrap();
    fs::write(dir.join("toolarge.json"), toolarge.to_json_string()).unwrap();
}

fn read_or_empty(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_default()
}

/// Runs every golden case; returns human-readable mismatch descriptions.
/// With `update` set, rewrites the golden files instead and returns empty.
pub fn run_cli_cases(update: bool) -> Vec<String> {
    let scratch = std::env::temp_dir().join(format!("wefpay-golden-{}", std::process::id()));
    fs::create_dir_all(&scratch).unwrap();
    prepare_inputs(&scratch);
    let dir_text = scratch.to_str().expect("scratch path is valid UTF-8").to_string();
    let golden = golden_dir();
    if update {
        fs::create_dir_all(&golden).unwrap();
    }

    let mut failures = Vec::new();
    for case in cli_cases() {
        let args: Vec<String> =
            case.args.iter().map(|a| a.replace("{dir}", &dir_text)).collect();
        let output = Command::new(bin()).args(&args).output().expect("binary runs");
        let stdout = String::from_utf8(output.stdout).expect("stdout is UTF-8");
        let stderr_raw = String::from_utf8(output.stderr).expect("stderr is UTF-8");
        // Scratch paths differ per run; normalize them out of diagnostics.
        let stderr = stderr_raw.replace(&dir_text, "{dir}");
        let code = output.status.code().expect("no signal");

        let stdout_path = golden.join(format!("{}.stdout", case.name));
        let stderr_path = golden.join(format!("{}.stderr", case.name));
        if update {
            fs::write(&stdout_path, &stdout).unwrap();
            if stderr.is_empty() {
                let _ = fs::remove_file(&stderr_path);
            } else {
                fs::write(&stderr_path, &stderr).unwrap();
            }
        } else {
            if code != case.exit {
                failures.push(format!(
                    "{}: exit {} (expected {}); stderr: {}",
                    case.name, code, case.exit, stderr
                ));
            }
            let want_stdout = read_or_empty(&stdout_path);
            if stdout != want_stdout {
                failures.push(format!(
                    "{}: stdout mismatch\n--- got ---\n{}\n--- want ---\n{}",
                    case.name, stdout, want_stdout
                ));
            }
            let want_stderr = read_or_empty(&stderr_path);
            if stderr != want_stderr {
                failures.push(format!(
                    "{}: stderr mismatch\n--- got ---\n{}\n--- want ---\n{}",
                    case.name, stderr, want_stderr
                ));
            }
        }
        if code != case.exit && update {
            failures.push(format!(
                "{}: exit {} (expected {}) while updating goldens",
                case.name, code, case.exit
            ));
        }
    }
    let _ = fs::remove_dir_all(&scratch);
    failures
}
