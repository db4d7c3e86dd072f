//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion. Exits 1 if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use laplace_growth_cli::reproduce::{self, Check};
use laplace_growth_cli::RunConfig;

/// Criterion number, description and the `reproduce` checks that decide it.
const CRITERIA: [(u32, &str, &[&str]); 9] = [
    (1, "counting function n(2^k)/2^k", &["counting"]),
    (
        2,
        "counting bound on the sparse windows",
        &["counting-sparse"],
    ),
    (3, "reciprocal sums", &["reciprocal-sums"]),
    (4, "product oracle equivalence", &["product-oracle"]),
    (
        5,
        "Borel inversion and radius deformation",
        &["borel-inversion", "deformation"],
    ),
    (6, "splitting identity F + u = f", &["splitting"]),
    (7, "decay and size of u", &["u-decay", "u-origin"]),
    (
        8,
        "irregular growth of f, regular controls",
        &["f-irregular", "exp_2z-regular", "sin_2z-regular"],
    ),
    (
        9,
        "type bound, limsup and window minima",
        &["type-bound", "type-limsup", "type-liminf"],
    ),
];

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("artifact dir")
        .map(|e| {
            let e = e.expect("dir entry");
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).expect("artifact"),
            )
        })
        .collect()
}

fn main() -> ExitCode {
    let first = tempfile::tempdir().expect("temp dir");
    let second = tempfile::tempdir().expect("temp dir");
    let config = |dir: &Path| RunConfig {
        out_dir: Some(dir.to_path_buf()),
        emit_svg: true,
        ..RunConfig::default()
    };

    let start = Instant::now();
    let outcome = match reproduce::run(&config(first.path())) {
        Ok(o) => o,
        Err(e) => {
            println!("FAIL  reproduce did not complete: {e}");
            return ExitCode::FAILURE;
        }
    };
    let elapsed = start.elapsed();
    let by_id: BTreeMap<&str, &Check> = outcome.checks.iter().map(|c| (c.id, c)).collect();

    let mut all = true;
    for (n, title, ids) in CRITERIA {
        let checks: Vec<&Check> = ids.iter().map(|id| by_id[id]).collect();
        let passed = checks.iter().all(|c| c.passed);
        all &= passed;
        let detail: Vec<String> = checks
            .iter()
            .map(|c| format!("{}: {} (threshold {})", c.id, c.measured, c.threshold))
            .collect();
        println!(
            "{}  criterion {n:>2}: {title}; {}",
            if passed { "PASS" } else { "FAIL" },
            detail.join("; ")
        );
    }

    let rerun = reproduce::run(&config(second.path()));
    let (a, b) = (read_dir(first.path()), read_dir(second.path()));
    let differing: Vec<&String> = a
        .keys()
        .chain(b.keys())
        .filter(|k| a.get(*k) != b.get(*k))
        .collect();
    let deterministic = rerun.is_ok() && differing.is_empty();
    all &= deterministic;
    println!(
        "{}  criterion 10: determinism; {} artifacts compared byte for byte, {} differ{}",
        if deterministic { "PASS" } else { "FAIL" },
        a.len(),
        differing.len(),
        if differing.is_empty() {
            String::new()
        } else {
            format!(" ({:?})", differing)
        }
    );
    println!("first reproduce run took {:.1} s", elapsed.as_secs_f64());

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
