//! Acceptance gate: every numbered criterion below prints a single
//! PASS/FAIL line; the test fails if any criterion fails. Criteria 1-9
//! run the library verification suites with their pinned tolerances;
//! criterion 10 exercises the command-line binary for determinism.

use e1lab::check::{self, CheckResult};
use std::process::Command;

fn criterion(n: usize, title: &str, results: Vec<CheckResult>) -> bool {
    let passed = results.iter().all(|r| r.passed);
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("{tag} criterion {n}: {title}");
    for r in results.iter().filter(|r| !r.passed) {
        println!("     failed sub-check: {} - {}", r.name, r.detail);
    }
    passed
}

fn run_binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_e1lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn determinism_criterion() -> bool {
    let mut ok = true;
    let mut notes = Vec::new();

    let out = run_binary(&["check", "--all"]);
    if !out.status.success() {
        ok = false;
        notes.push(format!(
            "`check --all` exited with {:?}:\n{}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout)
        ));
    }

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = run_binary(&[
            "rotsym",
            "figures",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        if !out.status.success() {
            ok = false;
            notes.push(format!("`rotsym figures` failed: {:?}", out.status.code()));
        }
        let out = run_binary(&[
            "secondvar",
            "--lmax",
            "6",
            "--out",
            dir.path().join("spectrum.csv").to_str().unwrap(),
        ]);
        if !out.status.success() {
            ok = false;
            notes.push(format!("`secondvar` failed: {:?}", out.status.code()));
        }
    }
    for name in [
        "profile_parabola.csv",
        "profile_type1.csv",
        "profile_type2.csv",
        "spectrum.csv",
    ] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap_or_default();
        let b = std::fs::read(dir_b.path().join(name)).unwrap_or_default();
        if a.is_empty() || a != b {
            ok = false;
            notes.push(format!("{name} differs between identical runs"));
        }
    }

    let tag = if ok { "PASS" } else { "FAIL" };
    println!("{tag} criterion 10: repeated runs are bit-identical and `check --all` passes");
    for n in notes {
        println!("     {n}");
    }
    ok
}

#[test]
fn acceptance() {
    let mut all = true;
    all &= criterion(
        1,
        "uniform hyperbolicity witness (disc = -1/4 to 1e-12 on 10^4 jets)",
        check::suite_hyperbolicity(),
    );
    all &= criterion(
        2,
        "closed-form det/inverse/A^-1 B match LU to 1e-10 on 10^4 states",
        check::suite_linalg(),
    );
    all &= criterion(
        3,
        "eigen-system residuals below 1e-9",
        check::suite_eigen(),
    );
    all &= criterion(
        4,
        "closed-form surfaces solve the graph equation; FD jets converge at order >= 1.8",
        check::suite_exact_surfaces(),
    );
    all &= criterion(
        5,
        "profile RK4 at order >= 3.7, error < 1e-8 at h = 1e-3, sphere equation to 1e-7",
        check::suite_ode(),
    );
    all &= criterion(
        6,
        "gluing curvatures match FD to 1e-5 and their ratio is 7 + 4 sqrt(3) to 1e-8",
        check::suite_gluing(),
    );
    all &= criterion(
        7,
        "march orders >= 1.8 (Lax-Wendroff) / >= 0.9 (upwind), linear response to data",
        check::suite_march(),
    );
    all &= criterion(
        8,
        "second variation: both forms agree to 1e-10, Hcr = 1/2, single critical radius",
        check::suite_secondvar(),
    );
    all &= criterion(
        9,
        "patch energy dilation-invariant to 1e-6 for lambda in {1/2, 2, 4}",
        check::suite_dilation(),
    );
    all &= determinism_criterion();
    assert!(all, "at least one acceptance criterion failed");
}
