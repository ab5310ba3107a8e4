use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn fairdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairdiv"))
        .args(args)
        .env_remove("MATROID_FAIRDIV_MAX_BRUTE")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn solve_exit_codes() {
    let ok = fairdiv(&[
        "solve",
        "--fairness",
        "mms",
        "--input",
        &fixture("ef1-not-pmms.json"),
        "--verify",
    ]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("welfare: 6"));

    let capability = fairdiv(&[
        "solve",
        "--fairness",
        "pmms",
        "--input",
        &fixture("xos-4.json"),
    ]);
    assert_eq!(code(&capability), 2);

    let usage = fairdiv(&["solve", "--input", &fixture("ef1-not-pmms.json")]);
    assert_eq!(code(&usage), 1);
}

#[test]
fn brute_force_cap_from_environment() {
    let capped = Command::new(env!("CARGO_BIN_EXE_fairdiv"))
        .args(["certify-no-mms", "--input", &fixture("xos-4.json")])
        .env("MATROID_FAIRDIV_MAX_BRUTE", "3")
        .output()
        .unwrap();
    assert_eq!(
        code(&capped),
        2,
        "{}",
        String::from_utf8_lossy(&capped.stderr)
    );
    let ok = fairdiv(&["certify-no-mms", "--input", &fixture("xos-4.json")]);
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("no MMS allocation exists"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "solve",
        "--fairness",
        "pmms",
        "--input",
        &fixture("ef1-not-pmms.json"),
        "--json",
    ];
    let (a, b) = (fairdiv(&args), fairdiv(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}
