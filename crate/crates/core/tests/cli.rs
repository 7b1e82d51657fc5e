use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn tripoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripoint"))
        .args(args)
        .env_remove("TRIPOINT_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tripoint-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn energy_of_rhombic7() {
    let o = tripoint(&[
        "energy",
        "--code",
        "rhombic7",
        "--f",
        "t",
        "--convention",
        "hat",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "14/3");
}

#[test]
fn orthoplex_sharp_for_antipodal22() {
    let o = tripoint(&["orthoplex", "--code", "antipodal22_S3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("sharp at 1/2"), "{}", stdout(&o));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let o = tripoint(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tripoint(&["energy", "--code", "nonexistent", "--f", "t"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn every_command_has_help() {
    let cmds: &[&[&str]] = &[
        &[],
        &["energy"],
        &["codes"],
        &["codes", "list"],
        &["codes", "show"],
        &["codes", "verify"],
        &["design"],
        &["orthoplex"],
        &["basis"],
        &["bound"],
        &["bound", "two-point"],
        &["bound", "build"],
        &["bound", "solve"],
        &["bound", "solve-sdpa"],
        &["bound", "round"],
        &["bound", "certify"],
        &["bound", "uniqueness"],
        &["prove-universal"],
    ];
    for c in cmds {
        let mut args = c.to_vec();
        args.push("--help");
        let o = tripoint(&args);
        assert!(o.status.success(), "{c:?}");
        assert!(stdout(&o).contains("Usage"), "{c:?}");
    }
}

#[test]
fn code_files_are_accepted() {
    let o = tripoint(&["codes", "show", "icosa6"]);
    assert!(o.status.success());
    let path = scratch("icosa6.code");
    fs::write(&path, &o.stdout).unwrap();
    let p = path.to_str().unwrap();
    let o = tripoint(&["codes", "verify", p]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("identity"));
    let o = tripoint(&["design", "--code", p]);
    assert!(stdout(&o).contains("2-design"));
}

#[test]
fn basis_of_rhombic7() {
    let o = tripoint(&["basis", "--code", "rhombic7"]);
    let s = stdout(&o);
    assert!(s.contains("multiset: 0 (x3), 1/9 (x2), 1/3 (x2)"), "{s}");
    assert!(
        s.contains("f_6(t) = -1/243*t^3 + 7/81*t^4 - 5/9*t^5 + t^6"),
        "{s}"
    );
}

#[test]
fn two_point_bound() {
    let o = tripoint(&[
        "bound",
        "two-point",
        "--n-points",
        "7",
        "--n",
        "3",
        "--f",
        "t",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("bound: 14/3"));
}

#[test]
fn build_solve_round_certify() {
    let prog = scratch("p2.json");
    let sol = scratch("s2.json");
    let cert = scratch("c2.json");
    let [prog_s, sol_s, cert_s] = [&prog, &sol, &cert].map(|p| p.to_str().unwrap().to_string());
    let o = tripoint(&[
        "bound", "build", "--code", "rhombic7", "--f", "t^2", "--out", &prog_s,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read(&prog).unwrap();
    tripoint(&[
        "bound", "build", "--code", "rhombic7", "--f", "t^2", "--out", &prog_s,
    ]);
    assert_eq!(
        first,
        fs::read(&prog).unwrap(),
        "program output is not byte-stable"
    );

    let o = tripoint(&[
        "bound",
        "solve",
        "--program",
        &prog_s,
        "--precision",
        "53",
        "--out",
        &sol_s,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = tripoint(&[
        "bound",
        "round",
        "--program",
        &prog_s,
        "--solution",
        &sol_s,
        "--out",
        &cert_s,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = tripoint(&[
        "bound",
        "certify",
        "--cert",
        &cert_s,
        "--program",
        &prog_s,
        "--target",
        "38/27",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("sharp: true"));

    let o = tripoint(&[
        "bound",
        "certify",
        "--cert",
        &cert_s,
        "--program",
        &prog_s,
        "--target",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = tripoint(&[
        "bound",
        "uniqueness",
        "--cert",
        &cert_s,
        "--program",
        &prog_s,
    ]);
    assert!(
        stdout(&o).contains("counts: (6, 24, 36, 72, 72)"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn prove_universal_rhombic7() {
    let o = Command::new(env!("CARGO_BIN_EXE_tripoint"))
        .args(["prove-universal", "--code", "rhombic7"])
        .env("TRIPOINT_PRECISION", "53")
        .output()
        .unwrap();
    let s = stdout(&o);
    assert!(o.status.success(), "{s}");
    assert_eq!(s.matches("potential ").count(), 7, "{s}");
    assert!(s.contains("universal optimality certified"));
}
