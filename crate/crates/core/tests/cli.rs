mod common;

use std::process::Command;

use common::*;

fn cli(fx: &Fixture) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_deeplinker"));
    let state = fx.tmp.path().join("state");
    c.arg("--root")
        .arg(fx.root())
        .arg("--upload-dir")
        .arg(state.join("uploads"))
        .arg("--cache-dir")
        .arg(state.join("cache"))
        .arg("--journal")
        .arg(state.join("annotations.nt"))
        .env_remove("RUST_LOG");
    c
}

#[test]
fn resolve_prints_representation() {
    let fx = Fixture::new();
    let out = cli(&fx)
        .args(["--resolve", THIRD_LINE, "--accept", "application/json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["text"], "line three");

    let out = cli(&fx).args(["--resolve", W3C_PARTICIPATE]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("Participate"));
}

#[test]
fn exit_codes() {
    let fx = Fixture::new();
    let out = cli(&fx).args(["--resolve", "/filesystem/nosuch.txt"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(env!("CARGO_BIN_EXE_deeplinker"))
        .args(["--root", "/definitely/not/here", "--resolve", "/"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));

    let out = Command::new(env!("CARGO_BIN_EXE_deeplinker"))
        .args(["--port", "seventy"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = cli(&fx).args(["--port", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_deeplinker"))
        .env_remove("DEEPLINKER_ROOT")
        .args(["--resolve", "/"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bind_failure_exits_nonzero() {
    let fx = Fixture::new();
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let out = cli(&fx).args(["--port", &port]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot listen"));
}

#[test]
fn environment_then_flags() {
    let fx = Fixture::new();
    let out = Command::new(env!("CARGO_BIN_EXE_deeplinker"))
        .env("DEEPLINKER_ROOT", fx.root())
        .env("DEEPLINKER_JOURNAL", fx.tmp.path().join("j.nt"))
        .env("DEEPLINKER_CACHE_DIR", fx.tmp.path().join("state").join("cache"))
        .env("DEEPLINKER_UPLOAD_DIR", fx.tmp.path().join("u"))
        .args(["--resolve", W3C_PARTICIPATE, "--accept", "application/json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = Command::new(env!("CARGO_BIN_EXE_deeplinker"))
        .env("DEEPLINKER_ROOT", fx.root())
        .env("DEEPLINKER_CACHE_DIR", fx.tmp.path().join("empty-cache"))
        .env("DEEPLINKER_JOURNAL", fx.tmp.path().join("j.nt"))
        .env("DEEPLINKER_UPLOAD_DIR", fx.tmp.path().join("u"))
        .arg("--cache-dir")
        .arg(fx.tmp.path().join("state").join("cache"))
        .args(["--resolve", W3C_PARTICIPATE])
        .output()
        .unwrap();
    assert!(out.status.success(), "flag should override the environment");
}
