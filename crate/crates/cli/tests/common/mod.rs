#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub struct Case {
    pub name: String,
    pub args: Vec<String>,
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn cases() -> Vec<Case> {
    let text = std::fs::read_to_string(golden_dir().join("cases.txt")).expect("cases.txt");
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split('\t').map(String::from);
            Case {
                name: it.next().expect("name"),
                args: it.collect(),
            }
        })
        .collect()
}

/// Runs the binary with no configuration file in effect.
pub fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffbound"))
        .args(args)
        .env_remove("DIFFBOUND_CONFIG")
        .output()
        .expect("spawn diffbound")
}

pub fn run_case(case: &Case, format: &str, threads: usize) -> Output {
    let t = threads.to_string();
    let mut args = vec!["--format", format, "--threads", t.as_str()];
    args.extend(case.args.iter().map(String::as_str));
    cli(&args)
}
