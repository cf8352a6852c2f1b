//! End-to-end checks of the command-line surface.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wl-lab"))
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wl-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn rook_file() -> PathBuf {
    let mut text = String::from("n 16\n");
    for a in 0..16usize {
        for b in (a + 1)..16 {
            if a / 4 == b / 4 || a % 4 == b % 4 {
                text.push_str(&format!("edge {a} {b}\n"));
            }
        }
    }
    write_temp("rook.graph", &text)
}

fn shrikhande_file() -> PathBuf {
    let mut edges = vec![];
    let idx = |a: usize, b: usize| (a % 4) * 4 + (b % 4);
    for a in 0..4usize {
        for b in 0..4usize {
            let v = idx(a, b);
            for (da, db) in [(1, 0), (0, 1), (1, 1)] {
                let w = idx(a + da, b + db);
                let (x, y) = (v.min(w), v.max(w));
                if !edges.contains(&(x, y)) {
                    edges.push((x, y));
                }
            }
        }
    }
    let mut text = String::from("n 16\n");
    for (a, b) in edges {
        text.push_str(&format!("edge {a} {b}\n"));
    }
    write_temp("shrikhande.graph", &text)
}

#[test]
fn census_order_4_prints_four_rows() {
    let dir = std::env::temp_dir().join(format!("wl-lab-census-{}", std::process::id()));
    let out = bin()
        .args(["census", "--order", "4", "--out-dir", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 4);
    // the named representative files parse back to coherent configurations
    for line in stdout.lines() {
        let path = line.split('\t').nth(2).unwrap();
        let g = wl_lab::parse_graph(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert!(wl_lab::verify_coherence(&g).ok());
    }
}

#[test]
fn distinguish_srg_pair() {
    let (g, h) = (rook_file(), shrikhande_file());
    let out = bin()
        .args(["distinguish", g.to_str().unwrap(), h.to_str().unwrap(), "-k", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "indistinguishable");
    let out = bin()
        .args(["distinguish", g.to_str().unwrap(), h.to_str().unwrap(), "-k", "3"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "distinguished");
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = bin().args(["kwl", "/nonexistent/missing.graph"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_stable() {
    let g = write_temp("c6.graph", "n 6\nedge 0 1\nedge 1 2\nedge 2 3\nedge 3 4\nedge 4 5\nedge 5 0\n");
    let run = || {
        bin()
            .args(["closure", g.to_str().unwrap()])
            .output()
            .unwrap()
            .stdout
    };
    let first = run();
    assert_eq!(first, run());
    // closure output parses back to the same configuration
    let text = String::from_utf8(first).unwrap();
    let parsed = wl_lab::parse_graph(&text).unwrap();
    let direct = wl_lab::coherent_closure(&wl_lab::parse_graph(&std::fs::read_to_string(&g).unwrap()).unwrap()).unwrap();
    assert_eq!(&parsed, direct.base());
}

#[test]
fn analyze_and_classify_run() {
    let g = write_temp("p3chain.graph", "n 6\nedge 0 1\nedge 1 2\nedge 2 3\nedge 3 4\nedge 4 5\nedge 5 0\n");
    let out = bin().args(["analyze", g.to_str().unwrap(), "--dot"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("fiber 0 size 6"));
    assert!(stdout.contains("graph quotient {"));
}

#[test]
fn cfi_check_flags() {
    let base = write_temp("k4.graph", "n 4\nedge 0 1\nedge 0 2\nedge 0 3\nedge 1 2\nedge 1 3\nedge 2 3\n");
    let out = bin()
        .args(["cfi", "--base", base.to_str().unwrap(), "--check-k", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("indistinguishable"));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("n 16"));
}

#[test]
fn wldim_exact_and_bound() {
    let g = write_temp("c6b.graph", "n 6\nedge 0 1\nedge 1 2\nedge 2 3\nedge 3 4\nedge 4 5\nedge 5 0\n");
    let out = bin().args(["wldim", g.to_str().unwrap(), "--exact"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "2");
    let cert = std::env::temp_dir().join(format!("wl-lab-cli-{}/cert.json", std::process::id()));
    let out = bin()
        .args(["bound", g.to_str().unwrap(), "--certificate", cert.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(cert).unwrap()).unwrap();
    assert_eq!(json["total"], 2);
}
