//! Runs the built binary: output shapes, exit codes and caching.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raag-growth"))
        .args(args)
        .env_remove("RAAG_GROWTH_CACHE_DIR")
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn betti_of_octahedron() {
    let o = run(&["betti", "--complex", "builtin:octahedron", "--field", "f:2"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "complex,field,dimension,reduced_betti\noctahedron,f:2,0,0\noctahedron,f:2,1,0\noctahedron,f:2,2,1\n"
    );
    let j: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["betti", "--complex", "builtin:octahedron", "--out", "json"]))).unwrap();
    assert_eq!(j["reduced_betti"], serde_json::json!([0, 0, 1]));
    assert_eq!(j["is_flag"], serde_json::json!(true));
}

#[test]
fn cover_scan_csv() {
    let o = run(&["cover-scan", "--complex", "builtin:cycle_4", "--field", "q", "--n", "1,2,3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("complex,index,n,field,degree,betti,normalized,target"));
    let b2: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(",q,2,"))
        .map(|l| l.split(',').nth(6).unwrap())
        .collect();
    assert_eq!(b2, ["4/1 (4.000000)", "25/16 (1.562500)", "100/81 (1.234568)"]);
    assert!(text.lines().all(|l| l.split(',').count() == 8));
}

#[test]
fn complex_from_file_and_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.txt");
    std::fs::write(&path, "# a square\na b\nb c\nc d\nd a\n").unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["cover-scan", "--complex", p, "--exponents", "a=2,b=1,c=2,d=1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // Z/2 * Z/2 quotient on the a,c factor only: graph covers with b_1 = 5 and 2
    let text = stdout(&o);
    assert!(text.contains("square,4,a=2;b=1;c=2;d=1,q,2,10,5/2 (2.500000),1"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["betti"]).status.code(), Some(1));
    assert_eq!(run(&["betti", "--complex", "builtin:torus"]).status.code(), Some(1));
    assert_eq!(run(&["betti", "--complex", "builtin:point", "--field", "f:4"]).status.code(), Some(1));
    assert_eq!(run(&["torsion", "--complex", "builtin:point", "--field", "q"]).status.code(), Some(1));
    assert_eq!(run(&["cover-scan", "--complex", "builtin:point", "--n", "0"]).status.code(), Some(1));
    assert_eq!(
        run(&["cover-scan", "--complex", "builtin:icosahedron", "--n", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["davis", "--complex", "builtin:cycle_10", "--budget", "100"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["library"]).status.code(), Some(0));
}

#[test]
fn torsion_and_nerve_and_davis() {
    let o = run(&["torsion", "--complex", "builtin:cycle_4", "--field", "f:2", "--n", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("complex,index,n,p,degree,betti_q,betti_fp,torsion\n"));
    let o = run(&["nerve-check", "--complex", "builtin:cycle_5", "--n", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("cycle_5,2,q,2,61/32,1/1,"));
    let o = run(&["davis", "--complex", "builtin:cycle_4"]);
    assert!(stdout(&o).contains("cycle_4,16,2,q,1,2,1/8 (0.125000),"));
    let o = run(&["mv-check", "--complex", "builtin:path_3", "--vertex", "v01"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with("true,true")));
    assert_eq!(run(&["mv-check", "--complex", "builtin:path_3", "--vertex", "zz"]).status.code(), Some(1));
}

fn cache_files(dir: &Path) -> Vec<std::path::PathBuf> {
    std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect()
}

#[test]
fn cache_hits_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["cover-scan", "--complex", "builtin:cycle_5", "--n", "2,3", "--out", "json", "--cache-dir", d];
    let first = run(&args);
    assert!(first.status.success());
    let files = cache_files(dir.path());
    assert_eq!(files.len(), 2);
    assert_eq!(stdout(&run(&args)), stdout(&first));
    for f in &files {
        std::fs::write(f, "{\"truncated\":").unwrap();
    }
    assert_eq!(stdout(&run(&args)), stdout(&first));
    assert_eq!(stdout(&run(&args[..args.len() - 2])), stdout(&first));
    // the environment variable supplies the default directory
    let env_dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_raag-growth"))
        .args(&args[..args.len() - 2])
        .env("RAAG_GROWTH_CACHE_DIR", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(stdout(&o), stdout(&first));
    assert_eq!(cache_files(env_dir.path()).len(), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let base = ["cover-scan", "--complex", "builtin:octahedron", "--n", "2", "--field", "f:3", "--out", "json"];
    let one = run(&[&base[..], &["--threads", "1"]].concat());
    let four = run(&[&base[..], &["--threads", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}
