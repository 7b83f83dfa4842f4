use std::path::Path;
use std::process::{Command, Output};

use anydijkstra::raster::{decode_distances, decode_predecessors};
use anydijkstra::NodeCoord;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anydijkstra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn summary_field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .unwrap_or_else(|| panic!("{key} missing from {line:?}"))
}

#[test]
fn solve_random_converges_and_writes_rasters() {
    let dir = TempDir::new().unwrap();
    let (d, pr, viz) = (p(&dir, "d.anyd"), p(&dir, "p.anyp"), p(&dir, "v.pgm"));
    let out = run(&[
        "solve", "--random", "100x100", "--seed", "7", "--source", "0,0", "--out", &d, "--pred", &pr, "--viz", &viz,
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let line = stdout(&out);
    assert_eq!(summary_field(&line, "converged"), "true");
    assert!(summary_field(&line, "K").parse::<usize>().unwrap() <= 100);
    summary_field(&line, "updates_total").parse::<usize>().unwrap();
    summary_field(&line, "wall_ms").parse::<f64>().unwrap();

    let bytes = std::fs::read(&d).unwrap();
    assert_eq!(bytes.len(), 16 + 8 * 100 * 100);
    let dist = decode_distances(&bytes).unwrap();
    assert_eq!(*dist.get(NodeCoord::new(0, 0)), 0.0);
    assert!(dist.as_slice().iter().all(|x| x.is_finite()));
    let pred = decode_predecessors(&std::fs::read(&pr).unwrap()).unwrap();
    assert_eq!(pred.dims(), dist.dims());
    assert!(std::fs::read(&viz).unwrap().starts_with(b"P5\n100 100\n65535\n"));
}

#[test]
fn solve_rejects_out_of_bounds_source() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "solve",
        "--random",
        "4x4",
        "--seed",
        "1",
        "--source",
        "9,9",
        "--out",
        &p(&dir, "d.anyd"),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!Path::new(&p(&dir, "d.anyd")).exists());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["solve", "--source", "0,0"][..],
        &["solve", "--random", "4x4", "--source", "0,0"],
        &["solve", "--random", "4x", "--seed", "1", "--source", "0,0"],
        &["solve", "--random", "4x4", "--seed", "1", "--source", "a,b"],
        &[
            "solve", "--unit", "3x3", "--random", "3x3", "--seed", "1", "--source", "0,0",
        ],
        &["solve", "--input", "/nonexistent.pgm", "--source", "0,0"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
}

#[test]
fn bad_pgm_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "bad.pgm");
    std::fs::write(&f, b"P5\n2 2\n255\n\x01").unwrap();
    let out = run(&["solve", "--input", &f, "--source", "0,0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte"));
}

#[test]
fn anytime_stop_still_writes_output() {
    let dir = TempDir::new().unwrap();
    let d = p(&dir, "d.anyd");
    let out = run(&[
        "solve",
        "--random",
        "64x64",
        "--seed",
        "3",
        "--source",
        "0,0",
        "--max-iters",
        "1",
        "--out",
        &d,
    ]);
    assert_eq!(code(&out), 3);
    assert_eq!(summary_field(&stdout(&out), "converged"), "false");
    assert_eq!(std::fs::metadata(&d).unwrap().len(), 16 + 8 * 64 * 64);
}

#[test]
fn compare_exit_codes() {
    let ok = run(&["compare", "--random", "32x32", "--seed", "11", "--source", "5,9"]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("mismatched=0"));

    let early = run(&[
        "compare",
        "--random",
        "32x32",
        "--seed",
        "11",
        "--source",
        "5,9",
        "--max-iters",
        "1",
    ]);
    assert_eq!(code(&early), 1);
    assert!(summary_field(&stdout(&early), "l1").parse::<f64>().unwrap() > 0.0);
}

#[test]
fn compare_on_constant_image() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "flat.pgm");
    std::fs::write(&f, "P2\n3 2\n255\n7 7 7\n7 7 7\n").unwrap();
    let out = run(&["compare", "--input", &f, "--source", "1,2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("l1=0 linf=0 mismatched=0"));

    let d = p(&dir, "d.anyd");
    assert_eq!(code(&run(&["solve", "--input", &f, "--source", "1,2", "--out", &d])), 0);
    assert!(decode_distances(&std::fs::read(&d).unwrap())
        .unwrap()
        .as_slice()
        .iter()
        .all(|&x| x == 0.0));
}

#[test]
fn compare_passes_across_seeds() {
    for seed in 0..5 {
        let out = run(&[
            "compare",
            "--random",
            "24x31",
            "--seed",
            &seed.to_string(),
            "--source",
            "12,3",
            "--threads",
            "2",
        ]);
        assert_eq!(code(&out), 0, "seed {seed}: {}", stdout(&out));
    }
}

fn read_csv(path: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn trace_is_monotone_and_ends_exact() {
    let dir = TempDir::new().unwrap();
    let (csv, snaps) = (p(&dir, "t.csv"), p(&dir, "snaps"));
    let out = run(&[
        "trace",
        "--random",
        "40x40",
        "--seed",
        "2",
        "--source",
        "20,20",
        "--out-csv",
        &csv,
        "--snapshots-dir",
        &snaps,
    ]);
    assert_eq!(code(&out), 0);
    let rows = read_csv(&csv);
    assert_eq!(rows[0].join(","), "iteration,updates,l1,linf,mismatched,wall_ms");
    let l1: Vec<f64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(l1.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*l1.last().unwrap(), 0.0);
    assert_eq!(rows.last().unwrap()[4], "0");

    let mut files: Vec<_> = std::fs::read_dir(&snaps).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), l1.len());
    let last = decode_distances(&std::fs::read(files.last().unwrap()).unwrap()).unwrap();
    assert_eq!(*last.get(NodeCoord::new(20, 20)), 0.0);
}

#[test]
fn trace_unit_grid_and_single_node() {
    let dir = TempDir::new().unwrap();
    let csv = p(&dir, "u.csv");
    assert_eq!(
        code(&run(&["trace", "--unit", "8x8", "--source", "0,0", "--out-csv", &csv])),
        0
    );
    assert_eq!(read_csv(&csv).len(), 3);

    assert_eq!(
        code(&run(&["trace", "--unit", "1x1", "--source", "0,0", "--out-csv", &csv])),
        0
    );
    let rows = read_csv(&csv);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][..5].join(","), "1,0,0,0,0");
}

#[test]
fn trace_csv_is_stable_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let strip = |path: &str| {
        read_csv(path)
            .into_iter()
            .map(|mut r| {
                r.pop();
                r
            })
            .collect::<Vec<_>>()
    };
    let (a, b) = (p(&dir, "a.csv"), p(&dir, "b.csv"));
    run(&[
        "trace",
        "--random",
        "30x20",
        "--seed",
        "4",
        "--source",
        "0,19",
        "--out-csv",
        &a,
        "--threads",
        "1",
    ]);
    run(&[
        "trace",
        "--random",
        "30x20",
        "--seed",
        "4",
        "--source",
        "0,19",
        "--out-csv",
        &b,
        "--threads",
        "3",
    ]);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn path_on_small_lattice() {
    let dir = TempDir::new().unwrap();
    let costs = p(&dir, "l.txt");
    std::fs::write(&costs, "2 2\n# vertical\n1 1\n# horizontal\n1\n2\n").unwrap();
    let out = run(&["path", "--costs", &costs, "--source", "0,0", "--target", "1,1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "cost=2 turns=1\n0,0\n0,1\n1,1\n");

    let same = run(&["path", "--costs", &costs, "--source", "1,0", "--target", "1,0"]);
    assert_eq!(stdout(&same), "cost=0 turns=0\n1,0\n");
}

#[test]
fn path_unreachable_and_out_of_bounds() {
    let out = run(&[
        "path",
        "--random",
        "5x5",
        "--seed",
        "1",
        "--source",
        "0,0",
        "--target",
        "4,4",
        "--max-iters",
        "0",
    ]);
    assert_eq!(code(&out), 4);
    let out = run(&[
        "path", "--random", "5x5", "--seed", "1", "--source", "0,0", "--target", "5,0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bench_row_contract() {
    let out = run(&[
        "bench",
        "--sizes",
        "64",
        "--seeds",
        "1",
        "--threads",
        "1",
        "--repeats",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0].join(","), "size,seed,threads,algo,k_iterations,wall_ms");
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][3], "sweep");
    assert!(rows[1][4].parse::<usize>().unwrap() <= 64);
    assert_eq!(rows[2][3], "heap");

    let out = run(&[
        "bench",
        "--sizes",
        "16,24",
        "--seeds",
        "1,2",
        "--threads",
        "1,2",
        "--repeats",
        "1",
    ]);
    assert_eq!(stdout(&out).lines().count(), 1 + 2 * 2 * 3);
}
