//! End-to-end tests of the `bnet` binary: subcommand wiring, exit codes
//! and output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bnet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bnet"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Parse a solve row into (header-less) cells.
fn cells(row: &str) -> Vec<String> {
    row.trim().split(',').map(|s| s.to_string()).collect()
}

#[test]
fn gen_solve_width_happy_path() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bnet(
        &[
            "gen", "--kind", "uniform", "--nodes", "8", "--edges", "12", "--count", "2",
            "--seed", "7",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(tmp.path().join("inst_7.bnet").exists());
    assert!(tmp.path().join("manifest.txt").exists());

    let out = bnet(
        &[
            "solve", "--file", "inst_7.bnet", "--task", "mpe", "--exact", "--approx", "--i",
            "4",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let row = stdout(&out);
    let c = cells(&row);
    assert_eq!(c.len(), 18);
    assert_eq!(c[0], "inst_7");
    assert_eq!(c[1], "mpe");
    assert_eq!(c[2], "by_i");
    // lower <= upper within tolerance.
    let upper: f64 = c[6].parse().unwrap();
    let lower: f64 = c[7].parse().unwrap();
    assert!(lower <= upper * (1.0 + 1e-9));

    let out = bnet(&["width", "--file", "inst_7.bnet"], tmp.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("w(d) = "), "{text}");
    assert!(text.contains("w*(d) = "), "{text}");
}

#[test]
fn solve_exact_equals_super_bucket_m1_on_poly_trees() {
    // Prop-style CLI check: the exact value equals the m=1 super-bucket
    // approximation on poly-trees along a legal ordering.
    let tmp = tempfile::tempdir().unwrap();
    // Build a poly-tree instance by writing it through the core API.
    let dag = bnet_core::generate::gen_polytree_graph(15, 3, 4);
    let spec = bnet_core::generate::GenSpec::uniform(15, 0, 4);
    let bn = bnet_core::generate::gen_uniform_cpts(&dag, &spec).unwrap();
    bnet_core::io::save_network(
        &tmp.path().join("pt.bnet"),
        &bn,
        &bnet_core::Evidence::empty(),
        None,
    )
    .unwrap();

    let exact = bnet(
        &[
            "solve", "--file", "pt.bnet", "--task", "mpe", "--exact", "--ordering", "legal",
        ],
        tmp.path(),
    );
    assert!(exact.status.success());
    let exact_value: f64 = cells(&stdout(&exact))[5].parse().unwrap();

    let approx = bnet(
        &[
            "solve",
            "--file",
            "pt.bnet",
            "--task",
            "mpe",
            "--approx",
            "--m",
            "1",
            "--superbuckets",
            "--ordering",
            "legal",
        ],
        tmp.path(),
    );
    assert!(approx.status.success());
    let c = cells(&stdout(&approx));
    let upper: f64 = c[6].parse().unwrap();
    let lower: f64 = c[7].parse().unwrap();
    assert!((upper - exact_value).abs() <= 1e-9 * exact_value);
    assert!((lower - exact_value).abs() <= 1e-9 * exact_value);
}

#[test]
fn solve_map_against_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = bnet_core::generate::GenSpec::uniform(8, 12, 99);
    let bn = bnet_core::generate::generate(&spec).unwrap();
    bnet_core::io::save_network(
        &tmp.path().join("m.bnet"),
        &bn,
        &bnet_core::Evidence::empty(),
        None,
    )
    .unwrap();
    let out = bnet(
        &[
            "solve", "--file", "m.bnet", "--task", "map", "--hyp", "0,1,2", "--exact",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let got: f64 = cells(&stdout(&out))[5].parse().unwrap();
    let (want, _) = bnet_core::oracle::brute_map(
        &bn,
        &bnet_core::Evidence::empty(),
        &[bnet_core::Var(0), bnet_core::Var(1), bnet_core::Var(2)],
        &bnet_core::oracle::OracleBudget::default(),
    )
    .unwrap();
    assert!((got - want).abs() <= 1e-9 * want);
}

#[test]
fn exit_codes_distinguish_error_classes() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.bnet"), "BNOT 1\n").unwrap();
    // Parse error -> 2.
    let out = bnet(
        &["solve", "--file", "bad.bnet", "--task", "mpe", "--exact"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    // Resource error -> 3 (absurdly small cell cap via env).
    let ok = bnet(
        &[
            "gen", "--kind", "uniform", "--nodes", "10", "--edges", "20", "--count", "1",
            "--seed", "1",
        ],
        tmp.path(),
    );
    assert!(ok.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_bnet"))
        .args(["solve", "--file", "inst_1.bnet", "--task", "mpe", "--exact"])
        .env("BNET_MEM_CELLS", "4")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{out:?}");

    // Infeasible configuration -> 4.
    let out = bnet(
        &["solve", "--file", "inst_1.bnet", "--task", "mpe", "--approx"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(4), "{out:?}");
    let out = bnet(
        &[
            "solve", "--file", "inst_1.bnet", "--task", "mpe", "--exact", "--ordering",
            "legal",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(4), "not a poly-tree: {out:?}");
}

/// Timing columns (tr, ta, te at indices 11..=13) are excluded from the
/// determinism comparison.
fn strip_timing(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let mut cols: Vec<&str> = line.split(',').collect();
            if cols.len() == 18 {
                cols[11] = "-";
                cols[12] = "-";
                cols[13] = "-";
            }
            cols.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn bench_csv_is_deterministic_modulo_timing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bnet(
        &[
            "gen", "--kind", "uniform", "--nodes", "10", "--edges", "18", "--count", "4",
            "--seed", "21",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    for run in ["a.csv", "b.csv"] {
        let out = bnet(
            &[
                "bench",
                "--manifest",
                "manifest.txt",
                "--grid-i",
                "3,6",
                "--grid-m",
                "1",
                "--out",
                run,
            ],
            tmp.path(),
        );
        assert!(out.status.success(), "{out:?}");
    }
    let a = std::fs::read_to_string(tmp.path().join("a.csv")).unwrap();
    let b = std::fs::read_to_string(tmp.path().join("b.csv")).unwrap();
    assert_eq!(strip_timing(&a), strip_timing(&b));
    // Rows: 4 instances x 3 grid points, plus the header.
    assert_eq!(a.lines().count(), 13);
    let header = a.lines().next().unwrap();
    assert_eq!(
        header,
        "instance,task,strategy,i,m,exact,upper,lower,ml,um,ul,tr,ta,te,mb,fi,fo,ordering"
    );
    // Every row satisfies lower <= upper and lower <= exact <= upper.
    for line in a.lines().skip(1) {
        let c: Vec<&str> = line.split(',').collect();
        let exact: f64 = c[5].parse().unwrap();
        let upper: f64 = c[6].parse().unwrap();
        let lower: f64 = c[7].parse().unwrap();
        let tol = 1e-9 * exact;
        assert!(lower <= exact + tol && exact <= upper + tol);
    }
}

#[test]
fn bench_on_poly_trees_with_super_buckets_hits_ratio_one() {
    // A degenerate set of poly-trees with m=1 lands every instance in the
    // ratio-1 bin.
    let tmp = tempfile::tempdir().unwrap();
    let mut names = Vec::new();
    for seed in 0..4u64 {
        let dag = bnet_core::generate::gen_polytree_graph(12, 3, seed);
        let spec = bnet_core::generate::GenSpec::uniform(12, 0, seed);
        let bn = bnet_core::generate::gen_uniform_cpts(&dag, &spec).unwrap();
        let name = format!("pt_{seed}.bnet");
        bnet_core::io::save_network(
            &tmp.path().join(&name),
            &bn,
            &bnet_core::Evidence::empty(),
            None,
        )
        .unwrap();
        names.push(name);
    }
    std::fs::write(tmp.path().join("manifest.txt"), names.join("\n")).unwrap();
    let out = bnet(
        &[
            "bench",
            "--manifest",
            "manifest.txt",
            "--grid-m",
            "1",
            "--superbuckets",
            "--ordering",
            "legal",
            "--out",
            "pt.csv",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(
        text.contains("mean M/L 1.000 U/M 1.000"),
        "summary should show exact ratios:\n{text}"
    );
}

#[test]
fn gen_count_zero_writes_manifest_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bnet(
        &[
            "gen", "--kind", "noisy-or", "--nodes", "6", "--edges", "8", "--count", "0",
            "--seed", "5",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    assert!(tmp.path().join("manifest.txt").exists());
    assert_eq!(
        std::fs::read_dir(tmp.path()).unwrap().count(),
        1,
        "only the manifest"
    );
}

#[test]
fn noisy_or_gen_writes_meta_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bnet(
        &[
            "gen", "--kind", "noisy-or", "--nodes", "8", "--edges", "10", "--count", "1",
            "--seed", "3",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("inst_3.bnet")).unwrap();
    assert!(text.contains("meta seed 3 kind noisy_or"));
    let nf = bnet_core::io::parse_network(&text).unwrap();
    assert_eq!(nf.meta.unwrap().kind, bnet_core::generate::NetKind::NoisyOr);
}
