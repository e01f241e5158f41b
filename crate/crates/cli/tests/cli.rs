use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sgrow::io::{read_stream, write_stream};
use sgrow::report::{analyze_stream, read_report_csv};
use sgrow::sgrow::{generate, SGrowConfig};
use sgrow::{Sgr, StreamLog};

fn sgrow_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgrow")).args(args).output().unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Compares against a checked-in file; `SGROW_BLESS=1` rewrites it.
fn assert_golden(name: &str, actual: &[u8]) {
    let path = data(name);
    if std::env::var_os("SGROW_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{name} differs from golden output");
}

#[test]
fn k22_analysis_row() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("k22.sgr");
    std::fs::write(&f, "0 0 1 1\n0 1 1 1\n1 0 1 1\n1 1 1 1\n").unwrap();
    let out = sgrow_cmd(&["analyze", s(&f), "--k", "1"]);
    assert!(out.status.success());
    let rows = read_report_csv(&out.stdout[..]).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r.butterflies, r.rate, r.r_s), (1, 0.25, 0.5));
    assert_eq!([r.f1, r.f2, r.f3, r.f4], [1.0, 0.0, 0.0, 0.0]);
}

#[test]
fn burst_stats_rows() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("b.sgr");
    std::fs::write(&f, "0 0 1 1\n1 0 1 1\n0 1 1 2\n").unwrap();
    let out = sgrow_cmd(&["burst-stats", s(&f)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "size,frequency\n2,1\n1,1\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage errors
    assert_eq!(sgrow_cmd(&["generate", "spa", "--m", "2"]).status.code(), Some(1));
    assert_eq!(sgrow_cmd(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(sgrow_cmd(&["--help"]).status.code(), Some(0));
    // validation errors
    let bad = dir.path().join("bad.sgr");
    std::fs::write(&bad, "0 0 9 1\n").unwrap();
    let out = sgrow_cmd(&["analyze", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let ok = dir.path().join("ok.sgr");
    std::fs::write(&ok, "0 0 1 1\n").unwrap();
    assert_eq!(sgrow_cmd(&["analyze", s(&ok), "--k", "2"]).status.code(), Some(1));
    assert_eq!(
        sgrow_cmd(&["generate", "ff", "--p", "1.5", "--pb", "0", "--steps", "3", "--seed", "1"])
            .status
            .code(),
        Some(1)
    );
    // I/O errors
    assert_eq!(sgrow_cmd(&["analyze", "/nonexistent/x.sgr"]).status.code(), Some(2));
    let out = dir.path().join("no/such/dir/out.sgr");
    assert_eq!(
        sgrow_cmd(&[
            "generate",
            "spa",
            "--m",
            "2",
            "--steps",
            "3",
            "--seed",
            "1",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn rescale_flag_accepts_fractional_ratings() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("wl.sgr");
    std::fs::write(&f, "0 0 0.5 1\n0 1 0 1\n1 0 3.5 1\n1 1 2 1\n").unwrap();
    assert_eq!(sgrow_cmd(&["analyze", s(&f), "--k", "1"]).status.code(), Some(1));
    assert!(sgrow_cmd(&["analyze", s(&f), "--k", "1", "--rescale"]).status.success());
}

#[test]
fn reference_report_against_itself_has_zero_mae() {
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("spa.sgr");
    let report = dir.path().join("spa.csv");
    assert!(sgrow_cmd(&[
        "generate",
        "spa",
        "--m",
        "3",
        "--steps",
        "400",
        "--seed",
        "2",
        "--out",
        s(&stream)
    ])
    .status
    .success());
    assert!(sgrow_cmd(&["analyze", s(&stream), "--out", s(&report)])
        .status
        .success());
    let out = sgrow_cmd(&["analyze", s(&stream), "--ref", s(&report)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mae = text.lines().find(|l| l.starts_with("# mae_r_s=")).unwrap();
    assert!(
        mae.starts_with("# mae_r_s=0 mae_f1=0 mae_f2=0 mae_f3=0 mae_f4=0"),
        "{mae}"
    );
}

fn small_g0() -> StreamLog {
    (0..60u32)
        .map(|k| Sgr::new(k % 11, (k * 7) % 13, (k % 5 + 1) as u8, u64::from(k / 4)))
        .collect()
}

#[test]
fn file_pipeline_matches_in_memory_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let g0 = dir.path().join("g0.sgr");
    let out = dir.path().join("gen.sgr.gz");
    write_stream(&small_g0(), &g0).unwrap();
    let args = [
        "generate",
        "sgrow",
        "--g0",
        s(&g0),
        "--rho",
        "0.3",
        "--M",
        "50",
        "--beta",
        "5",
        "--lmin",
        "1",
        "--lmax",
        "2",
        "--target",
        "20000",
        "--seed",
        "7",
        "--out",
        s(&out),
    ];
    assert!(sgrow_cmd(&args).status.success());

    let cfg = SGrowConfig {
        target: 20_000,
        seed: 7,
        ..SGrowConfig::preset("S-Amazon").unwrap()
    };
    // the CLI reads G0 through the same renumbering
    let in_memory = generate(&small_g0().relabel_dense(), cfg).unwrap();
    let from_file = read_stream(&out).unwrap();
    // the reader renumbers ids by first appearance
    let expected = in_memory.relabel_dense();
    let first_diff = from_file.iter().zip(expected.iter()).position(|(a, b)| a != b);
    assert_eq!(first_diff, None, "lengths {} and {}", from_file.len(), expected.len());
    assert_eq!(from_file.len(), expected.len());

    let cli = sgrow_cmd(&["analyze", s(&out)]);
    assert!(cli.status.success());
    let cli_rows = read_report_csv(&cli.stdout[..]).unwrap();
    let direct = analyze_stream(&in_memory.relabel_dense(), 20, None).unwrap();
    assert_eq!(cli_rows.len(), 20);
    for (a, b) in cli_rows.iter().zip(&direct.rows) {
        assert_eq!(
            (a.n_bursts, a.edges, a.butterflies),
            (b.n_bursts, b.edges, b.butterflies)
        );
        for (x, y) in [
            (a.r_s, b.r_s),
            (a.cv_delta, b.cv_delta),
            (a.y2_j, b.y2_j),
            (a.pearson_r, b.pearson_r),
        ] {
            assert!(x == y || (x.is_nan() && y.is_nan()), "{x} vs {y}");
        }
    }
    // relabeling leaves every count untouched
    let raw = analyze_stream(&in_memory, 20, None).unwrap();
    for (a, b) in raw.rows.iter().zip(&direct.rows) {
        assert_eq!((a.edges, a.butterflies), (b.edges, b.butterflies));
        assert!((a.r_s - b.r_s).abs() < 1e-12 || (a.r_s.is_nan() && b.r_s.is_nan()));
    }
}

#[test]
fn parameter_switch_changes_the_tail() {
    let dir = tempfile::tempdir().unwrap();
    let g0 = dir.path().join("g0.sgr");
    write_stream(&small_g0(), &g0).unwrap();
    let toml = dir.path().join("switch.toml");
    std::fs::write(&toml, "M = 300\nrho = 0.8\nl_min = 4\nl_max = 5\n").unwrap();
    let plain = dir.path().join("plain.sgr");
    let switched = dir.path().join("switched.sgr");
    let base = [
        "generate",
        "sgrow",
        "--g0",
        s(&g0),
        "--M",
        "100",
        "--rho",
        "0.4",
        "--lmin",
        "1",
        "--lmax",
        "5",
        "--target",
        "30000",
        "--seed",
        "3",
    ];
    assert!(sgrow_cmd(&[&base[..], &["--out", s(&plain)]].concat()).status.success());
    let out = sgrow_cmd(
        &[
            &base[..],
            &[
                "--switch-at",
                "10000",
                "--switch-config",
                s(&toml),
                "--out",
                s(&switched),
            ],
        ]
        .concat(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read_to_string(&plain).unwrap();
    let b = std::fs::read_to_string(&switched).unwrap();
    assert_eq!(a.lines().count(), 30_000);
    assert_eq!(b.lines().count(), 30_000);
    let common = a.lines().zip(b.lines()).take_while(|(x, y)| x == y).count();
    assert!((10_000..30_000).contains(&common), "streams diverge at line {common}");

    std::fs::write(&toml, "seed = 4\n").unwrap();
    let out = sgrow_cmd(&[&base[..], &["--switch-at", "100", "--switch-config", s(&toml)]].concat());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        sgrow_cmd(&[&base[..], &["--switch-at", "100"]].concat()).status.code(),
        Some(1)
    );
}

#[test]
fn checkpoints_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let g0 = dir.path().join("g0.sgr");
    write_stream(&small_g0(), &g0).unwrap();
    let out = sgrow_cmd(&[
        "generate",
        "sgrow",
        "--g0",
        s(&g0),
        "--target",
        "250000",
        "--seed",
        "1",
        "--out",
        s(&dir.path().join("o.sgr")),
    ]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sgrs=100000 elapsed_s="));
    assert!(err.contains("sgrs=200000 elapsed_s="));
}

#[test]
fn golden_generation_and_report() {
    let g0 = data("g0_small.sgr");
    let out = sgrow_cmd(&[
        "generate",
        "sgrow",
        "--g0",
        s(&g0),
        "--rho",
        "0.3",
        "--M",
        "10",
        "--beta",
        "5",
        "--lmin",
        "1",
        "--lmax",
        "2",
        "--target",
        "400",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    assert_golden("golden_sgrow.sgr", &out.stdout);

    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen.sgr");
    std::fs::write(&gen, &out.stdout).unwrap();
    let report = sgrow_cmd(&["analyze", s(&gen), "--k", "5"]);
    assert!(report.status.success());
    assert_golden("golden_report.csv", &report.stdout);

    let ff = sgrow_cmd(&[
        "generate", "ff", "--p", "0.4", "--pb", "0.3", "--steps", "40", "--seed", "1",
    ]);
    assert_golden("golden_ff.sgr", &ff.stdout);
    let spa = sgrow_cmd(&["generate", "spa", "--m", "2", "--steps", "40", "--seed", "1"]);
    assert_golden("golden_spa.sgr", &spa.stdout);
}
