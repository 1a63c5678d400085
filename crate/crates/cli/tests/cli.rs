use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use supersat_core::graph::{build_turan, write_graph};
use supersat_core::harness::{run_campaign, CampaignSpec};
use supersat_core::pattern::{named_pattern, PatternProfile};
use supersat_core::spectral::{spectral_radius, SpectralConfig};

fn supersat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supersat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn construct_then_spectral() {
    let dir = tempfile::tempdir().unwrap();
    let out = supersat(
        dir.path(),
        &["construct", "--family", "turan", "--n", "12", "--r", "4"],
    );
    assert!(out.status.success());
    let expected = build_turan(12, 4).unwrap().graph;
    assert_eq!(stdout(&out), write_graph(&expected));
    fs::write(dir.path().join("t.txt"), stdout(&out)).unwrap();

    let v = json(&supersat(
        dir.path(),
        &["--format", "json", "spectral", "t.txt"],
    ));
    assert!((v["rho"].as_f64().unwrap() - 9.0).abs() < 1e-9);
    let direct = spectral_radius(&expected, &SpectralConfig::default()).unwrap();
    assert_eq!(v["rho"].as_f64().unwrap(), direct.rho);
}

#[test]
fn cnf_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    for (pattern, n, c) in [("K3", "6", 3), ("K4", "9", 9), ("C5", "8", 24)] {
        let v = json(&supersat(
            dir.path(),
            &[
                "--format",
                "json",
                "cnf",
                "--pattern",
                pattern,
                "--n",
                n,
                "--method",
                "both",
            ],
        ));
        assert_eq!(v["agree"], true);
        assert_eq!(v["formula"], c.to_string());
        assert_eq!(v["brute_force"]["value"], c);
    }
    let v = json(&supersat(
        dir.path(),
        &[
            "--format",
            "json",
            "cnf",
            "--pattern",
            "kite",
            "--method",
            "alpha",
        ],
    ));
    assert_eq!(v["alpha"], "1/8");
}

#[test]
fn pattern_json_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&supersat(
        dir.path(),
        &["--format", "json", "pattern", "--name", "kite"],
    ));
    let direct = PatternProfile::new(&named_pattern("kite").unwrap()).unwrap();
    assert_eq!(v, serde_json::to_value(&direct).unwrap());
    assert_eq!(v["aut"], 4);
    assert_eq!(v["chi"], 3);

    let text = stdout(&supersat(dir.path(), &["pattern", "--name", "kite"]));
    assert!(text.contains("Aut = 4"), "{text}");
}

#[test]
fn count_through_an_edge() {
    let dir = tempfile::tempdir().unwrap();
    let out = supersat(
        dir.path(),
        &[
            "construct",
            "--family",
            "turan-plus-edge",
            "--n",
            "6",
            "--r",
            "3",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    fs::write(dir.path().join("g.txt"), stdout(&out)).unwrap();
    let v = json(&supersat(
        dir.path(),
        &[
            "--format",
            "json",
            "count",
            "g.txt",
            "--pattern",
            "K4",
            "--edge",
            "0,1",
        ],
    ));
    assert_eq!(v["copies"], 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(supersat(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(supersat(dir.path(), &["bogus"]).status.code(), Some(1));

    let missing = supersat(dir.path(), &["spectral", "nope.txt"]);
    assert_eq!(missing.status.code(), Some(1));
    let err = String::from_utf8_lossy(&missing.stderr);
    assert!(
        err.starts_with("error:") && err.contains("nope.txt"),
        "{err}"
    );

    fs::write(
        dir.path().join("ok.conf"),
        "campaign = tightness\nr = 3\npattern = K4\nn_values = 6, 9\n",
    )
    .unwrap();
    assert_eq!(
        supersat(dir.path(), &["campaign", "ok.conf"]).status.code(),
        Some(0)
    );

    // asking for more instances than the seed budget can supply fails the run
    fs::write(
        dir.path().join("short.conf"),
        "campaign = peel_properties\ninstances = 50\nmax_seeds = 3\n",
    )
    .unwrap();
    let short = supersat(dir.path(), &["campaign", "short.conf"]);
    assert_eq!(short.status.code(), Some(2));
    assert!(stdout(&short).contains("FAIL"));

    fs::write(
        dir.path().join("bad.conf"),
        "campaign = tightness\nr = 3\nr = 4\n",
    )
    .unwrap();
    let bad = supersat(dir.path(), &["campaign", "bad.conf"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
}

#[test]
fn campaign_output_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let text = "# small sweep\ncampaign = nikiforov\nmax_m = 5\nr = 2\noutput = report.json\n";
    fs::write(dir.path().join("n.conf"), text).unwrap();
    let out = supersat(dir.path(), &["--format", "json", "campaign", "n.conf"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let written = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let direct = run_campaign(&CampaignSpec::parse(text).unwrap()).unwrap();
    assert_eq!(written, direct.to_json().unwrap());

    let csv_out = supersat(
        dir.path(),
        &["--format", "csv", "-o", "r.csv", "campaign", "n.conf"],
    );
    assert!(csv_out.status.success());
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv, direct.to_csv().unwrap());
    assert!(csv.starts_with("id,status,margin,note,"));
}

#[test]
fn pattern_name_shadows_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("K3"), "4 3\n0 1\n1 2\n2 3\n").unwrap();
    let out = supersat(dir.path(), &["--format", "json", "pattern", "--name", "K3"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(json(&out)["f"], 3);

    fs::write(dir.path().join("p4.txt"), "4 3\n0 1\n1 2\n2 3\n").unwrap();
    let out = supersat(
        dir.path(),
        &["--format", "json", "pattern", "--file", "p4.txt"],
    );
    assert_eq!(json(&out)["chi"], 2);
}

#[test]
fn seeded_runs_repeat() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("p.conf"),
        "campaign = peel_properties\ninstances = 10\n",
    )
    .unwrap();
    let a = supersat(
        dir.path(),
        &["--format", "json", "--seed", "5", "campaign", "p.conf"],
    );
    let b = supersat(
        dir.path(),
        &[
            "--format",
            "json",
            "--seed",
            "5",
            "--workers",
            "1",
            "campaign",
            "p.conf",
        ],
    );
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
