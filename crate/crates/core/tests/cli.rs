use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn spdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spdc")).args(args).output().expect("spdc runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn run_ok(args: &[&str]) -> Output {
    let out = spdc(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

/// Writes `--out` (and its SVG) into `dir` for `args`, returns both files.
fn produce(dir: &Path, name: &str, args: &[&str]) -> (Vec<u8>, Vec<u8>) {
    let out = dir.join(format!("{name}.csv"));
    let mut full: Vec<&str> = args.to_vec();
    let out_s = out.to_str().unwrap().to_string();
    full.extend(["--out", &out_s, "--svg"]);
    run_ok(&full);
    (std::fs::read(&out).unwrap(), std::fs::read(out.with_extension("svg")).unwrap())
}

fn golden_cases() -> Vec<(&'static str, Vec<String>)> {
    let g = golden_dir();
    let cfg = |f: &str| g.join(f).to_str().unwrap().to_string();
    let mut cases = vec![
        ("map_110fs", vec!["--config".into(), cfg("map_110fs.toml"), "map".into()]),
        ("map_1000fs", vec!["--config".into(), cfg("map_1000fs.toml"), "map".into()]),
    ];
    for (name, l2) in [("spectrum_809_4", "809.4"), ("spectrum_808_4", "808.4"), ("spectrum_807_3", "807.3"), ("spectrum_806_3", "806.3")] {
        cases.push((
            name,
            vec!["--config".into(), cfg("spectrum.toml"), "spectrum".into(), "--lambda2".into(), l2.into()],
        ));
    }
    cases
}

#[test]
fn golden_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let bless = std::env::var_os("SPDC_BLESS").is_some();
    for (name, args) in golden_cases() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (csv, svg) = produce(dir.path(), name, &args);
        let (gc, gs) = (golden_dir().join(format!("{name}.csv")), golden_dir().join(format!("{name}.svg")));
        if bless {
            std::fs::write(&gc, &csv).unwrap();
            std::fs::write(&gs, &svg).unwrap();
            continue;
        }
        assert!(csv == std::fs::read(&gc).unwrap(), "{name}.csv differs from golden");
        assert!(svg == std::fs::read(&gs).unwrap(), "{name}.svg differs from golden");

        let mut serial = args.clone();
        serial.push("--serial");
        let (csv_s, svg_s) = produce(dir.path(), &format!("{name}_serial"), &serial);
        assert!(csv == csv_s && svg == svg_s, "{name}: serial run differs");
    }
}

#[test]
fn repeated_runs_are_identical() {
    let a = run_ok(&["peaks", "--lambda2", "806.3"]);
    let b = run_ok(&["peaks", "--lambda2", "806.3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run_ok(&["threshold", "--lambda2", "806.3"]);
    let b = run_ok(&["threshold", "--lambda2", "806.3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_header_echoes_effective_config() {
    let out = run_ok(&["--tau", "250", "--phi", "41.47", "spectrum", "--lambda2", "807.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header.contains(&"# tau_fs = 250.0"), "{header:?}");
    assert!(header.contains(&"# axis_angle_deg = 41.47"), "{header:?}");
    assert!(header.contains(&"# lambda2_nm=807.3"));
    assert!(header.contains(&"# normalization=unit-max"));
    assert_eq!(text.lines().nth(header.len()), Some("lambda1_nm,density"));
}

#[test]
fn phasematch_report() {
    let r = json(&run_ok(&["phasematch"]));
    let phi = r["phi0_deg"].as_f64().unwrap();
    assert!((phi - 41.45).abs() <= 0.3);
    assert_eq!(phi, (phi * 1e6).round() / 1e6);
    assert!(r["residual_rad_per_um"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(r["sellmeier"], "bbo-eimerl-1987");
}

#[test]
fn solve_keyword_uses_solved_angle() {
    let out = run_ok(&["--phi", "solve", "spectrum", "--lambda2", "809.4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# axis_angle_deg=41.453861"), "{}", &text[..400]);
}

#[test]
fn peaks_report_from_computed_and_stored_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    run_ok(&["spectrum", "--lambda2", "806.3", "--out", csv.to_str().unwrap()]);
    let stored = json(&run_ok(&["peaks", "--input", csv.to_str().unwrap()]));
    let computed = json(&run_ok(&["peaks", "--lambda2", "806.3"]));
    assert_eq!(stored["count"], 2);
    assert_eq!(stored["count"], computed["count"]);
    for k in 0..2 {
        assert_eq!(stored["peaks"][k]["location_nm"], computed["peaks"][k]["location_nm"]);
    }
    assert_eq!(json(&run_ok(&["peaks", "--lambda2", "809.4"]))["separation_nm"], 0.0);
}

#[test]
fn threshold_report_brackets_and_notes() {
    let r = json(&run_ok(&["threshold", "--lambda2", "806.3"]));
    let t = r["tau_star_fs"].as_f64().unwrap();
    assert!(t > 110.0 && t < 1000.0);
    assert!(r["note"].as_str().unwrap().contains("200 fs"));
}

#[test]
fn fit_reads_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for l2 in ["809.4", "806.3"] {
        let spectrum = dir.path().join(format!("model_{l2}.csv"));
        run_ok(&["spectrum", "--lambda2", l2, "--out", spectrum.to_str().unwrap()]);
        let text = std::fs::read_to_string(&spectrum).unwrap();
        let mut data = format!("# lambda2_nm={l2}\n# hwp2=sum\nlambda1_nm,counts,std\n");
        for line in text.lines().filter(|l| !l.starts_with('#')).skip(1).step_by(5) {
            let (x, y) = line.split_once(',').unwrap();
            let c = 500.0 * y.parse::<f64>().unwrap();
            data.push_str(&format!("{x},{c},{}\n", 0.03 * c + 1.0));
        }
        let p = dir.path().join(format!("data_{l2}.csv"));
        std::fs::write(&p, data).unwrap();
        paths.push(p.to_str().unwrap().to_string());
    }
    let mut args = vec!["fit"];
    args.extend(paths.iter().map(String::as_str));
    let r = json(&run_ok(&args));
    assert!((r["phi0_deg"].as_f64().unwrap() - 41.4625).abs() < 1e-4);
    assert_eq!(r["curves"].as_array().unwrap().len(), 2);
    assert_eq!(r["curves"][0]["hwp2"], "sum");
}

#[test]
fn svg_needs_out() {
    let out = spdc(&["spectrum", "--lambda2", "806.3", "--svg"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_cfg = dir.path().join("bad.toml");
    std::fs::write(&bad_cfg, "[crystal]\nlength_mm = 5.0\ncolour = 1\n").unwrap();
    let bad_data = dir.path().join("bad.csv");
    std::fs::write(&bad_data, "# lambda2_nm=806.3\n800,1,1\n800.1,oops,1\n").unwrap();
    let missing = dir.path().join("nope.toml");
    let no_dir = dir.path().join("missing/out.csv");

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["--help"], 0),
        (vec!["--version"], 0),
        (vec!["frobnicate"], 1),
        (vec!["spectrum"], 1),
        (vec!["--config", bad_cfg.to_str().unwrap(), "phasematch"], 1),
        (vec!["--phi", "steep", "phasematch"], 1),
        (vec!["--tau", "-5", "spectrum", "--lambda2", "806.3"], 1),
        (vec!["--prominence", "1.5", "peaks", "--lambda2", "806.3"], 1),
        (vec!["fit", bad_data.to_str().unwrap()], 1),
        (vec!["spectrum", "--lambda2", "1500"], 2),
        (vec!["--lambda0", "600", "phasematch"], 2),
        (vec!["threshold", "--lambda2", "809.4"], 2),
        (vec!["threshold", "--lambda2", "806.3", "--tau-bracket", "200", "300"], 2),
        (vec!["--config", missing.to_str().unwrap(), "phasematch"], 3),
        (vec!["fit", "/nonexistent/data.csv"], 3),
        (vec!["spectrum", "--lambda2", "806.3", "--out", no_dir.to_str().unwrap()], 3),
    ];
    for (args, expected) in cases {
        let out = spdc(&args);
        assert_eq!(code(&out), expected, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
