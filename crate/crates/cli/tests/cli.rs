use std::process::{Command, Output};

use relaycap_cli::presets::{PresetCommand, PRESETS};
use relaycap_cli::table::{parse_csv, EnergyRow, SweepRow, TraceRow, TrainingRow};

fn relaycap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relaycap"))
        .args(args)
        .env_remove("RELAYCAP_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = relaycap(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "sweep",
        "--preset",
        "fig6",
        "--samples",
        "8192",
        "--seed",
        "0x2A",
    ];
    assert_eq!(ok(&args), ok(&args));
    let args = ["rate", "--set", "scheme=af_overlapped", "--samples", "8192"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["sweep", "--preset", "fig5", "--samples", "8192"];
    let default = ok(&args);
    let single = Command::new(env!("CARGO_BIN_EXE_relaycap"))
        .args(args)
        .env("RELAYCAP_THREADS", "1")
        .output()
        .unwrap();
    assert!(single.status.success());
    assert_eq!(String::from_utf8(single.stdout).unwrap(), default);

    let bad = Command::new(env!("CARGO_BIN_EXE_relaycap"))
        .args(args)
        .env("RELAYCAP_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("RELAYCAP_THREADS"));
}

#[test]
fn default_seed_is_echoed() {
    let out = ok(&["rate", "--samples", "4096"]);
    assert_eq!(value(&out, "seed"), "12648430");
    let out = ok(&["rate", "--samples", "4096", "--seed", "7"]);
    assert_eq!(value(&out, "seed"), "7");
}

#[test]
fn zero_power_gives_zero_rate() {
    for scheme in [
        "af_nonoverlapped",
        "af_overlapped",
        "df_repetition_nonoverlapped",
        "df_repetition_overlapped",
        "df_parallel",
        "direct",
    ] {
        let out = ok(&[
            "rate",
            "--set",
            &format!("scheme={scheme}"),
            "--set",
            "ps=0",
            "--set",
            "pr=0",
            "--samples",
            "4096",
        ]);
        assert_eq!(value(&out, "rate").parse::<f64>().unwrap(), 0.0, "{scheme}");
    }
}

#[test]
fn errors_name_the_offending_key() {
    for (args, key) in [
        (vec!["rate", "--set", "bogus=1"], "bogus"),
        (vec!["rate", "--set", "alpha=0.7"], "alpha"),
        (vec!["rate", "--set", "delta_s=1.5"], "delta_s"),
        (vec!["rate", "--set", "m=two"], "m"),
        (vec!["rate", "--set", "p=1", "--set", "ps=1"], "p"),
        (vec!["sweep", "--set", "x=alpha"], "x_values"),
        (vec!["optimize"], "target"),
    ] {
        let out = relaycap(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{args:?}: {err}");
    }
}

#[test]
fn layers_apply_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(
        &path,
        "# channel\nscheme = df_parallel\nseed = 5\nalpha = 0.3\n",
    )
    .unwrap();
    let conf = path.to_str().unwrap();
    let out = ok(&["rate", "--config", conf, "--samples", "4096"]);
    assert_eq!(value(&out, "scheme"), "df_parallel");
    assert_eq!(value(&out, "seed"), "5");
    assert_eq!(value(&out, "alpha"), "0.3");
    let out = ok(&[
        "rate",
        "--config",
        conf,
        "--seed",
        "9",
        "--set",
        "alpha=0.4",
        "--samples",
        "4096",
    ]);
    assert_eq!(value(&out, "seed"), "9");
    assert_eq!(value(&out, "alpha"), "0.4");
    let out = ok(&[
        "rate",
        "--config",
        conf,
        "--seed",
        "9",
        "--set",
        "seed=11",
        "--samples",
        "4096",
    ]);
    assert_eq!(value(&out, "seed"), "11");
}

#[test]
fn csv_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let summary = ok(&["sweep", "--preset", "fig9", "--samples", "4096", "--out", p]);
    assert_eq!(value(&summary, "rows"), "300");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let rows: Vec<SweepRow> = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 300);
    assert!(rows.iter().all(|r| r.seed == 0xC0FFEE));
    let direct: Vec<_> = rows.iter().filter(|r| r.scheme == "direct").collect();
    assert_eq!(direct.len(), 150);
    assert!(direct
        .iter()
        .all(|r| r.pr == 0.0 && r.ps == 100.0 && r.theta.is_none()));
    assert!(direct
        .iter()
        .all(|r| r.rate == direct[0].rate || r.sigma_sd != direct[0].sigma_sd));

    let stdout = ok(&["sweep", "--preset", "fig9", "--samples", "4096"]);
    assert_eq!(stdout, text);
}

#[test]
fn optimize_writes_its_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = ok(&[
        "optimize",
        "--set",
        "target=alpha",
        "--set",
        "scheme=af_overlapped",
        "--samples",
        "4096",
        "--out",
        path.to_str().unwrap(),
    ]);
    let trace: Vec<TraceRow> = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(
        trace.len(),
        value(&out, "candidates").parse::<usize>().unwrap()
    );
    let best = trace.iter().map(|t| t.rate).fold(f64::MIN, f64::max);
    assert_eq!(value(&out, "rate").parse::<f64>().unwrap(), best);
}

#[test]
fn snapped_alpha_fits_the_block() {
    let out = ok(&[
        "rate",
        "--set",
        "m=12",
        "--set",
        "alpha=0.26",
        "--snap-alpha",
        "--samples",
        "4096",
    ]);
    assert_eq!(value(&out, "alpha"), "0.3");
}

#[test]
fn validate_reports_and_catches_a_mutation() {
    let out = relaycap(&[
        "validate",
        "--set",
        "points=5",
        "--set",
        "n_blocks=500",
        "--samples",
        "8192",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("WARN insufficient samples"), "{text}");

    let out = relaycap(&[
        "validate",
        "--set",
        "scheme=af_nonoverlapped",
        "--set",
        "mutate_c_sr=1.1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(1), "{text}");
    assert_eq!(value(&text, "result"), "fail");

    let out = relaycap(&["validate", "--set", "scheme=af_nonoverlapped"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(value(&text, "result"), "pass");
}

#[test]
fn every_preset_runs() {
    for p in PRESETS {
        let (cmd, samples) = match p.command {
            PresetCommand::Sweep => ("sweep", "4096"),
            PresetCommand::BitEnergy => ("bit-energy", "20000"),
        };
        let text = ok(&[cmd, "--preset", p.name, "--samples", samples]);
        let n = match p.name {
            "fig1" => parse_csv::<TrainingRow>(&text).unwrap().len(),
            "fig15" | "fig16" => parse_csv::<EnergyRow>(&text).unwrap().len(),
            _ => parse_csv::<SweepRow>(&text).unwrap().len(),
        };
        assert!(n > 0, "{}", p.name);
    }
    let out = relaycap(&["rate", "--preset", "fig2"]);
    assert!(!out.status.success());
}
