use std::fs;

use nsk_core::experiments::{run_experiment, run_nsk};
use nsk_core::io::config::{emit_config, parse_config};
use nsk_core::io::output::{emit_error, emit_results, series_csv, Report};
use nsk_core::NskError;
use proptest::prelude::*;
use serde_json::Value;

const SIM: &str = "[grid]\nd = 2\nn = 16\nldom = 20\n[physics]\nkappa = 100\n[init]\nrecipe = ill-prepared\namplitude = 0.1\nseed = 4\nband = -1, 0\n[time]\ndt = 0.01\ntmax = 0.05\ncadence = 2\n[diagnostics]\nbesov = 0,2,1; 1,inf,2\nalpha = 0\n";

fn summary(dir: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn aborted_at_zero_gives_header_only_csv() {
    let cfg = parse_config(&SIM.replace("amplitude = 0.1", "amplitude = 80")).unwrap();
    let run = run_nsk(&cfg, 100.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bundle = emit_results(&Report::Simulate(run), Some(&cfg), dir.path()).unwrap();
    let csv = fs::read_to_string(&bundle.files[0]).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("t,E,D,W,V,"));
    let s = summary(dir.path());
    assert_eq!(s["status"], "aborted");
    assert_eq!(s["reason"], "invertibility");
}

#[test]
fn identical_runs_give_identical_bytes() {
    let cfg = parse_config(SIM).unwrap();
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        emit_results(&run_experiment(&cfg).unwrap(), Some(&cfg), d.path()).unwrap();
    }
    for name in ["series.csv", "summary.json"] {
        assert_eq!(fs::read(d1.path().join(name)).unwrap(), fs::read(d2.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn sweep_writes_one_series_per_kappa_and_one_summary() {
    let text = SIM.replace("kappa = 100", "kappa = 100, 1000, 10000") + "[experiment]\nkind = sweep-kappa\n";
    let cfg = parse_config(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bundle = emit_results(&run_experiment(&cfg).unwrap(), Some(&cfg), dir.path()).unwrap();
    assert_eq!(bundle.files.len(), 3);
    let mut names: Vec<String> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["series_kappa_0.csv", "series_kappa_1.csv", "series_kappa_2.csv", "summary.json"]);
    let s = summary(dir.path());
    assert_eq!(s["kind"], "sweep-kappa");
    assert!(s["results"]["compressible"]["slope"].is_number());
    assert_eq!(s["results"]["members"].as_array().unwrap().len(), 3);
}

#[test]
fn summary_echoes_the_config() {
    let cfg = parse_config(SIM).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_results(&run_experiment(&cfg).unwrap(), Some(&cfg), dir.path()).unwrap();
    let s = summary(dir.path());
    let echoed = parse_config(s["config_text"].as_str().unwrap()).unwrap();
    assert_eq!(echoed, cfg);
    assert_eq!(s["config"]["init"]["seed"], 4);
    assert_eq!(s["derived"]["p"], 10.0);
    assert_eq!(s["status"], "completed");
    assert!(s["reason"].is_null());
}

#[test]
fn series_values_have_seventeen_digits() {
    let cfg = parse_config(SIM).unwrap();
    let run = run_nsk(&cfg, 100.0).unwrap();
    let text = String::from_utf8(series_csv(&run.series).unwrap()).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, "t,E,D,W,V,\"B[0,2,1]\",\"B[1,inf,2]\",L2_Lam[0],Bneg[1]");
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{field}");
        }
    }
    // values round-trip exactly
    let last = text.lines().last().unwrap();
    let parsed: Vec<f64> = last.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert_eq!(&parsed, run.series.rows.last().unwrap());
}

#[test]
fn unwritable_directory_is_an_error() {
    let cfg = parse_config(SIM).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let r = emit_results(&run_experiment(&cfg).unwrap(), Some(&cfg), &blocker.join("out"));
    assert!(matches!(r, Err(NskError::Io(_))));
}

#[test]
fn error_summary_carries_the_reason() {
    let dir = tempfile::tempdir().unwrap();
    let err = parse_config("[grid]\nd = 2\nn = 32\nkapa = 3\n").unwrap_err();
    emit_error(nsk_core::io::ExperimentKind::Simulate, None, &err, dir.path()).unwrap();
    let s = summary(dir.path());
    assert_eq!(s["status"], "error");
    assert_eq!(s["reason"], "config");
    assert!(s["message"].as_str().unwrap().contains("line 4"));
}

fn arb_config_text() -> impl Strategy<Value = String> {
    (
        prop_oneof![Just(2usize), Just(3usize)],
        prop::collection::vec(1.0f64..1e5, 1..4),
        0.01f64..0.24,
        any::<u64>(),
        (-3i32..2, 0i32..3),
        (1e-4f64..0.1, 1usize..50, 1usize..20),
        prop::collection::vec(-2.0f64..3.0, 0..3),
        prop_oneof![Just("gaussian"), Just("well-prepared"), Just("ill-prepared")],
    )
        .prop_map(|(d, kappa, eps, seed, (ja, dj), (dt, nsteps, cadence), alpha, recipe)| {
            let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ");
            let mut t = format!(
                "[grid]\nd = {d}\nn = 32\nldom = 7.5\n[physics]\nkappa = {}\nepsilon = {eps}\npreset = variable-m\n[init]\nrecipe = {recipe}\nseed = {seed}\nband = {ja}, {}\n[time]\ndt = {dt}\ntmax = {}\ncadence = {cadence}\n[diagnostics]\nbesov = 0.5,2,1; -1,inf,inf\n",
                list(&kappa),
                ja + dj,
                dt * nsteps as f64
            );
            if !alpha.is_empty() {
                t.push_str(&format!("alpha = {}\n", list(&alpha)));
            }
            t
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trip(text in arb_config_text()) {
        let cfg = parse_config(&text).unwrap();
        let emitted = emit_config(&cfg);
        prop_assert_eq!(parse_config(&emitted).unwrap(), cfg.clone());
        prop_assert_eq!(emit_config(&parse_config(&emitted).unwrap()), emitted);
    }

    #[test]
    fn unknown_keys_are_rejected(key in "[a-z]{3,8}") {
        prop_assume!(!["d", "n", "ldom"].contains(&key.as_str()));
        let text = format!("[grid]\nd = 2\nn = 32\n{key} = 1\n[physics]\nkappa = 1\n[time]\ndt = 1\ntmax = 1\n");
        match parse_config(&text) {
            Err(NskError::Config { line, key: k, .. }) => {
                prop_assert_eq!(line, 4);
                prop_assert_eq!(k, format!("grid.{key}"));
            }
            other => prop_assert!(false, "expected config error, got {:?}", other),
        }
    }
}
