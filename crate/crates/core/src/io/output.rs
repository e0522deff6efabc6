//! Result bundles: CSV series and a JSON summary, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{emit_config, ExperimentConfig, ExperimentKind};
use crate::error::{NskError, Result};
use crate::experiments::{
    DecayResult, DiagnosticSeries, KernelResult, RunOutcome, RunStatus, SelfCheck, StrichartzResult, SweepResult,
};

/// Write `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| NskError::Io(e.error))?;
    Ok(())
}

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| NskError::Io(std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| NskError::Io(std::io::Error::other(e.to_string())))
}

/// `t` followed by the series columns, one row per stamp.
pub fn series_csv(series: &DiagnosticSeries) -> Result<Vec<u8>> {
    let mut header = vec!["t".to_string()];
    header.extend(series.columns.iter().cloned());
    csv_bytes(
        &header,
        series.times.iter().zip(&series.rows).map(|(t, r)| {
            std::iter::once(fmt17(*t)).chain(r.iter().map(|v| fmt17(*v))).collect()
        }),
    )
}

fn pairs_csv(names: [&str; 2], pairs: impl Iterator<Item = (f64, f64)>) -> Result<Vec<u8>> {
    csv_bytes(
        &names.map(String::from),
        pairs.map(|(a, b)| vec![fmt17(a), fmt17(b)]),
    )
}

/// Outcome of one experiment, ready to be written.
#[derive(Clone, Debug)]
pub enum Report {
    Simulate(RunOutcome),
    Sweep(SweepResult),
    Decay(DecayResult),
    Kernel(KernelResult),
    Strichartz(StrichartzResult),
    Selftest(Vec<SelfCheck>),
}

/// Overall status of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Status {
    pub status: &'static str,
    pub reason: Option<String>,
    pub message: Option<String>,
}

impl Status {
    fn completed() -> Self {
        Self {
            status: "completed",
            reason: None,
            message: None,
        }
    }

    fn from_run(s: &RunStatus) -> Self {
        match s {
            RunStatus::Completed => Self::completed(),
            RunStatus::Aborted { reason, message, .. } => Self {
                status: "aborted",
                reason: Some(reason.clone()),
                message: Some(message.clone()),
            },
        }
    }

    pub fn is_completed(&self) -> bool {
        self.status == "completed"
    }
}

impl Report {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Report::Simulate(_) => ExperimentKind::Simulate,
            Report::Sweep(_) => ExperimentKind::SweepKappa,
            Report::Decay(_) => ExperimentKind::Decay,
            Report::Kernel(_) => ExperimentKind::Kernel,
            Report::Strichartz(_) => ExperimentKind::Strichartz,
            Report::Selftest(_) => ExperimentKind::BesovSelftest,
        }
    }

    pub fn status(&self) -> Status {
        match self {
            Report::Simulate(r) => Status::from_run(&r.status),
            Report::Decay(d) => Status::from_run(&d.run.status),
            Report::Sweep(s) => s
                .members
                .iter()
                .find(|m| !m.status.is_completed())
                .map(|m| Status::from_run(&m.status))
                .unwrap_or_else(Status::completed),
            Report::Kernel(_) | Report::Strichartz(_) => Status::completed(),
            Report::Selftest(c) => match c.iter().find(|c| !c.passed) {
                None => Status::completed(),
                Some(f) => Status {
                    status: "failed",
                    reason: Some("selftest".into()),
                    message: Some(format!("{} = {} outside [{}, {}]", f.name, f.value, f.bounds.0, f.bounds.1)),
                },
            },
        }
    }

    fn results(&self) -> Result<Value> {
        Ok(match self {
            Report::Simulate(r) => serde_json::to_value(r)?,
            Report::Sweep(s) => serde_json::to_value(s)?,
            Report::Decay(d) => serde_json::to_value(d)?,
            Report::Kernel(k) => serde_json::to_value(k)?,
            Report::Strichartz(s) => serde_json::to_value(s)?,
            Report::Selftest(c) => serde_json::to_value(c)?,
        })
    }

    /// Data files as `(name, bytes)`.
    fn files(&self) -> Result<Vec<(String, Vec<u8>)>> {
        Ok(match self {
            Report::Simulate(r) => vec![("series.csv".into(), series_csv(&r.series)?)],
            Report::Decay(d) => vec![("series.csv".into(), series_csv(&d.run.series)?)],
            Report::Sweep(s) => s
                .members
                .iter()
                .enumerate()
                .map(|(i, m)| Ok((format!("series_kappa_{i}.csv"), series_csv(&m.series)?)))
                .collect::<Result<_>>()?,
            Report::Kernel(k) => vec![
                ("kernel_t.csv".into(), pairs_csv(["t", "norm"], k.t_samples.iter().map(|s| (s.t, s.norm)))?),
                (
                    "kernel_kappa.csv".into(),
                    pairs_csv(["kappa", "norm"], k.kappa_samples.iter().map(|s| (s.kappa, s.norm)))?,
                ),
            ],
            Report::Strichartz(s) => vec![(
                "strichartz.csv".into(),
                pairs_csv(["kappa", "norm"], s.kappas.iter().cloned().zip(s.norms.iter().cloned()))?,
            )],
            Report::Selftest(_) => Vec::new(),
        })
    }
}

/// Paths written for one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultBundle {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: PathBuf,
}

fn summary_value(kind: ExperimentKind, status: &Status, cfg: Option<&ExperimentConfig>, results: Value, files: &[String]) -> Value {
    json!({
        "kind": kind.as_str(),
        "status": status.status,
        "reason": status.reason,
        "message": status.message,
        "config": cfg.map(|c| serde_json::to_value(c).unwrap_or(Value::Null)),
        "config_text": cfg.map(emit_config),
        "derived": cfg.map(|c| { let (delta, p) = c.delta_p(); json!({"delta": delta, "p": p}) }),
        "results": results,
        "files": files,
        "versions": {"nsk-core": env!("CARGO_PKG_VERSION")},
    })
}

fn write_summary(dir: &Path, value: &Value) -> Result<PathBuf> {
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

/// Write the data files and `summary.json` for `report` into `dir`.
pub fn emit_results(report: &Report, cfg: Option<&ExperimentConfig>, dir: &Path) -> Result<ResultBundle> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut names = Vec::new();
    for (name, bytes) in report.files()? {
        let path = dir.join(&name);
        write_atomic(&path, &bytes)?;
        files.push(path);
        names.push(name);
    }
    let summary = write_summary(dir, &summary_value(report.kind(), &report.status(), cfg, report.results()?, &names))?;
    Ok(ResultBundle {
        dir: dir.to_path_buf(),
        files,
        summary,
    })
}

/// Summary for a run that failed before producing a report.
pub fn emit_error(kind: ExperimentKind, cfg: Option<&ExperimentConfig>, err: &NskError, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let status = Status {
        status: if err.is_runtime_abort() { "aborted" } else { "error" },
        reason: Some(err.reason().into()),
        message: Some(err.to_string()),
    };
    write_summary(dir, &summary_value(kind, &status, cfg, Value::Null, &[]))
}

/// Wall-clock sidecar, kept out of the summary so bundles stay byte-stable.
pub fn write_timing(dir: &Path, seconds: f64, threads: usize) -> Result<PathBuf> {
    let path = dir.join("timing.json");
    let text = serde_json::to_string_pretty(&json!({"wall_seconds": seconds, "threads": threads}))? + "\n";
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
