//! On-disk layout of a run:
//!
//! ```text
//! <dir>/config.cfg     canonical configuration text
//! <dir>/raw.csv        one row per (cell, replication, quantity)
//! <dir>/report.json    the report
//! <dir>/plots/<figure>.csv   series,x,y,yerr
//! ```

use std::fs;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::experiments::Run;
use crate::report::{build_report, McReport, RawRow};
use crate::HarnessError;

fn write(path: &Path, content: &str) -> Result<(), HarnessError> {
    fs::write(path, content).map_err(|e| HarnessError::io_at(path, e))
}

/// CSV text for each figure of `report`, keyed by file name.
pub fn plot_files(report: &McReport) -> Result<Vec<(String, String)>, HarnessError> {
    report
        .figures
        .iter()
        .map(|(name, points)| {
            let mut w = csv::Writer::from_writer(Vec::new());
            for p in points {
                w.serialize(p)?;
            }
            let bytes = w.into_inner().map_err(|e| HarnessError::Config(e.to_string()))?;
            Ok((format!("{name}.csv"), String::from_utf8_lossy(&bytes).into_owned()))
        })
        .collect()
}

pub fn persist_run(run: &Run, dir: &Path) -> Result<(), HarnessError> {
    let plots = dir.join("plots");
    fs::create_dir_all(&plots).map_err(|e| HarnessError::io_at(&plots, e))?;
    write(&dir.join("config.cfg"), &run.config.to_text())?;

    let raw = dir.join("raw.csv");
    let mut w = csv::Writer::from_path(&raw)?;
    for r in &run.rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| HarnessError::io_at(&raw, e))?;

    write(&dir.join("report.json"), &run.report.to_json()?)?;
    for (name, text) in plot_files(&run.report)? {
        write(&plots.join(name), &text)?;
    }
    Ok(())
}

/// Reads a persisted run back and rebuilds its report from the raw rows.
pub fn load_run(dir: &Path) -> Result<Run, HarnessError> {
    let config = ExperimentConfig::load(&dir.join("config.cfg"))?;
    let mut reader = csv::Reader::from_path(dir.join("raw.csv"))?;
    let rows = reader.deserialize::<RawRow>().collect::<Result<Vec<_>, _>>()?;
    let report = build_report(&config, &rows)?;
    Ok(Run { config, rows, report })
}
