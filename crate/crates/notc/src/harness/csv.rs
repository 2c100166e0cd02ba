//! CSV readers and writers for experiment artifacts. All files are UTF-8
//! with `\n` line endings; reals carry up to 12 significant digits. None of
//! the fields can contain commas or quotes, so no quoting is needed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::aggregate::CurvePoint;
use crate::harness::experiment::TrialRecord;

pub const RECORDS_HEADER: &str = "run_id,trial,steps,accumulated_reward,phase,map_updates_delta";
pub const CURVE_HEADER: &str = "window_index,mean_best_reward,std_best_reward";
pub const UPDATES_HEADER: &str = "window_index,total_map_updates";
pub const WEATHER_HEADER: &str = "trial,v_max";

/// Formats a real with at most 12 significant digits, as compactly as the
/// value allows ("0", "-1000", "0.06").
pub fn fmt_real(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{value:.11e}").parse().expect("a rounded float reparses");
    rounded.to_string()
}

pub fn write_records(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{RECORDS_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.run_id,
            r.trial,
            r.steps,
            fmt_real(r.accumulated_reward),
            r.phase,
            r.map_updates_delta
        )?;
    }
    out.flush()?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(line_no: usize, name: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::Malformed(format!("records line {line_no}: bad {name} '{value}'"))
    })
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(RECORDS_HEADER) {
        return Err(Error::Malformed(format!(
            "records file must start with the header '{RECORDS_HEADER}'"
        )));
    }
    let mut records = Vec::new();
    for (index, line) in lines.enumerate() {
        let line_no = index + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Malformed(format!(
                "records line {line_no}: expected 6 fields, found {}",
                fields.len()
            )));
        }
        records.push(TrialRecord {
            run_id: parse_field(line_no, "run_id", fields[0])?,
            trial: parse_field(line_no, "trial", fields[1])?,
            steps: parse_field(line_no, "steps", fields[2])?,
            accumulated_reward: parse_field(line_no, "accumulated_reward", fields[3])?,
            phase: parse_field(line_no, "phase", fields[4])?,
            map_updates_delta: parse_field(line_no, "map_updates_delta", fields[5])?,
        });
    }
    Ok(records)
}

pub fn write_curve(path: &Path, curve: &[CurvePoint]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{CURVE_HEADER}")?;
    for point in curve {
        writeln!(
            out,
            "{},{},{}",
            point.window_index,
            fmt_real(point.mean_best_reward),
            fmt_real(point.std_best_reward)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_updates(path: &Path, report: &[(u64, u64)]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{UPDATES_HEADER}")?;
    for &(window_index, total) in report {
        writeln!(out, "{window_index},{total}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_weather(path: &Path, series: &[(u64, f64)]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{WEATHER_HEADER}")?;
    for &(trial, v_max) in series {
        writeln!(out, "{trial},{}", fmt_real(v_max))?;
    }
    out.flush()?;
    Ok(())
}
