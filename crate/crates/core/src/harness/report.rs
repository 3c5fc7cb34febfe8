//! Report artifacts: the flat per-run table, trace tables, filter-sample
//! tables, and the structured text summary.
//!
//! Every tabular file starts with `#`-prefixed metadata lines embedding
//! the resolved configuration, then a CSV header row. Numeric fields are
//! printed with 17 significant digits so a reload reproduces every f64
//! bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use super::{FamilyAggregate, RunEntry, RunReport, TraceRecord};
use crate::error::{Error, Result};
use crate::sequences::FamilyKind;
use crate::thompson;

/// 17-significant-digit scientific form; round-trips any f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_runs_csv(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {}", report.config_json);
    let _ = writeln!(out, "# quantile rule: linear interpolation at rank (n-1)q");
    let _ = writeln!(
        out,
        "spectrum_seed,family,initial_infidelity,best_infidelity,best_episode,action_word"
    );
    for e in &report.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.spectrum_seed,
            e.family,
            fmt_g17(e.initial_infidelity),
            fmt_g17(e.best_infidelity),
            e.best_episode,
            e.action_word
        );
    }
    out
}

/// Parses a runs table written by [`write_runs_csv`] (metadata lines are
/// skipped). Returns (config_json, entries with per-run fields only).
pub fn read_runs_csv(text: &str) -> Result<(String, Vec<RunEntry>)> {
    let mut config_json = String::new();
    let mut entries = Vec::new();
    let mut saw_header = false;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# config: ") {
            config_json = rest.to_string();
            continue;
        }
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !saw_header {
            saw_header = true; // header row
            continue;
        }
        let fields: Vec<&str> = line.splitn(6, ',').collect();
        if fields.len() != 6 {
            return Err(Error::MalformedFile {
                path: "<runs csv>".into(),
                reason: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::MalformedFile {
                path: "<runs csv>".into(),
                reason: format!("bad float '{s}': {e}"),
            })
        };
        entries.push(RunEntry {
            spectrum_index: entries.len(),
            spectrum_seed: fields[0].parse().map_err(|e| Error::MalformedFile {
                path: "<runs csv>".into(),
                reason: format!("bad seed: {e}"),
            })?,
            family: fields[1].parse()?,
            initial_infidelity: parse_f(fields[2])?,
            best_infidelity: parse_f(fields[3])?,
            best_episode: fields[4].parse().map_err(|e| Error::MalformedFile {
                path: "<runs csv>".into(),
                reason: format!("bad episode: {e}"),
            })?,
            action_word: fields[5].to_string(),
            best_times: Vec::new(),
            abort: None,
        });
    }
    Ok((config_json, entries))
}

pub fn write_trace_csv(config_json: &str, records: &[TraceRecord]) -> String {
    let n = records.first().map_or(0, |r| r.times.len());
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_json}");
    let mut header = String::from("step,action");
    for j in 1..=n {
        let _ = write!(header, ",t_{j}");
    }
    header.push_str(",infidelity");
    let _ = writeln!(out, "{header}");
    for r in records {
        let action = r.action.map_or("-".to_string(), |a| a.to_string());
        let mut row = format!("{},{}", r.step, action);
        for t in &r.times {
            let _ = write!(row, ",{}", fmt_g17(*t));
        }
        let _ = write!(row, ",{}", fmt_g17(r.infidelity));
        let _ = writeln!(out, "{row}");
    }
    out
}

pub fn write_filters_csv(config_json: &str, samples: &[(usize, f64, f64)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_json}");
    let _ = writeln!(out, "step,omega,filter_value");
    for &(step, omega, value) in samples {
        let _ = writeln!(out, "{step},{},{}", fmt_g17(omega), fmt_g17(value));
    }
    out
}

fn aggregate_block(out: &mut String, agg: &FamilyAggregate) {
    let fam = agg.family;
    let _ = writeln!(out, "family {fam}: {} runs ({} aborted)", agg.runs, agg.aborted);
    for (label, stats) in [("initial", &agg.initial), ("best", &agg.best)] {
        let _ = writeln!(
            out,
            "  {label:<8} 1-p_avg  min {}  q1 {}  median {}  q3 {}  max {}  mean {}",
            fmt_g17(stats.min),
            fmt_g17(stats.q1),
            fmt_g17(stats.median),
            fmt_g17(stats.q3),
            fmt_g17(stats.max),
            fmt_g17(stats.mean),
        );
    }
    if agg.best.median > 0.0 && agg.best.mean > 0.0 {
        let _ = writeln!(
            out,
            "  reduction factor  median {:.4}  mean {:.4}",
            agg.initial.median / agg.best.median,
            agg.initial.mean / agg.best.mean,
        );
    }
}

pub fn write_report_txt(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pulse-sequence optimization benchmark report");
    let _ = writeln!(out, "config: {}", report.config_json);
    let _ = writeln!(out, "quantile rule: linear interpolation at rank (n-1)q");
    let _ = writeln!(
        out,
        "soft-update convention: {}",
        if report.soft_update_transposed {
            "transposed (target <- (1-tau)*target + tau*online)"
        } else {
            "as-configured default (target <- tau*target + (1-tau)*online)"
        }
    );
    let _ = writeln!(out);
    for agg in &report.aggregates {
        aggregate_block(&mut out, agg);
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "per-run best sequences:");
    for e in &report.entries {
        let times = e.best_times.iter().map(|t| fmt_g17(*t)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(
            out,
            "  {} seed={} episode={} 1-p_avg={} times=[{}]{}",
            e.family,
            e.spectrum_seed,
            e.best_episode,
            fmt_g17(e.best_infidelity),
            times,
            e.abort.as_deref().map(|m| format!("  ABORTED: {m}")).unwrap_or_default(),
        );
    }
    out
}

/// Recomputes aggregates from a parsed runs table (the `report` command).
pub fn summarize_entries(config_json: &str, entries: Vec<RunEntry>) -> RunReport {
    let mut families: Vec<FamilyKind> = Vec::new();
    for e in &entries {
        if !families.contains(&e.family) {
            families.push(e.family);
        }
    }
    let aggregates = families
        .iter()
        .filter_map(|&family| super::aggregate_family(family, &entries))
        .collect();
    RunReport {
        config_json: config_json.to_string(),
        soft_update_transposed: false,
        entries,
        aggregates,
    }
}

/// Writes every benchmark artifact under `dir`.
pub fn persist_report(dir: &Path, report: &RunReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("runs.csv"), write_runs_csv(report))?;
    std::fs::write(dir.join("report.txt"), write_report_txt(report))?;
    Ok(())
}

/// Best-sequence replay helper shared by trace writers.
pub fn parse_word(word: &str) -> Result<Vec<crate::thompson::ActionId>> {
    thompson::parse_action_word(word)
}
