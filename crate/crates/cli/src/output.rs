//! Writing a [`Report`] to disk or to the terminal.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sgkink::experiments::{Bound, Check, Report};

use crate::plot;

#[derive(Serialize)]
struct Summary<'a> {
    title: &'a str,
    passed: bool,
    seed: u64,
    strict: bool,
    checks: &'a [Check],
    notes: &'a [String],
    /// Table name → CSV file name.
    tables: Vec<(String, String)>,
}

/// Writes `summary.json`, `<table>.csv` and `<table>.svg` into `dir`.
/// Returns the written paths.
pub fn write_bundle(dir: &Path, rep: &Report, seed: u64, strict: bool) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = vec![];
    let mut tables = vec![];
    for t in &rep.tables {
        let name = file_stem(&t.name);
        let csv = dir.join(format!("{name}.csv"));
        std::fs::write(&csv, t.to_csv())?;
        written.push(csv);
        tables.push((t.name.clone(), format!("{name}.csv")));
        if plot::plottable(t) {
            let svg = dir.join(format!("{name}.svg"));
            std::fs::write(&svg, plot::line_plot(t))?;
            written.push(svg);
        }
    }
    let summary = Summary { title: &rep.title, passed: rep.passed(), seed, strict, checks: &rep.checks, notes: &rep.notes, tables };
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' { c } else { '_' }).collect()
}

fn bound_text(c: &Check) -> String {
    match c.bound {
        Bound::AtMost => format!("<= {:e}", c.tolerance),
        Bound::AtLeast => format!(">= {:e}", c.tolerance),
        Bound::Near { target } => format!("= {target} +- {:e}", c.tolerance),
    }
}

/// One line per check plus the notes.
pub fn render(rep: &Report) -> String {
    let mut s = format!("{}\n", rep.title);
    for c in &rep.checks {
        let tag = serde_json::to_value(c.basis).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        s.push_str(&format!(
            "  {} {}: {:e} ({}, {})\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            bound_text(c),
            tag
        ));
    }
    for n in &rep.notes {
        s.push_str(&format!("  note: {n}\n"));
    }
    s
}
