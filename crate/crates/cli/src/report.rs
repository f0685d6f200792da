//! Report emission: CSV tables with the resolved config embedded as a
//! comment header, plus pass/fail verdicts.  Reports carry no timestamps
//! so that identical (config, seed) runs are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

/// One pass/fail check against a declared tolerance.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Verdict { name: name.to_string(), pass, detail }
    }
}

/// Everything one experiment run produced.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn print_verdicts(&self) {
        for v in &self.verdicts {
            let tag = if v.pass { "PASS" } else { "FAIL" };
            println!("[{tag}] {}: {}", v.name, v.detail);
        }
    }
}

/// Deterministic shortest-round-trip float formatting for CSV cells.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

/// Write a CSV file: `# `-prefixed header lines (resolved config), a
/// column-name row, then the data rows.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    columns: &[&str],
    rows: &[Vec<String>],
) -> anyhow::Result<PathBuf> {
    let mut text = String::new();
    for line in header.lines() {
        writeln!(text, "# {line}").unwrap();
    }
    writeln!(text, "{}", columns.join(",")).unwrap();
    for row in rows {
        debug_assert_eq!(row.len(), columns.len(), "row width mismatch in {name}");
        writeln!(text, "{}", row.join(",")).unwrap();
    }
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Append the verdict table of a run as its own CSV.
pub fn write_verdicts(dir: &Path, header: &str, verdicts: &[Verdict]) -> anyhow::Result<PathBuf> {
    let rows: Vec<Vec<String>> = verdicts
        .iter()
        .map(|v| {
            vec![
                v.name.clone(),
                if v.pass { "pass" } else { "fail" }.to_string(),
                // Keep the CSV single-line per verdict.
                v.detail.replace(',', ";").replace('\n', " "),
            ]
        })
        .collect();
    write_csv(dir, "verdicts.csv", header, &["check", "verdict", "detail"], &rows)
}
