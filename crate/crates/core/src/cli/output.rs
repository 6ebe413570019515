//! CSV/JSON writers, the gnuplot script and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::experiments::{DataTable, RunRecord};
use crate::Result;

pub const MANIFEST: &str = "manifest.json";
pub const PARTIAL_SUFFIX: &str = ".partial";

/// Fixed 15-significant-digit formatting, so equal numbers give equal bytes.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.14e}")
    } else {
        format!("{v}")
    }
}

pub fn render_csv(table: &DataTable) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# adiaproj {} {}", env!("CARGO_PKG_VERSION"), table.name);
    for c in &table.comments {
        let _ = writeln!(s, "# {c}");
    }
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct JsonTable<'a> {
    name: &'a str,
    comments: &'a [String],
    columns: &'a [String],
    rows: &'a [Vec<f64>],
}

pub fn render_json(table: &DataTable) -> String {
    let mirror = JsonTable {
        name: &table.name,
        comments: &table.comments,
        columns: &table.columns,
        rows: &table.rows,
    };
    serde_json::to_string_pretty(&mirror).expect("tables serialize") + "\n"
}

pub fn render_plot_script(name: &str, tables: &[DataTable]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for {name}");
    s.push_str("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n");
    for t in tables {
        let _ = writeln!(s, "\nset output '{}.png'", t.name);
        let _ = writeln!(
            s,
            "set xlabel '{}'",
            t.columns.first().map_or("", |c| c.as_str())
        );
        let series: Vec<String> = (2..=t.columns.len())
            .map(|c| format!("'{}.csv' using 1:{c} with linespoints", t.name))
            .collect();
        if series.is_empty() {
            continue;
        }
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'a str,
    status: &'a str,
    error: Option<&'a str>,
    workers: usize,
    wall_time_seconds: f64,
    config: serde_json::Value,
    runs: Vec<RunEntry<'a>>,
    files: &'a [FileEntry],
}

#[derive(Serialize)]
struct RunEntry<'a> {
    label: &'a str,
    adiabatic: bool,
    norm_compliant: bool,
    final_energy_variance: f64,
    max_norm_drift: f64,
    fidelity: Option<f64>,
}

/// Writes deliverables into one directory and remembers their hashes.
pub struct Sink {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Sink {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(contents.as_bytes())),
            bytes: contents.len(),
        });
        Ok(())
    }

    pub fn write_tables(&mut self, cfg: &ExperimentConfig, tables: &[DataTable]) -> Result<()> {
        for t in tables {
            if cfg.output.csv {
                self.write(&format!("{}.csv", t.name), &render_csv(t))?;
            }
            if cfg.output.json {
                self.write(&format!("{}.json", t.name), &render_json(t))?;
            }
        }
        if cfg.output.emit_plot_script && cfg.output.csv && !tables.is_empty() {
            let name = cfg.experiment.name();
            self.write(&format!("{name}.gp"), &render_plot_script(name, tables))?;
        }
        Ok(())
    }

    /// Renames everything written so far to `<name>.partial`.
    pub fn mark_partial(&mut self) -> Result<()> {
        for f in &mut self.files {
            let renamed = format!("{}{PARTIAL_SUFFIX}", f.path);
            fs::rename(self.dir.join(&f.path), self.dir.join(&renamed))?;
            f.path = renamed;
        }
        Ok(())
    }

    pub fn write_manifest(
        &self,
        cfg: &ExperimentConfig,
        runs: &[RunRecord],
        error: Option<&str>,
        wall_time_seconds: f64,
    ) -> Result<()> {
        let manifest = Manifest {
            tool: "adiaproj",
            version: env!("CARGO_PKG_VERSION"),
            experiment: cfg.experiment.name(),
            status: if error.is_some() { "error" } else { "ok" },
            error,
            workers: cfg.workers,
            wall_time_seconds,
            config: serde_json::to_value(&cfg.table).unwrap_or(serde_json::Value::Null),
            runs: runs
                .iter()
                .map(|r| RunEntry {
                    label: &r.label,
                    adiabatic: r.adiabatic,
                    norm_compliant: r.norm_compliant,
                    final_energy_variance: r.final_energy_variance,
                    max_norm_drift: r.max_norm_drift,
                    fidelity: r.fidelity,
                })
                .collect(),
            files: &self.files,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        fs::write(self.dir.join(MANIFEST), text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> DataTable {
        DataTable {
            name: "t".into(),
            comments: vec!["note".into()],
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![1.0, -0.951568472745], vec![0.1 + 0.2, 1e-300]],
        }
    }

    #[test]
    fn fixed_width_numbers() {
        assert_eq!(format_number(1.0), "1.00000000000000e0");
        assert_eq!(format_number(-0.5), "-5.00000000000000e-1");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let csv = render_csv(&table());
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# adiaproj"));
        assert_eq!(lines[1], "# note");
        assert_eq!(lines[2], "a,b");
        assert_eq!(lines[3], "1.00000000000000e0,-9.51568472745000e-1");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn json_mirror_round_trips() {
        let v: serde_json::Value = serde_json::from_str(&render_json(&table())).unwrap();
        assert_eq!(v["columns"][1], "b");
        assert_eq!(v["rows"][0][1].as_f64().unwrap(), -0.951568472745);
    }

    #[test]
    fn sink_hashes_and_partial() {
        let dir = tempfile::tempdir().unwrap();
        let mut sink = Sink::create(dir.path()).unwrap();
        sink.write("x.csv", "abc").unwrap();
        assert_eq!(
            sink.files()[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        sink.mark_partial().unwrap();
        assert!(dir.path().join("x.csv.partial").exists());
        assert!(!dir.path().join("x.csv").exists());
    }
}
