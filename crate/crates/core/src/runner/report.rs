//! Report types, CSV/JSON emission and the summary schema.
//!
//! CSV files always carry a header row; floats are written with 17
//! significant digits. `summary.json` follows [`SCHEMA_VERSION`] and is
//! validated by [`validate_summary`], which rejects unknown fields.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const SUMMARY_FILE: &str = "summary.json";

/// Round-trip exact float formatting for CSV cells.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub file_name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(file_name: impl Into<String>, header: &[&'static str]) -> Self {
        CsvTable {
            file_name: file_name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircularLawRow {
    pub n: usize,
    pub trials_ok: usize,
    pub mean_radial_ks: f64,
    pub max_radial_ks: f64,
    pub mean_angular_ks: f64,
    pub max_angular_ks: f64,
    pub mean_second_moment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarterCircleRow {
    pub n: usize,
    pub trials_ok: usize,
    pub mean_ks: f64,
    pub max_ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogPotentialRow {
    pub n: usize,
    pub z_re: f64,
    pub z_im: f64,
    pub u_limit: f64,
    /// `None` when every trial hit a singular shift or failed.
    pub mean_u_n: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub singular_shifts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsvPoint {
    pub epsilon: f64,
    pub threshold: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsvSummary {
    pub n: usize,
    pub z_re: f64,
    pub z_im: f64,
    pub k: f64,
    pub min_scaled_sn: Option<f64>,
    pub min_trial: Option<u64>,
    pub failures: usize,
    /// Least-squares slope of `log p_hat` against `log ε` over points with `0 < p_hat < 1`.
    pub tail_slope: Option<f64>,
    pub points: Vec<SsvPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombCltRow {
    pub n: usize,
    pub instances: usize,
    /// Exact enumeration (`n <= 8`) or sampled law.
    pub exact: bool,
    pub mean_ks: f64,
    pub max_ks: f64,
    pub min_be_bound: f64,
    pub all_within_bound: bool,
    pub near_degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationRow {
    pub n: usize,
    pub functional: String,
    pub lipschitz: f64,
    pub scaled_lipschitz: f64,
    pub mean: f64,
    pub sd: f64,
    /// `None` encodes the degenerate `+∞` sentinel.
    pub c_hat: Option<f64>,
    pub c_hat_moment: f64,
    pub degenerate: bool,
    pub dkw_slack: f64,
    pub tails_dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsRow {
    pub n: usize,
    pub mean: f64,
    pub second_moment: f64,
    pub cross_covariance: f64,
    pub expected_cross_covariance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Results {
    CircularLaw(Vec<CircularLawRow>),
    QuarterCircle(Vec<QuarterCircleRow>),
    LogPotential(Vec<LogPotentialRow>),
    Ssv(SsvSummary),
    CombClt(Vec<CombCltRow>),
    Concentration(Vec<ConcentrationRow>),
    MomentsOracle(MomentsRow),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: String,
    /// Canonical config echo; enough to re-run.
    pub config: BTreeMap<String, String>,
    /// Kernel calls attempted and failed.
    pub trials: usize,
    pub kernel_failures: usize,
    /// CSV files written next to the summary.
    pub artifacts: Vec<String>,
    pub results: Results,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}

/// Parses and checks a `summary.json` document.
pub fn validate_summary(text: &str) -> Result<Summary> {
    let summary: Summary = serde_json::from_str(text).map_err(|e| Error::Config {
        field: SUMMARY_FILE.into(),
        message: e.to_string(),
    })?;
    let bad = |message: String| Error::Config {
        field: SUMMARY_FILE.into(),
        message,
    };
    if summary.schema_version != SCHEMA_VERSION {
        return Err(bad(format!("unsupported schema version {}", summary.schema_version)));
    }
    if summary.config.get("experiment") != Some(&summary.experiment) {
        return Err(bad("config echo does not match the experiment".into()));
    }
    if summary.kernel_failures > summary.trials {
        return Err(bad("more failures than trials".into()));
    }
    Ok(summary)
}

/// Everything a run produced. Only `tables` and `summary` are written.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub summary: Summary,
    pub tables: Vec<CsvTable>,
    pub wall_clock: Duration,
    /// Filled in by [`write_report`].
    pub artifact_paths: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Writes `bytes` to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Writes the report's CSV tables or its JSON summary into `dir`.
pub fn write_report(report: &RunReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        ReportFormat::Csv => report
            .tables
            .iter()
            .map(|t| {
                let path = dir.join(&t.file_name);
                write_atomic(&path, t.render().as_bytes())?;
                Ok(path)
            })
            .collect(),
        ReportFormat::Json => {
            let path = dir.join(SUMMARY_FILE);
            write_atomic(&path, report.summary.to_json().as_bytes())?;
            Ok(vec![path])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = CsvTable::new("x.csv", &["trial", "index", "re", "im"]);
        assert_eq!(t.render(), "trial,index,re,im\n");
    }

    #[test]
    fn float_cells_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn summary_round_trips_and_rejects_unknown_fields() {
        let mut config = BTreeMap::new();
        config.insert("experiment".to_string(), "moments-oracle".to_string());
        let s = Summary {
            schema_version: SCHEMA_VERSION,
            experiment: "moments-oracle".into(),
            config,
            trials: 1,
            kernel_failures: 0,
            artifacts: vec!["moments.csv".into()],
            results: Results::MomentsOracle(MomentsRow {
                n: 2,
                mean: 0.0,
                second_moment: 1.0,
                cross_covariance: -1.0 / 3.0,
                expected_cross_covariance: -1.0 / 3.0,
            }),
        };
        let text = s.to_json();
        assert_eq!(validate_summary(&text).unwrap(), s);
        let tampered = text.replacen("\"trials\"", "\"extra\": 1,\n  \"trials\"", 1);
        assert!(validate_summary(&tampered).is_err());
        let wrong_version = text.replacen("\"schema_version\": 1", "\"schema_version\": 9", 1);
        assert!(validate_summary(&wrong_version).is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = std::env::temp_dir().join(format!("exchmat-report-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a.csv");
        write_atomic(&path, b"one\n").unwrap();
        write_atomic(&path, b"two\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two\n");
        assert!(!dir.join(".a.csv.tmp").exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
