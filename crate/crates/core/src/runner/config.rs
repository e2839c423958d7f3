//! Flat `key = value` experiment configs.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' anything
//! entry   := key ws* '=' ws* value [ws* comment]
//! value   := item (',' item)*
//! ```
//!
//! Keys may appear once. Unknown keys, and keys that do not apply to the
//! chosen experiment, are rejected. Complex literals use the `a+bi` form
//! (`1`, `0.5+0.3i`, `-2i`). `master_seed` accepts decimal or `0x` hex.
//!
//! | key            | experiments                         | default |
//! |----------------|-------------------------------------|---------|
//! | `experiment`   | all (required)                      |         |
//! | `master_seed`  | all                                 | `0`     |
//! | `output_dir`   | all                                 | `out`   |
//! | `n`            | all (list; single for ssv, moments-oracle) | required |
//! | `trials`       | all but comb-clt, moments-oracle    | `1`     |
//! | `seed_kind`    | all but comb-clt: `rademacher`, `sparse`, `gaussian`, `file` | `rademacher` |
//! | `density`      | `seed_kind = sparse` (required)     |         |
//! | `k_target`     | `seed_kind = sparse`                | `1`     |
//! | `seed_file`    | `seed_kind = file` (required), relative to the config file | |
//! | `z`            | log-potential (list), ssv (single)  | required |
//! | `epsilons`     | ssv                                 | `0.01,0.02,0.05,0.1,0.2,0.5,1` |
//! | `instances`    | comb-clt                            | `20`    |
//! | `draws`        | comb-clt (used when `n > 8`)        | `100000` |
//! | `functional`   | concentration: `operator_norm`, `linear`, `hs_norm_of_submatrix`, `distance_to_fixed_subspace` | `operator_norm` |
//! | `rows`         | concentration, `hs_norm_of_submatrix` | `0`   |
//! | `subspace_dim` | concentration, `distance_to_fixed_subspace` | `1` |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::combclt::MAX_ENUMERATION_N;
use crate::concentration::MIN_TAIL_SAMPLES;
use crate::ensemble::{make_seed, read_seed_file, SeedKind};
use crate::error::{Error, Result};
use crate::linalg::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    CircularLaw,
    QuarterCircle,
    LogPotential,
    Ssv,
    CombClt,
    Concentration,
    MomentsOracle,
}

const SEED_KEYS: [&str; 4] = ["seed_kind", "density", "k_target", "seed_file"];

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::CircularLaw,
        Experiment::QuarterCircle,
        Experiment::LogPotential,
        Experiment::Ssv,
        Experiment::CombClt,
        Experiment::Concentration,
        Experiment::MomentsOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CircularLaw => "circular-law",
            Experiment::QuarterCircle => "quarter-circle",
            Experiment::LogPotential => "log-potential",
            Experiment::Ssv => "ssv",
            Experiment::CombClt => "comb-clt",
            Experiment::Concentration => "concentration",
            Experiment::MomentsOracle => "moments-oracle",
        }
    }

    fn keys(self) -> Vec<&'static str> {
        let mut keys = vec!["experiment", "master_seed", "output_dir", "n"];
        let specific: &[&str] = match self {
            Experiment::CircularLaw | Experiment::QuarterCircle => &["trials"],
            Experiment::LogPotential => &["trials", "z"],
            Experiment::Ssv => &["trials", "z", "epsilons"],
            Experiment::CombClt => &["instances", "draws"],
            Experiment::Concentration => &["trials", "functional", "rows", "subspace_dim"],
            Experiment::MomentsOracle => &[],
        };
        keys.extend_from_slice(specific);
        if self != Experiment::CombClt {
            keys.extend_from_slice(&SEED_KEYS);
        }
        keys
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            format!("unknown experiment `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeedSpec {
    Rademacher,
    Sparse { density: f64, k_target: f64 },
    Gaussian,
    /// Seed read from a file; `entries` are row-major.
    File { path: PathBuf, n: usize, entries: Vec<f64> },
}

impl SeedSpec {
    pub fn kind(&self) -> SeedKind {
        match self {
            SeedSpec::Rademacher => SeedKind::Rademacher,
            SeedSpec::Sparse { density, k_target } => SeedKind::Sparse {
                density: *density,
                k_target: *k_target,
            },
            SeedSpec::Gaussian => SeedKind::GaussianNormalized,
            SeedSpec::File { entries, .. } => SeedKind::FromEntries(entries.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionalChoice {
    OperatorNorm,
    /// Row sum of row 0 divided by `√n` (unit coefficient vector).
    Linear,
    HsNormOfSubmatrix(Vec<usize>),
    /// Distance from row 0 to the span of the first `k` coordinate vectors.
    DistanceToFixedSubspace(usize),
}

impl FunctionalChoice {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionalChoice::OperatorNorm => "operator_norm",
            FunctionalChoice::Linear => "linear",
            FunctionalChoice::HsNormOfSubmatrix(_) => "hs_norm_of_submatrix",
            FunctionalChoice::DistanceToFixedSubspace(_) => "distance_to_fixed_subspace",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: Vec<usize>,
    pub seed: SeedSpec,
    pub z: Vec<Complex64>,
    pub trials: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub epsilons: Vec<f64>,
    pub instances: usize,
    pub draws: usize,
    pub functional: FunctionalChoice,
}

fn cfg_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn list<T: FromStr>(field: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<T>()
                .map_err(|_| cfg_err(field, format!("cannot parse `{item}`")))
        })
        .collect()
}

fn single<T: FromStr>(field: &str, value: &str) -> Result<T> {
    let mut items = list::<T>(field, value)?;
    if items.len() != 1 {
        return Err(cfg_err(field, "expected a single value"));
    }
    Ok(items.remove(0))
}

fn parse_u64(field: &str, value: &str) -> Result<u64> {
    let v = value.trim();
    let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => v.parse(),
    };
    parsed.map_err(|_| cfg_err(field, format!("cannot parse `{v}` as an unsigned 64-bit integer")))
}

pub fn format_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

const DEFAULT_EPSILONS: [f64; 7] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];

impl ExperimentConfig {
    /// Parses config text. Relative seed files resolve against `base_dir`.
    pub fn parse(text: &str, origin: &str, base_dir: &Path) -> Result<Self> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_string(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(parse_err("empty key or value".into()));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(parse_err(format!("duplicate key `{key}`")));
            }
        }
        Self::from_entries(&entries, base_dir)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, &path.display().to_string(), base)
    }

    /// Builds and validates a config from already-split entries.
    pub fn from_entries(entries: &BTreeMap<String, String>, base_dir: &Path) -> Result<Self> {
        let experiment: Experiment = entries
            .get("experiment")
            .ok_or_else(|| cfg_err("experiment", "missing"))?
            .parse()
            .map_err(|m: String| cfg_err("experiment", m))?;
        let allowed = experiment.keys();
        if let Some(bad) = entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            let message = if [
                "n", "trials", "z", "epsilons", "instances", "draws", "functional", "rows", "subspace_dim",
            ]
            .contains(&bad.as_str())
                || SEED_KEYS.contains(&bad.as_str())
            {
                format!("not used by experiment `{}`", experiment.name())
            } else {
                "unknown key".to_string()
            };
            return Err(cfg_err(bad, message));
        }
        let get = |k: &str| entries.get(k).map(String::as_str);

        let n: Vec<usize> = list("n", get("n").ok_or_else(|| cfg_err("n", "missing"))?)?;
        if let Some(&bad) = n.iter().find(|&&v| v < 2) {
            return Err(cfg_err("n", format!("{bad} is below the minimum 2")));
        }
        let trials = get("trials").map(|v| single::<usize>("trials", v)).transpose()?.unwrap_or(1);
        if trials == 0 {
            return Err(cfg_err("trials", "must be at least 1"));
        }
        let master_seed = get("master_seed").map(|v| parse_u64("master_seed", v)).transpose()?.unwrap_or(0);
        let output_dir = PathBuf::from(get("output_dir").unwrap_or("out"));

        let seed_kind = get("seed_kind").unwrap_or("rademacher");
        let requires = |key: &str, kind: &str| -> Result<()> {
            if get(key).is_some() && seed_kind != kind {
                return Err(cfg_err(key, format!("only used with seed_kind = {kind}")));
            }
            Ok(())
        };
        requires("density", "sparse")?;
        requires("k_target", "sparse")?;
        requires("seed_file", "file")?;
        let seed = match seed_kind {
            "rademacher" => SeedSpec::Rademacher,
            "gaussian" => SeedSpec::Gaussian,
            "sparse" => SeedSpec::Sparse {
                density: single("density", get("density").ok_or_else(|| cfg_err("density", "missing"))?)?,
                k_target: get("k_target").map(|v| single("k_target", v)).transpose()?.unwrap_or(1.0),
            },
            "file" => {
                let rel = get("seed_file").ok_or_else(|| cfg_err("seed_file", "missing"))?;
                let path = base_dir.join(rel);
                let seed = read_seed_file(&path).map_err(|e| cfg_err("seed_file", e.to_string()))?;
                SeedSpec::File {
                    path: PathBuf::from(rel),
                    n: seed.n(),
                    entries: seed.entries().to_vec(),
                }
            }
            other => {
                return Err(cfg_err(
                    "seed_kind",
                    format!("unknown seed kind `{other}` (expected rademacher, sparse, gaussian or file)"),
                ))
            }
        };

        let z: Vec<Complex64> = match get("z") {
            Some(v) => list("z", v)?,
            None => Vec::new(),
        };
        if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(cfg_err("z", "values must be finite"));
        }
        let epsilons = match get("epsilons") {
            Some(v) => list("epsilons", v)?,
            None => DEFAULT_EPSILONS.to_vec(),
        };
        let instances = get("instances").map(|v| single("instances", v)).transpose()?.unwrap_or(20);
        let draws = get("draws").map(|v| single("draws", v)).transpose()?.unwrap_or(100_000);
        let functional = match get("functional").unwrap_or("operator_norm") {
            "operator_norm" => FunctionalChoice::OperatorNorm,
            "linear" => FunctionalChoice::Linear,
            "hs_norm_of_submatrix" => FunctionalChoice::HsNormOfSubmatrix(match get("rows") {
                Some(v) => list("rows", v)?,
                None => vec![0],
            }),
            "distance_to_fixed_subspace" => FunctionalChoice::DistanceToFixedSubspace(
                get("subspace_dim").map(|v| single("subspace_dim", v)).transpose()?.unwrap_or(1),
            ),
            other => return Err(cfg_err("functional", format!("unknown functional `{other}`"))),
        };
        if get("rows").is_some() && !matches!(functional, FunctionalChoice::HsNormOfSubmatrix(_)) {
            return Err(cfg_err("rows", "only used with functional = hs_norm_of_submatrix"));
        }
        if get("subspace_dim").is_some() && !matches!(functional, FunctionalChoice::DistanceToFixedSubspace(_)) {
            return Err(cfg_err("subspace_dim", "only used with functional = distance_to_fixed_subspace"));
        }

        let config = ExperimentConfig {
            experiment,
            n,
            seed,
            z,
            trials,
            master_seed,
            output_dir,
            epsilons,
            instances,
            draws,
            functional,
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks every referenced parameter before any computation runs.
    pub fn validate(&self) -> Result<()> {
        let e = self.experiment;
        match e {
            Experiment::Ssv | Experiment::MomentsOracle if self.n.len() != 1 => {
                return Err(cfg_err("n", format!("`{}` takes a single n", e.name())))
            }
            _ => {}
        }
        match e {
            Experiment::LogPotential if self.z.is_empty() => return Err(cfg_err("z", "missing")),
            Experiment::Ssv if self.z.len() != 1 => return Err(cfg_err("z", "ssv takes a single z")),
            _ => {}
        }
        if e == Experiment::MomentsOracle && self.n[0] > 3 {
            return Err(cfg_err("n", "exact moments enumerate (n²)! permutations; n must be 2 or 3"));
        }
        if e == Experiment::Ssv {
            if self.epsilons.is_empty() || self.epsilons.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(cfg_err("epsilons", "values must be positive and finite"));
            }
            if self.epsilons.windows(2).any(|w| w[0] >= w[1]) {
                return Err(cfg_err("epsilons", "must be strictly increasing"));
            }
        }
        if e == Experiment::CombClt {
            if self.instances == 0 {
                return Err(cfg_err("instances", "must be at least 1"));
            }
            if self.n.iter().any(|&n| n > MAX_ENUMERATION_N) && self.draws < MIN_TAIL_SAMPLES {
                return Err(cfg_err("draws", format!("must be at least {MIN_TAIL_SAMPLES}")));
            }
        }
        if e == Experiment::Concentration {
            if self.trials < MIN_TAIL_SAMPLES {
                return Err(cfg_err("trials", format!("tail fits need at least {MIN_TAIL_SAMPLES} trials")));
            }
            for &n in &self.n {
                match &self.functional {
                    FunctionalChoice::HsNormOfSubmatrix(rows) if rows.is_empty() || rows.iter().any(|&r| r >= n) => {
                        return Err(cfg_err("rows", format!("row indices must be below n = {n}")))
                    }
                    FunctionalChoice::DistanceToFixedSubspace(k) if *k >= n => {
                        return Err(cfg_err("subspace_dim", format!("must be below n = {n}")))
                    }
                    _ => {}
                }
            }
        }
        if e != Experiment::CombClt {
            if let SeedSpec::File { n: file_n, .. } = &self.seed {
                if self.n.iter().any(|n| n != file_n) {
                    return Err(cfg_err("n", format!("seed file is {file_n} x {file_n}")));
                }
            }
            if self.seed != SeedSpec::Gaussian {
                for &n in &self.n {
                    make_seed(&self.seed.kind(), n, None).map_err(|err| cfg_err("seed_kind", err.to_string()))?;
                }
            }
        }
        Ok(())
    }

    /// Canonical key/value echo; parsing it back yields an equal config up to
    /// `output_dir`, which is left out so that artifacts do not depend on
    /// where they are written.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let join = |items: Vec<String>| items.join(",");
        m.insert("experiment".into(), self.experiment.name().into());
        m.insert("master_seed".into(), self.master_seed.to_string());
        m.insert("n".into(), join(self.n.iter().map(|v| v.to_string()).collect()));
        let e = self.experiment;
        if !matches!(e, Experiment::CombClt | Experiment::MomentsOracle) {
            m.insert("trials".into(), self.trials.to_string());
        }
        if e != Experiment::CombClt {
            match &self.seed {
                SeedSpec::Rademacher => {
                    m.insert("seed_kind".into(), "rademacher".into());
                }
                SeedSpec::Gaussian => {
                    m.insert("seed_kind".into(), "gaussian".into());
                }
                SeedSpec::Sparse { density, k_target } => {
                    m.insert("seed_kind".into(), "sparse".into());
                    m.insert("density".into(), density.to_string());
                    m.insert("k_target".into(), k_target.to_string());
                }
                SeedSpec::File { path, .. } => {
                    m.insert("seed_kind".into(), "file".into());
                    m.insert("seed_file".into(), path.display().to_string());
                }
            }
        }
        if matches!(e, Experiment::LogPotential | Experiment::Ssv) {
            m.insert("z".into(), join(self.z.iter().map(|&z| format_complex(z)).collect()));
        }
        if e == Experiment::Ssv {
            m.insert("epsilons".into(), join(self.epsilons.iter().map(|v| v.to_string()).collect()));
        }
        if e == Experiment::CombClt {
            m.insert("instances".into(), self.instances.to_string());
            m.insert("draws".into(), self.draws.to_string());
        }
        if e == Experiment::Concentration {
            m.insert("functional".into(), self.functional.name().into());
            match &self.functional {
                FunctionalChoice::HsNormOfSubmatrix(rows) => {
                    m.insert("rows".into(), join(rows.iter().map(|r| r.to_string()).collect()));
                }
                FunctionalChoice::DistanceToFixedSubspace(k) => {
                    m.insert("subspace_dim".into(), k.to_string());
                }
                _ => {}
            }
        }
        m
    }

    /// The echo rendered in config-file syntax.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.echo() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
