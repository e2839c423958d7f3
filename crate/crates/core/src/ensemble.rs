//! Seed matrices, shuffled samples and the exact moment oracle.
//!
//! A seed is a deterministic `n x n` real matrix with zero total sum and
//! total square sum `n²`. A sample is obtained by moving the seed's entries
//! through a uniform permutation of the `n²` cells, so its entries are
//! exchangeable.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::rng::{sample_permutation, Permutation, RngStream};

/// Relative tolerance (times `n²`) for the zero-sum and unit-energy constraints.
pub const SEED_TOLERANCE: f64 = 1e-9;

/// How to build a seed matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedKind {
    /// Balanced ±1 (one zero cell and ±n/√(n²−1) when `n` is odd).
    Rademacher,
    /// `⌈density·n²⌉` (rounded to even) nonzero cells of alternating sign.
    Sparse { density: f64, k_target: f64 },
    /// I.i.d. standard normals, centered and rescaled. Needs a stream.
    GaussianNormalized,
    /// Row-major user-supplied entries.
    FromEntries(Vec<f64>),
}

impl SeedKind {
    pub fn label(&self) -> String {
        match self {
            SeedKind::Rademacher => "rademacher".into(),
            SeedKind::Sparse { density, k_target } => format!("sparse(density={density},k_target={k_target})"),
            SeedKind::GaussianNormalized => "gaussian".into(),
            SeedKind::FromEntries(_) => "entries".into(),
        }
    }
}

/// A deterministic matrix satisfying the zero-sum / unit-energy constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedMatrix {
    n: usize,
    entries: Vec<f64>,
    k: f64,
    label: String,
}

impl SeedMatrix {
    /// Validates user-supplied entries (row-major, `n²` values).
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension {
                n,
                reason: "a seed needs n >= 2 to have zero sum and square sum n²",
            });
        }
        if entries.len() != n * n {
            return Err(Error::param(
                "entries",
                format!("expected {} values, got {}", n * n, entries.len()),
            ));
        }
        if let Some(p) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: p / n, col: p % n });
        }
        let n2 = (n * n) as f64;
        let sum: f64 = entries.iter().sum();
        let sq: f64 = entries.iter().map(|v| v * v).sum();
        let tolerance = SEED_TOLERANCE * n2;
        if sum.abs() > tolerance || (sq - n2).abs() > tolerance {
            return Err(Error::SeedConstraint {
                sum_residual: sum,
                square_residual: sq - n2,
                tolerance,
            });
        }
        let k = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if k < 1.0 - 1e-12 {
            return Err(Error::param("entries", format!("max |entry| = {k} < 1")));
        }
        Ok(SeedMatrix {
            n,
            entries,
            k,
            label: "entries".into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Largest absolute entry.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn to_matrix(&self) -> RealMatrix {
        RealMatrix::from_vec(self.n, self.n, self.entries.clone()).expect("n² entries")
    }
}

/// Builds a seed of the requested kind. Only `GaussianNormalized` consumes randomness.
pub fn make_seed(kind: &SeedKind, n: usize, rng: Option<&mut RngStream>) -> Result<SeedMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension {
            n,
            reason: "a seed needs n >= 2 to have zero sum and square sum n²",
        });
    }
    let cells = n * n;
    let entries = match kind {
        SeedKind::Rademacher => {
            if cells.is_multiple_of(2) {
                (0..cells).map(|i| if i < cells / 2 { 1.0 } else { -1.0 }).collect()
            } else {
                let c = n as f64 / ((cells - 1) as f64).sqrt();
                let half = (cells - 1) / 2;
                (0..cells)
                    .map(|i| match i {
                        i if i < half => c,
                        i if i < 2 * half => -c,
                        _ => 0.0,
                    })
                    .collect()
            }
        }
        SeedKind::Sparse { density, k_target } => {
            if !(*density > 0.0 && *density <= 1.0) {
                return Err(Error::param("density", format!("{density} not in (0, 1]")));
            }
            if !(*k_target > 0.0) || !k_target.is_finite() {
                return Err(Error::param("k_target", format!("{k_target} must be positive")));
            }
            let mut m = ((density * cells as f64 - 1e-9).ceil() as usize).clamp(2, cells);
            if m % 2 == 1 {
                m = if m < cells { m + 1 } else { m - 1 };
            }
            // alternating ±k_target, then rescaled so the square sum is n²
            let scale = n as f64 / (k_target * (m as f64).sqrt());
            (0..cells)
                .map(|i| match i {
                    i if i < m && i % 2 == 0 => k_target * scale,
                    i if i < m => -k_target * scale,
                    _ => 0.0,
                })
                .collect()
        }
        SeedKind::GaussianNormalized => {
            let rng = rng.ok_or_else(|| Error::param("rng", "gaussian seeds need a random stream"))?;
            let raw: Vec<f64> = (0..cells).map(|_| rng.standard_normal()).collect();
            let mean = raw.iter().sum::<f64>() / cells as f64;
            let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
            let energy: f64 = centered.iter().map(|v| v * v).sum();
            let scale = n as f64 / energy.sqrt();
            centered.into_iter().map(|v| v * scale).collect()
        }
        SeedKind::FromEntries(values) => values.clone(),
    };
    Ok(SeedMatrix::from_entries(n, entries)?.with_label(kind.label()))
}

/// Where a sample came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub seed_label: String,
    pub master_seed: u64,
    pub substream: u64,
}

/// A shuffled realization `X_ij = x_{π(i,j)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    matrix: RealMatrix,
    k: f64,
    provenance: Provenance,
}

impl SampleMatrix {
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `X / √n`.
    pub fn normalized(&self) -> RealMatrix {
        self.matrix.scaled(1.0 / (self.n() as f64).sqrt())
    }
}

/// Places seed cell `π(c)` into cell `c` (row-major cell index).
pub fn shuffle_with(seed: &SeedMatrix, perm: &Permutation, provenance: Provenance) -> SampleMatrix {
    assert_eq!(perm.n_cells(), seed.n * seed.n, "permutation size");
    let entries = perm.as_slice().iter().map(|&src| seed.entries[src]).collect();
    SampleMatrix {
        matrix: RealMatrix::from_vec(seed.n, seed.n, entries).expect("n² entries"),
        k: seed.k,
        provenance,
    }
}

/// Shuffles the seed through a fresh uniform permutation drawn from `rng`.
pub fn shuffle(seed: &SeedMatrix, rng: &mut RngStream) -> SampleMatrix {
    let provenance = Provenance {
        seed_label: seed.label.clone(),
        master_seed: rng.master_seed(),
        substream: rng.stream_id(),
    };
    let perm = sample_permutation(rng, seed.n * seed.n).expect("n >= 2");
    shuffle_with(seed, &perm, provenance)
}

/// Grand mean and root-mean-square deviation of a matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationStats {
    pub mu: f64,
    pub sigma: f64,
}

/// `B = (Y − μ)/(√n σ)` for a square `Y`.
pub fn normalize_exchangeable(y: &RealMatrix) -> Result<(RealMatrix, NormalizationStats)> {
    if !y.is_square() || y.rows() == 0 {
        return Err(Error::InvalidDimension {
            n: y.rows(),
            reason: "normalization needs a non-empty square matrix",
        });
    }
    y.check_finite()?;
    let n = y.rows();
    let cells = (n * n) as f64;
    let values = y.as_slice();
    let mu = values.iter().sum::<f64>() / cells;
    let sigma = (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / cells).sqrt();
    let first = values[0];
    if values.iter().all(|&v| v == first) || sigma <= 1e-14 * y.max_abs() {
        return Err(Error::DegenerateMatrix);
    }
    let factor = 1.0 / ((n as f64).sqrt() * sigma);
    let b = RealMatrix::from_fn(n, n, |i, j| (y[(i, j)] - mu) * factor);
    Ok((b, NormalizationStats { mu, sigma }))
}

/// Exact moments of a shuffled seed, by enumeration of all permutations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMoments {
    /// `E X_11`
    pub mean: f64,
    /// `E X_11²`
    pub second_moment: f64,
    /// `E X_11 X_12`
    pub cross_covariance: f64,
}

/// Enumerates all `(n²)!` cell permutations (`n <= 3`) and returns the exact
/// moments of `X_11` and `X_11 X_12`.
pub fn exact_pair_moments(seed: &SeedMatrix) -> Result<PairMoments> {
    let n = seed.n;
    if n > 3 {
        return Err(Error::EnumerationTooLarge {
            what: "exact pair moments",
            count: format!("({})!", n * n),
        });
    }
    let cells = n * n;
    // counts[a * cells + b]: permutations sending cell 0 to a and cell 1 to b
    let mut counts = vec![0u64; cells * cells];
    let mut total = 0u64;
    Permutation::for_each_of(cells, |p| {
        counts[p[0] * cells + p[1]] += 1;
        total += 1;
    });
    let x = &seed.entries;
    let (mut m1, mut m2, mut cross) = (0.0, 0.0, 0.0);
    for a in 0..cells {
        for b in 0..cells {
            let c = counts[a * cells + b];
            if c == 0 {
                continue;
            }
            let w = c as f64 / total as f64;
            m1 += w * x[a];
            m2 += w * x[a] * x[a];
            cross += w * x[a] * x[b];
        }
    }
    Ok(PairMoments {
        mean: m1,
        second_moment: m2,
        cross_covariance: cross,
    })
}

/// Parses the plain-text seed format: a line with `n`, then `n` rows of `n`
/// whitespace-separated decimals. Blank lines and `#` comments are skipped.
pub fn parse_seed(text: &str, origin: &str) -> Result<SeedMatrix> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line_no, first) = lines.next().ok_or_else(|| err(1, "missing dimension line".into()))?;
    let n: usize = first
        .parse()
        .map_err(|_| err(line_no, format!("invalid dimension `{first}`")))?;
    let mut entries = Vec::with_capacity(n * n);
    for row in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| err(line_no, format!("expected {n} rows, found {row}")))?;
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != n {
            return Err(err(
                line_no,
                format!("row {}: expected {n} values, found {}", row + 1, values.len()),
            ));
        }
        for (col, v) in values.iter().enumerate() {
            let x: f64 = v
                .parse()
                .map_err(|_| err(line_no, format!("row {}, column {}: invalid number `{v}`", row + 1, col + 1)))?;
            if !x.is_finite() {
                return Err(err(line_no, format!("row {}, column {}: non-finite value", row + 1, col + 1)));
            }
            entries.push(x);
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(err(line_no, format!("unexpected content after {n} rows")));
    }
    Ok(SeedMatrix::from_entries(n, entries)?.with_label(format!("file:{origin}")))
}

pub fn read_seed_file(path: &Path) -> Result<SeedMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_seed(&text, &path.display().to_string())
}

/// Serializes a seed in the format accepted by [`parse_seed`], 17 significant digits.
pub fn format_seed(seed: &SeedMatrix) -> String {
    let mut out = format!("{}\n", seed.n);
    for row in seed.entries.chunks(seed.n) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}
