//! Empirical spectral distributions and their distance to limit laws.

use std::f64::consts::{PI, SQRT_2};

use libm::erfc;

use crate::ensemble::SampleMatrix;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, singular_values_shifted, Complex64, RealMatrix, SingularSpectrum};

/// Eigenvalues of `X/√n` in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Esd {
    points: Vec<Complex64>,
}

impl Esd {
    pub fn from_points(points: Vec<Complex64>) -> Self {
        Esd { points }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|z| z.norm()).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.points.iter().map(|z| z.arg()).collect()
    }

    /// `(1/n) Σ |λ|²`.
    pub fn second_moment(&self) -> f64 {
        self.points.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }
}

pub fn esd(sample: &SampleMatrix) -> Result<Esd> {
    let spectrum = eigenvalues(&sample.normalized())?;
    Ok(Esd {
        points: spectrum.values().to_vec(),
    })
}

/// One-dimensional reference laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceLaw {
    /// Modulus of a uniform point on the unit disc: `F(r) = r²`.
    CircularRadial,
    /// Density `√(4 − x²)/π` on `[0, 2]`.
    QuarterCircle,
    /// Centered normal with standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Uniform on `[−π, π]`.
    UniformAngle,
}

impl ReferenceLaw {
    pub fn label(&self) -> String {
        match self {
            ReferenceLaw::CircularRadial => "circular_radial".into(),
            ReferenceLaw::QuarterCircle => "quarter_circle".into(),
            ReferenceLaw::Gaussian { sigma } => format!("gaussian({sigma})"),
            ReferenceLaw::UniformAngle => "uniform_angle".into(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        reference_cdf(*self, x)
    }
}

/// Standard normal CDF, via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

pub fn reference_cdf(law: ReferenceLaw, x: f64) -> f64 {
    match law {
        ReferenceLaw::CircularRadial => {
            if x <= 0.0 {
                0.0
            } else {
                (x * x).min(1.0)
            }
        }
        ReferenceLaw::QuarterCircle => {
            if x <= 0.0 {
                0.0
            } else if x >= 2.0 {
                1.0
            } else {
                ((x / 2.0) * (4.0 - x * x).sqrt() + 2.0 * (x / 2.0).asin()) / PI
            }
        }
        ReferenceLaw::Gaussian { sigma } => {
            assert!(sigma > 0.0, "gaussian reference needs sigma > 0");
            normal_cdf(x / sigma)
        }
        ReferenceLaw::UniformAngle => ((x + PI) / (2.0 * PI)).clamp(0.0, 1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub sample_size: usize,
    pub reference: String,
}

/// `sup_x |F̂(x) − F(x)|` against an arbitrary continuous CDF, checking both
/// one-sided limits of the empirical CDF at every sample point.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

pub fn ks_statistic(samples: &[f64], law: ReferenceLaw) -> Result<KsResult> {
    Ok(KsResult {
        statistic: ks_distance(samples, |x| law.cdf(x))?,
        sample_size: samples.len(),
        reference: law.label(),
    })
}

/// Kolmogorov distance between a finite discrete law (`(value, probability)`
/// atoms) and a continuous CDF.
pub fn ks_distance_discrete(atoms: &[(f64, f64)], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut atoms = atoms.to_vec();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    for (x, p) in atoms {
        let f = cdf(x);
        d = d.max((f - below).abs());
        below += p;
        d = d.max((below - f).abs());
    }
    d
}

/// Lower threshold under which a singular value makes the log potential undefined.
pub const SINGULAR_SHIFT_THRESHOLD: f64 = 1e-12;

/// `−(1/n) Σ log s_k(A − z·Id)`.
pub fn log_potential_empirical(a: &RealMatrix, z: Complex64) -> Result<f64> {
    let sv = singular_values_shifted(a, z)?;
    log_potential_from_singular_values(&sv)
}

pub fn log_potential_from_singular_values(sv: &SingularSpectrum) -> Result<f64> {
    if let Some(k) = sv.values().iter().position(|&s| s <= SINGULAR_SHIFT_THRESHOLD) {
        return Err(Error::SingularShift {
            index: k + 1,
            value: sv.values()[k],
        });
    }
    Ok(-sv.values().iter().map(|s| s.ln()).sum::<f64>() / sv.len() as f64)
}

/// Logarithmic potential of the uniform law on the unit disc.
pub fn log_potential_limit(z: Complex64) -> f64 {
    let r = z.norm();
    if r > 1.0 {
        -r.ln()
    } else {
        0.5 * (1.0 - r * r)
    }
}

/// `(1/n) Σ |log s_k| 1{|log s_k| > t}`; infinite when a singular value is zero.
pub fn uniform_integrability_stat(sv: &SingularSpectrum, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("{t} must be positive")));
    }
    if sv.is_empty() {
        return Err(Error::EmptySample);
    }
    if sv.values().contains(&0.0) {
        return Ok(f64::INFINITY);
    }
    let total: f64 = sv
        .values()
        .iter()
        .map(|s| s.ln().abs())
        .filter(|&l| l > t)
        .fold(0.0, |acc, l| acc + l);
    Ok(total / sv.len() as f64)
}
