//! Classification of linear maps on angle vectors.
//!
//! The map is restricted to the complement of the all-ones direction by
//! `B = QᵀTQ`, with `Q` an orthonormal basis of the sum-zero subspace. When
//! `T` fixes the regular vector `B` is the induced quotient map, so its
//! spectrum is the spectrum of `T` with one copy of the eigenvalue 1 removed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circulant::CirculantSpec;
use crate::error::{Error, Result};

pub const STOCHASTIC_TOL: f64 = 1e-10;
/// Spectral radius must be below `1 − ATTRACTING_MARGIN`.
pub const ATTRACTING_MARGIN: f64 = 1e-10;
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one repeated eigenvalue.
pub const CLUSTER_TOL: f64 = 1e-6;
const IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LinearAngleTransform {
    entries: DMatrix<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for LinearAngleTransform {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<LinearAngleTransform> for Vec<Vec<f64>> {
    fn from(t: LinearAngleTransform) -> Self {
        t.rows()
    }
}

impl LinearAngleTransform {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() < 2 {
            return Err(Error::InvalidArgument(format!(
                "transform must be square of size ≥ 2, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("transform has non-finite entries".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch { expected: n, actual: r.len() });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_circulant(spec: &CirculantSpec) -> Self {
        Self::from_rows(&spec.to_dense()).expect("circulant specs have finite coefficients")
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JordanClass {
    ComplexRotation,
    RealDiagonal,
    JordanBlock,
    /// Only for `n > 3`: contracting with complex pairs among other blocks.
    Mixed,
    NonContracting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationParams {
    /// Contraction (modulus of the conjugate pair).
    pub a: f64,
    /// Rotation angle in `(0, π)`.
    pub phi: f64,
}

/// One block of the real Jordan form of the restricted map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralBlock {
    Real { value: f64, multiplicity: usize, geometric: usize },
    Rotation { a: f64, phi: f64, multiplicity: usize, geometric: usize },
}

impl SpectralBlock {
    fn deficient(&self) -> bool {
        match *self {
            SpectralBlock::Real { multiplicity, geometric, .. } | SpectralBlock::Rotation { multiplicity, geometric, .. } => {
                geometric < multiplicity
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub preserves_sum: bool,
    pub fixes_regular: bool,
    pub attracting: bool,
    pub spectral_radius: f64,
    pub jordan_class: JordanClass,
    pub rotation_params: Option<RotationParams>,
    /// Spectrum of the restricted map, sorted by decreasing modulus.
    pub restricted_eigenvalues: Vec<Complex64>,
    pub blocks: Vec<SpectralBlock>,
}

/// Orthonormal basis of `{x : Σx = 0}` as the columns of an `n × (n−1)` matrix.
pub fn sum_zero_basis(n: usize) -> DMatrix<f64> {
    // Householder reflection taking e_0 to the unit all-ones vector; its
    // remaining columns span the complement
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    v[0] -= 1.0;
    let h = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.norm_squared());
    h.columns(1, n - 1).into_owned()
}

pub fn restricted(t: &LinearAngleTransform) -> DMatrix<f64> {
    let q = sum_zero_basis(t.n());
    q.transpose() * t.entries() * q
}

fn cluster(mut eigs: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    eigs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut groups: Vec<(Vec<Complex64>, Complex64)> = Vec::new();
    for e in eigs {
        match groups.iter_mut().find(|(_, first)| (*first - e).norm() <= CLUSTER_TOL) {
            Some((members, _)) => members.push(e),
            None => groups.push((vec![e], e)),
        }
    }
    groups
        .into_iter()
        .map(|(members, _)| {
            let mean = members.iter().sum::<Complex64>() / members.len() as f64;
            (mean, members.len())
        })
        .collect()
}

fn geometric_multiplicity(b: &DMatrix<f64>, lambda: Complex64) -> usize {
    let m = b.nrows();
    let shifted = DMatrix::from_fn(m, m, |i, j| {
        let diag = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
        Complex64::new(b[(i, j)], 0.0) - diag
    });
    let scale = b.norm().max(1.0);
    let sv = shifted.singular_values();
    sv.iter().filter(|s| **s <= CLUSTER_TOL * scale).count()
}

pub fn classify(t: &LinearAngleTransform) -> ClassificationReport {
    let n = t.n();
    let a = t.entries();
    let ones = DVector::from_element(n, 1.0);
    let regular = &ones / n as f64;
    let preserves_sum = a.column_iter().all(|c| (c.sum() - 1.0).abs() <= STOCHASTIC_TOL);
    let fixes_regular = (a * &regular - &regular).amax() <= STOCHASTIC_TOL;

    let b = restricted(t);
    let mut eigs: Vec<Complex64> = b.complex_eigenvalues().iter().copied().collect();
    eigs.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(x.im.total_cmp(&y.im)));
    let spectral_radius = eigs.first().map_or(0.0, |e| e.norm());
    let attracting = spectral_radius < 1.0 - ATTRACTING_MARGIN;
    let has_zero = eigs.iter().any(|e| e.norm() <= ZERO_EIGENVALUE_TOL);

    let mut blocks = Vec::new();
    for (lambda, multiplicity) in cluster(eigs.clone()) {
        if lambda.im < -IMAG_TOL {
            continue; // represented by its conjugate
        }
        let geometric = geometric_multiplicity(&b, lambda);
        if lambda.im > IMAG_TOL {
            blocks.push(SpectralBlock::Rotation { a: lambda.norm(), phi: lambda.arg(), multiplicity, geometric });
        } else {
            blocks.push(SpectralBlock::Real { value: lambda.re, multiplicity, geometric });
        }
    }

    let rotations: Vec<&SpectralBlock> = blocks.iter().filter(|b| matches!(b, SpectralBlock::Rotation { .. })).collect();
    let (jordan_class, rotation_params) = if !attracting || has_zero {
        (JordanClass::NonContracting, None)
    } else if rotations.is_empty() {
        if blocks.iter().any(SpectralBlock::deficient) {
            (JordanClass::JordanBlock, None)
        } else {
            (JordanClass::RealDiagonal, None)
        }
    } else if n == 3 {
        match *rotations[0] {
            SpectralBlock::Rotation { a, phi, .. } => (JordanClass::ComplexRotation, Some(RotationParams { a, phi })),
            SpectralBlock::Real { .. } => unreachable!("filtered to rotations"),
        }
    } else {
        (JordanClass::Mixed, None)
    };

    ClassificationReport {
        preserves_sum,
        fixes_regular,
        attracting,
        spectral_radius,
        jordan_class,
        rotation_params,
        restricted_eigenvalues: eigs,
        blocks,
    }
}
