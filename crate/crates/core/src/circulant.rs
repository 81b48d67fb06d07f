//! Circulant matrices and their closed-form spectra.
//!
//! A circulant is stored by its first row `c`; row `i` is the cyclic right
//! shift of `c` by `i`, so `(A v)[i] = Σ_m c[m] · v[(i + m) mod n]`. The
//! Fourier vectors `f_j = (ω^{j·0}, …, ω^{j(n−1)})` with `ω = e^{2πi/n}`
//! diagonalize every such matrix with eigenvalue `λ_j = Σ_m c[m] ω^{jm}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues within this distance of 1 form the fixed (unit) index set.
pub const UNIT_EIGENVALUE_TOL: f64 = 1e-12;

/// First row of an `n × n` circulant matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CirculantSpec {
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for CirculantSpec {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs)
    }
}

impl From<CirculantSpec> for Vec<f64> {
    fn from(spec: CirculantSpec) -> Self {
        spec.coeffs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub index: usize,
    pub eigenvalue: Complex64,
    pub modulus: f64,
    /// Argument in `(−π, π]`.
    pub angle: f64,
}

/// Vectors visited by [`iterate_until`]. `steps[0]` is the start vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub steps: Vec<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
}

impl IterationTrace {
    pub fn last(&self) -> &[f64] {
        self.steps.last().expect("trace always holds the start vector")
    }
}

impl CirculantSpec {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSpec("empty first row".into()));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec(format!("coefficient {i} is not finite")));
        }
        Ok(Self { coeffs })
    }

    /// The rotation transform with parameter `k`: first row
    /// `((k−1)/k, 1/k, 0, …, 0)`.
    pub fn rotation_k(n: usize, k: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!("size {n} too small for rotation_k")));
        }
        if k < 2 {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
        }
        let k = f64::from(k);
        let mut coeffs = vec![0.0; n];
        coeffs[0] = (k - 1.0) / k;
        coeffs[1] = 1.0 / k;
        Self::new(coeffs)
    }

    /// Boundary-gap averaging on `len` gaps: `b'_j = (b_j + b_{j+2}) / 2`.
    pub fn even_offset(len: usize) -> Result<Self> {
        if len < 4 || len % 2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "even-offset circulant needs an even size of at least 4, got {len}"
            )));
        }
        let mut coeffs = vec![0.0; len];
        coeffs[0] = 0.5;
        coeffs[2] = 0.5;
        Self::new(coeffs)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; n.max(1)];
        coeffs[0] = 1.0;
        Self::new(coeffs)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Non-negative entries summing to one.
    pub fn is_row_stochastic(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|&c| c >= -tol) && (self.coeffs.iter().sum::<f64>() - 1.0).abs() <= tol
    }

    /// Dense row-major expansion; handy for callers that need the full matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.coeffs[(j + n - i) % n]).collect())
            .collect()
    }
}

/// `ω^p` for `ω = e^{2πi/n}`, with the exponent reduced mod `n` first.
fn root_of_unity_pow(n: usize, p: usize) -> Complex64 {
    let r = p % n;
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

fn principal_angle(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Closed-form spectrum `λ_j = Σ_m c[m] ω^{jm}`, `j = 0..n`.
pub fn eigenvalues(spec: &CirculantSpec) -> Vec<SpectrumEntry> {
    let n = spec.n();
    (0..n)
        .map(|j| {
            let eigenvalue = if j == 0 {
                Complex64::new(spec.coeffs.iter().sum(), 0.0)
            } else {
                spec.coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| root_of_unity_pow(n, j * m) * c)
                    .sum()
            };
            SpectrumEntry {
                index: j,
                eigenvalue,
                modulus: eigenvalue.norm(),
                angle: principal_angle(eigenvalue),
            }
        })
        .collect()
}

/// Indices `j` with `|λ_j − 1| ≤ 1e−12`.
pub fn unit_indices(spec: &CirculantSpec) -> Vec<usize> {
    eigenvalues(spec)
        .into_iter()
        .filter(|e| (e.eigenvalue - 1.0).norm() <= UNIT_EIGENVALUE_TOL)
        .map(|e| e.index)
        .collect()
}

fn check_len(spec: &CirculantSpec, v: &[f64]) -> Result<()> {
    if v.len() != spec.n() {
        return Err(Error::LengthMismatch { expected: spec.n(), actual: v.len() });
    }
    Ok(())
}

pub fn apply(spec: &CirculantSpec, v: &[f64]) -> Result<Vec<f64>> {
    check_len(spec, v)?;
    let n = spec.n();
    Ok((0..n)
        .map(|i| {
            spec.coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .map(|(m, &c)| c * v[(i + m) % n])
                .sum()
        })
        .collect())
}

/// Projection of `v` onto the eigenvalue-1 eigenspace, i.e. `lim A^m v`.
///
/// Fails with [`Error::NonContracting`] if any eigenvalue outside the unit
/// index set has modulus ≥ 1, since the limit then does not exist.
pub fn fixed_space_limit(spec: &CirculantSpec, v: &[f64]) -> Result<Vec<f64>> {
    check_len(spec, v)?;
    let n = spec.n();
    let spectrum = eigenvalues(spec);
    let mut unit = Vec::new();
    for e in &spectrum {
        if (e.eigenvalue - 1.0).norm() <= UNIT_EIGENVALUE_TOL {
            unit.push(e.index);
        } else if e.modulus >= 1.0 {
            return Err(Error::NonContracting { modulus: e.modulus });
        }
    }

    // Fourier coefficient ĉ_j = (1/n) Σ_l v_l ω^{−jl}; limit_i = Re Σ_{j∈U} ĉ_j ω^{ji}.
    let coeffs: Vec<(usize, Complex64)> = unit
        .iter()
        .map(|&j| {
            let c: Complex64 = v
                .iter()
                .enumerate()
                .map(|(l, &x)| root_of_unity_pow(n, (n - j % n) * l) * x)
                .sum();
            (j, c / n as f64)
        })
        .collect();
    Ok((0..n)
        .map(|i| coeffs.iter().map(|&(j, c)| (c * root_of_unity_pow(n, j * i)).re).sum())
        .collect())
}

/// Largest eigenvalue modulus outside the unit index set (0 if that set
/// covers the whole spectrum).
pub fn contraction_factor(spec: &CirculantSpec) -> f64 {
    eigenvalues(spec)
        .into_iter()
        .filter(|e| (e.eigenvalue - 1.0).norm() > UNIT_EIGENVALUE_TOL)
        .map(|e| e.modulus)
        .fold(0.0, f64::max)
}

/// Fourier coefficient at index 0, the mean of `v`.
pub fn mean_coefficient(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn l2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Applies `spec` until the max-norm distance to `target` drops below `tol`
/// or `max_iter` steps have been taken.
pub fn iterate_until(
    spec: &CirculantSpec,
    v0: &[f64],
    target: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<IterationTrace> {
    check_len(spec, v0)?;
    check_len(spec, target)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut steps = vec![v0.to_vec()];
    let mut iterations = 0;
    loop {
        let current = steps.last().unwrap();
        if max_abs_diff(current, target) < tol {
            return Ok(IterationTrace { steps, converged: true, iterations });
        }
        if iterations >= max_iter {
            return Ok(IterationTrace { steps, converged: false, iterations });
        }
        let next = apply(spec, current)?;
        steps.push(next);
        iterations += 1;
    }
}

/// Steps needed for geometric decay at the contraction factor to shrink
/// `initial_deviation_norm` below `tol`.
pub fn predict_iterations(spec: &CirculantSpec, initial_deviation_norm: f64, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let rho = contraction_factor(spec);
    if rho >= 1.0 {
        return Err(Error::NonContracting { modulus: rho });
    }
    if initial_deviation_norm <= tol {
        return Ok(0);
    }
    if rho == 0.0 {
        return Ok(1);
    }
    let steps = (tol / initial_deviation_norm).ln() / rho.ln();
    // absorb rounding in the log ratio so exact powers do not round up
    Ok((steps - 1e-9).ceil().max(0.0) as usize)
}
