//! Polygons on the unit sphere S².
//!
//! A cyclic polygon is described by a [`CyclicFrame`]: the axis `c` of its
//! circumscribed small circle, the common value `c·z_j`, and the azimuthal
//! gaps between consecutive vertices measured counter-clockwise about `c`.
//! The rotation transform turns every vertex about `c` by `α_j / k`, which
//! keeps the axis and radius and maps the gaps through the circulant with
//! first row `((k−1)/k, 1/k, 0, …, 0)`.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Rotation3, SymmetricEigen, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::circulant::{self, CirculantSpec};
use crate::error::{Error, Result};

/// Spread of `c·z_j` accepted as a common circumscribed circle.
pub const CYCLIC_TOL: f64 = 1e-8;
/// Allowed drift of a recomputed axis in [`regularize_verified`].
pub const AXIS_DRIFT_TOL: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-12;
const ADJACENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpherePoint(Vector3<f64>);

impl TryFrom<[f64; 3]> for SpherePoint {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(Vector3::from(v))
    }
}

impl From<SpherePoint> for [f64; 3] {
    fn from(p: SpherePoint) -> Self {
        [p.0.x, p.0.y, p.0.z]
    }
}

impl SpherePoint {
    /// Accepts `v` only if it is a unit vector to within `1e−12`.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self(v))
    }

    /// Normalizes `v` onto the sphere.
    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm <= 1e-300 {
            return Err(Error::Degenerate("zero vector has no direction"));
        }
        Ok(Self(v / norm))
    }

    /// Point at polar angle `polar` from `e₃` and azimuth `azimuth` from `e₁`.
    pub fn from_spherical(polar: f64, azimuth: f64) -> Self {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Self(Vector3::new(sp * ca, sp * sa, cp))
    }

    pub fn e1() -> Self {
        Self(Vector3::x())
    }

    pub fn e2() -> Self {
        Self(Vector3::y())
    }

    pub fn e3() -> Self {
        Self(Vector3::z())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn neg(&self) -> Self {
        Self(-self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SpherePoint>", into = "Vec<SpherePoint>")]
pub struct SphericalPolygon {
    vertices: Vec<SpherePoint>,
}

impl TryFrom<Vec<SpherePoint>> for SphericalPolygon {
    type Error = Error;

    fn try_from(v: Vec<SpherePoint>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SphericalPolygon> for Vec<SpherePoint> {
    fn from(p: SphericalPolygon) -> Self {
        p.vertices
    }
}

impl SphericalPolygon {
    pub fn new(vertices: Vec<SpherePoint>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidArgument(format!("a polygon needs at least 3 vertices, got {n}")));
        }
        for j in 0..n {
            let (a, b) = (vertices[j].vector(), vertices[(j + 1) % n].vector());
            if (a - b).norm() <= ADJACENT_TOL {
                return Err(Error::Degenerate("adjacent vertices coincide"));
            }
            if (a + b).norm() <= ADJACENT_TOL {
                return Err(Error::Degenerate("adjacent vertices are antipodal"));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[SpherePoint] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `Σ z_j × z_{j+1}`; its direction tells the winding about an axis.
    fn vector_area(&self) -> Vector3<f64> {
        let n = self.len();
        (0..n)
            .map(|j| self.vertices[j].vector().cross(self.vertices[(j + 1) % n].vector()))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicFrame {
    pub axis: SpherePoint,
    pub cos_radius: f64,
    pub gaps: Vec<f64>,
}

impl CyclicFrame {
    pub fn new(axis: SpherePoint, cos_radius: f64, gaps: Vec<f64>) -> Result<Self> {
        if !(cos_radius > -1.0 && cos_radius < 1.0) {
            return Err(Error::InvalidArgument(format!("cos_radius {cos_radius} outside (-1, 1)")));
        }
        if gaps.len() < 3 {
            return Err(Error::InvalidArgument("a frame needs at least 3 gaps".into()));
        }
        if let Some(g) = gaps.iter().find(|g| !(**g > 0.0 && **g < TAU)) {
            return Err(Error::InvalidArgument(format!("gap {g} outside (0, 2π)")));
        }
        let gap_sum: f64 = gaps.iter().sum();
        if (gap_sum - TAU).abs() > 1e-10 {
            return Err(Error::NotSimple { gap_sum });
        }
        Ok(Self { axis, cos_radius, gaps })
    }

    pub fn n(&self) -> usize {
        self.gaps.len()
    }

    /// `max_j |α_j − 2π/n|`.
    pub fn max_deviation(&self) -> f64 {
        max_gap_deviation(&self.gaps)
    }
}

/// `max_j |α_j − 2π/n|`.
pub fn max_gap_deviation(gaps: &[f64]) -> f64 {
    let target = TAU / gaps.len() as f64;
    gaps.iter().map(|g| (g - target).abs()).fold(0.0, f64::max)
}

pub fn l2_gap_deviation(gaps: &[f64]) -> f64 {
    let target = TAU / gaps.len() as f64;
    gaps.iter().map(|g| (g - target).powi(2)).sum::<f64>().sqrt()
}

/// Counter-clockwise rotation by `angle` about `axis` (right-hand rule).
pub fn rotation_about_axis(axis: &SpherePoint, angle: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Unit::new_unchecked(axis.0), angle)
}

/// Deterministic orthonormal pair `(u, w)` with `(u, w, axis)` right-handed.
pub fn tangent_basis(axis: &SpherePoint) -> (Vector3<f64>, Vector3<f64>) {
    let a = axis.0;
    let seed = if a.x.abs() <= a.y.abs() && a.x.abs() <= a.z.abs() {
        Vector3::x()
    } else if a.y.abs() <= a.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let u = (seed - a * a.dot(&seed)).normalize();
    let w = a.cross(&u);
    (u, w)
}

fn azimuth(z: &SpherePoint, axis: &SpherePoint, basis: &(Vector3<f64>, Vector3<f64>)) -> Result<f64> {
    let v = z.0 - axis.0 * axis.dot(z);
    if v.norm() <= 1e-12 {
        return Err(Error::UndefinedAzimuth);
    }
    Ok(v.dot(&basis.1).atan2(v.dot(&basis.0)))
}

fn ccw_gap(from: f64, to: f64) -> f64 {
    let g = (to - from).rem_euclid(TAU);
    if g == 0.0 {
        TAU
    } else {
        g
    }
}

/// Counter-clockwise azimuthal gaps of `vertices` about `axis`.
fn measure_gaps(vertices: &[SpherePoint], axis: &SpherePoint) -> Result<Vec<f64>> {
    let basis = tangent_basis(axis);
    let theta = vertices.iter().map(|z| azimuth(z, axis, &basis)).collect::<Result<Vec<_>>>()?;
    let n = theta.len();
    Ok((0..n).map(|j| ccw_gap(theta[j], theta[(j + 1) % n])).collect())
}

/// Axis of the small circle through three points, oriented so that the
/// points wind counter-clockwise about it.
pub fn circumcenter_triangle(z0: &SpherePoint, z1: &SpherePoint, z2: &SpherePoint) -> Result<SpherePoint> {
    let normal = (z1.0 - z0.0).cross(&(z2.0 - z0.0));
    if normal.norm() <= 1e-12 {
        return Err(Error::Degenerate("triangle vertices are collinear in R³"));
    }
    SpherePoint::from_vector(normal)
}

fn polygon_axis(p: &SphericalPolygon) -> Result<SpherePoint> {
    let v = p.vertices();
    if v.len() == 3 {
        return circumcenter_triangle(&v[0], &v[1], &v[2]);
    }
    let (axis, _) = fit_small_circle(v)?;
    if axis.0.dot(&p.vector_area()) < 0.0 {
        Ok(axis.neg())
    } else {
        Ok(axis)
    }
}

/// Circumscribed circle and counter-clockwise gaps of a cyclic polygon.
pub fn to_cyclic_frame(p: &SphericalPolygon) -> Result<CyclicFrame> {
    let axis = polygon_axis(p)?;
    frame_about_axis(p.vertices(), axis)
}

fn frame_about_axis(vertices: &[SpherePoint], axis: SpherePoint) -> Result<CyclicFrame> {
    let dots: Vec<f64> = vertices.iter().map(|z| axis.dot(z)).collect();
    let (lo, hi) = dots.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &d| (l.min(d), h.max(d)));
    if hi - lo > CYCLIC_TOL {
        return Err(Error::NotCyclic { spread: hi - lo });
    }
    let cos_radius = dots.iter().sum::<f64>() / dots.len() as f64;
    let gaps = measure_gaps(vertices, &axis)?;
    CyclicFrame::new(axis, cos_radius, gaps)
}

/// Places vertices on the frame's circle, the first at `start_azimuth` in the
/// [`tangent_basis`] of the axis.
pub fn from_cyclic_frame(f: &CyclicFrame, start_azimuth: f64) -> Result<SphericalPolygon> {
    let (u, w) = tangent_basis(&f.axis);
    let sin_radius = (1.0 - f.cos_radius * f.cos_radius).max(0.0).sqrt();
    let mut theta = start_azimuth;
    let vertices = f
        .gaps
        .iter()
        .map(|g| {
            let (s, c) = theta.sin_cos();
            theta += g;
            SpherePoint::from_vector(f.axis.0 * f.cos_radius + (u * c + w * s) * sin_radius)
        })
        .collect::<Result<Vec<_>>>()?;
    SphericalPolygon::new(vertices)
}

/// Gap update of the rotation transform with parameter `k`.
pub fn step_k(f: &CyclicFrame, k: u32) -> Result<CyclicFrame> {
    let spec = CirculantSpec::rotation_k(f.n(), k)?;
    let gaps = circulant::apply(&spec, &f.gaps)?;
    Ok(CyclicFrame { axis: f.axis, cos_radius: f.cos_radius, gaps })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalTrace {
    pub axis: SpherePoint,
    pub cos_radius: f64,
    pub polygons: Vec<SphericalPolygon>,
    pub gaps: Vec<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
}

impl SphericalTrace {
    pub fn last(&self) -> &SphericalPolygon {
        self.polygons.last().expect("trace always holds the start polygon")
    }
}

fn rotate_vertices(vertices: &[SpherePoint], axis: &SpherePoint, gaps: &[f64], k: f64) -> Result<Vec<SpherePoint>> {
    vertices
        .iter()
        .zip(gaps)
        .map(|(z, g)| SpherePoint::from_vector(rotation_about_axis(axis, g / k) * z.0))
        .collect()
}

fn regularize_impl(p: &SphericalPolygon, k: u32, tol: f64, max_iter: usize, verify_axis: bool) -> Result<SphericalTrace> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let frame = to_cyclic_frame(p)?;
    let axis = frame.axis;
    let kf = f64::from(k);
    let mut polygons = vec![p.clone()];
    let mut gaps = vec![frame.gaps];
    loop {
        let iterations = polygons.len() - 1;
        let current = gaps.last().unwrap();
        let converged = max_gap_deviation(current) < tol;
        if converged || iterations >= max_iter {
            return Ok(SphericalTrace { axis, cos_radius: frame.cos_radius, polygons, gaps, converged, iterations });
        }
        let rotated = rotate_vertices(polygons.last().unwrap().vertices(), &axis, current, kf)?;
        let next = SphericalPolygon::new(rotated)?;
        if verify_axis {
            let recomputed = polygon_axis(&next)?;
            let drift = (recomputed.0 - axis.0).norm();
            if drift >= AXIS_DRIFT_TOL {
                return Err(Error::AxisDrift { drift });
            }
        }
        gaps.push(measure_gaps(next.vertices(), &axis)?);
        polygons.push(next);
    }
}

/// Rotates every vertex about the fixed circumcenter axis by `α_j / k` until
/// `max_j |α_j − 2π/n| < tol` or `max_iter` steps.
pub fn regularize(p: &SphericalPolygon, k: u32, tol: f64, max_iter: usize) -> Result<SphericalTrace> {
    regularize_impl(p, k, tol, max_iter, false)
}

/// [`regularize`], recomputing the axis after every step and failing with
/// [`Error::AxisDrift`] if it moves by `1e−9` or more.
pub fn regularize_verified(p: &SphericalPolygon, k: u32, tol: f64, max_iter: usize) -> Result<SphericalTrace> {
    regularize_impl(p, k, tol, max_iter, true)
}

/// Least-squares plane through the points; its normal is the small-circle axis.
pub fn fit_small_circle(points: &[SpherePoint]) -> Result<(SpherePoint, f64)> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mean: Vector3<f64> = points.iter().map(|p| p.0).sum::<Vector3<f64>>() / n;
    let moment: Matrix3<f64> = points
        .iter()
        .map(|p| {
            let d = p.0 - mean;
            d * d.transpose()
        })
        .sum();
    let eig = SymmetricEigen::new(moment);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (smallest, middle, largest) = (order[0], order[1], order[2]);
    let top = eig.eigenvalues[largest];
    if top <= 1e-24 || eig.eigenvalues[middle] <= 1e-12 * top {
        return Err(Error::Degenerate("points span fewer than two dimensions"));
    }
    let mut axis = SpherePoint::from_vector(eig.eigenvectors.column(smallest).into_owned())?;
    let mut cos_radius = points.iter().map(|p| axis.dot(p)).sum::<f64>() / n;
    if cos_radius < 0.0 {
        axis = axis.neg();
        cos_radius = -cos_radius;
    }
    Ok((axis, cos_radius))
}

/// Moves each point along its meridian through `axis` onto the circle
/// `axis·z = cos_radius`, keeping its azimuth.
pub fn project_to_circle(points: &[SpherePoint], axis: &SpherePoint, cos_radius: f64) -> Result<SphericalPolygon> {
    if !(-1.0..=1.0).contains(&cos_radius) {
        return Err(Error::InvalidArgument(format!("cos_radius {cos_radius} outside [-1, 1]")));
    }
    let sin_radius = (1.0 - cos_radius * cos_radius).sqrt();
    let vertices = points
        .iter()
        .map(|z| {
            let t = z.0 - axis.0 * axis.dot(z);
            let len = t.norm();
            if len <= 1e-12 {
                return Err(Error::UndefinedAzimuth);
            }
            SpherePoint::from_vector(axis.0 * cos_radius + t * (sin_radius / len))
        })
        .collect::<Result<Vec<_>>>()?;
    SphericalPolygon::new(vertices)
}

/// Fit a small circle and project onto it.
pub fn fit_and_project(points: &[SpherePoint]) -> Result<SphericalPolygon> {
    let (axis, cos_radius) = fit_small_circle(points)?;
    project_to_circle(points, &axis, cos_radius)
}

/// Napoleon's construction in the plane of the chordal triangle: erect
/// outward equilateral triangles on its sides, take their centers and
/// normalize them back onto the sphere.
///
/// The unnormalized centers always form an equilateral euclidean triangle,
/// but it is centered at the chordal centroid rather than on the
/// circumcenter axis, so the normalized triangle is regular only when the
/// two coincide (e.g. for already regular input).
pub fn napoleon_sphere(z0: &SpherePoint, z1: &SpherePoint, z2: &SpherePoint) -> Result<SphericalPolygon> {
    Ok(SphericalPolygon::new(
        napoleon_chordal_centers(z0, z1, z2)?
            .iter()
            .map(|c| SpherePoint::from_vector(*c))
            .collect::<Result<Vec<_>>>()?,
    )?)
}

/// Centers of the equilateral triangles erected on the chordal sides, before
/// normalization.
pub fn napoleon_chordal_centers(z0: &SpherePoint, z1: &SpherePoint, z2: &SpherePoint) -> Result<[Vector3<f64>; 3]> {
    let normal = circumcenter_triangle(z0, z1, z2)?.0;
    let z = [z0.0, z1.0, z2.0];
    let scale = 1.0 / (2.0 * 3f64.sqrt());
    Ok([0, 1, 2].map(|j| {
        let (a, b) = (z[j], z[(j + 1) % 3]);
        (a + b) / 2.0 + normal.cross(&(a - b)) * scale
    }))
}

/// Max componentwise residual of `R(c, 2π/n) z_i − z_{i+1}` about the
/// polygon's own circumcenter axis.
pub fn rotation_residual(p: &SphericalPolygon) -> Result<f64> {
    let axis = to_cyclic_frame(p)?.axis;
    Ok(rotation_residual_about(p, &axis))
}

pub fn rotation_residual_about(p: &SphericalPolygon, axis: &SpherePoint) -> f64 {
    let n = p.len();
    let r = rotation_about_axis(axis, TAU / n as f64);
    let v = p.vertices();
    (0..n)
        .map(|i| (r * v[i].0 - v[(i + 1) % n].0).amax())
        .fold(0.0, f64::max)
}

pub fn is_regular(p: &SphericalPolygon, tol: f64) -> Result<bool> {
    Ok(rotation_residual(p)? < tol)
}
