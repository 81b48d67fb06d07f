//! Polygons in the Poincaré disk defined by geodesics.
//!
//! An n-gon is given by `2n` boundary points on `R/Z` (one turn = 1); geodesic
//! `i` joins points `i` and `i + n`, and vertex `i` is where geodesics `i` and
//! `i + 1` cross. The regularizing transform acts on the boundary gaps
//! `b_j = a_{j+1} − a_j` through `b'_j = (b_j + b_{j+2}) / 2`, whose limit has
//! alternating gaps `(a, b, a, b, …)` and therefore a rotationally symmetric,
//! regular polygon.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circulant::{self, CirculantSpec};
use crate::error::{Error, Result};
use crate::euclid::{self, PlaneTriangle};

const GAP_SUM_TOL: f64 = 1e-12;
const ANTIPODAL_TOL: f64 = 1e-10;
const ON_CURVE_TOL: f64 = 1e-8;
const COLLAPSE_TOL: f64 = 1e-12;
/// Odd-indexed limit mean at or below this counts as an ideal limit.
pub const IDEAL_TOL: f64 = 1e-12;
/// Interior angles of a configuration whose gaps alternate within `tol` must
/// agree within `ANGLE_TOL_PER_GAP · tol + ANGLE_TOL_FLOOR`.
pub const ANGLE_TOL_PER_GAP: f64 = 100.0;
pub const ANGLE_TOL_FLOOR: f64 = 1e-9;
/// Scale applied when the polar-map Napoleon triangle lands outside the disk.
pub const POLAR_RESCALE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiskPoint(Complex64);

impl TryFrom<[f64; 2]> for DiskPoint {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::new(Complex64::new(v[0], v[1]))
    }
}

impl From<DiskPoint> for [f64; 2] {
    fn from(p: DiskPoint) -> Self {
        [p.0.re, p.0.im]
    }
}

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.norm() < 1.0) {
            return Err(Error::OutsideDisk(format!("{z}")));
        }
        Ok(Self(z))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }

    /// Hyperbolic distance to the origin, `ln((1 + r) / (1 − r))`.
    pub fn distance_from_origin(&self) -> f64 {
        hyperbolic_radius(self.0.norm())
    }
}

pub fn hyperbolic_radius(r: f64) -> f64 {
    ((1.0 + r) / (1.0 - r)).ln()
}

fn turn_to_unit(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

/// Counter-clockwise distance from `a` to `b` on `R/Z`, in `[0, 1)`.
fn ccw(a: f64, b: f64) -> f64 {
    (b - a).rem_euclid(1.0)
}

/// `2n` strictly cyclically increasing points on `R/Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BoundaryPoints {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for BoundaryPoints {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BoundaryPoints> for Vec<f64> {
    fn from(b: BoundaryPoints) -> Self {
        b.points
    }
}

impl BoundaryPoints {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        let len = points.len();
        if len < 6 || len % 2 != 0 {
            return Err(Error::InvalidArgument(format!("need an even number (≥ 6) of boundary points, got {len}")));
        }
        if let Some(p) = points.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!("boundary point {p} outside [0, 1)")));
        }
        let bp = Self { points };
        let gaps = bp.raw_gaps();
        if let Some((index, &value)) = gaps.iter().enumerate().find(|(_, g)| **g <= 0.0) {
            return Err(Error::NonPositiveGap { index, value });
        }
        let total: f64 = gaps.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "boundary points are not cyclically increasing (they wind {total} times)"
            )));
        }
        Ok(bp)
    }

    /// Equally spaced points starting at `start`.
    pub fn uniform(count: usize, start: f64) -> Result<Self> {
        Self::new((0..count).map(|j| (start + j as f64 / count as f64).rem_euclid(1.0)).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of geodesics (polygon sides).
    pub fn sides(&self) -> usize {
        self.points.len() / 2
    }

    fn raw_gaps(&self) -> Vec<f64> {
        let len = self.points.len();
        (0..len).map(|j| ccw(self.points[j], self.points[(j + 1) % len])).collect()
    }

    pub fn geodesic(&self, i: usize) -> Result<Geodesic> {
        let n = self.sides();
        geodesic_from_boundary(self.points[i % n], self.points[i % n + n])
    }
}

/// Gaps between consecutive boundary points; they sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GapVector {
    gaps: Vec<f64>,
}

impl TryFrom<Vec<f64>> for GapVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<GapVector> for Vec<f64> {
    fn from(g: GapVector) -> Self {
        g.gaps
    }
}

impl GapVector {
    /// Zero gaps are allowed so that ideal limits can be represented.
    pub fn new(gaps: Vec<f64>) -> Result<Self> {
        let len = gaps.len();
        if len < 6 || len % 2 != 0 {
            return Err(Error::InvalidArgument(format!("need an even number (≥ 6) of gaps, got {len}")));
        }
        if let Some((index, &value)) = gaps.iter().enumerate().find(|(_, g)| !(**g >= 0.0)) {
            return Err(Error::NonPositiveGap { index, value });
        }
        let total: f64 = gaps.iter().sum();
        if (total - 1.0).abs() > GAP_SUM_TOL {
            return Err(Error::InvalidArgument(format!("gaps sum to {total}, not 1")));
        }
        Ok(Self { gaps })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// `(mean of even-indexed gaps, mean of odd-indexed gaps)`.
    pub fn alternating_means(&self) -> (f64, f64) {
        let half = (self.gaps.len() / 2) as f64;
        let even = self.gaps.iter().step_by(2).sum::<f64>() / half;
        let odd = self.gaps.iter().skip(1).step_by(2).sum::<f64>() / half;
        (even, odd)
    }

    /// `max_j |b_j − b_{j+2}|`.
    pub fn alternation_defect(&self) -> f64 {
        let len = self.gaps.len();
        (0..len).map(|j| (self.gaps[j] - self.gaps[(j + 2) % len]).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeodesicKind {
    /// Line through the origin with unit `direction`.
    Diameter { direction: Complex64 },
    /// Circle orthogonal to the unit circle.
    Arc { center: Complex64, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geodesic {
    /// Boundary endpoints on `R/Z`.
    pub ends: [f64; 2],
    #[serde(flatten)]
    pub kind: GeodesicKind,
}

impl Geodesic {
    /// Distance from `z` to the supporting line or circle.
    pub fn residual(&self, z: Complex64) -> f64 {
        match self.kind {
            GeodesicKind::Diameter { direction } => (z * direction.conj()).im.abs(),
            // |z − C|² − r² = |z|² − 2 Re(z C̄) + 1 using |C|² = 1 + r²; avoids
            // cancellation for large arcs
            GeodesicKind::Arc { center, radius } => {
                let power = z.norm_sqr() + 1.0 - 2.0 * (z * center.conj()).re;
                power.abs() / ((z - center).norm() + radius)
            }
        }
    }

    /// Unit tangent at `z` (either orientation).
    fn tangent(&self, z: Complex64) -> Complex64 {
        match self.kind {
            GeodesicKind::Diameter { direction } => direction,
            GeodesicKind::Arc { center, .. } => {
                let t = Complex64::i() * (z - center);
                t / t.norm()
            }
        }
    }
}

pub fn geodesic_from_boundary(t1: f64, t2: f64) -> Result<Geodesic> {
    let d = ccw(t1, t2);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::Degenerate("geodesic endpoints coincide"));
    }
    let delta = TAU * d.min(1.0 - d);
    let u = turn_to_unit(t1);
    let kind = if (delta - PI).abs() <= ANTIPODAL_TOL {
        GeodesicKind::Diameter { direction: u }
    } else {
        // (u + v) / (1 + cos Δ) written as e^{iφ} / cos(Δ/2), φ the midpoint of the shorter arc
        let mid = if d <= 0.5 { t1 + d / 2.0 } else { t2 + (1.0 - d) / 2.0 };
        let half = delta / 2.0;
        GeodesicKind::Arc { center: turn_to_unit(mid) / half.cos(), radius: half.tan().abs() }
    };
    Ok(Geodesic { ends: [t1, t2], kind })
}

/// Strictly inside the counter-clockwise arc from `a` to `b`.
fn strictly_between(x: f64, a: f64, b: f64) -> bool {
    let dx = ccw(a, x);
    dx > 0.0 && dx < ccw(a, b)
}

fn interleave(g1: &Geodesic, g2: &Geodesic) -> bool {
    let [a, b] = g1.ends;
    let [c, d] = g2.ends;
    if [c, d].iter().any(|&x| ccw(a, x) == 0.0 || ccw(b, x) == 0.0) {
        return false;
    }
    strictly_between(c, a, b) != strictly_between(d, a, b)
}

/// The crossing point of two geodesics inside the disk.
pub fn intersect(g1: &Geodesic, g2: &Geodesic) -> Result<DiskPoint> {
    if !interleave(g1, g2) {
        return Err(Error::NoInteriorIntersection);
    }
    use GeodesicKind::*;
    // every geodesic circle satisfies |z|² − 2 Re(z C̄) + 1 = 0, so the
    // crossing lies on a line s·w through the origin and solves
    // s² − 2 s Re(w C̄) + 1 = 0, whose roots multiply to one
    let on_line = |w: Complex64, center: Complex64| {
        let p = (w * center.conj()).re;
        let disc = (p * p - 1.0).max(0.0).sqrt();
        w / (p + p.signum() * disc)
    };
    let z = match (g1.kind, g2.kind) {
        (Diameter { .. }, Diameter { .. }) => Complex64::new(0.0, 0.0),
        (Diameter { direction }, Arc { center, .. }) | (Arc { center, .. }, Diameter { direction }) => {
            on_line(direction, center)
        }
        (Arc { center: c1, .. }, Arc { center: c2, .. }) => {
            let w = Complex64::i() * (c1 - c2);
            on_line(w / w.norm(), c1)
        }
    };
    DiskPoint::new(z).map_err(|_| Error::NoInteriorIntersection)
}

/// Angle at `at` between the tangents of `g1` and `g2`, each oriented toward
/// the given neighbouring point along its geodesic.
pub fn interior_angle(g1: &Geodesic, g2: &Geodesic, at: DiskPoint, along1: DiskPoint, along2: DiskPoint) -> Result<f64> {
    tangent_angle(g1, g2, at.0, along1.0, along2.0)
}

fn tangent_angle(g1: &Geodesic, g2: &Geodesic, z: Complex64, toward1: Complex64, toward2: Complex64) -> Result<f64> {
    let residual = g1.residual(z).max(g2.residual(z));
    if residual > ON_CURVE_TOL {
        return Err(Error::NotOnGeodesic { residual });
    }
    let orient = |g: &Geodesic, toward: Complex64| {
        let t = g.tangent(z);
        if (t * (toward - z).conj()).re < 0.0 {
            -t
        } else {
            t
        }
    };
    let t1 = orient(g1, toward1);
    let t2 = orient(g2, toward2);
    Ok((t1 * t2.conj()).arg().abs())
}

pub fn polygon_from_boundary(bp: &BoundaryPoints) -> Result<Vec<DiskPoint>> {
    let n = bp.sides();
    let geodesics = (0..n).map(|i| bp.geodesic(i)).collect::<Result<Vec<_>>>()?;
    (0..n).map(|i| intersect(&geodesics[i], &geodesics[(i + 1) % n])).collect()
}

/// Interior angle at every vertex of [`polygon_from_boundary`].
///
/// When consecutive vertices coincide (all geodesics through one point) the
/// tangents at vertex `i` are oriented toward boundary points `a_i` and
/// `a_{i+1}` instead.
pub fn polygon_angles(bp: &BoundaryPoints) -> Result<Vec<f64>> {
    let n = bp.sides();
    let geodesics = (0..n).map(|i| bp.geodesic(i)).collect::<Result<Vec<_>>>()?;
    let vertices: Vec<Complex64> = polygon_from_boundary(bp)?.iter().map(DiskPoint::z).collect();
    let pick = |v: Complex64, z: Complex64, boundary: usize| {
        if (v - z).norm() < COLLAPSE_TOL {
            turn_to_unit(bp.points[boundary % (2 * n)])
        } else {
            v
        }
    };
    (0..n)
        .map(|i| {
            let z = vertices[i];
            tangent_angle(
                &geodesics[i],
                &geodesics[(i + 1) % n],
                z,
                pick(vertices[(i + n - 1) % n], z, i),
                pick(vertices[(i + 1) % n], z, i + 1),
            )
        })
        .collect()
}

pub fn gaps_from_points(bp: &BoundaryPoints) -> GapVector {
    let mut gaps = bp.raw_gaps();
    // absorb the rounding of the wrap-around gap so the sum is one
    let len = gaps.len();
    let rest: f64 = gaps[..len - 1].iter().sum();
    gaps[len - 1] = 1.0 - rest;
    GapVector { gaps }
}

/// Inverse of [`gaps_from_points`] with `a_0 = start`.
pub fn points_from_gaps(b: &GapVector, start: f64) -> Result<BoundaryPoints> {
    if let Some((index, &value)) = b.gaps.iter().enumerate().find(|(_, g)| **g <= 0.0) {
        return Err(Error::NonPositiveGap { index, value });
    }
    let mut acc = start;
    let mut points = Vec::with_capacity(b.len());
    for g in &b.gaps {
        points.push(acc.rem_euclid(1.0));
        acc += g;
    }
    BoundaryPoints::new(points)
}

fn averaging_spec(len: usize) -> CirculantSpec {
    CirculantSpec::even_offset(len).expect("gap vectors have even length ≥ 6")
}

/// `b'_j = (b_j + b_{j+2}) / 2`.
pub fn gap_step(b: &GapVector) -> GapVector {
    let gaps = circulant::apply(&averaging_spec(b.len()), &b.gaps).expect("length matches by construction");
    GapVector { gaps }
}

/// Even positions take the even-indexed mean, odd positions the odd-indexed
/// mean: the limit of repeated [`gap_step`].
pub fn limit_gaps(b: &GapVector) -> GapVector {
    let (even, odd) = b.alternating_means();
    GapVector { gaps: (0..b.len()).map(|j| if j % 2 == 0 { even } else { odd }).collect() }
}

/// Contraction factor of [`gap_step`] for `len` gaps.
pub fn gap_contraction(len: usize) -> f64 {
    circulant::contraction_factor(&averaging_spec(len))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicTrace {
    pub gaps: Vec<GapVector>,
    pub points: Vec<BoundaryPoints>,
    pub limit: GapVector,
    pub converged: bool,
    pub iterations: usize,
}

impl HyperbolicTrace {
    pub fn last_points(&self) -> &BoundaryPoints {
        self.points.last().expect("trace always holds the start configuration")
    }

    /// Vertices of the polygon after `step` iterations.
    pub fn polygon(&self, step: usize) -> Result<Vec<DiskPoint>> {
        let bp = self
            .points
            .get(step)
            .ok_or_else(|| Error::InvalidArgument(format!("trace has no step {step}")))?;
        polygon_from_boundary(bp)
    }
}

/// Iterates [`gap_step`] with `a_0` held fixed until the gaps are within
/// `tol` (max norm) of their limit.
pub fn regularize_hyperbolic(bp: &BoundaryPoints, tol: f64, max_iter: usize) -> Result<HyperbolicTrace> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let anchor = bp.points[0];
    let first = gaps_from_points(bp);
    let limit = limit_gaps(&first);
    let mut gaps = vec![first];
    let mut points = vec![bp.clone()];
    loop {
        let iterations = gaps.len() - 1;
        let current = gaps.last().unwrap();
        let converged = circulant::max_abs_diff(&current.gaps, &limit.gaps) < tol;
        if converged || iterations >= max_iter {
            return Ok(HyperbolicTrace { gaps, points, limit, converged, iterations });
        }
        let next = gap_step(current);
        points.push(points_from_gaps(&next, anchor)?);
        gaps.push(next);
    }
}

/// Allowed spread of interior angles for gaps alternating within `tol`.
pub fn angle_tolerance(tol: f64) -> f64 {
    ANGLE_TOL_PER_GAP * tol + ANGLE_TOL_FLOOR
}

/// Gaps alternate within `tol` and the measured interior angles agree within
/// [`angle_tolerance`].
pub fn check_regular(bp: &BoundaryPoints, tol: f64) -> Result<bool> {
    let angles = polygon_angles(bp)?;
    let alternating = gaps_from_points(bp).alternation_defect() <= tol;
    Ok(alternating && angle_spread(&angles) <= angle_tolerance(tol))
}

pub fn angle_spread(angles: &[f64]) -> f64 {
    let (lo, hi) = angles.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &a| (l.min(a), h.max(a)));
    hi - lo
}

/// Whether the limit of `b` is an ideal polygon (odd-indexed limit gaps vanish).
pub fn is_ideal_limit(b: &GapVector) -> bool {
    b.alternating_means().1 <= IDEAL_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarRegularTriangle {
    pub vertices: [DiskPoint; 3],
    /// Common euclidean radius in the disk.
    pub radius: f64,
    pub hyperbolic_radius: f64,
    /// Azimuth of the first vertex.
    pub theta: f64,
    pub rescaled: bool,
}

/// Regular triangle about the origin from Napoleon's construction applied to
/// the polar images of origin-centred disk vertices.
///
/// The Napoleon triangle is equilateral but centred at the input centroid;
/// its circumradius `r` and the azimuth `θ` of its first vertex about that
/// centre are placed back about the origin, scaled to `0.9` if `r ≥ 1`.
pub fn regular_triangle_via_polar(vertices: &[DiskPoint; 3]) -> Result<PolarRegularTriangle> {
    let radii = vertices.map(|v| v.0.norm());
    let spread = radii.iter().fold(0.0f64, |m, r| m.max((r - radii[0]).abs()));
    if spread > 1e-8 {
        return Err(Error::NotConcentric { spread });
    }
    let plane = PlaneTriangle::new(vertices[0].0, vertices[1].0, vertices[2].0)?;
    let centers = euclid::napoleon(&plane)?.centers;
    let centre = centers.centroid();
    let first = centers.vertices[0] - centre;
    let mut radius = first.norm();
    let theta = first.arg();
    let rescaled = radius >= 1.0;
    if rescaled {
        radius *= POLAR_RESCALE / radius;
    }
    let points = [0, 1, 2].map(|j| DiskPoint(Complex64::from_polar(radius, theta + TAU * j as f64 / 3.0)));
    Ok(PolarRegularTriangle {
        vertices: points,
        radius,
        hyperbolic_radius: hyperbolic_radius(radius),
        theta,
        rescaled,
    })
}
