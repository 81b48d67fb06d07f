//! Euclidean triangles in the complex plane.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type PlanePoint = Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);
const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneTriangle {
    pub vertices: [PlanePoint; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NapoleonOutput {
    /// Apex of the equilateral triangle erected over side `(z_j, z_{j+1})`.
    pub apices: [PlanePoint; 3],
    pub centers: PlaneTriangle,
}

impl PlaneTriangle {
    pub fn new(z0: PlanePoint, z1: PlanePoint, z2: PlanePoint) -> Result<Self> {
        let vertices = [z0, z1, z2];
        if vertices.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite vertex".into()));
        }
        Ok(Self { vertices })
    }

    pub fn centroid(&self) -> PlanePoint {
        self.vertices.iter().sum::<Complex64>() / 3.0
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let [a, b, c] = self.vertices;
        (a - b).norm().max((b - c).norm()).max((c - a).norm())
    }

    /// Twice the signed area; positive for counter-clockwise order.
    pub fn signed_area2(&self) -> f64 {
        let [a, b, c] = self.vertices;
        ((b - a).conj() * (c - a)).im
    }

    pub fn translate(&self, w: PlanePoint) -> Self {
        Self { vertices: self.vertices.map(|z| z + w) }
    }

    fn ensure_nondegenerate(&self) -> Result<()> {
        let [a, b, c] = self.vertices;
        let scale = self.diameter();
        let pairs = [(a, b), (b, c), (c, a)];
        if scale == 0.0 || pairs.iter().any(|(p, q)| (p - q).norm() <= 1e-12 * scale) {
            return Err(Error::Degenerate("coincident triangle vertices"));
        }
        Ok(())
    }

    fn ensure_not_collinear(&self) -> Result<()> {
        self.ensure_nondegenerate()?;
        let scale = self.diameter();
        if self.signed_area2().abs() <= 1e-12 * scale * scale {
            return Err(Error::Degenerate("collinear triangle vertices"));
        }
        Ok(())
    }
}

/// `z₀z₁ + z₀z₂ + z₁z₂ − (z₀+z₁+z₂)²/3`; vanishes iff the triangle is
/// equilateral.
pub fn equilateral_defect(t: &PlaneTriangle) -> Complex64 {
    let [z0, z1, z2] = t.vertices;
    let s = z0 + z1 + z2;
    z0 * z1 + z0 * z2 + z1 * z2 - s * s / 3.0
}

/// `|defect| ≤ tol · diameter²`.
pub fn is_equilateral(t: &PlaneTriangle, tol: f64) -> bool {
    let d = t.diameter();
    equilateral_defect(t).norm() <= tol * d * d.max(f64::MIN_POSITIVE)
}

fn apex(a: PlanePoint, b: PlanePoint) -> PlanePoint {
    (a + b) / 2.0 + I * SQRT_3 * (a - b) / 2.0
}

fn side_center(a: PlanePoint, b: PlanePoint) -> PlanePoint {
    (a + b) / 2.0 + (I / SQRT_3) * (a - b) / 2.0
}

/// Napoleon's construction. For counter-clockwise input the erected
/// triangles point outward.
pub fn napoleon(t: &PlaneTriangle) -> Result<NapoleonOutput> {
    t.ensure_nondegenerate()?;
    let z = t.vertices;
    let side = |j: usize| (z[j], z[(j + 1) % 3]);
    let apices = [0, 1, 2].map(|j| {
        let (a, b) = side(j);
        apex(a, b)
    });
    let centers = [0, 1, 2].map(|j| {
        let (a, b) = side(j);
        side_center(a, b)
    });
    Ok(NapoleonOutput { apices, centers: PlaneTriangle { vertices: centers } })
}

pub fn circumcenter(t: &PlaneTriangle) -> Result<(PlanePoint, f64)> {
    t.ensure_not_collinear()?;
    // solve in coordinates relative to z0
    let [z0, z1, z2] = t.vertices;
    let b = z1 - z0;
    let c = z2 - z0;
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    let (b2, c2) = (b.norm_sqr(), c.norm_sqr());
    let u = Complex64::new((c.im * b2 - b.im * c2) / d, (b.re * c2 - c.re * b2) / d);
    Ok((z0 + u, u.norm()))
}

fn normalize_gap(g: f64) -> f64 {
    let r = g.rem_euclid(TAU);
    if r == 0.0 {
        TAU
    } else {
        r
    }
}

/// Angle gaps about the circumcenter, measured in the triangle's own winding
/// direction, together with that direction (`+1` counter-clockwise).
pub fn angle_gaps(t: &PlaneTriangle) -> Result<([f64; 3], f64)> {
    let (c, _) = circumcenter(t)?;
    let orientation = t.signed_area2().signum();
    let theta = t.vertices.map(|z| (z - c).arg());
    let gaps = [0, 1, 2].map(|j| normalize_gap(orientation * (theta[(j + 1) % 3] - theta[j])));
    Ok((gaps, orientation))
}

/// Rotates every vertex about the circumcenter by half its gap toward the
/// next vertex. Gaps transform by the `(1/2, 1/2, 0)` circulant.
pub fn rotate_half_step(t: &PlaneTriangle) -> Result<PlaneTriangle> {
    let (c, _) = circumcenter(t)?;
    let (gaps, orientation) = angle_gaps(t)?;
    let mut vertices = t.vertices;
    for (z, gap) in vertices.iter_mut().zip(gaps) {
        *z = c + (*z - c) * Complex64::from_polar(1.0, orientation * gap / 2.0);
    }
    Ok(PlaneTriangle { vertices })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneTrace {
    pub triangles: Vec<PlaneTriangle>,
    pub gaps: Vec<[f64; 3]>,
    pub converged: bool,
    pub iterations: usize,
}

/// Iterates [`rotate_half_step`] until every gap is within `tol` of `2π/3`.
pub fn regularize(t: &PlaneTriangle, tol: f64, max_iter: usize) -> Result<PlaneTrace> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let target = TAU / 3.0;
    let mut triangles = vec![*t];
    let mut gaps = vec![angle_gaps(t)?.0];
    loop {
        let current = *triangles.last().unwrap();
        let g = *gaps.last().unwrap();
        let converged = g.iter().all(|a| (a - target).abs() < tol);
        let iterations = triangles.len() - 1;
        if converged || iterations >= max_iter {
            return Ok(PlaneTrace { triangles, gaps, converged, iterations });
        }
        let next = rotate_half_step(&current)?;
        gaps.push(angle_gaps(&next)?.0);
        triangles.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tri(a: Complex64, b: Complex64, d: Complex64) -> PlaneTriangle {
        PlaneTriangle::new(a, b, d).unwrap()
    }

    fn roots() -> PlaneTriangle {
        let w = Complex64::from_polar(1.0, TAU / 3.0);
        tri(c(1.0, 0.0), w, w * w)
    }

    #[test]
    fn defect_examples() {
        assert!(equilateral_defect(&roots()).norm() < 1e-15);
        let d = equilateral_defect(&tri(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)));
        assert_abs_diff_eq!(d.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.im, 1.0 / 3.0, epsilon = 1e-15);
        let e = tri(c(0.0, 0.0), c(1.0, 0.0), c(0.5, SQRT_3 / 2.0));
        assert!(equilateral_defect(&e).norm() < 1e-15);
        assert!(is_equilateral(&e, 1e-12));
    }

    #[test]
    fn napoleon_side_formulas() {
        let out = napoleon(&tri(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0))).unwrap();
        assert_abs_diff_eq!(out.apices[0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out.apices[0].im, -SQRT_3 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.centers.vertices[0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out.centers.vertices[0].im, -1.0 / (2.0 * SQRT_3), epsilon = 1e-15);
        assert!(equilateral_defect(&out.centers).norm() <= 1e-12);
    }

    #[test]
    fn napoleon_of_equilateral_keeps_centroid() {
        let out = napoleon(&roots()).unwrap();
        assert!(is_equilateral(&out.centers, 1e-12));
        assert!(out.centers.centroid().norm() < 1e-15);
    }

    #[test]
    fn napoleon_apices_form_equilateral_sides() {
        let t = tri(c(0.1, 0.2), c(0.9, 0.35), c(0.4, 0.8));
        let out = napoleon(&t).unwrap();
        let scale = t.diameter().powi(2);
        for j in 0..3 {
            let side = tri(t.vertices[j], out.apices[j], t.vertices[(j + 1) % 3]);
            assert!(equilateral_defect(&side).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn napoleon_rejects_coincident() {
        assert!(napoleon(&tri(c(1.0, 1.0), c(1.0, 1.0), c(0.0, 0.0))).is_err());
    }

    #[test]
    fn circumcenter_examples() {
        let (cc, r) = circumcenter(&tri(c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0))).unwrap();
        assert!(cc.norm() < 1e-15);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-15);
        let (cc, r) = circumcenter(&tri(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0))).unwrap();
        assert!((cc - c(0.5, 0.5)).norm() < 1e-15);
        assert_abs_diff_eq!(r, 2f64.sqrt() / 2.0, epsilon = 1e-15);
        assert!(matches!(
            circumcenter(&tri(c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0))),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn half_step_on_equilateral_advances_by_third_pi() {
        let t = roots();
        let next = rotate_half_step(&t).unwrap();
        for (a, b) in t.vertices.iter().zip(next.vertices) {
            assert!((a * Complex64::from_polar(1.0, PI / 3.0) - b).norm() < 1e-14);
        }
    }

    #[test]
    fn half_step_gap_example() {
        let t = tri(Complex64::from_polar(1.0, 0.0), Complex64::from_polar(1.0, PI), Complex64::from_polar(1.0, 1.5 * PI));
        let next = rotate_half_step(&t).unwrap();
        let (gaps, _) = angle_gaps(&next).unwrap();
        for (g, w) in gaps.iter().zip([0.75 * PI, 0.5 * PI, 0.75 * PI]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn half_step_halves_gap_deviation() {
        let trace = regularize(&tri(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)), 1e-10, 200).unwrap();
        assert!(trace.converged);
        let dev = |g: &[f64; 3]| g.iter().map(|a| (a - TAU / 3.0).powi(2)).sum::<f64>().sqrt();
        for w in trace.gaps.windows(2) {
            if dev(&w[0]) > 1e-6 {
                assert_abs_diff_eq!(dev(&w[1]) / dev(&w[0]), 0.5, epsilon = 1e-9);
            }
        }
        // circulant-engine trace on the same initial gaps
        let spec = crate::circulant::CirculantSpec::new(vec![0.5, 0.5, 0.0]).unwrap();
        let engine = crate::circulant::iterate_until(&spec, &trace.gaps[0], &[TAU / 3.0; 3], 1e-10, 200).unwrap();
        assert_eq!(engine.iterations, trace.iterations);
        for (a, b) in engine.steps.iter().zip(&trace.gaps) {
            assert!(crate::circulant::max_abs_diff(a, b) < 1e-12);
        }
    }

    #[test]
    fn clockwise_input_also_regularizes() {
        let trace = regularize(&tri(c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)), 1e-9, 200).unwrap();
        assert!(trace.converged);
        assert!(is_equilateral(trace.triangles.last().unwrap(), 1e-8));
    }

    #[test]
    fn random_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let mut p = || c(rng.random::<f64>(), rng.random::<f64>());
            let t = tri(p(), p(), p());
            let scale = t.diameter().powi(2);
            let out = napoleon(&t).unwrap();
            assert!(equilateral_defect(&out.centers).norm() <= 1e-10);
            let w = c(3.7, -1.25);
            assert!((equilateral_defect(&t.translate(w)) - equilateral_defect(&t)).norm() <= 1e-10 * scale.max(1.0) * 10.0);
            if t.signed_area2().abs() < 1e-6 {
                continue;
            }
            let (cc, r) = circumcenter(&t).unwrap();
            let next = rotate_half_step(&t).unwrap();
            for z in next.vertices {
                assert!(((z - cc).norm() - r).abs() <= 1e-12 * r.max(1.0));
            }
            let (gaps, _) = angle_gaps(&next).unwrap();
            assert_abs_diff_eq!(gaps.iter().sum::<f64>(), TAU, epsilon = 1e-10);
        }
    }
}
