//! JSON inputs and CSV/JSON outputs shared by the CLI and the FFI layer.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output
//! is byte-stable for identical inputs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analyzer::LinearAngleTransform;
use crate::circulant::{self, CirculantSpec};
use crate::error::{Error, Result};
use crate::euclid::{PlaneTrace, PlaneTriangle};
use crate::experiment::ExperimentRow;
use crate::hyperbolic::{self, BoundaryPoints, HyperbolicTrace};
use crate::spherical::{SpherePoint, SphericalTrace};

/// Input vectors may be off the unit sphere by this much before normalizing.
pub const UNIT_INPUT_TOL: f64 = 1e-6;

fn parse<T: DeserializeOwned>(json: &str) -> Result<T> {
    serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_plane_triangle(json: &str) -> Result<PlaneTriangle> {
    let pts: Vec<[f64; 2]> = parse(json)?;
    let [a, b, c]: [[f64; 2]; 3] =
        pts.try_into().map_err(|v: Vec<_>| Error::LengthMismatch { expected: 3, actual: v.len() })?;
    PlaneTriangle::new(Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1]), Complex64::new(c[0], c[1]))
}

pub fn parse_sphere_points(json: &str) -> Result<Vec<SpherePoint>> {
    let pts: Vec<[f64; 3]> = parse(json)?;
    pts.into_iter()
        .map(|p| {
            let v = nalgebra::Vector3::from(p);
            let norm = v.norm();
            if (norm - 1.0).abs() > UNIT_INPUT_TOL {
                return Err(Error::NotUnit { norm });
            }
            SpherePoint::from_vector(v)
        })
        .collect()
}

pub fn parse_boundary(json: &str) -> Result<BoundaryPoints> {
    BoundaryPoints::new(parse(json)?)
}

pub fn parse_spec(json: &str) -> Result<CirculantSpec> {
    CirculantSpec::new(parse(json)?)
}

pub fn parse_matrix(json: &str) -> Result<LinearAngleTransform> {
    LinearAngleTransform::from_rows(&parse::<Vec<Vec<f64>>>(json)?)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub deviation_max: f64,
    pub deviation_l2: f64,
    /// State vector (gaps) at this step.
    pub values: Vec<f64>,
    /// Vertex coordinates, `[re, im]` or `[x, y, z]`; empty if not constructible.
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceTable {
    pub geometry: String,
    pub converged: bool,
    pub iterations: usize,
    pub target: Vec<f64>,
    pub rows: Vec<TraceRow>,
}

fn row(iteration: usize, values: &[f64], target: &[f64], vertices: Vec<Vec<f64>>) -> TraceRow {
    TraceRow {
        iteration,
        deviation_max: circulant::max_abs_diff(values, target),
        deviation_l2: circulant::l2_diff(values, target),
        values: values.to_vec(),
        vertices,
    }
}

impl TraceTable {
    pub fn from_plane(trace: &PlaneTrace) -> Self {
        let target = vec![TAU / 3.0; 3];
        let rows = trace
            .gaps
            .iter()
            .zip(&trace.triangles)
            .enumerate()
            .map(|(i, (g, t))| row(i, g, &target, t.vertices.iter().map(|z| vec![z.re, z.im]).collect()))
            .collect();
        Self { geometry: "plane".into(), converged: trace.converged, iterations: trace.iterations, target, rows }
    }

    pub fn from_sphere(trace: &SphericalTrace) -> Self {
        let n = trace.polygons[0].len();
        let target = vec![TAU / n as f64; n];
        let rows = trace
            .gaps
            .iter()
            .zip(&trace.polygons)
            .enumerate()
            .map(|(i, (g, p))| {
                row(i, g, &target, p.vertices().iter().map(|z| z.vector().iter().copied().collect()).collect())
            })
            .collect();
        Self { geometry: "sphere".into(), converged: trace.converged, iterations: trace.iterations, target, rows }
    }

    pub fn from_hyperbolic(trace: &HyperbolicTrace) -> Self {
        let target = trace.limit.as_slice().to_vec();
        let rows = trace
            .gaps
            .iter()
            .zip(&trace.points)
            .enumerate()
            .map(|(i, (g, bp))| {
                let vertices = hyperbolic::polygon_from_boundary(bp)
                    .map(|vs| vs.iter().map(|v| vec![v.z().re, v.z().im]).collect())
                    .unwrap_or_default();
                row(i, g.as_slice(), &target, vertices)
            })
            .collect();
        Self { geometry: "hyperbolic".into(), converged: trace.converged, iterations: trace.iterations, target, rows }
    }

    /// `iteration, deviation_max, deviation_l2, v_0 … v_{m−1}`, then vertex
    /// coordinates `z_j_<axis>`.
    pub fn to_csv(&self) -> Result<String> {
        let m = self.target.len();
        let dim = self.rows.iter().flat_map(|r| r.vertices.first()).map(Vec::len).next().unwrap_or(0);
        let vertex_count = self.rows.iter().map(|r| r.vertices.len()).max().unwrap_or(0);
        let axes: &[&str] = if dim == 3 { &["x", "y", "z"] } else { &["re", "im"] };
        let mut header: Vec<String> = ["iteration", "deviation_max", "deviation_l2"].map(String::from).to_vec();
        header.extend((0..m).map(|j| format!("v_{j}")));
        for j in 0..vertex_count {
            header.extend(axes.iter().take(dim).map(|a| format!("z_{j}_{a}")));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![r.iteration.to_string(), fmt(r.deviation_max), fmt(r.deviation_l2)];
            rec.extend(r.values.iter().map(|v| fmt(*v)));
            for j in 0..vertex_count {
                match r.vertices.get(j) {
                    Some(c) => rec.extend(c.iter().map(|v| fmt(*v))),
                    None => rec.extend(std::iter::repeat_n(String::new(), dim)),
                }
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        finish(w)
    }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// `k, trials, mean_iterations, capped_fraction`.
pub fn experiment_csv(rows: &[ExperimentRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "trials", "mean_iterations", "capped_fraction"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.k.to_string(), r.trials.to_string(), fmt(r.mean_iterations), fmt(r.capped_fraction)])
            .map_err(csv_err)?;
    }
    finish(w)
}
