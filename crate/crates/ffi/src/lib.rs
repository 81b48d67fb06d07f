//! C ABI over `polyreg`.
//!
//! Every function returns a [`PolyregStatus`]; on failure the message is
//! kept per thread and read with [`polyreg_last_error_message`]. Handles are
//! opaque and released with their `_free` function. Output buffers are
//! caller-allocated and their lengths are checked.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::Vector3;
use num_complex::Complex64;
use polyreg::analyzer::{self, JordanClass, LinearAngleTransform};
use polyreg::circulant::{self, CirculantSpec};
use polyreg::euclid::{self, PlaneTriangle};
use polyreg::hyperbolic::{self, BoundaryPoints};
use polyreg::spherical::{self, SpherePoint, SphericalPolygon};
use polyreg::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyregStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    BufferTooSmall = 4,
    NonContracting = 5,
    Degenerate = 6,
    NotCyclic = 7,
    NoInteriorIntersection = 8,
    OutsideDisk = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyregJordanClass {
    ComplexRotation = 0,
    RealDiagonal = 1,
    JordanBlock = 2,
    Mixed = 3,
    NonContracting = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PolyregClassification {
    pub preserves_sum: bool,
    pub fixes_regular: bool,
    pub attracting: bool,
    pub spectral_radius: f64,
    pub jordan_class: PolyregJordanClass,
    /// Set only for `ComplexRotation`.
    pub has_rotation: bool,
    pub rotation_a: f64,
    pub rotation_phi: f64,
}

/// Result of an iterative regularization.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyregRunInfo {
    pub iterations: usize,
    pub converged: bool,
}

pub struct PolyregCirculant(CirculantSpec);

pub struct PolyregSphericalPolygon(SphericalPolygon);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: PolyregStatus,
    message: String,
}

impl Failure {
    fn new(status: PolyregStatus, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::LengthMismatch { .. } => PolyregStatus::LengthMismatch,
            Error::NonContracting { .. } => PolyregStatus::NonContracting,
            Error::Degenerate(_) | Error::UndefinedAzimuth | Error::NotSimple { .. } => PolyregStatus::Degenerate,
            Error::NotCyclic { .. } | Error::AxisDrift { .. } => PolyregStatus::NotCyclic,
            Error::NoInteriorIntersection | Error::NotOnGeodesic { .. } => PolyregStatus::NoInteriorIntersection,
            Error::OutsideDisk(_) | Error::NotConcentric { .. } => PolyregStatus::OutsideDisk,
            _ => PolyregStatus::InvalidArgument,
        };
        Self::new(status, e.to_string())
    }
}

type FfiResult<T = ()> = Result<T, Failure>;

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult) -> PolyregStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            PolyregStatus::Ok
        }
        Ok(Err(failure)) => {
            set_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_error("internal panic");
            PolyregStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if p.is_null() {
        return Err(Failure::new(PolyregStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> FfiResult<&'a mut [T]> {
    if p.is_null() {
        return Err(Failure::new(PolyregStatus::NullPointer, format!("{what} is null")));
    }
    if len < need {
        return Err(Failure::new(PolyregStatus::BufferTooSmall, format!("{what} holds {len}, need {need}")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| Failure::new(PolyregStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Failure::new(PolyregStatus::NullPointer, "handle is null"))
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn polyreg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `coeffs` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polyreg_circulant_new(coeffs: *const f64, n: usize, out: *mut *mut PolyregCirculant) -> PolyregStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = CirculantSpec::new(input(coeffs, n, "coeffs")?.to_vec())?;
        *out = Box::into_raw(Box::new(PolyregCirculant(spec)));
        Ok(())
    })
}

/// First row `((k−1)/k, 1/k, 0, …)` of size `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polyreg_circulant_rotation_k(n: usize, k: u32, out: *mut *mut PolyregCirculant) -> PolyregStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(PolyregCirculant(CirculantSpec::rotation_k(n, k)?)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from a `polyreg_circulant_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn polyreg_circulant_free(h: *mut PolyregCirculant) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn polyreg_circulant_len(h: *const PolyregCirculant) -> usize {
    h.as_ref().map_or(0, |h| h.0.n())
}

/// Writes `λ_j` for `j = 0 … n−1` into `re` and `im`.
///
/// # Safety
/// `h` must be live; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn polyreg_circulant_eigenvalues(
    h: *const PolyregCirculant,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> PolyregStatus {
    guard(|| {
        let spec = &handle(h)?.0;
        let re = output(re, len, spec.n(), "re")?;
        let im = output(im, len, spec.n(), "im")?;
        for (j, e) in circulant::eigenvalues(spec).iter().enumerate() {
            re[j] = e.eigenvalue.re;
            im[j] = e.eigenvalue.im;
        }
        Ok(())
    })
}

/// # Safety
/// `h` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polyreg_circulant_contraction(h: *const PolyregCirculant, out: *mut f64) -> PolyregStatus {
    guard(|| {
        *out_ref(out, "out")? = circulant::contraction_factor(&handle(h)?.0);
        Ok(())
    })
}

/// # Safety
/// `h` must be live; `v` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn polyreg_circulant_apply(
    h: *const PolyregCirculant,
    v: *const f64,
    out: *mut f64,
    len: usize,
) -> PolyregStatus {
    guard(|| {
        let r = circulant::apply(&handle(h)?.0, input(v, len, "v")?)?;
        output(out, len, r.len(), "out")?.copy_from_slice(&r);
        Ok(())
    })
}

/// Limit of repeated application (projection onto the unit-eigenvalue space).
///
/// # Safety
/// `h` must be live; `v` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn polyreg_circulant_limit(
    h: *const PolyregCirculant,
    v: *const f64,
    out: *mut f64,
    len: usize,
) -> PolyregStatus {
    guard(|| {
        let r = circulant::fixed_space_limit(&handle(h)?.0, input(v, len, "v")?)?;
        output(out, len, r.len(), "out")?.copy_from_slice(&r);
        Ok(())
    })
}

unsafe fn sphere_points(xyz: *const f64, count: usize) -> FfiResult<Vec<SpherePoint>> {
    let flat = input(xyz, count * 3, "xyz")?;
    flat.chunks_exact(3)
        .map(|c| SpherePoint::new(Vector3::new(c[0], c[1], c[2])).map_err(Failure::from))
        .collect()
}

/// Polygon from `count` unit vectors stored as `x, y, z` triples.
///
/// # Safety
/// `xyz` must hold `3·count` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polyreg_sphere_polygon_new(
    xyz: *const f64,
    count: usize,
    out: *mut *mut PolyregSphericalPolygon,
) -> PolyregStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let p = SphericalPolygon::new(sphere_points(xyz, count)?)?;
        *out = Box::into_raw(Box::new(PolyregSphericalPolygon(p)));
        Ok(())
    })
}

/// Fits a small circle to the points and returns the projected polygon.
///
/// # Safety
/// As [`polyreg_sphere_polygon_new`].
#[no_mangle]
pub unsafe extern "C" fn polyreg_sphere_fit_and_project(
    xyz: *const f64,
    count: usize,
    out: *mut *mut PolyregSphericalPolygon,
) -> PolyregStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let p = spherical::fit_and_project(&sphere_points(xyz, count)?)?;
        *out = Box::into_raw(Box::new(PolyregSphericalPolygon(p)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from a `polyreg_sphere_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn polyreg_sphere_polygon_free(h: *mut PolyregSphericalPolygon) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn polyreg_sphere_polygon_len(h: *const PolyregSphericalPolygon) -> usize {
    h.as_ref().map_or(0, |h| h.0.len())
}

/// # Safety
/// `h` must be live; `xyz` must hold `len` doubles (at least `3·n`).
#[no_mangle]
pub unsafe extern "C" fn polyreg_sphere_polygon_vertices(
    h: *const PolyregSphericalPolygon,
    xyz: *mut f64,
    len: usize,
) -> PolyregStatus {
    guard(|| {
        let p = &handle(h)?.0;
        let out = output(xyz, len, 3 * p.len(), "xyz")?;
        for (dst, v) in out.chunks_exact_mut(3).zip(p.vertices()) {
            dst.copy_from_slice(v.vector().as_slice());
        }
        Ok(())
    })
}

/// Regularizes about the fixed circumcenter axis; `out` receives the final
/// polygon as a new handle.
///
/// # Safety
/// `h` must be live; `out` and `info` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polyreg_sphere_regularize(
    h: *const PolyregSphericalPolygon,
    k: u32,
    tol: f64,
    max_iter: usize,
    out: *mut *mut PolyregSphericalPolygon,
    info: *mut PolyregRunInfo,
) -> PolyregStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let info = out_ref(info, "info")?;
        let trace = spherical::regularize(&handle(h)?.0, k, tol, max_iter)?;
        *info = PolyregRunInfo { iterations: trace.iterations, converged: trace.converged };
        *out = Box::into_raw(Box::new(PolyregSphericalPolygon(trace.last().clone())));
        Ok(())
    })
}

/// # Safety
/// `h` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polyreg_sphere_is_regular(h: *const PolyregSphericalPolygon, tol: f64, out: *mut bool) -> PolyregStatus {
    guard(|| {
        *out_ref(out, "out")? = spherical::is_regular(&handle(h)?.0, tol)?;
        Ok(())
    })
}

/// Napoleon centers of a plane triangle given as `re, im` pairs.
///
/// # Safety
/// `xy` must hold 6 doubles and `out` room for 6.
#[no_mangle]
pub unsafe extern "C" fn polyreg_napoleon_plane(xy: *const f64, out: *mut f64) -> PolyregStatus {
    guard(|| {
        let v = input(xy, 6, "xy")?;
        let t = PlaneTriangle::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]), Complex64::new(v[4], v[5]))?;
        let centers = euclid::napoleon(&t)?.centers;
        let out = output(out, 6, 6, "out")?;
        for (dst, z) in out.chunks_exact_mut(2).zip(centers.vertices) {
            dst[0] = z.re;
            dst[1] = z.im;
        }
        Ok(())
    })
}

/// Iterates the boundary-gap transform on `len` points in `[0, 1)`; the final
/// points are written to `out`.
///
/// # Safety
/// `points` and `out` must hold `len` doubles; `info` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polyreg_hyperbolic_regularize(
    points: *const f64,
    len: usize,
    tol: f64,
    max_iter: usize,
    out: *mut f64,
    info: *mut PolyregRunInfo,
) -> PolyregStatus {
    guard(|| {
        let info = out_ref(info, "info")?;
        let bp = BoundaryPoints::new(input(points, len, "points")?.to_vec())?;
        let trace = hyperbolic::regularize_hyperbolic(&bp, tol, max_iter)?;
        output(out, len, len, "out")?.copy_from_slice(trace.last_points().points());
        *info = PolyregRunInfo { iterations: trace.iterations, converged: trace.converged };
        Ok(())
    })
}

/// Polygon vertices (`re, im` pairs, `len / 2` of them) for `len` boundary points.
///
/// # Safety
/// `points` must hold `len` doubles and `xy` must hold `xy_len ≥ len` doubles.
#[no_mangle]
pub unsafe extern "C" fn polyreg_hyperbolic_polygon(
    points: *const f64,
    len: usize,
    xy: *mut f64,
    xy_len: usize,
) -> PolyregStatus {
    guard(|| {
        let bp = BoundaryPoints::new(input(points, len, "points")?.to_vec())?;
        let vertices = hyperbolic::polygon_from_boundary(&bp)?;
        let out = output(xy, xy_len, 2 * vertices.len(), "xy")?;
        for (dst, v) in out.chunks_exact_mut(2).zip(&vertices) {
            dst[0] = v.z().re;
            dst[1] = v.z().im;
        }
        Ok(())
    })
}

/// Classifies the `n × n` row-major matrix `entries`.
///
/// # Safety
/// `entries` must hold `n·n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn polyreg_classify(entries: *const f64, n: usize, out: *mut PolyregClassification) -> PolyregStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let flat = input(entries, n * n, "entries")?;
        let rows: Vec<Vec<f64>> = flat.chunks_exact(n.max(1)).map(<[f64]>::to_vec).collect();
        let report = analyzer::classify(&LinearAngleTransform::from_rows(&rows)?);
        let rot = report.rotation_params;
        *out = PolyregClassification {
            preserves_sum: report.preserves_sum,
            fixes_regular: report.fixes_regular,
            attracting: report.attracting,
            spectral_radius: report.spectral_radius,
            jordan_class: match report.jordan_class {
                JordanClass::ComplexRotation => PolyregJordanClass::ComplexRotation,
                JordanClass::RealDiagonal => PolyregJordanClass::RealDiagonal,
                JordanClass::JordanBlock => PolyregJordanClass::JordanBlock,
                JordanClass::Mixed => PolyregJordanClass::Mixed,
                JordanClass::NonContracting => PolyregJordanClass::NonContracting,
            },
            has_rotation: rot.is_some(),
            rotation_a: rot.map_or(0.0, |r| r.a),
            rotation_phi: rot.map_or(0.0, |r| r.phi),
        };
        Ok(())
    })
}
