use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid circulant spec: {0}")]
    InvalidSpec(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-contracting transform: eigenvalue modulus {modulus} off the fixed space")]
    NonContracting { modulus: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("polygon is not cyclic (axis dot spread {spread:e})")]
    NotCyclic { spread: f64 },

    #[error("vertices do not wind once around the axis (gap sum {gap_sum})")]
    NotSimple { gap_sum: f64 },

    #[error("circumcenter axis drifted by {drift:e}")]
    AxisDrift { drift: f64 },

    #[error("azimuth undefined for a point on the axis")]
    UndefinedAzimuth,

    #[error("geodesics have no intersection inside the disk")]
    NoInteriorIntersection,

    #[error("point does not lie on both geodesics (residual {residual:e})")]
    NotOnGeodesic { residual: f64 },

    #[error("non-positive gap {value} at index {index}")]
    NonPositiveGap { index: usize, value: f64 },

    #[error("point {0} is outside the open unit disk")]
    OutsideDisk(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("vertices are not concentric about the origin (radius spread {spread:e})")]
    NotConcentric { spread: f64 },
}
