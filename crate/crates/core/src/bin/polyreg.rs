use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polyreg::analyzer;
use polyreg::circulant::{self, SpectrumEntry};
use polyreg::euclid;
use polyreg::experiment::{self, ExperimentConfig, Sampler};
use polyreg::hyperbolic::{self, DiskPoint};
use polyreg::io::{self, TraceTable};
use polyreg::spherical::{self, SpherePoint, SphericalPolygon};

#[derive(Parser)]
#[command(name = "polyreg", version, about = "Regularize polygons by iterated circulant averaging")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Geometry {
    Plane,
    Sphere,
    Hyperbolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum NapoleonGeometry {
    Plane,
    Sphere,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the regularizing transform and report the result.
    Regularize(RegularizeArgs),
    /// Closed-form spectrum of a circulant given by its first row.
    Eigen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Napoleon construction on a triangle.
    Napoleon {
        #[arg(long, value_enum)]
        geometry: NapoleonGeometry,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a small circle to sphere points and project them onto it.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a linear angle transform.
    Analyze {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regular hyperbolic triangle from origin-centred disk vertices via the polar map.
    Polar {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args)]
struct RegularizeArgs {
    #[arg(long, value_enum)]
    geometry: Geometry,
    #[arg(long)]
    input: PathBuf,
    /// Rotation parameter (plane supports only 2; ignored for hyperbolic).
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Fit a small circle and project onto it first (sphere only).
    #[arg(long)]
    fit: bool,
    /// Per-iteration trace file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Trace format.
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Mean iterations to regularize random spherical triangles, per k.
    Table1 {
        #[arg(long, value_delimiter = ',', default_values_t = experiment::DEFAULT_K_VALUES)]
        k: Vec<u32>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = experiment::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = experiment::DEFAULT_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = Sampler::Uniform)]
        sampler: Sampler,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, contents).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    emit(out, &io::to_json(value)?)
}

#[derive(Serialize)]
struct RegularizeSummary<V: Serialize> {
    geometry: &'static str,
    converged: bool,
    iterations: usize,
    vertices: V,
    gaps: Vec<f64>,
    regular: bool,
}

#[derive(Serialize)]
struct EigenReport {
    n: usize,
    contraction_factor: f64,
    unit_indices: Vec<usize>,
    spectrum: Vec<SpectrumEntry>,
}

#[derive(Serialize)]
struct SphereNapoleon {
    vertices: SphericalPolygon,
    chordal_centers: Vec<[f64; 3]>,
    rotation_residual: f64,
}

#[derive(Serialize)]
struct FitReport {
    axis: SpherePoint,
    cos_radius: f64,
    projected: SphericalPolygon,
}

fn regularize(args: &RegularizeArgs) -> Result<()> {
    let RegularizeArgs { geometry, ref input, k, tol, max_iter, fit, ref trace, format, ref out } = *args;
    let out = out.as_deref();
    let text = read(input)?;
    if fit && !matches!(geometry, Geometry::Sphere) {
        bail!("--fit applies only to --geometry sphere");
    }
    let table = match geometry {
        Geometry::Plane => {
            if k != 2 {
                bail!("the plane transform is the k = 2 half step; got --k {k}");
            }
            let t = io::parse_plane_triangle(&text)?;
            let trace = euclid::regularize(&t, tol, max_iter)?;
            let last = trace.triangles.last().unwrap();
            emit_json(
                out,
                &RegularizeSummary {
                    geometry: "plane",
                    converged: trace.converged,
                    iterations: trace.iterations,
                    vertices: last.vertices,
                    gaps: trace.gaps.last().unwrap().to_vec(),
                    regular: euclid::is_equilateral(last, 10.0 * tol),
                },
            )?;
            TraceTable::from_plane(&trace)
        }
        Geometry::Sphere => {
            let points = io::parse_sphere_points(&text)?;
            let polygon = if fit { spherical::fit_and_project(&points)? } else { SphericalPolygon::new(points)? };
            let trace = spherical::regularize(&polygon, k, tol, max_iter)?;
            emit_json(
                out,
                &RegularizeSummary {
                    geometry: "sphere",
                    converged: trace.converged,
                    iterations: trace.iterations,
                    vertices: trace.last().clone(),
                    gaps: trace.gaps.last().unwrap().clone(),
                    regular: spherical::is_regular(trace.last(), 10.0 * tol)?,
                },
            )?;
            TraceTable::from_sphere(&trace)
        }
        Geometry::Hyperbolic => {
            let bp = io::parse_boundary(&text)?;
            let trace = hyperbolic::regularize_hyperbolic(&bp, tol, max_iter)?;
            let last = trace.last_points();
            emit_json(
                out,
                &RegularizeSummary {
                    geometry: "hyperbolic",
                    converged: trace.converged,
                    iterations: trace.iterations,
                    vertices: hyperbolic::polygon_from_boundary(last)?,
                    gaps: trace.gaps.last().unwrap().as_slice().to_vec(),
                    regular: hyperbolic::check_regular(last, 10.0 * tol)?,
                },
            )?;
            TraceTable::from_hyperbolic(&trace)
        }
    };
    if let Some(path) = trace {
        let contents = match format {
            Format::Csv => table.to_csv()?,
            Format::Json => io::to_json(&table)?,
        };
        emit(Some(path), &contents)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Regularize(args) => regularize(&args),
        Command::Eigen { spec, out } => {
            let spec = io::parse_spec(&read(&spec)?)?;
            emit_json(
                out.as_deref(),
                &EigenReport {
                    n: spec.n(),
                    contraction_factor: circulant::contraction_factor(&spec),
                    unit_indices: circulant::unit_indices(&spec),
                    spectrum: circulant::eigenvalues(&spec),
                },
            )
        }
        Command::Napoleon { geometry, input, out } => {
            let text = read(&input)?;
            match geometry {
                NapoleonGeometry::Plane => emit_json(out.as_deref(), &euclid::napoleon(&io::parse_plane_triangle(&text)?)?),
                NapoleonGeometry::Sphere => {
                    let pts = io::parse_sphere_points(&text)?;
                    let [a, b, c]: [SpherePoint; 3] =
                        pts.try_into().map_err(|v: Vec<_>| anyhow::anyhow!("expected 3 points, got {}", v.len()))?;
                    let vertices = spherical::napoleon_sphere(&a, &b, &c)?;
                    let chordal = spherical::napoleon_chordal_centers(&a, &b, &c)?;
                    emit_json(
                        out.as_deref(),
                        &SphereNapoleon {
                            rotation_residual: spherical::rotation_residual(&vertices)?,
                            vertices,
                            chordal_centers: chordal.map(|v| [v.x, v.y, v.z]).to_vec(),
                        },
                    )
                }
            }
        }
        Command::Fit { input, out } => {
            let pts = io::parse_sphere_points(&read(&input)?)?;
            let (axis, cos_radius) = spherical::fit_small_circle(&pts)?;
            let projected = spherical::project_to_circle(&pts, &axis, cos_radius)?;
            emit_json(out.as_deref(), &FitReport { axis, cos_radius, projected })
        }
        Command::Analyze { matrix, out } => {
            let t = io::parse_matrix(&read(&matrix)?)?;
            emit_json(out.as_deref(), &analyzer::classify(&t))
        }
        Command::Polar { input, out } => {
            let pts: Vec<DiskPoint> = serde_json::from_str(&read(&input)?).context("parsing disk points")?;
            let v: [DiskPoint; 3] =
                pts.try_into().map_err(|v: Vec<_>| anyhow::anyhow!("expected 3 points, got {}", v.len()))?;
            emit_json(out.as_deref(), &hyperbolic::regular_triangle_via_polar(&v)?)
        }
        Command::Experiment(Experiment::Table1 { k, trials, tol, cap, seed, sampler, format, out }) => {
            let config = ExperimentConfig { k_values: k, trials, tol, cap, seed, sampler };
            let rows = experiment::run_table1(&config)?;
            let contents = match format {
                Format::Csv => io::experiment_csv(&rows)?,
                Format::Json => io::to_json(&rows)?,
            };
            emit(out.as_deref(), &contents)
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
