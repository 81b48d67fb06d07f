//! Seeded convergence experiment on random spherical triangles.
//!
//! Each trial draws its own generator from `(seed, k, trial)`: a ChaCha8
//! stream is selected by `k` and the trial index fixes the word position, so
//! results do not depend on thread scheduling.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spherical::{self, SpherePoint, SphericalPolygon};

pub const DEFAULT_TOL: f64 = 0.005;
pub const DEFAULT_CAP: usize = 20;
pub const DEFAULT_K_VALUES: [u32; 4] = [2, 3, 4, 5];
/// Word offset between consecutive trials within one ChaCha stream.
const TRIAL_WORD_SHIFT: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    /// Uniform on the sphere from normalized standard normals.
    #[default]
    Uniform,
    /// Normalized uniform point of `[−1, 1]³`; biased toward the cube corners.
    Cube,
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "cube" => Ok(Self::Cube),
            other => Err(Error::InvalidArgument(format!("unknown sampler {other:?} (expected uniform or cube)"))),
        }
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Cube => "cube",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k_values: Vec<u32>,
    pub trials: usize,
    pub tol: f64,
    pub cap: usize,
    pub seed: u64,
    #[serde(default)]
    pub sampler: Sampler,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k_values: DEFAULT_K_VALUES.to_vec(),
            trials: 200,
            tol: DEFAULT_TOL,
            cap: DEFAULT_CAP,
            seed: 0,
            sampler: Sampler::Uniform,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() {
            return Err(Error::InvalidArgument("no k values given".into()));
        }
        if let Some(k) = self.k_values.iter().find(|k| **k < 2) {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.cap == 0 {
            return Err(Error::InvalidArgument("cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub k: u32,
    pub trials: usize,
    pub mean_iterations: f64,
    pub capped_fraction: f64,
}

fn sample_point<R: Rng + ?Sized>(rng: &mut R, sampler: Sampler) -> Option<SpherePoint> {
    let v = match sampler {
        Sampler::Uniform => Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)),
        Sampler::Cube => Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
    };
    if v.norm() < 1e-9 {
        return None;
    }
    SpherePoint::from_vector(v).ok()
}

/// Three independent random points; redrawn until they form a triangle with a
/// well-defined circumcircle.
pub fn random_spherical_triangle<R: Rng + ?Sized>(rng: &mut R, sampler: Sampler) -> SphericalPolygon {
    loop {
        let Some(points) = (0..3).map(|_| sample_point(rng, sampler)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        if let Ok(p) = SphericalPolygon::new(points) {
            if spherical::to_cyclic_frame(&p).is_ok() {
                return p;
            }
        }
    }
}

pub fn trial_rng(seed: u64, k: u32, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(k));
    rng.set_word_pos((trial as u128) << TRIAL_WORD_SHIFT);
    rng
}

pub fn run_table1(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    let sampler = config.sampler;
    run_table1_with(config, |rng| random_spherical_triangle(rng, sampler))
}

/// [`run_table1`] with a custom triangle generator.
pub fn run_table1_with<G>(config: &ExperimentConfig, generate: G) -> Result<Vec<ExperimentRow>>
where
    G: Fn(&mut ChaCha8Rng) -> SphericalPolygon + Sync,
{
    config.validate()?;
    let mut ks = config.k_values.clone();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let outcomes = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = trial_rng(config.seed, k, trial);
                    let triangle = generate(&mut rng);
                    let trace = spherical::regularize(&triangle, k, config.tol, config.cap)?;
                    Ok((trace.iterations, trace.converged))
                })
                .collect::<Result<Vec<_>>>()?;
            let total: usize = outcomes.iter().map(|(it, _)| *it).sum();
            let capped = outcomes.iter().filter(|(_, converged)| !converged).count();
            let trials = outcomes.len();
            Ok(ExperimentRow {
                k,
                trials,
                mean_iterations: total as f64 / trials as f64,
                capped_fraction: capped as f64 / trials as f64,
            })
        })
        .collect()
}
