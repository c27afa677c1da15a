//! Environment-to-weight mapping: the online-adaptation component.
//!
//! Offline, weight vectors recovered per timestep are discretized into bins
//! and a naive-Bayes classifier with Gaussian emissions is fit per latent
//! (one latent per player). Online, an observation yields a posterior over
//! bins and the weight estimate is the posterior mean of the bin centers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    build_payoffs, decide, feature_matrices, solve_equilibrium, MixedStrategy, WeightVector,
};
use crate::scenario::{AccelBounds, ActionLabel, KinematicContext, NormalizationConstants};

/// Number of observation dimensions, in the fixed order
/// [d01_y, dv01_x, d01_x, d_ahead, v1_x].
pub const OBS_DIMS: usize = 5;

/// Observation dimensions explained by the latent for P0's weights:
/// ego-relative geometry (lateral gap, relative speed, longitudinal gap).
pub const H1_DIMS: [usize; 3] = [0, 1, 2];

/// Observation dimensions explained by the latent for P1's weights:
/// ramp-vehicle constraints (forward gap, own speed, relative speed).
pub const H2_DIMS: [usize; 3] = [3, 4, 1];

/// Variance floor for emission Gaussians, on standardized data.
pub const VARIANCE_FLOOR: f64 = 1e-4;

const MODEL_VERSION: u32 = 1;

/// Environment variables observable at one timestep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentObservation {
    /// Lateral gap between P0 and P1, m.
    pub d01_y: f64,
    /// Longitudinal relative speed v0 - v1, m/s.
    pub dv01_x: f64,
    /// Longitudinal gap between P0 and P1, m.
    pub d01_x: f64,
    /// Forward gap of the ramp vehicle, m.
    pub d_ahead: f64,
    /// Longitudinal speed of P1, m/s.
    pub v1_x: f64,
}

impl EnvironmentObservation {
    pub fn as_array(&self) -> [f64; OBS_DIMS] {
        [self.d01_y, self.dv01_x, self.d01_x, self.d_ahead, self.v1_x]
    }
}

/// One training sample for the mapping model: the observation and the
/// weights recovered for that timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSample {
    pub sequence: String,
    pub frame: u64,
    pub obs: EnvironmentObservation,
    pub lambda0: WeightVector,
    pub lambda1: WeightVector,
    pub iterations: u32,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub var: f64,
}

impl Gaussian {
    fn log_density(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (std::f64::consts::TAU * self.var).ln() - d * d / (2.0 * self.var)
    }
}

/// One discrete latent: prior over weight bins plus per-bin Gaussian
/// emissions over its observation dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentModel {
    /// Indices into the observation array this latent explains.
    pub dims: Vec<usize>,
    /// P(bin), add-one smoothed; sums to 1.
    pub priors: Vec<f64>,
    /// emissions[bin][dim position within `dims`].
    pub emissions: Vec<Vec<Gaussian>>,
}

/// Trained mapping from environment observations to per-player weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingModel {
    pub version: u32,
    /// Number of weight bins per latent.
    pub bins: usize,
    /// Training means per observation dimension.
    pub standardize_mean: [f64; OBS_DIMS],
    /// Training standard deviations per observation dimension (floored so
    /// constant dimensions stay usable).
    pub standardize_std: [f64; OBS_DIMS],
    /// Weight value represented by each bin.
    pub bin_centers: Vec<f64>,
    /// Latent for P0's weights (lambda0).
    pub h1: LatentModel,
    /// Latent for P1's weights (lambda1).
    pub h2: LatentModel,
}

/// Posterior over bins together with its mean-of-centers point estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPosterior {
    pub posterior: Vec<f64>,
    pub w1: f64,
}

/// Full record of one adaptive decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveDecision {
    pub sigma0: MixedStrategy,
    pub sigma1: MixedStrategy,
    pub q0: ActionLabel,
    pub q1: ActionLabel,
    pub lambda0: WeightVector,
    pub lambda1: WeightVector,
    pub degenerate: bool,
}

/// Uniform bin over [0, 1] containing `w1`; the upper edge maps to the last
/// bin. Panics when `w1` is outside [0, 1] or `bins < 2`.
pub fn discretize_weight(w1: f64, bins: usize) -> usize {
    assert!(bins >= 2, "need at least 2 bins");
    assert!((0.0..=1.0).contains(&w1), "weight {w1} out of [0, 1]");
    ((w1 * bins as f64) as usize).min(bins - 1)
}

/// Center of bin `k` with `bins` uniform bins over [0, 1].
pub fn bin_center(k: usize, bins: usize) -> f64 {
    (k as f64 + 0.5) / bins as f64
}

fn fit_latent(
    samples: &[WeightSample],
    standardized: &[[f64; OBS_DIMS]],
    pick_w1: impl Fn(&WeightSample) -> f64,
    dims: &[usize],
    bins: usize,
) -> LatentModel {
    let n = samples.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); bins];
    for (i, s) in samples.iter().enumerate() {
        members[discretize_weight(pick_w1(s), bins)].push(i);
    }
    let priors: Vec<f64> = members
        .iter()
        .map(|m| (m.len() + 1) as f64 / (n + bins) as f64)
        .collect();

    let fit = |indices: &[usize], dim: usize| -> Gaussian {
        let m = indices.len() as f64;
        let mean = indices.iter().map(|&i| standardized[i][dim]).sum::<f64>() / m;
        let var = indices
            .iter()
            .map(|&i| {
                let d = standardized[i][dim] - mean;
                d * d
            })
            .sum::<f64>()
            / m;
        Gaussian {
            mean,
            var: var.max(VARIANCE_FLOOR),
        }
    };
    let all: Vec<usize> = (0..n).collect();
    let global: Vec<Gaussian> = dims.iter().map(|&d| fit(&all, d)).collect();

    let emissions = members
        .iter()
        .map(|m| {
            if m.is_empty() {
                global.clone()
            } else {
                dims.iter().map(|&d| fit(m, d)).collect()
            }
        })
        .collect();
    LatentModel {
        dims: dims.to_vec(),
        priors,
        emissions,
    }
}

/// Fits the mapping model: standardizes observations, bins each sample by
/// its recovered weight, and fits priors and per-bin Gaussian emissions by
/// maximum likelihood. Needs at least as many samples as bins.
pub fn train_mapping(samples: &[WeightSample], bins: usize) -> Result<MappingModel> {
    assert!(bins >= 2, "need at least 2 bins");
    if samples.len() < bins {
        return Err(Error::NotEnoughTrainingSamples {
            samples: samples.len(),
            bins,
        });
    }
    let n = samples.len() as f64;
    let mut mean = [0.0; OBS_DIMS];
    let mut std = [0.0; OBS_DIMS];
    for s in samples {
        let x = s.obs.as_array();
        for d in 0..OBS_DIMS {
            mean[d] += x[d];
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    for s in samples {
        let x = s.obs.as_array();
        for d in 0..OBS_DIMS {
            let diff = x[d] - mean[d];
            std[d] += diff * diff;
        }
    }
    for s in std.iter_mut() {
        *s = (*s / n).sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }

    let standardized: Vec<[f64; OBS_DIMS]> = samples
        .iter()
        .map(|s| {
            let x = s.obs.as_array();
            std::array::from_fn(|d| (x[d] - mean[d]) / std[d])
        })
        .collect();

    Ok(MappingModel {
        version: MODEL_VERSION,
        bins,
        standardize_mean: mean,
        standardize_std: std,
        bin_centers: (0..bins).map(|k| bin_center(k, bins)).collect(),
        h1: fit_latent(samples, &standardized, |s| s.lambda0.w1, &H1_DIMS, bins),
        h2: fit_latent(samples, &standardized, |s| s.lambda1.w1, &H2_DIMS, bins),
    })
}

impl MappingModel {
    pub fn standardize(&self, obs: &EnvironmentObservation) -> [f64; OBS_DIMS] {
        let x = obs.as_array();
        std::array::from_fn(|d| (x[d] - self.standardize_mean[d]) / self.standardize_std[d])
    }

    fn posterior(&self, latent: &LatentModel, x: &[f64; OBS_DIMS]) -> WeightPosterior {
        let mut logp: Vec<f64> = latent
            .priors
            .iter()
            .zip(&latent.emissions)
            .map(|(prior, gaussians)| {
                prior.ln()
                    + latent
                        .dims
                        .iter()
                        .zip(gaussians)
                        .map(|(&d, g)| g.log_density(x[d]))
                        .sum::<f64>()
            })
            .collect();
        let max = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for lp in logp.iter_mut() {
            *lp = (*lp - max).exp();
            total += *lp;
        }
        let posterior: Vec<f64> = logp.into_iter().map(|p| p / total).collect();
        let w1 = posterior
            .iter()
            .zip(&self.bin_centers)
            .map(|(p, c)| p * c)
            .sum();
        WeightPosterior { posterior, w1 }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let model: MappingModel = serde_json::from_reader(std::io::BufReader::new(file))?;
        if model.version != MODEL_VERSION {
            return Err(Error::UnsupportedModelVersion(model.version));
        }
        Ok(model)
    }
}

/// Posterior inference of both players' weights for one observation.
/// Likelihoods are evaluated in log space; posteriors are proper
/// distributions and the point estimate is the posterior mean of the bin
/// centers.
pub fn infer_weights(
    model: &MappingModel,
    obs: &EnvironmentObservation,
) -> (WeightVector, WeightVector, WeightPosterior, WeightPosterior) {
    let x = model.standardize(obs);
    let p0 = model.posterior(&model.h1, &x);
    let p1 = model.posterior(&model.h2, &x);
    (
        WeightVector::from_w1(p0.w1),
        WeightVector::from_w1(p1.w1),
        p0,
        p1,
    )
}

/// Inference composed with the game: infer weights, build payoffs, solve
/// the equilibrium, pick the maximum-likelihood actions.
pub fn adaptive_decide(
    model: &MappingModel,
    ctx: &KinematicContext,
    obs: &EnvironmentObservation,
    norms: &NormalizationConstants,
    bounds: AccelBounds,
) -> AdaptiveDecision {
    let (lambda0, lambda1, _, _) = infer_weights(model, obs);
    let (f0, f1) = feature_matrices(ctx, norms, bounds);
    let sol = solve_equilibrium(&build_payoffs(&f0, lambda0), &build_payoffs(&f1, lambda1));
    AdaptiveDecision {
        sigma0: sol.sigma0,
        sigma1: sol.sigma1,
        q0: decide(sol.sigma0),
        q1: decide(sol.sigma1),
        lambda0,
        lambda1,
        degenerate: sol.is_degenerate(),
    }
}
