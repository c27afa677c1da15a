//! Per-timestep weight recovery by expected-feature matching.
//!
//! Given one demonstrated joint action, iterate: build payoffs from the
//! current weights, solve the game, compare the equilibrium's expected
//! features against the demonstrated cell's features, and step the weights
//! along the simplex until the two match.

use serde::{Deserialize, Serialize};

use crate::calib::InteractionSequence;
use crate::game::{
    build_payoffs, decide, feature_matrices, solve_equilibrium, FeatureMatrix, MixedStrategy,
    WeightVector,
};
use crate::mapping::WeightSample;
use crate::scenario::{AccelBounds, ActionLabel, KinematicContext, NormalizationConstants};

/// One demonstrated timestep: the physical state and the joint action the
/// human drivers actually took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Demonstration {
    pub ctx: KinematicContext,
    pub action0: ActionLabel,
    pub action1: ActionLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrlConfig {
    /// Gradient step size.
    pub step: f64,
    /// Convergence threshold on the gradient 2-norm, per player.
    pub tol: f64,
    pub max_iters: u32,
    pub init0: WeightVector,
    pub init1: WeightVector,
    /// Acceleration envelope used when building feature matrices.
    pub bounds: AccelBounds,
}

impl Default for IrlConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            tol: 1e-3,
            max_iters: 500,
            init0: WeightVector::uniform(),
            init1: WeightVector::uniform(),
            bounds: AccelBounds::default(),
        }
    }
}

impl IrlConfig {
    pub fn validate(&self) {
        assert!(self.step > 0.0, "step must be positive");
        assert!(self.tol > 0.0, "tol must be positive");
        assert!(self.max_iters >= 1, "max_iters must be at least 1");
    }
}

/// Result of one per-timestep optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrlResult {
    pub lambda0: WeightVector,
    pub lambda1: WeightVector,
    /// Gradient evaluations performed.
    pub iterations: u32,
    pub converged: bool,
    /// Per-player feature gradients (empirical minus expected) at the
    /// returned weights.
    pub gradient0: [f64; 2],
    pub gradient1: [f64; 2],
    /// Their 2-norms.
    pub grad_norm0: f64,
    pub grad_norm1: f64,
}

/// Expected features under a strategy profile: sum over all four cells of
/// sigma0(j) * sigma1(k) * f[j][k], componentwise.
#[allow(clippy::needless_range_loop)]
pub fn expected_features(
    features: &FeatureMatrix,
    sigma0: MixedStrategy,
    sigma1: MixedStrategy,
) -> [f64; 2] {
    let s0 = sigma0.probs();
    let s1 = sigma1.probs();
    let mut out = [0.0; 2];
    for j in 0..2 {
        for k in 0..2 {
            let w = s0[j] * s1[k];
            out[0] += w * features.cells[j][k][0];
            out[1] += w * features.cells[j][k][1];
        }
    }
    out
}

/// Features of the demonstrated cell: expected features with both
/// strategies one-hot at the demonstrated actions.
pub fn empirical_features(features: &FeatureMatrix, demo: &Demonstration) -> [f64; 2] {
    features.cell(demo.action0, demo.action1)
}

/// Euclidean projection onto the unit simplex {w >= 0, w1 + w2 = 1}. In two
/// dimensions this is a shift onto the w1 + w2 = 1 line followed by a clamp
/// to its feasible segment.
pub fn project_to_simplex(raw: [f64; 2]) -> WeightVector {
    let shift = (1.0 - raw[0] - raw[1]) / 2.0;
    WeightVector::from_w1(raw[0] + shift)
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Recovers the weight pair that makes the game's equilibrium reproduce one
/// demonstrated joint action.
///
/// Each iteration solves the game at the current weights, forms the feature
/// residual (empirical minus expected) per player, and steps the weights
/// along it with a simplex projection. The loop stops once BOTH players'
/// residual norms fall below `tol`, or at `max_iters` with
/// `converged = false`; it never aborts.
pub fn optimize_weights(
    demo: &Demonstration,
    norms: &NormalizationConstants,
    cfg: &IrlConfig,
) -> IrlResult {
    cfg.validate();
    let (f0, f1) = feature_matrices(&demo.ctx, norms, cfg.bounds);
    let emp0 = empirical_features(&f0, demo);
    let emp1 = empirical_features(&f1, demo);

    let mut lambda0 = cfg.init0;
    let mut lambda1 = cfg.init1;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let u0 = build_payoffs(&f0, lambda0);
        let u1 = build_payoffs(&f1, lambda1);
        let sol = solve_equilibrium(&u0, &u1);
        let exp0 = expected_features(&f0, sol.sigma0, sol.sigma1);
        let exp1 = expected_features(&f1, sol.sigma0, sol.sigma1);
        let res0 = [emp0[0] - exp0[0], emp0[1] - exp0[1]];
        let res1 = [emp1[0] - exp1[0], emp1[1] - exp1[1]];
        let n0 = norm2(res0);
        let n1 = norm2(res1);
        if (n0 <= cfg.tol && n1 <= cfg.tol) || iterations >= cfg.max_iters {
            return IrlResult {
                lambda0,
                lambda1,
                iterations,
                converged: n0 <= cfg.tol && n1 <= cfg.tol,
                gradient0: res0,
                gradient1: res1,
                grad_norm0: n0,
                grad_norm1: n1,
            };
        }
        // Step the weights so the equilibrium's expected features move
        // toward the demonstrated ones.
        lambda0 = project_to_simplex([
            lambda0.w1 + cfg.step * res0[0],
            lambda0.w2 + cfg.step * res0[1],
        ]);
        lambda1 = project_to_simplex([
            lambda1.w1 + cfg.step * res1[0],
            lambda1.w2 + cfg.step * res1[1],
        ]);
    }
}

/// Runs the per-timestep optimization over every frame of a calibrated
/// sequence, yielding one training sample per frame for the mapping model.
pub fn optimize_sequence(
    seq: &InteractionSequence,
    norms: &NormalizationConstants,
    cfg: &IrlConfig,
) -> Vec<WeightSample> {
    seq.frames
        .iter()
        .map(|frame| {
            let demo = Demonstration {
                ctx: frame.ctx,
                action0: frame.label0,
                action1: frame.label1,
            };
            let fit = optimize_weights(&demo, norms, cfg);
            WeightSample {
                sequence: seq.key(),
                frame: frame.frame,
                obs: frame.obs,
                lambda0: fit.lambda0,
                lambda1: fit.lambda1,
                iterations: fit.iterations,
                converged: fit.converged,
            }
        })
        .collect()
}

/// Averages recovered weights over a window of samples; convenience for
/// sequence-level summaries.
pub fn average_weights(samples: &[WeightSample]) -> Option<(WeightVector, WeightVector)> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len() as f64;
    let sum0: f64 = samples.iter().map(|s| s.lambda0.w1).sum();
    let sum1: f64 = samples.iter().map(|s| s.lambda1.w1).sum();
    Some((
        WeightVector::from_w1(sum0 / n),
        WeightVector::from_w1(sum1 / n),
    ))
}

/// Did the fitted weights' game reproduce the demonstrated joint action?
pub fn repredicts(demo: &Demonstration, fit: &IrlResult, norms: &NormalizationConstants, bounds: AccelBounds) -> bool {
    let (f0, f1) = feature_matrices(&demo.ctx, norms, bounds);
    let u0 = build_payoffs(&f0, fit.lambda0);
    let u1 = build_payoffs(&f1, fit.lambda1);
    let sol = solve_equilibrium(&u0, &u1);
    decide(sol.sigma0) == demo.action0 && decide(sol.sigma1) == demo.action1
}
