//! Batch evaluation and closed-loop replay: human-like decision similarity,
//! fixed-weight baselines, and safety violations under replayed kinematics.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::calib::{calibrate_sequence, CalibrationConfig, InteractionSequence};
use crate::data::{extract_pairs, load_scene};
use crate::error::{Error, Result};
use crate::game::{
    build_payoffs, decide, feature_matrices, solve_equilibrium, MixedStrategy, WeightVector,
};
use crate::irl::{optimize_sequence, IrlConfig};
use crate::mapping::{adaptive_decide, train_mapping, EnvironmentObservation, MappingModel};
use crate::scenario::{
    feasible_acceleration, feasible_speed, AccelBounds, ActionLabel, KinematicContext,
    NormalizationConstants,
};

/// One evaluated vehicle-timestep: predicted strategies and actions next to
/// the demonstrated labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub sequence: String,
    pub frame: u64,
    pub sigma0: MixedStrategy,
    pub sigma1: MixedStrategy,
    pub q0: ActionLabel,
    pub q1: ActionLabel,
    pub label0: ActionLabel,
    pub label1: ActionLabel,
    pub lambda0: WeightVector,
    pub lambda1: WeightVector,
    pub degenerate: bool,
}

/// Which vehicle's decisions count toward similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityScope {
    Ego,
    Other,
    Both,
}

/// (matching, compared) vehicle-timesteps under a scope.
pub fn match_counts(records: &[DecisionRecord], which: SimilarityScope) -> (usize, usize) {
    let mut matches = 0;
    let mut points = 0;
    for r in records {
        if matches!(which, SimilarityScope::Ego | SimilarityScope::Both) {
            points += 1;
            matches += usize::from(r.q0 == r.label0);
        }
        if matches!(which, SimilarityScope::Other | SimilarityScope::Both) {
            points += 1;
            matches += usize::from(r.q1 == r.label1);
        }
    }
    (matches, points)
}

/// Fraction of vehicle-timesteps where the predicted label equals the
/// demonstrated one.
pub fn similarity_rate(records: &[DecisionRecord], which: SimilarityScope) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let (matches, points) = match_counts(records, which);
    Ok(matches as f64 / points as f64)
}

/// Ratio as a percentage rounded to 2 decimal places, the resolution used
/// in reports.
pub fn percent_2dp(ratio: f64) -> f64 {
    (ratio * 10000.0).round() / 100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceStats {
    pub sequence: String,
    pub points: usize,
    pub matches: usize,
    pub similarity: f64,
    /// Demonstrated labels change over the window.
    pub dynamic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violations: Option<usize>,
}

/// Aggregated evaluation metrics. Safety fields are present only when a
/// replay pass ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sequences: usize,
    pub points: usize,
    pub matches: usize,
    pub similarity: f64,
    pub similarity_percent: f64,
    pub dynamic_sequences: usize,
    pub dynamic_points: usize,
    pub dynamic_matches: usize,
    pub dynamic_similarity: f64,
    pub dynamic_similarity_percent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation_rate: Option<f64>,
    /// Fixed-weight benchmark policies evaluated on the same frames.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub baselines: Vec<BaselineStats>,
    pub per_sequence: Vec<SequenceStats>,
}

/// Similarity of one fixed-weight benchmark policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    pub lambda0: WeightVector,
    pub lambda1: WeightVector,
    pub matches: usize,
    pub points: usize,
    pub similarity: f64,
    pub similarity_percent: f64,
}

/// Builds the report from flat records, grouping by sequence. Per-sequence
/// violation counts, when supplied, fill the safety side.
pub fn build_report(
    records: &[DecisionRecord],
    violations: Option<&BTreeMap<String, usize>>,
) -> Result<EvalReport> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let mut groups: BTreeMap<&str, Vec<&DecisionRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(&r.sequence).or_default().push(r);
    }
    let mut per_sequence = Vec::with_capacity(groups.len());
    let (mut points, mut matches) = (0, 0);
    let (mut dyn_seqs, mut dyn_points, mut dyn_matches) = (0, 0, 0);
    let mut violating = 0usize;
    for (key, group) in &groups {
        let (m, p) = {
            let owned: Vec<DecisionRecord> = group.iter().map(|r| (*r).clone()).collect();
            match_counts(&owned, SimilarityScope::Both)
        };
        let first = (group[0].label0, group[0].label1);
        let dynamic = group.iter().any(|r| (r.label0, r.label1) != first);
        let v = violations.and_then(|map| map.get(*key).copied());
        if v.is_some_and(|n| n > 0) {
            violating += 1;
        }
        points += p;
        matches += m;
        if dynamic {
            dyn_seqs += 1;
            dyn_points += p;
            dyn_matches += m;
        }
        per_sequence.push(SequenceStats {
            sequence: key.to_string(),
            points: p,
            matches: m,
            similarity: m as f64 / p as f64,
            dynamic,
            violations: v,
        });
    }
    let sequences = groups.len();
    let similarity = matches as f64 / points as f64;
    let dynamic_similarity = if dyn_points > 0 {
        dyn_matches as f64 / dyn_points as f64
    } else {
        0.0
    };
    Ok(EvalReport {
        sequences,
        points,
        matches,
        similarity,
        similarity_percent: percent_2dp(similarity),
        dynamic_sequences: dyn_seqs,
        dynamic_points: dyn_points,
        dynamic_matches: dyn_matches,
        dynamic_similarity,
        dynamic_similarity_percent: percent_2dp(dynamic_similarity),
        violations: violations.map(|_| violating),
        violation_rate: violations.map(|_| violating as f64 / sequences as f64),
        baselines: Vec::new(),
        per_sequence,
    })
}

/// Evaluates one fixed-weight pair over a set of sequences.
pub fn baseline_stats(
    sequences: &[InteractionSequence],
    lambda0: WeightVector,
    lambda1: WeightVector,
    norms: &NormalizationConstants,
    bounds: AccelBounds,
) -> BaselineStats {
    let records: Vec<DecisionRecord> = sequences
        .iter()
        .flat_map(|s| fixed_weight_baseline(s, lambda0, lambda1, norms, bounds))
        .collect();
    let (matches, points) = match_counts(&records, SimilarityScope::Both);
    let similarity = matches as f64 / points.max(1) as f64;
    BaselineStats {
        lambda0,
        lambda1,
        matches,
        points,
        similarity,
        similarity_percent: percent_2dp(similarity),
    }
}

/// Decision source for closed-loop replay.
#[derive(Debug, Clone, Copy)]
pub enum ReplayPolicy<'a> {
    AlwaysYield,
    AlwaysNYield,
    Fixed {
        lambda0: WeightVector,
        lambda1: WeightVector,
    },
    Adaptive(&'a MappingModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplayStep {
    pub frame: u64,
    pub action: ActionLabel,
    pub gap: f64,
    pub v0: f64,
    pub a0: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub steps: Vec<ReplayStep>,
    /// Steps whose gap fell to or below the safety threshold.
    pub violations: usize,
    pub min_gap: f64,
}

/// Replays a sequence with the ego vehicle driven by the policy and the
/// other vehicle following its recorded trajectory. The ego acceleration
/// evolves through the jerk-bounded feasible-acceleration rule; a violation
/// is any step whose longitudinal gap is at or below `safety_gap`.
pub fn closed_loop_replay(
    seq: &InteractionSequence,
    policy: ReplayPolicy<'_>,
    norms: &NormalizationConstants,
    bounds: AccelBounds,
    dt_sim: f64,
    safety_gap: f64,
) -> Result<ReplayOutcome> {
    if !seq.complete {
        return Err(Error::IncompleteSequence(seq.key()));
    }
    assert!(dt_sim > 0.0, "dt_sim must be positive");
    let first = &seq.frames[0].ctx;
    let mut gap = first.gap_init;
    let mut v0 = first.v0;
    let mut a0 = first.a0;
    let mut steps = Vec::with_capacity(seq.frames.len());
    let mut violations = usize::from(gap <= safety_gap);
    let mut min_gap = gap;

    for rec in &seq.frames {
        let ctx_sim = KinematicContext {
            gap_init: gap.max(0.0),
            gap_ahead: rec.ctx.gap_ahead,
            v0,
            v1: rec.ctx.v1,
            a0,
            a1: rec.ctx.a1,
            jerk0_mag: rec.ctx.jerk0_mag,
            jerk1_mag: rec.ctx.jerk1_mag,
            horizon: rec.ctx.horizon,
        };
        let action = match policy {
            ReplayPolicy::AlwaysYield => ActionLabel::Yield,
            ReplayPolicy::AlwaysNYield => ActionLabel::NYield,
            ReplayPolicy::Fixed { lambda0, lambda1 } => {
                let (f0, f1) = feature_matrices(&ctx_sim, norms, bounds);
                let sol =
                    solve_equilibrium(&build_payoffs(&f0, lambda0), &build_payoffs(&f1, lambda1));
                decide(sol.sigma0)
            }
            ReplayPolicy::Adaptive(model) => {
                let obs_sim = EnvironmentObservation {
                    d01_y: rec.obs.d01_y,
                    dv01_x: v0 - rec.ctx.v1,
                    d01_x: gap.max(0.0),
                    d_ahead: rec.obs.d_ahead,
                    v1_x: rec.obs.v1_x,
                };
                adaptive_decide(model, &ctx_sim, &obs_sim, norms, bounds).q0
            }
        };
        a0 = feasible_acceleration(a0, rec.ctx.jerk0_mag, dt_sim, action, bounds);
        let dx0 = v0 * dt_sim + 0.5 * a0 * dt_sim * dt_sim;
        v0 = feasible_speed(v0, a0, dt_sim);
        let dx1 = rec.ctx.v1 * dt_sim + 0.5 * rec.ctx.a1 * dt_sim * dt_sim;
        gap += dx1 - dx0;
        min_gap = min_gap.min(gap);
        let violation = gap <= safety_gap;
        violations += usize::from(violation);
        steps.push(ReplayStep {
            frame: rec.frame,
            action,
            gap,
            v0,
            a0,
            violation,
        });
    }
    Ok(ReplayOutcome {
        steps,
        violations,
        min_gap,
    })
}

/// Runs the game with constant weights on every recorded frame; the
/// comparison benchmark policy.
pub fn fixed_weight_baseline(
    seq: &InteractionSequence,
    lambda0: WeightVector,
    lambda1: WeightVector,
    norms: &NormalizationConstants,
    bounds: AccelBounds,
) -> Vec<DecisionRecord> {
    seq.frames
        .iter()
        .map(|frame| {
            let (f0, f1) = feature_matrices(&frame.ctx, norms, bounds);
            let sol = solve_equilibrium(&build_payoffs(&f0, lambda0), &build_payoffs(&f1, lambda1));
            DecisionRecord {
                sequence: seq.key(),
                frame: frame.frame,
                sigma0: sol.sigma0,
                sigma1: sol.sigma1,
                q0: decide(sol.sigma0),
                q1: decide(sol.sigma1),
                label0: frame.label0,
                label1: frame.label1,
                lambda0,
                lambda1,
                degenerate: sol.is_degenerate(),
            }
        })
        .collect()
}

/// Adaptive decisions over every recorded frame of a sequence.
pub fn decide_sequence(
    model: &MappingModel,
    seq: &InteractionSequence,
    norms: &NormalizationConstants,
    bounds: AccelBounds,
) -> Vec<DecisionRecord> {
    seq.frames
        .iter()
        .map(|frame| {
            let d = adaptive_decide(model, &frame.ctx, &frame.obs, norms, bounds);
            DecisionRecord {
                sequence: seq.key(),
                frame: frame.frame,
                sigma0: d.sigma0,
                sigma1: d.sigma1,
                q0: d.q0,
                q1: d.q1,
                label0: frame.label0,
                label1: frame.label1,
                lambda0: d.lambda0,
                lambda1: d.lambda1,
                degenerate: d.degenerate,
            }
        })
        .collect()
}

/// Safety summary produced by the standalone replay pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetyReport {
    pub sequences: usize,
    pub violating_sequences: usize,
    pub violation_rate: f64,
    pub total_violation_steps: usize,
    pub safety_gap: f64,
    pub per_sequence: Vec<SafetySequenceStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetySequenceStats {
    pub sequence: String,
    pub violations: usize,
    pub min_gap: f64,
}

/// Replays every complete sequence under a policy and aggregates the
/// violations.
pub fn replay_all(
    sequences: &[InteractionSequence],
    policy: ReplayPolicy<'_>,
    norms: &NormalizationConstants,
    bounds: AccelBounds,
    dt_sim: f64,
    safety_gap: f64,
) -> Result<SafetyReport> {
    let mut per_sequence = Vec::new();
    let mut violating = 0;
    let mut total = 0;
    for seq in sequences.iter().filter(|s| s.complete) {
        let outcome = closed_loop_replay(seq, policy, norms, bounds, dt_sim, safety_gap)?;
        if outcome.violations > 0 {
            violating += 1;
        }
        total += outcome.violations;
        per_sequence.push(SafetySequenceStats {
            sequence: seq.key(),
            violations: outcome.violations,
            min_gap: outcome.min_gap,
        });
    }
    if per_sequence.is_empty() {
        return Err(Error::NoSequences);
    }
    Ok(SafetyReport {
        sequences: per_sequence.len(),
        violating_sequences: violating,
        violation_rate: violating as f64 / per_sequence.len() as f64,
        total_violation_steps: total,
        safety_gap,
        per_sequence,
    })
}

/// Experiment configuration: the full pipeline from tracks to report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub tracks: PathBuf,
    pub meta: PathBuf,
    pub out_dir: PathBuf,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub norms: NormalizationConstants,
    #[serde(default)]
    pub bounds: AccelBounds,
    #[serde(default)]
    pub irl: IrlConfig,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    #[serde(default = "default_dt_sim")]
    pub dt_sim: f64,
    #[serde(default)]
    pub safety_gap: f64,
    /// Load a pre-trained mapping model instead of training one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_path: Option<PathBuf>,
    /// Fraction of sequences used to train the mapping model (front of the
    /// calibration order); decisions are evaluated on all sequences.
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
}

fn default_bins() -> usize {
    10
}

fn default_dt_sim() -> f64 {
    0.04
}

fn default_train_fraction() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn new(tracks: PathBuf, meta: PathBuf, out_dir: PathBuf) -> Self {
        Self {
            tracks,
            meta,
            out_dir,
            bins: default_bins(),
            norms: NormalizationConstants::default(),
            bounds: AccelBounds::default(),
            irl: IrlConfig::default(),
            calibration: CalibrationConfig::default(),
            dt_sim: default_dt_sim(),
            safety_gap: 0.0,
            model_path: None,
            train_fraction: default_train_fraction(),
        }
    }
}

/// Writes one JSON value per line.
pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut items = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line)?);
    }
    Ok(items)
}

/// Plot-ready CSV: per frame, both strategies, predictions and labels.
pub fn write_decisions_csv(path: &Path, records: &[DecisionRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "sequence",
        "frame",
        "sigma0_nyield",
        "sigma1_nyield",
        "q0",
        "q1",
        "label0",
        "label1",
        "lambda0_w1",
        "lambda1_w1",
        "degenerate",
    ])?;
    for r in records {
        writer.write_record([
            r.sequence.clone(),
            r.frame.to_string(),
            r.sigma0.p_nyield.to_string(),
            r.sigma1.p_nyield.to_string(),
            r.q0.to_string(),
            r.q1.to_string(),
            r.label0.to_string(),
            r.label1.to_string(),
            r.lambda0.w1.to_string(),
            r.lambda1.w1.to_string(),
            r.degenerate.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Calibrates every extracted pair of a scene, skipping pairs that fail.
pub fn calibrate_scene(
    scene: &crate::data::Scene,
    cfg: &CalibrationConfig,
) -> (Vec<InteractionSequence>, usize) {
    let extraction = extract_pairs(scene);
    let mut sequences = Vec::new();
    let mut failed = extraction.skipped;
    for pair in &extraction.pairs {
        let lead = pair.lead_id.map(|id| scene.tracks[&id].as_slice());
        match calibrate_sequence(
            pair.ego_id,
            &scene.tracks[&pair.ego_id],
            pair.other_id,
            &scene.tracks[&pair.other_id],
            lead,
            &scene.meta,
            cfg,
        ) {
            Ok(seq) => sequences.push(seq),
            Err(_) => failed += 1,
        }
    }
    (sequences, failed)
}

/// Runs the whole pipeline: load, pair, calibrate, per-timestep weight
/// recovery, mapping-model training (or loading), adaptive decisions,
/// closed-loop replay, metrics. Writes every intermediate artifact plus the
/// final report under `out_dir` and returns the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EvalReport> {
    let scene =
        load_scene(&config.tracks, &config.meta).map_err(|e| Error::stage("load", e))?;

    let (sequences, _failed) = calibrate_scene(&scene, &config.calibration);
    if sequences.is_empty() {
        return Err(Error::stage("calibrate", Error::NoSequences));
    }

    std::fs::create_dir_all(&config.out_dir)?;
    write_jsonl(&config.out_dir.join("sequences.jsonl"), &sequences)
        .map_err(|e| Error::stage("calibrate", e))?;

    let train_count = ((sequences.len() as f64 * config.train_fraction).round() as usize)
        .clamp(1, sequences.len());
    let samples: Vec<_> = sequences[..train_count]
        .iter()
        .flat_map(|seq| optimize_sequence(seq, &config.norms, &config.irl))
        .collect();
    write_jsonl(&config.out_dir.join("weights.jsonl"), &samples)
        .map_err(|e| Error::stage("optimize", e))?;

    let model = match &config.model_path {
        Some(path) => MappingModel::load(path).map_err(|e| Error::stage("train-map", e))?,
        None => train_mapping(&samples, config.bins).map_err(|e| Error::stage("train-map", e))?,
    };
    model
        .save(&config.out_dir.join("model.json"))
        .map_err(|e| Error::stage("train-map", e))?;

    let records: Vec<DecisionRecord> = sequences
        .iter()
        .flat_map(|seq| decide_sequence(&model, seq, &config.norms, config.bounds))
        .collect();
    write_jsonl(&config.out_dir.join("records.jsonl"), &records)
        .map_err(|e| Error::stage("decide", e))?;
    write_decisions_csv(&config.out_dir.join("decisions.csv"), &records)
        .map_err(|e| Error::stage("decide", e))?;

    let mut violations = BTreeMap::new();
    for seq in sequences.iter().filter(|s| s.complete) {
        let outcome = closed_loop_replay(
            seq,
            ReplayPolicy::Adaptive(&model),
            &config.norms,
            config.bounds,
            config.dt_sim,
            config.safety_gap,
        )
        .map_err(|e| Error::stage("replay", e))?;
        violations.insert(seq.key(), outcome.violations);
    }

    let report =
        build_report(&records, Some(&violations)).map_err(|e| Error::stage("evaluate", e))?;
    let file = std::fs::File::create(config.out_dir.join("report.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &report)?;
    Ok(report)
}
