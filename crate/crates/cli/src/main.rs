//! Command-line pipeline: synthesize or ingest trajectory data, calibrate
//! interactions, recover reward weights, train the environment-to-weight
//! mapping, decide, evaluate, and replay.
//!
//! Defaults come from a JSON config (`--config`, or the MERGEGAME_CONFIG
//! environment variable); explicit flags override it. Exit code is 0 on
//! success, nonzero with a stage-tagged message otherwise.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use mergegame_core::calib::{CalibrationConfig, InteractionSequence};
use mergegame_core::data::{load_scene, save_scene};
use mergegame_core::eval::{
    baseline_stats, build_report, calibrate_scene, decide_sequence, read_jsonl, replay_all,
    run_experiment, write_decisions_csv, write_jsonl, DecisionRecord, ExperimentConfig,
    ReplayPolicy,
};
use mergegame_core::game::WeightVector;
use mergegame_core::irl::{optimize_sequence, IrlConfig};
use mergegame_core::mapping::{train_mapping, MappingModel, WeightSample};
use mergegame_core::scenario::{AccelBounds, NormalizationConstants};
use mergegame_core::synth::{generate_scene, SynthConfig};

const CONFIG_ENV: &str = "MERGEGAME_CONFIG";

#[derive(Parser)]
#[command(
    name = "mergegame",
    version,
    about = "Game-theoretic merging decisions with learned, environment-adaptive weights"
)]
struct Cli {
    /// JSON config file overriding built-in defaults (fallback: the
    /// MERGEGAME_CONFIG environment variable)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic synthetic recording (tracks.csv + meta.json)
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 188)]
        sequences: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Fraction of non-dynamic scenarios that are fast/sparse
        #[arg(long, default_value_t = 0.5)]
        regime_split: f64,
        /// Fraction of scenarios whose behavior switches mid-window
        #[arg(long, default_value_t = 0.25)]
        dynamic_fraction: f64,
    },
    /// Calibrate interaction sequences from a tracks CSV and meta JSON
    Calibrate {
        #[arg(long)]
        tracks: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Moving-average window (frames) for jerk smoothing
        #[arg(long)]
        smooth_window: Option<usize>,
    },
    /// Recover per-timestep weights from calibrated sequences
    Optimize {
        #[arg(long)]
        sequences: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Gradient step size
        #[arg(long)]
        step: Option<f64>,
        /// Convergence threshold on the gradient norm
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<u32>,
    },
    /// Train the environment-to-weight mapping model
    TrainMap {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Number of weight bins per latent
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Adaptive decisions for every frame of the given sequences
    Decide {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sequences: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a plot-ready CSV next to the records
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Similarity report from decision records
    Evaluate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sequences to score fixed-weight baselines on (required with
        /// --baseline)
        #[arg(long)]
        sequences: Option<PathBuf>,
        /// Fixed weights "w01,w02,w11,w12"; repeatable
        #[arg(long)]
        baseline: Vec<String>,
    },
    /// Closed-loop replay with violation counting
    Replay {
        #[arg(long)]
        sequences: PathBuf,
        /// Mapping model (required by the adaptive policy)
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        safety_gap: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// adaptive | always-yield | always-nyield | fixed:w01,w02,w11,w12
        #[arg(long, default_value = "adaptive")]
        policy: String,
    },
    /// Whole pipeline from an experiment config file
    Run {
        /// ExperimentConfig JSON (tracks, meta, out_dir, tunables)
        #[arg(long)]
        experiment: PathBuf,
    },
}

/// Tunables shared by the subcommands; flag values override these.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct ToolConfig {
    norms: NormalizationConstants,
    bounds: AccelBounds,
    irl: IrlConfig,
    calibration: CalibrationConfig,
    bins: usize,
    dt_sim: f64,
    safety_gap: f64,
}

impl Default for ToolConfig {
    fn default() -> Self {
        Self {
            norms: NormalizationConstants::default(),
            bounds: AccelBounds::default(),
            irl: IrlConfig::default(),
            calibration: CalibrationConfig::default(),
            bins: 10,
            dt_sim: 0.04,
            safety_gap: 0.0,
        }
    }
}

fn load_tool_config(flag: &Option<PathBuf>) -> Result<ToolConfig> {
    let path = match flag {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(CONFIG_ENV).map(PathBuf::from),
    };
    match path {
        None => Ok(ToolConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .with_context(|| format!("config: reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("config: parsing {}", p.display()))
        }
    }
}

fn parse_weight_quad(spec: &str) -> Result<(WeightVector, WeightVector)> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("weights {spec:?} are not numeric"))?;
    if parts.len() != 4 {
        bail!("expected 4 comma-separated weights, got {}", parts.len());
    }
    for pair in parts.chunks(2) {
        if pair[0] < 0.0 || pair[1] < 0.0 || (pair[0] + pair[1] - 1.0).abs() > 1e-9 {
            bail!("weight pair ({}, {}) is not on the unit simplex", pair[0], pair[1]);
        }
    }
    Ok((
        WeightVector::new(parts[0], parts[1]),
        WeightVector::new(parts[2], parts[3]),
    ))
}

fn read_sequences(path: &Path) -> Result<Vec<InteractionSequence>> {
    let sequences: Vec<InteractionSequence> =
        read_jsonl(path).with_context(|| format!("reading sequences from {}", path.display()))?;
    if sequences.is_empty() {
        bail!("{} contains no sequences", path.display());
    }
    Ok(sequences)
}

fn write_pretty_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_tool_config(&cli.config)?;
    match cli.command {
        Command::Synth {
            out_dir,
            sequences,
            seed,
            regime_split,
            dynamic_fraction,
        } => {
            let scene = generate_scene(&SynthConfig {
                sequences,
                seed,
                regime_split,
                dynamic_fraction,
                ..SynthConfig::default()
            });
            std::fs::create_dir_all(&out_dir).context("synth")?;
            let tracks = out_dir.join("tracks.csv");
            let meta = out_dir.join("meta.json");
            save_scene(&scene, &tracks).context("synth")?;
            scene.meta.save(&meta).context("synth")?;
            println!(
                "synth: {} scenarios ({} vehicles) -> {} and {}",
                sequences,
                scene.tracks.len(),
                tracks.display(),
                meta.display()
            );
        }

        Command::Calibrate {
            tracks,
            meta,
            out,
            smooth_window,
        } => {
            let scene = load_scene(&tracks, &meta).context("calibrate")?;
            let mut calib = cfg.calibration;
            if let Some(w) = smooth_window {
                calib.smooth_window = w;
            }
            let (sequences, failed) = calibrate_scene(&scene, &calib);
            if sequences.is_empty() {
                bail!("calibrate: no sequences after calibration");
            }
            write_jsonl(&out, &sequences).context("calibrate")?;
            println!(
                "calibrate: {} sequences ({} pairs skipped) -> {}",
                sequences.len(),
                failed,
                out.display()
            );
        }

        Command::Optimize {
            sequences,
            out,
            step,
            tol,
            max_iters,
        } => {
            let sequences = read_sequences(&sequences).context("optimize")?;
            let mut irl = cfg.irl;
            if let Some(v) = step {
                irl.step = v;
            }
            if let Some(v) = tol {
                irl.tol = v;
            }
            if let Some(v) = max_iters {
                irl.max_iters = v;
            }
            irl.bounds = cfg.bounds;
            let samples: Vec<WeightSample> = sequences
                .iter()
                .flat_map(|s| optimize_sequence(s, &cfg.norms, &irl))
                .collect();
            let converged = samples.iter().filter(|s| s.converged).count();
            write_jsonl(&out, &samples).context("optimize")?;
            println!(
                "optimize: {} samples from {} sequences, {converged} converged -> {}",
                samples.len(),
                sequences.len(),
                out.display()
            );
        }

        Command::TrainMap { weights, out, bins } => {
            let samples: Vec<WeightSample> = read_jsonl(&weights).context("train-map")?;
            let bins = bins.unwrap_or(cfg.bins);
            let model = train_mapping(&samples, bins).context("train-map")?;
            model.save(&out).context("train-map")?;
            println!(
                "train-map: {} samples into {bins} bins -> {}",
                samples.len(),
                out.display()
            );
        }

        Command::Decide {
            model,
            sequences,
            out,
            csv,
        } => {
            let model = MappingModel::load(&model).context("decide")?;
            let sequences = read_sequences(&sequences).context("decide")?;
            let records: Vec<DecisionRecord> = sequences
                .iter()
                .flat_map(|s| decide_sequence(&model, s, &cfg.norms, cfg.bounds))
                .collect();
            write_jsonl(&out, &records).context("decide")?;
            if let Some(csv_path) = csv {
                write_decisions_csv(&csv_path, &records).context("decide")?;
            }
            println!(
                "decide: {} records over {} sequences -> {}",
                records.len(),
                sequences.len(),
                out.display()
            );
        }

        Command::Evaluate {
            records,
            out,
            sequences,
            baseline,
        } => {
            let records: Vec<DecisionRecord> = read_jsonl(&records).context("evaluate")?;
            let mut report = build_report(&records, None).context("evaluate")?;
            if !baseline.is_empty() {
                let path = sequences
                    .context("evaluate: --baseline needs --sequences to score against")?;
                let sequences = read_sequences(&path).context("evaluate")?;
                for spec in &baseline {
                    let (l0, l1) = parse_weight_quad(spec).context("evaluate")?;
                    report
                        .baselines
                        .push(baseline_stats(&sequences, l0, l1, &cfg.norms, cfg.bounds));
                }
            }
            write_pretty_json(&out, &report).context("evaluate")?;
            println!(
                "evaluate: similarity {:.2}% over {} points in {} sequences -> {}",
                report.similarity_percent,
                report.points,
                report.sequences,
                out.display()
            );
            for b in &report.baselines {
                println!(
                    "evaluate: baseline ({}, {}) / ({}, {}) similarity {:.2}%",
                    b.lambda0.w1, b.lambda0.w2, b.lambda1.w1, b.lambda1.w2, b.similarity_percent
                );
            }
        }

        Command::Replay {
            sequences,
            model,
            safety_gap,
            out,
            policy,
        } => {
            let sequences = read_sequences(&sequences).context("replay")?;
            let gap = safety_gap.unwrap_or(cfg.safety_gap);
            let loaded_model = match &model {
                Some(path) => Some(MappingModel::load(path).context("replay")?),
                None => None,
            };
            let fixed;
            let policy = match policy.as_str() {
                "adaptive" => ReplayPolicy::Adaptive(
                    loaded_model
                        .as_ref()
                        .context("replay: the adaptive policy needs --model")?,
                ),
                "always-yield" => ReplayPolicy::AlwaysYield,
                "always-nyield" => ReplayPolicy::AlwaysNYield,
                spec if spec.starts_with("fixed:") => {
                    fixed = parse_weight_quad(&spec["fixed:".len()..]).context("replay")?;
                    ReplayPolicy::Fixed {
                        lambda0: fixed.0,
                        lambda1: fixed.1,
                    }
                }
                other => bail!("replay: unknown policy {other:?}"),
            };
            let report = replay_all(&sequences, policy, &cfg.norms, cfg.bounds, cfg.dt_sim, gap)
                .context("replay")?;
            write_pretty_json(&out, &report).context("replay")?;
            println!(
                "replay: {} sequences, {} violating ({:.2}% rate) at safety gap {} m -> {}",
                report.sequences,
                report.violating_sequences,
                100.0 * report.violation_rate,
                gap,
                out.display()
            );
        }

        Command::Run { experiment } => {
            let text = std::fs::read_to_string(&experiment)
                .with_context(|| format!("run: reading {}", experiment.display()))?;
            let config: ExperimentConfig = serde_json::from_str(&text)
                .with_context(|| format!("run: parsing {}", experiment.display()))?;
            let report = run_experiment(&config).context("run")?;
            println!(
                "run: similarity {:.2}% ({} / {} points), {} sequences, \
                 violation rate {:.2}% -> {}",
                report.similarity_percent,
                report.matches,
                report.points,
                report.sequences,
                100.0 * report.violation_rate.unwrap_or(0.0),
                config.out_dir.join("report.json").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
