//! Turns raw trajectory traces into labeled interaction sequences: detects
//! the interaction window and labels each timestep's demonstrated behavior
//! from acceleration and jerk.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::RecordingMeta;
use crate::error::{Error, Result};
use crate::mapping::EnvironmentObservation;
use crate::scenario::{ActionLabel, KinematicContext};

/// One sample of a recorded vehicle track, lane-aligned: x longitudinal,
/// y lateral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub frame: u64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub ax: f64,
    pub ay: f64,
    pub lane_id: i64,
    /// Precomputed lane-change probability, when the source provides one.
    /// Overrides the built-in intent heuristic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lc_prob: Option<f64>,
}

/// One fully populated timestep of a calibrated interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceFrame {
    pub frame: u64,
    pub ctx: KinematicContext,
    pub obs: EnvironmentObservation,
    pub label0: ActionLabel,
    pub label1: ActionLabel,
}

/// A calibrated, time-indexed record of one merging conflict. P0 (`ego_id`)
/// is the main-road vehicle, P1 (`other_id`) the ramp vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionSequence {
    pub ego_id: i64,
    pub other_id: i64,
    pub frames: Vec<SequenceFrame>,
    /// Frame number of the calibrated interaction endpoint.
    pub end_frame: u64,
    /// Whether the endpoint came from a lane-change probability crossing
    /// rather than running out of data.
    pub complete: bool,
}

impl InteractionSequence {
    pub fn key(&self) -> String {
        format!("{}-{}", self.ego_id, self.other_id)
    }

    /// A sequence shows interaction dynamics when either vehicle's
    /// demonstrated label changes over the window.
    pub fn is_dynamic(&self) -> bool {
        let first = match self.frames.first() {
            Some(f) => (f.label0, f.label1),
            None => return false,
        };
        self.frames
            .iter()
            .any(|f| (f.label0, f.label1) != first)
    }
}

/// Gains of the logistic lane-change intent heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaneChangeHeuristic {
    /// Lateral offset toward the target lane at which the probability is
    /// 0.5 (with zero lateral speed); half a lane width puts it on the
    /// marking.
    pub o_half: f64,
    pub o_scale: f64,
    pub vy_scale: f64,
}

impl Default for LaneChangeHeuristic {
    fn default() -> Self {
        Self {
            o_half: 1.75,
            o_scale: 0.3,
            vy_scale: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    /// Moving-average window (frames) applied to the acceleration series
    /// before jerk differencing; values below 2 disable smoothing.
    pub smooth_window: usize,
    /// Game prediction horizon attached to each context, s.
    pub horizon: f64,
    pub o_scale: f64,
    pub vy_scale: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            smooth_window: 5,
            horizon: 1.0,
            o_scale: 0.3,
            vy_scale: 0.2,
        }
    }
}

/// Calibrates one timestep's behavior from longitudinal acceleration and
/// jerk: negative acceleration is yielding; otherwise positive jerk is
/// non-yielding and anything else is yielding.
pub fn label_behavior(ax: f64, jerk: f64) -> ActionLabel {
    if ax < 0.0 {
        ActionLabel::Yield
    } else if jerk > 0.0 {
        ActionLabel::NYield
    } else {
        ActionLabel::Yield
    }
}

/// Jerk per frame from an acceleration series: optional moving-average
/// smoothing, then central differences in the interior and one-sided
/// differences at the ends.
pub fn jerk_series(ax_series: &[f64], dt: f64, smooth_window: usize) -> Result<Vec<f64>> {
    if ax_series.len() < 2 {
        return Err(Error::SeriesTooShort(ax_series.len()));
    }
    assert!(dt > 0.0, "dt must be positive");
    let ax = if smooth_window >= 2 {
        moving_average(ax_series, smooth_window)
    } else {
        ax_series.to_vec()
    };
    let n = ax.len();
    let mut jerk = Vec::with_capacity(n);
    jerk.push((ax[1] - ax[0]) / dt);
    for i in 1..n - 1 {
        jerk.push((ax[i + 1] - ax[i - 1]) / (2.0 * dt));
    }
    if n > 1 {
        jerk.push((ax[n - 1] - ax[n - 2]) / dt);
    }
    Ok(jerk)
}

fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = series.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let span = &series[lo..=hi];
            span.iter().sum::<f64>() / span.len() as f64
        })
        .collect()
}

/// Logistic lane-change intent from lateral offset and lateral speed toward
/// the target lane. Monotone nondecreasing in both inputs, always in (0, 1).
pub fn lane_change_probability(
    lateral_offset_toward_target: f64,
    vy_toward_target: f64,
    cfg: &LaneChangeHeuristic,
) -> f64 {
    let z = (lateral_offset_toward_target - cfg.o_half) / cfg.o_scale
        + vy_toward_target / cfg.vy_scale;
    1.0 / (1.0 + (-z).exp())
}

/// Finds the interaction endpoint: the first frame whose lane-change
/// probability exceeds 0.5 without the ramp vehicle being overtaken. If no
/// such frame exists the window runs to the last frame, flagged incomplete.
pub fn detect_interaction_window(
    prob_series: &[f64],
    overtaken: &[bool],
) -> Result<(usize, bool)> {
    if prob_series.is_empty() {
        return Err(Error::EmptyProbabilitySeries);
    }
    assert_eq!(
        prob_series.len(),
        overtaken.len(),
        "probability and overtaken series must align"
    );
    for (i, (&p, &ov)) in prob_series.iter().zip(overtaken).enumerate() {
        if p > 0.5 && !ov {
            return Ok((i, true));
        }
    }
    Ok((prob_series.len() - 1, false))
}

struct LaneGeometry {
    ramp_center_y: f64,
    merge_dir_y: f64,
    heuristic: LaneChangeHeuristic,
}

fn lane_geometry(
    meta: &RecordingMeta,
    ramp_lane: i64,
    cfg: &CalibrationConfig,
) -> Result<LaneGeometry> {
    let (lo, hi) = meta.lane_bounds(ramp_lane).ok_or(Error::UnknownLane(ramp_lane))?;
    let ramp_center_y = 0.5 * (lo + hi);
    let target = meta
        .target_lane_for_ramp(ramp_lane)
        .ok_or(Error::UnknownLane(ramp_lane))?;
    let (tlo, thi) = meta.lane_bounds(target).ok_or(Error::UnknownLane(target))?;
    let target_center_y = 0.5 * (tlo + thi);
    let merge_dir_y = if target_center_y >= ramp_center_y {
        1.0
    } else {
        -1.0
    };
    Ok(LaneGeometry {
        ramp_center_y,
        merge_dir_y,
        heuristic: LaneChangeHeuristic {
            o_half: 0.5 * (hi - lo),
            o_scale: cfg.o_scale,
            vy_scale: cfg.vy_scale,
        },
    })
}

/// Aligns the tracks of a main-road/ramp pair, computes per-frame contexts,
/// observations and behavior labels, and truncates at the detected
/// interaction endpoint.
///
/// The forward gap uses the lead vehicle or the ramp endpoint, whichever is
/// closer; with neither available the sequence cannot be calibrated.
pub fn calibrate_sequence(
    ego_id: i64,
    ego: &[TrackPoint],
    other_id: i64,
    other: &[TrackPoint],
    lead: Option<&[TrackPoint]>,
    meta: &RecordingMeta,
    cfg: &CalibrationConfig,
) -> Result<InteractionSequence> {
    let ego_by_frame: BTreeMap<u64, &TrackPoint> = ego.iter().map(|p| (p.frame, p)).collect();
    let other_by_frame: BTreeMap<u64, &TrackPoint> = other.iter().map(|p| (p.frame, p)).collect();
    let lead_by_frame: BTreeMap<u64, &TrackPoint> = lead
        .unwrap_or(&[])
        .iter()
        .map(|p| (p.frame, p))
        .collect();

    let frames: Vec<u64> = ego_by_frame
        .keys()
        .filter(|f| other_by_frame.contains_key(f))
        .copied()
        .collect();
    if frames.len() < 2 {
        return Err(Error::InsufficientOverlap {
            overlap: frames.len(),
        });
    }

    let dir = if meta.x_direction >= 0.0 { 1.0 } else { -1.0 };
    let dt = 1.0 / meta.frame_rate;

    let ax0: Vec<f64> = frames.iter().map(|f| ego_by_frame[f].ax * dir).collect();
    let ax1: Vec<f64> = frames.iter().map(|f| other_by_frame[f].ax * dir).collect();
    let jerk0 = jerk_series(&ax0, dt, cfg.smooth_window)?;
    let jerk1 = jerk_series(&ax1, dt, cfg.smooth_window)?;

    // Lane-change probability: a provided column wins over the heuristic.
    let column: Option<Vec<f64>> = frames
        .iter()
        .map(|f| other_by_frame[f].lc_prob)
        .collect();
    let probs: Vec<f64> = match column {
        Some(col) => col,
        None => {
            let ramp_lane = other_by_frame[&frames[0]].lane_id;
            let geom = lane_geometry(meta, ramp_lane, cfg)?;
            frames
                .iter()
                .map(|f| {
                    let p = other_by_frame[f];
                    let offset = (p.y - geom.ramp_center_y) * geom.merge_dir_y;
                    lane_change_probability(offset, p.vy * geom.merge_dir_y, &geom.heuristic)
                })
                .collect()
        }
    };

    let ramp_end_s = meta.ramp_end_x.map(|x| x * dir);
    let mut overtaken = Vec::with_capacity(frames.len());
    let mut seq_frames = Vec::with_capacity(frames.len());
    for (i, f) in frames.iter().enumerate() {
        let p0 = ego_by_frame[f];
        let p1 = other_by_frame[f];
        let s0 = p0.x * dir;
        let s1 = p1.x * dir;
        overtaken.push(s0 > s1);

        let lead_gap = lead_by_frame
            .get(f)
            .map(|pl| (pl.x * dir - s1).max(0.0));
        let end_gap = ramp_end_s.map(|s| (s - s1).max(0.0));
        let gap_ahead = match (lead_gap, end_gap) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::NoForwardReference),
        };

        let v0 = (p0.vx * dir).max(0.0);
        let v1 = (p1.vx * dir).max(0.0);
        let gap01 = (s1 - s0).abs();
        let ctx = KinematicContext {
            gap_init: gap01,
            gap_ahead,
            v0,
            v1,
            a0: ax0[i],
            a1: ax1[i],
            jerk0_mag: jerk0[i].abs(),
            jerk1_mag: jerk1[i].abs(),
            horizon: cfg.horizon,
        };
        let obs = EnvironmentObservation {
            d01_y: (p0.y - p1.y).abs(),
            dv01_x: (p0.vx - p1.vx) * dir,
            d01_x: gap01,
            d_ahead: gap_ahead,
            v1_x: v1,
        };
        seq_frames.push(SequenceFrame {
            frame: *f,
            ctx,
            obs,
            label0: label_behavior(ax0[i], jerk0[i]),
            label1: label_behavior(ax1[i], jerk1[i]),
        });
    }

    let (end_idx, complete) = detect_interaction_window(&probs, &overtaken)?;
    seq_frames.truncate(end_idx + 1);
    if seq_frames.len() < 2 {
        return Err(Error::WindowTooShort);
    }
    Ok(InteractionSequence {
        ego_id,
        other_id,
        end_frame: frames[end_idx],
        complete,
        frames: seq_frames,
    })
}
