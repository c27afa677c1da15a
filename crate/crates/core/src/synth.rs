//! Deterministic synthetic merging scenarios.
//!
//! Each scenario is one frame-disjoint group of three vehicles on a shared
//! road: a ramp vehicle (P1) ahead of a main-road vehicle (P0), plus a lead
//! vehicle ahead of the ramp. Scenarios come in three regimes with distinct
//! observation clusters and distinct scripted longitudinal behavior:
//!
//! - fast/sparse: wide gaps, high speeds, the main-road vehicle presses on
//!   (positive acceleration and jerk, labeled NYield);
//! - slow/dense: short gaps, low speeds, the main-road vehicle backs off
//!   (negative acceleration, labeled Yield);
//! - dynamic approach: the main-road vehicle closes on a slower ramp
//!   vehicle at speed, pressing on first and braking once the gap
//!   tightens, so its label switches mid-window.
//!
//! The ramp vehicle accelerates gently in every regime and merges with a
//! smoothstep lane change. In the first two regimes it starts faster than
//! the main-road vehicle, so gaps widen no matter what a replayed policy
//! does; the dynamic regime starts wide enough that the gap stays open for
//! the whole window.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calib::{InteractionSequence, SequenceFrame, TrackPoint};
use crate::data::{RecordingMeta, Scene};
use crate::mapping::EnvironmentObservation;
use crate::scenario::{ActionLabel, KinematicContext};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub sequences: usize,
    pub seed: u64,
    pub frame_rate: f64,
    /// Probability that a non-dynamic scenario is fast/sparse rather than
    /// slow/dense.
    pub regime_split: f64,
    /// Probability that a scenario is the dynamic approach-then-brake
    /// regime, whose label switches mid-window.
    pub dynamic_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            sequences: 188,
            seed: 7,
            frame_rate: 25.0,
            regime_split: 0.5,
            dynamic_fraction: 0.25,
        }
    }
}

fn synth_meta(frame_rate: f64) -> RecordingMeta {
    RecordingMeta {
        frame_rate,
        lane_markings: vec![0.0, 3.5, 7.0, 10.5],
        ramp_lane_ids: vec![3],
        ramp_end_x: Some(10_000.0),
        x_direction: 1.0,
    }
}

const MAIN_LANE_Y: f64 = 5.25;
const RAMP_LANE_Y: f64 = 8.75;
const LANE_BOUNDARY_Y: f64 = 7.0;
const LANE_CHANGE_DURATION: f64 = 3.0;

/// Longitudinal profile with linearly ramping acceleration:
/// a(t) = a0 + jerk * t, integrated exactly.
#[derive(Debug, Clone, Copy)]
struct Profile {
    x0: f64,
    v0: f64,
    a0: f64,
    jerk: f64,
}

impl Profile {
    fn x(&self, t: f64) -> f64 {
        self.x0 + self.v0 * t + 0.5 * self.a0 * t * t + self.jerk * t * t * t / 6.0
    }

    fn v(&self, t: f64) -> f64 {
        self.v0 + self.a0 * t + 0.5 * self.jerk * t * t
    }

    fn a(&self, t: f64) -> f64 {
        self.a0 + self.jerk * t
    }

    /// The profile continuing from this one at `t` with a new jerk.
    fn continued_at(&self, t: f64, jerk: f64) -> Profile {
        Profile {
            x0: self.x(t),
            v0: self.v(t),
            a0: self.a(t),
            jerk,
        }
    }
}

/// Acceleration ramp with an optional jerk reversal partway through.
#[derive(Debug, Clone, Copy)]
enum LongitudinalProfile {
    Ramp(Profile),
    Piecewise {
        first: Profile,
        t_kink: f64,
        second: Profile,
    },
}

impl LongitudinalProfile {
    fn ramp(profile: Profile) -> Self {
        LongitudinalProfile::Ramp(profile)
    }

    fn with_kink(first: Profile, t_kink: f64, jerk2: f64) -> Self {
        LongitudinalProfile::Piecewise {
            first,
            t_kink,
            second: first.continued_at(t_kink, jerk2),
        }
    }

    fn sample(&self, t: f64) -> (f64, f64, f64) {
        match self {
            LongitudinalProfile::Ramp(p) => (p.x(t), p.v(t), p.a(t)),
            LongitudinalProfile::Piecewise {
                first,
                t_kink,
                second,
            } => {
                if t < *t_kink {
                    (first.x(t), first.v(t), first.a(t))
                } else {
                    let tau = t - t_kink;
                    (second.x(tau), second.v(tau), second.a(tau))
                }
            }
        }
    }
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

fn smoothstep_deriv(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    6.0 * u * (1.0 - u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    FastSparse,
    SlowDense,
    DynamicApproach,
}

struct ScenarioParams {
    ego: LongitudinalProfile,
    ramp: LongitudinalProfile,
    lead: LongitudinalProfile,
    t_lc: f64,
    length: usize,
}

/// Gap at which the dynamic-approach driver starts easing off, m.
const BRAKE_ONSET_GAP: f64 = 28.0;

fn draw_scenario(rng: &mut ChaCha8Rng, regime: Regime, frame_rate: f64) -> ScenarioParams {
    let t_kink = rng.random_range(0.9..1.3);
    let (v0, dv, gap, lead_gap) = match regime {
        Regime::FastSparse => (
            rng.random_range(28.0..32.0),
            rng.random_range(1.0..3.0),
            rng.random_range(25.0..40.0),
            rng.random_range(80.0..150.0),
        ),
        Regime::SlowDense => (
            rng.random_range(10.8..11.6),
            rng.random_range(1.0..2.0),
            rng.random_range(10.0..16.0),
            rng.random_range(20.0..40.0),
        ),
        Regime::DynamicApproach => {
            let closing = rng.random_range(3.5..4.5);
            // the gap reaches the brake-onset headway exactly at the kink,
            // so the behavior switch is tied to an observable condition
            (
                rng.random_range(28.5..31.0),
                -closing,
                BRAKE_ONSET_GAP + closing * t_kink,
                rng.random_range(50.0..80.0),
            )
        }
    };
    let v1 = v0 + dv;
    let t_lc = rng.random_range(2.6..3.4);
    let length = ((t_lc + LANE_CHANGE_DURATION + 0.4) * frame_rate).ceil() as usize;
    let x1 = 60.0;

    let ego_start = Profile {
        x0: x1 - gap,
        v0,
        a0: match regime {
            Regime::FastSparse => rng.random_range(0.1..0.4),
            Regime::SlowDense => -rng.random_range(0.25..0.35),
            Regime::DynamicApproach => rng.random_range(0.1..0.2),
        },
        jerk: match regime {
            Regime::FastSparse => rng.random_range(0.2..0.5),
            Regime::SlowDense => -rng.random_range(0.1..0.2),
            Regime::DynamicApproach => rng.random_range(0.2..0.3),
        },
    };
    let ego = match regime {
        Regime::DynamicApproach => {
            // press on, then ease off once the gap tightens; the jerk
            // reversal flips the behavior label mid-window
            LongitudinalProfile::with_kink(ego_start, t_kink, -rng.random_range(0.45..0.6))
        }
        _ => LongitudinalProfile::ramp(ego_start),
    };

    let ramp_a0 = rng.random_range(0.1..0.3);
    let ramp_jerk = rng.random_range(0.2..0.4);
    ScenarioParams {
        ego,
        ramp: LongitudinalProfile::ramp(Profile {
            x0: x1,
            v0: v1,
            a0: ramp_a0,
            jerk: ramp_jerk,
        }),
        lead: LongitudinalProfile::ramp(Profile {
            x0: x1 + lead_gap,
            v0: v1 + rng.random_range(-0.3..0.3),
            a0: ramp_a0,
            jerk: ramp_jerk,
        }),
        t_lc,
        length,
    }
}

fn sample_track(
    profile: LongitudinalProfile,
    start_frame: u64,
    length: usize,
    dt: f64,
    lane_change_at: Option<f64>,
) -> Vec<TrackPoint> {
    (0..length)
        .map(|i| {
            let t = i as f64 * dt;
            let (x, vx, ax) = profile.sample(t);
            let (y, vy, ay) = match lane_change_at {
                None => (MAIN_LANE_Y, 0.0, 0.0),
                Some(t_lc) => {
                    let u = (t - t_lc) / LANE_CHANGE_DURATION;
                    let y = RAMP_LANE_Y - (RAMP_LANE_Y - MAIN_LANE_Y) * smoothstep(u);
                    let vy = -(RAMP_LANE_Y - MAIN_LANE_Y) * smoothstep_deriv(u)
                        / LANE_CHANGE_DURATION;
                    (y, vy, 0.0)
                }
            };
            let lane_id = if lane_change_at.is_some() {
                if y > LANE_BOUNDARY_Y {
                    3
                } else {
                    2
                }
            } else {
                2
            };
            TrackPoint {
                frame: start_frame + i as u64,
                x,
                y,
                vx,
                vy,
                ax,
                ay,
                lane_id,
                lc_prob: None,
            }
        })
        .collect()
}

/// Generates a scene of frame-disjoint merging scenarios. Identical
/// configurations produce identical scenes.
pub fn generate_scene(cfg: &SynthConfig) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dt = 1.0 / cfg.frame_rate;
    let mut tracks = BTreeMap::new();
    for i in 0..cfg.sequences {
        let regime = if rng.random::<f64>() < cfg.dynamic_fraction {
            Regime::DynamicApproach
        } else if rng.random::<f64>() < cfg.regime_split {
            Regime::FastSparse
        } else {
            Regime::SlowDense
        };
        let params = draw_scenario(&mut rng, regime, cfg.frame_rate);
        let base_frame = (i as u64) * 1_000;
        let base_id = (i as i64) * 10;
        tracks.insert(
            base_id + 1,
            sample_track(params.ego, base_frame, params.length, dt, None),
        );
        tracks.insert(
            base_id + 2,
            sample_track(params.ramp, base_frame, params.length, dt, Some(params.t_lc)),
        );
        tracks.insert(
            base_id + 3,
            sample_track(params.lead, base_frame, params.length, dt, None),
        );
    }
    Scene {
        meta: synth_meta(cfg.frame_rate),
        tracks,
    }
}

/// A sequence where contact is kinematically forced unless the ego yields:
/// 1 m behind a slower, harshly braking leader. Used to show the violation
/// detector is not vacuous.
pub fn forced_contact_sequence() -> InteractionSequence {
    let frames = (0..75u64)
        .map(|i| {
            let ctx = KinematicContext {
                gap_init: 1.0,
                gap_ahead: 40.0,
                v0: 28.0,
                v1: 24.0,
                a0: 0.0,
                a1: -4.0,
                jerk0_mag: 1.0,
                jerk1_mag: 0.5,
                horizon: 1.0,
            };
            SequenceFrame {
                frame: i,
                ctx,
                obs: EnvironmentObservation {
                    d01_y: 0.0,
                    dv01_x: 4.0,
                    d01_x: 1.0,
                    d_ahead: 40.0,
                    v1_x: 24.0,
                },
                label0: ActionLabel::Yield,
                label1: ActionLabel::Yield,
            }
        })
        .collect();
    InteractionSequence {
        ego_id: 900,
        other_id: 901,
        frames,
        end_frame: 74,
        complete: true,
    }
}
