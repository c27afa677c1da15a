//! Physical state of a two-vehicle merging conflict and the short-horizon
//! kinematic prediction used by the game layer.
//!
//! Conventions: P0 is the main-road vehicle, P1 the ramp vehicle ahead of it.
//! Gaps are bumper gaps along the travel direction and never negative; a
//! predicted gap of zero means predicted contact.

use serde::{Deserialize, Serialize};

/// The two longitudinal interaction actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionLabel {
    Yield,
    NYield,
}

impl ActionLabel {
    /// Matrix index of the action: NYield is the first action (index 0),
    /// Yield the second (index 1). Fixed everywhere in the crate.
    pub fn index(self) -> usize {
        match self {
            ActionLabel::NYield => 0,
            ActionLabel::Yield => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        match index {
            0 => ActionLabel::NYield,
            1 => ActionLabel::Yield,
            _ => panic!("action index {index} out of range"),
        }
    }
}

impl std::fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActionLabel::Yield => write!(f, "Yield"),
            ActionLabel::NYield => write!(f, "NYield"),
        }
    }
}

/// Longitudinal acceleration envelope, m/s².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelBounds {
    pub min: f64,
    pub max: f64,
}

impl AccelBounds {
    /// Panics if `min > max`.
    pub fn new(min: f64, max: f64) -> Self {
        assert!(min <= max, "invalid acceleration bounds: {min} > {max}");
        Self { min, max }
    }

    pub fn clamp(&self, a: f64) -> f64 {
        a.clamp(self.min, self.max)
    }
}

impl Default for AccelBounds {
    /// Standard passenger-car comfort envelope.
    fn default() -> Self {
        Self {
            min: -4.0,
            max: 3.0,
        }
    }
}

/// Default jerk magnitude when no recorded value is available, m/s³.
pub const DEFAULT_JERK_MAG: f64 = 1.0;

/// Speeds in feature denominators are floored here to avoid division blowup.
pub const SPEED_FLOOR: f64 = 0.1;

/// Per-timestep physical state of the interacting pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicContext {
    /// Current bumper gap between P0 and P1, m.
    pub gap_init: f64,
    /// Min gap from P1 to the preceding main-road vehicle or the ramp
    /// endpoint, m.
    pub gap_ahead: f64,
    /// Current speeds, m/s.
    pub v0: f64,
    pub v1: f64,
    /// Current longitudinal accelerations, m/s².
    pub a0: f64,
    pub a1: f64,
    /// Jerk magnitudes, m/s³.
    pub jerk0_mag: f64,
    pub jerk1_mag: f64,
    /// Prediction horizon, s.
    pub horizon: f64,
}

impl KinematicContext {
    pub fn is_valid(&self) -> bool {
        let finite = [
            self.gap_init,
            self.gap_ahead,
            self.v0,
            self.v1,
            self.a0,
            self.a1,
            self.jerk0_mag,
            self.jerk1_mag,
            self.horizon,
        ]
        .iter()
        .all(|x| x.is_finite());
        finite
            && self.gap_init >= 0.0
            && self.gap_ahead >= 0.0
            && self.v0 >= 0.0
            && self.v1 >= 0.0
            && self.jerk0_mag >= 0.0
            && self.jerk1_mag >= 0.0
            && self.horizon > 0.0
    }
}

/// Normalization constants that make reward features dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConstants {
    /// Time normalization, s.
    pub t_norm: f64,
    /// Speed normalization, m/s.
    pub v_norm: f64,
    /// Distance normalization, m.
    pub d_norm: f64,
}

impl NormalizationConstants {
    pub fn new(t_norm: f64, v_norm: f64, d_norm: f64) -> Self {
        assert!(
            t_norm > 0.0 && v_norm > 0.0 && d_norm > 0.0,
            "normalization constants must be strictly positive"
        );
        Self {
            t_norm,
            v_norm,
            d_norm,
        }
    }
}

impl Default for NormalizationConstants {
    /// Plausible highway scales: 5 s headway, 120 km/h, 100 m.
    fn default() -> Self {
        Self {
            t_norm: 5.0,
            v_norm: 33.33,
            d_norm: 100.0,
        }
    }
}

/// Acceleration a vehicle can realize over `horizon` given its jerk budget:
/// non-yielding ramps the acceleration up, yielding ramps it down, clamped
/// to the envelope.
pub fn feasible_acceleration(
    a_current: f64,
    jerk_mag: f64,
    horizon: f64,
    action: ActionLabel,
    bounds: AccelBounds,
) -> f64 {
    let raw = match action {
        ActionLabel::NYield => a_current + jerk_mag * horizon,
        ActionLabel::Yield => a_current - jerk_mag * horizon,
    };
    bounds.clamp(raw)
}

/// Speed reached after `horizon` under `a_des`, floored at standstill;
/// vehicles do not reverse in this scenario.
pub fn feasible_speed(v_current: f64, a_des: f64, horizon: f64) -> f64 {
    (v_current + a_des * horizon).max(0.0)
}

/// Predicted bumper gap after `horizon`, floored at 0. A floor hit signals
/// predicted contact. The 0.5 factor on the velocity term is part of the
/// model definition, not a typo.
pub fn predicted_gap(
    gap_init: f64,
    v0_des: f64,
    v1_des: f64,
    a0_des: f64,
    a1_des: f64,
    horizon: f64,
) -> f64 {
    let raw = gap_init.abs()
        + 0.5 * (v1_des.abs() - v0_des.abs()) * horizon
        + 0.5 * (a1_des - a0_des) * horizon * horizon;
    raw.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn feasible_acceleration_nyield_ramps_up() {
        let b = AccelBounds::default();
        assert_relative_eq!(
            feasible_acceleration(0.0, 1.0, 1.0, ActionLabel::NYield, b),
            1.0
        );
    }

    #[test]
    fn feasible_acceleration_yield_ramps_down() {
        let b = AccelBounds::default();
        assert_relative_eq!(
            feasible_acceleration(0.0, 1.0, 1.0, ActionLabel::Yield, b),
            -1.0
        );
    }

    #[test]
    fn feasible_acceleration_zero_jerk_is_identity() {
        let b = AccelBounds::default();
        assert_relative_eq!(
            feasible_acceleration(0.5, 0.0, 2.0, ActionLabel::Yield, b),
            0.5
        );
    }

    #[test]
    fn feasible_acceleration_clamps_to_bounds() {
        let b = AccelBounds::new(-4.0, 3.0);
        assert_relative_eq!(
            feasible_acceleration(2.5, 1.0, 1.0, ActionLabel::NYield, b),
            3.0
        );
        assert_relative_eq!(
            feasible_acceleration(-3.5, 1.0, 1.0, ActionLabel::Yield, b),
            -4.0
        );
    }

    #[test]
    #[should_panic(expected = "invalid acceleration bounds")]
    fn accel_bounds_reject_inverted_range() {
        AccelBounds::new(1.0, -1.0);
    }

    #[test]
    fn feasible_speed_examples() {
        assert_relative_eq!(feasible_speed(30.0, 1.0, 1.0), 31.0);
        assert_relative_eq!(feasible_speed(25.0, 0.0, 5.0), 25.0);
        // raw value -3 is floored at standstill
        assert_relative_eq!(feasible_speed(1.0, -4.0, 1.0), 0.0);
    }

    #[test]
    fn predicted_gap_examples() {
        // 20 + 0.5*(25-30)*1
        assert_relative_eq!(predicted_gap(20.0, 30.0, 25.0, 0.0, 0.0, 1.0), 17.5);
        // identical relative motion leaves the gap unchanged
        assert_relative_eq!(predicted_gap(15.0, 27.0, 27.0, 0.3, 0.3, 4.0), 15.0);
        // 20 + 0.5*(-5)*2 + 0.5*2*4
        assert_relative_eq!(predicted_gap(20.0, 30.0, 25.0, -1.0, 1.0, 2.0), 19.0);
    }

    #[test]
    fn predicted_gap_floors_at_zero() {
        assert_relative_eq!(predicted_gap(1.0, 40.0, 10.0, 0.0, 0.0, 2.0), 0.0);
    }

    #[test]
    fn nyield_acceleration_never_below_yield() {
        let b = AccelBounds::default();
        for i in 0..200 {
            let a = -4.0 + 0.04 * i as f64;
            for jerk in [0.0, 0.3, 1.0, 2.5] {
                for dt in [0.2, 1.0, 3.0] {
                    let ny = feasible_acceleration(a, jerk, dt, ActionLabel::NYield, b);
                    let y = feasible_acceleration(a, jerk, dt, ActionLabel::Yield, b);
                    assert!(ny >= y, "a={a} jerk={jerk} dt={dt}: {ny} < {y}");
                }
            }
        }
    }
}
