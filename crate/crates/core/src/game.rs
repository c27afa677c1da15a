//! Per-timestep 2x2 bimatrix game: feature matrices, payoff construction,
//! and the mixed-strategy equilibrium solver.
//!
//! Matrix convention, fixed crate-wide: row = P0's action, column = P1's
//! action, index 0 = NYield, index 1 = Yield.

use serde::{Deserialize, Serialize};

use crate::scenario::{
    feasible_acceleration, feasible_speed, predicted_gap, AccelBounds, ActionLabel,
    KinematicContext, NormalizationConstants, SPEED_FLOOR,
};

/// Tolerance for the unilateral-deviation (epsilon-Nash) check.
pub const NASH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    P0,
    P1,
}

/// Per-player reward weights on the unit simplex: w1 + w2 = 1, both
/// nonnegative. Nash strategies are invariant to positive scaling of a
/// player's payoffs, so only the normalized form is identifiable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub w1: f64,
    pub w2: f64,
}

impl WeightVector {
    /// Panics unless (w1, w2) is on the simplex within 1e-9.
    pub fn new(w1: f64, w2: f64) -> Self {
        assert!(
            w1 >= -1e-9 && w2 >= -1e-9 && (w1 + w2 - 1.0).abs() <= 1e-9,
            "({w1}, {w2}) is not on the unit simplex"
        );
        Self { w1, w2 }
    }

    /// Builds (w1, 1 - w1) with w1 clamped into [0, 1].
    pub fn from_w1(w1: f64) -> Self {
        let w1 = w1.clamp(0.0, 1.0);
        Self { w1, w2: 1.0 - w1 }
    }

    pub fn uniform() -> Self {
        Self { w1: 0.5, w2: 0.5 }
    }

    pub fn dot(&self, features: [f64; 2]) -> f64 {
        self.w1 * features[0] + self.w2 * features[1]
    }

    pub fn is_normalized(&self) -> bool {
        self.w1 >= -1e-9 && self.w2 >= -1e-9 && (self.w1 + self.w2 - 1.0).abs() <= 1e-9
    }
}

/// 2-component feature vector for one joint action cell.
pub type FeatureVec = [f64; 2];

/// Per-cell interaction features for one player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    /// cells[row][col]: row = P0's action, col = P1's action.
    pub cells: [[FeatureVec; 2]; 2],
    pub player: Player,
}

impl FeatureMatrix {
    pub fn cell(&self, action0: ActionLabel, action1: ActionLabel) -> FeatureVec {
        self.cells[action0.index()][action1.index()]
    }
}

/// Per-cell scalar rewards for one player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    pub u: [[f64; 2]; 2],
    pub player: Player,
}

impl PayoffMatrix {
    pub fn from_rows(player: Player, u: [[f64; 2]; 2]) -> Self {
        Self { u, player }
    }
}

/// Probability distribution over the two actions; `p_nyield` is the
/// probability of the first action (NYield).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    pub p_nyield: f64,
}

impl MixedStrategy {
    pub fn new(p_nyield: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&p_nyield),
            "probability {p_nyield} out of [0, 1]"
        );
        Self { p_nyield }
    }

    pub fn pure(action: ActionLabel) -> Self {
        match action {
            ActionLabel::NYield => Self { p_nyield: 1.0 },
            ActionLabel::Yield => Self { p_nyield: 0.0 },
        }
    }

    pub fn uniform() -> Self {
        Self { p_nyield: 0.5 }
    }

    /// Probabilities in action-index order [NYield, Yield].
    pub fn probs(&self) -> [f64; 2] {
        [self.p_nyield, 1.0 - self.p_nyield]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    /// A player had a strictly dominant action; the other best-responds.
    PureDominant,
    /// Pure profile found by mutual best-response enumeration.
    PureBestResponse,
    /// Interior mixed equilibrium from the indifference conditions.
    MixedInterior,
    /// A player's actions are payoff-identical against every opponent
    /// action; that player's strategy is set to uniform.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub sigma0: MixedStrategy,
    pub sigma1: MixedStrategy,
    /// Expected rewards at the returned strategies.
    pub v0: f64,
    pub v1: f64,
    pub kind: EquilibriumKind,
}

impl EquilibriumSolution {
    pub fn is_degenerate(&self) -> bool {
        self.kind == EquilibriumKind::Degenerate
    }
}

/// Builds both players' feature matrices for every joint action pair.
///
/// For each (q0, q1): desired accelerations come from the jerk budget,
/// desired speeds from those, and the predicted gap from both; then
///   rho0 = [gap01 / (v0 * t_norm), v0_des / v_norm]
///   rho1 = [gap_ahead / (v1 * t_norm), gap01 / d_norm]
/// with current speeds in denominators floored at [`SPEED_FLOOR`].
pub fn feature_matrices(
    ctx: &KinematicContext,
    norms: &NormalizationConstants,
    bounds: AccelBounds,
) -> (FeatureMatrix, FeatureMatrix) {
    debug_assert!(ctx.is_valid(), "invalid kinematic context {ctx:?}");
    let mut f0 = [[[0.0; 2]; 2]; 2];
    let mut f1 = [[[0.0; 2]; 2]; 2];
    let v0_den = ctx.v0.max(SPEED_FLOOR) * norms.t_norm;
    let v1_den = ctx.v1.max(SPEED_FLOOR) * norms.t_norm;
    for (j, q0) in [ActionLabel::NYield, ActionLabel::Yield].into_iter().enumerate() {
        for (k, q1) in [ActionLabel::NYield, ActionLabel::Yield].into_iter().enumerate() {
            let a0_des = feasible_acceleration(ctx.a0, ctx.jerk0_mag, ctx.horizon, q0, bounds);
            let a1_des = feasible_acceleration(ctx.a1, ctx.jerk1_mag, ctx.horizon, q1, bounds);
            let v0_des = feasible_speed(ctx.v0, a0_des, ctx.horizon);
            let v1_des = feasible_speed(ctx.v1, a1_des, ctx.horizon);
            let gap01 = predicted_gap(ctx.gap_init, v0_des, v1_des, a0_des, a1_des, ctx.horizon);
            f0[j][k] = [gap01 / v0_den, v0_des / norms.v_norm];
            f1[j][k] = [ctx.gap_ahead / v1_den, gap01 / norms.d_norm];
        }
    }
    (
        FeatureMatrix {
            cells: f0,
            player: Player::P0,
        },
        FeatureMatrix {
            cells: f1,
            player: Player::P1,
        },
    )
}

/// Rewards are linear in features: u[j][k] = w1 * f1 + w2 * f2.
pub fn build_payoffs(features: &FeatureMatrix, weights: WeightVector) -> PayoffMatrix {
    let u = features.cells.map(|row| row.map(|cell| weights.dot(cell)));
    PayoffMatrix {
        u,
        player: features.player,
    }
}

/// Expected payoff sigma0 * U * sigma1^T.
#[allow(clippy::needless_range_loop)]
pub fn expected_payoff(u: &PayoffMatrix, sigma0: MixedStrategy, sigma1: MixedStrategy) -> f64 {
    let s0 = sigma0.probs();
    let s1 = sigma1.probs();
    let mut total = 0.0;
    for j in 0..2 {
        for k in 0..2 {
            total += s0[j] * u.u[j][k] * s1[k];
        }
    }
    total
}

/// Best unilateral deviation gains (P0, P1) at a strategy profile; both are
/// <= eps at an epsilon-Nash equilibrium.
pub fn deviation_gains(
    u0: &PayoffMatrix,
    u1: &PayoffMatrix,
    sigma0: MixedStrategy,
    sigma1: MixedStrategy,
) -> (f64, f64) {
    let v0 = expected_payoff(u0, sigma0, sigma1);
    let v1 = expected_payoff(u1, sigma0, sigma1);
    let s1 = sigma1.probs();
    let s0 = sigma0.probs();
    let row = |j: usize| u0.u[j][0] * s1[0] + u0.u[j][1] * s1[1];
    let col = |k: usize| s0[0] * u1.u[0][k] + s0[1] * u1.u[1][k];
    let gain0 = row(0).max(row(1)) - v0;
    let gain1 = col(0).max(col(1)) - v1;
    (gain0, gain1)
}

fn is_epsilon_nash(
    u0: &PayoffMatrix,
    u1: &PayoffMatrix,
    sigma0: MixedStrategy,
    sigma1: MixedStrategy,
    eps: f64,
) -> bool {
    let (g0, g1) = deviation_gains(u0, u1, sigma0, sigma1);
    g0 <= eps && g1 <= eps
}

fn solution_at(
    u0: &PayoffMatrix,
    u1: &PayoffMatrix,
    sigma0: MixedStrategy,
    sigma1: MixedStrategy,
    kind: EquilibriumKind,
) -> EquilibriumSolution {
    EquilibriumSolution {
        sigma0,
        sigma1,
        v0: expected_payoff(u0, sigma0, sigma1),
        v1: expected_payoff(u1, sigma0, sigma1),
        kind,
    }
}

/// Solves the 2x2 bimatrix game by support enumeration.
///
/// Candidate order: degenerate games first (uniform strategy for the
/// indifferent player), then strict dominance, then the interior mixed
/// point from the indifference conditions, then the four pure profiles.
/// Every candidate is verified against the unilateral-deviation check
/// before it is returned.
pub fn solve_equilibrium(u0: &PayoffMatrix, u1: &PayoffMatrix) -> EquilibriumSolution {
    let a = &u0.u;
    let b = &u1.u;

    // Degenerate: identical rows for P0 or identical columns for P1.
    let deg0 = a[0][0] == a[1][0] && a[0][1] == a[1][1];
    let deg1 = b[0][0] == b[0][1] && b[1][0] == b[1][1];
    if deg0 || deg1 {
        let sigma0 = if deg0 {
            MixedStrategy::uniform()
        } else {
            let e_row = |j: usize| 0.5 * (a[j][0] + a[j][1]);
            best_response_strategy(e_row(0), e_row(1))
        };
        let sigma1 = if deg1 {
            MixedStrategy::uniform()
        } else {
            let e_col = |k: usize| 0.5 * (b[0][k] + b[1][k]);
            best_response_strategy(e_col(0), e_col(1))
        };
        return solution_at(u0, u1, sigma0, sigma1, EquilibriumKind::Degenerate);
    }

    // Strict dominance for either player; the opponent best-responds.
    for j in 0..2 {
        if a[j][0] > a[1 - j][0] && a[j][1] > a[1 - j][1] {
            let sigma0 = MixedStrategy::pure(ActionLabel::from_index(j));
            let k = if b[j][0] >= b[j][1] { 0 } else { 1 };
            let sigma1 = MixedStrategy::pure(ActionLabel::from_index(k));
            return solution_at(u0, u1, sigma0, sigma1, EquilibriumKind::PureDominant);
        }
    }
    for k in 0..2 {
        if b[0][k] > b[0][1 - k] && b[1][k] > b[1][1 - k] {
            let sigma1 = MixedStrategy::pure(ActionLabel::from_index(k));
            let j = if a[0][k] >= a[1][k] { 0 } else { 1 };
            let sigma0 = MixedStrategy::pure(ActionLabel::from_index(j));
            return solution_at(u0, u1, sigma0, sigma1, EquilibriumKind::PureDominant);
        }
    }

    // Interior mixed point: sigma1 makes P0 indifferent between rows,
    // sigma0 makes P1 indifferent between columns.
    let den_q = a[0][0] - a[0][1] - a[1][0] + a[1][1];
    let den_p = b[0][0] - b[1][0] - b[0][1] + b[1][1];
    if den_q != 0.0 && den_p != 0.0 {
        let q = (a[1][1] - a[0][1]) / den_q;
        let p = (b[1][1] - b[1][0]) / den_p;
        if (-NASH_EPS..=1.0 + NASH_EPS).contains(&p) && (-NASH_EPS..=1.0 + NASH_EPS).contains(&q) {
            let sigma0 = MixedStrategy::new(p.clamp(0.0, 1.0));
            let sigma1 = MixedStrategy::new(q.clamp(0.0, 1.0));
            if is_epsilon_nash(u0, u1, sigma0, sigma1, NASH_EPS) {
                return solution_at(u0, u1, sigma0, sigma1, EquilibriumKind::MixedInterior);
            }
        }
    }

    // Pure profiles by mutual (weak) best response, scanned in index order.
    let mut best: Option<(f64, EquilibriumSolution)> = None;
    for j in 0..2 {
        for k in 0..2 {
            let sigma0 = MixedStrategy::pure(ActionLabel::from_index(j));
            let sigma1 = MixedStrategy::pure(ActionLabel::from_index(k));
            if is_epsilon_nash(u0, u1, sigma0, sigma1, NASH_EPS) {
                return solution_at(u0, u1, sigma0, sigma1, EquilibriumKind::PureBestResponse);
            }
            let (g0, g1) = deviation_gains(u0, u1, sigma0, sigma1);
            let residual = g0.max(g1);
            if best.as_ref().is_none_or(|(r, _)| residual < *r) {
                best = Some((
                    residual,
                    solution_at(u0, u1, sigma0, sigma1, EquilibriumKind::PureBestResponse),
                ));
            }
        }
    }
    // A 2x2 game always has an equilibrium among the candidates above;
    // reaching this fallback means payoffs sit exactly on a knife edge.
    best.expect("pure profile scan is nonempty").1
}

fn best_response_strategy(e_first: f64, e_second: f64) -> MixedStrategy {
    if (e_first - e_second).abs() <= 1e-12 {
        MixedStrategy::uniform()
    } else if e_first > e_second {
        MixedStrategy::pure(ActionLabel::NYield)
    } else {
        MixedStrategy::pure(ActionLabel::Yield)
    }
}

/// The equilibrium objective sigma0*U0*sigma1' - v0 + sigma0*U1*sigma1' - v1;
/// zero (its maximum) at an equilibrium evaluated with its own values.
/// Retained as an independent verification oracle for the solver.
pub fn equilibrium_objective(
    sigma0: MixedStrategy,
    sigma1: MixedStrategy,
    u0: &PayoffMatrix,
    u1: &PayoffMatrix,
    v0: f64,
    v1: f64,
) -> f64 {
    expected_payoff(u0, sigma0, sigma1) - v0 + expected_payoff(u1, sigma0, sigma1) - v1
}

/// Picks the action with the larger probability; an exact tie goes to
/// Yield, the conservative action.
pub fn decide(sigma: MixedStrategy) -> ActionLabel {
    if (sigma.p_nyield - 0.5).abs() <= 1e-12 {
        ActionLabel::Yield
    } else if sigma.p_nyield > 0.5 {
        ActionLabel::NYield
    } else {
        ActionLabel::Yield
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn example_ctx() -> KinematicContext {
        KinematicContext {
            gap_init: 20.0,
            gap_ahead: 80.0,
            v0: 30.0,
            v1: 25.0,
            a0: 0.0,
            a1: 0.0,
            jerk0_mag: 1.0,
            jerk1_mag: 1.0,
            horizon: 1.0,
        }
    }

    fn example_norms() -> NormalizationConstants {
        NormalizationConstants::new(5.0, 33.33, 100.0)
    }

    #[test]
    fn feature_matrices_worked_example() {
        let (f0, f1) = feature_matrices(&example_ctx(), &example_norms(), AccelBounds::default());
        // (q0 = NYield, q1 = Yield): gap01 = 20 + 0.5*(24-31) + 0.5*(-1-1) = 15.5
        let c0 = f0.cell(ActionLabel::NYield, ActionLabel::Yield);
        assert_relative_eq!(c0[0], 15.5 / 150.0, max_relative = 1e-12);
        assert_relative_eq!(c0[1], 31.0 / 33.33, max_relative = 1e-12);
        let c1 = f1.cell(ActionLabel::NYield, ActionLabel::Yield);
        assert_relative_eq!(c1[0], 0.64, max_relative = 1e-12);
        assert_relative_eq!(c1[1], 0.155, max_relative = 1e-12);
    }

    #[test]
    fn feature_matrices_full_grid() {
        // All four cells, brute-forced by hand from the prediction formulas.
        let (f0, f1) = feature_matrices(&example_ctx(), &example_norms(), AccelBounds::default());
        let expect_f0 = [
            [[17.5 / 150.0, 31.0 / 33.33], [15.5 / 150.0, 31.0 / 33.33]],
            [[19.5 / 150.0, 29.0 / 33.33], [17.5 / 150.0, 29.0 / 33.33]],
        ];
        let expect_f1 = [
            [[0.64, 0.175], [0.64, 0.155]],
            [[0.64, 0.195], [0.64, 0.175]],
        ];
        for j in 0..2 {
            for k in 0..2 {
                for c in 0..2 {
                    assert_relative_eq!(f0.cells[j][k][c], expect_f0[j][k][c], epsilon = 1e-12);
                    assert_relative_eq!(f1.cells[j][k][c], expect_f1[j][k][c], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn feature_matrices_zero_jerk_collapses_cells() {
        let ctx = KinematicContext {
            jerk0_mag: 0.0,
            jerk1_mag: 0.0,
            a0: 0.0,
            a1: 0.0,
            v1: 30.0,
            ..example_ctx()
        };
        let (f0, f1) = feature_matrices(&ctx, &example_norms(), AccelBounds::default());
        for j in 0..2 {
            for k in 0..2 {
                assert_eq!(f0.cells[j][k], f0.cells[0][0]);
                assert_eq!(f1.cells[j][k], f1.cells[0][0]);
            }
        }
    }

    #[test]
    fn build_payoffs_is_dot_product() {
        let (f0, f1) = feature_matrices(&example_ctx(), &example_norms(), AccelBounds::default());
        let u = build_payoffs(&f0, WeightVector::new(0.5, 0.5));
        let cell = f0.cell(ActionLabel::NYield, ActionLabel::Yield);
        assert_relative_eq!(
            u.u[0][1],
            0.5 * cell[0] + 0.5 * cell[1],
            max_relative = 1e-15
        );
        // basis weights pick out single feature components
        let u_first = build_payoffs(&f1, WeightVector::new(1.0, 0.0));
        let u_second = build_payoffs(&f1, WeightVector::new(0.0, 1.0));
        for j in 0..2 {
            for k in 0..2 {
                assert_relative_eq!(u_first.u[j][k], f1.cells[j][k][0]);
                assert_relative_eq!(u_second.u[j][k], f1.cells[j][k][1]);
            }
        }
        assert_relative_eq!(u_second.u[0][1], 0.155);
    }

    #[test]
    fn battle_of_sexes_returns_interior_mixed_point() {
        let u0 = PayoffMatrix::from_rows(Player::P0, [[2.0, 0.0], [0.0, 1.0]]);
        let u1 = PayoffMatrix::from_rows(Player::P1, [[1.0, 0.0], [0.0, 2.0]]);
        let sol = solve_equilibrium(&u0, &u1);
        assert_eq!(sol.kind, EquilibriumKind::MixedInterior);
        assert_relative_eq!(sol.sigma0.p_nyield, 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(sol.sigma1.p_nyield, 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(sol.v0, 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(sol.v1, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn strict_dominance_resolves_to_pure_profile() {
        let u0 = PayoffMatrix::from_rows(Player::P0, [[3.0, 3.0], [1.0, 1.0]]);
        let u1 = PayoffMatrix::from_rows(Player::P1, [[2.0, 0.0], [2.0, 5.0]]);
        let sol = solve_equilibrium(&u0, &u1);
        assert_eq!(sol.kind, EquilibriumKind::PureDominant);
        assert_relative_eq!(sol.sigma0.p_nyield, 1.0);
        assert_relative_eq!(sol.sigma1.p_nyield, 1.0);
    }

    #[test]
    fn constant_game_is_degenerate_uniform() {
        for c in [-2.0, 0.0, 0.7] {
            let u0 = PayoffMatrix::from_rows(Player::P0, [[c, c], [c, c]]);
            let u1 = PayoffMatrix::from_rows(Player::P1, [[c, c], [c, c]]);
            let sol = solve_equilibrium(&u0, &u1);
            assert_eq!(sol.kind, EquilibriumKind::Degenerate);
            assert_relative_eq!(sol.sigma0.p_nyield, 0.5);
            assert_relative_eq!(sol.sigma1.p_nyield, 0.5);
            assert_relative_eq!(sol.v0, c);
            assert_relative_eq!(sol.v1, c);
        }
    }

    #[test]
    fn objective_examples() {
        let u0 = PayoffMatrix::from_rows(Player::P0, [[2.0, 0.0], [0.0, 1.0]]);
        let u1 = PayoffMatrix::from_rows(Player::P1, [[1.0, 0.0], [0.0, 2.0]]);
        let z = equilibrium_objective(
            MixedStrategy::new(1.0),
            MixedStrategy::new(1.0),
            &u0,
            &u1,
            2.0 / 3.0,
            2.0 / 3.0,
        );
        assert_relative_eq!(z, 2.0 - 2.0 / 3.0 + 1.0 - 2.0 / 3.0, epsilon = 1e-12);

        let flat0 = PayoffMatrix::from_rows(Player::P0, [[1.0, 1.0], [1.0, 1.0]]);
        let flat1 = PayoffMatrix::from_rows(Player::P1, [[1.0, 1.0], [1.0, 1.0]]);
        let z = equilibrium_objective(
            MixedStrategy::uniform(),
            MixedStrategy::uniform(),
            &flat0,
            &flat1,
            1.0,
            1.0,
        );
        assert_relative_eq!(z, 0.0);
    }

    #[test]
    fn solver_solutions_zero_the_objective() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let u0 = PayoffMatrix::from_rows(Player::P0, [[next(), next()], [next(), next()]]);
            let u1 = PayoffMatrix::from_rows(Player::P1, [[next(), next()], [next(), next()]]);
            let sol = solve_equilibrium(&u0, &u1);
            let (g0, g1) = deviation_gains(&u0, &u1, sol.sigma0, sol.sigma1);
            assert!(g0 <= NASH_EPS && g1 <= NASH_EPS, "not a Nash equilibrium");
            let z = equilibrium_objective(sol.sigma0, sol.sigma1, &u0, &u1, sol.v0, sol.v1);
            assert!(z.abs() <= NASH_EPS);
        }
    }

    #[test]
    fn decide_follows_argmax_and_breaks_ties_to_yield() {
        assert_eq!(decide(MixedStrategy::new(0.7)), ActionLabel::NYield);
        assert_eq!(decide(MixedStrategy::new(0.2)), ActionLabel::Yield);
        assert_eq!(decide(MixedStrategy::new(0.5)), ActionLabel::Yield);
    }

    #[test]
    fn decide_is_invariant_under_monotone_transforms() {
        // argmax over (p, 1-p) only depends on the ordering of the pair,
        // which strictly increasing maps preserve
        let transforms: [fn(f64) -> f64; 3] =
            [|x| 3.0 * x + 1.0, |x| x.exp(), |x| x * x * x];
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            let base = decide(MixedStrategy::new(p));
            for f in transforms {
                let (tp, tq) = (f(p), f(1.0 - p));
                let transformed = if (tp - tq).abs() <= 1e-12 {
                    ActionLabel::Yield
                } else if tp > tq {
                    ActionLabel::NYield
                } else {
                    ActionLabel::Yield
                };
                assert_eq!(base, transformed, "p = {p}");
            }
        }
    }
}
