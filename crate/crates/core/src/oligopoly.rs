//! Three-firm oligopoly with differentiated goods and relative-profit
//! objectives: the reference two-variable zero-sum game.
//!
//! Outputs are the t-variables, prices the s-variables. Firms are indexed
//! `0 = A`, `1 = B`, `2 = C`. Demand is linear:
//!
//! ```text
//! p_i = a - x_i - b * sum_{j != i} x_j,    0 < b < 1
//! ```
//!
//! and each firm maximizes its profit minus the mean of its rivals' profits,
//! which makes the game zero-sum.

use std::fmt;

use crate::error::{GameError, Result};
use crate::game::{Interval, TwoVariableGame, VariableAssignment};
use crate::scalar::Scalar;
use crate::transform::{resolve, MixedPoint};

pub const FIRMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OligopolyParams<T> {
    /// Demand intercept.
    pub a: T,
    /// Substitution parameter, strictly between 0 and 1.
    pub b: T,
    /// Constant marginal costs of firms A, B, C.
    pub costs: [T; FIRMS],
}

impl<T: Scalar> OligopolyParams<T> {
    pub fn new(a: T, b: T, costs: [T; FIRMS]) -> Result<Self> {
        let params = Self { a, b, costs };
        params.validate()?;
        Ok(params)
    }

    pub fn symmetric(a: T, b: T, cost: T) -> Result<Self> {
        Self::new(a, b, [cost; FIRMS])
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || !self.b.is_finite() || self.costs.iter().any(|c| !c.is_finite()) {
            return Err(GameError::invalid("oligopoly parameters must be finite"));
        }
        if !(self.b > T::zero() && self.b < T::one()) {
            return Err(GameError::invalid(format!("b must satisfy 0 < b < 1, got {}", self.b)));
        }
        if let Some(c) = self.costs.iter().find(|c| **c < T::zero()) {
            return Err(GameError::invalid(format!("costs must be non-negative, got {c}")));
        }
        let max_cost = self.costs.iter().fold(T::neg_infinity(), |m, c| m.max(*c));
        if !(self.a > max_cost) {
            return Err(GameError::invalid(format!(
                "a must exceed every marginal cost, got a = {} and max cost {max_cost}",
                self.a
            )));
        }
        Ok(())
    }

    pub fn has_equal_costs(&self) -> bool {
        self.costs[0] == self.costs[1] && self.costs[1] == self.costs[2]
    }
}

/// Outputs and the prices they induce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState<T> {
    pub x: [T; FIRMS],
    pub p: [T; FIRMS],
}

impl<T: Scalar> MarketState<T> {
    pub fn from_outputs(params: &OligopolyParams<T>, x: [T; FIRMS]) -> Self {
        Self { x, p: inverse_demand(params, &x) }
    }

    pub fn from_prices(params: &OligopolyParams<T>, p: [T; FIRMS]) -> Self {
        Self { x: direct_demand(params, &p), p }
    }
}

fn as_array<T: Scalar>(v: &[T]) -> [T; FIRMS] {
    [v[0], v[1], v[2]]
}

/// `p_i = a - x_i - b * (sum of the other outputs)`. Negative prices are
/// returned as computed.
pub fn inverse_demand<T: Scalar>(params: &OligopolyParams<T>, x: &[T; FIRMS]) -> [T; FIRMS] {
    let total = x[0] + x[1] + x[2];
    x.map(|xi| params.a - xi - params.b * (total - xi))
}

/// Exact inverse of [`inverse_demand`]. With `M = (1 - b) I + b J`,
/// `M^{-1} = (I - b / (1 + 2b) J) / (1 - b)` and `x = M^{-1} (a - p)`.
pub fn direct_demand<T: Scalar>(params: &OligopolyParams<T>, p: &[T; FIRMS]) -> [T; FIRMS] {
    let (a, b) = (params.a, params.b);
    let one = T::one();
    let slack = p.map(|pi| a - pi);
    let shared = b / (one + T::lit(2.0) * b) * (slack[0] + slack[1] + slack[2]);
    slack.map(|si| (si - shared) / (one - b))
}

/// `phi_i = pi_i - (pi_j + pi_k) / 2` with `pi_i = (p_i - c_i) x_i`.
pub fn relative_profits<T: Scalar>(params: &OligopolyParams<T>, state: &MarketState<T>) -> [T; FIRMS] {
    let half = T::lit(0.5);
    let pi: Vec<T> = (0..FIRMS)
        .map(|i| (state.p[i] - params.costs[i]) * state.x[i])
        .collect();
    [
        pi[0] - half * (pi[1] + pi[2]),
        pi[1] - half * (pi[0] + pi[2]),
        pi[2] - half * (pi[0] + pi[1]),
    ]
}

/// Which firms set outputs and which set prices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MarketCase {
    /// Case 1: every firm chooses its output.
    AllOutputs = 1,
    /// Case 2: A and B choose outputs, C chooses its price.
    OutputsAbPriceC = 2,
    /// Case 3: A chooses its output, B and C choose prices.
    OutputAPricesBc = 3,
    /// Case 4: every firm chooses its price.
    AllPrices = 4,
}

impl MarketCase {
    pub const ALL: [MarketCase; 4] = [
        MarketCase::AllOutputs,
        MarketCase::OutputsAbPriceC,
        MarketCase::OutputAPricesBc,
        MarketCase::AllPrices,
    ];

    pub fn from_index(case: u8) -> Result<Self> {
        Self::ALL
            .get(usize::from(case).wrapping_sub(1))
            .copied()
            .ok_or_else(|| GameError::invalid(format!("market case must be 1..=4, got {case}")))
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn assignment(self) -> VariableAssignment {
        VariableAssignment::first_m_use_t(FIRMS, 4 - self.index() as usize)
    }
}

impl fmt::Display for MarketCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {} ({})", self.index(), self.assignment())
    }
}

/// Closed-form equilibrium price of firm B in the given case.
pub fn closed_form_pb<T: Scalar>(params: &OligopolyParams<T>, case: MarketCase) -> T {
    let (a, b) = (params.a, params.b);
    let [ca, cb, cc] = params.costs;
    let k = T::lit;
    let (b2, b3) = (b * b, b * b * b);
    match case {
        MarketCase::AllOutputs => {
            (k(3.0) * b * cc - k(2.0) * b2 * cb + b * cb + k(4.0) * cb + k(3.0) * b * ca + a * b2
                - k(5.0) * a * b
                + k(4.0) * a)
                / ((k(4.0) - b) * (b + k(2.0)))
        }
        MarketCase::OutputsAbPriceC => {
            let poly = k(9.0) * b2 * cc + k(12.0) * b * cc - k(3.0) * b3 * cb + b2 * cb
                + k(16.0) * b * cb
                + k(16.0) * cb
                - k(3.0) * b3 * ca
                + k(3.0) * b2 * ca
                + k(12.0) * b * ca
                + k(3.0) * a * b3
                - k(11.0) * a * b2
                - k(8.0) * a * b
                + k(16.0) * a;
            poly / ((k(4.0) - b) * (b + k(2.0)) * (k(3.0) * b + k(4.0)))
        }
        MarketCase::OutputAPricesBc => {
            let poly = k(6.0) * b3 * cc + k(21.0) * b2 * cc + k(12.0) * b * cc + b3 * cb
                + k(17.0) * b2 * cb
                + k(32.0) * b * cb
                + k(16.0) * cb
                + k(3.0) * b3 * ca
                + k(15.0) * b2 * ca
                + k(12.0) * b * ca
                - k(5.0) * a * b3
                - k(19.0) * a * b2
                + k(8.0) * a * b
                + k(16.0) * a;
            poly / ((b + k(2.0)) * (b + k(4.0)) * (k(5.0) * b + k(4.0)))
        }
        MarketCase::AllPrices => {
            (k(3.0) * b2 * cc + k(3.0) * b * cc + k(4.0) * b2 * cb + k(7.0) * b * cb + k(4.0) * cb
                + k(3.0) * b2 * ca
                + k(3.0) * b * ca
                - k(5.0) * a * b2
                + a * b
                + k(4.0) * a)
                / ((b + k(2.0)) * (k(5.0) * b + k(4.0)))
        }
    }
}

/// Common equilibrium price when all costs equal `params.costs[0]`.
pub fn symmetric_price<T: Scalar>(params: &OligopolyParams<T>) -> T {
    let (a, b, c) = (params.a, params.b, params.costs[0]);
    (T::lit(2.0) * b * c + c - a * b + a) / (b + T::lit(2.0))
}

/// Symmetric equilibrium output `(a - c) / (2 + b)` when all costs are equal.
pub fn symmetric_output<T: Scalar>(params: &OligopolyParams<T>) -> T {
    (params.a - params.costs[0]) / (T::lit(2.0) + params.b)
}

/// The oligopoly as a [`TwoVariableGame`]: t = outputs on `[0, a]`,
/// s = prices on the induced range `[-2ab, a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OligopolyGame<T> {
    params: OligopolyParams<T>,
    t_space: Interval<T>,
    s_space: Interval<T>,
}

impl<T: Scalar> OligopolyGame<T> {
    pub fn new(params: OligopolyParams<T>) -> Result<Self> {
        params.validate()?;
        let t_space = Interval::new(T::zero(), params.a)?;
        let s_space = Interval::new(-T::lit(2.0) * params.a * params.b, params.a)?;
        Ok(Self { params, t_space, s_space })
    }

    /// Same game with a caller-chosen output interval.
    pub fn with_t_space(mut self, t_space: Interval<T>) -> Result<Self> {
        let corners = [
            inverse_demand(&self.params, &[t_space.lo(); FIRMS])[0],
            inverse_demand(&self.params, &[t_space.hi(); FIRMS])[0],
            inverse_demand(&self.params, &[t_space.lo(), t_space.hi(), t_space.hi()])[0],
            inverse_demand(&self.params, &[t_space.hi(), t_space.lo(), t_space.lo()])[0],
        ];
        self.s_space = Interval::hull(corners)?;
        self.t_space = t_space;
        Ok(self)
    }

    pub fn params(&self) -> &OligopolyParams<T> {
        &self.params
    }

    pub fn state(&self, profile: &[T]) -> MarketState<T> {
        MarketState::from_outputs(&self.params, as_array(profile))
    }
}

/// Builds the reference game.
pub fn build_game<T: Scalar>(params: OligopolyParams<T>) -> Result<OligopolyGame<T>> {
    OligopolyGame::new(params)
}

impl<T: Scalar> TwoVariableGame<T> for OligopolyGame<T> {
    fn players(&self) -> usize {
        FIRMS
    }

    fn t_space(&self) -> Interval<T> {
        self.t_space
    }

    fn s_space(&self) -> Interval<T> {
        self.s_space
    }

    fn payoff(&self, player: usize, profile: &[T]) -> T {
        self.payoffs(profile)[player]
    }

    fn payoffs(&self, profile: &[T]) -> Vec<T> {
        relative_profits(&self.params, &self.state(profile)).to_vec()
    }

    fn forward(&self, profile: &[T]) -> Vec<T> {
        inverse_demand(&self.params, &as_array(profile)).to_vec()
    }

    fn inverse(&self, s: &[T]) -> Vec<T> {
        direct_demand(&self.params, &as_array(s)).to_vec()
    }
}

fn resolve_state<T: Scalar>(params: &OligopolyParams<T>, case: MarketCase, values: [T; FIRMS]) -> Result<MarketState<T>> {
    let game = OligopolyGame::new(*params)?;
    let point = MixedPoint::new(case.assignment(), values.to_vec())?;
    let solved = resolve(&game, &point, T::lit(1e-12).max(T::epsilon() * T::lit(64.0) * params.a), 100)?;
    Ok(game.state(&solved.profile))
}

/// Full market state when A and B set outputs and C sets its price.
pub fn case2_transform<T: Scalar>(params: &OligopolyParams<T>, x_a: T, x_b: T, p_c: T) -> Result<MarketState<T>> {
    resolve_state(params, MarketCase::OutputsAbPriceC, [x_a, x_b, p_c])
}

/// Full market state when A sets its output and B, C set prices.
pub fn case3_transform<T: Scalar>(params: &OligopolyParams<T>, x_a: T, p_b: T, p_c: T) -> Result<MarketState<T>> {
    resolve_state(params, MarketCase::OutputAPricesBc, [x_a, p_b, p_c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn base() -> OligopolyParams<f64> {
        OligopolyParams::symmetric(10.0, 0.5, 2.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(OligopolyParams::symmetric(10.0, 0.0, 2.0).is_err());
        assert!(OligopolyParams::symmetric(10.0, 1.0, 2.0).is_err());
        assert!(OligopolyParams::new(10.0, 0.5, [1.0, -1.0, 2.0]).is_err());
        assert!(OligopolyParams::new(3.0, 0.5, [1.0, 2.0, 3.0]).is_err());
        assert!(OligopolyParams::symmetric(f64::NAN, 0.5, 2.0).is_err());
    }

    #[test]
    fn inverse_demand_values() {
        let p = base();
        assert_eq!(inverse_demand(&p, &[3.2; 3]).map(|v| (v * 1e12).round() / 1e12), [3.6; 3]);
        assert_eq!(inverse_demand(&p, &[0.0; 3]), [10.0; 3]);
        assert_eq!(inverse_demand(&p, &[3.0, 4.0, 5.0]), [2.5, 2.0, 1.5]);
    }

    #[test]
    fn direct_demand_values() {
        let p = base();
        for (got, want) in direct_demand(&p, &[3.6; 3]).iter().zip([3.2; 3]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(direct_demand(&p, &[10.0; 3]), [0.0; 3]);
        // symmetric prices: x = (a - p) / (1 + 2b)
        let x = direct_demand(&p, &[5.0; 3]);
        assert_abs_diff_eq!(x[1], 5.0 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn direct_demand_matches_explicit_formula() {
        // x_A = ((1-b)a - (1+b)p_A + b(p_B + p_C)) / ((1-b)(1+2b)), and cyclically
        let params = OligopolyParams::symmetric(10.0, 0.3, 1.0).unwrap();
        let (a, b) = (params.a, params.b);
        let p = [2.0, 3.5, 4.25];
        let x = direct_demand(&params, &p);
        for i in 0..3 {
            let others = p[(i + 1) % 3] + p[(i + 2) % 3];
            let explicit = ((1.0 - b) * a - (1.0 + b) * p[i] + b * others) / ((1.0 - b) * (1.0 + 2.0 * b));
            assert_abs_diff_eq!(x[i], explicit, epsilon = 1e-12);
        }
        // summing its own price with p_C instead of the rival pair does not invert
        let wrong_pair: f64 = ((1.0 - b) * a - (1.0 + b) * p[0] + b * (p[0] + p[2])) / ((1.0 - b) * (1.0 + 2.0 * b));
        assert!((wrong_pair - x[0]).abs() > 0.1);
    }

    #[test]
    fn demand_roundtrip_random() {
        let params = OligopolyParams::new(7.0, 0.8, [1.0, 2.0, 3.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = [rng.gen_range(0.0..7.0), rng.gen_range(0.0..7.0), rng.gen_range(0.0..7.0)];
            let back = direct_demand(&params, &inverse_demand(&params, &x));
            for i in 0..3 {
                assert_abs_diff_eq!(back[i], x[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn relative_profit_arithmetic() {
        let params = OligopolyParams::new(10.0, 0.5, [1.0, 2.0, 3.0]).unwrap();
        let state = MarketState::from_outputs(&params, [3.0, 4.0, 5.0]);
        let phi = relative_profits(&params, &state);
        assert_abs_diff_eq!(phi[0], 8.25, epsilon = 1e-12);
        assert_abs_diff_eq!(phi[1], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(phi[2], -9.75, epsilon = 1e-12);
        assert_abs_diff_eq!(phi.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_state_has_zero_relative_profit() {
        let params = base();
        let phi = relative_profits(&params, &MarketState::from_outputs(&params, [3.2; 3]));
        assert!(phi.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn case2_matches_explicit_formula() {
        let params = base();
        let s = case2_transform(&params, 3.0, 3.0, 4.0).unwrap();
        assert_abs_diff_eq!(s.x[2], 3.0, epsilon = 1e-12);

        let (a, b) = (params.a, params.b);
        let (xa, xb, pc) = (1.7, 4.1, 2.9);
        let s = case2_transform(&params, xa, xb, pc).unwrap();
        let pa = (1.0 - b) * a + b * b * xb - b * xb + b * b * xa - xa + b * pc;
        let pb = (1.0 - b) * a + b * b * xb - xb + b * b * xa - b * xa + b * pc;
        let xc = a - b * xb - b * xa - pc;
        assert_abs_diff_eq!(s.p[0], pa, epsilon = 1e-10);
        assert_abs_diff_eq!(s.p[1], pb, epsilon = 1e-10);
        assert_abs_diff_eq!(s.x[2], xc, epsilon = 1e-10);
        assert_abs_diff_eq!(s.p[2], pc, epsilon = 1e-10);
    }

    #[test]
    fn case2_at_equilibrium_inputs() {
        let s = case2_transform(&base(), 3.2, 3.2, 3.6).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(s.x[i], 3.2, epsilon = 1e-10);
            assert_abs_diff_eq!(s.p[i], 3.6, epsilon = 1e-10);
        }
    }

    #[test]
    fn case3_matches_explicit_formula() {
        let params = OligopolyParams::symmetric(10.0, 0.4, 2.0).unwrap();
        let (a, b) = (params.a, params.b);
        let (xa, pb, pc) = (2.3, 4.4, 3.1);
        let s = case3_transform(&params, xa, pb, pc).unwrap();
        let pa = ((1.0 - b) * a + 2.0 * b * b * xa - b * xa - xa + b * pc + b * pb) / (1.0 + b);
        let xb = ((1.0 - b) * a + b * b * xa - b * xa + b * pc - pb) / ((1.0 - b) * (1.0 + b));
        let xc = ((1.0 - b) * a + b * b * xa - b * xa - pc + b * pb) / ((1.0 - b) * (1.0 + b));
        assert_abs_diff_eq!(s.p[0], pa, epsilon = 1e-10);
        assert_abs_diff_eq!(s.x[1], xb, epsilon = 1e-10);
        assert_abs_diff_eq!(s.x[2], xc, epsilon = 1e-10);

        let s = case3_transform(&base(), 3.2, 3.6, 3.6).unwrap();
        assert_abs_diff_eq!(s.x[1], 3.2, epsilon = 1e-10);
        assert_abs_diff_eq!(s.x[2], 3.2, epsilon = 1e-10);
    }

    #[test]
    fn closed_forms_equal_costs() {
        let params = base();
        for case in MarketCase::ALL {
            assert_abs_diff_eq!(closed_form_pb(&params, case), 3.6, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(symmetric_price(&params), 3.6, epsilon = 1e-12);
        assert_abs_diff_eq!(symmetric_output(&params), 3.2, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_case1_unequal_costs() {
        let params = OligopolyParams::new(10.0, 0.5, [1.0, 2.0, 4.0]).unwrap();
        assert_abs_diff_eq!(closed_form_pb(&params, MarketCase::AllOutputs), 33.0 / 8.75, epsilon = 1e-12);
    }

    #[test]
    fn closed_forms_reduce_when_c_equals_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a: f64 = rng.gen_range(5.0..20.0);
            let b: f64 = rng.gen_range(0.05..0.95);
            let ca: f64 = rng.gen_range(0.0..4.0);
            let cb: f64 = rng.gen_range(0.0..4.0);
            let params = OligopolyParams::new(a, b, [ca, cb, ca]).unwrap();
            let (b2, b3) = (b * b, b * b * b);
            let reduced = [
                (b * cb - 2.0 * b2 * cb + 4.0 * cb + 6.0 * b * ca + a * b2 - 5.0 * a * b + 4.0 * a)
                    / ((4.0 - b) * (b + 2.0)),
                (b2 * cb - 3.0 * b3 * cb + 16.0 * b * cb + 16.0 * cb - 3.0 * b3 * ca + 12.0 * b2 * ca
                    + 24.0 * b * ca
                    + 3.0 * a * b3
                    - 11.0 * a * b2
                    - 8.0 * a * b
                    + 16.0 * a)
                    / ((4.0 - b) * (b + 2.0) * (3.0 * b + 4.0)),
                (b3 * cb + 17.0 * b2 * cb + 32.0 * b * cb + 16.0 * cb + 9.0 * b3 * ca + 36.0 * b2 * ca
                    + 24.0 * b * ca
                    - 5.0 * a * b3
                    - 19.0 * a * b2
                    + 8.0 * a * b
                    + 16.0 * a)
                    / ((b + 2.0) * (b + 4.0) * (5.0 * b + 4.0)),
                (4.0 * b2 * cb + 7.0 * b * cb + 4.0 * cb + 6.0 * b2 * ca + 6.0 * b * ca - 5.0 * a * b2
                    + a * b
                    + 4.0 * a)
                    / ((b + 2.0) * (5.0 * b + 4.0)),
            ];
            for (case, want) in MarketCase::ALL.into_iter().zip(reduced) {
                assert_abs_diff_eq!(closed_form_pb(&params, case), want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn case_indexing() {
        assert_eq!(MarketCase::from_index(3).unwrap(), MarketCase::OutputAPricesBc);
        assert!(MarketCase::from_index(0).is_err());
        assert!(MarketCase::from_index(5).is_err());
        let codes: Vec<String> = MarketCase::ALL.iter().map(|c| c.assignment().to_string()).collect();
        assert_eq!(codes, ["TTT", "TTS", "TSS", "SSS"]);
    }

    #[test]
    fn built_game_spaces() {
        let g = build_game(base()).unwrap();
        assert_eq!(g.t_space(), Interval::new(0.0, 10.0).unwrap());
        assert_eq!(g.s_space(), Interval::new(-10.0, 10.0).unwrap());
        assert_eq!(g.players(), 3);
    }
}
