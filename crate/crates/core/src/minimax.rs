//! Numerical measurement of the max-min / min-max equality chains that
//! link a player's t-optimization to its s-optimization.
//!
//! A [`Context`] singles out two players `i` and `j`; every other player
//! holds its committed value (t or s per the assignment). Player `i` always
//! moves in t. Player `j` moves either in t or, for the mixed links of the
//! chain, in s, with the full profile resolved through
//! [`crate::transform::resolve`].
//!
//! The module measures; it never asserts. Callers judge `max_gap`.

use std::fmt;

use crate::error::{GameError, Result};
use crate::game::{check_player, Interval, TwoVariableGame, VarTag};
use crate::optimize::{try_max_min, try_min_max};
use crate::scalar::Scalar;
use crate::transform::{inner_tol, resolve, MixedPoint};

/// Two distinguished players plus the committed values of everyone else.
#[derive(Debug, Clone, PartialEq)]
pub struct Context<T> {
    point: MixedPoint<T>,
    i: usize,
    j: usize,
}

impl<T: Scalar> Context<T> {
    /// `point` supplies the assignment and committed values of the other
    /// `n - 2` players; its entries for `i` and `j` are ignored.
    pub fn new(point: MixedPoint<T>, i: usize, j: usize) -> Result<Self> {
        let n = point.values().len();
        if i >= n || j >= n {
            return Err(GameError::invalid(format!(
                "context players ({i}, {j}) out of range for {n} players"
            )));
        }
        if i == j {
            return Err(GameError::invalid("context needs two distinct players i and j"));
        }
        Ok(Self { point, i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn point(&self) -> &MixedPoint<T> {
        &self.point
    }

    /// Same context with two of the fixed players exchanged.
    pub fn swap_fixed(&self, k: usize, l: usize) -> Result<Self> {
        if [k, l].iter().any(|p| *p == self.i || *p == self.j) {
            return Err(GameError::invalid("only fixed players can be swapped"));
        }
        let (tk, tl) = (self.point.assignment().tag(k), self.point.assignment().tag(l));
        let (vk, vl) = (self.point.value(k), self.point.value(l));
        let point = self.point.with(k, tl, vl).with(l, tk, vk);
        Self::new(point, self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chain {
    /// Player j's payoff: max-min over (t_j, t_i) through min-max, with
    /// s_j substituted in the middle two links.
    PayoffOfJ,
    /// Player i's payoff: min-max over (t_j, t_i) through max-min, with
    /// s_j substituted in the middle two links.
    PayoffOfI,
}

impl Chain {
    pub fn labels(self) -> [&'static str; 4] {
        match self {
            Chain::PayoffOfJ => ["max_t_min_t", "max_s_min_t", "min_t_max_s", "min_t_max_t"],
            Chain::PayoffOfI => ["min_t_max_t", "min_s_max_t", "max_t_min_s", "max_t_min_t"],
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chain::PayoffOfJ => "lemma2",
            Chain::PayoffOfI => "lemma3",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport<T> {
    pub chain: Chain,
    pub values: [T; 4],
    /// Largest pairwise absolute difference among `values`.
    pub max_gap: T,
    /// Range searched for player j's s-variable.
    pub s_domain: Interval<T>,
}

impl<T: Scalar> ChainReport<T> {
    fn new(chain: Chain, values: [T; 4], s_domain: Interval<T>) -> Self {
        let mut max_gap = T::zero();
        for a in 0..4 {
            for b in (a + 1)..4 {
                max_gap = max_gap.max((values[a] - values[b]).abs());
            }
        }
        Self { chain, values, max_gap, s_domain }
    }

    pub fn labelled(&self) -> impl Iterator<Item = (&'static str, T)> + '_ {
        self.chain.labels().into_iter().zip(self.values)
    }

    pub fn max_abs_value(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

struct Evaluator<'a, T, G: ?Sized> {
    game: &'a G,
    ctx: &'a Context<T>,
    tol: T,
}

impl<T: Scalar, G: TwoVariableGame<T> + ?Sized> Evaluator<'_, T, G> {
    /// Payoff of `who` with `t_i` and player j committed to `(tag, v_j)`.
    fn payoff(&self, who: usize, t_i: T, tag: VarTag, v_j: T) -> Result<T> {
        let point = self
            .ctx
            .point
            .with(self.ctx.i, VarTag::UsesT, t_i)
            .with(self.ctx.j, tag, v_j);
        let solved = resolve(self.game, &point, inner_tol(self.tol), 500).map_err(|e| {
            e.within(format!(
                "chain evaluation at (t_i = {t_i}, {tag}_j = {v_j})"
            ))
        })?;
        Ok(self.game.payoff(who, &solved.profile))
    }

    /// Image of the t-space corners under `f_j`, everyone else held.
    fn s_domain(&self) -> Result<Interval<T>> {
        let space = self.game.t_space();
        let mut corners = Vec::with_capacity(4);
        for t_i in [space.lo(), space.hi()] {
            for t_j in [space.lo(), space.hi()] {
                let point = self
                    .ctx
                    .point
                    .with(self.ctx.i, VarTag::UsesT, t_i)
                    .with(self.ctx.j, VarTag::UsesT, t_j);
                let solved = resolve(self.game, &point, inner_tol(self.tol), 500)?;
                corners.push(self.game.forward(&solved.profile)[self.ctx.j]);
            }
        }
        Interval::hull(corners)
    }
}

fn validate<T: Scalar, G: TwoVariableGame<T> + ?Sized>(game: &G, ctx: &Context<T>, tol: T) -> Result<()> {
    if ctx.point.values().len() != game.players() {
        return Err(GameError::invalid(format!(
            "context covers {} players, game has {}",
            ctx.point.values().len(),
            game.players()
        )));
    }
    check_player(game, ctx.i)?;
    check_player(game, ctx.j)?;
    if !(tol > T::zero()) {
        return Err(GameError::invalid("chain tolerance must be positive"));
    }
    Ok(())
}

/// Player j's chain:
/// `max_{t_j} min_{t_i} u_j = max_{s_j} min_{t_i} u_j = min_{t_i} max_{s_j} u_j = min_{t_i} max_{t_j} u_j`.
pub fn lemma2_chain<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    ctx: &Context<T>,
    tol: T,
) -> Result<ChainReport<T>> {
    validate(game, ctx, tol)?;
    let ev = Evaluator { game, ctx, tol };
    let who = ctx.j;
    let t = game.t_space();
    let s = ev.s_domain()?;
    let in_t = |t_j: T, t_i: T| ev.payoff(who, t_i, VarTag::UsesT, t_j);
    let in_s = |s_j: T, t_i: T| ev.payoff(who, t_i, VarTag::UsesS, s_j);
    let values = [
        try_max_min(in_t, t, t, tol)?.value,
        try_max_min(in_s, s, t, tol)?.value,
        try_min_max(in_s, s, t, tol)?.value,
        try_min_max(in_t, t, t, tol)?.value,
    ];
    Ok(ChainReport::new(Chain::PayoffOfJ, values, s))
}

/// Player i's chain:
/// `min_{t_j} max_{t_i} u_i = min_{s_j} max_{t_i} u_i = max_{t_i} min_{s_j} u_i = max_{t_i} min_{t_j} u_i`.
pub fn lemma3_chain<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    ctx: &Context<T>,
    tol: T,
) -> Result<ChainReport<T>> {
    validate(game, ctx, tol)?;
    let ev = Evaluator { game, ctx, tol };
    let who = ctx.i;
    let t = game.t_space();
    let s = ev.s_domain()?;
    let in_t = |t_i: T, t_j: T| ev.payoff(who, t_i, VarTag::UsesT, t_j);
    let in_s = |t_i: T, s_j: T| ev.payoff(who, t_i, VarTag::UsesS, s_j);
    let values = [
        try_min_max(in_t, t, t, tol)?.value,
        try_min_max(in_s, t, s, tol)?.value,
        try_max_min(in_s, t, s, tol)?.value,
        try_max_min(in_t, t, t, tol)?.value,
    ];
    Ok(ChainReport::new(Chain::PayoffOfI, values, s))
}

/// `|max_x min_y f - min_y max_x f|`. Positive values flag objectives that
/// are not quasi-concave/quasi-convex; they are reported, not rejected.
pub fn sion_gap<T: Scalar>(
    objective: impl Fn(T, T) -> T,
    x_domain: Interval<T>,
    y_domain: Interval<T>,
    tol: T,
) -> Result<T> {
    let f = |x: T, y: T| Ok(objective(x, y));
    let lower = try_max_min(f, x_domain, y_domain, tol)?;
    let upper = try_min_max(f, x_domain, y_domain, tol)?;
    Ok((lower.value - upper.value).abs())
}
