//! Symmetric equilibrium search and Nash verification under every
//! assignment of strategic variables.
//!
//! The symmetric equilibrium `t*` is the fixed point of
//! `t -> argmax_{t_i} u_i(t_i, t, ..., t)`, reached by damped iteration.
//! Each regime is then checked by committing `UsesT` players to `t*` and
//! `UsesS` players to `s* = f_i(t*, ..., t*)`, resolving the profile, and
//! measuring every player's best unilateral deviation in its own variable.

use rayon::prelude::*;

use crate::error::{GameError, Result};
use crate::game::{check_player, Interval, Profile, TwoVariableGame, VarTag, VariableAssignment};
use crate::optimize::{try_maximize, try_minimize, OptResult};
use crate::scalar::{max_abs, Scalar};
use crate::transform::{inner_tol, resolve, MixedPoint};

/// Starting points used to probe for additional symmetric fixed points.
pub const RESTART_SEEDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOptions<T> {
    /// Convergence threshold on the best-response step and on verdicts.
    pub tol: T,
    pub max_iter: usize,
    /// Weight of the best response in the damped update.
    pub damping: T,
    /// Restart the symmetric search from [`RESTART_SEEDS`] seeds.
    pub restarts: bool,
}

impl<T: Scalar> Default for EquilibriumOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-6),
            max_iter: 500,
            damping: T::lit(0.5),
            restarts: true,
        }
    }
}

impl<T: Scalar> EquilibriumOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) {
            return Err(GameError::invalid("equilibrium tolerance must be positive"));
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return Err(GameError::invalid("damping must lie in (0, 1]"));
        }
        if self.max_iter == 0 {
            return Err(GameError::invalid("max_iter must be at least 1"));
        }
        Ok(())
    }

    /// Tolerance for the optimizations nested inside an iteration.
    fn search_tol(&self) -> T {
        (self.tol * T::lit(1e-2)).max(T::epsilon().sqrt() * T::lit(1e-2))
    }

    /// Step size below which an iteration counts as converged. A search
    /// that compares payoff values places a smooth maximum only to about
    /// `sqrt(eps) * (1 + |x|)`, so tighter requests stop there.
    fn step_tol(&self, scale: T) -> T {
        self.tol.max(T::epsilon().sqrt() * (T::one() + scale.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEquilibrium<T> {
    pub t_star: T,
    /// `f_i(t*, ..., t*)`.
    pub s_star: T,
    /// `u_i(t*, ..., t*)`; zero for a symmetric zero-sum game.
    pub payoff_at_eq: T,
    pub iterations: usize,
    /// The best response at `t*` sits on an endpoint of the t-space.
    pub at_boundary: bool,
    /// Restarts landed on fixed points further apart than `10 * tol`.
    pub multiple_fixed_points: bool,
    /// Fixed points reached from each restart seed (empty without restarts).
    pub seed_fixed_points: Vec<T>,
}

fn symmetric_response<T: Scalar, G: TwoVariableGame<T> + ?Sized>(game: &G, t: T, tol: T) -> Result<OptResult<T>> {
    let n = game.players();
    let mut profile = vec![t; n];
    try_maximize(
        |own| {
            profile[0] = own;
            Ok(game.payoff(0, &profile))
        },
        game.t_space(),
        tol,
    )
}

fn iterate_symmetric<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    start: T,
    opts: &EquilibriumOptions<T>,
) -> Result<(T, usize)> {
    let mut t = start;
    let mut tail = Vec::new();
    for iteration in 1..=opts.max_iter {
        let response = symmetric_response(game, t, opts.search_tol())?.arg;
        let step = response - t;
        tail.push(t.as_f64());
        if tail.len() > 10 {
            tail.remove(0);
        }
        if step.abs() <= opts.step_tol(t) {
            return Ok((response, iteration));
        }
        t = t + opts.damping * step;
    }
    Err(GameError::Convergence {
        context: format!("symmetric best-response iteration from {start}"),
        iterations: opts.max_iter,
        residual: (symmetric_response(game, t, opts.search_tol())?.arg - t).abs().as_f64(),
        tail,
    })
}

/// Damped best-response iteration to the symmetric fixed point `t*`,
/// started from the midpoint of the t-space.
pub fn find_symmetric_fixed_point<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    opts: &EquilibriumOptions<T>,
) -> Result<SymmetricEquilibrium<T>> {
    opts.validate()?;
    let space = game.t_space();
    let (t_star, iterations) = iterate_symmetric(game, space.midpoint(), opts)?;

    let mut seed_fixed_points = Vec::new();
    let mut multiple_fixed_points = false;
    if opts.restarts {
        let last = T::from_usize(RESTART_SEEDS - 1).unwrap();
        for k in 0..RESTART_SEEDS {
            let seed = space.lerp(T::from_usize(k).unwrap() / last);
            let (fixed, _) = iterate_symmetric(game, seed, opts)?;
            multiple_fixed_points |= (fixed - t_star).abs() > T::lit(10.0) * opts.tol;
            seed_fixed_points.push(fixed);
        }
    }

    let profile = vec![t_star; game.players()];
    let edge = opts.tol;
    Ok(SymmetricEquilibrium {
        t_star,
        s_star: game.forward(&profile)[0],
        payoff_at_eq: game.payoff(0, &profile),
        iterations,
        at_boundary: t_star - space.lo() <= edge || space.hi() - t_star <= edge,
        multiple_fixed_points,
        seed_fixed_points,
    })
}

/// Range of player `i`'s s-variable reachable from the t-space endpoints
/// with everyone else held at their committed values.
pub fn own_s_domain<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    point: &MixedPoint<T>,
    i: usize,
    tol: T,
) -> Result<Interval<T>> {
    let space = game.t_space();
    let mut ends = Vec::with_capacity(2);
    for t in [space.lo(), space.hi()] {
        let solved = resolve(game, &point.with(i, VarTag::UsesT, t), inner_tol(tol), 500)?;
        ends.push(game.forward(&solved.profile)[i]);
    }
    Interval::hull(ends)
}

/// Payoff of `who` after resolving `point`.
pub fn payoff_at<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    point: &MixedPoint<T>,
    who: usize,
    tol: T,
) -> Result<T> {
    let solved = resolve(game, point, inner_tol(tol), 500)?;
    Ok(game.payoff(who, &solved.profile))
}

/// Player `i`'s payoff-maximizing value of its own committed variable
/// (t or s per the point's assignment), all other commitments held.
pub fn best_response<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    point: &MixedPoint<T>,
    i: usize,
    tol: T,
) -> Result<OptResult<T>> {
    check_player(game, i)?;
    if point.values().len() != game.players() {
        return Err(GameError::invalid("mixed point does not cover every player"));
    }
    let tag = point.assignment().tag(i);
    let domain = match tag {
        VarTag::UsesT => game.t_space(),
        VarTag::UsesS => own_s_domain(game, point, i, tol)?,
    };
    try_maximize(
        |v| payoff_at(game, &point.with(i, tag, v), i, tol),
        domain,
        tol,
    )
    .map_err(|e| e.within(format!("best response of player {i}")))
}

/// Nash check of one regime at the symmetric candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeVerdict<T> {
    pub assignment: VariableAssignment,
    /// Number of `UsesT` players.
    pub m: usize,
    pub resolved_profile: Profile<T>,
    pub resolved_s: Vec<T>,
    /// Each player's best response in its own variable.
    pub best_responses: Vec<T>,
    /// `u_i(best response) - u_i(candidate)` per player.
    pub deviation_gains: Vec<T>,
    pub max_deviation_gain: T,
    /// `max_i |resolved_i - t*|`.
    pub max_profile_deviation: T,
    pub equivalent: bool,
    /// Independently solved Nash equilibrium of the regime, when requested.
    pub nash: Option<RegimeEquilibrium<T>>,
}

/// Commits `UsesT` players to `t*` and `UsesS` players to `s*`, resolves
/// the profile and measures every player's best deviation.
pub fn verify_regime<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    assignment: &VariableAssignment,
    candidate: &SymmetricEquilibrium<T>,
    tol: T,
) -> Result<RegimeVerdict<T>> {
    if assignment.len() != game.players() {
        return Err(GameError::invalid("assignment does not cover every player"));
    }
    if !(tol > T::zero()) {
        return Err(GameError::invalid("verdict tolerance must be positive"));
    }
    let point = MixedPoint::symmetric(assignment.clone(), candidate.t_star, candidate.s_star);
    let resolved = resolve(game, &point, inner_tol(tol), 500)?;
    let base = game.payoffs(&resolved.profile);
    let search_tol = (tol * T::lit(1e-2)).max(T::epsilon().sqrt() * T::lit(1e-2));

    let mut best_responses = Vec::with_capacity(game.players());
    let mut deviation_gains = Vec::with_capacity(game.players());
    for (i, u_now) in base.iter().enumerate() {
        let best = best_response(game, &point, i, search_tol)?;
        best_responses.push(best.arg);
        deviation_gains.push(best.value - *u_now);
    }
    let max_deviation_gain = deviation_gains
        .iter()
        .fold(T::neg_infinity(), |m, g| m.max(*g));
    let max_profile_deviation = max_abs(resolved.profile.iter().map(|t| *t - candidate.t_star));
    Ok(RegimeVerdict {
        assignment: assignment.clone(),
        m: assignment.count_t(),
        resolved_s: game.forward(&resolved.profile),
        resolved_profile: resolved.profile,
        best_responses,
        deviation_gains,
        max_deviation_gain,
        max_profile_deviation,
        equivalent: max_profile_deviation <= tol && max_deviation_gain <= tol,
        nash: None,
    })
}

/// A Nash equilibrium of one regime found without assuming symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeEquilibrium<T> {
    pub assignment: VariableAssignment,
    /// Committed value of each player in its own variable.
    pub committed: Vec<T>,
    pub profile: Profile<T>,
    pub s_profile: Vec<T>,
    pub payoffs: Vec<T>,
    pub iterations: usize,
}

/// Damped simultaneous best-response iteration in the players' own
/// variables, started from the midpoint profile.
pub fn solve_regime<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    assignment: &VariableAssignment,
    opts: &EquilibriumOptions<T>,
) -> Result<RegimeEquilibrium<T>> {
    opts.validate()?;
    if assignment.len() != game.players() {
        return Err(GameError::invalid("assignment does not cover every player"));
    }
    let n = game.players();
    let start = vec![game.t_space().midpoint(); n];
    let mut point = MixedPoint::from_profile(game, assignment.clone(), &start)?;
    let mut tail = Vec::new();
    let mut step = T::infinity();
    for iteration in 1..=opts.max_iter {
        let responses = (0..n)
            .map(|i| best_response(game, &point, i, opts.search_tol()).map(|r| r.arg))
            .collect::<Result<Vec<T>>>()?;
        step = max_abs(responses.iter().zip(point.values()).map(|(r, v)| *r - *v));
        tail.push(step.as_f64());
        if tail.len() > 10 {
            tail.remove(0);
        }
        if step <= opts.step_tol(max_abs(point.values().iter().copied())) {
            point = MixedPoint::new(assignment.clone(), responses)?;
            let solved = resolve(game, &point, inner_tol(opts.tol), 500)?;
            return Ok(RegimeEquilibrium {
                assignment: assignment.clone(),
                committed: point.values().to_vec(),
                s_profile: game.forward(&solved.profile),
                payoffs: game.payoffs(&solved.profile),
                profile: solved.profile,
                iterations: iteration,
            });
        }
        let next = point
            .values()
            .iter()
            .zip(&responses)
            .map(|(v, r)| *v + opts.damping * (*r - *v))
            .collect();
        point = MixedPoint::new(assignment.clone(), next)?;
    }
    Err(GameError::Convergence {
        context: format!("best-response iteration in regime {assignment}"),
        iterations: opts.max_iter,
        residual: step.as_f64(),
        tail,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assumption1Report<T> {
    /// Perturbed t-player.
    pub i: usize,
    /// Another t-player whose payoff response is compared.
    pub k: usize,
    /// An s-player whose payoff response is compared.
    pub l: usize,
    pub probe_offsets: Vec<T>,
    pub responses_k: Vec<T>,
    pub responses_l: Vec<T>,
    pub sign_agreement: Vec<bool>,
    /// `argmin_{t_i} u_k` with everyone else at the candidate.
    pub argmin_t_of_uk: T,
    /// `argmin_{t_i} u_l` with everyone else at the candidate.
    pub argmin_t_of_ul: T,
}

impl<T: Scalar> Assumption1Report<T> {
    pub fn all_agree(&self) -> bool {
        self.sign_agreement.iter().all(|a| *a)
    }

    pub fn argmin_gap(&self) -> T {
        (self.argmin_t_of_uk - self.argmin_t_of_ul).abs()
    }
}

/// Probe offsets at `±1e-2` and `±1e-3` of the interval width.
pub fn default_probe_offsets<T: Scalar>(space: &Interval<T>) -> Vec<T> {
    [1e-2, -1e-2, 1e-3, -1e-3]
        .into_iter()
        .map(|f| space.width() * T::lit(f))
        .collect()
}

fn same_sign<T: Scalar>(a: T, b: T, floor: T) -> bool {
    (a.abs() <= floor && b.abs() <= floor) || (a > floor && b > floor) || (a < -floor && b < -floor)
}

/// Compares how a t-player `k` and an s-player `l` respond to a small
/// change in the t-player `i`'s value around the candidate, and locates
/// both payoffs' minimizers over `t_i`.
pub fn check_assumption1<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    assignment: &VariableAssignment,
    candidate: &SymmetricEquilibrium<T>,
    probe_offsets: &[T],
    tol: T,
) -> Result<Assumption1Report<T>> {
    let n = game.players();
    let m = assignment.count_t();
    if assignment.len() != n {
        return Err(GameError::invalid("assignment does not cover every player"));
    }
    if m < 2 || m + 1 > n {
        return Err(GameError::invalid(format!(
            "the response comparison needs 2 <= m <= n - 1 t-players, got m = {m}"
        )));
    }
    let mut t_players = assignment.t_players();
    let i = t_players.next().expect("m >= 2");
    let k = t_players.next().expect("m >= 2");
    let l = assignment.s_players().next().expect("m <= n - 1");

    let point = MixedPoint::symmetric(assignment.clone(), candidate.t_star, candidate.s_star);
    let base = resolve(game, &point, inner_tol(tol), 500)?;
    let (uk0, ul0) = (game.payoff(k, &base.profile), game.payoff(l, &base.profile));
    let floor = T::epsilon() * T::lit(64.0) * (T::one() + uk0.abs().max(ul0.abs()));

    let mut responses_k = Vec::with_capacity(probe_offsets.len());
    let mut responses_l = Vec::with_capacity(probe_offsets.len());
    let mut sign_agreement = Vec::with_capacity(probe_offsets.len());
    for &delta in probe_offsets {
        let moved = point.with(i, VarTag::UsesT, candidate.t_star + delta);
        let profile = resolve(game, &moved, inner_tol(tol), 500)?.profile;
        let dk = game.payoff(k, &profile) - uk0;
        let dl = game.payoff(l, &profile) - ul0;
        responses_k.push(dk);
        responses_l.push(dl);
        sign_agreement.push(same_sign(dk, dl, floor));
    }

    let argmin_for = |who: usize| {
        try_minimize(
            |t_i| payoff_at(game, &point.with(i, VarTag::UsesT, t_i), who, tol),
            game.t_space(),
            tol,
        )
        .map(|r| r.arg)
    };
    Ok(Assumption1Report {
        i,
        k,
        l,
        probe_offsets: probe_offsets.to_vec(),
        responses_k,
        responses_l,
        sign_agreement,
        argmin_t_of_uk: argmin_for(k)?,
        argmin_t_of_ul: argmin_for(l)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport<T> {
    pub candidate: SymmetricEquilibrium<T>,
    pub verdicts: Vec<RegimeVerdict<T>>,
}

impl<T: Scalar> EquivalenceReport<T> {
    pub fn all_equivalent(&self) -> bool {
        self.verdicts.iter().all(|v| v.equivalent)
    }
}

/// Verifies one representative assignment per `m = n, n-1, ..., 0`
/// (players `0..m` on t), or all `2^n` assignments when `exhaustive`.
/// Every verdict also carries the regime's independently solved Nash
/// equilibrium.
pub fn equivalence_report<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    opts: &EquilibriumOptions<T>,
    exhaustive: bool,
) -> Result<EquivalenceReport<T>> {
    let n = game.players();
    let candidate = find_symmetric_fixed_point(game, opts)?;
    let assignments: Vec<VariableAssignment> = if exhaustive {
        VariableAssignment::exhaustive(n)
    } else {
        (0..=n).rev().map(|m| VariableAssignment::first_m_use_t(n, m)).collect()
    };

    let outcomes: Vec<Result<RegimeVerdict<T>>> = assignments
        .par_iter()
        .map(|assignment| {
            let mut verdict = verify_regime(game, assignment, &candidate, opts.tol)?;
            verdict.nash = Some(solve_regime(game, assignment, opts)?);
            Ok(verdict)
        })
        .collect();

    let failed: Vec<String> = assignments
        .iter()
        .zip(&outcomes)
        .filter(|(_, o)| o.is_err())
        .map(|(a, _)| a.to_string())
        .collect();
    let mut verdicts = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        match outcome {
            Ok(v) => verdicts.push(v),
            Err(e) => return Err(e.within(format!("regimes {}", failed.join(", ")))),
        }
    }
    Ok(EquivalenceReport { candidate, verdicts })
}
