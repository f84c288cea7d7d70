//! Resolution of the induced t-values when some players commit to
//! s-variables.
//!
//! Given committed t-values for the `UsesT` players and committed s-values
//! for the `UsesS` players, [`resolve`] finds the full t-profile whose
//! forward image reproduces every committed s-value. Affine transforms are
//! detected by probing and solved directly; everything else goes through a
//! damped fixed-point iteration on the unknown entries.

use crate::error::{GameError, Result};
use crate::game::{check_len, Interval, Profile, TwoVariableGame, VarTag, VariableAssignment};
use crate::linalg;
use crate::scalar::{max_abs, Scalar};

/// Every player's committed value: a t-value for `UsesT` players, an
/// s-value for `UsesS` players.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPoint<T> {
    assignment: VariableAssignment,
    values: Vec<T>,
}

impl<T: Scalar> MixedPoint<T> {
    pub fn new(assignment: VariableAssignment, values: Vec<T>) -> Result<Self> {
        if assignment.len() != values.len() {
            return Err(GameError::invalid(format!(
                "assignment covers {} players but {} values were given",
                assignment.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(GameError::invalid(format!(
                "committed value for player {bad} is not finite"
            )));
        }
        Ok(Self { assignment, values })
    }

    /// Reads the committed values off a full t-profile: t-entries for
    /// `UsesT` players, `forward(profile)` entries for `UsesS` players.
    pub fn from_profile<G: TwoVariableGame<T> + ?Sized>(
        game: &G,
        assignment: VariableAssignment,
        profile: &[T],
    ) -> Result<Self> {
        check_len(game, profile)?;
        let s = game.forward(profile);
        let values = (0..profile.len())
            .map(|i| match assignment.tag(i) {
                VarTag::UsesT => profile[i],
                VarTag::UsesS => s[i],
            })
            .collect();
        Self::new(assignment, values)
    }

    /// Symmetric point: `t` for `UsesT` players, `s` for `UsesS` players.
    pub fn symmetric(assignment: VariableAssignment, t: T, s: T) -> Self {
        let values = assignment
            .tags()
            .iter()
            .map(|tag| match tag {
                VarTag::UsesT => t,
                VarTag::UsesS => s,
            })
            .collect();
        Self { assignment, values }
    }

    pub fn assignment(&self) -> &VariableAssignment {
        &self.assignment
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, player: usize) -> T {
        self.values[player]
    }

    /// Copy with one player's tag and committed value replaced.
    pub fn with(&self, player: usize, tag: VarTag, value: T) -> Self {
        let mut values = self.values.clone();
        values[player] = value;
        Self {
            assignment: self.assignment.with(player, tag),
            values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolutionMethod {
    /// Nothing to solve: every player committed to a t-value.
    Direct,
    /// Transforms probed as affine; linear system solved exactly.
    Affine,
    /// Damped fixed-point iteration.
    FixedPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionResult<T> {
    pub profile: Profile<T>,
    pub iterations: usize,
    /// `max_l |f_l(profile) - s_l|` over the `UsesS` players.
    pub residual: T,
    pub method: ResolutionMethod,
    /// Residuals of the last (at most ten) iterations, oldest first.
    pub residual_tail: Vec<T>,
    /// Whether every resolved entry lies in the game's t-space. Affine
    /// solutions may leave it; iterative ones are kept inside.
    pub in_t_space: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolveOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    /// Weight of the new iterate in the damped update.
    pub damping: T,
    pub detect_affine: bool,
}

impl<T: Scalar> ResolveOptions<T> {
    pub fn new(tol: T, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            damping: T::lit(0.5),
            detect_affine: true,
        }
    }
}

const TAIL: usize = 10;
const STAGNATION_WINDOW: usize = 25;

/// Solves for the full t-profile at a mixed point with default damping 0.5.
pub fn resolve<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    point: &MixedPoint<T>,
    tol: T,
    max_iter: usize,
) -> Result<ResolutionResult<T>> {
    resolve_with(game, point, &ResolveOptions::new(tol, max_iter))
}

pub fn resolve_with<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    point: &MixedPoint<T>,
    opts: &ResolveOptions<T>,
) -> Result<ResolutionResult<T>> {
    check_len(game, point.values())?;
    if !(opts.tol > T::zero()) {
        return Err(GameError::invalid("resolution tolerance must be positive"));
    }
    if !(opts.damping > T::zero() && opts.damping <= T::one()) {
        return Err(GameError::invalid("damping must lie in (0, 1]"));
    }
    let space = game.t_space();
    let unknown: Vec<usize> = point.assignment().s_players().collect();
    let mut profile: Vec<T> = point
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| if point.assignment().uses_s(i) { space.midpoint() } else { *v })
        .collect();

    if unknown.is_empty() {
        return Ok(ResolutionResult {
            in_t_space: profile.iter().all(|v| space.contains(*v)),
            profile: Profile::new(profile),
            iterations: 0,
            residual: T::zero(),
            method: ResolutionMethod::Direct,
            residual_tail: Vec::new(),
        });
    }

    let system = System {
        game,
        unknown: &unknown,
        targets: point.values(),
    };

    if opts.detect_affine {
        if let Some(solved) = system.solve_affine(&mut profile, space) {
            if solved.residual <= opts.tol {
                return Ok(solved);
            }
        }
    }
    system.iterate(&mut profile, space, opts)
}

struct System<'a, T, G: ?Sized> {
    game: &'a G,
    unknown: &'a [usize],
    targets: &'a [T],
}

impl<T: Scalar, G: TwoVariableGame<T> + ?Sized> System<'_, T, G> {
    fn residuals(&self, profile: &[T]) -> Vec<T> {
        let s = self.game.forward(profile);
        self.unknown
            .iter()
            .map(|&l| s[l] - self.targets[l])
            .collect()
    }

    fn set(&self, profile: &mut [T], z: &[T]) {
        for (&l, v) in self.unknown.iter().zip(z) {
            profile[l] = *v;
        }
    }

    /// Probes the residual map for affinity; on success solves it exactly
    /// with one refinement step.
    fn solve_affine(&self, profile: &mut [T], space: Interval<T>) -> Option<ResolutionResult<T>> {
        let dim = self.unknown.len();
        let step = space.width() / T::lit(4.0);
        let z0: Vec<T> = self.unknown.iter().map(|&l| profile[l]).collect();
        let r0 = self.residuals(profile);

        let mut jac = vec![T::zero(); dim * dim];
        for col in 0..dim {
            let mut z = z0.clone();
            z[col] = z[col] + step;
            self.set(profile, &z);
            let r = self.residuals(profile);
            for row in 0..dim {
                jac[row * dim + col] = (r[row] - r0[row]) / step;
            }
        }

        // off-axis probe: an affine map must reproduce it from the columns
        let weights: Vec<T> = (0..dim)
            .map(|k| {
                let w = T::lit(0.37 + 0.21 * k as f64);
                if k % 2 == 0 { w } else { -w }
            })
            .collect();
        let z1: Vec<T> = z0.iter().zip(&weights).map(|(z, w)| *z + *w * step).collect();
        self.set(profile, &z1);
        let r1 = self.residuals(profile);
        let scale = T::one() + max_abs(r0.iter().chain(&r1).copied());
        for row in 0..dim {
            let predicted = (0..dim).fold(r0[row], |acc, col| {
                acc + jac[row * dim + col] * weights[col] * step
            });
            if (r1[row] - predicted).abs() > T::lit(1e-9) * scale {
                self.set(profile, &z0);
                return None;
            }
        }

        let neg = |r: Vec<T>| r.into_iter().map(|v| -v).collect::<Vec<T>>();
        let delta = linalg::solve(jac.clone(), neg(r0))?;
        let mut z: Vec<T> = z0.iter().zip(&delta).map(|(a, d)| *a + *d).collect();
        self.set(profile, &z);
        let r = self.residuals(profile);
        let correction = linalg::solve(jac, neg(r))?;
        for (zk, c) in z.iter_mut().zip(&correction) {
            *zk = *zk + *c;
        }
        self.set(profile, &z);
        let residual = max_abs(self.residuals(profile));
        if !residual.is_finite() {
            return None;
        }
        Some(ResolutionResult {
            in_t_space: profile.iter().all(|v| space.contains(*v)),
            profile: Profile::new(profile.to_vec()),
            iterations: 1,
            residual,
            method: ResolutionMethod::Affine,
            residual_tail: vec![residual],
        })
    }

    /// `t_l <- (1 - damping) t_l + damping * g_l(f(profile) with s_l pinned)`.
    fn iterate(
        &self,
        profile: &mut [T],
        space: Interval<T>,
        opts: &ResolveOptions<T>,
    ) -> Result<ResolutionResult<T>> {
        for &l in self.unknown {
            profile[l] = space.midpoint();
        }
        let mut history: Vec<T> = Vec::new();
        for iteration in 1..=opts.max_iter {
            let mut s = self.game.forward(profile);
            for &l in self.unknown {
                s[l] = self.targets[l];
            }
            let next = self.game.inverse(&s);
            let mut clamped = false;
            for &l in self.unknown {
                let blended = (T::one() - opts.damping) * profile[l] + opts.damping * next[l];
                let kept = space.clamp(blended);
                clamped |= kept != blended;
                profile[l] = kept;
            }
            let residual = max_abs(self.residuals(profile));
            if !residual.is_finite() {
                return Err(GameError::Convergence {
                    context: "transform resolution".into(),
                    iterations: iteration,
                    residual: f64::NAN,
                    tail: tail_f64(&history),
                });
            }
            history.push(residual);
            if residual <= opts.tol {
                return Ok(ResolutionResult {
                    profile: Profile::new(profile.to_vec()),
                    iterations: iteration,
                    residual,
                    method: ResolutionMethod::FixedPoint,
                    residual_tail: history[history.len().saturating_sub(TAIL)..].to_vec(),
                    in_t_space: true,
                });
            }
            let at_edge = self
                .unknown
                .iter()
                .any(|&l| profile[l] == space.lo() || profile[l] == space.hi());
            if (clamped || at_edge) && history.len() > STAGNATION_WINDOW {
                let earlier = history[history.len() - 1 - STAGNATION_WINDOW];
                if residual >= earlier * T::lit(0.999) {
                    return Err(GameError::Infeasible {
                        context: "transform resolution".into(),
                        residual: residual.as_f64(),
                    });
                }
            }
        }
        Err(GameError::Convergence {
            context: "transform resolution".into(),
            iterations: opts.max_iter,
            residual: history.last().map_or(f64::NAN, |r| r.as_f64()),
            tail: tail_f64(&history),
        })
    }
}

fn tail_f64<T: Scalar>(history: &[T]) -> Vec<f64> {
    history[history.len().saturating_sub(TAIL)..]
        .iter()
        .map(|v| v.as_f64())
        .collect()
}

/// Tolerance handed to [`resolve`] by callers that optimize at `tol`:
/// three orders tighter, floored near machine precision.
pub fn inner_tol<T: Scalar>(tol: T) -> T {
    (tol * T::lit(1e-3)).max(T::epsilon() * T::lit(1024.0))
}

/// Componentwise forward transform of a t-profile.
pub fn induced_s<T: Scalar, G: TwoVariableGame<T> + ?Sized>(game: &G, profile: &[T]) -> Result<Vec<T>> {
    check_len(game, profile)?;
    Ok(game.forward(profile))
}
