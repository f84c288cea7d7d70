//! Game abstraction: players, interval strategy spaces, payoffs over
//! t-profiles and the invertible transforms linking t-space and s-space.
//!
//! The t-profile is the canonical state. Every payoff is evaluated on a full
//! vector of t-values; s-values are always derived through [`TwoVariableGame::forward`].

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GameError, Result};
use crate::scalar::{max_abs, Scalar};

/// Compact real interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(GameError::invalid(format!(
                "interval bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(GameError::invalid(format!(
                "interval requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Smallest interval containing every finite value in `points`.
    pub fn hull(points: impl IntoIterator<Item = T>) -> Result<Self> {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for p in points {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        Self::new(lo, hi)
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        self.lo + self.width() / T::lit(2.0)
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn clamp(&self, x: T) -> T {
        x.max(self.lo).min(self.hi)
    }

    /// Point at fraction `frac` of the way from `lo` to `hi`.
    pub fn lerp(&self, frac: T) -> T {
        if frac >= T::one() {
            self.hi
        } else {
            self.lo + self.width() * frac
        }
    }

    /// `count` evenly spaced points including both endpoints.
    pub fn grid(&self, count: usize) -> impl Iterator<Item = T> + '_ {
        let last = T::from_usize(count.max(2) - 1).unwrap();
        (0..count.max(2)).map(move |k| self.lerp(T::from_usize(k).unwrap() / last))
    }
}

impl<T: fmt::Display> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A full vector of t-values, one per player.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T>(Vec<T>);

impl<T: Scalar> Profile<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn uniform(n: usize, value: T) -> Self {
        Self(vec![value; n])
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    /// Copy with entries `j` and `k` exchanged.
    pub fn swapped(&self, j: usize, k: usize) -> Self {
        let mut v = self.0.clone();
        v.swap(j, k);
        Self(v)
    }

    /// Largest componentwise distance to `other`.
    pub fn max_distance(&self, other: &[T]) -> T {
        max_abs(self.0.iter().zip(other).map(|(a, b)| *a - *b))
    }
}

impl<T> Deref for Profile<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> From<Vec<T>> for Profile<T> {
    fn from(values: Vec<T>) -> Self {
        Self(values)
    }
}

/// Which strategic variable a player commits to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarTag {
    UsesT,
    UsesS,
}

impl fmt::Display for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarTag::UsesT => "T",
            VarTag::UsesS => "S",
        })
    }
}

/// Per-player declaration of the committed variable. Players tagged
/// [`VarTag::UsesT`] form the set usually written `M`; `m = count_t()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableAssignment {
    tags: Vec<VarTag>,
}

impl VariableAssignment {
    pub fn new(tags: Vec<VarTag>) -> Self {
        Self { tags }
    }

    pub fn all_t(n: usize) -> Self {
        Self::new(vec![VarTag::UsesT; n])
    }

    pub fn all_s(n: usize) -> Self {
        Self::new(vec![VarTag::UsesS; n])
    }

    /// Representative assignment with players `0..m` on t and the rest on s.
    pub fn first_m_use_t(n: usize, m: usize) -> Self {
        Self::new(
            (0..n)
                .map(|i| if i < m { VarTag::UsesT } else { VarTag::UsesS })
                .collect(),
        )
    }

    /// All `2^n` assignments, ordered by decreasing `m` then lexicographically.
    pub fn exhaustive(n: usize) -> Vec<Self> {
        let mut all: Vec<Self> = (0..(1usize << n))
            .map(|mask| {
                Self::new(
                    (0..n)
                        .map(|i| {
                            if mask & (1 << (n - 1 - i)) != 0 {
                                VarTag::UsesS
                            } else {
                                VarTag::UsesT
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        all.sort_by(|a, b| b.count_t().cmp(&a.count_t()).then(a.cmp(b)));
        all
    }

    /// Parses a compact form such as `"TTS"`.
    pub fn parse(code: &str) -> Result<Self> {
        code.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'T' => Ok(VarTag::UsesT),
                'S' => Ok(VarTag::UsesS),
                other => Err(GameError::invalid(format!(
                    "assignment code must use T/S, found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tag(&self, player: usize) -> VarTag {
        self.tags[player]
    }

    pub fn tags(&self) -> &[VarTag] {
        &self.tags
    }

    pub fn uses_s(&self, player: usize) -> bool {
        self.tags[player] == VarTag::UsesS
    }

    pub fn count_t(&self) -> usize {
        self.tags.iter().filter(|t| **t == VarTag::UsesT).count()
    }

    pub fn t_players(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| !self.uses_s(i))
    }

    pub fn s_players(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.uses_s(i))
    }

    /// Copy with one player's tag replaced.
    pub fn with(&self, player: usize, tag: VarTag) -> Self {
        let mut tags = self.tags.clone();
        tags[player] = tag;
        Self::new(tags)
    }
}

impl fmt::Display for VariableAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tags {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Symmetric multi-player game in which every player can commit either to
/// a t-variable or to an s-variable, the two being linked by
/// `s = forward(t)` and `t = inverse(s)`.
pub trait TwoVariableGame<T: Scalar>: Send + Sync {
    fn players(&self) -> usize;

    fn t_space(&self) -> Interval<T>;

    fn s_space(&self) -> Interval<T>;

    /// `u_player(t_1, ..., t_n)`.
    fn payoff(&self, player: usize, profile: &[T]) -> T;

    /// All players' payoffs. Override when one evaluation yields all of them.
    fn payoffs(&self, profile: &[T]) -> Vec<T> {
        (0..self.players())
            .map(|i| self.payoff(i, profile))
            .collect()
    }

    /// s-profile induced by a t-profile.
    fn forward(&self, profile: &[T]) -> Vec<T>;

    /// t-profile induced by an s-profile.
    fn inverse(&self, s: &[T]) -> Vec<T>;
}

impl<T: Scalar, G: TwoVariableGame<T> + ?Sized> TwoVariableGame<T> for &G {
    fn players(&self) -> usize {
        (**self).players()
    }
    fn t_space(&self) -> Interval<T> {
        (**self).t_space()
    }
    fn s_space(&self) -> Interval<T> {
        (**self).s_space()
    }
    fn payoff(&self, player: usize, profile: &[T]) -> T {
        (**self).payoff(player, profile)
    }
    fn payoffs(&self, profile: &[T]) -> Vec<T> {
        (**self).payoffs(profile)
    }
    fn forward(&self, profile: &[T]) -> Vec<T> {
        (**self).forward(profile)
    }
    fn inverse(&self, s: &[T]) -> Vec<T> {
        (**self).inverse(s)
    }
}

type PayoffFn<T> = Arc<dyn Fn(usize, &[T]) -> T + Send + Sync>;
type TransformFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// Game assembled from closures. Transforms default to the identity.
#[derive(Clone)]
pub struct ClosureGame<T> {
    n: usize,
    t_space: Interval<T>,
    s_space: Interval<T>,
    payoff: PayoffFn<T>,
    forward: TransformFn<T>,
    inverse: TransformFn<T>,
}

impl<T: Scalar> ClosureGame<T> {
    pub fn new(
        n: usize,
        t_space: Interval<T>,
        payoff: impl Fn(usize, &[T]) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        if n < 3 {
            return Err(GameError::invalid(format!(
                "games need at least three players, got {n}"
            )));
        }
        Ok(Self {
            n,
            t_space,
            s_space: t_space,
            payoff: Arc::new(payoff),
            forward: Arc::new(|t: &[T]| t.to_vec()),
            inverse: Arc::new(|s: &[T]| s.to_vec()),
        })
    }

    pub fn with_transforms(
        mut self,
        s_space: Interval<T>,
        forward: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
        inverse: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Self {
        self.s_space = s_space;
        self.forward = Arc::new(forward);
        self.inverse = Arc::new(inverse);
        self
    }
}

impl<T: Scalar> fmt::Debug for ClosureGame<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosureGame")
            .field("n", &self.n)
            .field("t_space", &self.t_space)
            .field("s_space", &self.s_space)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> TwoVariableGame<T> for ClosureGame<T> {
    fn players(&self) -> usize {
        self.n
    }
    fn t_space(&self) -> Interval<T> {
        self.t_space
    }
    fn s_space(&self) -> Interval<T> {
        self.s_space
    }
    fn payoff(&self, player: usize, profile: &[T]) -> T {
        (self.payoff)(player, profile)
    }
    fn forward(&self, profile: &[T]) -> Vec<T> {
        (self.forward)(profile)
    }
    fn inverse(&self, s: &[T]) -> Vec<T> {
        (self.inverse)(s)
    }
}

/// Same payoffs as the wrapped game, but with `s = t`.
#[derive(Debug, Clone)]
pub struct IdentityTransforms<G>(pub G);

impl<T: Scalar, G: TwoVariableGame<T>> TwoVariableGame<T> for IdentityTransforms<G> {
    fn players(&self) -> usize {
        self.0.players()
    }
    fn t_space(&self) -> Interval<T> {
        self.0.t_space()
    }
    fn s_space(&self) -> Interval<T> {
        self.0.t_space()
    }
    fn payoff(&self, player: usize, profile: &[T]) -> T {
        self.0.payoff(player, profile)
    }
    fn payoffs(&self, profile: &[T]) -> Vec<T> {
        self.0.payoffs(profile)
    }
    fn forward(&self, profile: &[T]) -> Vec<T> {
        profile.to_vec()
    }
    fn inverse(&self, s: &[T]) -> Vec<T> {
        s.to_vec()
    }
}

/// Wrapped game with every payoff multiplied by a common factor.
#[derive(Debug, Clone)]
pub struct ScaledPayoffs<G, T> {
    pub game: G,
    pub factor: T,
}

impl<T: Scalar, G: TwoVariableGame<T>> TwoVariableGame<T> for ScaledPayoffs<G, T> {
    fn players(&self) -> usize {
        self.game.players()
    }
    fn t_space(&self) -> Interval<T> {
        self.game.t_space()
    }
    fn s_space(&self) -> Interval<T> {
        self.game.s_space()
    }
    fn payoff(&self, player: usize, profile: &[T]) -> T {
        self.game.payoff(player, profile) * self.factor
    }
    fn payoffs(&self, profile: &[T]) -> Vec<T> {
        self.game
            .payoffs(profile)
            .into_iter()
            .map(|u| u * self.factor)
            .collect()
    }
    fn forward(&self, profile: &[T]) -> Vec<T> {
        self.game.forward(profile)
    }
    fn inverse(&self, s: &[T]) -> Vec<T> {
        self.game.inverse(s)
    }
}

pub(crate) fn check_len<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    profile: &[T],
) -> Result<()> {
    if profile.len() != game.players() {
        return Err(GameError::invalid(format!(
            "profile has {} entries, game has {} players",
            profile.len(),
            game.players()
        )));
    }
    Ok(())
}

pub(crate) fn check_player<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    player: usize,
) -> Result<()> {
    if player >= game.players() {
        return Err(GameError::invalid(format!(
            "player index {player} out of range for {} players",
            game.players()
        )));
    }
    Ok(())
}

/// Sum of all players' payoffs at `profile`; zero for a zero-sum game.
pub fn payoff_sum<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    profile: &[T],
) -> Result<T> {
    check_len(game, profile)?;
    Ok(game
        .payoffs(profile)
        .into_iter()
        .fold(T::zero(), |acc, u| acc + u))
}

/// `|u_i(profile) - u_i(profile with j and k swapped)|`.
pub fn check_symmetry<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    profile: &[T],
    i: usize,
    j: usize,
    k: usize,
) -> Result<T> {
    check_len(game, profile)?;
    for p in [i, j, k] {
        check_player(game, p)?;
    }
    if i == j || j == k || i == k {
        return Err(GameError::invalid(format!(
            "symmetry check needs distinct players, got ({i}, {j}, {k})"
        )));
    }
    let mut swapped = profile.to_vec();
    swapped.swap(j, k);
    Ok((game.payoff(i, profile) - game.payoff(i, &swapped)).abs())
}

/// Largest componentwise `|inverse(forward(profile)) - profile|`.
pub fn roundtrip_error<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    profile: &[T],
) -> Result<T> {
    check_len(game, profile)?;
    let back = game.inverse(&game.forward(profile));
    if back.len() != profile.len() {
        return Err(GameError::invalid(
            "inverse transform returned a profile of the wrong length",
        ));
    }
    Ok(max_abs(back.iter().zip(profile).map(|(a, b)| *a - *b)))
}

/// Worst-case violations of the game's structural assumptions over a
/// random sample of profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantAudit<T> {
    pub samples: usize,
    pub max_payoff_sum: T,
    pub max_asymmetry: T,
    pub max_roundtrip_error: T,
}

impl<T: Scalar> InvariantAudit<T> {
    pub fn passes(&self, tol: T) -> bool {
        self.max_payoff_sum <= tol && self.max_asymmetry <= tol && self.max_roundtrip_error <= tol
    }
}

/// Draws `samples` profiles uniformly from `t_space^n` with a fixed seed
/// and records the largest zero-sum, symmetry and round-trip violations.
pub fn audit_invariants<T: Scalar, G: TwoVariableGame<T> + ?Sized>(
    game: &G,
    samples: usize,
    seed: u64,
) -> Result<InvariantAudit<T>> {
    let n = game.players();
    let space = game.t_space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit = InvariantAudit {
        samples,
        max_payoff_sum: T::zero(),
        max_asymmetry: T::zero(),
        max_roundtrip_error: T::zero(),
    };
    for _ in 0..samples {
        let profile: Vec<T> = (0..n)
            .map(|_| space.lerp(T::lit(rng.gen::<f64>())))
            .collect();
        audit.max_payoff_sum = audit
            .max_payoff_sum
            .max(payoff_sum(game, &profile)?.abs());
        audit.max_roundtrip_error = audit
            .max_roundtrip_error
            .max(roundtrip_error(game, &profile)?);
        for i in 0..n {
            for j in 0..n {
                for k in (j + 1)..n {
                    if i != j && i != k {
                        audit.max_asymmetry =
                            audit.max_asymmetry.max(check_symmetry(game, &profile, i, j, k)?);
                    }
                }
            }
        }
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval<f64> {
        Interval::new(0.0, 1.0).unwrap()
    }

    /// u_i = t_i * (mean of others) - mean over j of t_j * (mean of j's others)
    fn relative_game() -> ClosureGame<f64> {
        ClosureGame::new(3, unit(), |i, t: &[f64]| {
            let raw = |p: usize| {
                let others: f64 = t.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, v)| v).sum();
                t[p] * (1.0 - t[p] - 0.5 * others)
            };
            let rivals: f64 = (0..3).filter(|&q| q != i).map(raw).sum();
            raw(i) - rivals / 2.0
        })
        .unwrap()
    }

    #[test]
    fn interval_rejects_degenerate_bounds() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn grid_includes_endpoints() {
        let g: Vec<f64> = Interval::new(-1.0, 1.0).unwrap().grid(5).collect();
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn exhaustive_assignments_sorted_by_m() {
        let all = VariableAssignment::exhaustive(3);
        assert_eq!(all.len(), 8);
        assert_eq!(all[0].to_string(), "TTT");
        assert_eq!(all[7].to_string(), "SSS");
        let ms: Vec<usize> = all.iter().map(|a| a.count_t()).collect();
        assert_eq!(ms, vec![3, 2, 2, 2, 1, 1, 1, 0]);
    }

    #[test]
    fn parse_assignment() {
        let a = VariableAssignment::parse("tts").unwrap();
        assert_eq!(a, VariableAssignment::first_m_use_t(3, 2));
        assert!(VariableAssignment::parse("TX").is_err());
    }

    #[test]
    fn too_few_players_rejected() {
        assert!(ClosureGame::new(2, unit(), |_, _: &[f64]| 0.0).is_err());
    }

    #[test]
    fn payoff_sum_zero_for_relative_construction() {
        let g = relative_game();
        assert!(payoff_sum(&g, &[0.1, 0.5, 0.9]).unwrap().abs() < 1e-15);
        assert!(payoff_sum(&g, &[0.3, 0.3]).is_err());
    }

    #[test]
    fn symmetry_of_relative_game() {
        let g = relative_game();
        assert!(check_symmetry(&g, &[0.1, 0.5, 0.9], 0, 1, 2).unwrap() < 1e-15);
        assert_eq!(check_symmetry(&g, &[0.4, 0.4, 0.4], 1, 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_rejects_bad_indices() {
        let g = relative_game();
        let p = [0.1, 0.2, 0.3];
        assert!(check_symmetry(&g, &p, 0, 0, 2).is_err());
        assert!(check_symmetry(&g, &p, 0, 1, 3).is_err());
    }

    #[test]
    fn asymmetric_double_is_detected() {
        let g = ClosureGame::new(3, unit(), |i, t: &[f64]| if i == 0 { t[1] - 2.0 * t[2] } else { 0.0 }).unwrap();
        assert!(check_symmetry(&g, &[0.1, 0.2, 0.7], 0, 1, 2).unwrap() > 0.5);
    }

    #[test]
    fn identity_roundtrip_is_exact() {
        let g = relative_game();
        assert_eq!(roundtrip_error(&g, &[0.2, 0.4, 0.6]).unwrap(), 0.0);
    }

    #[test]
    fn audit_flags_nothing_for_conforming_game() {
        let audit = audit_invariants(&relative_game(), 50, 7).unwrap();
        assert!(audit.passes(1e-12), "{audit:?}");
    }

    #[test]
    fn scaled_payoffs_scale() {
        let g = ScaledPayoffs { game: relative_game(), factor: 3.0 };
        let p = [0.1, 0.5, 0.9];
        assert!((g.payoff(0, &p) - 3.0 * relative_game().payoff(0, &p)).abs() < 1e-15);
    }
}
