//! Symmetric multi-player zero-sum games in which every player can commit
//! to one of two linked strategic variables.
//!
//! The crate computes symmetric Nash equilibria, checks the Nash
//! conditions under every assignment of strategic variables, and measures
//! the minimax equalities that tie those assignments together. The
//! three-firm relative-profit oligopoly in [`oligopoly`] is the built-in
//! reference model.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the common `f64` case.

// `!(x > 0)` is deliberate throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod error;
pub mod game;
mod linalg;
pub mod minimax;
pub mod oligopoly;
pub mod optimize;
pub mod scalar;
pub mod transform;

pub use equilibrium::{
    best_response, check_assumption1, equivalence_report, find_symmetric_fixed_point, solve_regime,
    verify_regime, Assumption1Report, EquilibriumOptions, RegimeEquilibrium, RegimeVerdict,
    SymmetricEquilibrium,
};
pub use error::{GameError, Result};
pub use game::{
    audit_invariants, check_symmetry, payoff_sum, roundtrip_error, ClosureGame, IdentityTransforms,
    Interval, InvariantAudit, Profile, ScaledPayoffs, TwoVariableGame, VarTag, VariableAssignment,
};
pub use minimax::{lemma2_chain, lemma3_chain, sion_gap, ChainReport, Context};
pub use oligopoly::{MarketCase, MarketState, OligopolyGame, OligopolyParams};
pub use optimize::{max_min, maximize, min_max, minimize, OptResult};
pub use scalar::Scalar;
pub use transform::{induced_s, resolve, MixedPoint, ResolutionResult};

pub type Interval64 = Interval<f64>;
pub type Profile64 = Profile<f64>;
pub type MixedPoint64 = MixedPoint<f64>;
pub type OptResult64 = OptResult<f64>;
pub type OligopolyParams64 = OligopolyParams<f64>;
pub type OligopolyGame64 = OligopolyGame<f64>;
pub type SymmetricEquilibrium64 = SymmetricEquilibrium<f64>;
pub type RegimeVerdict64 = RegimeVerdict<f64>;
pub type ChainReport64 = ChainReport<f64>;
pub type OligopolyParams32 = OligopolyParams<f32>;
pub type OligopolyGame32 = OligopolyGame<f32>;
