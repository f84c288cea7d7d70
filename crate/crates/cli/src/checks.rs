//! Runs the individual checks against a built game.

use serde::Serialize;
use serde_json::Value;
use zsdv_core::equilibrium::default_probe_offsets;
use zsdv_core::oligopoly::closed_form_pb;
use zsdv_core::{
    check_assumption1, equivalence_report, find_symmetric_fixed_point, lemma2_chain, lemma3_chain, solve_regime,
    ChainReport, Context, EquilibriumOptions, GameError, IdentityTransforms, MarketCase, MixedPoint, OligopolyGame,
    SymmetricEquilibrium, TwoVariableGame, VariableAssignment,
};

use crate::scenario::{CheckName, Model, Scenario, Tolerances};

pub type Game = dyn TwoVariableGame<f64>;

pub struct Setup {
    pub game: Box<Game>,
    pub scenario: Scenario,
    pub opts: EquilibriumOptions<f64>,
    pub exhaustive: bool,
}

impl Setup {
    pub fn new(scenario: Scenario, max_iter: Option<usize>, exhaustive: bool) -> Result<Self, GameError> {
        let base = OligopolyGame::new(scenario.oligopoly_params())?;
        let game: Box<Game> = match scenario.model {
            Model::Oligopoly => Box::new(base),
            Model::IdentityTest => Box::new(IdentityTransforms(base)),
        };
        let mut opts = EquilibriumOptions::with_tol(scenario.tolerances.solver);
        if let Some(cap) = max_iter {
            opts.max_iter = cap;
        }
        Ok(Self {
            game,
            scenario,
            opts,
            exhaustive,
        })
    }

    fn tol(&self) -> &Tolerances {
        &self.scenario.tolerances
    }

    fn candidate(&self) -> Result<SymmetricEquilibrium<f64>, GameError> {
        find_symmetric_fixed_point(&*self.game, &self.opts)
    }
}

/// Outcome of one check, before report assembly.
pub struct CheckOutcome {
    pub passed: bool,
    pub details: Value,
}

fn outcome(passed: bool, details: impl Serialize) -> CheckOutcome {
    CheckOutcome {
        passed,
        details: serde_json::to_value(details).expect("check details serialize"),
    }
}

pub fn run(setup: &Setup, check: CheckName) -> Result<CheckOutcome, GameError> {
    match check {
        CheckName::Assumption1 => assumption1(setup),
        CheckName::ClosedForms => closed_forms(setup),
        CheckName::Equivalence => equivalence(setup),
        CheckName::Lemma2 => chain(setup, true),
        CheckName::Lemma3 => chain(setup, false),
    }
}

#[derive(Serialize)]
struct CandidateView {
    t_star: f64,
    s_star: f64,
    payoff_at_eq: f64,
    iterations: usize,
    at_boundary: bool,
    multiple_fixed_points: bool,
}

impl From<&SymmetricEquilibrium<f64>> for CandidateView {
    fn from(eq: &SymmetricEquilibrium<f64>) -> Self {
        Self {
            t_star: eq.t_star,
            s_star: eq.s_star,
            payoff_at_eq: eq.payoff_at_eq,
            iterations: eq.iterations,
            at_boundary: eq.at_boundary,
            multiple_fixed_points: eq.multiple_fixed_points,
        }
    }
}

#[derive(Serialize)]
struct RegimeView {
    assignment: String,
    m: usize,
    equivalent: bool,
    max_deviation_gain: f64,
    max_profile_deviation: f64,
    resolved_profile: Vec<f64>,
    resolved_s: Vec<f64>,
    nash_profile: Option<Vec<f64>>,
    nash_s: Option<Vec<f64>>,
}

fn equivalence(setup: &Setup) -> Result<CheckOutcome, GameError> {
    let report = equivalence_report(&*setup.game, &setup.opts, setup.exhaustive)?;
    let regimes: Vec<RegimeView> = report
        .verdicts
        .iter()
        .map(|v| RegimeView {
            assignment: v.assignment.to_string(),
            m: v.m,
            equivalent: v.equivalent,
            max_deviation_gain: v.max_deviation_gain,
            max_profile_deviation: v.max_profile_deviation,
            resolved_profile: v.resolved_profile.to_vec(),
            resolved_s: v.resolved_s.clone(),
            nash_profile: v.nash.as_ref().map(|n| n.profile.to_vec()),
            nash_s: v.nash.as_ref().map(|n| n.s_profile.clone()),
        })
        .collect();

    #[derive(Serialize)]
    struct View {
        candidate: CandidateView,
        exhaustive: bool,
        regimes_equivalent: usize,
        regimes: Vec<RegimeView>,
    }
    let equivalent = regimes.iter().filter(|r| r.equivalent).count();
    Ok(outcome(
        report.all_equivalent(),
        View {
            candidate: (&report.candidate).into(),
            exhaustive: setup.exhaustive,
            regimes_equivalent: equivalent,
            regimes,
        },
    ))
}

fn chain(setup: &Setup, payoff_of_j: bool) -> Result<CheckOutcome, GameError> {
    let eq = setup.candidate()?;
    let n = setup.game.players();
    let point = MixedPoint::symmetric(VariableAssignment::all_t(n), eq.t_star, eq.s_star);
    let ctx = Context::new(point, 0, 1)?;
    let tol = setup.tol().solver;
    let report: ChainReport<f64> = if payoff_of_j {
        lemma2_chain(&*setup.game, &ctx, tol)?
    } else {
        lemma3_chain(&*setup.game, &ctx, tol)?
    };

    #[derive(Serialize)]
    struct View {
        i: usize,
        j: usize,
        fixed_at: f64,
        values: std::collections::BTreeMap<&'static str, f64>,
        max_abs_value: f64,
        max_gap: f64,
        s_domain: [f64; 2],
    }
    let bound = setup.tol().chain;
    Ok(outcome(
        report.max_abs_value() <= bound && report.max_gap <= bound,
        View {
            i: ctx.i(),
            j: ctx.j(),
            fixed_at: eq.t_star,
            values: report.labelled().collect(),
            max_abs_value: report.max_abs_value(),
            max_gap: report.max_gap,
            s_domain: [report.s_domain.lo(), report.s_domain.hi()],
        },
    ))
}

fn assumption1(setup: &Setup) -> Result<CheckOutcome, GameError> {
    let eq = setup.candidate()?;
    let n = setup.game.players();
    let assignment = VariableAssignment::first_m_use_t(n, n - 1);
    let offsets = default_probe_offsets(&setup.game.t_space());
    let report = check_assumption1(&*setup.game, &assignment, &eq, &offsets, setup.tol().solver)?;

    #[derive(Serialize)]
    struct View {
        assignment: String,
        moved: usize,
        t_player: usize,
        s_player: usize,
        probe_offsets: Vec<f64>,
        responses_t_player: Vec<f64>,
        responses_s_player: Vec<f64>,
        sign_agreement: Vec<bool>,
        argmin_t_player: f64,
        argmin_s_player: f64,
        argmin_gap: f64,
    }
    Ok(outcome(
        report.all_agree() && report.argmin_gap() <= setup.tol().argmin,
        View {
            assignment: assignment.to_string(),
            moved: report.i,
            t_player: report.k,
            s_player: report.l,
            argmin_gap: report.argmin_gap(),
            probe_offsets: report.probe_offsets,
            responses_t_player: report.responses_k,
            responses_s_player: report.responses_l,
            sign_agreement: report.sign_agreement,
            argmin_t_player: report.argmin_t_of_uk,
            argmin_s_player: report.argmin_t_of_ul,
        },
    ))
}

fn closed_forms(setup: &Setup) -> Result<CheckOutcome, GameError> {
    let params = setup.scenario.oligopoly_params();

    #[derive(Serialize)]
    struct CaseView {
        case: u8,
        assignment: String,
        p_b_numeric: f64,
        p_b_closed_form: f64,
        abs_error: f64,
    }
    let mut cases = Vec::with_capacity(MarketCase::ALL.len());
    for case in MarketCase::ALL {
        let assignment = case.assignment();
        let eq = solve_regime(&*setup.game, &assignment, &setup.opts)
            .map_err(|e| e.within(format!("market case {}", case.index())))?;
        let numeric = eq.s_profile[1];
        let closed = closed_form_pb(&params, case);
        cases.push(CaseView {
            case: case.index(),
            assignment: assignment.to_string(),
            p_b_numeric: numeric,
            p_b_closed_form: closed,
            abs_error: (numeric - closed).abs(),
        });
    }
    let mut min_spread = f64::INFINITY;
    for (k, a) in cases.iter().enumerate() {
        for b in &cases[k + 1..] {
            min_spread = min_spread.min((a.p_b_closed_form - b.p_b_closed_form).abs());
        }
    }
    let max_error = cases.iter().fold(0.0f64, |m, c| m.max(c.abs_error));

    #[derive(Serialize)]
    struct View {
        cases: Vec<CaseView>,
        max_abs_error: f64,
        /// Smallest gap between two closed-form prices; zero for equal costs.
        min_pairwise_spread: f64,
    }
    Ok(outcome(
        max_error <= setup.tol().closed_form,
        View {
            cases,
            max_abs_error: max_error,
            min_pairwise_spread: min_spread,
        },
    ))
}
