//! Scenario files: which game to build, which checks to run, how strictly.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use zsdv_core::OligopolyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    #[serde(rename = "assumption1")]
    Assumption1,
    ClosedForms,
    Equivalence,
    Lemma2,
    Lemma3,
}

impl CheckName {
    pub const ALL: [CheckName; 5] = [
        CheckName::Assumption1,
        CheckName::ClosedForms,
        CheckName::Equivalence,
        CheckName::Lemma2,
        CheckName::Lemma3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Assumption1 => "assumption1",
            CheckName::ClosedForms => "closed-forms",
            CheckName::Equivalence => "equivalence",
            CheckName::Lemma2 => "lemma2",
            CheckName::Lemma3 => "lemma3",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == name)
    }

    /// The result each check verifies.
    pub fn provenance(self) -> &'static str {
        match self {
            CheckName::Assumption1 => {
                "response-comparison assumption: a t-player and an s-player react alike to a move of another t-player"
            }
            CheckName::ClosedForms => "closed-form equilibrium prices of firm B in the four output/price regimes",
            CheckName::Equivalence => {
                "regime-equivalence theorem: the symmetric equilibrium is a Nash equilibrium under every variable assignment"
            }
            CheckName::Lemma2 => "minimax chain for player j's payoff: t_j and s_j give the same max-min and min-max",
            CheckName::Lemma3 => "minimax chain for player i's payoff: t_j and s_j give the same min-max and max-min",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Oligopoly,
    /// The oligopoly payoffs with `s = t`: both variables coincide, so every
    /// check must pass trivially.
    IdentityTest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub a: f64,
    pub b: f64,
    pub costs: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Optimizer and fixed-point tolerance.
    pub solver: f64,
    /// Bound on chain values and gaps.
    pub chain: f64,
    /// Bound on the distance between the two payoff minimizers.
    pub argmin: f64,
    /// Bound on |numeric - closed form| for equilibrium prices.
    pub closed_form: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solver: 1e-7,
            chain: 2e-5,
            argmin: 1e-5,
            closed_form: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: Model,
    pub params: Params,
    /// Defaults to every check the model supports.
    #[serde(default)]
    pub checks: Option<Vec<CheckName>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub format: Option<Format>,
}

/// A scenario file that could not be read, parsed or validated.
#[derive(Debug)]
pub struct ScenarioError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "field `{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ScenarioError {}

fn bad(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError {
        field: field.to_string(),
        message: message.into(),
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad("", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let field = if field == "." { String::new() } else { field };
            bad(&field, e.into_inner().to_string())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let p = &self.params;
        if !p.a.is_finite() {
            return Err(bad("params.a", "must be finite"));
        }
        if !(p.b > 0.0 && p.b < 1.0) {
            return Err(bad("params.b", format!("must satisfy 0 < b < 1, got {}", p.b)));
        }
        for (k, c) in p.costs.iter().enumerate() {
            if !(c.is_finite() && *c >= 0.0) {
                return Err(bad(&format!("params.costs[{k}]"), format!("must be finite and non-negative, got {c}")));
            }
            if p.a <= *c {
                return Err(bad("params.a", format!("must exceed every cost, got a = {} and cost {c}", p.a)));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.solver", t.solver),
            ("tolerances.chain", t.chain),
            ("tolerances.argmin", t.argmin),
            ("tolerances.closed_form", t.closed_form),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(name, format!("must be positive, got {v}")));
            }
        }
        if self.model == Model::IdentityTest && self.checks.iter().flatten().any(|c| *c == CheckName::ClosedForms) {
            return Err(bad("checks", "closed-forms needs the oligopoly model"));
        }
        if self.checks.as_ref().is_some_and(|c| c.is_empty()) {
            return Err(bad("checks", "list at least one check or omit the field"));
        }
        Ok(())
    }

    pub fn oligopoly_params(&self) -> OligopolyParams<f64> {
        let p = self.params;
        OligopolyParams::new(p.a, p.b, p.costs).expect("validated on load")
    }

    /// Requested checks, deduplicated and ordered by name.
    pub fn selected_checks(&self) -> BTreeSet<CheckName> {
        match &self.checks {
            Some(list) => list.iter().copied().collect(),
            None => CheckName::ALL
                .into_iter()
                .filter(|c| self.model == Model::Oligopoly || *c != CheckName::ClosedForms)
                .collect(),
        }
    }
}
