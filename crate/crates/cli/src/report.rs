//! Report assembly and serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::scenario::{Model, Params, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not finish; see `error`.
    Error,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub status: Status,
    pub provenance: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub model: Model,
    pub params: Params,
    pub tolerances: Tolerances,
    pub max_iter: usize,
    pub exhaustive_regimes: bool,
    pub passed: bool,
    pub checks: BTreeMap<&'static str, CheckReport>,
}

impl Report {
    pub fn failing(&self, status: Status) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|(_, c)| c.status == status)
            .map(|(name, _)| *name)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits::default());
        self.serialize(&mut ser).expect("report serializes");
        out.push(b'\n');
        String::from_utf8(out).expect("serde_json writes UTF-8")
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model {:?}  a = {}  b = {}  costs = ({}, {}, {})",
            self.model, p.a, p.b, p.costs[0], p.costs[1], p.costs[2]
        );
        let width = self.checks.keys().map(|k| k.len()).max().unwrap_or(5).max(5);
        let _ = writeln!(out, "{:<width$}  {:<6}  verifies", "check", "status");
        for (name, check) in &self.checks {
            let _ = writeln!(out, "{name:<width$}  {:<6}  {}", check.status.label(), check.provenance);
            if let Some(err) = &check.error {
                let _ = writeln!(out, "{:<width$}  {:<6}  error: {err}", "", "");
            }
            for line in highlights(name, &check.details) {
                let _ = writeln!(out, "{:<width$}  {:<6}  {line}", "", "");
            }
        }
        let _ = writeln!(out, "overall: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

fn num(v: &Value) -> String {
    v.as_f64().map_or_else(|| v.to_string(), |x| format!("{x:.6e}"))
}

/// The few numbers worth a glance in the text table.
fn highlights(name: &str, d: &Value) -> Vec<String> {
    if d.is_null() {
        return Vec::new();
    }
    match name {
        "equivalence" => {
            let mut lines = vec![format!(
                "t* = {}  s* = {}  regimes equivalent: {}/{}",
                num(&d["candidate"]["t_star"]),
                num(&d["candidate"]["s_star"]),
                d["regimes_equivalent"],
                d["regimes"].as_array().map_or(0, Vec::len)
            )];
            for r in d["regimes"].as_array().into_iter().flatten() {
                lines.push(format!(
                    "{}  gain {}  nash s {}",
                    r["assignment"].as_str().unwrap_or("?"),
                    num(&r["max_deviation_gain"]),
                    r["nash_s"].as_array().map_or_else(String::new, |s| s.iter().map(num).collect::<Vec<_>>().join(", "))
                ));
            }
            lines
        }
        "lemma2" | "lemma3" => vec![format!("max |value| {}  max gap {}", num(&d["max_abs_value"]), num(&d["max_gap"]))],
        "assumption1" => vec![format!(
            "signs agree {}/{}  argmin gap {}",
            d["sign_agreement"].as_array().map_or(0, |a| a.iter().filter(|v| v.as_bool() == Some(true)).count()),
            d["sign_agreement"].as_array().map_or(0, Vec::len),
            num(&d["argmin_gap"])
        )],
        "closed-forms" => d["cases"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|c| {
                format!(
                    "case {} ({})  p_B {}  closed form {}",
                    c["case"],
                    c["assignment"].as_str().unwrap_or("?"),
                    num(&c["p_b_numeric"]),
                    num(&c["p_b_closed_form"])
                )
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Pretty JSON with every float written to 17 significant digits.
#[derive(Default)]
pub struct SignificantDigits {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}
