//! The JSON instance-file format and the machine-readable reports shared
//! by the CLI and the C API.
//!
//! An instance file is a single JSON object:
//!
//! ```json
//! {
//!   "weights": ["1", "2"],
//!   "valuations": [["20"], ["30"]],
//!   "allocation": [1],
//!   "payments": ["25/2", "-25/2"],
//!   "expected": { "P2": "20" }
//! }
//! ```
//!
//! Rationals are written as strings (`"a/b"` or `"a"`); integer JSON
//! literals are also accepted on input. Floating-point literals are
//! rejected outright — they cannot represent the exact values this library
//! computes. `allocation` lists the owning agent of each item (agents are
//! 0-indexed), and `allocation`, `payments`, and `expected` are optional.
//! Unknown fields are errors, so typos surface instead of being ignored.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::json;

use crate::model::{
    decimal_approx, parse_rational, Allocation, Instance, ModelError, PaymentVector, Rational,
    WefCheck,
};
use crate::optimize::{BoundRelation, BoundsReport, ObjectiveKind, Optimum, SearchOutcome};

/// A rational as it appears in a JSON document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalText(pub Rational);

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = RationalText;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer or a rational string like \"25/2\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
        Ok(RationalText(Rational::from_integer(BigInt::from(v))))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
        Ok(RationalText(Rational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
        Err(E::custom(format!(
            "floating-point value {} is not accepted; write an exact rational string like \"1/3\"",
            v
        )))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
        parse_rational(v).map(RationalText).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// The raw shape of an instance file, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub weights: Vec<RationalText>,
    pub valuations: Vec<Vec<RationalText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocation: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payments: Option<Vec<RationalText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<BTreeMap<String, RationalText>>,
}

/// A parsed and validated instance file.
#[derive(Debug, Clone)]
pub struct Document {
    pub instance: Instance,
    pub allocation: Option<Allocation>,
    pub payments: Option<PaymentVector>,
    /// Expected values keyed as in [`crate::fixtures::Expectation::key`];
    /// empty when the file has none.
    pub expected: BTreeMap<String, Rational>,
}

/// Errors from reading an instance file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IoError {
    /// Malformed JSON or a bad rational; includes line and column.
    Json(String),
    /// Structurally valid JSON describing an invalid instance.
    Model(ModelError),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Json(msg) => msg.fmt(f),
            IoError::Model(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for IoError {}

impl From<ModelError> for IoError {
    fn from(e: ModelError) -> Self {
        IoError::Model(e)
    }
}

fn unwrap_rationals(texts: Vec<RationalText>) -> Vec<Rational> {
    texts.into_iter().map(|t| t.0).collect()
}

impl Document {
    /// Builds a document from parts, validating that the optional
    /// allocation and payments fit the instance.
    pub fn new(
        instance: Instance,
        allocation: Option<Allocation>,
        payments: Option<PaymentVector>,
        expected: BTreeMap<String, Rational>,
    ) -> Result<Document, IoError> {
        if let Some(allocation) = &allocation {
            allocation.matches(&instance)?;
        }
        if let Some(payments) = &payments {
            if payments.len() != instance.num_agents() {
                return Err(IoError::Model(ModelError::AgentCountMismatch {
                    expected: instance.num_agents(),
                    got: payments.len(),
                }));
            }
        }
        Ok(Document { instance, allocation, payments, expected })
    }

    pub fn parse(text: &str) -> Result<Document, IoError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
        Document::from_file(file)
    }

    pub fn from_file(file: InstanceFile) -> Result<Document, IoError> {
        let instance = Instance::new(
            unwrap_rationals(file.weights),
            file.valuations.into_iter().map(unwrap_rationals).collect(),
        )?;
        let allocation = file
            .allocation
            .map(|owner| Allocation::new(owner, instance.num_agents()))
            .transpose()?;
        let payments = file.payments.map(|p| PaymentVector::new(unwrap_rationals(p)));
        let expected = file
            .expected
            .unwrap_or_default()
            .into_iter()
            .map(|(k, v)| (k, v.0))
            .collect();
        Document::new(instance, allocation, payments, expected)
    }

    pub fn to_file(&self) -> InstanceFile {
        let wrap = |values: &[Rational]| -> Vec<RationalText> {
            values.iter().cloned().map(RationalText).collect()
        };
        InstanceFile {
            weights: wrap(self.instance.weights()),
            valuations: (0..self.instance.num_agents())
                .map(|i| {
                    (0..self.instance.num_items())
                        .map(|o| RationalText(self.instance.value(i, o).clone()))
                        .collect()
                })
                .collect(),
            allocation: self.allocation.as_ref().map(|a| a.owners().to_vec()),
            payments: self.payments.as_ref().map(|p| wrap(p.amounts())),
            expected: if self.expected.is_empty() {
                None
            } else {
                Some(
                    self.expected
                        .iter()
                        .map(|(k, v)| (k.clone(), RationalText(v.clone())))
                        .collect(),
                )
            },
        }
    }

    /// Pretty-printed JSON with a trailing newline, suitable for writing
    /// straight to a file.
    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_file())
            .expect("instance files always serialize");
        text.push('\n');
        text
    }
}

fn rationals_json(values: &[Rational]) -> serde_json::Value {
    json!(values.iter().map(|v| v.to_string()).collect::<Vec<_>>())
}

/// Report for a WEF check: verdict, witness if envious, and the payment
/// classification.
pub fn check_report(check: &WefCheck, payments: &PaymentVector) -> serde_json::Value {
    let mut report = json!({
        "wef": check.is_wef(),
        "classification": payments.classify().to_string(),
    });
    if let Some(witness) = check.witness() {
        report["witness"] = json!({
            "envious": witness.envious,
            "envied": witness.envied,
            "deficit": witness.deficit.to_string(),
            "deficit_decimal": decimal_approx(&witness.deficit),
        });
    }
    report
}

/// Report for a payment vector on its own (e.g. the minimal subsidy).
pub fn payments_report(payments: &PaymentVector) -> serde_json::Value {
    json!({
        "payments": rationals_json(payments.amounts()),
        "total": payments.total().to_string(),
        "classification": payments.classify().to_string(),
    })
}

/// Report for a per-allocation optimum.
pub fn opt_report(objective: ObjectiveKind, optimum: &Optimum) -> serde_json::Value {
    json!({
        "objective": objective.name(),
        "optimum": optimum.value.to_string(),
        "optimum_decimal": decimal_approx(&optimum.value),
        "payments": rationals_json(optimum.payments.amounts()),
        "classification": optimum.payments.classify().to_string(),
    })
}

/// Report for an exhaustive search: the optimum plus the allocation.
pub fn search_report(objective: ObjectiveKind, outcome: &SearchOutcome) -> serde_json::Value {
    let mut report = opt_report(objective, &outcome.optimum);
    report["allocation"] = json!(outcome.allocation.owners());
    report
}

/// Report for a payment transform. `total_subsidy` accompanies the
/// balanced-to-subsidy direction, which also reports its total.
pub fn transform_report(
    kind: &str,
    payments: &PaymentVector,
    total_subsidy: Option<&Rational>,
) -> serde_json::Value {
    let mut report = json!({
        "transform": kind,
        "payments": rationals_json(payments.amounts()),
        "classification": payments.classify().to_string(),
    });
    if let Some(total) = total_subsidy {
        report["total_subsidy"] = json!(total.to_string());
    }
    report
}

/// Report for the provable-bound rows.
pub fn bounds_report(report: &BoundsReport) -> serde_json::Value {
    json!({
        "rows": report
            .rows
            .iter()
            .map(|row| {
                json!({
                    "name": row.name,
                    "relation": match row.relation {
                        BoundRelation::AtMost => "<=",
                        BoundRelation::Equal => "==",
                    },
                    "lhs": row.lhs.to_string(),
                    "rhs": row.rhs.to_string(),
                    "lhs_decimal": decimal_approx(&row.lhs),
                    "rhs_decimal": decimal_approx(&row.rhs),
                    "holds": row.holds(),
                    "tight": row.tight(),
                })
            })
            .collect::<Vec<_>>(),
        "all_hold": report.all_hold(),
    })
}
