use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Outcome of a claim or of a single evidence step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Inconclusive,
    Falsified,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Inconclusive => "inconclusive",
            Status::Falsified => "falsified",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One audited step. Steps with `required = false` are reported but do not
/// affect the certificate status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceStep {
    pub id: String,
    pub statement: String,
    pub rule: String,
    pub required: bool,
    pub status: Status,
    pub inputs: Map<String, Value>,
    pub values: Map<String, Value>,
}

impl EvidenceStep {
    pub fn new(id: impl Into<String>, statement: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            statement: statement.into(),
            rule: rule.into(),
            required: true,
            status: Status::Verified,
            inputs: Map::new(),
            values: Map::new(),
        }
    }

    pub fn informational(mut self) -> Self {
        self.required = false;
        self
    }

    pub fn status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    /// Verified when `ok`, otherwise `on_fail`.
    pub fn check(self, ok: bool, on_fail: Status) -> Self {
        self.status(if ok { Status::Verified } else { on_fail })
    }

    pub fn input(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), v.into());
        self
    }

    pub fn value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.insert(key.to_string(), v.into());
        self
    }
}

/// A claim with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: String,
    pub statement: String,
    pub status: Status,
    pub instance: Value,
    pub steps: Vec<EvidenceStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Certificate {
    pub fn new(claim: &str, statement: &str, instance: Value, steps: Vec<EvidenceStep>, witness: Option<Value>) -> Self {
        Self {
            claim: claim.to_string(),
            statement: statement.to_string(),
            status: aggregate(&steps),
            instance,
            steps,
            witness,
        }
    }

    pub fn step(&self, id: &str) -> Option<&EvidenceStep> {
        self.steps.iter().find(|s| s.id == id)
    }
}

/// Any required falsified step falsifies; all required verified verifies.
pub fn aggregate(steps: &[EvidenceStep]) -> Status {
    steps
        .iter()
        .filter(|s| s.required)
        .map(|s| s.status)
        .max()
        .unwrap_or(Status::Inconclusive)
}

const SAFE: u64 = 1 << 53;

/// Integers beyond `2^53` become decimal strings.
pub fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if v.unsigned_abs() <= SAFE => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn uint_json(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(v) if v <= SAFE => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

/// Rationals are always strings, `p/q` or `p`.
pub fn rat_json(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

pub fn twist_json(t: &crate::picard::Twist) -> Value {
    Value::from(t.components().to_vec())
}
