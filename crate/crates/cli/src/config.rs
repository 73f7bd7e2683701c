//! Instance configuration files.

use serde::{Deserialize, Serialize};

use monadforge_core::certify::CertifyOptions;
use monadforge_core::monad::{build_monad, LineBundleSum, MonadDescriptor, Profile};
use monadforge_core::oracle::OracleOptions;
use monadforge_core::picard::{Polarization, SpaceSpec, Twist};
use monadforge_core::DEFAULT_PRIME;

use crate::CliError;

/// One summand of an override: `O(twist)^multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumPart {
    pub twist: Vec<i64>,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Vec<SumPart>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub middle: Option<Vec<SumPart>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<SumPart>>,
}

impl Overrides {
    fn is_empty(&self) -> bool {
        self.source.is_none() && self.middle.is_none() && self.target.is_none()
    }
}

fn default_prime() -> u64 {
    DEFAULT_PRIME
}

fn default_trials() -> u64 {
    100
}

fn default_budget() -> usize {
    OracleOptions::default().budget
}

/// A single monad instance plus the knobs of its certification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub s: usize,
    pub n: Vec<u32>,
    pub alpha: Vec<u32>,
    pub k: u32,
    /// Defaults to `homogeneous` when `s = 1` and `paper` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(default, skip_serializing_if = "Overrides::is_empty")]
    pub overrides: Overrides,
    /// Per-group exponent offsets; only zeros are supported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_i: Option<Vec<i64>>,
    #[serde(default = "default_prime")]
    pub prime: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_q: Option<u64>,
}

fn invalid(field: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        msg: msg.into(),
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl InstanceConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Err(invalid("config", "file is empty"));
        }
        let cfg: Self = serde_json::from_str(text).map_err(|e| invalid("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn profile(&self) -> Profile {
        self.profile
            .unwrap_or(if self.s == 1 { Profile::Homogeneous } else { Profile::Paper })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.s == 0 {
            return Err(invalid("s", "must be at least 1"));
        }
        if self.n.len() != self.s {
            return Err(invalid("n", format!("has {} entries but s = {}", self.n.len(), self.s)));
        }
        if self.alpha.len() != self.s {
            return Err(invalid(
                "alpha",
                format!("has {} entries but s = {}", self.alpha.len(), self.s),
            ));
        }
        if let Some(i) = self.n.iter().position(|&x| x == 0) {
            return Err(invalid("n", format!("entry {i} is 0; dimensions start at 1")));
        }
        if let Some(i) = self.alpha.iter().position(|&x| x == 0) {
            return Err(invalid("alpha", format!("entry {i} is 0; the polarization must be ample")));
        }
        if self.k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        if self.profile() == Profile::Homogeneous && self.s != 1 {
            return Err(invalid("profile", "homogeneous twists exist only for s = 1"));
        }
        if let Some(a) = &self.a_i {
            if a.len() != self.s {
                return Err(invalid("a_i", format!("has {} entries but s = {}", a.len(), self.s)));
            }
            if a.iter().any(|&x| x != 0) {
                return Err(invalid("a_i", "only zero offsets give homogeneous maps"));
            }
        }
        if !is_prime(self.prime) || self.prime < 3 {
            return Err(invalid("prime", format!("{} is not an odd prime", self.prime)));
        }
        if self.prime > u64::from(u32::MAX) {
            return Err(invalid("prime", "must fit in 32 bits"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.budget == 0 {
            return Err(invalid("budget", "must be at least 1"));
        }
        if self.max_q == Some(0) {
            return Err(invalid("max_q", "must be at least 1"));
        }
        let slots = 2 * self.s;
        for (name, parts) in [
            ("overrides.source", &self.overrides.source),
            ("overrides.middle", &self.overrides.middle),
            ("overrides.target", &self.overrides.target),
        ] {
            for p in parts.iter().flatten() {
                if p.twist.len() != slots {
                    return Err(invalid(name, format!("twist {:?} needs {slots} entries", p.twist)));
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> SpaceSpec {
        SpaceSpec::new(self.n.clone()).expect("validated")
    }

    pub fn polarization(&self) -> Polarization {
        Polarization::new(self.alpha.clone()).expect("validated")
    }

    pub fn options(&self) -> CertifyOptions {
        CertifyOptions {
            oracle: OracleOptions {
                budget: self.budget,
                exact_limit: OracleOptions::default().exact_limit.min(self.budget),
                prime: self.prime,
            },
            max_q: self.max_q,
            trials: self.trials,
            seed: self.seed,
        }
    }

    /// Builds the descriptor, applying overrides.
    pub fn descriptor(&self) -> Result<MonadDescriptor, CliError> {
        let md = build_monad(&self.space(), &self.polarization(), self.k, self.profile())?;
        let sum = |parts: &Option<Vec<SumPart>>| {
            parts.as_ref().map(|ps| {
                LineBundleSum::from_parts(
                    2 * self.s,
                    ps.iter().map(|p| (Twist::new(p.twist.clone()), p.multiplicity)).collect(),
                )
            })
        };
        let o = &self.overrides;
        md.with_sums(sum(&o.source), sum(&o.middle), sum(&o.target))
            .map_err(|e| invalid("overrides", e.to_string()))
    }
}
