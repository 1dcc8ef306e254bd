//! Experiment configuration shared by the command line and config files.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::advantage::AdvantageMethod;
use crate::basis::SignalScale;
use crate::bounds::{AuditSuite, DESK_SLACK};
use crate::error::{invalid, Error, Result};
use crate::models::{ModelParams, RemovalPolicy};
use crate::reduction::{DetectionThresholds, EstimatorKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Adv,
    Hidden,
    Xi,
    DualCheck,
    BoundsAudit,
    Reduce,
    Otter,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Er,
    Sbm,
    CorrEr,
    CorrSbm,
    ModSbm,
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "er" => Ok(ModelKind::Er),
            "sbm" => Ok(ModelKind::Sbm),
            "corr-er" => Ok(ModelKind::CorrEr),
            "corr-sbm" => Ok(ModelKind::CorrSbm),
            "mod-sbm" => Ok(ModelKind::ModSbm),
            other => Err(Error::Parse(format!("unknown model {other}"))),
        }
    }
}

/// Options that only some commands read.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodFlags {
    /// Rational arithmetic instead of floating point.
    #[serde(default)]
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<AdvantageMethod>,
    /// A condition `pi(i)=j` on the hidden permutation, 1-based as written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    #[serde(default)]
    pub scale: SignalScale,
    #[serde(default)]
    pub removal: RemovalPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<AuditSuite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_mix: Option<f64>,
    /// Rejection level of the reduction test is `c/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Number of coordinates of a hidden-sample problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// File describing the base measures of a hidden-sample problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_spec: Option<PathBuf>,
    /// Degree for commands that take no model parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Largest tree order for the Otter estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
}

fn default_trials() -> u64 {
    1
}

fn default_slack() -> f64 {
    DESK_SLACK
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
    #[serde(default)]
    pub flags: MethodFlags,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Replaces the desk-scale factor 2 in bound audits.
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default)]
    pub thresholds: DetectionThresholds,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            model: None,
            params: None,
            flags: MethodFlags::default(),
            trials: default_trials(),
            seed: 0,
            output: None,
            slack: default_slack(),
            thresholds: DetectionThresholds::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Parse("config file is empty".into()));
        }
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn params(&self) -> Result<&ModelParams> {
        self.params
            .as_ref()
            .ok_or_else(|| invalid("params", "required but not set"))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.params {
            p.validate()?;
        }
        if !(self.slack.is_finite() && self.slack >= 1.0) {
            return Err(invalid("slack", format!("{} must be a finite number ≥ 1", self.slack)));
        }
        let t = self.thresholds;
        if !(0.0..=1.0).contains(&t.near_one) || !(0.0..=1.0).contains(&t.bounded_below) {
            return Err(invalid("thresholds", "rates must lie in [0,1]"));
        }
        let needs_params = !matches!(self.command, Command::Otter | Command::Verify | Command::Hidden);
        if needs_params && self.params.is_none() {
            return Err(invalid("params", format!("required by {:?}", self.command)));
        }
        if matches!(self.command, Command::Sample | Command::Adv) && self.model.is_none() {
            return Err(invalid("model", format!("required by {:?}", self.command)));
        }
        if matches!(self.command, Command::Sample | Command::Reduce) && self.trials == 0 {
            return Err(invalid("trials", "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Number;

    fn sample_config() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(Command::Adv);
        c.model = Some(ModelKind::CorrEr);
        c.params = Some(
            ModelParams::correlated_er_q_rho(3, Number::ratio(1, 3), Number::ratio(1, 2))
                .unwrap()
                .with_degree(3)
                .unwrap(),
        );
        c.flags.exact = true;
        c.flags.method = Some(AdvantageMethod::GramSchmidt);
        c.flags.condition = Some("pi(1)=1".into());
        c.seed = 7;
        c
    }

    #[test]
    fn round_trip() {
        let c = sample_config();
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), c.to_json());
    }

    #[test]
    fn rejects_unknown_and_empty() {
        assert!(ExperimentConfig::from_json("").is_err());
        assert!(ExperimentConfig::from_json("   \n").is_err());
        assert!(ExperimentConfig::from_json(r#"{"command":"otter","bogus":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command":"otter","flags":{"bogus":1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command":"xi"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command":"otter"}"#).is_ok());
    }
}
