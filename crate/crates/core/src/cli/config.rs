use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::bath::{BathGrid, BathSpec};
use crate::error::{FinbathError, Result};
use crate::system::{DiagonalState, Endpoint, SystemSpec, Transition};

/// Deviation of `Σ P` from one above which probabilities are renormalized
/// with a warning.
pub const RENORMALIZE_WARN: f64 = 1e-12;

/// Deviation of `Σ P` from one above which a config is rejected.
pub const RENORMALIZE_MAX: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HeatCapacity {
    Finite(f64),
    Named(InfiniteTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfiniteTag {
    #[serde(rename = "inf")]
    Inf,
}

impl HeatCapacity {
    pub fn value(self) -> f64 {
        match self {
            HeatCapacity::Finite(c) => c,
            HeatCapacity::Named(InfiniteTag::Inf) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub energies: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub levels: usize,
    /// Half-width in units of the bath standard deviation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_sigmas: Option<f64>,
    /// Half-width in energy units; required for an infinite bath.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    C,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "E_tot")]
    ETot,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Bound,
    Optimize,
    Detwork,
    Epsilon,
    Curve,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Bound => "bound",
            CommandName::Optimize => "optimize",
            CommandName::Detwork => "detwork",
            CommandName::Epsilon => "epsilon",
            CommandName::Curve => "curve",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Command evaluated at each point. Defaults: `optimize` for `C` and
    /// `N`, `detwork` for `epsilon`, `curve` for `E_tot`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
}

impl SweepConfig {
    pub fn command(&self) -> CommandName {
        self.command.unwrap_or(match self.parameter {
            SweepParameter::C | SweepParameter::N => CommandName::Optimize,
            SweepParameter::Epsilon => CommandName::Detwork,
            SweepParameter::ETot => CommandName::Curve,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionChoice {
    Extract,
    Form,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Energies {
    One(f64),
    Many(Vec<f64>),
}

impl Energies {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Energies::One(e) => vec![*e],
            Energies::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub beta: f64,
    pub heat_capacity: HeatCapacity,
    pub system: LevelConfig,
    #[serde(default, rename = "final", skip_serializing_if = "Option::is_none")]
    pub final_state: Option<LevelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_prime: Option<f64>,
    /// Window half-width for the `epsilon` command when `epsilon` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_star: Option<f64>,
    /// Total energies for the `curve` command; defaults to `0`.
    #[serde(default, rename = "E_tot", skip_serializing_if = "Option::is_none")]
    pub e_tot: Option<Energies>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionChoice>,
    /// Energies checked by the convertibility scan of `detwork`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_checks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<(Self, Vec<String>)> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| FinbathError::Argument(format!("config: {e}")))?;
        let warnings = cfg.normalize()?;
        Ok((cfg, warnings))
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<String>)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FinbathError::Argument(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks scalar ranges and renormalizes probabilities.
    fn normalize(&mut self) -> Result<Vec<String>> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(FinbathError::Argument(format!("config field `beta`: must be positive, got {}", self.beta)));
        }
        let c = self.heat_capacity.value();
        if !(c > 0.0) {
            return Err(FinbathError::Argument(format!("config field `heat_capacity`: must be positive or \"inf\", got {c}")));
        }
        let mut warnings = Vec::new();
        normalize_levels(&mut self.system, "system", &mut warnings)?;
        if let Some(f) = self.final_state.as_mut() {
            normalize_levels(f, "final", &mut warnings)?;
        }
        for w in &warnings {
            warn!("{w}");
        }
        Ok(warnings)
    }

    pub fn bath(&self) -> Result<BathSpec> {
        BathSpec::new(self.beta, self.heat_capacity.value())
    }

    pub fn initial(&self) -> Result<Endpoint> {
        endpoint(&self.system)
    }

    pub fn transition(&self) -> Result<Transition> {
        let f = self
            .final_state
            .as_ref()
            .ok_or_else(|| FinbathError::Argument("config field `final` is required for this command".into()))?;
        Ok(Transition::new(self.initial()?, endpoint(f)?))
    }

    pub fn bath_grid(&self) -> Result<BathGrid> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| FinbathError::Argument("config field `grid` is required for this command".into()))?;
        let bath = self.bath()?;
        match (g.half_width, g.span_sigmas) {
            (Some(h), _) => BathGrid::window(&bath, g.levels, h),
            (None, Some(k)) if !bath.is_infinite() => BathGrid::discretize(&bath, g.levels, k),
            (None, Some(_)) => Err(FinbathError::Argument(
                "config field `grid.half_width` is required when heat_capacity is \"inf\"".into(),
            )),
            (None, None) => Err(FinbathError::Argument(
                "config field `grid` needs `span_sigmas` or `half_width`".into(),
            )),
        }
    }

    pub fn require_epsilon(&self) -> Result<f64> {
        self.epsilon
            .ok_or_else(|| FinbathError::Argument("config field `epsilon` is required for this command".into()))
    }
}

fn normalize_levels(levels: &mut LevelConfig, field: &str, warnings: &mut Vec<String>) -> Result<()> {
    if levels.energies.len() != levels.probs.len() {
        return Err(FinbathError::Argument(format!(
            "config field `{field}`: {} energies but {} probabilities",
            levels.energies.len(),
            levels.probs.len()
        )));
    }
    if levels.probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(FinbathError::Argument(format!("config field `{field}.probs`: entries must be finite and non-negative")));
    }
    let total: f64 = levels.probs.iter().sum();
    let dev = (total - 1.0).abs();
    if dev > RENORMALIZE_MAX {
        return Err(FinbathError::Argument(format!(
            "config field `{field}.probs`: sums to {total}, more than {RENORMALIZE_MAX:e} from 1"
        )));
    }
    if dev > RENORMALIZE_WARN {
        warnings.push(format!("`{field}.probs` summed to {total}; renormalized"));
    }
    if dev > 0.0 {
        levels.probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(())
}

fn endpoint(levels: &LevelConfig) -> Result<Endpoint> {
    Endpoint::new(
        SystemSpec::new(levels.energies.clone())?,
        DiagonalState::normalized(levels.probs.clone())?,
    )
}
