use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::earth::EarthModel;
use crate::error::{Error, Result};
use crate::tqfilter::SolverConfig;
use crate::trajectory::ScenarioParams;

/// Mechanizations the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Chebyshev functional-iterative trident filter.
    Tq,
    TwoSample,
    /// Traditional equations integrated by RK4 on the analytic rates.
    Rk4,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Tq, Algorithm::TwoSample, Algorithm::Rk4];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Tq => "tq",
            Algorithm::TwoSample => "twosample",
            Algorithm::Rk4 => "rk4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown algorithm '{s}' (expected tq, twosample or rk4)"
                ))
            })
    }

    /// Parses a comma-separated list such as `tq,twosample`.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let mut out: Vec<Self> = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(Self::parse)
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub algos: Vec<Algorithm>,
    /// Output directory for the per-algorithm CSV files.
    pub out: PathBuf,
    /// Keep every `decimate`-th error record.
    pub decimate: usize,
    /// Step of the RK4 reference, s.
    pub rk4_step: f64,
    /// Optional increment file used instead of synthesized data.
    pub imu: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            algos: Algorithm::ALL.to_vec(),
            out: PathBuf::from("out"),
            decimate: 1,
            rk4_step: 1e-3,
            imu: None,
        }
    }
}

/// Everything a run needs; serialized as TOML with `[scenario]`,
/// `[solver]`, `[earth]` and `[run]` tables.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioParams,
    pub solver: SolverConfig,
    pub earth: EarthModel,
    pub run: RunSection,
}

impl RunConfig {
    /// The 200 s coning flight with the reference solver settings.
    pub fn reference() -> Self {
        Self::default()
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper-vi" => Ok(Self::reference()),
            _ => Err(Error::InvalidConfig(format!(
                "unknown preset '{name}' (available: paper-vi)"
            ))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.solver.validate()?;
        self.earth.validate()?;
        let run = &self.run;
        if run.algos.is_empty() {
            return Err(Error::InvalidConfig("select at least one algorithm".into()));
        }
        if run.decimate == 0 {
            return Err(Error::InvalidConfig("decimate must be at least 1".into()));
        }
        if !(run.rk4_step > 0.0) || !run.rk4_step.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "rk4_step must be positive, got {}",
                run.rk4_step
            )));
        }
        if run.algos.contains(&Algorithm::TwoSample)
            && !self.solver.window_samples.is_multiple_of(2)
        {
            return Err(Error::InvalidConfig(
                "the two-sample run reports at window boundaries, which needs an even window_samples".into(),
            ));
        }
        Ok(())
    }
}
