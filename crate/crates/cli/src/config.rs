use std::path::Path;

use fano_core::oracle::OracleControls;
use fano_core::ModelParams;
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum Axis {
    #[serde(rename = "omega_L")]
    OmegaL,
    Omega,
    #[serde(rename = "Gamma_c")]
    GammaC,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::OmegaL => "omega_L",
            Axis::Omega => "Omega",
            Axis::GammaC => "Gamma_c",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "omega_L" => Ok(Axis::OmegaL),
            "Omega" => Ok(Axis::Omega),
            "Gamma_c" => Ok(Axis::GammaC),
            _ => Err(CliError::Config(format!("unknown sweep axis `{s}` (omega_L, Omega or Gamma_c)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }

    fn check(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::Config(format!("sweep count must be ≥ 2 (got {})", self.count)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(CliError::Config(format!("sweep needs start < stop (got {} .. {})", self.start, self.stop)));
        }
        Ok(())
    }
}

/// Oracle settings as written in a config file: `"auto"`, `"none"`, or an
/// object with `N`, `W` and optionally `rel_tol`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OracleSetting {
    Named(OracleName),
    Grid {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "W")]
        w: f64,
    },
    Converge {
        rel_tol: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleName {
    Auto,
    None,
}

/// How the oracle column is produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleMode {
    Off,
    Controls(OracleControls),
    Converge(f64),
}

impl OracleSetting {
    pub fn parse_flag(s: &str) -> Result<Self, CliError> {
        match s {
            "auto" => return Ok(OracleSetting::Named(OracleName::Auto)),
            "none" => return Ok(OracleSetting::Named(OracleName::None)),
            _ => {}
        }
        if let Some(t) = s.strip_prefix("tol=") {
            let rel_tol = t.parse().map_err(|_| CliError::Config(format!("bad oracle tolerance `{t}`")))?;
            return Ok(OracleSetting::Converge { rel_tol });
        }
        let (n, w) = s
            .split_once(',')
            .ok_or_else(|| CliError::Config(format!("--oracle expects auto, none, tol=X or N,W (got `{s}`)")))?;
        let n = n.trim().parse().map_err(|_| CliError::Config(format!("bad oracle grid size `{n}`")))?;
        let w = w.trim().parse().map_err(|_| CliError::Config(format!("bad oracle half-width `{w}`")))?;
        Ok(OracleSetting::Grid { n, w })
    }

    pub fn mode(self) -> Result<OracleMode, CliError> {
        Ok(match self {
            OracleSetting::Named(OracleName::Auto) => OracleMode::Controls(OracleControls::Auto),
            OracleSetting::Named(OracleName::None) => OracleMode::Off,
            OracleSetting::Grid { n, w } => OracleMode::Controls(OracleControls::Fixed { n, half_width: w }),
            OracleSetting::Converge { rel_tol } => {
                if !(rel_tol > 1e-8 && rel_tol <= 0.1) {
                    return Err(CliError::Config(format!("oracle rel_tol must lie in (1e-8, 0.1] (got {rel_tol})")));
                }
                OracleMode::Converge(rel_tol)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EitConfig {
    #[serde(default = "zero_list")]
    pub epsilon: Vec<f64>,
    #[serde(rename = "Gamma_e", default = "zero_list")]
    pub gamma_e: Vec<f64>,
}

fn zero_list() -> Vec<f64> {
    vec![0.0]
}

impl Default for EitConfig {
    fn default() -> Self {
        Self { epsilon: zero_list(), gamma_e: zero_list() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelParams,
    pub sweep: Option<Sweep>,
    pub oracle: Option<OracleSetting>,
    #[serde(default)]
    pub eit: EitConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Applies one `key=value` override. Model fields use their config names;
    /// sweep fields are `sweep.axis`, `sweep.start`, `sweep.stop`,
    /// `sweep.count`; lists are comma separated (`eit.epsilon=0,5,10`).
    pub fn apply(&mut self, assignment: &str, default_sweep: Sweep) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value (got `{assignment}`)")))?;
        let (key, value) = (key.trim(), value.trim());
        let number = |v: &str| -> Result<f64, CliError> {
            v.parse::<f64>().map_err(|_| CliError::Config(format!("`{key}` needs a number (got `{v}`)")))
        };
        let list = |v: &str| -> Result<Vec<f64>, CliError> { v.split(',').map(|x| number(x.trim())).collect() };
        match key {
            "sweep.axis" => self.sweep.get_or_insert(default_sweep).axis = Axis::parse(value)?,
            "sweep.start" => self.sweep.get_or_insert(default_sweep).start = number(value)?,
            "sweep.stop" => self.sweep.get_or_insert(default_sweep).stop = number(value)?,
            "sweep.count" => {
                self.sweep.get_or_insert(default_sweep).count =
                    value.parse().map_err(|_| CliError::Config(format!("`sweep.count` needs an integer (got `{value}`)")))?
            }
            "eit.epsilon" => self.eit.epsilon = list(value)?,
            "eit.Gamma_e" => self.eit.gamma_e = list(value)?,
            _ => self.model.set(key, number(value)?).map_err(CliError::Config)?,
        }
        Ok(())
    }

    /// Sweep for a command that only accepts `axis`, falling back to `default`.
    pub fn sweep_for(&self, axis: Axis, default: Sweep) -> Result<Sweep, CliError> {
        let s = self.sweep.unwrap_or(default);
        if s.axis != axis {
            return Err(CliError::Config(format!("this command sweeps {} (config asks for {})", axis.name(), s.axis.name())));
        }
        s.check()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: Sweep = Sweep { axis: Axis::OmegaL, start: 0.0, stop: 1.0, count: 3 };

    #[test]
    fn parses_full_config() {
        let c: RunConfig = serde_json::from_str(
            r#"{"model": {"q": 15, "Omega": 1, "Gamma_c": 1, "Gamma_e": 0, "gamma_eg": 0, "omega_e": 10},
                "sweep": {"axis": "Omega", "start": 0, "stop": 3, "count": 31},
                "oracle": {"N": 401, "W": 40},
                "eit": {"epsilon": [0, 5], "Gamma_e": [0, 0.1]}}"#,
        )
        .unwrap();
        assert_eq!(c.model.q, 15.0);
        assert_eq!(c.sweep.unwrap().axis, Axis::Omega);
        assert_eq!(c.oracle, Some(OracleSetting::Grid { n: 401, w: 40.0 }));
        assert_eq!(c.eit.gamma_e, vec![0.0, 0.1]);
    }

    #[test]
    fn oracle_forms() {
        let c: RunConfig = serde_json::from_str(r#"{"oracle": "none"}"#).unwrap();
        assert_eq!(c.oracle.unwrap().mode().unwrap(), OracleMode::Off);
        let c: RunConfig = serde_json::from_str(r#"{"oracle": {"rel_tol": 0.01}}"#).unwrap();
        assert_eq!(c.oracle.unwrap().mode().unwrap(), OracleMode::Converge(0.01));
        assert_eq!(OracleSetting::parse_flag("401,40").unwrap(), OracleSetting::Grid { n: 401, w: 40.0 });
        assert!(OracleSetting::parse_flag("401").is_err());
        assert!(OracleSetting::parse_flag("tol=0.5").unwrap().mode().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"modle": {}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"model": {"q": 1, "Omega": 0, "Gamma_c": 1, "Gamma_e": 0, "gamma_eg": 0, "omega_e": 0, "x": 1}}"#).is_err());
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::default();
        c.apply("Omega=0.5", SWEEP).unwrap();
        c.apply("sweep.count=11", SWEEP).unwrap();
        c.apply("eit.epsilon=0, 5,10", SWEEP).unwrap();
        assert_eq!(c.model.omega, 0.5);
        assert_eq!(c.sweep.unwrap().count, 11);
        assert_eq!(c.eit.epsilon, vec![0.0, 5.0, 10.0]);
        assert!(c.apply("Omega", SWEEP).is_err());
        assert!(c.apply("nope=1", SWEEP).is_err());
        assert!(c.apply("q=abc", SWEEP).is_err());
    }

    #[test]
    fn sweep_checks() {
        let c = RunConfig { sweep: Some(Sweep { count: 1, ..SWEEP }), ..Default::default() };
        assert!(c.sweep_for(Axis::OmegaL, SWEEP).is_err());
        let c = RunConfig { sweep: Some(Sweep { start: 2.0, ..SWEEP }), ..Default::default() };
        assert!(c.sweep_for(Axis::OmegaL, SWEEP).is_err());
        assert!(RunConfig::default().sweep_for(Axis::Omega, SWEEP).is_err());
        assert_eq!(SWEEP.points(), vec![0.0, 0.5, 1.0]);
    }
}
