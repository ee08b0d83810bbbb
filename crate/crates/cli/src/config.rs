use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cloneforge::bounds::{self, CloningProblem};
use cloneforge::networks::CloningMode;

use crate::CliError;

/// Largest distance from pi/4 treated as pi/4 itself (ten-decimal input).
pub const QUARTER_PI_SNAP: f64 = 5e-10;

/// `pi/4` typed to a few decimals lands just above the valid range.
pub fn snap_quarter_pi(theta: f64) -> f64 {
    if (theta - FRAC_PI_4).abs() <= QUARTER_PI_SNAP {
        FRAC_PI_4
    } else {
        theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Approx,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default = "default_sweep_param")]
    pub param: String,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub steps: Option<usize>,
}

fn default_sweep_param() -> String {
    "p_s".into()
}

/// Everything a command may need. Angles are radians; exactly one of
/// `theta` and `overlap` may be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub theta: Option<f64>,
    pub overlap: Option<f64>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub eta_plus: Option<f64>,
    pub mode: Option<ModeName>,
    pub p_s: Option<f64>,
    pub sweep: Option<Sweep>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `flags` win over fields set here.
    pub fn overridden_by(self, flags: RunConfig) -> RunConfig {
        // an explicit angle on the command line replaces either form from the file
        let angle_from_flags = flags.theta.is_some() || flags.overlap.is_some();
        let sweep = match (self.sweep, flags.sweep) {
            (Some(file), Some(cli)) => Some(Sweep {
                param: file.param,
                start: cli.start.or(file.start),
                stop: cli.stop.or(file.stop),
                steps: cli.steps.or(file.steps),
            }),
            (file, cli) => cli.or(file),
        };
        RunConfig {
            theta: if angle_from_flags {
                flags.theta
            } else {
                self.theta
            },
            overlap: if angle_from_flags {
                flags.overlap
            } else {
                self.overlap
            },
            m: flags.m.or(self.m),
            n: flags.n.or(self.n),
            eta_plus: flags.eta_plus.or(self.eta_plus),
            mode: flags.mode.or(self.mode),
            p_s: flags.p_s.or(self.p_s),
            sweep,
            format: flags.format.or(self.format),
            output: flags.output.or(self.output),
        }
    }

    pub fn theta(&self) -> Result<f64, CliError> {
        match (self.theta, self.overlap) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "give either theta or overlap, not both".into(),
            )),
            (Some(t), None) => Ok(snap_quarter_pi(t)),
            (None, Some(s)) => {
                if !(0.0..=1.0).contains(&s) {
                    return Err(CliError::Config(format!("overlap {s} outside [0, 1]")));
                }
                Ok(bounds::angle_from_overlap(s))
            }
            (None, None) => Err(CliError::Config("missing --theta or --overlap".into())),
        }
    }

    pub fn problem(&self) -> Result<CloningProblem, CliError> {
        let theta = self.theta()?;
        let m = self.m.unwrap_or(1);
        let n = self.n.unwrap_or(2);
        CloningProblem::new(theta, m, n, self.eta_plus.unwrap_or(0.5)).map_err(CliError::from)
    }

    pub fn mode(&self) -> Result<CloningMode, CliError> {
        match (self.mode.unwrap_or(ModeName::Approx), self.p_s) {
            (ModeName::Exact, None) => Ok(CloningMode::Exact),
            (ModeName::Approx, None) => Ok(CloningMode::Approx),
            (ModeName::Hybrid, Some(p_s)) => Ok(CloningMode::Hybrid { p_s }),
            (ModeName::Hybrid, None) => Err(CliError::Config("hybrid mode needs --p-s".into())),
            (other, Some(_)) => Err(CliError::Config(format!(
                "--p-s only applies to hybrid mode, not {other:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig {
            theta: Some(0.3),
            m: Some(2),
            n: Some(5),
            sweep: Some(Sweep {
                param: "p_s".into(),
                start: Some(0.5),
                stop: Some(0.9),
                steps: Some(3),
            }),
            ..RunConfig::default()
        };
        let flags = RunConfig {
            overlap: Some(0.5),
            n: Some(4),
            sweep: Some(Sweep {
                param: "p_s".into(),
                start: None,
                stop: None,
                steps: Some(7),
            }),
            ..RunConfig::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!((merged.theta, merged.overlap), (None, Some(0.5)));
        assert_eq!((merged.m, merged.n), (Some(2), Some(4)));
        let sweep = merged.sweep.unwrap();
        assert_eq!(
            (sweep.start, sweep.stop, sweep.steps),
            (Some(0.5), Some(0.9), Some(7))
        );
    }

    #[test]
    fn mode_and_p_s_must_agree() {
        let mut c = RunConfig {
            theta: Some(0.3),
            ..RunConfig::default()
        };
        assert_eq!(c.mode().unwrap(), CloningMode::Approx);
        c.mode = Some(ModeName::Hybrid);
        assert!(c.mode().is_err());
        c.p_s = Some(0.9);
        assert_eq!(c.mode().unwrap(), CloningMode::Hybrid { p_s: 0.9 });
        c.mode = Some(ModeName::Exact);
        assert!(c.mode().is_err());
    }

    #[test]
    fn overlap_converts_to_angle() {
        let c = RunConfig {
            overlap: Some(0.0),
            ..RunConfig::default()
        };
        assert!((c.theta().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let both = RunConfig {
            theta: Some(0.1),
            overlap: Some(0.5),
            ..RunConfig::default()
        };
        assert!(both.theta().is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn rounded_quarter_pi_accepted() {
        let c = RunConfig {
            theta: Some(0.7853981634),
            ..RunConfig::default()
        };
        assert_eq!(c.theta().unwrap(), FRAC_PI_4);
        assert_eq!(snap_quarter_pi(0.78), 0.78);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"theta": 0.3, "thetaa": 1}"#).is_err());
        let c: RunConfig =
            serde_json::from_str(r#"{"theta": 0.3, "mode": "hybrid", "p_s": 0.8}"#).unwrap();
        assert_eq!(c.mode, Some(ModeName::Hybrid));
    }
}
