use std::path::{Path, PathBuf};

use hcontent::pushout::PushoutConstants;
use serde::{Deserialize, Serialize};

/// Every numeric knob of a run. Loaded from TOML; missing keys take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerance: f64,
    pub budget: u64,
    pub seed: u64,
    pub samples: usize,
    pub width_budget: u64,
    pub pushout: PushoutSection,
    pub schedule: Schedule,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PushoutSection {
    pub c0_base: f64,
    pub c2_per_dim: f64,
    pub ceiling_base: f64,
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedule {
    pub eps_rel: f64,
    pub eps0_rel: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: hcontent::num::DEFAULT_TAU,
            budget: 1_000_000,
            seed: 0,
            samples: 10_000,
            width_budget: 2_000,
            pushout: PushoutSection::default(),
            schedule: Schedule::default(),
            output: Output::default(),
        }
    }
}

impl Default for PushoutSection {
    fn default() -> Self {
        let k = PushoutConstants::default();
        PushoutSection {
            c0_base: k.c0_base,
            c2_per_dim: k.c2_per_dim,
            ceiling_base: k.ceiling_base,
            candidates: k.candidates,
        }
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { eps_rel: 1e-3, eps0_rel: 1e-4, max_steps: 50 }
    }
}

impl PushoutSection {
    pub fn constants(&self) -> PushoutConstants {
        PushoutConstants {
            c0_base: self.c0_base,
            c2_per_dim: self.c2_per_dim,
            ceiling_base: self.ceiling_base,
            candidates: self.candidates,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<(), String> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(format!("{name} must be positive and finite, got {x}"))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        positive("tolerance", self.tolerance)?;
        if self.tolerance >= 1e-3 {
            return Err(format!("tolerance must be below 1e-3, got {}", self.tolerance));
        }
        for (name, v) in [
            ("budget", self.budget),
            ("width_budget", self.width_budget),
            ("samples", self.samples as u64),
            ("pushout.candidates", self.pushout.candidates as u64),
            ("schedule.max_steps", self.schedule.max_steps as u64),
        ] {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        positive("pushout.c0_base", self.pushout.c0_base)?;
        positive("pushout.c2_per_dim", self.pushout.c2_per_dim)?;
        positive("pushout.ceiling_base", self.pushout.ceiling_base)?;
        positive("schedule.eps_rel", self.schedule.eps_rel)?;
        positive("schedule.eps0_rel", self.schedule.eps0_rel)?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let c: RunConfig = toml::from_str(text).map_err(|e| format!("config: {e}"))?;
        c.validate()?;
        Ok(c)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                RunConfig::parse(&text).map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn non_default_values_round_trip() {
        let mut c = RunConfig::default();
        c.tolerance = 3.5e-11;
        c.seed = 17;
        c.pushout.c2_per_dim = 0.1 + 0.2;
        c.schedule.eps_rel = 1.0 / 3.0;
        c.output.plot = Some("a b/plot.csv".into());
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = RunConfig::parse("seed = 9\n[schedule]\nmax_steps = 3\n").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.schedule.max_steps, 3);
        assert_eq!(c.schedule.eps_rel, 1e-3);
        assert_eq!(c.budget, 1_000_000);
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(RunConfig::parse("budget = 0").is_err());
        assert!(RunConfig::parse("tolerance = -1e-9").is_err());
        assert!(RunConfig::parse("[pushout]\nc0_base = 0.0").is_err());
        assert!(RunConfig::parse("unknown_knob = 1").is_err());
        assert!(RunConfig::parse("seed = \"zero\"").is_err());
    }

    #[test]
    fn annotated_example_is_the_default() {
        let text = include_str!("../../../config.example.toml");
        assert_eq!(RunConfig::parse(text).unwrap(), RunConfig::default());
    }
}
