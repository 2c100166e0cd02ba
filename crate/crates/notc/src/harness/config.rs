//! Experiment configuration: defaults, flat key=value config files, and
//! flag overrides, with precedence defaults < environment preset < config
//! file < command-line flags.

use std::fmt;
use std::str::FromStr;

use crate::envs::EnvConfig;
use crate::error::{Error, Result};
use crate::learner::LearnerParams;

/// Which mountain-car variant an experiment drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    /// Fully observed, fixed velocity range (`mc`).
    Plain,
    /// Gaussian observation noise (`mc-noisy`).
    Noisy,
    /// Velocity range alternating every weather period (`mc-weather`).
    Weather,
}

impl EnvKind {
    /// The environment configuration this variant starts from, before any
    /// numeric overrides.
    pub fn preset(self) -> EnvConfig {
        match self {
            EnvKind::Plain => EnvConfig::plain(),
            EnvKind::Noisy => EnvConfig::noisy(),
            EnvKind::Weather => EnvConfig::unstable_weather(),
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnvKind::Plain => "mc",
            EnvKind::Noisy => "mc-noisy",
            EnvKind::Weather => "mc-weather",
        })
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(EnvKind::Plain),
            "mc-noisy" => Ok(EnvKind::Noisy),
            "mc-weather" => Ok(EnvKind::Weather),
            other => Err(Error::InvalidConfig(format!(
                "unknown env '{other}': expected mc, mc-noisy, or mc-weather"
            ))),
        }
    }
}

/// A partial configuration; unset fields fall through to the next weaker
/// source. One instance carries a parsed config file, another the
/// command-line flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub env: Option<EnvKind>,
    pub runs: Option<u64>,
    pub trials: Option<u64>,
    pub window: Option<u64>,
    pub seed: Option<u64>,
    pub cells: Option<usize>,
    pub best: Option<usize>,
    pub novel: Option<usize>,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub iota: Option<u64>,
    pub noise_pos_sigma: Option<f64>,
    pub noise_vel_sigma: Option<f64>,
    pub weather_period: Option<u64>,
    pub step_cap: Option<u32>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| {
        Error::InvalidConfig(format!("config key '{key}': invalid value '{value}': {e}"))
    })
}

impl Overrides {
    /// Parses flat `key=value` config text. Blank lines and `#` comments are
    /// skipped, later duplicates win, and unknown keys are rejected by name.
    pub fn from_config_text(text: &str) -> Result<Overrides> {
        let mut over = Overrides::default();
        for (index, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(hash) => &raw[..hash],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "config line {}: expected key=value, found '{line}'",
                    index + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "env" => over.env = Some(value.parse()?),
                "runs" => over.runs = Some(parse_value(key, value)?),
                "trials" => over.trials = Some(parse_value(key, value)?),
                "window" => over.window = Some(parse_value(key, value)?),
                "seed" => over.seed = Some(parse_value(key, value)?),
                "cells" => over.cells = Some(parse_value(key, value)?),
                "best" => over.best = Some(parse_value(key, value)?),
                "novel" => over.novel = Some(parse_value(key, value)?),
                "eta" => over.eta = Some(parse_value(key, value)?),
                "gamma" => over.gamma = Some(parse_value(key, value)?),
                "iota" => over.iota = Some(parse_value(key, value)?),
                "noise_pos_sigma" => over.noise_pos_sigma = Some(parse_value(key, value)?),
                "noise_vel_sigma" => over.noise_vel_sigma = Some(parse_value(key, value)?),
                "weather_period" => over.weather_period = Some(parse_value(key, value)?),
                "step_cap" => over.step_cap = Some(parse_value(key, value)?),
                _ => return Err(Error::InvalidConfig(format!("unknown config key '{key}'"))),
            }
        }
        Ok(over)
    }
}

/// A fully resolved experiment: environment, learner parameters, and the
/// run/trial/window/seed protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    pub env_config: EnvConfig,
    pub learner: LearnerParams,
    /// Independent runs; run r is seeded with `seed + r`.
    pub runs: u64,
    /// Trials per run.
    pub trials: u64,
    /// Aggregation window in trials.
    pub window: u64,
    /// Base seed for the whole experiment.
    pub seed: u64,
}

impl ExperimentConfig {
    /// Resolves a configuration from a parsed config file and command-line
    /// flags. Flags beat the file, the file beats the environment preset,
    /// and the preset beats the built-in defaults.
    pub fn build(file: &Overrides, flags: &Overrides) -> Result<ExperimentConfig> {
        let env = flags.env.or(file.env).unwrap_or(EnvKind::Plain);
        let mut env_config = env.preset();
        for source in [file, flags] {
            if let Some(v) = source.noise_pos_sigma {
                env_config.noise_pos_sigma = v;
            }
            if let Some(v) = source.noise_vel_sigma {
                env_config.noise_vel_sigma = v;
            }
            if let Some(v) = source.weather_period {
                env_config.weather_period = Some(v);
            }
            if let Some(v) = source.step_cap {
                env_config.step_cap = v;
            }
        }

        let mut learner = LearnerParams::default();
        learner.map_size = flags.cells.or(file.cells).unwrap_or(learner.map_size);
        learner.n_best = flags.best.or(file.best).unwrap_or(learner.n_best);
        learner.n_novel = flags.novel.or(file.novel).unwrap_or(learner.n_novel);
        learner.eta = flags.eta.or(file.eta).unwrap_or(learner.eta);
        learner.gamma = flags.gamma.or(file.gamma).unwrap_or(learner.gamma);
        learner.iota = flags.iota.or(file.iota).unwrap_or(learner.iota);
        learner.action_low = env_config.action_low;
        learner.action_high = env_config.action_high;

        let config = ExperimentConfig {
            env,
            env_config,
            learner,
            runs: flags.runs.or(file.runs).unwrap_or(30),
            trials: flags.trials.or(file.trials).unwrap_or(20_000),
            window: flags.window.or(file.window).unwrap_or(100),
            seed: flags.seed.or(file.seed).unwrap_or(1),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.learner.validate()?;
        self.env_config.validate()?;
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        if self.window == 0 {
            return Err(Error::InvalidConfig("window must be positive".into()));
        }
        if self.window > self.trials {
            return Err(Error::InvalidConfig(format!(
                "window ({}) must not exceed trials ({})",
                self.window, self.trials
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> ExperimentConfig {
        ExperimentConfig::build(&Overrides::default(), &Overrides::default()).unwrap()
    }

    #[test]
    fn test_default_configuration() {
        let config = defaults();
        assert_eq!(config.env, EnvKind::Plain);
        assert_eq!((config.runs, config.trials, config.window, config.seed), (30, 20_000, 100, 1));
        assert_eq!(config.learner.map_size, 10);
        assert_eq!(config.learner.n_best, 10);
        assert_eq!(config.learner.n_novel, 10);
        assert_eq!(config.env_config, EnvConfig::plain());
    }

    #[test]
    fn test_env_kind_round_trip() {
        for kind in [EnvKind::Plain, EnvKind::Noisy, EnvKind::Weather] {
            assert_eq!(kind.to_string().parse::<EnvKind>().unwrap(), kind);
        }
        assert!("mountain".parse::<EnvKind>().is_err());
    }

    #[test]
    fn test_config_text_comments_blanks_and_duplicates() {
        let text = "
            # protocol
            runs = 3
            trials=50   # inline comment
            seed=9

            trials = 60
        ";
        let over = Overrides::from_config_text(text).unwrap();
        assert_eq!(over.runs, Some(3));
        assert_eq!(over.trials, Some(60), "the last duplicate wins");
        assert_eq!(over.seed, Some(9));
        assert_eq!(over.window, None);
    }

    #[test]
    fn test_config_text_rejects_unknown_key_by_name() {
        let err = Overrides::from_config_text("bogus_key=1").unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "diagnostic was: {err}");
    }

    #[test]
    fn test_config_text_rejects_bad_value_naming_key() {
        let err = Overrides::from_config_text("runs=many").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("runs") && msg.contains("many"), "diagnostic was: {msg}");
        assert!(Overrides::from_config_text("just a line").is_err());
    }

    #[test]
    fn test_flags_beat_file_beats_preset() {
        let file = Overrides {
            env: Some(EnvKind::Noisy),
            runs: Some(5),
            noise_pos_sigma: Some(0.1),
            ..Overrides::default()
        };
        let flags = Overrides { runs: Some(7), ..Overrides::default() };
        let config = ExperimentConfig::build(&file, &flags).unwrap();
        assert_eq!(config.env, EnvKind::Noisy);
        assert_eq!(config.runs, 7, "flag beats file");
        assert_eq!(config.env_config.noise_pos_sigma, 0.1, "file beats preset");
        assert_eq!(config.env_config.noise_vel_sigma, 0.009, "preset survives where unset");
    }

    #[test]
    fn test_flag_env_beats_file_env() {
        let file = Overrides { env: Some(EnvKind::Noisy), ..Overrides::default() };
        let flags = Overrides { env: Some(EnvKind::Plain), ..Overrides::default() };
        let config = ExperimentConfig::build(&file, &flags).unwrap();
        assert_eq!(config.env, EnvKind::Plain);
        assert_eq!(config.env_config.noise_pos_sigma, 0.0, "preset follows the winning env");
    }

    #[test]
    fn test_weather_period_override_reaches_env_config() {
        let file = Overrides {
            env: Some(EnvKind::Weather),
            weather_period: Some(5),
            ..Overrides::default()
        };
        let config = ExperimentConfig::build(&file, &Overrides::default()).unwrap();
        assert_eq!(config.env_config.weather_period, Some(5));
    }

    #[test]
    fn test_window_must_not_exceed_trials() {
        let flags = Overrides { trials: Some(50), window: Some(51), ..Overrides::default() };
        let err = ExperimentConfig::build(&Overrides::default(), &flags).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        let flags = Overrides { trials: Some(50), window: Some(50), ..Overrides::default() };
        assert!(ExperimentConfig::build(&Overrides::default(), &flags).is_ok());
    }

    #[test]
    fn test_zero_counts_rejected() {
        for bad in [
            Overrides { runs: Some(0), ..Overrides::default() },
            Overrides { trials: Some(0), ..Overrides::default() },
            Overrides { window: Some(0), ..Overrides::default() },
            Overrides { cells: Some(0), ..Overrides::default() },
        ] {
            assert!(ExperimentConfig::build(&Overrides::default(), &bad).is_err());
        }
    }

    #[test]
    fn test_two_cell_ablation_conserves_individual_count() {
        let ablation = Overrides {
            cells: Some(2),
            best: Some(50),
            novel: Some(50),
            ..Overrides::default()
        };
        let small = ExperimentConfig::build(&Overrides::default(), &ablation).unwrap();
        let full = defaults();
        let count = |c: &ExperimentConfig| c.learner.map_size * (c.learner.n_best + c.learner.n_novel);
        assert_eq!(count(&small), 200);
        assert_eq!(count(&small), count(&full));
        assert_eq!(small.learner.evolution_trigger(), 1000);
        assert_eq!(small.learner.hof_capacity(), 25);
    }
}
