//! Continuous-action mountain car and its noisy-observation and
//! velocity-switching ("unstable weather") variants.
//!
//! The car starts in the valley at position -0.5 with velocity 0 and must
//! reach the goal at position 0.6. Each step applies
//!
//! ```text
//! v' = clamp(v + a·0.001 + cos(3·pos)·(−0.0025), ±v_max)
//! pos' = pos + v'
//! ```
//!
//! with the action a clamped to [-1, 1]. Hitting the left wall at -1.2 while
//! moving left zeroes the velocity. Every non-goal step is rewarded -1, the
//! goal step 0, and a trial ends at the goal or after `step_cap` steps. The
//! engine is too weak to climb directly: reaching the goal requires rocking
//! backwards first.
//!
//! Variants: Gaussian observation noise (applied fresh at every read, never
//! to the underlying state) and unstable weather, which alternates `v_max`
//! between the base and a reduced value every `weather_period` trials.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Leftmost reachable position (inclusive wall).
pub const POS_MIN: f64 = -1.2;
/// Goal position; reaching it ends the trial with reward 0.
pub const GOAL_POS: f64 = 0.6;
/// Engine force per unit action.
const FORCE: f64 = 0.001;
/// Gravity pull along the slope.
const GRAVITY: f64 = 0.0025;

/// Mountain-car configuration; see the presets for the three variants.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    /// Standard deviation of Gaussian noise on the observed position (0 = off).
    pub noise_pos_sigma: f64,
    /// Standard deviation of Gaussian noise on the observed velocity (0 = off).
    pub noise_vel_sigma: f64,
    /// Trials between velocity-range switches; `None` disables weather.
    pub weather_period: Option<u64>,
    /// Velocity bound during reduced-range weather.
    pub reduced_v_max: f64,
    /// Velocity bound in normal weather (and always, without weather).
    pub base_v_max: f64,
    /// Steps after which a trial is cut off.
    pub step_cap: u32,
    pub action_low: f64,
    pub action_high: f64,
}

impl EnvConfig {
    /// The plain benchmark: fully observed, fixed velocity range.
    pub fn plain() -> Self {
        EnvConfig {
            noise_pos_sigma: 0.0,
            noise_vel_sigma: 0.0,
            weather_period: None,
            reduced_v_max: 0.04,
            base_v_max: 0.07,
            step_cap: 1000,
            action_low: -1.0,
            action_high: 1.0,
        }
    }

    /// Gaussian observation noise: σ 0.06 on position, 0.009 on velocity.
    pub fn noisy() -> Self {
        EnvConfig { noise_pos_sigma: 0.06, noise_vel_sigma: 0.009, ..EnvConfig::plain() }
    }

    /// Velocity range alternating between ±0.07 and ±0.04 every 10000 trials.
    pub fn unstable_weather() -> Self {
        EnvConfig { weather_period: Some(10_000), ..EnvConfig::plain() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.noise_pos_sigma < 0.0 || self.noise_vel_sigma < 0.0 {
            return Err(Error::InvalidConfig(
                "noise_pos_sigma and noise_vel_sigma must be nonnegative".into(),
            ));
        }
        if self.weather_period == Some(0) {
            return Err(Error::InvalidConfig("weather_period must be positive".into()));
        }
        if self.base_v_max.is_nan() || self.base_v_max <= 0.0 {
            return Err(Error::InvalidConfig("base_v_max must be positive".into()));
        }
        if !(self.reduced_v_max > 0.0 && self.reduced_v_max < self.base_v_max) {
            return Err(Error::InvalidConfig(
                "reduced_v_max must lie in (0, base_v_max)".into(),
            ));
        }
        if self.step_cap == 0 {
            return Err(Error::InvalidConfig("step_cap must be positive".into()));
        }
        if self.action_low >= self.action_high {
            return Err(Error::InvalidConfig("action range is empty".into()));
        }
        Ok(())
    }
}

/// Outcome of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    /// Observed (position, velocity), noise-corrupted if configured.
    pub observation: [f64; 2],
    /// 0 on reaching the goal, -1 otherwise.
    pub reward: f64,
    pub terminal: bool,
}

/// The mountain-car simulator. One instance serves one run; trials are
/// started with [`reset`](Self::reset).
#[derive(Debug, Clone)]
pub struct MountainCar {
    config: EnvConfig,
    pos: f64,
    vel: f64,
    step_index: u32,
    terminal: bool,
    v_max: f64,
    rng: ChaCha8Rng,
    pos_noise: Option<Normal<f64>>,
    vel_noise: Option<Normal<f64>>,
}

impl MountainCar {
    /// Builds the environment and readies trial 0.
    pub fn new(config: EnvConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let make_noise = |sigma: f64| -> Option<Normal<f64>> {
            (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("validated sigma"))
        };
        let mut env = MountainCar {
            pos_noise: make_noise(config.noise_pos_sigma),
            vel_noise: make_noise(config.noise_vel_sigma),
            pos: 0.0,
            vel: 0.0,
            step_index: 0,
            terminal: false,
            v_max: config.base_v_max,
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
        };
        env.reset(0);
        Ok(env)
    }

    /// Starts trial `trial_index`: position -0.5, velocity 0. Under unstable
    /// weather the velocity bound for the whole trial is the base value when
    /// `trial_index / weather_period` is even and the reduced value when it
    /// is odd. Returns the initial (possibly noisy) observation.
    pub fn reset(&mut self, trial_index: u64) -> [f64; 2] {
        self.pos = -0.5;
        self.vel = 0.0;
        self.step_index = 0;
        self.terminal = false;
        self.v_max = match self.config.weather_period {
            Some(period) if (trial_index / period) % 2 == 1 => self.config.reduced_v_max,
            _ => self.config.base_v_max,
        };
        self.observe()
    }

    /// Reads the observation, sampling fresh noise per read (position draw
    /// first, then velocity). The underlying state is never touched.
    pub fn observe(&mut self) -> [f64; 2] {
        let mut obs = [self.pos, self.vel];
        if let Some(noise) = &self.pos_noise {
            obs[0] += noise.sample(&mut self.rng);
        }
        if let Some(noise) = &self.vel_noise {
            obs[1] += noise.sample(&mut self.rng);
        }
        obs
    }

    /// Advances one step. Errors if the trial already ended.
    pub fn step(&mut self, action: f64) -> Result<StepResult> {
        if self.terminal {
            return Err(Error::TrialOver);
        }
        let action = action.clamp(self.config.action_low, self.config.action_high);
        let mut vel = self.vel + action * FORCE + (3.0 * self.pos).cos() * (-GRAVITY);
        vel = vel.clamp(-self.v_max, self.v_max);
        let mut pos = self.pos + vel;
        if vel < 0.0 && pos <= POS_MIN {
            pos = POS_MIN;
            vel = 0.0;
        }
        self.pos = pos;
        self.vel = vel;
        self.step_index += 1;

        let (reward, terminal) = if pos >= GOAL_POS {
            (0.0, true)
        } else {
            (-1.0, self.step_index >= self.config.step_cap)
        };
        self.terminal = terminal;
        Ok(StepResult { observation: self.observe(), reward, terminal })
    }

    /// True (noise-free) position and velocity.
    pub fn state(&self) -> (f64, f64) {
        (self.pos, self.vel)
    }

    /// The velocity bound in effect for the current trial.
    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    /// Steps taken in the current trial.
    pub fn step_index(&self) -> u32 {
        self.step_index
    }

    /// Rescales an observation to [0, 1] per dimension using the declared
    /// variable ranges: position over [-1.2, 0.6], velocity over the base
    /// ±0.07 range (weather narrows the dynamics, not the declared range).
    /// Noisy observations may fall slightly outside [0, 1]; they are not
    /// clipped.
    pub fn normalize(observation: [f64; 2]) -> [f64; 2] {
        [
            (observation[0] - POS_MIN) / (GOAL_POS - POS_MIN),
            (observation[1] + 0.07) / 0.14,
        ]
    }
}

/// Mean accumulated reward of a uniform-random policy over `n_trials`
/// trials, the learning-versus-chance baseline.
pub fn random_policy_baseline<R: Rng>(
    config: EnvConfig,
    n_trials: u64,
    rng: &mut R,
) -> Result<f64> {
    if n_trials == 0 {
        return Err(Error::TooFewElements { needed: 1, actual: 0 });
    }
    let (low, high) = (config.action_low, config.action_high);
    let mut env = MountainCar::new(config, rng.next_u64())?;
    let mut total = 0.0;
    for trial in 0..n_trials {
        env.reset(trial);
        loop {
            let result = env.step(rng.random_range(low..=high))?;
            total += result.reward;
            if result.terminal {
                break;
            }
        }
    }
    Ok(total / n_trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain_env(seed: u64) -> MountainCar {
        MountainCar::new(EnvConfig::plain(), seed).unwrap()
    }

    /// Drives the environment with a = sign(velocity), the classic rocking
    /// policy, until termination; returns (steps, accumulated reward).
    fn rock_to_goal(env: &mut MountainCar) -> (u32, f64) {
        let mut accumulated = 0.0;
        loop {
            let (_, vel) = env.state();
            let action = if vel >= 0.0 { 1.0 } else { -1.0 };
            let result = env.step(action).unwrap();
            accumulated += result.reward;
            if result.terminal {
                return (env.step_index(), accumulated);
            }
        }
    }

    #[test]
    fn test_single_step_from_start() {
        let mut env = plain_env(0);
        let result = env.step(0.0).unwrap();
        let (pos, vel) = env.state();
        assert!((vel - -1.7684300416925727e-4).abs() < 1e-15);
        assert!((pos - -0.5001768430041692).abs() < 1e-15);
        assert_eq!(result.reward, -1.0);
        assert!(!result.terminal);
    }

    #[test]
    fn test_reset_restores_start_state() {
        let mut env = plain_env(1);
        env.step(1.0).unwrap();
        env.step(1.0).unwrap();
        let obs = env.reset(0);
        assert_eq!(env.state(), (-0.5, 0.0));
        assert_eq!(obs, [-0.5, 0.0], "plain observations are exact");
        assert_eq!(env.step_index(), 0);
    }

    #[test]
    fn test_rocking_reaches_goal_with_zero_terminal_reward() {
        let mut env = plain_env(2);
        let (steps, accumulated) = rock_to_goal(&mut env);
        assert_eq!(steps, 126);
        assert_eq!(accumulated, -(steps as f64 - 1.0), "goal step pays 0, others -1");
        let (pos, _) = env.state();
        assert!(pos >= GOAL_POS);
    }

    #[test]
    fn test_idle_policy_hits_step_cap() {
        let mut env = plain_env(3);
        let mut accumulated = 0.0;
        let mut last = None;
        for _ in 0..1000 {
            let result = env.step(0.0).unwrap();
            accumulated += result.reward;
            last = Some(result);
        }
        let last = last.unwrap();
        assert!(last.terminal);
        assert_eq!(last.reward, -1.0, "a cut-off trial ends on the common reward");
        assert_eq!(accumulated, -1000.0);
        assert!(matches!(env.step(0.0), Err(Error::TrialOver)));
    }

    #[test]
    fn test_full_throttle_alone_cannot_climb() {
        let mut env = plain_env(4);
        let mut min_pos: f64 = -0.5;
        for _ in 0..1000 {
            let result = env.step(1.0).unwrap();
            min_pos = min_pos.min(env.state().0);
            assert_ne!(result.reward, 0.0, "constant full throttle must not reach the goal");
        }
        assert!(min_pos < -0.5, "the car is pushed left of its start before it can climb");
    }

    #[test]
    fn test_left_wall_zeroes_velocity() {
        // Within the standard ±1 action range the restoring force keeps the
        // car off the wall, so widen the range to drive into it.
        let mut config = EnvConfig::plain();
        config.action_low = -10.0;
        config.action_high = 10.0;
        let mut env = MountainCar::new(config, 5).unwrap();
        for _ in 0..14 {
            env.step(-10.0).unwrap();
            assert!(env.state().0 >= POS_MIN);
        }
        assert_eq!(env.state(), (POS_MIN, 0.0), "wall stop zeroes the velocity");
        env.step(-10.0).unwrap();
        assert_eq!(env.state(), (POS_MIN, 0.0), "pushing further keeps it pinned");
    }

    #[test]
    fn test_standard_actions_never_reach_the_wall() {
        let mut env = plain_env(14);
        let mut min_pos: f64 = 0.0;
        loop {
            let rightward = env.state().1 >= 0.0;
            let result = env.step(if rightward { 1.0 } else { -1.0 }).unwrap();
            min_pos = min_pos.min(env.state().0);
            if result.terminal {
                break;
            }
        }
        assert!(min_pos > POS_MIN && min_pos < -1.1, "rocking swings deep but short of the wall");
    }

    #[test]
    fn test_velocity_respects_current_bound() {
        let mut config = EnvConfig::unstable_weather();
        config.weather_period = Some(1);
        let mut env = MountainCar::new(config, 6).unwrap();
        env.reset(1);
        assert_eq!(env.v_max(), 0.04);
        loop {
            let (_, vel) = env.state();
            assert!(vel.abs() <= 0.04 + 1e-15);
            let action = if vel >= 0.0 { 1.0 } else { -1.0 };
            if env.step(action).unwrap().terminal {
                break;
            }
        }
    }

    #[test]
    fn test_weather_alternates_with_trial_index() {
        let mut env = MountainCar::new(EnvConfig::unstable_weather(), 7).unwrap();
        env.reset(0);
        assert_eq!(env.v_max(), 0.07);
        env.reset(9_999);
        assert_eq!(env.v_max(), 0.07);
        env.reset(10_000);
        assert_eq!(env.v_max(), 0.04);
        env.reset(19_999);
        assert_eq!(env.v_max(), 0.04);
        env.reset(20_000);
        assert_eq!(env.v_max(), 0.07);
        env.reset(30_000);
        assert_eq!(env.v_max(), 0.04);
    }

    #[test]
    fn test_reduced_weather_remains_solvable() {
        let mut config = EnvConfig::unstable_weather();
        config.weather_period = Some(1);
        let mut env = MountainCar::new(config, 8).unwrap();
        env.reset(1);
        let (steps, _) = rock_to_goal(&mut env);
        assert_eq!(steps, 162);
    }

    #[test]
    fn test_noise_statistics() {
        let mut env = MountainCar::new(EnvConfig::noisy(), 9).unwrap();
        let n = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let obs = env.observe();
            let err = obs[0] - -0.5;
            sum += err;
            sum_sq += err * err;
        }
        let mean = sum / n as f64;
        let std = (sum_sq / n as f64 - mean * mean).sqrt();
        assert!(mean.abs() <= 0.002, "noise mean {mean} should be near 0");
        assert!((std - 0.06).abs() <= 0.005, "noise std {std} should be near 0.06");
    }

    #[test]
    fn test_noise_never_alters_the_state() {
        let mut noisy = MountainCar::new(EnvConfig::noisy(), 10).unwrap();
        let mut plain = plain_env(11);
        for step in 0..200 {
            let action = ((step as f64) * 0.37).sin();
            let a = noisy.step(action).unwrap();
            let b = plain.step(action).unwrap();
            assert_eq!(noisy.state(), plain.state());
            assert_ne!(a.observation, b.observation, "reads differ, trajectories do not");
            assert_eq!(a.reward, b.reward);
        }
    }

    #[test]
    fn test_two_reads_of_one_state_differ_under_noise() {
        let mut env = MountainCar::new(EnvConfig::noisy(), 12).unwrap();
        assert_ne!(env.observe(), env.observe());
        assert_eq!(env.state(), (-0.5, 0.0));
    }

    #[test]
    fn test_deterministic_without_noise() {
        let run = |seed: u64| -> Vec<(f64, f64)> {
            let mut env = plain_env(seed);
            (0..500).map(|i| {
                env.step(((i * 7 % 13) as f64 / 6.5) - 1.0).unwrap();
                env.state()
            }).collect()
        };
        assert_eq!(run(1), run(999), "the seed only matters for observation noise");
    }

    #[test]
    fn test_normalize_maps_declared_ranges_to_unit_square() {
        assert_eq!(MountainCar::normalize([-1.2, -0.07]), [0.0, 0.0]);
        assert_eq!(MountainCar::normalize([0.6, 0.07]), [1.0, 1.0]);
        let mid = MountainCar::normalize([-0.3, 0.0]);
        assert!((mid[0] - 0.5).abs() < 1e-15);
        assert!((mid[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn test_random_policy_baseline_bounds_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mean = random_policy_baseline(EnvConfig::plain(), 5, &mut rng).unwrap();
        assert!((-1000.0..=0.0).contains(&mean));
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let again = random_policy_baseline(EnvConfig::plain(), 5, &mut rng).unwrap();
        assert_eq!(mean, again);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let single = random_policy_baseline(EnvConfig::plain(), 1, &mut rng).unwrap();
        assert_eq!(single, -1000.0, "a random policy does not stumble onto the goal");
    }

    #[test]
    fn test_random_policy_baseline_rejects_zero_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        assert!(random_policy_baseline(EnvConfig::plain(), 0, &mut rng).is_err());
    }

    #[test]
    fn test_config_validation() {
        let mut c = EnvConfig::plain();
        c.noise_pos_sigma = -0.1;
        assert!(c.validate().is_err());
        let mut c = EnvConfig::plain();
        c.reduced_v_max = 0.1;
        assert!(c.validate().is_err());
        let mut c = EnvConfig::plain();
        c.weather_period = Some(0);
        assert!(c.validate().is_err());
        let mut c = EnvConfig::plain();
        c.step_cap = 0;
        assert!(c.validate().is_err());
    }
}
