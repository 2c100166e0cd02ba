//! Best-of-window aggregation across runs, and the map-update decay report.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harness::experiment::TrialRecord;

/// One point of the aggregated learning curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub window_index: u64,
    /// Mean across runs of the window's best accumulated reward.
    pub mean_best_reward: f64,
    /// Population standard deviation of those per-run bests.
    pub std_best_reward: f64,
}

/// Groups records by run and orders each run's trials.
fn by_run(records: &[TrialRecord]) -> BTreeMap<u64, Vec<&TrialRecord>> {
    let mut runs: BTreeMap<u64, Vec<&TrialRecord>> = BTreeMap::new();
    for record in records {
        runs.entry(record.run_id).or_default().push(record);
    }
    for trials in runs.values_mut() {
        trials.sort_by_key(|r| r.trial);
    }
    runs
}

/// Complete windows shared by every run; a partial final window is dropped.
fn shared_window_count(runs: &BTreeMap<u64, Vec<&TrialRecord>>, window: usize) -> usize {
    runs.values().map(|trials| trials.len() / window).min().unwrap_or(0)
}

/// Splits each run into consecutive non-overlapping windows of `window`
/// trials, takes the best accumulated reward per window per run, and
/// returns the mean and population standard deviation of those bests
/// across runs. A final partial window is dropped.
pub fn aggregate(records: &[TrialRecord], window: u64) -> Result<Vec<CurvePoint>> {
    if records.is_empty() {
        return Err(Error::TooFewElements { needed: 1, actual: 0 });
    }
    if window == 0 {
        return Err(Error::InvalidConfig("window must be positive".into()));
    }
    let window = window as usize;
    let runs = by_run(records);
    let n_windows = shared_window_count(&runs, window);
    let n_runs = runs.len() as f64;

    let mut curve = Vec::with_capacity(n_windows);
    for w in 0..n_windows {
        let bests = runs.values().map(|trials| {
            trials[w * window..(w + 1) * window]
                .iter()
                .map(|r| r.accumulated_reward)
                .fold(f64::NEG_INFINITY, f64::max)
        });
        let mean = bests.clone().sum::<f64>() / n_runs;
        let variance = bests.map(|b| (b - mean) * (b - mean)).sum::<f64>() / n_runs;
        curve.push(CurvePoint {
            window_index: w as u64,
            mean_best_reward: mean,
            std_best_reward: variance.sqrt(),
        });
    }
    Ok(curve)
}

/// Total Novelty Map modifications per window, summed across runs — the
/// quantization-settling diagnostic. Uses the same windowing as
/// [`aggregate`]; empty input yields an empty report.
pub fn update_decay_report(records: &[TrialRecord], window: u64) -> Result<Vec<(u64, u64)>> {
    if window == 0 {
        return Err(Error::InvalidConfig("window must be positive".into()));
    }
    let window = window as usize;
    let runs = by_run(records);
    let n_windows = shared_window_count(&runs, window);

    Ok((0..n_windows)
        .map(|w| {
            let total = runs
                .values()
                .map(|trials| {
                    trials[w * window..(w + 1) * window]
                        .iter()
                        .map(|r| r.map_updates_delta)
                        .sum::<u64>()
                })
                .sum();
            (w as u64, total)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::Phase;

    fn record(run_id: u64, trial: u64, reward: f64, updates: u64) -> TrialRecord {
        TrialRecord {
            run_id,
            trial,
            steps: (-reward) as u32,
            accumulated_reward: reward,
            phase: Phase::Normal,
            map_updates_delta: updates,
        }
    }

    fn run_of(run_id: u64, rewards: &[f64]) -> Vec<TrialRecord> {
        rewards
            .iter()
            .enumerate()
            .map(|(trial, &reward)| record(run_id, trial as u64, reward, 0))
            .collect()
    }

    #[test]
    fn test_single_run_single_window() {
        let records = run_of(0, &[-100.0, -90.0, -95.0]);
        let curve = aggregate(&records, 3).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0], CurvePoint {
            window_index: 0,
            mean_best_reward: -90.0,
            std_best_reward: 0.0,
        });
    }

    #[test]
    fn test_two_runs_population_std() {
        let mut records = run_of(0, &[-100.0, -80.0]);
        records.extend(run_of(1, &[-100.0, -100.0]));
        let curve = aggregate(&records, 2).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].mean_best_reward, -90.0);
        assert_eq!(curve[0].std_best_reward, 10.0, "population std divides by n");
    }

    #[test]
    fn test_all_equal_rewards_have_zero_std() {
        let mut records = run_of(0, &[-70.0, -70.0]);
        records.extend(run_of(1, &[-70.0, -70.0]));
        let curve = aggregate(&records, 2).unwrap();
        assert_eq!(curve[0].mean_best_reward, -70.0);
        assert_eq!(curve[0].std_best_reward, 0.0);
    }

    #[test]
    fn test_window_one_is_identity_on_maxima() {
        let mut records = run_of(0, &[-10.0, -20.0, -30.0]);
        records.extend(run_of(1, &[-20.0, -40.0, -10.0]));
        let curve = aggregate(&records, 1).unwrap();
        let means: Vec<f64> = curve.iter().map(|p| p.mean_best_reward).collect();
        assert_eq!(means, vec![-15.0, -30.0, -20.0], "window 1 means the per-trial mean");
    }

    #[test]
    fn test_partial_final_window_is_dropped() {
        let records = run_of(0, &[-100.0, -90.0, -95.0, -1.0, -2.0]);
        let curve = aggregate(&records, 3).unwrap();
        assert_eq!(curve.len(), 1, "the trailing 2-trial window is not padded");
        assert_eq!(curve[0].mean_best_reward, -90.0);
    }

    #[test]
    fn test_uneven_runs_use_shared_windows() {
        let mut records = run_of(0, &[-10.0, -20.0, -30.0, -40.0]);
        records.extend(run_of(1, &[-50.0, -60.0]));
        let curve = aggregate(&records, 2).unwrap();
        assert_eq!(curve.len(), 1, "only windows every run completed count");
        assert_eq!(curve[0].mean_best_reward, (-10.0 + -50.0) / 2.0);
    }

    #[test]
    fn test_unsorted_records_are_reordered() {
        let mut records = run_of(0, &[-10.0, -20.0]);
        records.reverse();
        let curve = aggregate(&records, 1).unwrap();
        assert_eq!(curve[0].mean_best_reward, -10.0, "trial order comes from trial ids");
    }

    #[test]
    fn test_empty_records_error() {
        assert!(aggregate(&[], 3).is_err());
        assert!(aggregate(&run_of(0, &[-1.0]), 0).is_err());
    }

    #[test]
    fn test_update_decay_settled_map() {
        // The map filled (3 cells) in the first window and never changed.
        let mut records: Vec<TrialRecord> =
            (0..6).map(|t| record(0, t, -1.0, if t == 0 { 3 } else { 0 })).collect();
        let report = update_decay_report(&records, 2).unwrap();
        assert_eq!(report, vec![(0, 3), (1, 0), (2, 0)]);
        records.extend((0..6).map(|t| record(1, t, -1.0, 1)));
        let report = update_decay_report(&records, 2).unwrap();
        assert_eq!(report, vec![(0, 5), (1, 2), (2, 2)], "runs are summed");
    }

    #[test]
    fn test_update_decay_conserves_total() {
        let records: Vec<TrialRecord> =
            (0..10).map(|t| record(0, t, -1.0, t % 3)).collect();
        let report = update_decay_report(&records, 5).unwrap();
        let total: u64 = report.iter().map(|&(_, n)| n).sum();
        let direct: u64 = records.iter().map(|r| r.map_updates_delta).sum();
        assert_eq!(total, direct, "no updates are lost when the window divides the trials");
    }

    #[test]
    fn test_update_decay_empty_is_empty() {
        assert_eq!(update_decay_report(&[], 5).unwrap(), vec![]);
    }
}
