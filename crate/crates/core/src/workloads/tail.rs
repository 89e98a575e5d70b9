use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{trial_rng, RngPurpose};
use crate::error::TableError;

/// Monte Carlo estimate of how often the first `t` keys of a random
/// permutation of `1..=n` reveal more than half of `S = 1..=2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub trials: u64,
    pub set_size: u64,
    pub theta: f64,
    /// Empirical `Pr(|S_t| > s/2)`.
    pub probability: f64,
    /// Sample mean and standard deviation of `|S_t|`.
    pub mean: f64,
    pub std_dev: f64,
    /// `s * θ`.
    pub expected_mean: f64,
    /// `θ / (1/2 - θ)^2 / s`.
    pub bound: f64,
}

pub fn half_full_tail_estimate(
    n: u64,
    t: u64,
    j: u32,
    trials: u64,
    seed: u64,
) -> Result<TailEstimate, TableError> {
    let theta = t as f64 / n as f64;
    if n == 0 || 2 * t >= n {
        return Err(TableError::Config(format!(
            "need t/n < 1/2, got t = {t}, n = {n}"
        )));
    }
    if j >= 63 || 1u64 << j > n {
        return Err(TableError::Config(format!(
            "need 2^j <= n, got j = {j}, n = {n}"
        )));
    }
    if trials == 0 {
        return Err(TableError::Config("at least one trial is required".into()));
    }
    let s = 1u64 << j;
    let mut rng = trial_rng(seed, 0, RngPurpose::Sampling);
    let mut perm: Vec<u64> = (1..=n).collect();
    let mut over_half = 0u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        // A uniformly shuffled prefix of any arrangement is a uniform prefix.
        let (prefix, _) = perm.partial_shuffle(&mut rng, t as usize);
        let revealed = prefix.iter().filter(|&&x| x <= s).count() as u64;
        if 2 * revealed > s {
            over_half += 1;
        }
        sum += revealed as f64;
        sum_sq += (revealed * revealed) as f64;
    }
    let trials_f = trials as f64;
    let mean = sum / trials_f;
    let variance = if trials > 1 {
        (sum_sq - trials_f * mean * mean) / (trials_f - 1.0)
    } else {
        0.0
    };
    Ok(TailEstimate {
        trials,
        set_size: s,
        theta,
        probability: over_half as f64 / trials_f,
        mean,
        std_dev: variance.max(0.0).sqrt(),
        expected_mean: s as f64 * theta,
        bound: theta / (0.5 - theta).powi(2) / s as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(half_full_tail_estimate(100, 50, 2, 10, 0).is_err());
        assert!(half_full_tail_estimate(100, 10, 7, 10, 0).is_err());
        assert!(half_full_tail_estimate(100, 10, 2, 0, 0).is_err());
    }

    #[test]
    fn whole_range_never_half_revealed() {
        let est = half_full_tail_estimate(1024, 511, 10, 200, 1).unwrap();
        assert_eq!(est.probability, 0.0);
        assert_eq!(est.mean, 511.0);
    }

    /// Hypergeometric(n, s, t) mean is s*t/n; compare within 4 standard errors.
    #[test]
    fn mean_matches_hypergeometric() {
        let est = half_full_tail_estimate(4096, 1000, 6, 2000, 5).unwrap();
        let se = est.std_dev / (est.trials as f64).sqrt();
        assert!((est.mean - est.expected_mean).abs() < 4.0 * se, "{est:?}");
        let (n, s, t) = (4096.0f64, 64.0, 1000.0);
        let var = t * (s / n) * (1.0 - s / n) * (n - t) / (n - 1.0);
        assert!((est.std_dev.powi(2) / var - 1.0).abs() < 0.15, "{est:?}");
    }
}
