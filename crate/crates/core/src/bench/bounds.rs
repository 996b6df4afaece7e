//! Concentration bounds turning observed counts into certified values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exponent used when converting a trap-rate bound into a success bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMode {
    /// `1 − exp(−2n³(c_t − z_t)²)`, the literal published form.
    PaperN3,
    /// `1 − exp(−2n(c_t − z_t)²)`, what Hoeffding gives for a sum of `n`
    /// Bernoulli trap activations.
    #[default]
    HoeffdingN,
}

#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("trap-rate bound z_t = {z_t} is not below threshold c_t = {c_t}")]
    AboveThreshold { z_t: f64, c_t: f64 },
}

/// `exp(−2·trials·t²)`: Hoeffding's one-sided tail for the mean of
/// `trials` independent [0, 1] variables deviating by `t`.
pub fn hoeffding_tail(trials: u64, t: f64) -> f64 {
    (-2.0 * trials as f64 * t * t).exp()
}

/// Lower bound on the acceptance probability of an `n`-round run, given
/// a per-round activation rate bounded by `z_t < c_t`.
pub fn success_lower_bound(z_t: f64, c_t: f64, n: u64, mode: ExponentMode) -> Result<f64, BoundError> {
    if z_t >= c_t {
        return Err(BoundError::AboveThreshold { z_t, c_t });
    }
    let trials = match mode {
        ExponentMode::PaperN3 => n.saturating_pow(3),
        ExponentMode::HoeffdingN => n,
    };
    Ok((1.0 - hoeffding_tail(trials, c_t - z_t)).clamp(0.0, 1.0))
}

/// Confidence error `exp(−2mnβ_t²)` of the trap-rate estimate.
pub fn gamma_confidence(m: u64, n: u64, beta_t: f64) -> f64 {
    hoeffding_tail(m.saturating_mul(n), beta_t)
}

/// Confidence error `exp(−2mβ²)` of the accept-rate estimate.
pub fn gamma_generic(m: u64, beta: f64) -> f64 {
    hoeffding_tail(m, beta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericScore {
    pub z: f64,
    pub gamma: f64,
}

/// `z = max(0, accepted/m − β)`.
pub fn score_generic(accepted: u64, m: u64, beta: f64) -> GenericScore {
    let z = (accepted as f64 / m as f64 - beta).clamp(0.0, 1.0);
    GenericScore { z, gamma: gamma_generic(m, beta) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizedScore {
    pub z: f64,
    pub z_t: f64,
    pub gamma: f64,
}

/// `z_t = activated/(mn) + β_t`; `z` is the success lower bound when
/// `z_t < c_t` and 0 otherwise.
pub fn score_optimized(activated: u64, m: u64, n: u64, beta_t: f64, c_t: f64, mode: ExponentMode) -> OptimizedScore {
    let z_t = activated as f64 / (m as f64 * n as f64) + beta_t;
    let z = success_lower_bound(z_t, c_t, n, mode).unwrap_or(0.0);
    OptimizedScore { z, z_t, gamma: gamma_confidence(m, n, beta_t) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tail_values() {
        assert_eq!(hoeffding_tail(100, 0.0), 1.0);
        assert_relative_eq!(hoeffding_tail(100, 0.1), (-2.0f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(hoeffding_tail(1000, 0.1), 2.061_153_622e-9, max_relative = 1e-8);
    }

    #[test]
    fn success_bound_values() {
        let paper = success_lower_bound(0.1, 0.25, 5, ExponentMode::PaperN3).unwrap();
        assert_relative_eq!(paper, 0.996_393_4, epsilon = 1e-6);
        let hoeff = success_lower_bound(0.1, 0.25, 5, ExponentMode::HoeffdingN).unwrap();
        assert_relative_eq!(hoeff, 0.201_483_8, epsilon = 1e-6);
        for mode in [ExponentMode::PaperN3, ExponentMode::HoeffdingN] {
            assert!(success_lower_bound(0.25 - 1e-9, 0.25, 5, mode).unwrap() < 1e-6);
            assert!(success_lower_bound(0.25, 0.25, 5, mode).is_err());
        }
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_confidence(10, 100, 0.0), 1.0);
        assert_relative_eq!(gamma_confidence(10, 100, 0.05), 6.737_947e-3, max_relative = 1e-6);
        assert_relative_eq!(gamma_generic(100, 0.1), 0.135_335_28, max_relative = 1e-7);
    }

    #[test]
    fn generic_score_is_clipped() {
        assert_eq!(score_generic(0, 10, 0.1).z, 0.0);
        assert_relative_eq!(score_generic(10, 10, 0.1).z, 0.9);
    }

    #[test]
    fn optimized_score_monotone_in_activations() {
        let mut last = f64::INFINITY;
        for activated in 0..=200 {
            let s = score_optimized(activated, 4, 50, 0.02, 0.25, ExponentMode::HoeffdingN);
            assert!(s.z <= last);
            last = s.z;
        }
        assert_eq!(score_optimized(200, 4, 50, 0.02, 0.25, ExponentMode::PaperN3).z, 0.0);
    }
}
