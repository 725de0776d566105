//! Longitudinal hypotheses: acceleration profiles (one-track), slip profiles
//! (two-track) and the pedestrian acceleration grid.

use serde::{Deserialize, Serialize};

use crate::error::HypothesisError;
use crate::scenario::SimulationConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Output in m/s^2.
    Acceleration,
    /// Longitudinal wheel slip, dimensionless.
    Slip,
}

/// A latency- and jerk-shaped longitudinal command. Before `latency` the
/// output holds `initial`; afterwards it ramps toward `target` at no more
/// than `rate_limit` per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelerationProfile {
    pub id: usize,
    pub kind: ProfileKind,
    pub target: f64,
    pub initial: f64,
    pub latency: f64,
    pub rate_limit: f64,
}

impl AccelerationProfile {
    /// A profile that outputs `value` for all time.
    pub fn constant(id: usize, kind: ProfileKind, value: f64) -> Self {
        Self {
            id,
            kind,
            target: value,
            initial: value,
            latency: 0.0,
            rate_limit: f64::INFINITY,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < self.latency {
            return self.initial;
        }
        let gap = self.target - self.initial;
        let reach = self.rate_limit * (t - self.latency);
        if self.rate_limit.is_infinite() || gap.abs() <= reach {
            self.target
        } else {
            self.initial + reach.copysign(gap)
        }
    }

    /// Target expressed as an acceleration, for scoring against the
    /// reference behavior.
    pub fn target_acceleration(&self, config: &SimulationConfig) -> f64 {
        match self.kind {
            ProfileKind::Acceleration => self.target,
            ProfileKind::Slip => self.target * config.max_acceleration / config.max_slip,
        }
    }
}

/// Profile targets: minimum, equally spaced negative samples, zero and
/// maximum, in ascending order.
pub fn profile_targets(count: usize, max: f64) -> Result<Vec<f64>, HypothesisError> {
    if count < 3 {
        return Err(HypothesisError::TooFewProfiles(count));
    }
    let negatives = count - 2;
    let mut out: Vec<f64> = (0..negatives).map(|k| -max + max * k as f64 / negatives as f64).collect();
    out.push(0.0);
    out.push(max);
    Ok(out)
}

/// Slip equivalent of an acceleration, clipped to the slip range.
pub fn slip_for_acceleration(accel: f64, config: &SimulationConfig) -> f64 {
    (accel * config.max_slip / config.max_acceleration).clamp(-config.max_slip, config.max_slip)
}

/// Builds the `profile_count` profiles of one object. `current_accel` is
/// the object's measured acceleration, held during the latency.
pub fn build_profiles(
    config: &SimulationConfig,
    kind: ProfileKind,
    current_accel: f64,
) -> Result<Vec<AccelerationProfile>, HypothesisError> {
    let (max, initial, rate) = match kind {
        ProfileKind::Acceleration => (config.max_acceleration, current_accel, config.jerk_limit),
        ProfileKind::Slip => (
            config.max_slip,
            slip_for_acceleration(current_accel, config),
            config.jerk_limit * config.max_slip / config.max_acceleration,
        ),
    };
    Ok(profile_targets(config.profile_count, max)?
        .into_iter()
        .enumerate()
        .map(|(id, target)| AccelerationProfile {
            id,
            kind,
            target,
            initial,
            latency: config.profile_latency,
            rate_limit: rate,
        })
        .collect())
}

/// Pedestrian accelerations: `profile_count` values equally spaced over
/// the full symmetric range, both ends included.
pub fn pedestrian_accelerations(config: &SimulationConfig) -> Vec<f64> {
    let n = config.profile_count;
    let max = config.pedestrian_max_acceleration;
    (0..n).map(|k| -max + 2.0 * max * k as f64 / (n - 1) as f64).collect()
}

/// Pedestrian headings: `co_paths` values equally spaced over [0, 2pi).
pub fn pedestrian_headings(config: &SimulationConfig) -> Vec<f64> {
    let n = config.co_paths;
    (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect()
}
