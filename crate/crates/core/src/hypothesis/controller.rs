//! Lateral controller: a predicted distance error and a yaw error feed two
//! speed-scheduled proportional terms.

use crate::motion::VehicleDynamicState;
use crate::scenario::{Point2, SimulationConfig};
use crate::street::{wrap_angle, LaneDivider, RoadFrame};

/// Steering command in degrees at the wheels, from the distance error in
/// meters and the yaw error in radians.
pub fn steering_command(v: f64, d_path: f64, e_yaw: f64) -> f64 {
    let k = ((-0.018 * v + 1.5) * d_path).abs();
    (k + 0.5) * d_path + (-k + 9.5) * (3.8197 * e_yaw)
}

pub fn prediction_time(v: f64, config: &SimulationConfig) -> f64 {
    (config.prediction_time_base + config.prediction_time_gain * v).clamp(config.prediction_time_min, config.prediction_time_max)
}

/// Tracking errors against a path section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingError {
    /// Positive when the section lies to the left of the predicted CoG.
    pub d_path: f64,
    /// Section direction minus vehicle yaw, wrapped.
    pub e_yaw: f64,
}

/// Errors of the predicted CoG against `section`. `direction` is +1 when the
/// vehicle travels along the road x-axis and -1 against it.
pub fn tracking_error(
    state: &VehicleDynamicState,
    section: &LaneDivider,
    direction: f64,
    frame: &RoadFrame,
    config: &SimulationConfig,
) -> TrackingError {
    let t = prediction_time(state.v, config);
    let course = state.yaw + state.beta;
    let predicted = state.position + Point2::new(course.cos(), course.sin()) * (state.v * t);
    let local = frame.to_road(predicted);
    let (x, side) = section.project(local);
    let mut heading = frame.heading_to_global(section.heading(x));
    if direction < 0.0 {
        heading += std::f64::consts::PI;
    }
    TrackingError {
        d_path: -side * direction,
        e_yaw: wrap_angle(heading - state.yaw),
    }
}

/// Stateful wrapper applying the steering angle and steering rate limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralController {
    pub previous: f64,
    pub max_angle: f64,
    pub max_rate: f64,
}

impl LateralController {
    pub fn new(initial: f64, max_angle: f64, max_rate: f64) -> Self {
        Self {
            previous: initial,
            max_angle,
            max_rate,
        }
    }

    /// Clamps a raw command (radians) and rate-limits it against the
    /// previous output.
    pub fn limit(&mut self, raw: f64, tau: f64) -> f64 {
        let clamped = raw.clamp(-self.max_angle, self.max_angle);
        let step = self.max_rate * tau;
        let out = clamped.clamp(self.previous - step, self.previous + step);
        self.previous = out;
        out
    }

    /// Front steering angle in radians for the current state.
    pub fn steer(
        &mut self,
        state: &VehicleDynamicState,
        section: &LaneDivider,
        direction: f64,
        frame: &RoadFrame,
        config: &SimulationConfig,
    ) -> f64 {
        let err = tracking_error(state, section, direction, frame, config);
        let raw = steering_command(state.v, err.d_path, err.e_yaw).to_radians();
        self.limit(raw, config.step)
    }
}
