//! Trajectory generation. Every hypothesis combines one longitudinal profile
//! with one lateral plan (a complete path for vehicles, a heading for
//! pedestrians) and is rolled out independently of all others.

mod controller;
mod path;
mod profile;

pub use controller::{prediction_time, steering_command, tracking_error, LateralController, TrackingError};
pub use path::{object_direction, reference_path, sample_paths, sections_at, PathSection, PathSpec};
pub use profile::{
    build_profiles, pedestrian_accelerations, pedestrian_headings, profile_targets, slip_for_acceleration, AccelerationProfile, ProfileKind,
};

use serde::{Deserialize, Serialize};

use crate::error::HypothesisError;
use crate::motion::{
    dynamic_speed_floor, integrate_pedestrian, integrate_vehicle, one_track_derivatives, two_track_derivatives, Derivatives,
    VehicleDynamicState,
};
use crate::scenario::{ObjectKind, ObjectState, Point2, SceneObject, SimulationConfig, VehicleParameters};
use crate::street::{associate_lane, LanePosition, RoadModel};

/// Object pose at the end of one time step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub v: f64,
    pub beta: f64,
    /// Front steering angle applied during the step; 0 for pedestrians.
    pub steer: f64,
}

impl Pose {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Pose `k` holds the state at time `(k + 1) * step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub object: usize,
    pub hypothesis: usize,
    pub profile: usize,
    pub path: usize,
    pub poses: Vec<Pose>,
    pub drivable: bool,
}

impl Trajectory {
    pub fn pose_at_time(&self, t: f64, step: f64) -> &Pose {
        let k = ((t / step).round() as usize).clamp(1, self.poses.len()) - 1;
        &self.poses[k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionModel {
    OneTrack,
    TwoTrack,
    Pedestrian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LateralPlan {
    Path(PathSpec),
    Heading(f64),
}

/// All hypotheses of one object plus its reference behavior. Object id 0 is
/// the EGO vehicle; id `k >= 1` is the scenario's `objects[k - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectPlan {
    pub object: usize,
    pub initial: ObjectState,
    pub params: Option<VehicleParameters>,
    pub model: MotionModel,
    pub lane: Option<LanePosition>,
    pub profiles: Vec<AccelerationProfile>,
    pub laterals: Vec<LateralPlan>,
    pub reference: Trajectory,
    /// Acceleration of the reference behavior.
    pub reference_accel: f64,
}

impl ObjectPlan {
    pub fn hypothesis_count(&self) -> usize {
        self.profiles.len() * self.laterals.len()
    }

    /// Hypothesis index to (profile, lateral plan); profile-major.
    pub fn decode(&self, hypothesis: usize) -> (usize, usize) {
        (hypothesis / self.laterals.len(), hypothesis % self.laterals.len())
    }

    pub fn encode(&self, profile: usize, lateral: usize) -> usize {
        profile * self.laterals.len() + lateral
    }

    /// Rolls out one hypothesis into `out`, one pose per step. Returns the
    /// drivable flag.
    pub fn rollout_into(&self, hypothesis: usize, road: &RoadModel, config: &SimulationConfig, out: &mut [Pose]) -> bool {
        let (p, l) = self.decode(hypothesis);
        simulate(
            &self.initial,
            self.params.as_ref(),
            self.model,
            &self.profiles[p],
            &self.laterals[l],
            road,
            config,
            out,
        )
    }

    pub fn rollout(&self, hypothesis: usize, road: &RoadModel, config: &SimulationConfig) -> Trajectory {
        let (profile, path) = self.decode(hypothesis);
        let mut poses = vec![Pose::default(); config.steps()];
        let drivable = self.rollout_into(hypothesis, road, config, &mut poses);
        Trajectory {
            object: self.object,
            hypothesis,
            profile,
            path,
            poses,
            drivable,
        }
    }
}

/// Index of the path section governing time `t`.
pub fn active_section(t: f64, config: &SimulationConfig) -> usize {
    config
        .sampling_instances
        .iter()
        .position(|&s| t < s)
        .unwrap_or(config.sampling_instances.len() - 1)
}

fn on_road(road: &RoadModel, p: Point2) -> bool {
    let local = road.frame.to_road(p);
    let (left, right) = road.outer_bounds();
    local.y <= left.eval(local.x) && local.y >= right.eval(local.x)
}

/// Steps the motion model of one object through the horizon.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    initial: &ObjectState,
    params: Option<&VehicleParameters>,
    model: MotionModel,
    profile: &AccelerationProfile,
    lateral: &LateralPlan,
    road: &RoadModel,
    config: &SimulationConfig,
    out: &mut [Pose],
) -> bool {
    let tau = config.step;
    match (model, lateral) {
        (MotionModel::Pedestrian, LateralPlan::Heading(heading)) => {
            let mut s = *initial;
            for (n, pose) in out.iter_mut().enumerate() {
                let accel = profile.value(n as f64 * tau);
                s = integrate_pedestrian(&s, *heading, accel, tau, config.pedestrian_max_speed);
                *pose = Pose {
                    x: s.position.x,
                    y: s.position.y,
                    yaw: s.yaw,
                    v: s.velocity,
                    beta: 0.0,
                    steer: 0.0,
                };
            }
            true
        }
        (MotionModel::OneTrack | MotionModel::TwoTrack, LateralPlan::Path(path)) => {
            let p = params.expect("vehicles carry parameters");
            simulate_vehicle(initial, p, model, profile, path, road, config, out)
        }
        _ => panic!("motion model {model:?} does not match lateral plan"),
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_vehicle(
    initial: &ObjectState,
    p: &VehicleParameters,
    model: MotionModel,
    profile: &AccelerationProfile,
    path: &PathSpec,
    road: &RoadModel,
    config: &SimulationConfig,
    out: &mut [Pose],
) -> bool {
    let tau = config.step;
    let wheelbase = p.wheelbase();
    let mut s = VehicleDynamicState::from_object(initial);
    let initial_steer = if s.v > 0.1 { (s.yaw_rate * wheelbase / s.v).atan() } else { 0.0 };
    let mut ctl = LateralController::new(
        initial_steer.clamp(-p.max_steering_angle, p.max_steering_angle),
        p.max_steering_angle,
        p.max_steering_rate,
    );
    let min_dynamic = config.min_dynamic_speed.max(dynamic_speed_floor(p, tau));
    let mut drivable = true;

    for (n, pose) in out.iter_mut().enumerate() {
        let t = n as f64 * tau;
        let section = &path.sections[active_section(t, config)];
        let steer = ctl.steer(&s, &section.curve, path.direction, &road.frame, config);
        let command = profile.value(t);
        let dynamic = s.v >= min_dynamic;

        let mut d = match model {
            MotionModel::TwoTrack => two_track_derivatives(&s, steer, command, p, config.friction_coefficient),
            _ => {
                let (beta_rate, yaw_accel) = if dynamic { one_track_derivatives(&s, steer, p) } else { (0.0, 0.0) };
                Derivatives {
                    accel: command,
                    beta_rate,
                    yaw_accel,
                }
            }
        };
        if !dynamic {
            // Kinematic regime: no sideslip dynamics, yaw rate from geometry.
            d.beta_rate = 0.0;
            d.yaw_accel = 0.0;
            s.yaw_rate = s.v * steer.tan() / wheelbase;
        }
        if s.v <= 0.0 && d.accel < 0.0 {
            d.accel = 0.0;
        }

        let mut next = integrate_vehicle(&s, &d, tau);
        if next.v <= 0.0 {
            next.v = 0.0;
            next.accel = 0.0;
            next.ax = 0.0;
            next.ay = 0.0;
        }
        // No reversing, including the residual of the stopping step.
        let heading = Point2::new(s.yaw.cos(), s.yaw.sin());
        if (next.position - s.position).dot(heading) < 0.0 {
            next.position = s.position;
        }
        s = next;

        *pose = Pose {
            x: s.position.x,
            y: s.position.y,
            yaw: s.yaw,
            v: s.v,
            beta: s.beta,
            steer,
        };
        drivable &= on_road(road, s.position);
    }
    drivable
}

fn reference_plan(
    object_id: usize,
    object: &SceneObject,
    road: &RoadModel,
    config: &SimulationConfig,
) -> (MotionModel, AccelerationProfile, LateralPlan, f64) {
    let state = &object.state;
    match state.kind {
        ObjectKind::Pedestrian => (
            MotionModel::Pedestrian,
            AccelerationProfile::constant(0, ProfileKind::Acceleration, 0.0),
            LateralPlan::Heading(state.yaw),
            0.0,
        ),
        ObjectKind::EgoVehicle => (
            MotionModel::TwoTrack,
            AccelerationProfile::constant(0, ProfileKind::Slip, slip_for_acceleration(state.acceleration, config)),
            LateralPlan::Path(reference_path(object_id, state, road, config)),
            state.acceleration,
        ),
        ObjectKind::CoVehicle => (
            MotionModel::OneTrack,
            AccelerationProfile::constant(0, ProfileKind::Acceleration, state.acceleration),
            LateralPlan::Path(reference_path(object_id, state, road, config)),
            state.acceleration,
        ),
    }
}

/// Expected behavior: vehicles keep their current acceleration and track
/// the centerline of their lane; pedestrians walk straight on at constant
/// speed.
pub fn build_reference_trajectory(object_id: usize, object: &SceneObject, road: &RoadModel, config: &SimulationConfig) -> Trajectory {
    let (model, profile, lateral, _) = reference_plan(object_id, object, road, config);
    let mut poses = vec![Pose::default(); config.steps()];
    let drivable = simulate(
        &object.state,
        object.params.as_ref(),
        model,
        &profile,
        &lateral,
        road,
        config,
        &mut poses,
    );
    Trajectory {
        object: object_id,
        hypothesis: 0,
        profile: 0,
        path: 0,
        poses,
        drivable,
    }
}

/// Builds the reference, profiles and lateral plans of one object.
pub fn plan_object(
    object_id: usize,
    object: &SceneObject,
    road: &RoadModel,
    config: &SimulationConfig,
) -> Result<ObjectPlan, HypothesisError> {
    let state = &object.state;
    let (model, _, _, reference_accel) = reference_plan(object_id, object, road, config);
    let reference = build_reference_trajectory(object_id, object, road, config);
    let (profiles, laterals) = match state.kind {
        ObjectKind::Pedestrian => {
            if config.profile_count < 3 {
                return Err(HypothesisError::TooFewProfiles(config.profile_count));
            }
            let profiles = pedestrian_accelerations(config)
                .into_iter()
                .enumerate()
                .map(|(i, a)| AccelerationProfile::constant(i, ProfileKind::Acceleration, a))
                .collect();
            let laterals = pedestrian_headings(config).into_iter().map(LateralPlan::Heading).collect();
            (profiles, laterals)
        }
        kind => {
            let profile_kind = if kind == ObjectKind::EgoVehicle {
                ProfileKind::Slip
            } else {
                ProfileKind::Acceleration
            };
            let profiles = build_profiles(config, profile_kind, state.acceleration)?;
            let laterals = sample_paths(object_id, state, road, &reference, config)
                .into_iter()
                .map(LateralPlan::Path)
                .collect();
            (profiles, laterals)
        }
    };
    Ok(ObjectPlan {
        object: object_id,
        initial: *state,
        params: object.params,
        model,
        lane: associate_lane(state, road).lane,
        profiles,
        laterals,
        reference,
        reference_accel,
    })
}

/// Total trajectory count `o * h_acc * h_co + h_acc * h_ego` for a full
/// three-lane road.
pub fn count_trajectories(co_count: usize, config: &SimulationConfig) -> usize {
    co_count * config.profile_count * config.co_paths + config.profile_count * config.ego_paths()
}
