//! Scenario domain types, vehicle classification and input validation.
//!
//! All quantities are SI: meters, seconds, radians. Positions and yaw angles
//! are expressed in the global frame.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    EgoVehicle,
    CoVehicle,
    Pedestrian,
}

impl ObjectKind {
    pub fn is_vehicle(self) -> bool {
        !matches!(self, ObjectKind::Pedestrian)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub kind: ObjectKind,
    pub position: Point2,
    pub yaw: f64,
    pub velocity: f64,
    /// Always 0 for pedestrians.
    pub sideslip: f64,
    pub yaw_rate: f64,
    pub acceleration: f64,
    pub length: f64,
    pub width: f64,
    pub height: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleClass {
    Quadricycle,
    Supermini,
    SmallFamily,
    LargeFamily,
    Executive,
    MultiPurpose,
    OffRoader,
    Cargo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParameters {
    pub class: VehicleClass,
    pub mass: f64,
    pub yaw_inertia: f64,
    pub lf: f64,
    pub lr: f64,
    /// Axle cornering stiffness, N/rad.
    pub cornering_front: f64,
    pub cornering_rear: f64,
    /// Per-wheel longitudinal slip stiffness, N per unit slip.
    pub longitudinal_stiffness: f64,
    pub track_width: f64,
    pub max_steering_angle: f64,
    pub max_steering_rate: f64,
}

impl VehicleParameters {
    pub fn wheelbase(&self) -> f64 {
        self.lf + self.lr
    }
}

#[derive(Debug, Clone, Deserialize)]
struct ClassRow {
    class: VehicleClass,
    tall: bool,
    max_length: f64,
    max_width: f64,
    mass: f64,
    yaw_inertia: f64,
    lf: f64,
    lr: f64,
    cornering_front: f64,
    cornering_rear: f64,
    longitudinal_stiffness: f64,
}

/// The versioned vehicle parameter table shipped in `data/vehicle_classes.json`.
#[derive(Debug, Clone, Deserialize)]
pub struct ClassTable {
    pub version: u32,
    pub tall_height_threshold: f64,
    classes: Vec<ClassRow>,
}

const CLASS_TABLE_JSON: &str = include_str!("../data/vehicle_classes.json");

impl ClassTable {
    pub fn builtin() -> &'static ClassTable {
        static TABLE: OnceLock<ClassTable> = OnceLock::new();
        TABLE.get_or_init(|| serde_json::from_str(CLASS_TABLE_JSON).expect("bundled vehicle class table is valid"))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// (class, max_length, max_width, tall) for every row, in table order.
    pub fn limits(&self) -> impl Iterator<Item = (VehicleClass, f64, f64, bool)> + '_ {
        self.classes.iter().map(|r| (r.class, r.max_length, r.max_width, r.tall))
    }

    fn row(&self, class: VehicleClass) -> &ClassRow {
        self.classes.iter().find(|r| r.class == class).expect("every class has a table row")
    }

    pub fn parameters(&self, class: VehicleClass, length: f64, width: f64, config: &SimulationConfig) -> VehicleParameters {
        let row = self.row(class);
        let (mut lf, mut lr) = (row.lf, row.lr);
        // Axles must sit inside the body.
        let max_wheelbase = 0.8 * length;
        if lf + lr >= max_wheelbase {
            let k = max_wheelbase / (lf + lr);
            lf *= k;
            lr *= k;
        }
        VehicleParameters {
            class,
            mass: row.mass,
            yaw_inertia: row.yaw_inertia,
            lf,
            lr,
            cornering_front: row.cornering_front,
            cornering_rear: row.cornering_rear,
            longitudinal_stiffness: row.longitudinal_stiffness,
            track_width: 0.85 * width,
            max_steering_angle: config.max_steering_angle,
            max_steering_rate: config.max_steering_rate,
        }
    }

    /// Picks the first class in table order whose (inclusive) length and
    /// width limits hold. A measured height at or above the threshold
    /// restricts the search to the tall classes; otherwise only the base
    /// classes are considered.
    pub fn classify(&self, length: f64, width: f64, height: Option<f64>) -> VehicleClass {
        let tall = height.is_some_and(|h| h >= self.tall_height_threshold);
        let mut last = None;
        for row in self.classes.iter().filter(|r| r.tall == tall) {
            if length <= row.max_length && width <= row.max_width {
                return row.class;
            }
            last = Some(row.class);
        }
        last.expect("class table has base and tall rows")
    }
}

/// Classifies a vehicle by its footprint (and height, when measured) and
/// returns the parameter record of the class.
pub fn classify_vehicle(length: f64, width: f64, height: Option<f64>, config: &SimulationConfig) -> VehicleParameters {
    let table = ClassTable::builtin();
    let class = table.classify(length, width, height);
    table.parameters(class, length, width, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionMode {
    /// Mutual vertex-in-polygon test.
    #[default]
    #[serde(rename = "paper")]
    VertexContainment,
    /// Vertex containment plus edge crossings; exact for convex polygons.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub horizon: f64,
    pub step: f64,
    /// Acceleration (or slip) profiles per object.
    pub profile_count: usize,
    /// Complete paths per collision object; also the pedestrian heading count.
    pub co_paths: usize,
    pub own_lane_samples: usize,
    pub neighbor_lane_samples: usize,
    pub sampling_instances: Vec<f64>,

    pub w_acc: f64,
    pub w_str: f64,
    pub accel_score_scale: f64,
    pub lateral_score_scale: f64,
    pub lane_change_penalty: f64,
    pub counter_traffic_penalty: f64,

    pub max_acceleration: f64,
    pub max_slip: f64,
    pub profile_latency: f64,
    pub jerk_limit: f64,

    pub max_steering_angle: f64,
    pub max_steering_rate: f64,
    pub min_dynamic_speed: f64,
    pub friction_coefficient: f64,
    pub prediction_time_base: f64,
    pub prediction_time_gain: f64,
    pub prediction_time_min: f64,
    pub prediction_time_max: f64,

    pub lane_width: f64,
    /// Gap (in lane widths) above which a missing shared divider is synthesized.
    pub divider_gap_ratio: f64,

    pub pedestrian_max_speed: f64,
    pub pedestrian_max_acceleration: f64,
    pub pedestrian_length: f64,
    pub pedestrian_width: f64,

    pub collision_mode: CollisionMode,
    pub footprint_vertices: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            horizon: 2.0,
            step: 0.02,
            profile_count: 6,
            co_paths: 7,
            own_lane_samples: 3,
            neighbor_lane_samples: 2,
            sampling_instances: vec![1.0, 1.5, 2.0],
            w_acc: 0.5,
            w_str: 0.5,
            accel_score_scale: 4.85,
            lateral_score_scale: 1.75,
            lane_change_penalty: 0.25,
            counter_traffic_penalty: 4.0,
            max_acceleration: 9.7,
            max_slip: 0.1,
            profile_latency: 0.2,
            jerk_limit: 30.0,
            max_steering_angle: 0.6,
            max_steering_rate: 0.8,
            min_dynamic_speed: 1.0,
            friction_coefficient: 1.0,
            prediction_time_base: 0.1,
            prediction_time_gain: 1.0 / 50.0,
            prediction_time_min: 0.1,
            prediction_time_max: 0.5,
            lane_width: 3.5,
            divider_gap_ratio: 1.6,
            pedestrian_max_speed: 2.7,
            pedestrian_max_acceleration: 12.0,
            pedestrian_length: 0.5,
            pedestrian_width: 0.5,
            collision_mode: CollisionMode::VertexContainment,
            footprint_vertices: 4,
        }
    }
}

impl SimulationConfig {
    /// Number of time steps in the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.step).round() as usize
    }

    /// Lateral samples per sampling instance when both neighbor lanes exist.
    pub fn max_sections_per_instance(&self) -> usize {
        self.own_lane_samples + 2 * self.neighbor_lane_samples
    }

    /// Complete EGO paths on a full three-lane road.
    pub fn ego_paths(&self) -> usize {
        self.max_sections_per_instance().pow(self.sampling_instances.len() as u32)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |msg: &str| Err(ScenarioError::InvalidConfig(msg.to_string()));
        let finite = [
            self.horizon,
            self.step,
            self.w_acc,
            self.w_str,
            self.accel_score_scale,
            self.lateral_score_scale,
            self.lane_change_penalty,
            self.counter_traffic_penalty,
            self.max_acceleration,
            self.max_slip,
            self.profile_latency,
            self.jerk_limit,
            self.max_steering_angle,
            self.max_steering_rate,
            self.min_dynamic_speed,
            self.friction_coefficient,
            self.prediction_time_base,
            self.prediction_time_gain,
            self.prediction_time_min,
            self.prediction_time_max,
            self.lane_width,
            self.divider_gap_ratio,
            self.pedestrian_max_speed,
            self.pedestrian_max_acceleration,
            self.pedestrian_length,
            self.pedestrian_width,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(ScenarioError::NonFinite("config".into()));
        }
        if self.horizon <= 0.0 || self.step <= 0.0 {
            return bad("horizon and step must be positive");
        }
        let steps = self.horizon / self.step;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) || steps.round() < 1.0 {
            return bad("horizon must be a whole number of steps");
        }
        if self.steps() >= u16::MAX as usize {
            return bad("too many time steps");
        }
        if self.profile_count < 3 {
            return bad("profile_count must be at least 3");
        }
        if self.co_paths == 0 || self.own_lane_samples == 0 {
            return bad("path counts must be positive");
        }
        if self.sampling_instances.is_empty()
            || self.sampling_instances.windows(2).any(|w| w[1] <= w[0])
            || self.sampling_instances[0] <= 0.0
            || *self.sampling_instances.last().unwrap() > self.horizon + 1e-9
        {
            return bad("sampling instances must be ascending within (0, horizon]");
        }
        if self.w_acc < 0.0 || self.w_str < 0.0 || self.w_acc + self.w_str <= 0.0 {
            return bad("scoring weights must be non-negative and not both zero");
        }
        if self.lane_change_penalty < 0.0 || self.counter_traffic_penalty < 1.0 {
            return bad("penalty factors must keep divisors >= 1");
        }
        if self.accel_score_scale <= 0.0 || self.lateral_score_scale <= 0.0 {
            return bad("score scales must be positive");
        }
        if self.max_acceleration <= 0.0 || self.max_slip <= 0.0 || self.jerk_limit <= 0.0 {
            return bad("profile limits must be positive");
        }
        if self.profile_latency < 0.0 {
            return bad("latency must be non-negative");
        }
        if self.max_steering_angle <= 0.0 || self.max_steering_rate <= 0.0 {
            return bad("steering limits must be positive");
        }
        if self.min_dynamic_speed <= 0.0 || self.friction_coefficient <= 0.0 {
            return bad("min_dynamic_speed and friction must be positive");
        }
        if self.lane_width <= 0.0 || self.divider_gap_ratio <= 1.0 {
            return bad("lane width must be positive and gap ratio above 1");
        }
        if self.pedestrian_max_speed < 0.0
            || self.pedestrian_max_acceleration < 0.0
            || self.pedestrian_length <= 0.0
            || self.pedestrian_width <= 0.0
        {
            return bad("pedestrian limits must be positive");
        }
        if !matches!(self.footprint_vertices, 4 | 8) {
            return bad("footprint_vertices must be 4 or 8");
        }
        Ok(())
    }
}

/// An object as it appears in a scenario file, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawObject {
    #[serde(default = "RawObject::default_kind")]
    pub kind: RawKind,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub yaw: f64,
    #[serde(default)]
    pub velocity: f64,
    #[serde(default)]
    pub sideslip: f64,
    #[serde(default)]
    pub yaw_rate: f64,
    #[serde(default)]
    pub acceleration: f64,
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default)]
    pub height: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RawKind {
    Vehicle,
    Pedestrian,
}

impl RawObject {
    fn default_kind() -> RawKind {
        RawKind::Vehicle
    }
}

/// The scenario file document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    #[serde(default)]
    pub timestamp: f64,
    pub ego: Option<RawObject>,
    #[serde(default)]
    pub objects: Vec<RawObject>,
    #[serde(default)]
    pub dividers: Vec<[Point2; 3]>,
    #[serde(default)]
    pub config: SimulationConfig,
}

impl RawScenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Schema(e.to_string()))
    }
}

/// A vehicle or pedestrian with its resolved parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub state: ObjectState,
    /// `None` for pedestrians.
    pub params: Option<VehicleParameters>,
}

/// A validated scenario. Immutable and shareable across workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub timestamp: f64,
    pub ego: SceneObject,
    pub objects: Vec<SceneObject>,
    pub dividers: Vec<[Point2; 3]>,
    pub config: SimulationConfig,
}

impl Scenario {
    pub fn ego_params(&self) -> &VehicleParameters {
        self.ego.params.as_ref().expect("ego is a vehicle")
    }
}

fn check_finite(label: &str, values: &[f64]) -> Result<(), ScenarioError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ScenarioError::NonFinite(label.to_string()))
    }
}

fn resolve_object(raw: &RawObject, kind: ObjectKind, label: &str, config: &SimulationConfig) -> Result<SceneObject, ScenarioError> {
    check_finite(
        label,
        &[raw.x, raw.y, raw.yaw, raw.velocity, raw.sideslip, raw.yaw_rate, raw.acceleration],
    )?;
    for dim in [raw.length, raw.width, raw.height].into_iter().flatten() {
        check_finite(label, &[dim])?;
    }
    if raw.velocity < 0.0 {
        return Err(ScenarioError::InvalidObject(format!("{label}: negative velocity")));
    }

    let (length, width) = match kind {
        ObjectKind::Pedestrian => (
            raw.length.unwrap_or(config.pedestrian_length),
            raw.width.unwrap_or(config.pedestrian_width),
        ),
        _ => match (raw.length, raw.width) {
            (Some(l), Some(w)) => (l, w),
            _ => return Err(ScenarioError::InvalidObject(format!("{label}: vehicles need length and width"))),
        },
    };
    if length <= 0.0 || width <= 0.0 || raw.height.is_some_and(|h| h <= 0.0) {
        return Err(ScenarioError::InvalidObject(format!("{label}: dimensions must be positive")));
    }

    let (velocity, sideslip, params) = match kind {
        ObjectKind::Pedestrian => (raw.velocity.min(config.pedestrian_max_speed), 0.0, None),
        _ => (
            raw.velocity,
            raw.sideslip,
            Some(classify_vehicle(length, width, raw.height, config)),
        ),
    };

    Ok(SceneObject {
        state: ObjectState {
            kind,
            position: Point2::new(raw.x, raw.y),
            yaw: raw.yaw,
            velocity,
            sideslip,
            yaw_rate: raw.yaw_rate,
            acceleration: raw.acceleration,
            length,
            width,
            height: raw.height,
        },
        params,
    })
}

/// Validates a raw scenario: resolves defaults, classifies vehicles, clamps
/// pedestrian speeds, and rejects malformed input.
pub fn validate_scenario(raw: &RawScenario) -> Result<Scenario, ScenarioError> {
    let config = raw.config.clone();
    config.validate()?;
    check_finite("timestamp", &[raw.timestamp])?;

    let ego_raw = raw.ego.as_ref().ok_or(ScenarioError::MissingEgo)?;
    if ego_raw.kind != RawKind::Vehicle {
        return Err(ScenarioError::InvalidObject("ego must be a vehicle".into()));
    }
    let ego = resolve_object(ego_raw, ObjectKind::EgoVehicle, "ego", &config)?;

    let objects = raw
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let kind = match o.kind {
                RawKind::Vehicle => ObjectKind::CoVehicle,
                RawKind::Pedestrian => ObjectKind::Pedestrian,
            };
            resolve_object(o, kind, &format!("objects[{i}]"), &config)
        })
        .collect::<Result<Vec<_>, _>>()?;

    if raw.dividers.len() > 4 {
        return Err(ScenarioError::TooManyDividers(raw.dividers.len()));
    }
    for (i, triplet) in raw.dividers.iter().enumerate() {
        if triplet.iter().any(|p| !p.is_finite()) {
            return Err(ScenarioError::NonFinite(format!("dividers[{i}]")));
        }
        // Abscissae must be pairwise distinct in the road-aligned frame.
        let xs: Vec<f64> = triplet.iter().map(|p| (*p - ego.state.position).rotate(-ego.state.yaw).x).collect();
        let distinct = (0..3).all(|a| ((a + 1)..3).all(|b| (xs[a] - xs[b]).abs() > 1e-6));
        if !distinct {
            return Err(ScenarioError::DegenerateDivider(i));
        }
    }

    Ok(Scenario {
        timestamp: raw.timestamp,
        ego,
        objects,
        dividers: raw.dividers.clone(),
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ego_only() -> RawScenario {
        RawScenario {
            timestamp: 0.0,
            ego: Some(RawObject {
                kind: RawKind::Vehicle,
                x: 0.0,
                y: 0.0,
                yaw: 0.0,
                velocity: 10.0,
                sideslip: 0.0,
                yaw_rate: 0.0,
                acceleration: 0.0,
                length: Some(4.5),
                width: Some(1.8),
                height: None,
            }),
            objects: vec![],
            dividers: vec![],
            config: SimulationConfig::default(),
        }
    }

    #[test]
    fn minimal_scenario_is_valid() {
        let s = validate_scenario(&ego_only()).unwrap();
        assert!(s.objects.is_empty());
        assert_eq!(s.config, SimulationConfig::default());
        assert_eq!(s.config.steps(), 100);
        assert_eq!(s.config.ego_paths(), 343);
    }

    #[test]
    fn pedestrian_speed_is_clamped() {
        let mut raw = ego_only();
        raw.objects.push(RawObject {
            kind: RawKind::Pedestrian,
            x: 10.0,
            y: 5.0,
            velocity: 5.0,
            ..raw.ego.clone().unwrap()
        });
        raw.objects[0].length = None;
        raw.objects[0].width = None;
        let s = validate_scenario(&raw).unwrap();
        let ped = &s.objects[0];
        assert_eq!(ped.state.velocity, 2.7);
        assert_eq!((ped.state.length, ped.state.width), (0.5, 0.5));
        assert!(ped.params.is_none());
    }

    #[test]
    fn rejects_missing_ego() {
        let mut raw = ego_only();
        raw.ego = None;
        assert_eq!(validate_scenario(&raw), Err(ScenarioError::MissingEgo));
    }

    #[test]
    fn rejects_non_finite() {
        let mut raw = ego_only();
        raw.ego.as_mut().unwrap().velocity = f64::NAN;
        assert!(matches!(validate_scenario(&raw), Err(ScenarioError::NonFinite(_))));
    }

    #[test]
    fn rejects_degenerate_divider() {
        let mut raw = ego_only();
        let p = Point2::new(5.0, 1.75);
        raw.dividers.push([p, p, Point2::new(20.0, 1.75)]);
        assert_eq!(validate_scenario(&raw), Err(ScenarioError::DegenerateDivider(0)));
    }

    #[test]
    fn rejects_too_many_dividers() {
        let mut raw = ego_only();
        for k in 0..5 {
            let y = k as f64 * 3.5;
            raw.dividers.push([Point2::new(0.0, y), Point2::new(50.0, y), Point2::new(20.0, y)]);
        }
        assert_eq!(validate_scenario(&raw), Err(ScenarioError::TooManyDividers(5)));
    }

    #[test]
    fn rejects_fractional_step_count() {
        let mut raw = ego_only();
        raw.config.step = 0.03;
        assert!(matches!(validate_scenario(&raw), Err(ScenarioError::InvalidConfig(_))));
    }

    #[test]
    fn smallest_car_is_quadricycle() {
        let p = classify_vehicle(3.13, 1.46, None, &SimulationConfig::default());
        assert_eq!(p.class, VehicleClass::Quadricycle);
        assert!(p.lf + p.lr < 3.13);
    }

    #[test]
    fn large_tall_vehicle_is_cargo() {
        let p = classify_vehicle(9.0, 2.5, Some(3.2), &SimulationConfig::default());
        assert_eq!(p.class, VehicleClass::Cargo);
    }

    #[test]
    fn height_below_threshold_uses_base_classes() {
        let table = ClassTable::builtin();
        assert_eq!(table.classify(9.0, 2.5, Some(1.5)), VehicleClass::MultiPurpose);
        assert_eq!(table.classify(9.0, 2.5, None), VehicleClass::MultiPurpose);
        assert_eq!(table.classify(4.6, 1.9, Some(1.95)), VehicleClass::OffRoader);
    }

    #[test]
    fn boundary_ties_resolve_to_lower_class() {
        let table = ClassTable::builtin();
        let limits: Vec<_> = table.limits().collect();
        assert_eq!(limits.len(), 8);
        for (idx, &(class, max_len, max_w, tall)) in limits.iter().enumerate() {
            if max_len > 1e8 {
                continue;
            }
            let height = tall.then_some(2.5);
            // Exactly on both limits stays in this class.
            assert_eq!(table.classify(max_len, max_w, height), class);
            // Just past the length limit moves to a later class.
            let next = table.classify(max_len + 1e-9, max_w, height);
            let pos = limits.iter().position(|l| l.0 == next).unwrap();
            assert!(pos > idx, "{class:?} -> {next:?}");
        }
    }

    #[test]
    fn scenario_round_trips_through_json() {
        let mut raw = ego_only();
        raw.objects.push(RawObject {
            x: 30.123456789,
            y: -1.1,
            yaw: 0.1,
            ..raw.ego.clone().unwrap()
        });
        let s = validate_scenario(&raw).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}
