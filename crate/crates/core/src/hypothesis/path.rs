//! Lateral hypotheses: path sections sampled across the available lanes at
//! each sampling instance, chained into complete paths.

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::scenario::{ObjectKind, ObjectState, SimulationConfig};
use crate::street::{associate_lane, offset_curve, LaneDivider, LanePosition, RoadModel, TrafficDirection};

/// Curve parallel to a lane divider through one lateral sample point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSection {
    pub curve: LaneDivider,
    pub lane: LanePosition,
    /// Lateral position of the sample point as a fraction of the lane width,
    /// measured from the right divider.
    pub fraction: f64,
}

/// One complete path: one section per sampling instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub object: usize,
    pub sections: Vec<PathSection>,
    pub start_lane: LanePosition,
    /// +1 along the road x-axis, -1 against it.
    pub direction: f64,
    /// Some section lies on a lane whose traffic runs against the object.
    pub counter_traffic: bool,
}

impl PathSpec {
    /// Lane ids traversed, starting lane first.
    pub fn lanes(&self) -> Vec<LanePosition> {
        std::iter::once(self.start_lane)
            .chain(self.sections.iter().map(|s| s.lane))
            .collect()
    }

    pub fn lane_changes(&self) -> usize {
        self.lanes().windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Sample fractions for a lane with `n` samples: equally spaced strictly
/// inside the lane.
fn fractions(n: usize) -> impl Iterator<Item = f64> {
    (0..n).rev().map(move |i| (i + 1) as f64 / (n + 1) as f64)
}

/// Sections at road-frame abscissa `x` for an object on `own`: the own lane
/// gets `own_lane_samples`, every existing neighbor `neighbor_lane_samples`.
/// Ordered left to right.
pub fn sections_at(road: &RoadModel, own: LanePosition, x: f64, config: &SimulationConfig) -> Vec<PathSection> {
    let neighbors: Vec<LanePosition> = road.neighbors(own).iter().map(|l| l.position).collect();
    let mut out = Vec::with_capacity(config.max_sections_per_instance());
    for lane in &road.lanes {
        let n = if lane.position == own {
            config.own_lane_samples
        } else if neighbors.contains(&lane.position) {
            config.neighbor_lane_samples
        } else {
            continue;
        };
        let width = lane.width(x);
        for f in fractions(n) {
            out.push(PathSection {
                curve: offset_curve(&lane.right, f * width),
                lane: lane.position,
                fraction: f,
            });
        }
    }
    out
}

/// Travel direction of an object relative to the road and the matching
/// traffic direction label.
pub fn object_direction(object: &ObjectState, road: &RoadModel) -> (f64, TrafficDirection) {
    if object.kind == ObjectKind::EgoVehicle {
        return (1.0, TrafficDirection::WithEgo);
    }
    let sign = road.travel_sign(object);
    let dir = if sign < 0.0 {
        TrafficDirection::Counter
    } else {
        TrafficDirection::WithEgo
    };
    (sign, dir)
}

/// Samples complete paths for a vehicle. The lanes are sampled at the
/// reference positions of every sampling instance. The EGO vehicle gets
/// every combination of sections across instances; collision objects get
/// one path per lateral slot.
pub fn sample_paths(
    object_id: usize,
    object: &ObjectState,
    road: &RoadModel,
    reference: &Trajectory,
    config: &SimulationConfig,
) -> Vec<PathSpec> {
    let own = associate_lane(object, road)
        .lane
        .expect("vehicles are always associated with a lane");
    let (direction, traffic) = object_direction(object, road);

    let per_instance: Vec<Vec<PathSection>> = config
        .sampling_instances
        .iter()
        .map(|&t| {
            let pose = reference.pose_at_time(t, config.step);
            let x = road.frame.to_road(pose.position()).x;
            sections_at(road, own, x, config)
        })
        .collect();
    let slots = per_instance[0].len();

    let counter = |sections: &[PathSection]| sections.iter().any(|s| road.lane(s.lane).is_some_and(|l| l.direction != traffic));
    let make = |sections: Vec<PathSection>| PathSpec {
        object: object_id,
        counter_traffic: counter(&sections),
        sections,
        start_lane: own,
        direction,
    };

    if object.kind == ObjectKind::EgoVehicle {
        let n = per_instance.len();
        let total = slots.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                // First instance is the most significant digit.
                let mut digits = vec![0; n];
                for k in (0..n).rev() {
                    digits[k] = idx % slots;
                    idx /= slots;
                }
                make(digits.iter().enumerate().map(|(k, &d)| per_instance[k][d]).collect())
            })
            .collect()
    } else {
        (0..slots).map(|s| make(per_instance.iter().map(|sec| sec[s]).collect())).collect()
    }
}

/// Reference path: the centerline of the object's lane at every instance.
pub fn reference_path(object_id: usize, object: &ObjectState, road: &RoadModel, config: &SimulationConfig) -> PathSpec {
    let own = associate_lane(object, road)
        .lane
        .expect("vehicles are always associated with a lane");
    let lane = road.lane(own).expect("associated lane exists");
    let (direction, _) = object_direction(object, road);
    let section = PathSection {
        curve: lane.centerline(),
        lane: own,
        fraction: 0.5,
    };
    PathSpec {
        object: object_id,
        sections: vec![section; config.sampling_instances.len()],
        start_lane: own,
        direction,
        counter_traffic: false,
    }
}
