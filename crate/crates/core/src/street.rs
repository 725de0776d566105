//! Street data processing: lane-divider fits, lane topology and lane
//! association.
//!
//! Everything here works in the road-aligned frame: the origin sits at the
//! EGO position and the x-axis points along the EGO yaw, so forward-looking
//! divider detections are single-valued functions `y(x)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::StreetError;
use crate::scenario::{ObjectKind, ObjectState, Point2, Scenario, SimulationConfig};

/// Rigid transform between the global frame and the road-aligned frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadFrame {
    pub origin: Point2,
    pub yaw: f64,
}

impl RoadFrame {
    pub fn at(state: &ObjectState) -> Self {
        Self {
            origin: state.position,
            yaw: state.yaw,
        }
    }

    pub fn to_road(&self, p: Point2) -> Point2 {
        (p - self.origin).rotate(-self.yaw)
    }

    pub fn to_global(&self, p: Point2) -> Point2 {
        p.rotate(self.yaw) + self.origin
    }

    pub fn heading_to_road(&self, yaw: f64) -> f64 {
        wrap_angle(yaw - self.yaw)
    }

    pub fn heading_to_global(&self, heading: f64) -> f64 {
        wrap_angle(heading + self.yaw)
    }
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a % TAU;
    if r <= -PI {
        r += TAU;
    } else if r > PI {
        r -= TAU;
    }
    r
}

/// Solves a 3x3 linear system by Gauss-Jordan elimination with partial
/// pivoting. Returns `None` when the system is singular.
#[allow(clippy::needless_range_loop)]
pub fn gauss_jordan3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    let scale = m.iter().flat_map(|row| row[..3].iter()).fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        if m[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col];
        for k in col..4 {
            m[col][k] /= p;
        }
        for row in 0..3 {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for k in col..4 {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    Some([m[0][3], m[1][3], m[2][3]])
}

/// A lane divider `y = a x^2 + b x + c` in the road-aligned frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaneDivider {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x_near: f64,
    pub x_far: f64,
}

impl LaneDivider {
    pub fn straight(y: f64, x_near: f64, x_far: f64) -> Self {
        Self {
            a: 0.0,
            b: 0.0,
            c: y,
            x_near,
            x_far,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    pub fn slope(&self, x: f64) -> f64 {
        2.0 * self.a * x + self.b
    }

    /// Tangent direction in the road frame.
    pub fn heading(&self, x: f64) -> f64 {
        self.slope(x).atan()
    }

    /// Coefficient-wise midpoint of two curves; the range is the overlap.
    pub fn midway(&self, other: &LaneDivider) -> LaneDivider {
        LaneDivider {
            a: 0.5 * (self.a + other.a),
            b: 0.5 * (self.b + other.b),
            c: 0.5 * (self.c + other.c),
            x_near: self.x_near.max(other.x_near),
            x_far: self.x_far.min(other.x_far),
        }
    }

    /// Closest point on the curve to `p`. Returns the abscissa of the foot
    /// point and the signed distance, positive when `p` lies to the left
    /// (+y side) of the curve.
    pub fn project(&self, p: Point2) -> (f64, f64) {
        let mut x = p.x;
        for _ in 0..6 {
            let q = self.eval(x);
            let dq = self.slope(x);
            let g = (x - p.x) + (q - p.y) * dq;
            let dg = 1.0 + dq * dq + (q - p.y) * 2.0 * self.a;
            if dg <= 1e-3 {
                break;
            }
            let dx = g / dg;
            x -= dx;
            if dx.abs() < 1e-12 {
                break;
            }
        }
        let foot = Point2::new(x, self.eval(x));
        let dq = self.slope(x);
        let normal = Point2::new(-dq, 1.0) * (1.0 / (1.0 + dq * dq).sqrt());
        let diff = p - foot;
        let dist = diff.norm();
        let side = diff.dot(normal);
        (x, if side < 0.0 { -dist } else { dist })
    }
}

/// Fits the unique quadratic through three road-frame points.
pub fn fit_divider(p1: Point2, p2: Point2, p3: Point2) -> Result<LaneDivider, StreetError> {
    let row = |p: Point2| [p.x * p.x, p.x, 1.0, p.y];
    let [a, b, c] = gauss_jordan3([row(p1), row(p2), row(p3)]).ok_or(StreetError::DegenerateDivider)?;
    let xs = [p1.x, p2.x, p3.x];
    let x_near = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_far = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(LaneDivider { a, b, c, x_near, x_far })
}

const OFFSET_SAMPLES: usize = 9;

/// Approximates the curve at constant perpendicular distance `offset` from
/// `divider` (positive to the left) by a least-squares quadratic through
/// sampled exact offset points.
pub fn offset_curve(divider: &LaneDivider, offset: f64) -> LaneDivider {
    if offset == 0.0 {
        return *divider;
    }
    if divider.a == 0.0 {
        // Straight line: the offset is again a line.
        let k = (1.0 + divider.b * divider.b).sqrt();
        let shift = Point2::new(-divider.b, 1.0) * (offset / k);
        return LaneDivider {
            a: 0.0,
            b: divider.b,
            c: divider.c + offset * k,
            x_near: divider.x_near + shift.x,
            x_far: divider.x_far + shift.x,
        };
    }
    let span = divider.x_far - divider.x_near;
    let samples: Vec<Point2> = (0..OFFSET_SAMPLES)
        .map(|i| {
            let x = divider.x_near + span * i as f64 / (OFFSET_SAMPLES - 1) as f64;
            let dq = divider.slope(x);
            let n = Point2::new(-dq, 1.0) * (1.0 / (1.0 + dq * dq).sqrt());
            Point2::new(x, divider.eval(x)) + n * offset
        })
        .collect();
    let x_min = samples.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let x_max = samples.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);

    // Least squares in a centered, scaled abscissa keeps the normal
    // equations well conditioned.
    let mid = 0.5 * (x_min + x_max);
    let half = (0.5 * (x_max - x_min)).max(1e-9);
    let mut ata = [[0.0f64; 4]; 3];
    for p in &samples {
        let u = (p.x - mid) / half;
        let basis = [u * u, u, 1.0];
        for r in 0..3 {
            for c in 0..3 {
                ata[r][c] += basis[r] * basis[c];
            }
            ata[r][3] += basis[r] * p.y;
        }
    }
    let [al, be, ga] = gauss_jordan3(ata).expect("distinct sample abscissae");
    let h2 = half * half;
    LaneDivider {
        a: al / h2,
        b: be / half - 2.0 * al * mid / h2,
        c: ga - be * mid / half + al * mid * mid / h2,
        x_near: x_min,
        x_far: x_max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LanePosition {
    Left,
    Ego,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficDirection {
    WithEgo,
    Counter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lane {
    pub position: LanePosition,
    /// Boundary on the +y side.
    pub left: LaneDivider,
    pub right: LaneDivider,
    pub direction: TrafficDirection,
}

impl Lane {
    /// Vertical extent of the lane at `x`.
    pub fn vertical_width(&self, x: f64) -> f64 {
        self.left.eval(x) - self.right.eval(x)
    }

    /// Width measured perpendicular to the right divider.
    pub fn width(&self, x: f64) -> f64 {
        self.vertical_width(x) * self.right.heading(x).cos()
    }

    pub fn centerline(&self) -> LaneDivider {
        self.left.midway(&self.right)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.y >= self.right.eval(p.x) && p.y <= self.left.eval(p.x)
    }

    /// Lateral distance from `p` to the lane, 0 when inside.
    fn distance(&self, p: Point2) -> f64 {
        let (l, r) = (self.left.eval(p.x), self.right.eval(p.x));
        if p.y > l {
            p.y - l
        } else if p.y < r {
            r - p.y
        } else {
            0.0
        }
    }
}

/// Road model with up to three lanes, ordered left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadModel {
    pub frame: RoadFrame,
    pub lanes: Vec<Lane>,
    /// Dividers inserted midway across gaps wider than a lane.
    pub synthesized_dividers: usize,
    pub virtual_ego_lane: bool,
}

const VIRTUAL_RANGE: (f64, f64) = (-100.0, 300.0);

impl RoadModel {
    pub fn lane(&self, position: LanePosition) -> Option<&Lane> {
        self.lanes.iter().find(|l| l.position == position)
    }

    pub fn ego_lane(&self) -> &Lane {
        self.lane(LanePosition::Ego).expect("road always has an ego lane")
    }

    /// Lanes directly adjacent to `position`.
    pub fn neighbors(&self, position: LanePosition) -> Vec<&Lane> {
        let idx = self.lanes.iter().position(|l| l.position == position).expect("lane exists");
        let mut out = Vec::with_capacity(2);
        if idx > 0 {
            out.push(&self.lanes[idx - 1]);
        }
        if idx + 1 < self.lanes.len() {
            out.push(&self.lanes[idx + 1]);
        }
        out
    }

    /// Outermost dividers, left then right.
    pub fn outer_bounds(&self) -> (&LaneDivider, &LaneDivider) {
        (&self.lanes[0].left, &self.lanes[self.lanes.len() - 1].right)
    }

    /// Travel direction sign of `state` along the road: +1 with the road
    /// x-axis, -1 against it.
    pub fn travel_sign(&self, state: &ObjectState) -> f64 {
        let p = self.frame.to_road(state.position);
        let tangent = self.ego_lane().centerline().heading(p.x);
        let rel = self.frame.heading_to_road(state.yaw) - tangent;
        if rel.cos() < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Fits every divider triplet of the scenario in the road-aligned frame.
/// The fits are independent and run in parallel.
pub fn fit_scenario_dividers(scenario: &Scenario) -> Result<Vec<LaneDivider>, StreetError> {
    let frame = RoadFrame::at(&scenario.ego.state);
    scenario
        .dividers
        .par_iter()
        .map(|t| fit_divider(frame.to_road(t[0]), frame.to_road(t[1]), frame.to_road(t[2])))
        .collect()
}

/// Assembles the lane topology around the EGO vehicle. Adjacent divider
/// pairs form lanes; only the EGO lane and its immediate neighbors are kept.
/// Without EGO-lane information a virtual lane of legal width is generated.
pub fn build_road(dividers: &[LaneDivider], ego: &ObjectState, config: &SimulationConfig) -> Result<RoadModel, StreetError> {
    let frame = RoadFrame::at(ego);
    let w = config.lane_width;

    let mut order: Vec<usize> = (0..dividers.len()).collect();
    order.sort_by(|&i, &j| dividers[j].eval(0.0).total_cmp(&dividers[i].eval(0.0)));

    // Adjacent dividers must not cross inside their common range.
    for pair in order.windows(2) {
        let (upper, lower) = (&dividers[pair[0]], &dividers[pair[1]]);
        let lo = upper.x_near.max(lower.x_near);
        let hi = upper.x_far.min(lower.x_far);
        let samples = if hi > lo { 33 } else { 1 };
        for k in 0..samples {
            let x = if samples == 1 {
                0.0
            } else {
                lo + (hi - lo) * k as f64 / (samples - 1) as f64
            };
            if upper.eval(x) - lower.eval(x) <= 0.0 {
                let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                return Err(StreetError::InconsistentRoad(a, b));
            }
        }
    }

    let mut sorted: Vec<LaneDivider> = Vec::with_capacity(order.len() + 2);
    let mut synthesized = 0;
    for (k, &i) in order.iter().enumerate() {
        if k > 0 {
            let prev = *sorted.last().unwrap();
            let gap = prev.eval(0.0) - dividers[i].eval(0.0);
            if gap > config.divider_gap_ratio * w {
                sorted.push(prev.midway(&dividers[i]));
                synthesized += 1;
            }
        }
        sorted.push(dividers[i]);
    }

    // Lanes from adjacent divider pairs, left to right.
    let mut lanes: Vec<(LaneDivider, LaneDivider)> = sorted.windows(2).map(|p| (p[0], p[1])).collect();

    let ego_idx = lanes
        .iter()
        .position(|(l, r)| r.eval(0.0) <= 0.0 && 0.0 <= l.eval(0.0))
        .map(|first| {
            // EGO exactly on a shared divider: it drives straight along the road
            // frame, so the keep-right tie-break applies.
            let second = first + 1;
            if second < lanes.len() && lanes[second].1.eval(0.0) <= 0.0 && 0.0 <= lanes[second].0.eval(0.0) {
                second
            } else {
                first
            }
        });

    let mut virtual_ego_lane = false;
    let ego_idx = match ego_idx {
        Some(i) => i,
        None => {
            virtual_ego_lane = true;
            // Nearest divider on either side within one lane width.
            let left = sorted
                .iter()
                .enumerate()
                .filter(|(_, d)| d.eval(0.0) > 0.0 && d.eval(0.0) <= w)
                .min_by(|a, b| a.1.eval(0.0).total_cmp(&b.1.eval(0.0)));
            let right = sorted
                .iter()
                .enumerate()
                .filter(|(_, d)| d.eval(0.0) < 0.0 && d.eval(0.0) >= -w)
                .max_by(|a, b| a.1.eval(0.0).total_cmp(&b.1.eval(0.0)));
            match (left, right) {
                (Some((i, l)), _) => {
                    // Keep the lanes left of this divider as neighbors.
                    let l = *l;
                    lanes.truncate(i);
                    lanes.push((l, offset_curve(&l, -w)));
                    lanes.len() - 1
                }
                (None, Some((i, r))) => {
                    let r = *r;
                    let mut rest: Vec<_> = lanes.split_off(i);
                    rest.insert(0, (offset_curve(&r, w), r));
                    lanes = rest;
                    0
                }
                (None, None) => {
                    lanes = vec![(
                        LaneDivider::straight(0.5 * w, VIRTUAL_RANGE.0, VIRTUAL_RANGE.1),
                        LaneDivider::straight(-0.5 * w, VIRTUAL_RANGE.0, VIRTUAL_RANGE.1),
                    )];
                    0
                }
            }
        }
    };

    let mut out = Vec::with_capacity(3);
    let make = |pos, (left, right): (LaneDivider, LaneDivider)| Lane {
        position: pos,
        left,
        right,
        direction: TrafficDirection::WithEgo,
    };
    if ego_idx > 0 {
        out.push(make(LanePosition::Left, lanes[ego_idx - 1]));
    }
    out.push(make(LanePosition::Ego, lanes[ego_idx]));
    if ego_idx + 1 < lanes.len() {
        out.push(make(LanePosition::Right, lanes[ego_idx + 1]));
    }

    Ok(RoadModel {
        frame,
        lanes: out,
        synthesized_dividers: synthesized,
        virtual_ego_lane,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaneAssociation {
    pub lane: Option<LanePosition>,
    /// Vehicle CoG outside every modeled lane; `lane` is the nearest one.
    pub off_road: bool,
}

/// Associates an object with a lane by the location of its CoG. The EGO
/// vehicle is always on the EGO lane and pedestrians are never associated.
pub fn associate_lane(object: &ObjectState, road: &RoadModel) -> LaneAssociation {
    match object.kind {
        ObjectKind::EgoVehicle => LaneAssociation {
            lane: Some(LanePosition::Ego),
            off_road: false,
        },
        ObjectKind::Pedestrian => LaneAssociation {
            lane: None,
            off_road: false,
        },
        ObjectKind::CoVehicle => {
            let p = road.frame.to_road(object.position);
            let inside: Vec<&Lane> = road.lanes.iter().filter(|l| l.contains(p)).collect();
            match inside.as_slice() {
                [only] => LaneAssociation {
                    lane: Some(only.position),
                    off_road: false,
                },
                [left, right, ..] => {
                    // On the shared divider: pick the lane the vehicle is heading into.
                    let rel = road.frame.heading_to_road(object.yaw) - left.right.heading(p.x);
                    let lane = if rel.sin() > 0.0 { left } else { right };
                    LaneAssociation {
                        lane: Some(lane.position),
                        off_road: false,
                    }
                }
                [] => {
                    let nearest = road
                        .lanes
                        .iter()
                        .min_by(|a, b| a.distance(p).total_cmp(&b.distance(p)))
                        .expect("road has lanes");
                    LaneAssociation {
                        lane: Some(nearest.position),
                        off_road: true,
                    }
                }
            }
        }
    }
}

/// Marks lanes as counter traffic when the vehicles associated with them
/// mostly travel against the EGO direction. The EGO lane always runs with
/// the EGO vehicle.
pub fn infer_lane_directions(road: &mut RoadModel, vehicles: &[(ObjectState, LaneAssociation)]) {
    let mut votes = [0i32; 3];
    for (state, assoc) in vehicles {
        if !state.kind.is_vehicle() || assoc.off_road {
            continue;
        }
        if let Some(lane) = assoc.lane {
            votes[lane as usize] += if road.travel_sign(state) < 0.0 { -1 } else { 1 };
        }
    }
    for lane in road.lanes.iter_mut() {
        lane.direction = if lane.position != LanePosition::Ego && votes[lane.position as usize] < 0 {
            TrafficDirection::Counter
        } else {
            TrafficDirection::WithEgo
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ego() -> ObjectState {
        ObjectState {
            kind: ObjectKind::EgoVehicle,
            position: Point2::new(0.0, 0.0),
            yaw: 0.0,
            velocity: 15.0,
            sideslip: 0.0,
            yaw_rate: 0.0,
            acceleration: 0.0,
            length: 4.5,
            width: 1.8,
            height: None,
        }
    }

    fn straight(y: f64) -> LaneDivider {
        LaneDivider::straight(y, 0.0, 80.0)
    }

    fn co_at(x: f64, y: f64, yaw: f64) -> ObjectState {
        ObjectState {
            kind: ObjectKind::CoVehicle,
            position: Point2::new(x, y),
            yaw,
            ..ego()
        }
    }

    #[test]
    fn fit_through_parabola() {
        let d = fit_divider(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 4.0)).unwrap();
        assert!((d.a - 1.0).abs() < 1e-12 && d.b.abs() < 1e-12 && d.c.abs() < 1e-12);
        assert_eq!((d.x_near, d.x_far), (0.0, 2.0));
    }

    #[test]
    fn fit_constant_divider() {
        let d = fit_divider(Point2::new(0.0, 1.0), Point2::new(1.0, 1.0), Point2::new(2.0, 1.0)).unwrap();
        assert!(d.a.abs() < 1e-12 && d.b.abs() < 1e-12 && (d.c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_abscissae_are_degenerate() {
        let p = Point2::new(3.0, 1.0);
        assert_eq!(fit_divider(p, p, Point2::new(5.0, 2.0)), Err(StreetError::DegenerateDivider));
        assert_eq!(
            fit_divider(Point2::new(3.0, 0.0), Point2::new(3.0, 1.0), Point2::new(5.0, 2.0)),
            Err(StreetError::DegenerateDivider)
        );
    }

    #[test]
    fn zero_offset_is_identity() {
        let d = fit_divider(Point2::new(0.0, 0.0), Point2::new(30.0, 1.0), Point2::new(60.0, 4.0)).unwrap();
        assert_eq!(offset_curve(&d, 0.0), d);
    }

    #[test]
    fn straight_offset_shifts_constant() {
        let d = straight(1.75);
        let o = offset_curve(&d, 2.0);
        assert_eq!((o.a, o.b), (0.0, 0.0));
        assert!((o.c - 3.75).abs() < 1e-12);
    }

    #[test]
    fn projection_signed_distance() {
        let d = straight(1.0);
        let (x, dist) = d.project(Point2::new(5.0, 3.0));
        assert!((x - 5.0).abs() < 1e-12);
        assert!((dist - 2.0).abs() < 1e-12);
        assert!(d.project(Point2::new(5.0, -1.0)).1 < 0.0);
    }

    #[test]
    fn four_dividers_make_three_lanes() {
        let ds = [straight(5.25), straight(1.75), straight(-1.75), straight(-5.25)];
        let road = build_road(&ds, &ego(), &SimulationConfig::default()).unwrap();
        let pos: Vec<_> = road.lanes.iter().map(|l| l.position).collect();
        assert_eq!(pos, vec![LanePosition::Left, LanePosition::Ego, LanePosition::Right]);
        assert!(!road.virtual_ego_lane);
        assert_eq!(road.lanes[0].right, road.lanes[1].left);
        assert_eq!(road.lanes[1].right, road.lanes[2].left);
    }

    #[test]
    fn no_dividers_gives_virtual_lane() {
        let mut e = ego();
        e.yaw = 0.7;
        e.position = Point2::new(10.0, -3.0);
        let road = build_road(&[], &e, &SimulationConfig::default()).unwrap();
        assert_eq!(road.lanes.len(), 1);
        assert!(road.virtual_ego_lane);
        let lane = road.ego_lane();
        assert!((lane.width(0.0) - 3.5).abs() < 1e-12);
        assert!(lane.centerline().eval(20.0).abs() < 1e-12);
        assert_eq!(road.frame.yaw, 0.7);
    }

    #[test]
    fn two_dividers_single_lane() {
        let road = build_road(&[straight(1.75), straight(-1.75)], &ego(), &SimulationConfig::default()).unwrap();
        assert_eq!(road.lanes.len(), 1);
        assert!(road.neighbors(LanePosition::Ego).is_empty());
    }

    #[test]
    fn crossing_dividers_are_rejected() {
        let a = LaneDivider {
            a: 0.0,
            b: -0.1,
            c: 1.0,
            x_near: 0.0,
            x_far: 80.0,
        };
        let b = straight(-1.0);
        assert!(matches!(
            build_road(&[a, b], &ego(), &SimulationConfig::default()),
            Err(StreetError::InconsistentRoad(0, 1))
        ));
    }

    #[test]
    fn missing_shared_divider_is_synthesized() {
        let ds = [straight(5.25), straight(-1.75), straight(-5.25)];
        let road = build_road(&ds, &ego(), &SimulationConfig::default()).unwrap();
        assert_eq!(road.synthesized_dividers, 1);
        assert_eq!(road.lanes.len(), 3);
        assert!((road.ego_lane().left.c - 1.75).abs() < 1e-12);
    }

    #[test]
    fn single_divider_builds_virtual_lane_against_it() {
        let road = build_road(&[straight(1.75)], &ego(), &SimulationConfig::default()).unwrap();
        assert!(road.virtual_ego_lane);
        let lane = road.ego_lane();
        assert!((lane.left.c - 1.75).abs() < 1e-12);
        assert!((lane.right.c + 1.75).abs() < 1e-12);
    }

    #[test]
    fn association_rules() {
        let ds = [straight(5.25), straight(1.75), straight(-1.75), straight(-5.25)];
        let road = build_road(&ds, &ego(), &SimulationConfig::default()).unwrap();

        let mut e = ego();
        e.position = Point2::new(0.0, 0.0);
        assert_eq!(associate_lane(&e, &road).lane, Some(LanePosition::Ego));

        let mut ped = co_at(20.0, 3.0, 0.0);
        ped.kind = ObjectKind::Pedestrian;
        assert_eq!(associate_lane(&ped, &road).lane, None);

        assert_eq!(associate_lane(&co_at(20.0, 3.0, 0.0), &road).lane, Some(LanePosition::Left));
        assert_eq!(associate_lane(&co_at(20.0, -3.0, 0.0), &road).lane, Some(LanePosition::Right));

        let off = associate_lane(&co_at(20.0, 9.0, 0.0), &road);
        assert_eq!(off.lane, Some(LanePosition::Left));
        assert!(off.off_road);
    }

    #[test]
    fn shared_divider_tie_break_follows_yaw() {
        let ds = [straight(5.25), straight(1.75), straight(-1.75), straight(-5.25)];
        let road = build_road(&ds, &ego(), &SimulationConfig::default()).unwrap();
        assert_eq!(associate_lane(&co_at(20.0, 1.75, 0.1), &road).lane, Some(LanePosition::Left));
        assert_eq!(associate_lane(&co_at(20.0, 1.75, -0.1), &road).lane, Some(LanePosition::Ego));
        // Straight along the divider: keep right.
        assert_eq!(associate_lane(&co_at(20.0, 1.75, 0.0), &road).lane, Some(LanePosition::Ego));
        // Oncoming and turning towards +y.
        assert_eq!(
            associate_lane(&co_at(20.0, 1.75, std::f64::consts::PI - 0.1), &road).lane,
            Some(LanePosition::Left)
        );
    }

    #[test]
    fn oncoming_lane_is_counter_traffic() {
        let ds = [straight(5.25), straight(1.75), straight(-1.75)];
        let mut road = build_road(&ds, &ego(), &SimulationConfig::default()).unwrap();
        let co = co_at(40.0, 3.5, std::f64::consts::PI);
        let assoc = associate_lane(&co, &road);
        infer_lane_directions(&mut road, &[(co, assoc)]);
        assert_eq!(road.lane(LanePosition::Left).unwrap().direction, TrafficDirection::Counter);
        assert_eq!(road.ego_lane().direction, TrafficDirection::WithEgo);
    }

    #[test]
    fn wrap_angle_range() {
        use std::f64::consts::PI;
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
    }
}
