//! Collision recognition. Objects are rectangular (optionally chamfered)
//! footprints along their trajectories; every EGO trajectory is checked
//! against every CO trajectory step by step and the earliest overlapping
//! step is recorded.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CollisionError;
use crate::hypothesis::Pose;
use crate::scenario::{CollisionMode, Point2, SimulationConfig};

/// Convex footprint, counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintPolygon {
    pub vertices: Vec<Point2>,
}

/// Footprint outline in the body frame, centered at the CoG. Four vertices
/// give the plain rectangle; eight cut each corner by a quarter of the
/// shorter side.
pub fn body_outline(length: f64, width: f64, vertex_count: usize) -> Vec<Point2> {
    let (hl, hw) = (0.5 * length, 0.5 * width);
    if vertex_count == 8 {
        let c = 0.25 * hl.min(hw);
        vec![
            Point2::new(hl, -hw + c),
            Point2::new(hl, hw - c),
            Point2::new(hl - c, hw),
            Point2::new(-hl + c, hw),
            Point2::new(-hl, hw - c),
            Point2::new(-hl, -hw + c),
            Point2::new(-hl + c, -hw),
            Point2::new(hl - c, -hw),
        ]
    } else {
        vec![
            Point2::new(hl, -hw),
            Point2::new(hl, hw),
            Point2::new(-hl, hw),
            Point2::new(-hl, -hw),
        ]
    }
}

/// Footprint at a pose. The outline follows the body yaw; sideslip is not
/// applied.
pub fn footprint(position: Point2, yaw: f64, length: f64, width: f64, vertex_count: usize) -> FootprintPolygon {
    FootprintPolygon {
        vertices: body_outline(length, width, vertex_count)
            .into_iter()
            .map(|v| position + v.rotate(yaw))
            .collect(),
    }
}

impl FootprintPolygon {
    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }
}

/// Signed shoelace area; positive for counter-clockwise order.
pub fn polygon_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum::<f64>()
}

/// Half-plane test against a convex CCW polygon; boundary points count as
/// inside.
pub fn point_in_convex(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        (b - a).cross(p - a) >= 0.0
    })
}

/// Crossing-number test, valid for any simple polygon.
pub fn point_in_polygon_crossing(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn orientation(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segments `ab` and `cd` share at least one point.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// Any vertex of one polygon lies inside the other, checked both ways.
pub fn vertex_containment(a: &[Point2], b: &[Point2]) -> bool {
    a.iter().any(|&p| point_in_convex(p, b)) || b.iter().any(|&p| point_in_convex(p, a))
}

fn edges_cross(a: &[Point2], b: &[Point2]) -> bool {
    let (n, m) = (a.len(), b.len());
    (0..n).any(|i| {
        let (p, q) = (a[i], a[(i + 1) % n]);
        (0..m).any(|j| segments_intersect(p, q, b[j], b[(j + 1) % m]))
    })
}

pub fn polygons_overlap_slices(a: &[Point2], b: &[Point2], mode: CollisionMode) -> bool {
    match mode {
        CollisionMode::VertexContainment => vertex_containment(a, b),
        CollisionMode::Exact => vertex_containment(a, b) || edges_cross(a, b),
    }
}

pub fn polygons_overlap(a: &FootprintPolygon, b: &FootprintPolygon, mode: CollisionMode) -> bool {
    polygons_overlap_slices(&a.vertices, &b.vertices, mode)
}

/// Footprints of a batch of trajectories sharing one outline, stored flat
/// as trajectory-major, step-major vertex runs.
#[derive(Debug, Clone, PartialEq)]
pub struct FootprintSet {
    pub steps: usize,
    pub vertex_count: usize,
    vertices: Vec<Point2>,
    centers: Vec<Point2>,
    /// Bounding-circle radius per trajectory.
    radius: Vec<f64>,
    /// Swept bounding box per trajectory: min and max corner.
    bounds: Vec<(Point2, Point2)>,
}

impl FootprintSet {
    pub fn new(steps: usize, vertex_count: usize) -> Self {
        Self {
            steps,
            vertex_count,
            vertices: Vec::new(),
            centers: Vec::new(),
            radius: Vec::new(),
            bounds: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.radius.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radius.is_empty()
    }

    /// Appends one trajectory.
    pub fn push(&mut self, poses: &[Pose], length: f64, width: f64) -> Result<(), CollisionError> {
        if poses.len() != self.steps {
            return Err(CollisionError::StepCountMismatch(self.steps, poses.len()));
        }
        let outline = body_outline(length, width, self.vertex_count);
        let r = outline.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for pose in poses {
            let c = pose.position();
            lo = Point2::new(lo.x.min(c.x - r), lo.y.min(c.y - r));
            hi = Point2::new(hi.x.max(c.x + r), hi.y.max(c.y + r));
            self.centers.push(c);
            self.vertices.extend(outline.iter().map(|&v| c + v.rotate(pose.yaw)));
        }
        self.radius.push(r);
        self.bounds.push((lo, hi));
        Ok(())
    }

    pub fn polygon(&self, trajectory: usize, step: usize) -> &[Point2] {
        let start = (trajectory * self.steps + step) * self.vertex_count;
        &self.vertices[start..start + self.vertex_count]
    }

    fn center(&self, trajectory: usize, step: usize) -> Point2 {
        self.centers[trajectory * self.steps + step]
    }
}

fn boxes_meet(a: (Point2, Point2), b: (Point2, Point2)) -> bool {
    a.0.x <= b.1.x && b.0.x <= a.1.x && a.0.y <= b.1.y && b.0.y <= a.1.y
}

/// Earliest overlapping step of one pair, scanning in time order.
pub fn earliest_overlap(ego: &FootprintSet, i: usize, co: &FootprintSet, j: usize, mode: CollisionMode) -> Option<usize> {
    if !boxes_meet(ego.bounds[i], co.bounds[j]) {
        return None;
    }
    let reach = ego.radius[i] + co.radius[j];
    let reach2 = reach * reach;
    (0..ego.steps).find(|&k| {
        let d = ego.center(i, k) - co.center(j, k);
        d.dot(d) <= reach2 && polygons_overlap_slices(ego.polygon(i, k), co.polygon(j, k), mode)
    })
}

/// Reference scan without any prefilter or early exit.
pub fn all_overlaps(ego: &FootprintSet, i: usize, co: &FootprintSet, j: usize, mode: CollisionMode) -> Vec<usize> {
    (0..ego.steps)
        .filter(|&k| polygons_overlap_slices(ego.polygon(i, k), co.polygon(j, k), mode))
        .collect()
}

const NO_COLLISION: u16 = u16::MAX;

/// Earliest colliding step for every (EGO trajectory, CO trajectory) pair.
/// Columns are the CO trajectories of all objects back to back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Object id owning each column.
    pub column_object: Vec<usize>,
    entries: Vec<u16>,
}

impl CollisionMatrix {
    pub fn empty(rows: usize, column_object: Vec<usize>) -> Self {
        let cols = column_object.len();
        Self {
            rows,
            cols,
            column_object,
            entries: vec![NO_COLLISION; rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<u16> {
        match self.entries[i * self.cols + j] {
            NO_COLLISION => None,
            k => Some(k),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, step: Option<u16>) {
        self.entries[i * self.cols + j] = step.unwrap_or(NO_COLLISION);
    }

    pub fn pair_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Colliding pairs as `(ego, column, step)` in flat index order.
    pub fn collisions(&self) -> impl Iterator<Item = (usize, usize, u16)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != NO_COLLISION)
            .map(move |(k, &e)| (k / self.cols, k % self.cols, e))
    }

    pub fn collision_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e != NO_COLLISION).count()
    }
}

/// Fills the collision matrix, one EGO row per work item.
pub fn detect_collisions(
    ego: &FootprintSet,
    co: &FootprintSet,
    column_object: Vec<usize>,
    mode: CollisionMode,
) -> Result<CollisionMatrix, CollisionError> {
    if ego.steps != co.steps {
        return Err(CollisionError::StepCountMismatch(ego.steps, co.steps));
    }
    if column_object.len() != co.len() {
        return Err(CollisionError::ColumnCountMismatch(co.len(), column_object.len()));
    }
    let mut matrix = CollisionMatrix::empty(ego.len(), column_object);
    if matrix.cols == 0 {
        return Ok(matrix);
    }
    let cols = matrix.cols;
    matrix.entries.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
        for (j, slot) in row.iter_mut().enumerate() {
            if let Some(k) = earliest_overlap(ego, i, co, j, mode) {
                *slot = k as u16;
            }
        }
    });
    Ok(matrix)
}

/// Trajectory combinations `o * h_co * h_ego * h_acc^2` for a full
/// three-lane road.
pub fn count_combinations(co_count: usize, config: &SimulationConfig) -> usize {
    co_count * config.co_paths * config.ego_paths() * config.profile_count * config.profile_count
}

pub fn count_pose_combinations(co_count: usize, config: &SimulationConfig) -> usize {
    count_combinations(co_count, config) * config.steps()
}

/// Relative speed above which two footprints with the given extents along
/// the direction of relative motion can pass through each other between two
/// consecutive steps.
pub fn pass_through_speed(extent_a: f64, extent_b: f64, step: f64) -> f64 {
    (extent_a + extent_b) / step
}
