//! Independent reference implementations used to check the library.

use multihyp_core::collision::CollisionMatrix;
use multihyp_core::scenario::{Point2, VehicleParameters};
use rand::Rng;

/// Separating-axis test for convex polygons; touching counts as overlap.
pub fn sat_overlap(a: &[Point2], b: &[Point2]) -> bool {
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let e = poly[(i + 1) % n] - poly[i];
            let axis = Point2::new(-e.y, e.x);
            let project = |p: &[Point2]| {
                p.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let d = v.dot(axis);
                    (lo.min(d), hi.max(d))
                })
            };
            let (a0, a1) = project(a);
            let (b0, b1) = project(b);
            if a1 < b0 || b1 < a0 {
                return false;
            }
        }
    }
    true
}

/// Convex hull (monotone chain), counter-clockwise, no collinear points.
pub fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    let cross = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Random convex polygon with 3 to 8 vertices inside a disc.
pub fn random_convex<R: Rng>(rng: &mut R, center: Point2, radius: f64) -> Vec<Point2> {
    loop {
        let n = rng.gen_range(3..=10);
        let pts: Vec<Point2> = (0..n)
            .map(|_| {
                let r = radius * rng.gen::<f64>().sqrt();
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                center + Point2::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let hull = convex_hull(pts);
        if hull.len() >= 3 && hull.len() <= 8 {
            return hull;
        }
    }
}

/// The criticality double sum over a single CO.
pub fn double_sum(matrix: &CollisionMatrix, p_ego: &[f64], p_co: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, pe) in p_ego.iter().enumerate().take(matrix.rows) {
        for (j, pc) in p_co.iter().enumerate().take(matrix.cols) {
            if matrix.get(i, j).is_some() {
                total += pe * pc;
            }
        }
    }
    total
}

/// Steady-state sideslip and yaw rate of the linear one-track model for a
/// constant steering angle, by Cramer's rule on the 2x2 system.
pub fn steady_state(p: &VehicleParameters, v: f64, steer: f64) -> (f64, f64) {
    let (cf, cr, lf, lr, m, iz) = (p.cornering_front, p.cornering_rear, p.lf, p.lr, p.mass, p.yaw_inertia);
    let a11 = -(cf + cr) / (m * v);
    let a12 = (cr * lr - cf * lf) / (m * v * v) - 1.0;
    let a21 = (cr * lr - cf * lf) / iz;
    let a22 = -(cf * lf * lf + cr * lr * lr) / (iz * v);
    let b1 = -cf / (m * v) * steer;
    let b2 = -cf * lf / iz * steer;
    let det = a11 * a22 - a12 * a21;
    ((b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det)
}
