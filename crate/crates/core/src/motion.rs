//! Vehicle and pedestrian motion models.
//!
//! The one-track model is the linear single-track lateral model driven by
//! the front steering angle. The two-track model resolves forces per wheel
//! with a linear tire law, static axle loads and friction-circle clipping.
//! Both feed the same Euler pose integration.

use serde::{Deserialize, Serialize};

use crate::scenario::{ObjectState, Point2, VehicleParameters};

pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleDynamicState {
    pub v: f64,
    pub beta: f64,
    pub yaw: f64,
    pub yaw_rate: f64,
    pub yaw_accel: f64,
    pub accel: f64,
    /// Acceleration in the vehicle frame, carried one step behind the
    /// velocity update.
    pub ax: f64,
    pub ay: f64,
    pub position: Point2,
}

impl VehicleDynamicState {
    pub fn from_object(state: &ObjectState) -> Self {
        Self {
            v: state.velocity,
            beta: state.sideslip,
            yaw: state.yaw,
            yaw_rate: state.yaw_rate,
            yaw_accel: 0.0,
            accel: state.acceleration,
            ax: state.sideslip.cos() * state.acceleration - state.sideslip.sin() * state.velocity * state.yaw_rate,
            ay: state.sideslip.sin() * state.acceleration + state.sideslip.cos() * state.velocity * state.yaw_rate,
            position: state.position,
        }
    }
}

/// Time derivatives fed to [`integrate_vehicle`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Derivatives {
    pub accel: f64,
    pub beta_rate: f64,
    pub yaw_accel: f64,
}

/// Linear one-track model. Returns `(beta_rate, yaw_accel)`.
///
/// Requires `v > 0`; callers switch to kinematic integration below the
/// minimum dynamic speed.
pub fn one_track_derivatives(state: &VehicleDynamicState, steer: f64, p: &VehicleParameters) -> (f64, f64) {
    let (cf, cr, lf, lr, m, iz) = (p.cornering_front, p.cornering_rear, p.lf, p.lr, p.mass, p.yaw_inertia);
    let v = state.v;
    let a11 = -(cf + cr) / (m * v);
    let a12 = (cr * lr - cf * lf) / (m * v * v) - 1.0;
    let a21 = (cr * lr - cf * lf) / iz;
    let a22 = -(cf * lf * lf + cr * lr * lr) / (iz * v);
    let b1 = cf / (m * v);
    let b2 = cf * lf / iz;
    (
        a11 * state.beta + a12 * state.yaw_rate + b1 * steer,
        a21 * state.beta + a22 * state.yaw_rate + b2 * steer,
    )
}

/// Lowest speed at which an explicit Euler step of `tau` keeps the
/// one-track lateral modes free of overshoot: the diagonal rates scale with
/// `1 / v` and must stay below `1 / tau`.
pub fn dynamic_speed_floor(p: &VehicleParameters, tau: f64) -> f64 {
    let beta_rate = (p.cornering_front + p.cornering_rear) / p.mass;
    let yaw_rate = (p.cornering_front * p.lf * p.lf + p.cornering_rear * p.lr * p.lr) / p.yaw_inertia;
    tau * beta_rate.max(yaw_rate)
}

/// Wheel order: front-left, front-right, rear-left, rear-right.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TireForces {
    pub longitudinal: [f64; 4],
    pub lateral: [f64; 4],
    pub normal: [f64; 4],
}

struct Wheel {
    x: f64,
    y: f64,
    steer: f64,
    cornering: f64,
    load: f64,
}

fn wheels(steer: f64, p: &VehicleParameters) -> [Wheel; 4] {
    let half = 0.5 * p.track_width;
    let l = p.wheelbase();
    let front_load = 0.5 * p.mass * GRAVITY * p.lr / l;
    let rear_load = 0.5 * p.mass * GRAVITY * p.lf / l;
    let cf = 0.5 * p.cornering_front;
    let cr = 0.5 * p.cornering_rear;
    [
        Wheel {
            x: p.lf,
            y: half,
            steer,
            cornering: cf,
            load: front_load,
        },
        Wheel {
            x: p.lf,
            y: -half,
            steer,
            cornering: cf,
            load: front_load,
        },
        Wheel {
            x: -p.lr,
            y: half,
            steer: 0.0,
            cornering: cr,
            load: rear_load,
        },
        Wheel {
            x: -p.lr,
            y: -half,
            steer: 0.0,
            cornering: cr,
            load: rear_load,
        },
    ]
}

/// Per-wheel tire forces in the wheel frames: lateral force linear in the
/// slip angle, longitudinal force linear in the commanded slip, both scaled
/// back onto the friction circle when their resultant exceeds `mu * F_z`.
pub fn tire_forces(state: &VehicleDynamicState, steer: f64, slip: f64, p: &VehicleParameters, mu: f64) -> TireForces {
    let vx = state.v * state.beta.cos();
    let vy = state.v * state.beta.sin();
    let r = state.yaw_rate;
    let mut out = TireForces::default();
    for (k, w) in wheels(steer, p).iter().enumerate() {
        let wx = vx - r * w.y;
        let wy = vy + r * w.x;
        let (s, c) = w.steer.sin_cos();
        let u = c * wx + s * wy;
        let lat = -s * wx + c * wy;
        let alpha = if u.abs() < 1e-9 && lat.abs() < 1e-9 { 0.0 } else { -lat.atan2(u) };
        let mut fl = p.longitudinal_stiffness * slip;
        let mut fs = w.cornering * alpha;
        let cap = mu * w.load;
        let mag = fl.hypot(fs);
        if mag > cap {
            let k = cap / mag;
            fl *= k;
            fs *= k;
        }
        out.longitudinal[k] = fl;
        out.lateral[k] = fs;
        out.normal[k] = w.load;
    }
    out
}

/// Two-track model: rigid-body force and moment balance over the four
/// tire forces. Returns `(v_dot, beta_rate, yaw_accel)` as [`Derivatives`].
pub fn two_track_derivatives(state: &VehicleDynamicState, steer: f64, slip: f64, p: &VehicleParameters, mu: f64) -> Derivatives {
    let forces = tire_forces(state, steer, slip, p, mu);
    let mut fx = 0.0;
    let mut fy = 0.0;
    let mut mz = 0.0;
    for (k, w) in wheels(steer, p).iter().enumerate() {
        let (s, c) = w.steer.sin_cos();
        let (fl, fs) = (forces.longitudinal[k], forces.lateral[k]);
        let bx = c * fl - s * fs;
        let by = s * fl + c * fs;
        fx += bx;
        fy += by;
        mz += w.x * by - w.y * bx;
    }
    let (sb, cb) = state.beta.sin_cos();
    let accel = (fx * cb + fy * sb) / p.mass;
    let beta_rate = if state.v > 1e-6 {
        (-fx * sb + fy * cb) / (p.mass * state.v) - state.yaw_rate
    } else {
        0.0
    };
    Derivatives {
        accel,
        beta_rate,
        yaw_accel: mz / p.yaw_inertia,
    }
}

/// One Euler step: first order for speed and sideslip, second order in the
/// step for yaw and position. The vehicle-frame accelerations used for the
/// position update are the ones computed in the previous step.
pub fn integrate_vehicle(s: &VehicleDynamicState, d: &Derivatives, tau: f64) -> VehicleDynamicState {
    let (sb, cb) = s.beta.sin_cos();
    let (sp, cp) = s.yaw.sin_cos();
    let (spb, cpb) = (s.yaw + s.beta).sin_cos();
    let half_tau2 = 0.5 * tau * tau;
    let turn = s.v * (d.beta_rate + s.yaw_rate);
    VehicleDynamicState {
        v: s.v + d.accel * tau,
        beta: s.beta + d.beta_rate * tau,
        yaw: s.yaw + s.yaw_rate * tau + d.yaw_accel * half_tau2,
        yaw_rate: s.yaw_rate + d.yaw_accel * tau,
        yaw_accel: d.yaw_accel,
        accel: d.accel,
        ax: cb * d.accel - sb * turn,
        ay: sb * d.accel + cb * turn,
        position: Point2::new(
            s.position.x + cpb * s.v * tau + cp * s.ax * half_tau2 - sp * s.ay * half_tau2,
            s.position.y + spb * s.v * tau + sp * s.ax * half_tau2 + cp * s.ay * half_tau2,
        ),
    }
}

/// Kinematic pedestrian step along a fixed heading. Speed stays within
/// `[0, max_speed]`; the acceleration term uses the acceleration actually
/// realized under that clamp, so a stopped pedestrian never walks backwards.
pub fn integrate_pedestrian(state: &ObjectState, heading: f64, accel: f64, tau: f64, max_speed: f64) -> ObjectState {
    let v = state.velocity;
    let v_next = (v + accel * tau).clamp(0.0, max_speed);
    let realized = (v_next - v) / tau;
    let (s, c) = heading.sin_cos();
    let dist = v * tau + realized * 0.5 * tau * tau;
    ObjectState {
        position: Point2::new(state.position.x + c * dist, state.position.y + s * dist),
        yaw: heading,
        velocity: v_next,
        acceleration: realized,
        ..*state
    }
}
