mod common;

use common::oracle::steady_state;
use multihyp_core::motion::{
    integrate_pedestrian, integrate_vehicle, one_track_derivatives, tire_forces, two_track_derivatives, Derivatives, VehicleDynamicState,
};
use multihyp_core::scenario::{classify_vehicle, ObjectKind, ObjectState, Point2, SimulationConfig, VehicleParameters};
use proptest::prelude::*;

fn params(length: f64, width: f64) -> VehicleParameters {
    classify_vehicle(length, width, None, &SimulationConfig::default())
}

fn lateral(v: f64, beta: f64, yaw_rate: f64) -> VehicleDynamicState {
    VehicleDynamicState {
        v,
        beta,
        yaw_rate,
        ..Default::default()
    }
}

proptest! {
    #[test]
    fn one_track_is_linear(v in 3.0..40.0f64, s1 in prop::array::uniform3(-0.2..0.2f64), s2 in prop::array::uniform3(-0.2..0.2f64),
                           alpha in -3.0..3.0f64, gamma in -3.0..3.0f64, len in 3.0..5.5f64) {
        let p = params(len, 1.8);
        let f = |s: [f64; 3]| one_track_derivatives(&lateral(v, s[0], s[1]), s[2], &p);
        let mixed = [0, 1, 2].map(|k| alpha * s1[k] + gamma * s2[k]);
        let (a, b) = (f(s1), f(s2));
        let m = f(mixed);
        let expect = (alpha * a.0 + gamma * b.0, alpha * a.1 + gamma * b.1);
        let scale = |x: f64, y: f64, z: f64| x.abs().max(y.abs()).max(z.abs()).max(1e-300);
        prop_assert!((m.0 - expect.0).abs() <= 1e-12 * scale(alpha * a.0, gamma * b.0, m.0) * 10.0);
        prop_assert!((m.1 - expect.1).abs() <= 1e-12 * scale(alpha * a.1, gamma * b.1, m.1) * 10.0);
    }

    #[test]
    fn steady_state_cornering(v in 3.0..40.0f64, steer in -0.1..0.1f64, len in 3.0..5.5f64) {
        let p = params(len, 1.8);
        let (beta, r) = steady_state(&p, v, steer);
        let (db, dr) = one_track_derivatives(&lateral(v, beta, r), steer, &p);
        prop_assert!(db.abs() < 1e-10 && dr.abs() < 1e-10, "{} {}", db, dr);
    }

    #[test]
    fn tire_forces_respect_friction_circle(v in 1.0..40.0f64, beta in -0.3..0.3f64, r in -1.0..1.0f64, steer in -0.6..0.6f64, slip in -0.1..0.1f64) {
        let p = params(4.5, 1.8);
        let f = tire_forces(&lateral(v, beta, r), steer, slip, &p, 1.0);
        for k in 0..4 {
            prop_assert!(f.longitudinal[k].hypot(f.lateral[k]) <= f.normal[k] * (1.0 + 1e-12));
        }
        let total: f64 = f.normal.iter().sum();
        prop_assert!((total - p.mass * 9.81).abs() < 1e-6 * total);
    }

    #[test]
    fn pedestrian_speed_stays_in_range(v in 0.0..2.7f64, a in -12.0..12.0f64, heading in -3.2..3.2f64) {
        let mut s = ObjectState {
            kind: ObjectKind::Pedestrian, position: Point2::default(), yaw: heading, velocity: v, sideslip: 0.0, yaw_rate: 0.0,
            acceleration: 0.0, length: 0.5, width: 0.5, height: None,
        };
        for _ in 0..100 {
            let before = s.position;
            s = integrate_pedestrian(&s, heading, a, 0.02, 2.7);
            prop_assert!((0.0..=2.7).contains(&s.velocity));
            let step = s.position - before;
            prop_assert!(step.dot(Point2::new(heading.cos(), heading.sin())) >= -1e-12);
        }
    }
}

/// Runs both models under a constant steering angle and returns the final
/// yaw rates and the lateral acceleration `v * (beta_dot + r)` of the
/// one-track model.
fn cornering(v: f64, steer: f64, p: &VehicleParameters) -> (f64, f64, f64) {
    let mut ot = lateral(v, 0.0, 0.0);
    let mut tt = ot;
    for _ in 0..150 {
        let (b, r) = one_track_derivatives(&ot, steer, p);
        ot = integrate_vehicle(
            &ot,
            &Derivatives {
                accel: 0.0,
                beta_rate: b,
                yaw_accel: r,
            },
            0.02,
        );
        let d = two_track_derivatives(&tt, steer, 0.0, p, 1.0);
        tt = integrate_vehicle(&tt, &d, 0.02);
    }
    (ot.yaw_rate, tt.yaw_rate, ot.ay)
}

#[test]
fn two_track_agrees_with_one_track_at_low_lateral_acceleration() {
    for (len, width) in [(3.1, 1.5), (4.5, 1.8), (5.0, 1.9)] {
        let p = params(len, width);
        for v in [10.0, 20.0, 30.0] {
            for steer in [0.005, 0.01, 0.02] {
                let (r_ot, r_tt, ay) = cornering(v, steer, &p);
                if ay.abs() >= 2.0 {
                    continue;
                }
                assert!((r_tt - r_ot).abs() <= 0.05 * r_ot.abs(), "v={v} steer={steer}: {r_ot} vs {r_tt}");
            }
        }
    }
}

#[test]
fn euler_matches_constant_acceleration_kinematics() {
    let p = params(4.5, 1.8);
    for (v0, a) in [(10.0, 2.0), (20.0, -4.0), (5.0, 1.0)] {
        let mut s = lateral(v0, 0.0, 0.0);
        for _ in 0..100 {
            let (b, r) = one_track_derivatives(&s, 0.0, &p);
            s = integrate_vehicle(
                &s,
                &Derivatives {
                    accel: a,
                    beta_rate: b,
                    yaw_accel: r,
                },
                0.02,
            );
        }
        let t: f64 = 2.0;
        let d = v0 * t + 0.5 * a * t * t;
        assert!((s.position.x - d).abs() / d < 0.02, "{} vs {d}", s.position.x);
        assert!((s.v - (v0 + a * t)).abs() < 1e-9);
    }
}
