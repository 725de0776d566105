#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use multihyp_core::engine::{Engine, Evaluation, WorkerPolicy};
use multihyp_core::scenario::{validate_scenario, Point2, RawKind, RawObject, RawScenario, Scenario, SimulationConfig};
use multihyp_core::street::{build_road, fit_scenario_dividers, RoadModel};

pub const LANE: f64 = 3.5;

pub fn vehicle(x: f64, y: f64, yaw: f64, v: f64) -> RawObject {
    RawObject {
        kind: RawKind::Vehicle,
        x,
        y,
        yaw,
        velocity: v,
        sideslip: 0.0,
        yaw_rate: 0.0,
        acceleration: 0.0,
        length: Some(4.5),
        width: Some(1.8),
        height: None,
    }
}

pub fn pedestrian(x: f64, y: f64, yaw: f64, v: f64) -> RawObject {
    RawObject {
        kind: RawKind::Pedestrian,
        length: None,
        width: None,
        ..vehicle(x, y, yaw, v)
    }
}

/// Straight dividers at the given lateral offsets, spanning `[x0, x1]`.
pub fn straight_dividers(offsets: &[f64], x0: f64, x1: f64) -> Vec<[Point2; 3]> {
    offsets
        .iter()
        .map(|&y| [Point2::new(x0, y), Point2::new(0.5 * (x0 + x1), y), Point2::new(x1, y)])
        .collect()
}

/// Three lanes of 3.5 m with the EGO lane centered on y = 0.
pub fn three_lanes() -> Vec<[Point2; 3]> {
    straight_dividers(&[1.5 * LANE, 0.5 * LANE, -0.5 * LANE, -1.5 * LANE], -200.0, 300.0)
}

pub fn one_lane() -> Vec<[Point2; 3]> {
    straight_dividers(&[0.5 * LANE, -0.5 * LANE], -200.0, 300.0)
}

pub fn raw(ego: RawObject, objects: Vec<RawObject>, dividers: Vec<[Point2; 3]>) -> RawScenario {
    RawScenario {
        timestamp: 0.0,
        ego: Some(ego),
        objects,
        dividers,
        config: SimulationConfig::default(),
    }
}

pub fn scenario(ego: RawObject, objects: Vec<RawObject>, dividers: Vec<[Point2; 3]>) -> Scenario {
    validate_scenario(&raw(ego, objects, dividers)).expect("valid scenario")
}

pub fn road(s: &Scenario) -> RoadModel {
    let dividers = fit_scenario_dividers(s).expect("dividers fit");
    build_road(&dividers, &s.ego.state, &s.config).expect("consistent road")
}

pub fn shipped(name: &str) -> RawScenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    RawScenario::from_json(&text).expect("shipped scenario parses")
}

pub fn evaluate_full(s: &Scenario, policy: WorkerPolicy) -> Evaluation {
    Engine::new(policy)
        .expect("pool")
        .evaluate_full(s, &s.config)
        .expect("evaluation succeeds")
}

/// Head-on approach at 15 m/s each, `ttc` seconds before the bumpers touch.
pub fn head_on(ttc: f64) -> RawScenario {
    let mut r = raw(
        vehicle(0.0, 0.0, 0.0, 15.0),
        vec![vehicle(4.5 + 30.0 * ttc, 0.0, std::f64::consts::PI, 15.0)],
        three_lanes(),
    );
    r.timestamp = 3.0 - ttc;
    r
}
