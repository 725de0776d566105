//! Risk assessment: hypotheses are scored against the reference behavior of
//! their object, normalized into occurrence probabilities, and the
//! probabilities of colliding EGO/CO combinations are accumulated into the
//! scenario criticality.

use serde::{Deserialize, Serialize};

use crate::collision::CollisionMatrix;
use crate::error::RiskError;
use crate::hypothesis::{LateralPlan, ObjectPlan, Trajectory};
use crate::scenario::SimulationConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisScore {
    pub object: usize,
    pub hypothesis: usize,
    pub n_acc: f64,
    pub d_str: f64,
    pub c_com: f64,
    pub c_cou: f64,
    pub n_h: f64,
    /// Filled in by normalization.
    pub probability: f64,
}

/// Deviation of one hypothesis from its reference.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Deviation {
    pub target_accel: f64,
    pub reference_accel: f64,
    pub terminal_offset: f64,
    pub lane_changes: usize,
    pub counter_traffic: bool,
}

pub fn acceleration_factor(target: f64, reference: f64, config: &SimulationConfig) -> f64 {
    (-(target - reference).abs() / config.accel_score_scale).exp()
}

pub fn path_factor(offset: f64, config: &SimulationConfig) -> f64 {
    (-offset.abs() / config.lateral_score_scale).exp()
}

pub fn score_deviation(object: usize, hypothesis: usize, dev: &Deviation, config: &SimulationConfig) -> HypothesisScore {
    let n_acc = acceleration_factor(dev.target_accel, dev.reference_accel, config);
    let d_str = path_factor(dev.terminal_offset, config);
    let c_com = 1.0 + config.lane_change_penalty * dev.lane_changes as f64;
    let c_cou = if dev.counter_traffic { config.counter_traffic_penalty } else { 1.0 };
    HypothesisScore {
        object,
        hypothesis,
        n_acc,
        d_str,
        c_com,
        c_cou,
        n_h: (config.w_acc * n_acc + config.w_str * d_str) / (c_com * c_cou),
        probability: 0.0,
    }
}

/// Measures a trajectory of `plan` against the plan's reference. Vehicles
/// use the lateral offset of the terminal position from the reference's
/// terminal pose; pedestrians the plain terminal distance.
pub fn deviation(plan: &ObjectPlan, trajectory: &Trajectory, config: &SimulationConfig) -> Deviation {
    let (profile, lateral) = plan.decode(trajectory.hypothesis);
    let end = trajectory.poses.last().expect("non-empty trajectory");
    let reference = plan.reference.poses.last().expect("non-empty reference");
    let delta = end.position() - reference.position();
    match &plan.laterals[lateral] {
        LateralPlan::Path(path) => {
            let normal = crate::scenario::Point2::new(-reference.yaw.sin(), reference.yaw.cos());
            Deviation {
                target_accel: plan.profiles[profile].target_acceleration(config),
                reference_accel: plan.reference_accel,
                terminal_offset: delta.dot(normal).abs(),
                lane_changes: path.lane_changes(),
                counter_traffic: path.counter_traffic,
            }
        }
        LateralPlan::Heading(_) => Deviation {
            target_accel: plan.profiles[profile].target,
            reference_accel: plan.reference_accel,
            terminal_offset: delta.norm(),
            lane_changes: 0,
            counter_traffic: false,
        },
    }
}

pub fn score_hypothesis(plan: &ObjectPlan, trajectory: &Trajectory, config: &SimulationConfig) -> HypothesisScore {
    score_deviation(plan.object, trajectory.hypothesis, &deviation(plan, trajectory, config), config)
}

/// L1 normalization of positive scores.
pub fn normalize(scores: &[f64]) -> Result<Vec<f64>, RiskError> {
    if scores.is_empty() {
        return Err(RiskError::EmptyScores);
    }
    if let Some(&bad) = scores.iter().find(|s| **s <= 0.0 || !s.is_finite()) {
        return Err(RiskError::NonPositiveScore(bad));
    }
    let total: f64 = scores.iter().sum();
    Ok(scores.iter().map(|s| s / total).collect())
}

/// Normalizes the scores of one object in place.
pub fn normalize_scores(scores: &mut [HypothesisScore]) -> Result<(), RiskError> {
    let p = normalize(&scores.iter().map(|s| s.n_h).collect::<Vec<_>>())?;
    for (s, p) in scores.iter_mut().zip(p) {
        s.probability = p;
    }
    Ok(())
}

/// One colliding EGO/CO trajectory combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub ego: usize,
    /// Column of the CO trajectory in the collision matrix.
    pub column: usize,
    pub object: usize,
    pub step: u16,
    /// `p_ego * p_co`.
    pub probability: f64,
    pub scaled: f64,
}

/// Running-survival scaling over probabilities already in chronological
/// order: each event keeps its probability times the probability that none
/// of the earlier events happened.
pub fn conditional_scaling(probabilities: &[f64]) -> Vec<f64> {
    let mut survival = 1.0;
    probabilities
        .iter()
        .map(|&p| {
            let scaled = survival * p;
            survival *= 1.0 - p;
            scaled
        })
        .collect()
}

/// Sorts by collision step, then EGO trajectory, then CO column, and scales.
pub fn apply_conditional_scaling(combinations: &mut [Combination]) {
    combinations.sort_by_key(|c| (c.step, c.ego, c.column));
    let scaled = conditional_scaling(&combinations.iter().map(|c| c.probability).collect::<Vec<_>>());
    for (c, s) in combinations.iter_mut().zip(scaled) {
        c.scaled = s;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectRisk {
    pub object: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeRoute {
    pub ego: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityResult {
    pub timestamp: f64,
    pub p_cra: f64,
    /// Unscaled collision probability per CO, in object order.
    pub objects: Vec<ObjectRisk>,
    /// Chronological order.
    pub collisions: Vec<Combination>,
    /// Collision-free EGO trajectories, most probable first.
    pub escape_routes: Vec<EscapeRoute>,
    pub ego_trajectories: usize,
    pub co_trajectories: usize,
    pub combinations: usize,
}

/// Accumulates the criticality. Combinations of one CO exclude each other,
/// so with a single colliding CO their probabilities add up exactly. With
/// several colliding COs the combinations are scaled chronologically.
pub fn aggregate_criticality(
    matrix: &CollisionMatrix,
    ego_probabilities: &[f64],
    co_probabilities: &[f64],
    timestamp: f64,
) -> CriticalityResult {
    let mut collisions: Vec<Combination> = matrix
        .collisions()
        .map(|(ego, column, step)| {
            let probability = ego_probabilities[ego] * co_probabilities[column];
            Combination {
                ego,
                column,
                object: matrix.column_object[column],
                step,
                probability,
                scaled: probability,
            }
        })
        .collect();

    let mut object_ids: Vec<usize> = matrix.column_object.clone();
    object_ids.dedup();
    let objects: Vec<ObjectRisk> = object_ids
        .iter()
        .map(|&object| ObjectRisk {
            object,
            probability: collisions
                .iter()
                .filter(|c| c.object == object)
                .fold(0.0, |acc, c| acc + c.probability),
        })
        .collect();
    let colliding = objects.iter().filter(|o| o.probability > 0.0).count();

    if colliding > 1 {
        apply_conditional_scaling(&mut collisions);
    } else {
        collisions.sort_by_key(|c| (c.step, c.ego, c.column));
    }
    let p_cra = collisions.iter().fold(0.0, |acc, c| acc + c.scaled).clamp(0.0, 1.0);

    let mut hit = vec![false; matrix.rows];
    for c in &collisions {
        hit[c.ego] = true;
    }
    let mut escape_routes: Vec<EscapeRoute> = (0..matrix.rows)
        .filter(|&i| !hit[i])
        .map(|ego| EscapeRoute {
            ego,
            probability: ego_probabilities[ego],
        })
        .collect();
    escape_routes.sort_by(|a, b| b.probability.total_cmp(&a.probability).then(a.ego.cmp(&b.ego)));

    CriticalityResult {
        timestamp,
        p_cra,
        objects,
        collisions,
        escape_routes,
        ego_trajectories: matrix.rows,
        co_trajectories: matrix.cols,
        combinations: matrix.pair_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn zero_deviation_scores_sum_of_weights() {
        let c = SimulationConfig::default();
        let s = score_deviation(0, 0, &Deviation::default(), &c);
        assert_eq!((s.n_acc, s.d_str, s.c_com, s.c_cou), (1.0, 1.0, 1.0, 1.0));
        assert!(close(s.n_h, c.w_acc + c.w_str));
    }

    #[test]
    fn counter_traffic_divides_by_four() {
        let c = SimulationConfig::default();
        let dev = Deviation {
            target_accel: -4.85,
            terminal_offset: 1.2,
            lane_changes: 1,
            ..Deviation::default()
        };
        let a = score_deviation(0, 0, &dev, &c);
        let b = score_deviation(
            0,
            0,
            &Deviation {
                counter_traffic: true,
                ..dev
            },
            &c,
        );
        assert!(close(a.n_h / b.n_h, 4.0));
        assert!(close(a.c_com, 1.25));
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize(&[1.0, 1.0, 2.0]).unwrap(), vec![0.25, 0.25, 0.5]);
        let p = normalize(&[3.0; 7]).unwrap();
        assert!(p.iter().all(|&x| close(x, 1.0 / 7.0)));
        assert_eq!(normalize(&[]), Err(RiskError::EmptyScores));
        assert_eq!(normalize(&[1.0, 0.0]), Err(RiskError::NonPositiveScore(0.0)));
    }

    #[test]
    fn chronological_scaling_examples() {
        assert_eq!(conditional_scaling(&[0.3]), vec![0.3]);
        let s = conditional_scaling(&[0.2, 0.5]);
        assert!(close(s[1], 0.4));
        let s = conditional_scaling(&[0.2, 0.5, 0.5]);
        assert!(close(s[0], 0.2) && close(s[1], 0.4) && close(s[2], 0.2));
        assert!(close(s.iter().sum::<f64>(), 0.8));
    }

    #[test]
    fn scaling_tie_break() {
        let mk = |ego, column, step, p| Combination {
            ego,
            column,
            object: 1,
            step,
            probability: p,
            scaled: p,
        };
        let mut c = vec![mk(3, 0, 5, 0.5), mk(1, 2, 5, 0.5), mk(1, 1, 5, 0.5), mk(9, 9, 2, 0.2)];
        apply_conditional_scaling(&mut c);
        let order: Vec<(usize, usize)> = c.iter().map(|c| (c.ego, c.column)).collect();
        assert_eq!(order, vec![(9, 9), (1, 1), (1, 2), (3, 0)]);
        assert!(close(c[1].scaled, 0.4));
    }

    #[test]
    fn no_collisions_every_ego_escapes() {
        let m = CollisionMatrix::empty(3, vec![1, 1]);
        let r = aggregate_criticality(&m, &[0.2, 0.5, 0.3], &[0.5, 0.5], 1.0);
        assert_eq!(r.p_cra, 0.0);
        assert!(r.collisions.is_empty());
        let ids: Vec<usize> = r.escape_routes.iter().map(|e| e.ego).collect();
        assert_eq!(ids, vec![1, 2, 0]);
    }

    #[test]
    fn full_collision_single_co_is_one() {
        let mut m = CollisionMatrix::empty(2, vec![1, 1, 1]);
        for i in 0..2 {
            for j in 0..3 {
                m.set(i, j, Some((i + j) as u16));
            }
        }
        let r = aggregate_criticality(&m, &[0.4, 0.6], &[0.2, 0.3, 0.5], 0.0);
        assert!(close(r.p_cra, 1.0));
        assert!(r.escape_routes.is_empty());
        assert!(close(r.objects[0].probability, 1.0));
    }

    #[test]
    fn all_collide_multi_co_stays_bounded() {
        let mut m = CollisionMatrix::empty(2, vec![1, 1, 2, 2]);
        for i in 0..2 {
            for j in 0..4 {
                m.set(i, j, Some(3));
            }
        }
        let r = aggregate_criticality(&m, &[0.5, 0.5], &[0.5, 0.5, 0.5, 0.5], 0.0);
        assert!(r.p_cra > 0.0 && r.p_cra <= 1.0);
        assert!(close(r.p_cra, 1.0 - 0.75f64.powi(8)));
    }
}
