//! Pipeline orchestration. Each stage runs to completion before the next
//! one starts; inside a stage the work items run data-parallel on a rayon
//! pool and write into disjoint slots, so the result does not depend on the
//! number of workers.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collision::{detect_collisions, CollisionMatrix, FootprintSet};
use crate::error::{EngineError, RiskError};
use crate::hypothesis::{plan_object, ObjectPlan, Trajectory};
use crate::risk::{aggregate_criticality, normalize, score_hypothesis, CriticalityResult};
use crate::scenario::{validate_scenario, ObjectKind, RawScenario, Scenario, SceneObject, SimulationConfig};
use crate::street::{associate_lane, build_road, fit_scenario_dividers, infer_lane_directions, RoadModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectRange {
    pub object: usize,
    pub start: usize,
    pub profiles: usize,
    pub laterals: usize,
}

impl ObjectRange {
    pub fn len(&self) -> usize {
        self.profiles * self.laterals
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Flat index spaces. Trajectories of all objects are stored back to back,
/// EGO first; each object's block is profile-major. Combinations pair every
/// EGO trajectory with every CO trajectory, EGO-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexLayout {
    pub objects: Vec<ObjectRange>,
}

impl IndexLayout {
    pub fn new(plans: &[ObjectPlan]) -> Self {
        let mut start = 0;
        let objects = plans
            .iter()
            .map(|p| {
                let r = ObjectRange {
                    object: p.object,
                    start,
                    profiles: p.profiles.len(),
                    laterals: p.laterals.len(),
                };
                start += r.len();
                r
            })
            .collect();
        Self { objects }
    }

    pub fn r_tra(&self) -> usize {
        self.objects.iter().map(ObjectRange::len).sum()
    }

    pub fn r_ego(&self) -> usize {
        self.objects.first().map_or(0, ObjectRange::len)
    }

    pub fn r_co(&self) -> usize {
        self.r_tra() - self.r_ego()
    }

    pub fn r_col(&self) -> usize {
        self.r_ego() * self.r_co()
    }

    /// Flat trajectory index of (object slot, profile, lateral plan).
    pub fn trajectory_index(&self, slot: usize, profile: usize, lateral: usize) -> usize {
        let r = &self.objects[slot];
        r.start + profile * r.laterals + lateral
    }

    /// Inverse of [`IndexLayout::trajectory_index`].
    pub fn locate(&self, index: usize) -> (usize, usize, usize) {
        let slot = self.objects.partition_point(|r| r.start + r.len() <= index);
        let r = &self.objects[slot];
        let local = index - r.start;
        (slot, local / r.laterals, local % r.laterals)
    }

    pub fn pair_index(&self, ego: usize, co: usize) -> usize {
        ego * self.r_co() + co
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        (index / self.r_co(), index % self.r_co())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkerPolicy {
    Sequential,
    Fixed(usize),
    AllCores,
}

impl WorkerPolicy {
    pub fn threads(self) -> usize {
        match self {
            WorkerPolicy::Sequential => 1,
            WorkerPolicy::Fixed(n) => n.max(1),
            WorkerPolicy::AllCores => std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Wall-clock span of one stage, in seconds since the start of the run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageSpan {
    pub start: f64,
    pub end: f64,
}

impl StageSpan {
    pub fn seconds(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimes {
    pub street: StageSpan,
    pub trajectories: StageSpan,
    pub collision: StageSpan,
    pub risk: StageSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub stages: StageTimes,
    pub total_seconds: f64,
    pub trajectories: usize,
    pub combinations: usize,
    pub pose_combinations: usize,
    /// Pose combinations per second of collision recognition.
    pub throughput: f64,
    pub workers: usize,
}

/// Everything the pipeline produced for one frame, kept for inspection.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub result: CriticalityResult,
    pub metrics: RunMetrics,
    pub road: RoadModel,
    pub layout: IndexLayout,
    pub plans: Vec<ObjectPlan>,
    pub trajectories: Vec<Trajectory>,
    pub probabilities: Vec<f64>,
    pub matrix: CollisionMatrix,
}

pub struct Engine {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Engine {
    pub fn new(policy: WorkerPolicy) -> Result<Self, EngineError> {
        let workers = policy.threads();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| EngineError::Workers(e.to_string()))?;
        Ok(Self { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn evaluate(&self, scenario: &Scenario, config: &SimulationConfig) -> Result<(CriticalityResult, RunMetrics), EngineError> {
        self.evaluate_full(scenario, config).map(|e| (e.result, e.metrics))
    }

    pub fn evaluate_full(&self, scenario: &Scenario, config: &SimulationConfig) -> Result<Evaluation, EngineError> {
        config.validate()?;
        self.pool.install(|| run(scenario, config, self.workers))
    }

    /// Evaluates frames one after another, each from scratch. Invalid
    /// frames yield an error in their slot without stopping the stream.
    pub fn evaluate_stream<'a, I>(
        &'a self,
        frames: I,
        overrides: Option<&'a SimulationConfig>,
    ) -> impl Iterator<Item = Result<(CriticalityResult, RunMetrics), EngineError>> + 'a
    where
        I: IntoIterator<Item = RawScenario> + 'a,
    {
        frames.into_iter().map(move |raw| {
            let scenario = validate_scenario(&raw)?;
            let config = overrides.unwrap_or(&scenario.config).clone();
            self.evaluate(&scenario, &config)
        })
    }
}

/// Single-call convenience wrapper around [`Engine`].
pub fn evaluate(
    scenario: &Scenario,
    config: &SimulationConfig,
    policy: WorkerPolicy,
) -> Result<(CriticalityResult, RunMetrics), EngineError> {
    Engine::new(policy)?.evaluate(scenario, config)
}

fn footprint_size(object: &SceneObject) -> (f64, f64) {
    (object.state.length, object.state.width)
}

fn run(scenario: &Scenario, config: &SimulationConfig, workers: usize) -> Result<Evaluation, EngineError> {
    let clock = Instant::now();
    let since = |t: Instant| t.duration_since(clock).as_secs_f64();
    let steps = config.steps();

    // Street data processing.
    let t0 = Instant::now();
    let dividers = fit_scenario_dividers(scenario)?;
    let mut road = build_road(&dividers, &scenario.ego.state, config)?;
    let vehicles: Vec<_> = scenario
        .objects
        .iter()
        .filter(|o| o.state.kind == ObjectKind::CoVehicle)
        .map(|o| (o.state, associate_lane(&o.state, &road)))
        .collect();
    infer_lane_directions(&mut road, &vehicles);
    let street = StageSpan {
        start: since(t0),
        end: clock.elapsed().as_secs_f64(),
    };

    // Trajectory generation.
    let t1 = Instant::now();
    let objects: Vec<&SceneObject> = std::iter::once(&scenario.ego).chain(scenario.objects.iter()).collect();
    let plans = objects
        .par_iter()
        .enumerate()
        .map(|(id, o)| plan_object(id, o, &road, config))
        .collect::<Result<Vec<_>, _>>()?;
    let layout = IndexLayout::new(&plans);
    let trajectories: Vec<Trajectory> = (0..layout.r_tra())
        .into_par_iter()
        .map(|index| {
            let (slot, profile, lateral) = layout.locate(index);
            let plan = &plans[slot];
            plan.rollout(plan.encode(profile, lateral), &road, config)
        })
        .collect();
    let trajectories_span = StageSpan {
        start: since(t1),
        end: clock.elapsed().as_secs_f64(),
    };

    // Collision recognition.
    let t2 = Instant::now();
    let mut ego_set = FootprintSet::new(steps, config.footprint_vertices);
    let mut co_set = FootprintSet::new(steps, config.footprint_vertices);
    let mut column_object = Vec::with_capacity(layout.r_co());
    for (slot, range) in layout.objects.iter().enumerate() {
        let (length, width) = footprint_size(objects[slot]);
        for t in &trajectories[range.start..range.start + range.len()] {
            if slot == 0 {
                ego_set.push(&t.poses, length, width)?;
            } else {
                co_set.push(&t.poses, length, width)?;
                column_object.push(range.object);
            }
        }
    }
    let matrix = detect_collisions(&ego_set, &co_set, column_object, config.collision_mode)?;
    let collision = StageSpan {
        start: since(t2),
        end: clock.elapsed().as_secs_f64(),
    };

    // Risk assessment.
    let t3 = Instant::now();
    let scores: Vec<f64> = trajectories
        .par_iter()
        .enumerate()
        .map(|(index, t)| score_hypothesis(&plans[layout.locate(index).0], t, config).n_h)
        .collect();
    let mut probabilities = Vec::with_capacity(scores.len());
    for range in &layout.objects {
        probabilities.extend(normalize(&scores[range.start..range.start + range.len()])?);
    }
    if probabilities.iter().any(|p| !p.is_finite()) {
        return Err(RiskError::NonPositiveScore(f64::NAN).into());
    }
    let r_ego = layout.r_ego();
    let result = aggregate_criticality(&matrix, &probabilities[..r_ego], &probabilities[r_ego..], scenario.timestamp);
    let risk = StageSpan {
        start: since(t3),
        end: clock.elapsed().as_secs_f64(),
    };

    let pose_combinations = matrix.pair_count() * steps;
    let metrics = RunMetrics {
        stages: StageTimes {
            street,
            trajectories: trajectories_span,
            collision,
            risk,
        },
        total_seconds: clock.elapsed().as_secs_f64(),
        trajectories: layout.r_tra(),
        combinations: matrix.pair_count(),
        pose_combinations,
        throughput: pose_combinations as f64 / collision.seconds().max(1e-9),
        workers,
    };
    Ok(Evaluation {
        result,
        metrics,
        road,
        layout,
        plans,
        trajectories,
        probabilities,
        matrix,
    })
}
