use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("scenario has no ego state")]
    MissingEgo,
    #[error("non-finite number in {0}")]
    NonFinite(String),
    #[error("degenerate divider {0}: abscissae are not pairwise distinct")]
    DegenerateDivider(usize),
    #[error("{0} dividers given, at most 4 are supported")]
    TooManyDividers(usize),
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("schema violation: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StreetError {
    #[error("degenerate divider: singular fit")]
    DegenerateDivider,
    #[error("inconsistent road: dividers {0} and {1} cross inside their valid range")]
    InconsistentRoad(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypothesisError {
    #[error("{0} profiles requested, at least 3 are required")]
    TooFewProfiles(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollisionError {
    #[error("trajectory step counts differ: {0} vs {1}")]
    StepCountMismatch(usize, usize),
    #[error("{0} CO trajectories but {1} column owners")]
    ColumnCountMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("cannot normalize an empty score set")]
    EmptyScores,
    #[error("score {0} is not positive")]
    NonPositiveScore(f64),
}

/// Engine failure, attributed to the pipeline stage that produced it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("scenario validation: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("street data processing: {0}")]
    Street(#[from] StreetError),
    #[error("trajectory generation: {0}")]
    Hypothesis(#[from] HypothesisError),
    #[error("collision recognition: {0}")]
    Collision(#[from] CollisionError),
    #[error("risk assessment: {0}")]
    Risk(#[from] RiskError),
    #[error("worker pool: {0}")]
    Workers(String),
}
