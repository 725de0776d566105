//! Multi-hypothesis collision criticality estimation.
//!
//! The pipeline has four stages that run in order: street data processing
//! ([`street`]), trajectory generation ([`hypothesis`] on top of
//! [`motion`]), collision recognition ([`collision`]) and risk assessment
//! ([`risk`]). [`engine`] wires them together and runs each stage
//! data-parallel over immutable inputs.

pub mod collision;
pub mod engine;
pub mod error;
pub mod hypothesis;
pub mod motion;
pub mod risk;
pub mod scenario;
pub mod street;

pub use engine::{evaluate, Engine, RunMetrics, WorkerPolicy};
pub use error::{EngineError, ScenarioError, StreetError};
pub use risk::CriticalityResult;
pub use scenario::{Point2, Scenario, SimulationConfig};
