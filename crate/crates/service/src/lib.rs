//! Scenario service for the market-entry engine: file-backed store, HTTP API
//! and the pieces shared with the command-line tool.

pub mod api;
pub mod error;
pub mod output;
pub mod scenario;
pub mod store;

pub use error::{Result, ServiceError};
pub use scenario::{
    compare_methods, evaluate_method, evaluate_scenario, EvaluationRecord, MethodComparison,
    Scenario, ScenarioDraft, UpdateRequest,
};
pub use store::Store;
