//! Aerial phase of a jumping robot whose leg is attached through a sprung,
//! relatching joint: spring kinematics, the open-joint rotational dynamics,
//! the relock impact, ballistic metrics and design sweeps.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod flight;
pub mod model;
pub mod spring;
pub mod sweep;

pub use error::{EpjError, ErrorClass, Result};
pub use flight::{evaluate, JumpMetrics};
pub use model::{default_reference_scenario, DesignParameter, Scenario};
pub use sweep::{run_sweep, SweepResult, SweepSpec};
