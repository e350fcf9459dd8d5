//! The fluctuational particle-creation law and the cosmological
//! observables that follow from the particle number.

mod analysis;
mod model;
mod sim;

use thiserror::Error;

use crate::quantities::ConstantsError;

pub use analysis::{lambda_estimate, trend_checks, LambdaSample, TrendReport};
pub use model::{
    closed_form_n, creation_rate, derived_observables, CosmologyState, Observables, Scales,
};
pub use sim::{run_simulation, Clock, EnsembleStat, Mode, SimulationConfig, TimeSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CosmologyError {
    #[error("step exceeds Compton time")]
    StepExceedsComptonTime,
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("samples must span at least two decades of time")]
    InsufficientSpan,
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}

impl TimeSeries {
    pub fn lambda(&self) -> Result<Vec<LambdaSample>, CosmologyError> {
        lambda_estimate(&self.states)
    }

    pub fn trends(&self) -> Result<TrendReport, CosmologyError> {
        trend_checks(&self.states, self.scales.l, self.scales.m, self.scales.c)
    }
}
