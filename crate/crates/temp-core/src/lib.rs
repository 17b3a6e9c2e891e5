//! Event-driven simulation, training, and AER routing for time-to-event
//! margin propagation (TEMP) spiking networks.
//!
//! The crate is organized around five subsystems:
//!
//! - [`temporal`]: the TEMP neuron itself — exact spike-time solving, online
//!   event stepping, and the leaky variant.
//! - [`differential`]: differential (t+, t-) layers with nonnegative delay
//!   weights, dense/conv topologies, and full-network forward evaluation.
//! - [`train`] (with [`encode`], [`grad`], [`data`]): exact spike-time
//!   gradients through causal sets, Adam training, and dataset generators.
//! - [`fabric`]: compilation of trained delays into quantized AER routing
//!   grids and a deterministic discrete-event scheduler.
//! - [`lif`]: numerical correspondence between TEMP and (n-)LIF neuron models
//!   under the piecewise-linear approximation of the exponential.
//!
//! [`analysis`], [`model`], and [`plot`] provide rasters, sweep metrics,
//! model-file serialization, and deterministic SVG output for the CLI.

pub mod analysis;
pub mod data;
pub mod differential;
pub mod encode;
pub mod fabric;
pub mod grad;
pub mod lif;
pub mod model;
pub mod plot;
pub mod temporal;
pub mod train;

pub use differential::{
    DelayWeight, DifferentialTime, LayerSpec, Network, NetworkSpec, NeuronSolve,
};
pub use encode::EncoderConfig;
pub use fabric::{BusEvent, FabricStack, RoutingFabric, RoutingGrid, Tick};
pub use temporal::{
    leaky_membrane, solve_spike_time, CausalSolve, MembraneState, Mode, NeuronParams, Polarity,
    SpikeEvent, Time, NEVER,
};
pub use train::{TrainConfig, TrainOutcome};
