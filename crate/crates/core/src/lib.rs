//! Distributed adaptive leader-follower consensus for heterogeneous
//! Brunovsky-chain agents.
//!
//! The crate is organised the way the closed loop is assembled:
//!
//! - [`graph`]: topology, Laplacian, pinning and the graph Lyapunov matrices.
//! - [`dynamics`]: follower and leader chains, drift and disturbance models,
//!   the bundled five-follower fleet.
//! - [`estimator`]: linear-in-parameters approximators and their tuning laws.
//! - [`controller`]: synchronization/stability errors, Hurwitz synthesis,
//!   avoidance potentials and the composite control law.
//! - [`sim`]: scenario, closed-loop field, RK4 stepping, traces, metrics and
//!   ultimate-bound diagnostics.
//! - [`config`]: the JSON scenario schema and its validation.
//! - [`output`] and [`cli`]: CSV/JSON emission and the command front end.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod controller;
pub mod dynamics;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod linalg;
pub mod output;
pub mod sim;

pub use error::{Error, Result};
