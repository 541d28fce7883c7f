//! Closed-loop simulation: scenario, vector field, RK4, traces, metrics and
//! the ultimate-bound diagnostics.

mod diagnostics;
mod field;
mod integrator;
mod metrics;
mod run;
mod scenario;
mod trace;

pub use diagnostics::{
    cuub_diagnostics, omega, report_from_entries, ultimate_bound_radius, CuubBounds,
    DiagnosticsReport, GraphQuantities, KEntries, MinorCheck,
};
pub use field::{derivative_field, ClosedLoop, Snapshot};
pub use integrator::rk4_step;
pub use metrics::{metrics, AgentMetrics, Metrics, SETTLING_FACTOR, ULTIMATE_WINDOW};
pub use run::{run, run_closed_loop, WEIGHT_NORM_LIMIT};
pub use scenario::{NnConfig, Scenario, StateLayout};
pub use trace::{Record, Trace};
