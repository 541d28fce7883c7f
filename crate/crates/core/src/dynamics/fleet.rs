//! The bundled one-leader, five-follower vehicle fleet.

use super::{AgentModel, BuiltinDrift, Disturbance, Drift, LeaderModel, GRAVITY};

pub const SEC5_MASSES: [f64; 5] = [1200.0, 1100.0, 1500.0, 1400.0, 1500.0];
pub const SEC5_LEADER_MASS: f64 = 2000.0;
/// Constant follower disturbance.
pub const SEC5_ZETA: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FleetParameters {
    pub leader_mass: f64,
    pub masses: [f64; 5],
    pub gravity: f64,
    pub zeta: [f64; 5],
    /// Amplitude and spatial frequency of the road grade `a sin(k s)`.
    pub grade_amplitude: f64,
    pub grade_wavenumber: f64,
}

pub fn builtin_fleet() -> (LeaderModel, Vec<AgentModel>, FleetParameters) {
    let leader = LeaderModel::new(
        "leader",
        2,
        Drift::Builtin(BuiltinDrift::Leader),
        SEC5_LEADER_MASS,
    )
    .expect("builtin leader is valid");
    let drifts = [
        BuiltinDrift::Agent1,
        BuiltinDrift::Agent2,
        BuiltinDrift::Agent3,
        BuiltinDrift::Agent4,
        BuiltinDrift::Agent5,
    ];
    let agents = drifts
        .iter()
        .zip(SEC5_MASSES)
        .enumerate()
        .map(|(i, (d, m))| {
            AgentModel::new(
                format!("agent{}", i + 1),
                2,
                Drift::Builtin(*d),
                m,
                Disturbance::Constant(SEC5_ZETA),
            )
            .expect("builtin follower is valid")
        })
        .collect();
    let params = FleetParameters {
        leader_mass: SEC5_LEADER_MASS,
        masses: SEC5_MASSES,
        gravity: GRAVITY,
        zeta: [SEC5_ZETA; 5],
        grade_amplitude: 0.05,
        grade_wavenumber: 0.1,
    };
    (leader, agents, params)
}
