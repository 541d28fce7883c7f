//! Repulsive potentials for inter-agent, agent-leader and obstacle avoidance.
//!
//! All three act on the first (position-like) channel.

/// Lower clamp on distances entering `χ / distance`.
pub const DISTANCE_FLOOR: f64 = 1e-6;
/// Inside the obstacle core the potential is frozen at `∂ (1 + CORE_EPS)`.
pub const CORE_EPS: f64 = 1e-6;

/// `m_ij`: zero when `|x_i - x_j| ≥ ψ`, else `χ / |x_i - x_j|`.
pub fn collision_potential(xi1: f64, xj1: f64, chi: f64, psi: f64) -> f64 {
    let d = (xi1 - xj1).abs();
    if d >= psi {
        0.0
    } else {
        chi / d.max(DISTANCE_FLOOR)
    }
}

/// `m_i0`, same two-branch form with the leader threshold `ψ_i0`.
pub fn leader_potential(xi1: f64, x01: f64, chi: f64, psi0: f64) -> f64 {
    collision_potential(xi1, x01, chi, psi0)
}

/// `m_ib`: zero beyond the detection radius `R`, else
/// `[(R² - d²) / (d² - ∂²)]²`.
pub fn obstacle_potential(xi1: f64, omega: f64, detect_radius: f64, core_radius: f64) -> f64 {
    let d = (xi1 - omega).abs();
    if d > detect_radius {
        return 0.0;
    }
    let d = d.max(core_radius * (1.0 + CORE_EPS));
    let ratio = (detect_radius * detect_radius - d * d) / (d * d - core_radius * core_radius);
    ratio * ratio
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collision_branches() {
        assert_eq!(collision_potential(0.0, 1.5, 1.0, 1.0), 0.0);
        assert_eq!(collision_potential(0.0, 0.5, 1.0, 1.0), 2.0);
        assert_eq!(collision_potential(0.5, 0.0, 1.0, 1.0), 2.0);
        // tie goes to the zero branch
        assert_eq!(collision_potential(0.0, 1.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn leader_branches() {
        assert_eq!(leader_potential(3.0, 0.0, 2.0, 1.0), 0.0);
        assert!((leader_potential(0.4, 0.0, 2.0, 1.0) - 5.0).abs() < 1e-15);
        assert_eq!(leader_potential(1.0, 1.0, 2.0, 1.0), 2.0 / DISTANCE_FLOOR);
    }

    #[test]
    fn obstacle_branches() {
        assert_eq!(obstacle_potential(2.0, 0.0, 2.0, 1.0), 0.0);
        assert_eq!(obstacle_potential(2.5, 0.0, 2.0, 1.0), 0.0);
        assert!((obstacle_potential(1.5, 0.0, 2.0, 1.0) - 1.96).abs() < 1e-12);
        assert!((obstacle_potential(-1.5, 0.0, 2.0, 1.0) - 1.96).abs() < 1e-12);
    }

    #[test]
    fn obstacle_core_saturates() {
        let at_edge = obstacle_potential(1.0 + 1e-6, 0.0, 2.0, 1.0);
        assert_eq!(obstacle_potential(0.5, 0.0, 2.0, 1.0), at_edge);
        assert_eq!(obstacle_potential(0.0, 0.0, 2.0, 1.0), at_edge);
        assert!(at_edge.is_finite() && at_edge > 1e10);
    }
}
