//! Weighted synchronization errors `e^k`, stability error `r` and `ρ`.

use nalgebra::DVector;

use super::Offsets;
use crate::dynamics::FleetState;
use crate::graph::Topology;
use crate::{Error, Result};

/// `e_i^k` for one agent and every order `k = 1..n`, written into `out`.
pub(crate) fn agent_sync_errors_into(
    i: usize,
    fleet: &FleetState,
    topology: &Topology,
    offsets: &Offsets,
    out: &mut [f64],
) {
    let a = topology.adjacency();
    let (nu1, nu2) = (topology.nu1(), topology.nu2());
    let b = topology.leader_weights()[i];
    let xi = &fleet.agents[i];
    let psi_i = &offsets.per_agent[i];
    for (k, o) in out.iter_mut().enumerate() {
        let xbar_i = xi[k] - psi_i[k];
        let mut neighbours = 0.0;
        for (j, xj) in fleet.agents.iter().enumerate() {
            let aij = a[(i, j)];
            if aij != 0.0 {
                neighbours += aij * (xbar_i - (xj[k] - offsets.per_agent[j][k]));
            }
        }
        let leader = b * (xbar_i - (fleet.leader[k] - offsets.leader[k]));
        *o = -nu1 * neighbours - nu2 * leader;
    }
}

fn check_shapes(fleet: &FleetState, topology: &Topology, offsets: &Offsets) -> Result<()> {
    let n_agents = topology.n_agents();
    if fleet.agents.len() != n_agents {
        return Err(Error::DimensionMismatch {
            expected: n_agents,
            got: fleet.agents.len(),
        });
    }
    let order = fleet.leader.len();
    if let Some(bad) = fleet.agents.iter().find(|x| x.len() != order) {
        return Err(Error::DimensionMismatch {
            expected: order,
            got: bad.len(),
        });
    }
    offsets.validate(n_agents, order)
}

/// `e^k` for all agents (`k` is 1-based).
pub fn sync_error(
    k: usize,
    fleet: &FleetState,
    topology: &Topology,
    offsets: &Offsets,
) -> Result<DVector<f64>> {
    check_shapes(fleet, topology, offsets)?;
    let order = fleet.order();
    if k == 0 || k > order {
        return Err(Error::DimensionMismatch {
            expected: order,
            got: k,
        });
    }
    Ok(sync_errors(fleet, topology, offsets)?.swap_remove(k - 1))
}

/// `[e^1, ..., e^n]`.
pub fn sync_errors(
    fleet: &FleetState,
    topology: &Topology,
    offsets: &Offsets,
) -> Result<Vec<DVector<f64>>> {
    check_shapes(fleet, topology, offsets)?;
    let (n_agents, order) = (fleet.n_agents(), fleet.order());
    let mut stack = vec![DVector::zeros(n_agents); order];
    let mut row = vec![0.0; order];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n_agents {
        agent_sync_errors_into(i, fleet, topology, offsets, &mut row);
        for (k, v) in row.iter().enumerate() {
            stack[k][i] = *v;
        }
    }
    Ok(stack)
}

/// `r = λ_1 e^1 + ... + λ_{n-1} e^{n-1} + e^n`.
pub fn stability_error(e_stack: &[DVector<f64>], lambda_bar: &[f64]) -> Result<DVector<f64>> {
    if e_stack.len() != lambda_bar.len() + 1 {
        return Err(Error::DimensionMismatch {
            expected: lambda_bar.len() + 1,
            got: e_stack.len(),
        });
    }
    let mut r = e_stack[e_stack.len() - 1].clone();
    for (e, l) in e_stack.iter().zip(lambda_bar) {
        r.axpy(*l, e, 1.0);
    }
    Ok(r)
}

/// `ρ = λ_1 e^2 + ... + λ_{n-1} e^n`, from the tail `[e^2, ..., e^n]`.
pub fn rho(e_tail: &[DVector<f64>], lambda_bar: &[f64]) -> Result<DVector<f64>> {
    if e_tail.len() != lambda_bar.len() || e_tail.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: lambda_bar.len(),
            got: e_tail.len(),
        });
    }
    let mut out = DVector::zeros(e_tail[0].len());
    for (e, l) in e_tail.iter().zip(lambda_bar) {
        out.axpy(*l, e, 1.0);
    }
    Ok(out)
}

/// Scalar forms for one agent: `(r_i, ρ_i)` from its row `e_i^1..e_i^n`.
pub(crate) fn agent_r_rho(e_row: &[f64], lambda_bar: &[f64]) -> (f64, f64) {
    let n = e_row.len();
    let mut r = e_row[n - 1];
    let mut rho = 0.0;
    for (k, l) in lambda_bar.iter().enumerate() {
        r += l * e_row[k];
        rho += l * e_row[k + 1];
    }
    (r, rho)
}
