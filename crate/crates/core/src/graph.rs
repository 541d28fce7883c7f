//! Communication topology and the matrices derived from it.
//!
//! Edge convention: `a_ij > 0` means agent `i` hears agent `j`, i.e.
//! information flows `j -> i`. `b_i` is the pinning weight of the
//! leader-to-`i` link.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::{Error, Result};

/// Relative pivot tolerance for the `£ q = 1` solve.
pub const PIVOT_TOLERANCE: f64 = 1e-12;
/// Positive-definiteness floor for `Q`.
pub const PD_TOLERANCE: f64 = 1e-10;

/// Weighted follower graph plus leader pinning and the two coupling gains.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    adjacency: DMatrix<f64>,
    leader_weights: DVector<f64>,
    nu1: f64,
    nu2: f64,
    undirected: bool,
}

impl Topology {
    /// Builds a topology after checking the structural invariants.
    ///
    /// An all-zero pinning vector is accepted here so that unpinned graphs can
    /// still be analysed; [`has_leader_spanning_tree`] and [`graph_lyapunov`]
    /// reject them, and scenario validation refuses to simulate them.
    pub fn new(
        adjacency: DMatrix<f64>,
        leader_weights: DVector<f64>,
        nu1: f64,
        nu2: f64,
        undirected: bool,
    ) -> Result<Self> {
        let n = adjacency.nrows();
        if n == 0 {
            return Err(Error::InvalidTopology("at least one agent required".into()));
        }
        if adjacency.ncols() != n {
            return Err(Error::InvalidTopology(format!(
                "adjacency must be square, got {}x{}",
                n,
                adjacency.ncols()
            )));
        }
        if leader_weights.len() != n {
            return Err(Error::InvalidTopology(format!(
                "leader_weights has length {}, expected {n}",
                leader_weights.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let a = adjacency[(i, j)];
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidTopology(format!(
                        "adjacency[{i}][{j}] = {a} must be finite and nonnegative"
                    )));
                }
            }
            if adjacency[(i, i)] != 0.0 {
                return Err(Error::InvalidTopology(format!(
                    "adjacency[{i}][{i}] must be zero"
                )));
            }
            let b = leader_weights[i];
            if !b.is_finite() || b < 0.0 {
                return Err(Error::InvalidTopology(format!(
                    "leader_weights[{i}] = {b} must be finite and nonnegative"
                )));
            }
        }
        if undirected {
            for i in 0..n {
                for j in 0..i {
                    if adjacency[(i, j)] != adjacency[(j, i)] {
                        return Err(Error::InvalidTopology(format!(
                            "undirected graph requires adjacency[{i}][{j}] == adjacency[{j}][{i}]"
                        )));
                    }
                }
            }
        }
        if !(nu1 > 0.0 && nu1.is_finite()) {
            return Err(Error::InvalidTopology(format!(
                "nu1 = {nu1} must be positive"
            )));
        }
        if !(nu2 > 0.0 && nu2.is_finite()) {
            return Err(Error::InvalidTopology(format!(
                "nu2 = {nu2} must be positive"
            )));
        }
        Ok(Self {
            adjacency,
            leader_weights,
            nu1,
            nu2,
            undirected,
        })
    }

    /// Convenience constructor from row-major nested slices.
    pub fn from_rows(
        adjacency: &[Vec<f64>],
        leader_weights: &[f64],
        nu1: f64,
        nu2: f64,
        undirected: bool,
    ) -> Result<Self> {
        let n = adjacency.len();
        if adjacency.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidTopology(
                "adjacency rows must all have length N".into(),
            ));
        }
        let a = DMatrix::from_fn(n, n, |i, j| adjacency[i][j]);
        Self::new(
            a,
            DVector::from_column_slice(leader_weights),
            nu1,
            nu2,
            undirected,
        )
    }

    pub fn n_agents(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn leader_weights(&self) -> &DVector<f64> {
        &self.leader_weights
    }

    pub fn nu1(&self) -> f64 {
        self.nu1
    }

    pub fn nu2(&self) -> f64 {
        self.nu2
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    /// In-degree `d_i`.
    pub fn degree(&self, i: usize) -> f64 {
        self.adjacency.row(i).sum()
    }

    /// `d_i + b_i`, the pinned in-degree used by the control and tuning laws.
    pub fn pin_degree(&self, i: usize) -> f64 {
        self.degree(i) + self.leader_weights[i]
    }

    pub fn with_nu(&self, nu1: f64, nu2: f64) -> Result<Self> {
        Self::new(
            self.adjacency.clone(),
            self.leader_weights.clone(),
            nu1,
            nu2,
            self.undirected,
        )
    }
}

/// `D = diag(d_1, ..., d_N)` with `d_i` the i-th row sum of the adjacency.
pub fn degree_matrix(topology: &Topology) -> DMatrix<f64> {
    let n = topology.n_agents();
    DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| topology.degree(i)))
}

/// `L = D - A`.
pub fn laplacian(topology: &Topology) -> DMatrix<f64> {
    degree_matrix(topology) - topology.adjacency()
}

/// `B = diag(b_1, ..., b_N)`.
pub fn pinning_matrix(topology: &Topology) -> DMatrix<f64> {
    DMatrix::from_diagonal(topology.leader_weights())
}

/// `£ = ν1 L + ν2 B`.
pub fn pinned_laplacian(topology: &Topology) -> DMatrix<f64> {
    laplacian(topology) * topology.nu1() + pinning_matrix(topology) * topology.nu2()
}

/// True iff every follower hears the leader, directly or through a chain of
/// nonzero adjacency entries ending at a pinned agent.
pub fn has_leader_spanning_tree(topology: &Topology) -> bool {
    let n = topology.n_agents();
    let a = topology.adjacency();
    let mut reached: Vec<bool> = topology.leader_weights().iter().map(|b| *b > 0.0).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| reached[i]).collect();
    while let Some(j) = queue.pop_front() {
        // j knows the leader; anyone listening to j does too.
        for i in 0..n {
            if !reached[i] && a[(i, j)] > 0.0 {
                reached[i] = true;
                queue.push_back(i);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Which diagonal `P` certified `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// `P = diag(1/q_i)`. Always succeeds on balanced (e.g. undirected) graphs.
    Reciprocal,
    /// `P = diag(p_i/q_i)` with `p = £^{-T} 1`. Used when the reciprocal form
    /// leaves `Q` indefinite, which can happen on unbalanced directed graphs;
    /// it is positive definite for every nonsingular M-matrix `£`.
    Weighted,
}

/// The diagonal Lyapunov certificate for the pinned Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLyapunov {
    /// `q = £^{-1} 1`.
    pub q: DVector<f64>,
    /// Diagonal of `P`.
    pub p_diag: DVector<f64>,
    /// `Q = P £ + £ᵀ P`.
    pub q_matrix: DMatrix<f64>,
    pub min_eig_q: f64,
    /// 1-norm condition number of `£`.
    pub condition: f64,
    pub certificate: Certificate,
}

impl GraphLyapunov {
    pub fn p_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.p_diag)
    }
}

fn lyapunov_q(pl: &DMatrix<f64>, p_diag: &DVector<f64>) -> (DMatrix<f64>, f64) {
    let p = DMatrix::from_diagonal(p_diag);
    let q_matrix = &p * pl + pl.transpose() * &p;
    let min_eig = linalg::sym_min_eigenvalue(&q_matrix);
    let certified = min_eig > PD_TOLERANCE && q_matrix.clone().cholesky().is_some();
    (q_matrix, if certified { min_eig } else { min_eig.min(0.0) })
}

fn positive(v: &DVector<f64>, name: &str) -> Result<()> {
    match v.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        Some((i, x)) => Err(Error::NonPositiveQ(format!("{name}[{i}] = {x}"))),
        None => Ok(()),
    }
}

/// Solves `£ q = 1`, forms `P = diag(1/q)` and `Q = P£ + £ᵀP`, and certifies
/// both are positive definite. Falls back to [`Certificate::Weighted`] when
/// the reciprocal diagonal does not certify.
pub fn graph_lyapunov(topology: &Topology) -> Result<GraphLyapunov> {
    let n = topology.n_agents();
    let pl = pinned_laplacian(topology);
    let scale = pl.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lu = pl.clone().lu();
    let u = lu.u();
    let min_pivot = u
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let pivot = if scale > 0.0 { min_pivot / scale } else { 0.0 };
    if !(pivot > PIVOT_TOLERANCE) {
        return Err(Error::SingularPinnedLaplacian { pivot });
    }
    let q = lu
        .solve(&linalg::ones(n))
        .ok_or(Error::SingularPinnedLaplacian { pivot })?;
    let inverse = lu
        .try_inverse()
        .ok_or(Error::SingularPinnedLaplacian { pivot })?;
    let condition = linalg::norm_1(&pl) * linalg::norm_1(&inverse);
    positive(&q, "q")?;

    let reciprocal = q.map(|qi| 1.0 / qi);
    let (q_matrix, min_eig_q) = lyapunov_q(&pl, &reciprocal);
    if min_eig_q > 0.0 {
        return Ok(GraphLyapunov {
            q,
            p_diag: reciprocal,
            q_matrix,
            min_eig_q,
            condition,
            certificate: Certificate::Reciprocal,
        });
    }

    let left = inverse.transpose() * linalg::ones(n);
    positive(&left, "p")?;
    let weighted = left.component_div(&q);
    let (q_matrix, min_eig_q) = lyapunov_q(&pl, &weighted);
    if !(min_eig_q > 0.0) {
        return Err(Error::NonPositiveQ(format!(
            "smallest eigenvalue of Q is {:.3e}",
            linalg::sym_min_eigenvalue(&q_matrix)
        )));
    }
    Ok(GraphLyapunov {
        q,
        p_diag: weighted,
        q_matrix,
        min_eig_q,
        condition,
        certificate: Certificate::Weighted,
    })
}

/// Connects every pair within `psi_threshold` of each other in the first
/// state channel with unit weight, keeping any heavier existing weight.
pub fn proximity_augment(
    topology: &Topology,
    first_states: &[f64],
    psi_threshold: f64,
) -> Result<Topology> {
    let n = topology.n_agents();
    if first_states.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: first_states.len(),
        });
    }
    if !(psi_threshold > 0.0) {
        return Err(Error::InvalidTopology(format!(
            "proximity threshold {psi_threshold} must be positive"
        )));
    }
    let mut a = topology.adjacency().clone();
    for i in 0..n {
        for j in 0..n {
            if i != j && (first_states[i] - first_states[j]).abs() <= psi_threshold {
                a[(i, j)] = a[(i, j)].max(1.0);
            }
        }
    }
    Topology::new(
        a,
        topology.leader_weights().clone(),
        topology.nu1(),
        topology.nu2(),
        topology.is_undirected(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn topo(a: &[Vec<f64>], b: &[f64]) -> Topology {
        Topology::from_rows(a, b, 1.0, 1.0, true).unwrap()
    }

    #[test]
    fn degree_of_small_graphs() {
        let t = topo(&[vec![0., 1.], vec![1., 0.]], &[1., 0.]);
        assert_eq!(degree_matrix(&t), dmatrix![1., 0.; 0., 1.]);
        let t = topo(&[vec![0., 0.], vec![0., 0.]], &[1., 1.]);
        assert_eq!(degree_matrix(&t), DMatrix::zeros(2, 2));
        let t = topo(
            &[vec![0., 2., 0.], vec![2., 0., 3.], vec![0., 3., 0.]],
            &[1., 0., 0.],
        );
        assert_eq!(degree_matrix(&t).diagonal().as_slice(), &[2., 5., 3.]);
    }

    #[test]
    fn laplacian_of_small_graphs() {
        let t = topo(&[vec![0., 1.], vec![1., 0.]], &[1., 0.]);
        assert_eq!(laplacian(&t), dmatrix![1., -1.; -1., 1.]);
        let t = topo(
            &[vec![0., 2., 0.], vec![2., 0., 3.], vec![0., 3., 0.]],
            &[1., 0., 0.],
        );
        assert_eq!(
            laplacian(&t),
            dmatrix![2., -2., 0.; -2., 5., -3.; 0., -3., 3.]
        );
        let ones = laplacian(&t) * linalg::ones(3);
        assert!(ones.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn spanning_tree_search() {
        assert!(has_leader_spanning_tree(&topo(
            &[vec![0., 1.], vec![1., 0.]],
            &[1., 0.]
        )));
        assert!(!has_leader_spanning_tree(&topo(
            &[vec![0., 0.], vec![0., 0.]],
            &[1., 0.]
        )));
    }

    #[test]
    fn spanning_tree_respects_direction() {
        // Agent 2 hears agent 1 (a_21 > 0), agent 1 is pinned.
        let t =
            Topology::from_rows(&[vec![0., 0.], vec![1., 0.]], &[1., 0.], 1., 1., false).unwrap();
        assert!(has_leader_spanning_tree(&t));
        // Agent 1 hears agent 2, but agent 2 hears nobody.
        let t =
            Topology::from_rows(&[vec![0., 1.], vec![0., 0.]], &[1., 0.], 1., 1., false).unwrap();
        assert!(!has_leader_spanning_tree(&t));
    }

    #[test]
    fn pinned_laplacian_examples() {
        let t = topo(&[vec![0.]], &[1.]);
        assert_eq!(pinned_laplacian(&t), dmatrix![1.]);
        let t = topo(&[vec![0., 1.], vec![1., 0.]], &[1., 0.]);
        assert_eq!(pinned_laplacian(&t), dmatrix![2., -1.; -1., 1.]);
        let t = topo(&[vec![0., 1.], vec![1., 0.]], &[0., 0.]);
        let annihilated = pinned_laplacian(&t) * linalg::ones(2);
        assert!(annihilated.amax() <= 1e-12);
    }

    #[test]
    fn graph_lyapunov_scalar() {
        let g = graph_lyapunov(&topo(&[vec![0.]], &[1.])).unwrap();
        assert_eq!(g.q.as_slice(), &[1.]);
        assert_eq!(g.p_diag.as_slice(), &[1.]);
        assert_eq!(g.q_matrix, dmatrix![2.]);
    }

    #[test]
    fn heavy_directed_chain_needs_weighted_certificate() {
        // 0 -> 1 -> 2 -> 3 with strong forward links: diag(1/q) fails here.
        let a = vec![vec![0., 0., 0.], vec![5., 0., 0.], vec![0., 5., 0.]];
        let t = Topology::from_rows(&a, &[1., 0., 0.], 1., 1., false).unwrap();
        let g = graph_lyapunov(&t).unwrap();
        assert_eq!(g.certificate, Certificate::Weighted);
        assert!(g.min_eig_q > PD_TOLERANCE);
        assert!(g.p_diag.iter().all(|p| *p > 0.0));
        let pl = pinned_laplacian(&t);
        let reciprocal = DMatrix::from_diagonal(&g.q.map(|x| 1.0 / x));
        let q = &reciprocal * &pl + pl.transpose() * &reciprocal;
        assert!(linalg::sym_min_eigenvalue(&q) < 0.0);
    }

    #[test]
    fn undirected_graphs_use_reciprocal_certificate() {
        let t = topo(&[vec![0., 1.], vec![1., 0.]], &[1., 0.]);
        assert_eq!(
            graph_lyapunov(&t).unwrap().certificate,
            Certificate::Reciprocal
        );
    }

    #[test]
    fn graph_lyapunov_two_nodes() {
        let g = graph_lyapunov(&topo(&[vec![0., 1.], vec![1., 0.]], &[1., 0.])).unwrap();
        assert!((g.q[0] - 2.0).abs() < 1e-12);
        assert!((g.q[1] - 3.0).abs() < 1e-12);
        assert!((g.p_diag[0] - 0.5).abs() < 1e-12);
        assert!((g.p_diag[1] - 1.0 / 3.0).abs() < 1e-12);
        let expected = dmatrix![2., -5. / 6.; -5. / 6., 2. / 3.];
        assert!((&g.q_matrix - expected).amax() < 1e-12);
        assert!(g.min_eig_q > 0.0);
    }

    #[test]
    fn graph_lyapunov_rejects_unpinned() {
        let err = graph_lyapunov(&topo(&[vec![0., 1.], vec![1., 0.]], &[0., 0.])).unwrap_err();
        assert!(matches!(err, Error::SingularPinnedLaplacian { .. }));
    }

    #[test]
    fn proximity_examples() {
        let t = topo(&[vec![0., 0.], vec![0., 0.]], &[1., 1.]);
        let out = proximity_augment(&t, &[0., 10.], 1.0).unwrap();
        assert_eq!(out.adjacency(), &DMatrix::zeros(2, 2));
        let out = proximity_augment(&t, &[0., 0.5], 1.0).unwrap();
        assert_eq!(out.adjacency(), &dmatrix![0., 1.; 1., 0.]);

        let t = topo(&vec![vec![0.; 3]; 3], &[1., 1., 1.]);
        let out = proximity_augment(&t, &[0., 0.5, 10.], 1.0).unwrap();
        assert_eq!(
            out.adjacency(),
            &dmatrix![0., 1., 0.; 1., 0., 0.; 0., 0., 0.]
        );
    }

    #[test]
    fn proximity_keeps_heavier_weights() {
        let t = topo(&[vec![0., 3.], vec![3., 0.]], &[1., 0.]);
        let out = proximity_augment(&t, &[0., 0.1], 1.0).unwrap();
        assert_eq!(out.adjacency()[(0, 1)], 3.0);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(Topology::from_rows(&[vec![1.]], &[1.], 1., 1., true).is_err());
        assert!(
            Topology::from_rows(&[vec![0., -1.], vec![-1., 0.]], &[1., 0.], 1., 1., true).is_err()
        );
        assert!(
            Topology::from_rows(&[vec![0., 1.], vec![2., 0.]], &[1., 0.], 1., 1., true).is_err()
        );
        assert!(Topology::from_rows(&[vec![0.]], &[1.], 0., 1., true).is_err());
        assert!(Topology::from_rows(&[vec![0.]], &[1.], 1., -1., true).is_err());
        assert!(Topology::from_rows(&[vec![0.]], &[1., 2.], 1., 1., true).is_err());
    }
}
