//! Random generators and independent oracles shared by the integration and
//! acceptance tests. Nothing here calls into the library's own matrix
//! builders, so comparisons against it are genuine cross-checks.
#![allow(dead_code, clippy::needless_range_loop)]

use consensus_lab::controller::Offsets;
use consensus_lab::dynamics::FleetState;
use consensus_lab::graph::Topology;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense adjacency (`a[i][j] > 0`: i hears j) and pinning weights.
#[derive(Debug, Clone)]
pub struct Graph {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Graph {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn topology(&self, nu1: f64, nu2: f64) -> Topology {
        Topology::from_rows(&self.a, &self.b, nu1, nu2, false).expect("valid topology")
    }
}

/// Directed graph with edge probability `p`, weights in `[0.5, 2]`, and each
/// agent pinned with probability `pin_p`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, pin_p: f64) -> Graph {
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, w) in row.iter_mut().enumerate() {
            if i != j && rng.random_bool(p) {
                *w = rng.random_range(0.5..2.0);
            }
        }
    }
    let b = (0..n)
        .map(|_| {
            if rng.random_bool(pin_p) {
                rng.random_range(0.5..2.0)
            } else {
                0.0
            }
        })
        .collect();
    Graph { a, b }
}

/// Agents reachable from the leader along information flow (j -> i when
/// `a[i][j] > 0`), by plain depth-first search.
pub fn reachable(g: &Graph) -> Vec<bool> {
    let n = g.n();
    let mut seen: Vec<bool> = g.b.iter().map(|&b| b > 0.0).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| seen[i]).collect();
    while let Some(j) = stack.pop() {
        for i in 0..n {
            if !seen[i] && g.a[i][j] > 0.0 {
                seen[i] = true;
                stack.push(i);
            }
        }
    }
    seen
}

/// Random graph with `n ∈ [2, 8]` that every follower can hear the leader in.
pub fn random_pinned_graph<R: Rng>(rng: &mut R) -> Graph {
    loop {
        let n = rng.random_range(2..=8);
        let p = rng.random_range(0.15..0.7);
        let g = random_graph(rng, n, p, 0.3);
        if reachable(&g).iter().all(|&r| r) {
            return g;
        }
    }
}

/// Cuts a nonempty cluster `S` off from the leader: removes every edge into
/// `S` from outside and every pin inside `S`.
pub fn cut_cluster<R: Rng>(rng: &mut R, mut g: Graph) -> (Graph, Vec<usize>) {
    let n = g.n();
    let mut cluster: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
    if cluster.is_empty() {
        cluster.push(rng.random_range(0..n));
    }
    for &i in &cluster {
        g.b[i] = 0.0;
        for j in 0..n {
            if !cluster.contains(&j) {
                g.a[i][j] = 0.0;
            }
        }
    }
    (g, cluster)
}

/// `ν1 (D - A) + ν2 B` assembled entry by entry.
pub fn pinned_laplacian_oracle(g: &Graph, nu1: f64, nu2: f64) -> DMatrix<f64> {
    let n = g.n();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let degree: f64 = (0..n).filter(|&k| k != i).map(|k| g.a[i][k]).sum();
            nu1 * degree + nu2 * g.b[i]
        } else {
            -nu1 * g.a[i][j]
        }
    })
}

/// Gaussian elimination with partial pivoting; `None` if a pivot vanishes.
pub fn solve_oracle(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let n = m.nrows();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| m[(i, j)]).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..=n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (a[i][n] - s) / a[i][i];
    }
    Some(DVector::from_vec(x))
}

/// Companion matrix written out directly: superdiagonal ones, last row `-λ̄`.
pub fn companion_oracle(lambda: &[f64]) -> DMatrix<f64> {
    let m = lambda.len();
    let mut d = DMatrix::zeros(m, m);
    for i in 0..m.saturating_sub(1) {
        d[(i, i + 1)] = 1.0;
    }
    for j in 0..m {
        d[(m - 1, j)] = -lambda[j];
    }
    d
}

/// Solves `ΔᵀP + PΔ = -ᾱI` through the full `m²×m²` Kronecker system.
pub fn kronecker_lyapunov(delta: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    let m = delta.nrows();
    let id = DMatrix::<f64>::identity(m, m);
    let dt = delta.transpose();
    // vec(ΔᵀP) = (I ⊗ Δᵀ) vec P, vec(PΔ) = (Δᵀ ⊗ I) vec P, column-major vec.
    let big = id.kronecker(&dt) + dt.kronecker(&id);
    let rhs = DVector::from_iterator(m * m, (-alpha * &id).iter().copied());
    let x = big.lu().solve(&rhs).expect("Kronecker system is regular");
    DMatrix::from_column_slice(m, m, x.as_slice())
}

/// Determinant by recursive Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

/// Leading principal minors of a square matrix by cofactor expansion.
pub fn leading_minors_oracle(m: &[Vec<f64>]) -> Vec<f64> {
    (1..=m.len())
        .map(|k| {
            let sub: Vec<Vec<f64>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
            cofactor_det(&sub)
        })
        .collect()
}

/// Random fleet and offsets with entries in `[-5, 5]`.
pub fn random_fleet<R: Rng>(rng: &mut R, n: usize, order: usize) -> (FleetState, Offsets) {
    let mut v = || {
        (0..order)
            .map(|_| rng.random_range(-5.0..5.0))
            .collect::<Vec<f64>>()
    };
    let agents = (0..n).map(|_| v()).collect();
    let leader = v();
    let per_agent = (0..n).map(|_| v()).collect();
    let leader_offset = v();
    (
        FleetState {
            agents,
            leader,
            time: 0.0,
        },
        Offsets {
            per_agent,
            leader: leader_offset,
        },
    )
}

/// Global error form `-(ν1 L + ν2 B)(x̄^k - x̄_0^k 1)` for channel `k` (0-based).
pub fn global_sync_error(
    g: &Graph,
    nu1: f64,
    nu2: f64,
    fleet: &FleetState,
    offsets: &Offsets,
    k: usize,
) -> DVector<f64> {
    let n = g.n();
    let x0 = fleet.leader[k] - offsets.leader[k];
    let dx = DVector::from_fn(n, |i, _| fleet.agents[i][k] - offsets.per_agent[i][k] - x0);
    -(pinned_laplacian_oracle(g, nu1, nu2) * dx)
}

/// Random Hurwitz coefficients: expands `∏(s + ξ_j)` with `ξ_j ∈ [0.5, 3]`.
pub fn random_hurwitz_lambda<R: Rng>(rng: &mut R, len: usize) -> (Vec<f64>, Vec<f64>) {
    let roots: Vec<f64> = (0..len).map(|_| rng.random_range(0.5..3.0)).collect();
    // Monic polynomial coefficients, ascending powers.
    let mut c = vec![1.0];
    for &x in &roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k] += x * v;
            next[k + 1] += v;
        }
        c = next;
    }
    c.pop();
    (c, roots)
}
