use crate::dynamics::FleetState;

/// One recorded instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub t: f64,
    pub state: FleetState,
    /// `u_i` per agent.
    pub controls: Vec<f64>,
    /// `sync[k][i] = e_i^{k+1}`.
    pub sync: Vec<Vec<f64>>,
    /// `r_i` per agent.
    pub r: Vec<f64>,
    /// `relative[k][i] = (x_i^{k+1} - ψ_i) - (x_0^{k+1} - ψ_0)`, the tracking error δ.
    pub relative: Vec<Vec<f64>>,
    /// `[‖θ̂_i‖, ‖θ̂_0,i‖, ‖θ̂_w,i‖]` per agent.
    pub weight_norms: Vec<[f64; 3]>,
    /// Smallest `|x_i^1 - x_j^1|` over follower pairs; `None` for a single follower.
    pub min_pair_distance: Option<f64>,
    /// Smallest follower-obstacle distance; `None` without obstacles.
    pub min_obstacle_distance: Option<f64>,
}

impl Record {
    pub fn is_finite(&self) -> bool {
        let opt = |x: Option<f64>| x.is_none_or(f64::is_finite);
        self.t.is_finite()
            && self.state.is_finite()
            && self.controls.iter().all(|x| x.is_finite())
            && self.sync.iter().flatten().all(|x| x.is_finite())
            && self.r.iter().all(|x| x.is_finite())
            && self.relative.iter().flatten().all(|x| x.is_finite())
            && self.weight_norms.iter().flatten().all(|x| x.is_finite())
            && opt(self.min_pair_distance)
            && opt(self.min_obstacle_distance)
    }

    /// Euclidean norm over agents of the order-`k` tracking error (0-based `k`).
    pub fn relative_norm(&self, k: usize) -> f64 {
        self.relative[k].iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Time-indexed record of a run. Partial when `aborted` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub n_agents: usize,
    pub order: usize,
    pub n_obstacles: usize,
    pub records: Vec<Record>,
    pub aborted: Option<String>,
    /// Minimum pair distance over every integration step, not only records.
    pub step_min_pair_distance: Option<f64>,
    /// Minimum obstacle distance over every integration step.
    pub step_min_obstacle_distance: Option<f64>,
}

impl Trace {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.t)
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }
}
