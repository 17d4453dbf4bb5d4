//! Earth Mover's distance between equally sized point clouds, posed as a
//! dense linear assignment over Euclidean costs.
//!
//! Small problems are solved exactly with a shortest-augmenting-path solver.
//! Above `exact_threshold` points an auction solver with epsilon scaling
//! runs until its duality gap certifies the requested relative error.

mod auction;
mod exact;

pub use auction::solve_auction;
pub use exact::solve_exact;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmdConfig {
    /// Largest point count solved exactly.
    pub exact_threshold: usize,
    /// Relative error tolerated by the approximate solver.
    pub epsilon: f64,
    /// Report the mean per-point cost instead of the total.
    pub normalize: bool,
}

impl Default for EmdConfig {
    fn default() -> Self {
        Self {
            exact_threshold: 512,
            epsilon: 1e-3,
            normalize: true,
        }
    }
}

impl EmdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.exact_threshold == 0 {
            return Err(Error::InvalidArgument("exact_threshold must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        Ok(())
    }

    pub fn method_for(&self, n: usize) -> EmdMethod {
        if n <= self.exact_threshold {
            EmdMethod::Exact
        } else {
            EmdMethod::Auction
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmdMethod {
    Exact,
    Auction,
}

/// Dense square cost matrix, row-major.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "cost matrix must be n x n");
        Self { n, data }
    }

    pub fn euclidean(a: &PointCloud, b: &PointCloud) -> Self {
        let n = a.len();
        let mut data = Vec::with_capacity(n * n);
        for p in a.points() {
            data.extend(b.points().iter().map(|q| distance(p, q)));
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Total cost of `assignment` (row i -> column assignment[i]), summed in row order.
    pub fn cost_of(&self, assignment: &[usize]) -> f64 {
        assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| self.get(i, j))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmdSolution {
    /// Transport cost of `assignment`, normalized when configured.
    pub cost: f64,
    /// Certified lower bound on the optimum, on the same scale as `cost`.
    pub lower_bound: f64,
    /// Row i of the first cloud is matched to point `assignment[i]` of the second.
    pub assignment: Vec<usize>,
    pub method: EmdMethod,
}

pub fn emd_solution(s1: &PointCloud, s2: &PointCloud, cfg: &EmdConfig) -> Result<EmdSolution> {
    cfg.validate()?;
    if s1.len() != s2.len() {
        return Err(Error::UnequalCardinality {
            left: s1.len(),
            right: s2.len(),
        });
    }
    let n = s1.len();
    let costs = CostMatrix::euclidean(s1, s2);
    let method = cfg.method_for(n);
    let (assignment, cost, lower) = match method {
        EmdMethod::Exact => {
            let assignment = solve_exact(&costs);
            let cost = costs.cost_of(&assignment);
            (assignment, cost, cost)
        }
        EmdMethod::Auction => {
            let sol = solve_auction(&costs, cfg.epsilon)?;
            (sol.assignment, sol.primal, sol.dual)
        }
    };
    let scale = if cfg.normalize { n as f64 } else { 1.0 };
    Ok(EmdSolution {
        cost: cost / scale,
        lower_bound: lower / scale,
        assignment,
        method,
    })
}

/// Earth Mover's distance under `cfg`.
pub fn emd(s1: &PointCloud, s2: &PointCloud, cfg: &EmdConfig) -> Result<f64> {
    emd_solution(s1, s2, cfg).map(|s| s.cost)
}
