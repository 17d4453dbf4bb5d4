use std::collections::VecDeque;

use super::CostMatrix;
use crate::error::{Error, Result};

/// Factor by which epsilon shrinks between scaling phases.
const SCALING_FACTOR: f64 = 5.0;
/// Smallest epsilon tried, relative to the largest cost.
const EPSILON_FLOOR: f64 = 1e-13;
/// Bid budget per phase, in units of the problem size.
const BIDS_PER_PERSON: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct AuctionSolution {
    pub assignment: Vec<usize>,
    /// Cost of `assignment`.
    pub primal: f64,
    /// Dual objective built from the final prices; a lower bound on the optimum.
    pub dual: f64,
    pub phases: usize,
}

/// Forward auction with epsilon scaling for the minimum-cost assignment.
///
/// Each phase ends with every row assigned under epsilon-complementary
/// slackness, so `primal - dual <= n * epsilon`. Phases continue until
/// `primal - dual <= rel_tol * dual`, which bounds the relative error of
/// `primal` against the true optimum by `rel_tol`.
pub fn solve_auction(costs: &CostMatrix, rel_tol: f64) -> Result<AuctionSolution> {
    let n = costs.size();
    if n == 0 {
        return Ok(AuctionSolution {
            assignment: Vec::new(),
            primal: 0.0,
            dual: 0.0,
            phases: 0,
        });
    }
    let cmax = costs.max();
    if cmax == 0.0 {
        return Ok(AuctionSolution {
            assignment: (0..n).collect(),
            primal: 0.0,
            dual: 0.0,
            phases: 0,
        });
    }

    let mut prices = vec![0.0f64; n];
    let mut eps = cmax / 4.0;
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut best_dual = 0.0f64;
    let mut phases = 0;

    loop {
        phases += 1;
        let assignment = run_phase(costs, &mut prices, eps).ok_or_else(|| {
            Error::ApproximationFailure {
                upper: best.as_ref().map_or(f64::INFINITY, |b| b.1),
                lower: best_dual,
            }
        })?;
        let primal = costs.cost_of(&assignment);
        let dual = dual_value(costs, &prices);
        if best.as_ref().is_none_or(|b| primal < b.1) {
            best = Some((assignment, primal));
        }
        // costs are nonnegative, so zero is always a valid lower bound
        best_dual = best_dual.max(dual).max(0.0);

        let (assignment, primal) = best.as_ref().unwrap();
        let gap = primal - best_dual;
        if gap <= rel_tol * best_dual {
            return Ok(AuctionSolution {
                assignment: assignment.clone(),
                primal: *primal,
                dual: best_dual.min(*primal),
                phases,
            });
        }
        if eps <= cmax * EPSILON_FLOOR {
            return Err(Error::ApproximationFailure {
                upper: *primal,
                lower: best_dual,
            });
        }
        // n * eps <= rel_tol * dual is enough to certify the next phase
        let target = rel_tol * best_dual / n as f64;
        eps = (eps / SCALING_FACTOR).max(target).min(eps / 2.0);
        eps = eps.max(cmax * EPSILON_FLOOR);
    }
}

/// One Gauss-Seidel auction round at fixed epsilon. Prices carry over from
/// earlier phases; assignments start empty. `None` when the bid budget runs out.
fn run_phase(costs: &CostMatrix, prices: &mut [f64], eps: f64) -> Option<Vec<usize>> {
    let n = costs.size();
    let mut owner = vec![usize::MAX; n];
    let mut assigned = vec![usize::MAX; n];
    let mut queue: VecDeque<usize> = (0..n).collect();
    let budget = BIDS_PER_PERSON.saturating_mul(n);
    let mut bids = 0usize;

    while let Some(person) = queue.pop_front() {
        bids += 1;
        if bids > budget {
            return None;
        }
        let row = costs.row(person);
        let mut best_obj = 0;
        let mut best = f64::INFINITY;
        let mut second = f64::INFINITY;
        for (j, (&c, &p)) in row.iter().zip(prices.iter()).enumerate() {
            let w = c + p;
            if w < best {
                second = best;
                best = w;
                best_obj = j;
            } else if w < second {
                second = w;
            }
        }
        let increment = if second.is_finite() { second - best + eps } else { eps };
        prices[best_obj] += increment;
        let previous = owner[best_obj];
        owner[best_obj] = person;
        assigned[person] = best_obj;
        if previous != usize::MAX {
            assigned[previous] = usize::MAX;
            queue.push_back(previous);
        }
    }
    Some(assigned)
}

/// Dual objective for potentials u_i = min_j (c_ij + p_j), v_j = -p_j.
fn dual_value(costs: &CostMatrix, prices: &[f64]) -> f64 {
    let row_min: f64 = (0..costs.size())
        .map(|i| {
            costs
                .row(i)
                .iter()
                .zip(prices)
                .map(|(&c, &p)| c + p)
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    row_min - prices.iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::super::solve_exact;
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    #[test]
    fn agrees_with_exact_on_random_matrices() {
        let mut rng = seeded(99);
        for n in [1, 2, 5, 17, 40] {
            let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..3.0)).collect();
            let costs = CostMatrix::new(n, data);
            let exact = costs.cost_of(&solve_exact(&costs));
            let sol = solve_auction(&costs, 1e-6).unwrap();
            assert!(sol.primal >= exact - 1e-12);
            assert!(sol.primal <= exact * (1.0 + 1e-6) + 1e-12);
            assert!(sol.dual <= exact + 1e-9);
            let mut cols = sol.assignment.clone();
            cols.sort_unstable();
            assert_eq!(cols, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn zero_optimum_is_reached_exactly() {
        // identity permutation hidden among positive costs
        let n = 12;
        let mut data = vec![1.0; n * n];
        for i in 0..n {
            data[i * n + (i * 5) % n] = 0.0;
        }
        let sol = solve_auction(&CostMatrix::new(n, data), 1e-3).unwrap();
        assert_eq!(sol.primal, 0.0);
    }
}
