//! Fractional leximin allocation by iterated linear programming.
//!
//! Each round maximizes a common floor `t` for all agents not yet frozen while
//! frozen agents keep their targets. Agents that cannot rise above `t` (checked
//! by maximizing each candidate's own utility) are frozen at `t`, and the next
//! round starts. The process ends once every agent is frozen.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::lp::{Cmp, LinearProgram, LpError, LpSolver, MicroLp};
use crate::model::{utilities, Allocation, Instance, ModelError, EPS};

/// Slack below which an agent counts as unable to exceed the current floor.
pub const FREEZE_TOL: f64 = 1e-7;

/// Relaxation applied to floors so re-solves stay feasible under round-off.
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LeximinError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("case {case_id}: leximin round {level}: {source}")]
    Lp {
        case_id: String,
        level: usize,
        #[source]
        source: LpError,
    },
}

/// Bookkeeping for the freezing rounds.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LeximinState {
    /// Agents in the order they were frozen.
    pub frozen: Vec<usize>,
    /// Utility floor of each frozen agent, parallel to `frozen`.
    pub targets: Vec<f64>,
    /// Number of max-floor rounds solved so far.
    pub level: usize,
}

impl LeximinState {
    fn target_of(&self, agent: usize) -> Option<f64> {
        self.frozen
            .iter()
            .position(|&a| a == agent)
            .map(|k| self.targets[k])
    }

    fn freeze(&mut self, agent: usize, target: f64) {
        let floor = self.targets.last().copied().unwrap_or(f64::NEG_INFINITY);
        self.frozen.push(agent);
        self.targets.push(target.max(floor));
    }
}

pub fn allocate_leximin(inst: &Instance) -> Result<Allocation, LeximinError> {
    allocate_leximin_with(inst, &MicroLp).map(|(a, _)| a)
}

/// Leximin allocation with an explicit LP backend, returning the freeze log.
pub fn allocate_leximin_with(
    inst: &Instance,
    solver: &dyn LpSolver,
) -> Result<(Allocation, LeximinState), LeximinError> {
    let (n, m) = (inst.n_agents(), inst.n_items());
    let mut state = LeximinState::default();

    let scale = inst
        .valuations
        .iter()
        .flatten()
        .copied()
        .fold(0.0, f64::max);
    if scale == 0.0 {
        // Nobody values anything; any complete split is leximin.
        for i in 0..n {
            state.freeze(i, 0.0);
        }
        let owners = vec![Some(0); m];
        return Ok((Allocation::from_owners(n, &owners), state));
    }
    let values: Vec<Vec<f64>> = inst
        .valuations
        .iter()
        .map(|row| row.iter().map(|v| v / scale).collect())
        .collect();

    for (i, row) in values.iter().enumerate() {
        if row.iter().all(|&v| v == 0.0) {
            state.freeze(i, 0.0);
        }
    }

    let program = FloorProgram::new(&values);
    let mut point = None;
    while state.frozen.len() < n {
        state.level += 1;
        let level = state.level;
        let lp_err = |source| LeximinError::Lp {
            case_id: inst.case_id.clone(),
            level,
            source,
        };

        let unfrozen: Vec<usize> = (0..n).filter(|&i| state.target_of(i).is_none()).collect();
        let sol = solver
            .maximize(&program.max_floor(&state))
            .map_err(lp_err)?;
        let floor = sol.objective;
        let reached = program.utilities(&sol.point);
        point = Some(sol.point);

        let mut newly = Vec::new();
        let mut best_escape = (f64::INFINITY, unfrozen[0]);
        for &k in &unfrozen {
            if reached[k] > floor + FREEZE_TOL {
                continue;
            }
            let lp = program.max_single(&state, k, floor);
            let own = solver.maximize(&lp).map_err(lp_err)?.objective;
            if own <= floor + FREEZE_TOL {
                newly.push(k);
            } else if own < best_escape.0 {
                best_escape = (own, k);
            }
        }
        if newly.is_empty() {
            // Only reachable through solver round-off: freeze the agent
            // closest to the floor so the loop still makes progress.
            newly.push(best_escape.1);
        }
        for k in newly {
            state.freeze(k, floor);
        }
    }

    let shares = match point {
        Some(p) => program.shares(&p),
        None => {
            // Every agent has an all-zero row: nothing to optimize.
            let owners = vec![Some(0); m];
            return Ok((Allocation::from_owners(n, &owners), state));
        }
    };
    for t in state.targets.iter_mut() {
        *t *= scale;
    }
    Ok((Allocation::from_shares(shares)?, state))
}

/// Shared variable layout: `x[i*m + j]` is agent `i`'s share of item `j`,
/// the final variable is the floor `t`.
struct FloorProgram<'a> {
    values: &'a [Vec<f64>],
    n: usize,
    m: usize,
}

impl<'a> FloorProgram<'a> {
    fn new(values: &'a [Vec<f64>]) -> Self {
        let n = values.len();
        let m = values.first().map_or(0, Vec::len);
        FloorProgram { values, n, m }
    }

    fn base(&self) -> LinearProgram {
        let mut lp = LinearProgram::default();
        for _ in 0..self.n * self.m {
            lp.add_var(0.0, (0.0, 1.0));
        }
        for j in 0..self.m {
            let col = (0..self.n).map(|i| (i * self.m + j, 1.0)).collect();
            lp.add_constraint(col, Cmp::Eq, 1.0);
        }
        lp
    }

    fn utility_terms(&self, agent: usize) -> Vec<(usize, f64)> {
        self.values[agent]
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(j, &v)| (agent * self.m + j, v))
            .collect()
    }

    fn frozen_floors(&self, lp: &mut LinearProgram, state: &LeximinState) {
        for (&i, &target) in state.frozen.iter().zip(&state.targets) {
            lp.add_constraint(self.utility_terms(i), Cmp::Ge, relaxed(target));
        }
    }

    fn max_floor(&self, state: &LeximinState) -> LinearProgram {
        let mut lp = self.base();
        let t = lp.add_var(1.0, (0.0, f64::INFINITY));
        self.frozen_floors(&mut lp, state);
        for i in 0..self.n {
            if state.target_of(i).is_none() {
                let mut terms = self.utility_terms(i);
                terms.push((t, -1.0));
                lp.add_constraint(terms, Cmp::Ge, 0.0);
            }
        }
        lp
    }

    fn max_single(&self, state: &LeximinState, agent: usize, floor: f64) -> LinearProgram {
        let mut lp = self.base();
        for (j, &v) in self.values[agent].iter().enumerate() {
            lp.objective[agent * self.m + j] = v;
        }
        self.frozen_floors(&mut lp, state);
        for i in 0..self.n {
            if i != agent && state.target_of(i).is_none() {
                lp.add_constraint(self.utility_terms(i), Cmp::Ge, relaxed(floor));
            }
        }
        lp
    }

    fn utilities(&self, point: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (0..self.m)
                    .map(|j| self.values[i][j] * point[i * self.m + j])
                    .sum()
            })
            .collect()
    }

    /// Clamp the solver point into the polytope and make every column sum to 1.
    fn shares(&self, point: &[f64]) -> Vec<Vec<f64>> {
        let mut shares: Vec<Vec<f64>> = (0..self.n)
            .map(|i| {
                (0..self.m)
                    .map(|j| clean_share(point[i * self.m + j]))
                    .collect()
            })
            .collect();
        for j in 0..self.m {
            let sum: f64 = shares.iter().map(|r| r[j]).sum();
            if sum <= 0.0 {
                shares[0][j] = 1.0;
                continue;
            }
            for row in shares.iter_mut() {
                row[j] /= sum;
            }
        }
        shares
    }
}

fn relaxed(floor: f64) -> f64 {
    floor - FLOOR_SLACK * floor.abs().max(1.0)
}

fn clean_share(s: f64) -> f64 {
    if s < EPS * 1e-3 {
        0.0
    } else if s > 1.0 - EPS * 1e-3 {
        1.0
    } else {
        s
    }
}

/// Compare sorted utility vectors lexicographically (ascending entries).
/// `Greater` means `candidate` is leximin-better than `challenger`.
pub fn check_leximin_dominance(
    inst: &Instance,
    candidate: &Allocation,
    challenger: &Allocation,
) -> Result<Ordering, ModelError> {
    let a = utilities(inst, candidate)?.sorted();
    let b = utilities(inst, challenger)?.sorted();
    Ok(compare_sorted(&a, &b))
}

/// Lexicographic comparison of two ascending utility vectors with [`EPS`]
/// per-coordinate tolerance.
pub fn compare_sorted(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > EPS {
            return x.total_cmp(y);
        }
    }
    a.len().cmp(&b.len())
}
