//! Utilitarian allocation: every item goes to an agent who values it most.

use crate::model::{Allocation, Instance};

/// Complete integral allocation maximizing the sum of utilities.
///
/// Ties, including items nobody values, go to the lowest agent index.
pub fn allocate_maxsum(inst: &Instance) -> Allocation {
    let owners: Vec<Option<usize>> = (0..inst.n_items())
        .map(|j| {
            let mut best = 0;
            for i in 1..inst.n_agents() {
                if inst.value(i, j) > inst.value(best, j) {
                    best = i;
                }
            }
            Some(best)
        })
        .collect();
    Allocation::from_owners(inst.n_agents(), &owners)
}

/// `Σ_j max_i v_ij`, the welfare no allocation can exceed.
pub fn utilitarian_bound(inst: &Instance) -> f64 {
    (0..inst.n_items())
        .map(|j| {
            (0..inst.n_agents())
                .map(|i| inst.value(i, j))
                .fold(0.0, f64::max)
        })
        .sum()
}
