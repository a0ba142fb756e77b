//! Proportionality up to the maximin item.
//!
//! An allocation is PROPm when every agent `i` satisfies
//! `u_i + max_{j≠i} min_{g∈A_j} v_i(g) ≥ v_i(M)/n`, where an empty bundle
//! contributes 0 to the outer maximum.
//!
//! [`allocate_propm`] builds such an allocation by repeated last-diminisher
//! rounds. Each round carves one bundle off the remaining items and gives it to
//! the last agent who trimmed it; the remaining agents inherit a *credit*, the
//! smallest item (by their own valuation) of the bundle that just left. With
//! `k` agents, items `R` and credits `c`, a round maintains
//!
//! ```text
//! u_j + max(c_j, D_j) ≥ (v_j(R) + c_j) / k
//! ```
//!
//! for every agent `j` still present, where `D_j` is the maximin term over the
//! bundles handed out from this point on. A trimmer `j` keeps removing its
//! least valuable item while `v_j(B) > T_j + max(0, min_B v_j − c_j)` with
//! `T_j = (v_j(R) + c_j)/k`; this leaves `v_j(B) ≥ T_j − c_j`, enough for `j`
//! to accept `B`, and guarantees every other agent that the residual instance
//! still reaches its target. At the top level all credits are 0 and the
//! invariant is exactly PROPm.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Allocation, Instance, EPS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropmError {
    #[error("PROPm certificates need an integral allocation")]
    Fractional,
    #[error("PROPm certificates need a complete allocation (item {0} unallocated)")]
    Incomplete(usize),
    #[error("allocation shape {alloc:?} does not match instance {inst:?}")]
    Shape {
        alloc: (usize, usize),
        inst: (usize, usize),
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentCertificate {
    pub utility: f64,
    pub proportional_share: f64,
    pub maximin_item: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropmCertificate {
    pub agents: Vec<AgentCertificate>,
}

impl PropmCertificate {
    pub fn is_valid(&self) -> bool {
        self.agents.iter().all(|a| a.slack >= -EPS)
    }

    /// Agents whose slack is negative beyond tolerance.
    pub fn violations(&self) -> Vec<usize> {
        self.agents
            .iter()
            .enumerate()
            .filter(|(_, a)| a.slack < -EPS)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Complete integral PROPm allocation.
///
/// Trimmers are visited in increasing index order and remove their least
/// valuable item first (ties: highest item index). When nobody trims, the
/// lowest-indexed remaining agent takes the whole remainder.
pub fn allocate_propm(inst: &Instance) -> Allocation {
    let n = inst.n_agents();
    let mut remaining_agents: Vec<usize> = (0..n).collect();
    let mut remaining_items: Vec<usize> = (0..inst.n_items()).collect();
    let mut credit = vec![0.0f64; n];
    let mut owners = vec![None; inst.n_items()];

    while let Some(&first) = remaining_agents.first() {
        let k = remaining_agents.len() as f64;
        let target: Vec<f64> = (0..n)
            .map(|j| (inst.bundle_value(j, &remaining_items) + credit[j]) / k)
            .collect();

        let mut bundle = remaining_items.clone();
        let mut taker = first;
        if remaining_agents.len() > 1 {
            for &j in &remaining_agents {
                let upper = |b: &[usize]| target[j] + (min_value(inst, j, b) - credit[j]).max(0.0);
                if inst.bundle_value(j, &bundle) <= upper(&bundle) {
                    continue;
                }
                // Least valuable first; among equals drop the later item.
                bundle.sort_by(|&a, &b| {
                    inst.value(j, b)
                        .total_cmp(&inst.value(j, a))
                        .then(a.cmp(&b))
                });
                while inst.bundle_value(j, &bundle) > upper(&bundle) {
                    bundle.pop();
                }
                taker = j;
            }
        }

        for &g in &bundle {
            owners[g] = Some(taker);
        }
        remaining_items.retain(|g| !bundle.contains(g));
        remaining_agents.retain(|&a| a != taker);
        for &j in &remaining_agents {
            credit[j] = credit[j].max(min_value(inst, j, &bundle));
        }
    }
    Allocation::from_owners(n, &owners)
}

/// Smallest value `agent` assigns to an item of `bundle`; 0 for an empty bundle.
fn min_value(inst: &Instance, agent: usize, bundle: &[usize]) -> f64 {
    if bundle.is_empty() {
        return 0.0;
    }
    bundle
        .iter()
        .map(|&g| inst.value(agent, g))
        .fold(f64::INFINITY, f64::min)
}

/// Evaluate the PROPm definition term by term.
pub fn check_propm(inst: &Instance, alloc: &Allocation) -> Result<PropmCertificate, PropmError> {
    let (n, m) = (inst.n_agents(), inst.n_items());
    if alloc.n_agents() != n || (m > 0 && alloc.n_items() != m) {
        return Err(PropmError::Shape {
            alloc: (alloc.n_agents(), alloc.n_items()),
            inst: (n, m),
        });
    }
    if !alloc.is_integral() {
        return Err(PropmError::Fractional);
    }
    if let Some(&j) = alloc.unallocated().first() {
        return Err(PropmError::Incomplete(j));
    }
    let bundles = alloc.bundles();
    let agents = (0..n)
        .map(|i| {
            let utility = inst.bundle_value(i, &bundles[i]);
            let proportional_share = inst.total_value(i) / n as f64;
            let maximin_item = (0..n)
                .filter(|&j| j != i)
                .map(|j| min_value(inst, i, &bundles[j]))
                .fold(0.0, f64::max);
            AgentCertificate {
                utility,
                proportional_share,
                maximin_item,
                slack: utility + maximin_item - proportional_share,
            }
        })
        .collect();
    Ok(PropmCertificate { agents })
}
