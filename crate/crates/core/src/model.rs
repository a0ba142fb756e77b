//! Instances, allocations and utility arithmetic shared by every algorithm.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used for every floating-point comparison in the crate.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("case {case_id}: dimension mismatch: {detail}")]
    DimensionMismatch { case_id: String, detail: String },
    #[error("case {case_id}: negative valuation at ({agent},{item}): {value}")]
    NegativeValuation {
        case_id: String,
        agent: usize,
        item: usize,
        value: f64,
    },
    #[error("case {case_id}: non-finite valuation at ({agent},{item})")]
    NonFiniteValuation {
        case_id: String,
        agent: usize,
        item: usize,
    },
    #[error("case {case_id}: duplicate {kind} label {label:?} at index {index}")]
    DuplicateLabel {
        case_id: String,
        kind: &'static str,
        label: String,
        index: usize,
    },
    #[error("case {case_id}: an instance needs at least one agent")]
    NoAgents { case_id: String },
    #[error("allocation share at ({agent},{item}) is {value}, outside [0,1]")]
    ShareOutOfRange {
        agent: usize,
        item: usize,
        value: f64,
    },
    #[error("item {item} is over-allocated: column sum {sum}")]
    OverAllocated { item: usize, sum: f64 },
    #[error("allocation dimensions {alloc:?} do not match instance dimensions {inst:?}")]
    AllocationShape {
        alloc: (usize, usize),
        inst: (usize, usize),
    },
    #[error("utility vector is empty")]
    EmptyUtilityVector,
}

/// A fair division problem: `n` agents, `m` items, and an additive
/// non-negative valuation matrix with one row per agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(rename = "id")]
    pub case_id: String,
    pub agents: Vec<String>,
    pub items: Vec<String>,
    pub valuations: Vec<Vec<f64>>,
}

impl Instance {
    /// Build and validate an instance with generated labels `a0.., g0..`.
    pub fn from_matrix(
        case_id: impl Into<String>,
        valuations: Vec<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        let n = valuations.len();
        let m = valuations.first().map_or(0, Vec::len);
        validate_instance(Instance {
            case_id: case_id.into(),
            agents: (0..n).map(|i| format!("a{i}")).collect(),
            items: (0..m).map(|j| format!("g{j}")).collect(),
            valuations,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn value(&self, agent: usize, item: usize) -> f64 {
        self.valuations[agent][item]
    }

    /// Value of a set of items to `agent`.
    pub fn bundle_value(&self, agent: usize, bundle: &[usize]) -> f64 {
        bundle.iter().map(|&j| self.valuations[agent][j]).sum()
    }

    /// `v_i(M)`, the agent's value for every item.
    pub fn total_value(&self, agent: usize) -> f64 {
        self.valuations[agent].iter().sum()
    }

    /// Copy of the instance with each non-zero row rescaled to sum to `total`.
    pub fn normalized(&self, total: f64) -> Instance {
        let valuations = self
            .valuations
            .iter()
            .map(|row| {
                let s: f64 = row.iter().sum();
                if s > 0.0 {
                    row.iter().map(|v| v * total / s).collect()
                } else {
                    row.clone()
                }
            })
            .collect();
        Instance {
            valuations,
            ..self.clone()
        }
    }
}

/// Check every [`Instance`] invariant, returning the instance unchanged.
pub fn validate_instance(raw: Instance) -> Result<Instance, ModelError> {
    let case_id = &raw.case_id;
    let (n, m) = (raw.agents.len(), raw.items.len());
    if n == 0 {
        return Err(ModelError::NoAgents {
            case_id: case_id.clone(),
        });
    }
    if raw.valuations.len() != n {
        return Err(ModelError::DimensionMismatch {
            case_id: case_id.clone(),
            detail: format!("{} agents but {} valuation rows", n, raw.valuations.len()),
        });
    }
    for (i, row) in raw.valuations.iter().enumerate() {
        if row.len() != m {
            return Err(ModelError::DimensionMismatch {
                case_id: case_id.clone(),
                detail: format!("{} items but row {} has {} entries", m, i, row.len()),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFiniteValuation {
                    case_id: case_id.clone(),
                    agent: i,
                    item: j,
                });
            }
            if v < 0.0 {
                return Err(ModelError::NegativeValuation {
                    case_id: case_id.clone(),
                    agent: i,
                    item: j,
                    value: v,
                });
            }
        }
    }
    check_unique(case_id, "agent", &raw.agents)?;
    check_unique(case_id, "item", &raw.items)?;
    Ok(raw)
}

fn check_unique(case_id: &str, kind: &'static str, labels: &[String]) -> Result<(), ModelError> {
    let mut seen = HashSet::with_capacity(labels.len());
    for (index, label) in labels.iter().enumerate() {
        if !seen.insert(label.as_str()) {
            return Err(ModelError::DuplicateLabel {
                case_id: case_id.to_string(),
                kind,
                label: label.clone(),
                index,
            });
        }
    }
    Ok(())
}

/// Per-agent item shares. `shares[i][j]` is the fraction of item `j` held by
/// agent `i`; column sums never exceed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    shares: Vec<Vec<f64>>,
    integral: bool,
}

impl Allocation {
    /// An allocation where nothing is assigned yet.
    pub fn empty(n_agents: usize, n_items: usize) -> Self {
        Allocation {
            shares: vec![vec![0.0; n_items]; n_agents],
            integral: true,
        }
    }

    /// Integral allocation from an owner per item (`None` = unallocated).
    pub fn from_owners(n_agents: usize, owners: &[Option<usize>]) -> Self {
        let mut alloc = Allocation::empty(n_agents, owners.len());
        for (j, owner) in owners.iter().enumerate() {
            if let Some(i) = *owner {
                alloc.shares[i][j] = 1.0;
            }
        }
        alloc
    }

    /// Integral allocation from explicit bundles.
    pub fn from_bundles(n_items: usize, bundles: &[Vec<usize>]) -> Self {
        let mut alloc = Allocation::empty(bundles.len(), n_items);
        for (i, bundle) in bundles.iter().enumerate() {
            for &j in bundle {
                alloc.shares[i][j] = 1.0;
            }
        }
        alloc
    }

    /// Validate a share matrix. The allocation is flagged integral when every
    /// share is exactly 0 or 1.
    pub fn from_shares(shares: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let m = shares.first().map_or(0, Vec::len);
        for (i, row) in shares.iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::AllocationShape {
                    alloc: (shares.len(), row.len()),
                    inst: (shares.len(), m),
                });
            }
            for (j, &s) in row.iter().enumerate() {
                if !(-EPS..=1.0 + EPS).contains(&s) || s.is_nan() {
                    return Err(ModelError::ShareOutOfRange {
                        agent: i,
                        item: j,
                        value: s,
                    });
                }
            }
        }
        for j in 0..m {
            let sum: f64 = shares.iter().map(|r| r[j]).sum();
            if sum > 1.0 + EPS {
                return Err(ModelError::OverAllocated { item: j, sum });
            }
        }
        let integral = shares.iter().flatten().all(|&s| s == 0.0 || s == 1.0);
        Ok(Allocation { shares, integral })
    }

    pub fn n_agents(&self) -> usize {
        self.shares.len()
    }

    pub fn n_items(&self) -> usize {
        self.shares.first().map_or(0, Vec::len)
    }

    pub fn shares(&self) -> &[Vec<f64>] {
        &self.shares
    }

    #[inline]
    pub fn share(&self, agent: usize, item: usize) -> f64 {
        self.shares[agent][item]
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn column_sum(&self, item: usize) -> f64 {
        self.shares.iter().map(|r| r[item]).sum()
    }

    /// Every item fully handed out (within [`EPS`]).
    pub fn is_complete(&self) -> bool {
        (0..self.n_items()).all(|j| (self.column_sum(j) - 1.0).abs() <= EPS)
    }

    /// Items not held (even partially) by anyone.
    pub fn unallocated(&self) -> Vec<usize> {
        (0..self.n_items())
            .filter(|&j| self.column_sum(j) <= EPS)
            .collect()
    }

    /// Items agent `agent` holds wholly.
    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        self.shares[agent]
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn bundles(&self) -> Vec<Vec<usize>> {
        (0..self.n_agents()).map(|i| self.bundle(i)).collect()
    }

    /// The agent holding item `item` wholly, if any.
    pub fn owner(&self, item: usize) -> Option<usize> {
        (0..self.n_agents()).find(|&i| self.shares[i][item] == 1.0)
    }

    /// Hand an unallocated item wholly to `agent`.
    pub(crate) fn assign(&mut self, agent: usize, item: usize) {
        debug_assert!(self.column_sum(item) == 0.0);
        self.shares[agent][item] = 1.0;
    }

    fn check_shape(&self, inst: &Instance) -> Result<(), ModelError> {
        let shape = (self.n_agents(), self.n_items());
        let expected = (inst.n_agents(), inst.n_items());
        // An allocation of zero items has no row length to speak of.
        let matches = shape == expected || (expected.1 == 0 && shape.0 == expected.0);
        if matches {
            Ok(())
        } else {
            Err(ModelError::AllocationShape {
                alloc: shape,
                inst: expected,
            })
        }
    }
}

/// Utility of each agent under an allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityVector(pub Vec<f64>);

impl UtilityVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> Result<f64, ModelError> {
        sum_utility(self)
    }

    pub fn min(&self) -> Result<f64, ModelError> {
        min_utility(self)
    }

    /// Entries sorted ascending, the order leximin compares in.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `values[i] = Σ_j shares[i][j] · valuations[i][j]`.
pub fn utilities(inst: &Instance, alloc: &Allocation) -> Result<UtilityVector, ModelError> {
    alloc.check_shape(inst)?;
    let values = (0..inst.n_agents())
        .map(|i| {
            alloc.shares[i]
                .iter()
                .zip(&inst.valuations[i])
                .map(|(s, v)| s * v)
                .sum()
        })
        .collect();
    Ok(UtilityVector(values))
}

pub fn sum_utility(u: &UtilityVector) -> Result<f64, ModelError> {
    if u.is_empty() {
        return Err(ModelError::EmptyUtilityVector);
    }
    Ok(u.0.iter().sum())
}

pub fn min_utility(u: &UtilityVector) -> Result<f64, ModelError> {
    u.0.iter()
        .copied()
        .min_by(f64::total_cmp)
        .ok_or(ModelError::EmptyUtilityVector)
}
