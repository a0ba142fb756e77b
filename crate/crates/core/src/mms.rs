//! Maximin shares: an exact oracle, the three-quarters approximation, and the
//! leftover completion pass applied after it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{utilities, Allocation, Instance, ModelError, EPS};

/// Largest instance the exact oracle accepts.
pub const ORACLE_MAX_AGENTS: usize = 5;
pub const ORACLE_MAX_ITEMS: usize = 14;

/// The approximation factor guaranteed by [`allocate_mms34`].
pub const MMS_FACTOR: f64 = 0.75;

/// Acceptance slack on normalized values, where every agent's total equals the
/// number of remaining agents.
const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MmsError {
    #[error("case {case_id}: exact MMS needs n <= {ORACLE_MAX_AGENTS} and m <= {ORACLE_MAX_ITEMS}, got n = {n}, m = {m}")]
    TooLarge { case_id: String, n: usize, m: usize },
    #[error("case {case_id}: agent index {agent} out of range (n = {n})")]
    InvalidAgent {
        case_id: String,
        agent: usize,
        n: usize,
    },
    #[error("completion needs an integral partial allocation")]
    NotIntegral,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// An agent's maximin share together with a partition attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsValue {
    pub value: f64,
    pub partition: Vec<Vec<usize>>,
}

/// Exact per-agent MMS values for a whole instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsProfile {
    pub agents: Vec<MmsValue>,
}

impl MmsProfile {
    pub fn compute(inst: &Instance) -> Result<Self, MmsError> {
        let agents = (0..inst.n_agents())
            .map(|i| mms_exact(inst, i))
            .collect::<Result<_, _>>()?;
        Ok(MmsProfile { agents })
    }

    pub fn values(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.value).collect()
    }
}

pub fn check_oracle_size(inst: &Instance) -> Result<(), MmsError> {
    let (n, m) = (inst.n_agents(), inst.n_items());
    if n > ORACLE_MAX_AGENTS || m > ORACLE_MAX_ITEMS {
        return Err(MmsError::TooLarge {
            case_id: inst.case_id.clone(),
            n,
            m,
        });
    }
    Ok(())
}

/// Maximum over all partitions of the items into `n` bundles of the smallest
/// bundle value under `agent`'s valuation.
///
/// Branch and bound: items are placed in decreasing value order, a node is
/// cut when the water-filling bound on its best reachable minimum does not
/// beat the incumbent, and bundles with equal running sums are interchangeable
/// so only the first of them is tried.
pub fn mms_exact(inst: &Instance, agent: usize) -> Result<MmsValue, MmsError> {
    check_oracle_size(inst)?;
    let n = inst.n_agents();
    if agent >= n {
        return Err(MmsError::InvalidAgent {
            case_id: inst.case_id.clone(),
            agent,
            n,
        });
    }
    Ok(max_min_partition(&inst.valuations[agent], n))
}

/// Exact max-min partition of `values` into `bundles` parts (no size guard).
pub(crate) fn max_min_partition(values: &[f64], bundles: usize) -> MmsValue {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut search = Search {
        values,
        order: &order,
        suffix: suffix_sums(values, &order),
        sums: vec![0.0; bundles],
        assign: vec![0; values.len()],
        best: f64::NEG_INFINITY,
        best_assign: vec![0; values.len()],
    };
    // Greedy seed: next item onto the currently poorest bundle.
    for (pos, &g) in order.iter().enumerate() {
        let k = argmin(&search.sums);
        search.sums[k] += values[g];
        search.assign[pos] = k;
    }
    search.best = search.sums.iter().copied().fold(f64::INFINITY, f64::min);
    search.best_assign.clone_from(&search.assign);
    search.sums.iter_mut().for_each(|s| *s = 0.0);
    search.descend(0);

    let mut partition = vec![Vec::new(); bundles];
    for (pos, &g) in order.iter().enumerate() {
        partition[search.best_assign[pos]].push(g);
    }
    for b in partition.iter_mut() {
        b.sort_unstable();
    }
    MmsValue {
        value: search.best,
        partition,
    }
}

struct Search<'a> {
    values: &'a [f64],
    order: &'a [usize],
    suffix: Vec<f64>,
    sums: Vec<f64>,
    assign: Vec<usize>,
    best: f64,
    best_assign: Vec<usize>,
}

impl Search<'_> {
    fn descend(&mut self, pos: usize) {
        if pos == self.order.len() {
            let min = self.sums.iter().copied().fold(f64::INFINITY, f64::min);
            if min > self.best {
                self.best = min;
                self.best_assign.clone_from(&self.assign);
            }
            return;
        }
        if water_level(&self.sums, self.suffix[pos]) <= self.best {
            return;
        }
        let v = self.values[self.order[pos]];
        for k in 0..self.sums.len() {
            if self.sums[..k].contains(&self.sums[k]) {
                continue;
            }
            self.sums[k] += v;
            self.assign[pos] = k;
            self.descend(pos + 1);
            self.sums[k] -= v;
        }
    }
}

fn suffix_sums(values: &[f64], order: &[usize]) -> Vec<f64> {
    let mut suffix = vec![0.0; order.len() + 1];
    for pos in (0..order.len()).rev() {
        suffix[pos] = suffix[pos + 1] + values[order[pos]];
    }
    suffix
}

/// Highest common level the smallest bundles could be raised to if the
/// remaining value were divisible.
fn water_level(sums: &[f64], remaining: f64) -> f64 {
    let mut s = sums.to_vec();
    s.sort_by(f64::total_cmp);
    let mut acc = remaining;
    for k in 0..s.len() {
        acc += s[k];
        let level = acc / (k + 1) as f64;
        if k + 1 == s.len() || level <= s[k + 1] {
            return level;
        }
    }
    remaining
}

fn argmin(xs: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in xs.iter().enumerate() {
        if x < xs[best] {
            best = k;
        }
    }
    best
}

/// Which fixed bundle a valid reduction handed out, in ranks of the ordered
/// instance with `k` remaining agents (1-based): `{1}`, `{k, k+1}`,
/// `{2k-1, 2k, 2k+1}`, `{1, 2k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionRule {
    Single,
    Pair,
    Triple,
    TopAndTail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Agent's maximin share is zero; its guarantee is vacuous.
    ZeroAgent {
        agent: usize,
    },
    /// Agent's share estimate was capped at its exact maximin share after an
    /// earlier pass left it empty-handed.
    Tighten {
        agent: usize,
        mms: f64,
    },
    /// Agent's remaining values were multiplied by `scale` so that its share
    /// estimate equals 1.
    Normalize {
        round: usize,
        agent: usize,
        scale: f64,
    },
    Reduction {
        rule: ReductionRule,
        agent: usize,
        positions: Vec<usize>,
    },
    BagFill {
        agent: usize,
        positions: Vec<usize>,
    },
    /// A bag nobody accepted once the low-value pool ran dry.
    Unclaimed {
        positions: Vec<usize>,
    },
    /// Ordered-instance position mapped back to a concrete item: the agent
    /// holding `position` takes its favourite remaining item.
    Pick {
        position: usize,
        agent: usize,
        item: usize,
    },
}

/// Event log of one [`allocate_mms34`] run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub events: Vec<TraceEvent>,
    pub pre_completion_utilities: Vec<f64>,
    /// Filled in by [`allocate_mms34_completed`].
    pub post_completion_utilities: Option<Vec<f64>>,
}

impl ReductionTrace {
    /// Rebuild the pre-completion allocation from the recorded picks.
    pub fn replay(&self, inst: &Instance) -> Allocation {
        let mut owners = vec![None; inst.n_items()];
        for e in &self.events {
            if let TraceEvent::Pick { agent, item, .. } = *e {
                owners[item] = Some(agent);
            }
        }
        Allocation::from_owners(inst.n_agents(), &owners)
    }

    pub fn count_reductions(&self, rule: ReductionRule) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, TraceEvent::Reduction { rule: r, .. } if *r == rule))
            .count()
    }
}

/// Integral, possibly partial allocation where every agent gets at least three
/// quarters of its maximin share.
///
/// Works on the ordered instance (every agent's values sorted decreasingly).
/// Each round rescales every remaining agent so that its share estimate, the
/// proportional share `v_i(R)/k` of the remaining items among the `k`
/// remaining agents, equals 1. Fixed small bundles are handed out by valid
/// reductions while any agent values one at 3/4 or more; the remaining agents
/// are then served by bag filling from seeded bags `{j, 2k+1-j}` topped up
/// from the low-value pool. Positions are finally mapped back to items by
/// letting holders pick in rank order.
///
/// The proportional share only bounds the MMS from above. When it is loose
/// enough that an agent ends up with nothing, that agent's estimate is capped
/// at its exact maximin share and the whole procedure restarts; the trace then
/// starts with the corresponding [`TraceEvent::Tighten`] events.
pub fn allocate_mms34(inst: &Instance) -> (Allocation, ReductionTrace) {
    let (n, m) = (inst.n_agents(), inst.n_items());
    let ordered: Vec<Vec<f64>> = inst
        .valuations
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.sort_by(|a, b| b.total_cmp(a));
            r
        })
        .collect();

    let mut caps: Vec<Option<f64>> = vec![None; n];
    let mut tightened = Vec::new();
    let run = loop {
        let run = reduce_and_fill(&ordered, m, &caps);
        let fresh: Vec<usize> = run
            .unsatisfied
            .iter()
            .copied()
            .filter(|&i| caps[i].is_none())
            .collect();
        if fresh.is_empty() {
            break run;
        }
        for i in fresh {
            let mms = max_min_partition(&inst.valuations[i], n).value;
            caps[i] = Some(mms);
            tightened.push(TraceEvent::Tighten { agent: i, mms });
        }
    };

    let mut trace = ReductionTrace {
        events: tightened,
        ..ReductionTrace::default()
    };
    trace.events.extend(run.events);

    // Map ranks back to items.
    let mut taken = vec![false; m];
    let mut owners = vec![None; m];
    for (p, h) in run.holder.iter().enumerate() {
        let Some(agent) = *h else { continue };
        let best = (0..m).filter(|&g| !taken[g]).reduce(|b, g| {
            if inst.value(agent, g) > inst.value(agent, b) {
                g
            } else {
                b
            }
        });
        let item = best.expect("fewer picks than items");
        taken[item] = true;
        owners[item] = Some(agent);
        trace.events.push(TraceEvent::Pick {
            position: p,
            agent,
            item,
        });
    }

    let alloc = Allocation::from_owners(n, &owners);
    trace.pre_completion_utilities = utilities(inst, &alloc)
        .expect("allocation built for this instance")
        .0;
    (alloc, trace)
}

struct Pass {
    /// Holder of each rank of the ordered instance.
    holder: Vec<Option<usize>>,
    events: Vec<TraceEvent>,
    /// Agents with a positive guarantee left without a bundle.
    unsatisfied: Vec<usize>,
}

fn reduce_and_fill(ordered: &[Vec<f64>], m: usize, caps: &[Option<f64>]) -> Pass {
    let mut pass = Pass {
        holder: vec![None; m],
        events: Vec::new(),
        unsatisfied: Vec::new(),
    };
    let mut active: Vec<usize> = Vec::new();
    for (i, row) in ordered.iter().enumerate() {
        if row.iter().sum::<f64>() > 0.0 && caps[i] != Some(0.0) {
            active.push(i);
        } else {
            pass.events.push(TraceEvent::ZeroAgent { agent: i });
        }
    }

    let mut positions: Vec<usize> = (0..m).collect();
    let mut scaled = ordered.to_vec();
    let mut round = 0;
    loop {
        round += 1;
        let k = active.len();
        active.retain(|&i| {
            let total: f64 = positions.iter().map(|&p| ordered[i][p]).sum();
            if total <= 0.0 {
                pass.unsatisfied.push(i);
                return false;
            }
            let estimate = caps[i].map_or(total / k as f64, |c| c.min(total / k as f64));
            let scale = 1.0 / estimate;
            for &p in &positions {
                scaled[i][p] = ordered[i][p] * scale;
            }
            pass.events.push(TraceEvent::Normalize {
                round,
                agent: i,
                scale,
            });
            true
        });
        if active.is_empty() {
            break;
        }
        let k = active.len();

        let rank = |r: usize| positions.get(r - 1).copied();
        let candidates = [
            (ReductionRule::Single, vec![rank(1)]),
            (ReductionRule::Pair, vec![rank(k), rank(k + 1)]),
            (
                ReductionRule::Triple,
                vec![rank(2 * k - 1), rank(2 * k), rank(2 * k + 1)],
            ),
            (ReductionRule::TopAndTail, vec![rank(1), rank(2 * k + 1)]),
        ];
        let reduction = candidates.into_iter().find_map(|(rule, bundle)| {
            let bundle: Vec<usize> = bundle.into_iter().collect::<Option<_>>()?;
            active
                .iter()
                .copied()
                .find(|&i| accepts(&scaled[i], &bundle))
                .map(|agent| (rule, agent, bundle))
        });
        let Some((rule, agent, bundle)) = reduction else {
            break;
        };
        for &p in &bundle {
            pass.holder[p] = Some(agent);
        }
        positions.retain(|p| !bundle.contains(p));
        active.retain(|&a| a != agent);
        pass.events.push(TraceEvent::Reduction {
            rule,
            agent,
            positions: bundle,
        });
    }

    if !active.is_empty() {
        bag_fill(&mut active, &positions, &scaled, &mut pass);
        pass.unsatisfied.extend(active);
    }
    pass
}

fn accepts(values: &[f64], bundle: &[usize]) -> bool {
    let v: f64 = bundle.iter().map(|&p| values[p]).sum();
    v >= MMS_FACTOR - THRESHOLD_SLACK
}

fn bag_fill(active: &mut Vec<usize>, positions: &[usize], scaled: &[Vec<f64>], pass: &mut Pass) {
    let k = active.len();
    let seeded = positions.len().min(2 * k);
    let mut pool = positions[seeded..].iter().copied();
    for b in 0..k {
        let mut bag: Vec<usize> = [b, 2 * k - 1 - b]
            .into_iter()
            .filter(|&r| r < seeded)
            .map(|r| positions[r])
            .collect();
        loop {
            if let Some(agent) = active.iter().copied().find(|&i| accepts(&scaled[i], &bag)) {
                for &p in &bag {
                    pass.holder[p] = Some(agent);
                }
                active.retain(|&a| a != agent);
                pass.events.push(TraceEvent::BagFill {
                    agent,
                    positions: bag,
                });
                break;
            }
            match pool.next() {
                Some(p) => bag.push(p),
                None => {
                    if !bag.is_empty() {
                        pass.events.push(TraceEvent::Unclaimed { positions: bag });
                    }
                    break;
                }
            }
        }
        if active.is_empty() {
            break;
        }
    }
}

/// Hand out whatever `partial` left unallocated.
///
/// Agents take turns from the last index downwards, wrapping around; each
/// takes its most valuable remaining item (ties: lowest item index) provided
/// it values that item above zero. Once a full round passes without such a
/// pick, the remaining items, worthless to everyone, are dealt one per agent
/// in the same descending order starting again from the last agent.
pub fn complete_leftovers(inst: &Instance, partial: &Allocation) -> Result<Allocation, MmsError> {
    let n = inst.n_agents();
    if !partial.is_integral() {
        return Err(MmsError::NotIntegral);
    }
    for j in 0..partial.n_items() {
        let sum = partial.column_sum(j);
        if sum > 1.0 + EPS {
            return Err(ModelError::OverAllocated { item: j, sum }.into());
        }
    }
    utilities(inst, partial)?;

    let mut alloc = partial.clone();
    let mut left = alloc.unallocated();
    let mut turn = n - 1;
    let mut idle = 0;
    while !left.is_empty() && idle < n {
        let pick = left
            .iter()
            .enumerate()
            .filter(|(_, &g)| inst.value(turn, g) > 0.0)
            .fold(None::<(usize, usize)>, |best, (k, &g)| match best {
                Some((_, b)) if inst.value(turn, b) >= inst.value(turn, g) => best,
                _ => Some((k, g)),
            });
        match pick {
            Some((k, g)) => {
                alloc.assign(turn, g);
                left.remove(k);
                idle = 0;
            }
            None => idle += 1,
        }
        turn = if turn == 0 { n - 1 } else { turn - 1 };
    }
    let mut turn = n - 1;
    for g in left {
        alloc.assign(turn, g);
        turn = if turn == 0 { n - 1 } else { turn - 1 };
    }
    Ok(alloc)
}

/// Per-agent `utility / MMS`, `+∞` where the MMS is zero.
pub fn mms_ratio(inst: &Instance, alloc: &Allocation) -> Result<Vec<f64>, MmsError> {
    check_oracle_size(inst)?;
    let u = utilities(inst, alloc)?;
    (0..inst.n_agents())
        .map(|i| {
            let mms = mms_exact(inst, i)?.value;
            Ok(if mms <= 0.0 {
                f64::INFINITY
            } else {
                u.values()[i] / mms
            })
        })
        .collect()
}

/// [`allocate_mms34`] followed by [`complete_leftovers`]; the trace carries
/// utilities from both stages.
pub fn allocate_mms34_completed(inst: &Instance) -> (Allocation, ReductionTrace) {
    let (partial, mut trace) = allocate_mms34(inst);
    let complete = complete_leftovers(inst, &partial).expect("mms34 output is integral");
    trace.post_completion_utilities = Some(
        utilities(inst, &complete)
            .expect("allocation built for this instance")
            .0,
    );
    (complete, trace)
}
