//! Link scheduling: the combination space, the exact genie-aided optimum,
//! consecutive-transmission execution (label generation and policy
//! evaluation) and the two heuristic baselines.

mod baselines;
mod combination;
mod consecutive;
mod genie;

use serde::{Deserialize, Serialize};

pub use crate::geom::ChannelRealization;
pub use baselines::{greedy_multi_x, min_multi_x};
pub use combination::{enumerate_combinations, lean_order, CombinationSet, LinkCombination, MAX_LINKS};
pub use consecutive::{consecutive_cost, execute_policy, label_sample};
pub use genie::genie_solve;

use crate::error::{Error, Result};

/// Deliver `packets` (D) within `deadline` (K) slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QosRequirement {
    pub packets: u32,
    pub deadline: u32,
}

impl QosRequirement {
    pub fn new(packets: u32, deadline: u32) -> Result<Self> {
        if deadline == 0 {
            return Err(Error::InvalidConfig("deadline K must be at least one slot".into()));
        }
        Ok(Self { packets, deadline })
    }

    /// Minimum number of links able to carry D packets in K slots, ceil(D/K).
    pub fn min_links(&self) -> usize {
        self.packets.div_ceil(self.deadline) as usize
    }
}

/// Per-packet transmission cost of every link, LB-BS first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CostVector(Vec<u64>);

impl CostVector {
    /// Requires every cost >= 1 and the LB-BS cost strictly above every
    /// mm-wave cost.
    pub fn new(costs: Vec<u64>) -> Result<Self> {
        if costs.is_empty() || costs.len() > MAX_LINKS {
            return Err(Error::LinkCapExceeded(costs.len()));
        }
        if costs.iter().any(|&c| c == 0) {
            return Err(Error::InvalidConfig("link costs must be at least 1".into()));
        }
        if costs[1..].iter().any(|&c| c >= costs[0]) {
            return Err(Error::InvalidConfig("low-band cost must exceed every mm-wave cost".into()));
        }
        Ok(Self(costs))
    }

    /// `c_0 = lb_cost`, `c_i = 1` for the `mmaps` access points.
    pub fn standard(mmaps: usize, lb_cost: u64) -> Result<Self> {
        let mut v = vec![1; mmaps + 1];
        v[0] = lb_cost;
        Self::new(v)
    }

    pub fn get(&self, link: usize) -> u64 {
        self.0[link]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// Every cost multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        Self::new(self.0.iter().map(|c| c * factor).collect())
    }
}

impl TryFrom<Vec<u64>> for CostVector {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CostVector> for Vec<u64> {
    fn from(c: CostVector) -> Vec<u64> {
        c.0
    }
}

/// Outcome of running (or optimally planning) one scheduling window.
///
/// `successes` is clamped at D. Transmissions that succeed after the D-th
/// delivery in the final slot are neither successes nor failures, so
/// `transmissions = successes + failures + surplus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub feasible: bool,
    pub combination: Option<LinkCombination>,
    /// Links used in each slot 1..=stop_slot.
    pub slot_sets: Vec<LinkCombination>,
    pub cost: u64,
    pub transmissions: u32,
    pub successes: u32,
    pub failures: u32,
    pub low_band_transmissions: u32,
    /// Last slot with a transmission (1-based); 0 when nothing was sent.
    pub stop_slot: usize,
}

impl ScheduleResult {
    pub(crate) fn empty(feasible: bool, combination: Option<LinkCombination>) -> Self {
        Self {
            feasible,
            combination,
            slot_sets: Vec::new(),
            cost: 0,
            transmissions: 0,
            successes: 0,
            failures: 0,
            low_band_transmissions: 0,
            stop_slot: 0,
        }
    }
}

/// Training target: the canonical index of the chosen combination. Class 0
/// (the empty set) means "do not transmit".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub usize);

impl Label {
    pub fn combination(self) -> LinkCombination {
        LinkCombination::from_index(self.0)
    }
}

fn check_dims(g: &ChannelRealization, costs: &CostVector) {
    assert!(g.links() <= MAX_LINKS, "at most {MAX_LINKS} links supported");
    assert_eq!(costs.len(), g.links(), "cost vector length must equal link count");
}
