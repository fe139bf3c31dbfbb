use super::combination::{enumerate_combinations, lean_order, LinkCombination};
use super::{check_dims, ChannelRealization, CostVector, Label, QosRequirement, ScheduleResult};

/// Transmits one packet on every link of `combination` in each slot, from
/// slot 1 until D packets got through or the deadline passes. Failed
/// packets are retransmitted in the next slot. Every transmission costs,
/// including the surplus ones in the final slot.
pub fn consecutive_cost(
    combination: LinkCombination,
    g: &ChannelRealization,
    qos: &QosRequirement,
    costs: &CostVector,
) -> ScheduleResult {
    check_dims(g, costs);
    assert!(
        combination.links().all(|i| i < g.links()),
        "combination {combination} uses links beyond {}",
        g.links()
    );
    let d = qos.packets;
    if combination.is_empty() {
        return ScheduleResult::empty(d == 0, Some(combination));
    }
    let slots = g.slots().min(qos.deadline as usize);
    let mut r = ScheduleResult::empty(false, Some(combination));
    let mut delivered = 0u32;
    for k in 0..slots {
        if delivered >= d {
            break;
        }
        for i in combination.links() {
            r.transmissions += 1;
            r.cost += costs.get(i);
            if i == 0 {
                r.low_band_transmissions += 1;
            }
            if g.get(i, k) {
                delivered += 1;
            } else {
                r.failures += 1;
            }
        }
        r.slot_sets.push(combination);
        r.stop_slot = k + 1;
    }
    r.feasible = delivered >= d;
    r.successes = delivered.min(d);
    r
}

/// Runs a policy's chosen combination over the realized channel. Same
/// mechanics as [`consecutive_cost`].
pub fn execute_policy(
    combination: LinkCombination,
    g: &ChannelRealization,
    qos: &QosRequirement,
    costs: &CostVector,
) -> ScheduleResult {
    consecutive_cost(combination, g, qos, costs)
}

/// Cheapest combination under consecutive transmission; the empty class
/// when no combination completes the task. Ties go to fewer links, then the
/// lower index.
pub fn label_sample(g: &ChannelRealization, qos: &QosRequirement, costs: &CostVector) -> Label {
    if qos.packets == 0 {
        return Label(0);
    }
    let space = enumerate_combinations(g.links()).expect("link count checked");
    let mut best: Option<(u64, LinkCombination)> = None;
    for comb in space.iter() {
        let r = consecutive_cost(comb, g, qos, costs);
        if !r.feasible {
            continue;
        }
        let better = match best {
            None => true,
            Some((bc, bcomb)) => r.cost < bc || (r.cost == bc && lean_order(comb, bcomb).is_lt()),
        };
        if better {
            best = Some((r.cost, comb));
        }
    }
    Label(best.map_or(0, |(_, c)| c.index()))
}
