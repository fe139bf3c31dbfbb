use super::combination::{enumerate_combinations, lean_order, LinkCombination};
use super::{check_dims, ChannelRealization, CostVector, QosRequirement, ScheduleResult};

/// Exact optimum of the genie-aided integer program.
///
/// Once a combination is fixed the objective separates over (link, slot)
/// pairs and any pair with `g = 0` can be dropped without hurting the
/// delivery constraint, so the optimum for that combination is the D
/// cheapest successful pairs. Minimizing over all combinations gives the
/// global optimum. Cost ties go to fewer links, then the lower index.
pub fn genie_solve(g: &ChannelRealization, qos: &QosRequirement, costs: &CostVector) -> ScheduleResult {
    check_dims(g, costs);
    let d = qos.packets as usize;
    if d == 0 {
        return ScheduleResult::empty(true, Some(LinkCombination::EMPTY));
    }
    let slots = g.slots().min(qos.deadline as usize);
    let space = enumerate_combinations(g.links()).expect("link count checked");

    let mut best: Option<(u64, LinkCombination, Vec<(u64, usize, usize)>)> = None;
    let mut pairs = Vec::new();
    for comb in space.iter() {
        pairs.clear();
        for i in comb.links() {
            for k in 0..slots {
                if g.get(i, k) {
                    pairs.push((costs.get(i), k, i));
                }
            }
        }
        if pairs.len() < d {
            continue;
        }
        pairs.sort_unstable();
        let cost: u64 = pairs[..d].iter().map(|p| p.0).sum();
        let better = match &best {
            None => true,
            Some((bc, bcomb, _)) => cost < *bc || (cost == *bc && lean_order(comb, *bcomb).is_lt()),
        };
        if better {
            best = Some((cost, comb, pairs[..d].to_vec()));
        }
    }

    let Some((cost, comb, chosen)) = best else {
        return ScheduleResult::empty(false, None);
    };
    let stop = chosen.iter().map(|p| p.1 + 1).max().unwrap_or(0);
    let mut slot_sets = vec![LinkCombination::EMPTY; stop];
    let mut lb = 0;
    for &(_, k, i) in &chosen {
        slot_sets[k] = LinkCombination::from_index(slot_sets[k].index() | (1 << i));
        if i == 0 {
            lb += 1;
        }
    }
    ScheduleResult {
        feasible: true,
        combination: Some(comb),
        slot_sets,
        cost,
        transmissions: d as u32,
        successes: d as u32,
        failures: 0,
        low_band_transmissions: lb,
        stop_slot: stop,
    }
}
