use super::combination::LinkCombination;
use super::consecutive::consecutive_cost;
use super::{ChannelRealization, CostVector, QosRequirement, ScheduleResult};
use crate::geom::MeasurementVector;

/// Greedy Multi-x: every link in every slot until the task completes.
pub fn greedy_multi_x(g: &ChannelRealization, qos: &QosRequirement, costs: &CostVector) -> ScheduleResult {
    consecutive_cost(LinkCombination::all(g.links()), g, qos, costs)
}

/// Min Multi-x: the ceil(D/K) links with the highest alignment SNR (best
/// beam for access points, raw SNR for the LB-BS), ties to the lower link
/// index. Saturates at all links.
pub fn min_multi_x(measurement: &MeasurementVector, qos: &QosRequirement) -> LinkCombination {
    let scores = measurement.link_scores();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let take = qos.min_links().min(scores.len());
    LinkCombination::from_links(order.into_iter().take(take))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measurement(best: [f64; 3], lb: f64) -> MeasurementVector {
        // one beam per access point keeps the layout trivial
        MeasurementVector {
            mmaps: 3,
            beams: 1,
            mm_snr_db: best.to_vec(),
            lb_snr_db: lb,
            position: [0.0, 0.0],
            slot: 0,
            best_beams: vec![0; 3],
        }
    }

    #[test]
    fn greedy_all_ones() {
        let g = ChannelRealization::all(4, 50, true);
        let r = greedy_multi_x(&g, &QosRequirement::new(4, 50).unwrap(), &CostVector::standard(3, 100).unwrap());
        assert_eq!((r.stop_slot, r.cost, r.failures), (1, 103, 0));
    }

    #[test]
    fn greedy_all_zeros_runs_to_deadline() {
        let g = ChannelRealization::all(4, 50, false);
        let r = greedy_multi_x(&g, &QosRequirement::new(1, 50).unwrap(), &CostVector::standard(3, 100).unwrap());
        assert!(!r.feasible);
        assert_eq!(r.cost, 50 * 103);
        assert_eq!(r.failures, 200);
        assert_eq!(r.transmissions, 200);
    }

    #[test]
    fn greedy_zero_demand() {
        let g = ChannelRealization::all(4, 50, false);
        let r = greedy_multi_x(&g, &QosRequirement::new(0, 50).unwrap(), &CostVector::standard(3, 100).unwrap());
        assert!(r.feasible);
        assert_eq!(r.cost, 0);
    }

    #[test]
    fn picks_two_strongest() {
        let m = measurement([25.0, 5.0, 15.0], 12.0);
        let c = min_multi_x(&m, &QosRequirement::new(100, 50).unwrap());
        assert_eq!(c, LinkCombination::from_links([1, 3]));
        let c = min_multi_x(&m, &QosRequirement::new(1, 50).unwrap());
        assert_eq!(c, LinkCombination::from_links([1]));
    }

    #[test]
    fn ties_and_saturation() {
        let m = measurement([10.0, 10.0, 10.0], 10.0);
        assert_eq!(min_multi_x(&m, &QosRequirement::new(2, 1).unwrap()), LinkCombination::from_links([0, 1]));
        assert_eq!(min_multi_x(&m, &QosRequirement::new(500, 50).unwrap()), LinkCombination::all(4));
    }
}
