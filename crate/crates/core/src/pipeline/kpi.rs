use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sched::{QosRequirement, ScheduleResult};

/// Aggregate outcome of one policy over a set of episodes. Fractions with a
/// zero denominator are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub episodes: usize,
    pub completed: usize,
    pub completed_fraction: f64,
    pub failed_fraction: Option<f64>,
    pub low_band_fraction: Option<f64>,
    pub mean_cost: f64,
    pub transmissions: u64,
    pub failures: u64,
    pub low_band_transmissions: u64,
    /// Episodes that no schedule could complete; counted as not completed.
    pub genie_infeasible: usize,
}

/// Completed means at least D packets got through within the deadline.
pub fn compute_kpis(results: &[ScheduleResult], qos: &QosRequirement) -> Result<KpiReport> {
    if results.is_empty() {
        return Err(Error::EmptyInput("schedule results"));
    }
    let n = results.len();
    let completed = results.iter().filter(|r| r.feasible && r.successes >= qos.packets).count();
    let tx: u64 = results.iter().map(|r| r.transmissions as u64).sum();
    let fail: u64 = results.iter().map(|r| r.failures as u64).sum();
    let lb: u64 = results.iter().map(|r| r.low_band_transmissions as u64).sum();
    let cost: u64 = results.iter().map(|r| r.cost).sum();
    let frac = |num: u64| (tx > 0).then(|| num as f64 / tx as f64);
    Ok(KpiReport {
        episodes: n,
        completed,
        completed_fraction: completed as f64 / n as f64,
        failed_fraction: frac(fail),
        low_band_fraction: frac(lb),
        mean_cost: cost as f64 / n as f64,
        transmissions: tx,
        failures: fail,
        low_band_transmissions: lb,
        genie_infeasible: 0,
    })
}
