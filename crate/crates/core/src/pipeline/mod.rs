//! Dataset generation, policy evaluation and parameter sweeps.

mod config;
mod evaluate;
mod io;
mod kpi;
mod realization;

pub use config::{ExperimentConfig, Scale, DataSplit, TEST_SEED_OFFSET};
pub use evaluate::{evaluate_policy, schedule_episodes, sweep_beta, sweep_training, Policy, TrainingCell};
pub use io::{read_dataset_csv, read_kpi_csv, write_dataset_csv, write_kpi_csv, KpiRow};
pub use kpi::{compute_kpis, KpiReport};
pub use realization::{episodes_of, generate_dataset, generate_range, simulate_realization, to_dataset, EpisodeRecord, Realization, Window};
