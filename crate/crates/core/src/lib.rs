//! Link scheduling for low-band assisted mm-wave multi-connectivity.
//!
//! * [`geom`] simulates blockage and per-beam SNR in a synthetic urban scene.
//! * [`sched`] holds the combination space, the exact genie scheduler, the
//!   consecutive-transmission label generator and the baseline policies.
//! * [`forest`] is a random-forest classifier over link combinations.
//! * [`pipeline`] generates datasets, evaluates policies and runs sweeps.

pub mod error;
pub mod geom;
pub mod pipeline;
pub mod forest;
pub mod sched;

pub use error::{Error, Result};
