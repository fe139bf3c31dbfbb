//! Synthetic propagation environment: scene geometry, blockage, discrete-ray
//! channel, beam codebook, alignment measurements and genie channel matrices.

pub mod blockage;
pub mod codebook;
pub mod measure;
pub mod point;
pub mod radio;
pub mod rays;
pub mod scene;

pub use blockage::segment_blocked;
pub use codebook::BeamCodebook;
pub use measure::{align_and_measure, lb_snr, realize_channel, realize_channel_with_beams, snr_per_beam, ChannelRealization, MeasurementVector};
pub use point::Point3;
pub use radio::RadioParams;
pub use rays::{trace_rays, Ray};
pub use scene::{
    build_scene, AccessPointSite, Area, Building, ClassSpec, MobileUser, MovingObstacle, ObstacleClass, Scene,
    SceneConfig, UserClass, UserConfig,
};
