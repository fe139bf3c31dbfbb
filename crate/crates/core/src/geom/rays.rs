//! Discrete-ray propagation: the line-of-sight path plus first-order specular
//! reflections off the vertical walls of buildings, each kept only if none of
//! its legs is blocked.

use serde::{Deserialize, Serialize};

use super::blockage::segment_blocked;
use super::point::{wrap_angle, Point3};
use super::radio::{db_to_linear, friis_gain, RadioParams};
use super::scene::{Building, Scene};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    /// Link the ray belongs to (1..=N for access points).
    pub link: usize,
    /// Transmitter, optional reflection point, receiver.
    pub path: Vec<Point3>,
    /// Linear power gain, equal to `amplitude^2`.
    pub gain: f64,
    pub amplitude: f64,
    /// Carrier phase of the complex gain, radians.
    pub phase: f64,
    pub departure_azimuth: f64,
    pub departure_elevation: f64,
    pub arrival_azimuth: f64,
    pub arrival_elevation: f64,
}

impl Ray {
    fn new(link: usize, path: Vec<Point3>, length: f64, reflections: usize, radio: &RadioParams) -> Self {
        let lambda = radio.mm_wavelength();
        let gain = friis_gain(lambda, length) * db_to_linear(-radio.reflection_loss_db * reflections as f64);
        let amplitude = gain.sqrt();
        let mut phase = -2.0 * std::f64::consts::PI * (length / lambda).fract();
        if reflections % 2 == 1 {
            phase += std::f64::consts::PI;
        }
        let out = path[1] - path[0];
        let back = path[path.len() - 2] - path[path.len() - 1];
        Self {
            link,
            gain,
            amplitude,
            phase: wrap_angle(phase),
            departure_azimuth: out.azimuth(),
            departure_elevation: out.elevation(),
            arrival_azimuth: back.azimuth(),
            arrival_elevation: back.elevation(),
            path,
        }
    }

    pub fn length(&self) -> f64 {
        self.path.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn reflections(&self) -> usize {
        self.path.len() - 2
    }
}

/// Vertical wall of a building: the plane `axis = coord`, outward normal sign,
/// and the horizontal extent along the other axis.
struct Wall {
    axis: usize,
    coord: f64,
    outward: f64,
    span: [f64; 2],
    height: f64,
}

fn walls(b: &Building) -> [Wall; 4] {
    [
        Wall { axis: 0, coord: b.min[0], outward: -1.0, span: [b.min[1], b.max[1]], height: b.height },
        Wall { axis: 0, coord: b.max[0], outward: 1.0, span: [b.min[1], b.max[1]], height: b.height },
        Wall { axis: 1, coord: b.min[1], outward: -1.0, span: [b.min[0], b.max[0]], height: b.height },
        Wall { axis: 1, coord: b.max[1], outward: 1.0, span: [b.min[0], b.max[0]], height: b.height },
    ]
}

fn coord(p: Point3, axis: usize) -> f64 {
    if axis == 0 {
        p.x
    } else {
        p.y
    }
}

/// Specular point on `wall` for a path tx -> wall -> rx, via the mirror image
/// of the transmitter. Returns the point and the unfolded path length.
fn reflection_point(wall: &Wall, tx: Point3, rx: Point3) -> Option<(Point3, f64)> {
    let side_tx = (coord(tx, wall.axis) - wall.coord) * wall.outward;
    let side_rx = (coord(rx, wall.axis) - wall.coord) * wall.outward;
    if side_tx <= 0.0 || side_rx <= 0.0 {
        return None;
    }
    let mut image = tx;
    if wall.axis == 0 {
        image.x = 2.0 * wall.coord - tx.x;
    } else {
        image.y = 2.0 * wall.coord - tx.y;
    }
    let t = (wall.coord - coord(image, wall.axis)) / (coord(rx, wall.axis) - coord(image, wall.axis));
    let mut p = image.lerp(rx, t);
    // snap onto the plane so the legs start exactly on the face
    if wall.axis == 0 {
        p.x = wall.coord;
    } else {
        p.y = wall.coord;
    }
    let along = coord(p, 1 - wall.axis);
    if along < wall.span[0] || along > wall.span[1] || p.z < 0.0 || p.z > wall.height {
        return None;
    }
    Some((p, image.distance(rx)))
}

/// Unblocked rays from access point `ap_index` (1-based) to `user_pos`.
/// An empty list means the link is fully blocked.
pub fn trace_rays(ap_index: usize, user_pos: Point3, scene: &Scene, radio: &RadioParams) -> Vec<Ray> {
    assert!(
        (1..=scene.mmap_count()).contains(&ap_index),
        "access point index {ap_index} out of range 1..={}",
        scene.mmap_count()
    );
    let tx = scene.access_points()[ap_index - 1].position;
    let mut rays = Vec::new();
    if tx != user_pos && !segment_blocked(tx, user_pos, scene) {
        rays.push(Ray::new(ap_index, vec![tx, user_pos], tx.distance(user_pos), 0, radio));
    }
    for building in scene.buildings() {
        for wall in walls(building) {
            let Some((p, length)) = reflection_point(&wall, tx, user_pos) else {
                continue;
            };
            if segment_blocked(tx, p, scene) || segment_blocked(p, user_pos, scene) {
                continue;
            }
            rays.push(Ray::new(ap_index, vec![tx, p, user_pos], length, 1, radio));
        }
    }
    rays
}
