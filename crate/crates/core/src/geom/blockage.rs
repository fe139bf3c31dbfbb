//! Segment/obstacle intersection tests.
//!
//! Buildings are axis-aligned boxes. Moving blockers are oriented boxes
//! (footprint rectangle rotated to the heading, extruded from the ground to
//! the blocker height). Both use the slab method on the segment parameter.

use super::point::Point3;
use super::scene::{Building, MovingObstacle, Scene};

/// Parameter slack at the segment ends, so that rays starting or ending on
/// a reflecting face do not count as blocked by that face.
const END_EPS: f64 = 1e-9;

/// Clips `origin + t * dir`, t in [lo, hi], against the slab [min, max] on one axis.
#[inline]
fn clip_axis(origin: f64, dir: f64, min: f64, max: f64, lo: &mut f64, hi: &mut f64) -> bool {
    if dir == 0.0 {
        return origin >= min && origin <= max;
    }
    let inv = 1.0 / dir;
    let (mut t0, mut t1) = ((min - origin) * inv, (max - origin) * inv);
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    *lo = lo.max(t0);
    *hi = hi.min(t1);
    *lo < *hi
}

/// True if the open segment (a, b) passes through the interior span of the box.
pub fn segment_hits_box(a: Point3, b: Point3, lower: Point3, upper: Point3) -> bool {
    let d = b - a;
    let (mut lo, mut hi) = (END_EPS, 1.0 - END_EPS);
    clip_axis(a.x, d.x, lower.x, upper.x, &mut lo, &mut hi)
        && clip_axis(a.y, d.y, lower.y, upper.y, &mut lo, &mut hi)
        && clip_axis(a.z, d.z, lower.z, upper.z, &mut lo, &mut hi)
}

pub fn segment_hits_building(a: Point3, b: Point3, building: &Building) -> bool {
    segment_hits_box(a, b, building.lower(), building.upper())
}

/// Test against a moving blocker: the segment is rotated into the blocker's
/// frame (x along heading) and clipped against the local box.
pub fn segment_hits_mover(a: Point3, b: Point3, m: &MovingObstacle) -> bool {
    let [hx, hy] = m.heading;
    let local = |p: Point3| {
        let dx = p.x - m.position[0];
        let dy = p.y - m.position[1];
        Point3::new(dx * hx + dy * hy, -dx * hy + dy * hx, p.z)
    };
    let half_l = 0.5 * m.length;
    let half_w = 0.5 * m.width;
    segment_hits_box(
        local(a),
        local(b),
        Point3::new(-half_l, -half_w, 0.0),
        Point3::new(half_l, half_w, m.height),
    )
}

/// Broad-phase index over moving blockers: centers sorted by x, plus the
/// largest circumradius and height so a query can bound its candidate range
/// without missing any blocker.
#[derive(Clone, Debug, Default)]
pub struct BlockerIndex {
    by_x: Vec<(f64, usize)>,
    max_radius: f64,
    max_height: f64,
}

impl BlockerIndex {
    pub fn build(movers: &[MovingObstacle]) -> Self {
        let mut by_x: Vec<(f64, usize)> =
            movers.iter().enumerate().map(|(i, m)| (m.position[0], i)).collect();
        by_x.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let max_radius = movers.iter().map(|m| m.half_diagonal()).fold(0.0, f64::max);
        let max_height = movers.iter().map(|m| m.height).fold(0.0, f64::max);
        Self { by_x, max_radius, max_height }
    }

    /// Ground bounding box of the part of (a, b) that lies at or below the
    /// tallest blocker; `None` if the whole segment passes above.
    fn low_part_bounds(&self, a: Point3, b: Point3) -> Option<[f64; 4]> {
        let h = self.max_height + 1e-9;
        let (t0, t1) = if a.z <= h && b.z <= h {
            (0.0, 1.0)
        } else if a.z > h && b.z > h {
            return None;
        } else {
            let t = (h - a.z) / (b.z - a.z);
            if a.z <= h {
                (0.0, t)
            } else {
                (t, 1.0)
            }
        };
        let p = a.lerp(b, t0);
        let q = a.lerp(b, t1);
        let pad = 1e-6;
        Some([
            p.x.min(q.x) - pad,
            p.y.min(q.y) - pad,
            p.x.max(q.x) + pad,
            p.y.max(q.y) + pad,
        ])
    }

    pub fn any_hit(&self, a: Point3, b: Point3, movers: &[MovingObstacle]) -> bool {
        if self.by_x.is_empty() {
            return false;
        }
        let Some([x0, y0, x1, y1]) = self.low_part_bounds(a, b) else {
            return false;
        };
        let r = self.max_radius;
        let start = self.by_x.partition_point(|&(x, _)| x < x0 - r);
        for &(cx, idx) in &self.by_x[start..] {
            if cx > x1 + r {
                break;
            }
            let m = &movers[idx];
            let mr = m.half_diagonal();
            let (mx, my) = (m.position[0], m.position[1]);
            if mx + mr < x0 || mx - mr > x1 || my + mr < y0 || my - mr > y1 {
                continue;
            }
            if segment_hits_mover(a, b, m) {
                return true;
            }
        }
        false
    }
}

/// True iff the open segment (a, b) passes through any building or moving
/// blocker of the scene. Symmetric in its endpoints.
pub fn segment_blocked(a: Point3, b: Point3, scene: &Scene) -> bool {
    // canonical endpoint order makes the float path identical for (a,b) and (b,a)
    let (a, b) = if a.lex_cmp(&b).is_gt() { (b, a) } else { (a, b) };
    scene.buildings().iter().any(|bld| segment_hits_building(a, b, bld))
        || scene.blocker_index().any_hit(a, b, scene.movers())
}

/// Reference implementation without the broad phase; used to cross-check the index.
pub fn segment_blocked_brute_force(a: Point3, b: Point3, scene: &Scene) -> bool {
    let (a, b) = if a.lex_cmp(&b).is_gt() { (b, a) } else { (a, b) };
    scene.buildings().iter().any(|bld| segment_hits_building(a, b, bld))
        || scene.movers().iter().any(|m| segment_hits_mover(a, b, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::scene::ObstacleClass;

    fn pedestrian_at(x: f64, y: f64) -> MovingObstacle {
        MovingObstacle::of_class(ObstacleClass::Pedestrian, [x, y], 0.0)
    }

    #[test]
    fn box_on_midpoint_blocks() {
        let a = Point3::new(0.0, 0.0, 1.0);
        let b = Point3::new(10.0, 0.0, 1.0);
        let bld = Building { min: [4.0, -1.0], max: [6.0, 1.0], height: 5.0 };
        assert!(segment_hits_building(a, b, &bld));
        assert!(segment_hits_building(b, a, &bld));
    }

    #[test]
    fn segment_passes_over_short_pedestrian() {
        // 10 m mast at x=0, user 1.5 m at x=17; segment height 5 m at x=10
        let tx = Point3::new(0.0, 0.0, 10.0);
        let rx = Point3::new(17.0, 0.0, 1.5);
        let x_at_5m = 17.0 * (10.0 - 5.0) / 8.5;
        assert!((tx.lerp(rx, x_at_5m / 17.0).z - 5.0).abs() < 1e-12);
        let ped = pedestrian_at(x_at_5m, 0.0);
        assert!(!segment_hits_mover(tx, rx, &ped));
        // the same pedestrian next to the user does block
        let near = pedestrian_at(16.9, 0.0);
        assert!(segment_hits_mover(tx, rx, &near));
    }

    #[test]
    fn rotated_vehicle_footprint() {
        // bus heading along +y: 8 m long in y, 2.2 m wide in x
        let mut bus = MovingObstacle::of_class(ObstacleClass::LargeVehicle, [0.0, 0.0], 0.0);
        bus.heading = [0.0, 1.0];
        let seg_y = |x: f64| (Point3::new(x, -10.0, 1.0), Point3::new(x, 10.0, 1.0));
        let (a, b) = seg_y(1.0);
        assert!(segment_hits_mover(a, b, &bus));
        let (a, b) = seg_y(1.2);
        assert!(!segment_hits_mover(a, b, &bus));
        let seg_x = |y: f64| (Point3::new(-10.0, y, 1.0), Point3::new(10.0, y, 1.0));
        let (a, b) = seg_x(3.9);
        assert!(segment_hits_mover(a, b, &bus));
        let (a, b) = seg_x(4.1);
        assert!(!segment_hits_mover(a, b, &bus));
    }

    #[test]
    fn endpoints_on_face_are_not_blocked_by_that_face() {
        let bld = Building { min: [0.0, 0.0], max: [10.0, 10.0], height: 20.0 };
        let on_face = Point3::new(10.0, 5.0, 5.0);
        let outside = Point3::new(20.0, 8.0, 2.0);
        assert!(!segment_hits_building(on_face, outside, &bld));
        assert!(!segment_hits_building(outside, on_face, &bld));
    }

    #[test]
    fn index_matches_brute_force() {
        let movers: Vec<_> = (0..50)
            .map(|i| {
                let mut m = MovingObstacle::of_class(
                    ObstacleClass::ALL[i % 3],
                    [(i * 7 % 40) as f64, (i * 13 % 40) as f64],
                    i as f64 * 0.37,
                );
                m.height += (i % 5) as f64 * 0.1;
                m
            })
            .collect();
        let index = BlockerIndex::build(&movers);
        for i in 0..400 {
            let a = Point3::new((i % 41) as f64, (i * 3 % 43) as f64, 10.0 - (i % 9) as f64);
            let b = Point3::new((i * 5 % 37) as f64, (i * 11 % 39) as f64, 1.5);
            let brute = movers.iter().any(|m| segment_hits_mover(a, b, m));
            assert_eq!(index.any_hit(a, b, &movers), brute, "case {i}");
        }
    }
}
