//! Independent oracles and generators shared by the integration tests and
//! the acceptance suite. Nothing here calls the solvers under test.
#![allow(dead_code)]

use linksched::forest::TrainingSample;
use linksched::geom::{
    AccessPointSite, Area, BeamCodebook, Building, ChannelRealization, MobileUser, MovingObstacle, ObstacleClass,
    Point3, Scene, UserClass,
};
use linksched::sched::{CostVector, QosRequirement};
use rand::Rng;

/// Random scheduling instance with `1..=max_mm` access points plus the LB
/// link, `1..=max_k` slots, `0..=max_d` packets, mm-wave costs in 1..=5 and
/// an LB cost above all of them.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    max_mm: usize,
    max_k: usize,
    max_d: u32,
) -> (ChannelRealization, QosRequirement, CostVector) {
    let links = rng.random_range(1..=max_mm) + 1;
    let k = rng.random_range(1..=max_k);
    let density = rng.random_range(0.2..0.9);
    let rows: Vec<Vec<u8>> =
        (0..links).map(|_| (0..k).map(|_| rng.random_bool(density) as u8).collect()).collect();
    let g = ChannelRealization::from_rows(&rows).unwrap();
    let mut c: Vec<u64> = (0..links).map(|_| rng.random_range(1..=5)).collect();
    let top = *c[1..].iter().max().unwrap();
    c[0] = rng.random_range(top + 1..=20);
    let d = rng.random_range(0..=max_d);
    (g, QosRequirement::new(d, k as u32).unwrap(), CostVector::new(c).unwrap())
}

/// Minimum of sum c_i y_ik over every selection z of exactly one link
/// combination and every 0/1 allocation y with y_ik only on links of z
/// and sum g_ik y_ik >= D. `None` when no assignment is feasible.
pub fn brute_force_ip(g: &ChannelRealization, q: &QosRequirement, c: &CostVector) -> Option<u64> {
    let (n, k) = (g.links(), g.slots().min(q.deadline as usize));
    let mut best: Option<u64> = None;
    for z in 0..1usize << n {
        'alloc: for y in 0..1u64 << (n * k) {
            let mut delivered = 0u32;
            let mut cost = 0u64;
            for i in 0..n {
                for s in 0..k {
                    if y >> (i * k + s) & 1 == 1 {
                        if z >> i & 1 == 0 {
                            continue 'alloc;
                        }
                        cost += c.get(i);
                        delivered += g.get(i, s) as u32;
                    }
                }
            }
            if delivered >= q.packets && best.is_none_or(|b| cost < b) {
                best = Some(cost);
            }
        }
    }
    best
}

/// Consecutive transmission of `mask` from slot 1: (feasible, cost).
pub fn simulate_consecutive(mask: usize, g: &ChannelRealization, q: &QosRequirement, c: &CostVector) -> (bool, u64) {
    if mask == 0 {
        return (q.packets == 0, 0);
    }
    let mut got = 0u32;
    let mut cost = 0u64;
    for s in 0..g.slots().min(q.deadline as usize) {
        if got >= q.packets {
            break;
        }
        for i in 0..g.links() {
            if mask >> i & 1 == 1 {
                cost += c.get(i);
                got += g.get(i, s) as u32;
            }
        }
    }
    (got >= q.packets, cost)
}

/// Cheapest feasible combination index under consecutive transmission,
/// ties to fewer links then lower index; 0 when none is feasible or D = 0.
pub fn brute_force_label(g: &ChannelRealization, q: &QosRequirement, c: &CostVector) -> usize {
    if q.packets == 0 {
        return 0;
    }
    let mut best: Option<(u64, u32, usize)> = None;
    for mask in 1..1usize << g.links() {
        let (ok, cost) = simulate_consecutive(mask, g, q, c);
        let key = (cost, mask.count_ones(), mask);
        if ok && best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    best.map_or(0, |b| b.2)
}

/// Exhaustive CART split: (feature, threshold, weighted Gini) minimizing the
/// weighted child impurity over every feature in `features` and every
/// midpoint between distinct values. Ties to the earlier feature in the
/// list, then the lower threshold. `None` unless the impurity strictly drops.
/// Comparisons are exact (rational arithmetic on class counts).
pub fn exhaustive_split(samples: &[TrainingSample], features: &[usize]) -> Option<(usize, f64, f64)> {
    let n = samples.len() as u128;
    if n < 2 {
        return None;
    }
    let classes = samples.iter().map(|s| s.label).max().unwrap() + 1;
    let sq = |rows: &[&TrainingSample]| -> u128 {
        let mut h = vec![0u128; classes];
        for s in rows {
            h[s.label] += 1;
        }
        h.iter().map(|v| v * v).sum()
    };
    let all: Vec<&TrainingSample> = samples.iter().collect();
    // weighted impurity = 1 - score / n with score = S_l/n_l + S_r/n_r;
    // the parent has score S/n.
    let parent = (sq(&all), n);
    let mut best: Option<((u128, u128), usize, f64)> = None;
    for &f in features {
        let mut values: Vec<f64> = samples.iter().map(|s| s.features[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let mut t = 0.5 * (w[0] + w[1]);
            if t >= w[1] {
                t = w[0];
            }
            let (l, r): (Vec<&TrainingSample>, Vec<&TrainingSample>) =
                samples.iter().partition(|s| s.features[f] <= t);
            let (nl, nr) = (l.len() as u128, r.len() as u128);
            let score = (sq(&l) * nr + sq(&r) * nl, nl * nr);
            let better = match &best {
                None => true,
                Some((b, _, _)) => score.0 * b.1 > b.0 * score.1,
            };
            if better {
                best = Some((score, f, t));
            }
        }
    }
    let (score, f, t) = best?;
    if score.0 * parent.1 <= parent.0 * score.1 {
        return None;
    }
    Some((f, t, 1.0 - score.0 as f64 / score.1 as f64 / n as f64))
}

/// Two-class set split by the hyperplane x0 + x1 = 0 with a margin of 0.1.
pub fn separable_samples<R: Rng>(rng: &mut R, count: usize) -> Vec<TrainingSample> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let s: f64 = x[0] + x[1];
        if s.abs() < 0.1 {
            continue;
        }
        out.push(TrainingSample { features: x.to_vec(), label: (s > 0.0) as usize });
    }
    out
}

pub const TEST_AREA: Area = Area { min: [0.0, 0.0], max: [100.0, 100.0] };

/// Small random scene: three access points on the area edges, up to three
/// buildings and `movers` random obstacles.
pub fn random_scene<R: Rng>(rng: &mut R, movers: usize) -> Scene {
    let aps = vec![
        AccessPointSite { position: Point3::new(50.0, 1.0, 10.0), boresight_deg: 90.0, codebook: 0 },
        AccessPointSite { position: Point3::new(99.0, 50.0, 10.0), boresight_deg: 180.0, codebook: 0 },
        AccessPointSite { position: Point3::new(1.0, 50.0, 10.0), boresight_deg: 0.0, codebook: 0 },
    ];
    let buildings = (0..rng.random_range(0..=3)).map(|_| random_building(rng)).collect();
    let ms = (0..movers).map(|_| random_mover(rng)).collect();
    let user = MobileUser {
        class: UserClass::SmallVehicle,
        position: Point3::new(rng.random_range(20.0..80.0), rng.random_range(20.0..80.0), 1.5),
        heading: {
            let h: f64 = rng.random_range(-3.14..3.14);
            [h.cos(), h.sin()]
        },
        speed: rng.random_range(0.5..15.0),
    };
    Scene::from_parts(TEST_AREA, aps, vec![BeamCodebook::default()], Point3::new(50.0, 99.0, 12.0), buildings, ms, user, 0)
        .unwrap()
}

pub fn random_building<R: Rng>(rng: &mut R) -> Building {
    let x0 = rng.random_range(5.0..85.0);
    let y0 = rng.random_range(5.0..85.0);
    Building {
        min: [x0, y0],
        max: [x0 + rng.random_range(1.0..10.0), y0 + rng.random_range(1.0..10.0)],
        height: rng.random_range(2.0..30.0),
    }
}

pub fn random_mover<R: Rng>(rng: &mut R) -> MovingObstacle {
    let class = [ObstacleClass::Pedestrian, ObstacleClass::SmallVehicle, ObstacleClass::LargeVehicle]
        [rng.random_range(0..3)];
    let mut m = MovingObstacle::of_class(
        class,
        [rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)],
        rng.random_range(-3.14..3.14),
    );
    m.height = rng.random_range(0.5..4.0);
    m
}

pub fn random_point<R: Rng>(rng: &mut R) -> Point3 {
    Point3::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0), rng.random_range(0.0..15.0))
}
