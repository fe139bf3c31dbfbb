//! Scene geometry: area, cell sites, fixed buildings, moving blockers and the
//! mobile user, plus the seeded construction and constant-velocity motion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::blockage::BlockerIndex;
use super::codebook::BeamCodebook;
use super::point::Point3;
use crate::error::{Error, Result};

const KMH_TO_MS: f64 = 1.0 / 3.6;

/// Axis-aligned ground rectangle bounding the simulated area.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Area {
    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn depth(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn surface(&self) -> f64 {
        self.width() * self.depth()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.min[0] && x <= self.max[0] && y >= self.min[1] && y <= self.max[1]
    }

    /// Wrap-around (toroidal) placement of a ground position.
    pub fn wrap(&self, x: f64, y: f64) -> (f64, f64) {
        let wx = (x - self.min[0]).rem_euclid(self.width()) + self.min[0];
        let wy = (y - self.min[1]).rem_euclid(self.depth()) + self.min[1];
        (wx, wy)
    }
}

/// Fixed obstacle: a box standing on the ground.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub height: f64,
}

impl Building {
    pub fn lower(&self) -> Point3 {
        Point3::new(self.min[0], self.min[1], 0.0)
    }

    pub fn upper(&self) -> Point3 {
        Point3::new(self.max[0], self.max[1], self.height)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccessPointSite {
    pub position: Point3,
    /// Azimuth the codebook is centered on, degrees (0 = +x, counter-clockwise).
    pub boresight_deg: f64,
    #[serde(default)]
    pub codebook: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstacleClass {
    Pedestrian,
    SmallVehicle,
    LargeVehicle,
}

impl ObstacleClass {
    pub const ALL: [ObstacleClass; 3] = [
        ObstacleClass::Pedestrian,
        ObstacleClass::SmallVehicle,
        ObstacleClass::LargeVehicle,
    ];

    /// Default (width, length, height) in meters.
    pub fn default_dimensions(self) -> (f64, f64, f64) {
        match self {
            ObstacleClass::Pedestrian => (0.5, 0.5, 1.75),
            ObstacleClass::SmallVehicle => (2.2, 4.0, 1.8),
            ObstacleClass::LargeVehicle => (2.2, 8.0, 3.0),
        }
    }

    pub fn default_speed_kmh(self) -> f64 {
        match self {
            ObstacleClass::Pedestrian => 3.0,
            ObstacleClass::SmallVehicle => 50.0,
            ObstacleClass::LargeVehicle => 30.0,
        }
    }
}

/// A blocker translating along a straight line at constant speed. The
/// footprint is a rectangle whose length axis follows the heading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MovingObstacle {
    pub class: ObstacleClass,
    pub width: f64,
    pub length: f64,
    pub height: f64,
    /// Ground position of the footprint center.
    pub position: [f64; 2],
    /// Unit heading vector.
    pub heading: [f64; 2],
    /// Meters per second.
    pub speed: f64,
}

impl MovingObstacle {
    /// Blocker of `class` with class-default size and speed.
    pub fn of_class(class: ObstacleClass, position: [f64; 2], heading_rad: f64) -> Self {
        let (width, length, height) = class.default_dimensions();
        Self {
            class,
            width,
            length,
            height,
            position,
            heading: [heading_rad.cos(), heading_rad.sin()],
            speed: class.default_speed_kmh() * KMH_TO_MS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.heading[0].hypot(self.heading[1]);
        if !(self.width > 0.0 && self.length > 0.0 && self.height > 0.0) {
            return Err(Error::InvalidConfig("obstacle dimensions must be positive".into()));
        }
        if !(self.speed >= 0.0) {
            return Err(Error::InvalidConfig("obstacle speed must be non-negative".into()));
        }
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidConfig("obstacle heading must be a unit vector".into()));
        }
        Ok(())
    }

    /// Radius of the footprint's circumscribed circle.
    pub fn half_diagonal(&self) -> f64 {
        0.5 * self.width.hypot(self.length)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UserClass {
    Pedestrian,
    SmallVehicle,
}

impl UserClass {
    pub fn default_speed_kmh(self) -> f64 {
        match self {
            UserClass::Pedestrian => 3.0,
            UserClass::SmallVehicle => 50.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UserClass::Pedestrian => "pedestrian",
            UserClass::SmallVehicle => "small-vehicle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobileUser {
    pub class: UserClass,
    pub position: Point3,
    pub heading: [f64; 2],
    pub speed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub density: f64,
    pub width: f64,
    pub length: f64,
    pub height: f64,
    pub speed_kmh: f64,
}

impl ClassSpec {
    fn defaults(class: ObstacleClass, density: f64) -> Self {
        let (width, length, height) = class.default_dimensions();
        Self { density, width, length, height, speed_kmh: class.default_speed_kmh() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserConfig {
    pub class: UserClass,
    /// Start position on the ground, meters.
    pub start: [f64; 2],
    pub heading_deg: f64,
    #[serde(default = "default_user_height")]
    pub antenna_height: f64,
    /// Overrides the class-default speed when set.
    #[serde(default)]
    pub speed_kmh: Option<f64>,
}

fn default_user_height() -> f64 {
    1.5
}

/// Everything needed to drop a scene. Serialized as a TOML table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub area: Area,
    pub access_points: Vec<AccessPointSite>,
    #[serde(default = "default_codebooks")]
    pub codebooks: Vec<BeamCodebook>,
    pub low_band_site: Point3,
    #[serde(default)]
    pub buildings: Vec<Building>,
    pub pedestrians: ClassSpec,
    pub small_vehicles: ClassSpec,
    pub large_vehicles: ClassSpec,
    pub user: UserConfig,
    #[serde(default)]
    pub seed: u64,
}

fn default_codebooks() -> Vec<BeamCodebook> {
    vec![BeamCodebook::default()]
}

impl SceneConfig {
    /// Street-canyon scene used by the default experiments: a 120 m x 80 m
    /// block with one east-west street, two cross streets, three 28 GHz
    /// access points on building walls and a 2 GHz macro site.
    pub fn street_canyon(user: UserClass) -> Self {
        let b = |x0: f64, y0: f64, x1: f64, y1: f64, h: f64| Building {
            min: [x0, y0],
            max: [x1, y1],
            height: h,
        };
        Self {
            area: Area { min: [0.0, 0.0], max: [120.0, 80.0] },
            access_points: vec![
                AccessPointSite { position: Point3::new(25.0, 29.5, 10.0), boresight_deg: 90.0, codebook: 0 },
                AccessPointSite { position: Point3::new(85.0, 50.5, 10.0), boresight_deg: -90.0, codebook: 0 },
                AccessPointSite { position: Point3::new(50.5, 12.0, 10.0), boresight_deg: 0.0, codebook: 0 },
            ],
            codebooks: default_codebooks(),
            low_band_site: Point3::new(60.0, 79.0, 10.0),
            buildings: vec![
                b(5.0, 2.0, 50.0, 29.0, 25.0),
                b(70.0, 2.0, 115.0, 29.0, 30.0),
                b(5.0, 51.0, 40.0, 78.0, 20.0),
                b(60.0, 51.0, 115.0, 78.0, 25.0),
            ],
            pedestrians: ClassSpec::defaults(ObstacleClass::Pedestrian, 0.03),
            small_vehicles: ClassSpec::defaults(ObstacleClass::SmallVehicle, 0.005),
            large_vehicles: ClassSpec::defaults(ObstacleClass::LargeVehicle, 0.005),
            user: UserConfig {
                class: user,
                start: [2.0, 40.0],
                heading_deg: 0.0,
                antenna_height: 1.5,
                speed_kmh: None,
            },
            seed: 0,
        }
    }

    pub fn class_spec(&self, class: ObstacleClass) -> &ClassSpec {
        match class {
            ObstacleClass::Pedestrian => &self.pedestrians,
            ObstacleClass::SmallVehicle => &self.small_vehicles,
            ObstacleClass::LargeVehicle => &self.large_vehicles,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        let a = &self.area;
        if !(a.width() > 0.0 && a.depth() > 0.0) {
            return bad("area must have positive extent");
        }
        if self.access_points.is_empty() {
            return bad("at least one access point is required");
        }
        if self.codebooks.is_empty() {
            return bad("at least one codebook is required");
        }
        for cb in &self.codebooks {
            cb.validate()?;
        }
        for ap in &self.access_points {
            if !a.contains(ap.position.x, ap.position.y) || !(ap.position.z > 0.0) {
                return bad("access point outside area or non-positive height");
            }
            if ap.codebook >= self.codebooks.len() {
                return bad("access point references unknown codebook");
            }
        }
        let m0 = self.codebooks[self.access_points[0].codebook].beams;
        if self.access_points.iter().any(|ap| self.codebooks[ap.codebook].beams != m0) {
            return bad("all access points must share the same beam count");
        }
        let lb = self.low_band_site;
        if !a.contains(lb.x, lb.y) || !(lb.z > 0.0) {
            return bad("low-band site outside area or non-positive height");
        }
        for bld in &self.buildings {
            if !(bld.height > 0.0 && bld.max[0] > bld.min[0] && bld.max[1] > bld.min[1]) {
                return bad("building must have positive extent and height");
            }
            if !a.contains(bld.min[0], bld.min[1]) || !a.contains(bld.max[0], bld.max[1]) {
                return bad("building footprint outside area");
            }
        }
        for class in ObstacleClass::ALL {
            let s = self.class_spec(class);
            if !(s.density >= 0.0 && s.density.is_finite()) {
                return bad("densities must be finite and non-negative");
            }
            if !(s.width > 0.0 && s.length > 0.0 && s.height > 0.0) {
                return bad("obstacle dimensions must be positive");
            }
            if !(s.speed_kmh >= 0.0) {
                return bad("obstacle speed must be non-negative");
            }
        }
        let u = &self.user;
        if !a.contains(u.start[0], u.start[1]) || !(u.antenna_height > 0.0) {
            return bad("user start outside area or non-positive antenna height");
        }
        if matches!(u.speed_kmh, Some(s) if !(s >= 0.0)) {
            return bad("user speed must be non-negative");
        }
        Ok(())
    }
}

/// Immutable-by-convention snapshot of the world at one instant.
#[derive(Clone, Debug)]
pub struct Scene {
    area: Area,
    access_points: Vec<AccessPointSite>,
    codebooks: Vec<BeamCodebook>,
    low_band_site: Point3,
    buildings: Vec<Building>,
    movers: Vec<MovingObstacle>,
    user: MobileUser,
    seed: u64,
    elapsed_slots: u64,
    index: BlockerIndex,
}

impl Scene {
    /// Assembles a scene from explicit parts; used by tests and by `build_scene`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        area: Area,
        access_points: Vec<AccessPointSite>,
        codebooks: Vec<BeamCodebook>,
        low_band_site: Point3,
        buildings: Vec<Building>,
        movers: Vec<MovingObstacle>,
        user: MobileUser,
        seed: u64,
    ) -> Result<Self> {
        if access_points.is_empty() {
            return Err(Error::InvalidConfig("at least one access point is required".into()));
        }
        if access_points.iter().any(|ap| ap.codebook >= codebooks.len()) {
            return Err(Error::InvalidConfig("access point references unknown codebook".into()));
        }
        for m in &movers {
            m.validate()?;
        }
        let index = BlockerIndex::build(&movers);
        Ok(Self {
            area,
            access_points,
            codebooks,
            low_band_site,
            buildings,
            movers,
            user,
            seed,
            elapsed_slots: 0,
            index,
        })
    }

    pub fn area(&self) -> &Area {
        &self.area
    }

    pub fn access_points(&self) -> &[AccessPointSite] {
        &self.access_points
    }

    /// Number of mm-wave access points, N.
    pub fn mmap_count(&self) -> usize {
        self.access_points.len()
    }

    pub fn codebook_for(&self, ap_index: usize) -> &BeamCodebook {
        &self.codebooks[self.access_points[ap_index - 1].codebook]
    }

    /// Beam count M (shared by all access points).
    pub fn beam_count(&self) -> usize {
        self.codebook_for(1).beams
    }

    pub fn low_band_site(&self) -> Point3 {
        self.low_band_site
    }

    pub fn buildings(&self) -> &[Building] {
        &self.buildings
    }

    pub fn movers(&self) -> &[MovingObstacle] {
        &self.movers
    }

    pub fn user(&self) -> &MobileUser {
        &self.user
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn elapsed_slots(&self) -> u64 {
        self.elapsed_slots
    }

    pub(crate) fn blocker_index(&self) -> &BlockerIndex {
        &self.index
    }

    pub fn add_mover(&mut self, mover: MovingObstacle) -> Result<()> {
        mover.validate()?;
        self.movers.push(mover);
        self.index = BlockerIndex::build(&self.movers);
        Ok(())
    }

    pub fn remove_mover(&mut self, idx: usize) -> MovingObstacle {
        let m = self.movers.remove(idx);
        self.index = BlockerIndex::build(&self.movers);
        m
    }

    pub fn add_building(&mut self, building: Building) {
        self.buildings.push(building);
    }

    pub fn set_user_position(&mut self, x: f64, y: f64) {
        self.user.position.x = x;
        self.user.position.y = y;
    }

    pub(crate) fn tick_slot(&mut self) {
        self.elapsed_slots += 1;
    }

    /// Translates every blocker and the user by `speed * dt` along its
    /// heading, wrapping around the area edges.
    pub fn advance(&self, dt: f64) -> Result<Scene> {
        let mut next = self.clone();
        next.advance_in_place(dt)?;
        Ok(next)
    }

    pub fn advance_in_place(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::InvalidConfig(format!("time step must be positive, got {dt}")));
        }
        let area = self.area;
        for m in &mut self.movers {
            let (x, y) = area.wrap(
                m.position[0] + m.heading[0] * m.speed * dt,
                m.position[1] + m.heading[1] * m.speed * dt,
            );
            m.position = [x, y];
        }
        let u = &mut self.user;
        let (x, y) = area.wrap(
            u.position.x + u.heading[0] * u.speed * dt,
            u.position.y + u.heading[1] * u.speed * dt,
        );
        u.position.x = x;
        u.position.y = y;
        self.index = BlockerIndex::build(&self.movers);
        Ok(())
    }
}

/// Drops blockers uniformly at random (Poisson counts at the configured
/// densities, uniform headings) and places the user at its start point.
pub fn build_scene(config: &SceneConfig) -> Result<Scene> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let area = config.area;
    let mut movers = Vec::new();
    for class in ObstacleClass::ALL {
        let spec = config.class_spec(class);
        let mean = spec.density * area.surface();
        let count = if mean > 0.0 {
            let poisson = Poisson::new(mean)
                .map_err(|e| Error::InvalidConfig(format!("obstacle density: {e}")))?;
            poisson.sample(&mut rng) as usize
        } else {
            0
        };
        for _ in 0..count {
            let x = rng.random_range(area.min[0]..area.max[0]);
            let y = rng.random_range(area.min[1]..area.max[1]);
            let heading = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            movers.push(MovingObstacle {
                class,
                width: spec.width,
                length: spec.length,
                height: spec.height,
                position: [x, y],
                heading: [heading.cos(), heading.sin()],
                speed: spec.speed_kmh * KMH_TO_MS,
            });
        }
    }
    let u = &config.user;
    let h = u.heading_deg.to_radians();
    let user = MobileUser {
        class: u.class,
        position: Point3::new(u.start[0], u.start[1], u.antenna_height),
        heading: [h.cos(), h.sin()],
        speed: u.speed_kmh.unwrap_or_else(|| u.class.default_speed_kmh()) * KMH_TO_MS,
    };
    Scene::from_parts(
        area,
        config.access_points.clone(),
        config.codebooks.clone(),
        config.low_band_site,
        config.buildings.clone(),
        movers,
        user,
        config.seed,
    )
}
