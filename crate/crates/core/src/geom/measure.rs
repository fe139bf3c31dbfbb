//! Per-beam SNR evaluation, the alignment measurement and the genie channel.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::point::Point3;
use super::radio::{db_to_linear, linear_to_db, log_distance_loss_db, RadioParams};
use super::rays::{trace_rays, Ray};
use super::scene::Scene;
use crate::error::{Error, Result};

/// SNR of every beam of access point `ap_index` (1-based) at `user_pos`.
pub fn snr_per_beam(ap_index: usize, user_pos: Point3, scene: &Scene, radio: &RadioParams) -> Vec<f64> {
    let rays = trace_rays(ap_index, user_pos, scene, radio);
    beam_snrs_from_rays(ap_index, &rays, scene, radio)
}

fn beam_snrs_from_rays(ap_index: usize, rays: &[Ray], scene: &Scene, radio: &RadioParams) -> Vec<f64> {
    let cb = scene.codebook_for(ap_index);
    (0..cb.beams).map(|m| beam_snr_from_rays(ap_index, m, rays, scene, radio)).collect()
}

fn beam_snr_from_rays(ap_index: usize, beam: usize, rays: &[Ray], scene: &Scene, radio: &RadioParams) -> f64 {
    if rays.is_empty() {
        return radio.snr_floor_db;
    }
    let site = &scene.access_points()[ap_index - 1];
    let cb = scene.codebook_for(ap_index);
    let tx_mw = db_to_linear(radio.mm_tx_power_dbm);
    let rx_mw: f64 = rays
        .iter()
        .map(|r| {
            let rel = super::point::wrap_angle(r.departure_azimuth - site.boresight_deg.to_radians());
            tx_mw * r.gain * db_to_linear(cb.gain_db(beam, rel.to_degrees()))
        })
        .sum();
    (linear_to_db(rx_mw) - radio.noise_dbm).max(radio.snr_floor_db)
}

/// Low-band SNR: log-distance path loss from the LB-BS site, never blocked.
pub fn lb_snr(user_pos: Point3, scene: &Scene, radio: &RadioParams) -> f64 {
    let d = scene.low_band_site().distance(user_pos);
    let loss = log_distance_loss_db(
        radio.lb_frequency_hz,
        radio.lb_path_loss_exponent,
        radio.lb_reference_distance_m,
        d,
    );
    radio.lb_tx_power_dbm - loss - radio.noise_dbm
}

/// Measurements available to the controller after an alignment phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector {
    pub mmaps: usize,
    pub beams: usize,
    /// SNR per (access point, beam), access-point-major.
    pub mm_snr_db: Vec<f64>,
    pub lb_snr_db: f64,
    pub position: [f64; 2],
    pub slot: u64,
    /// Strongest beam per access point (ties to the lowest index).
    pub best_beams: Vec<usize>,
}

impl MeasurementVector {
    /// SNR of `beam` at access point `ap` (1-based).
    pub fn snr(&self, ap: usize, beam: usize) -> f64 {
        self.mm_snr_db[(ap - 1) * self.beams + beam]
    }

    pub fn best_beam_snr(&self, ap: usize) -> f64 {
        self.snr(ap, self.best_beams[ap - 1])
    }

    /// Alignment score per link, LB-BS first.
    pub fn link_scores(&self) -> Vec<f64> {
        std::iter::once(self.lb_snr_db)
            .chain((1..=self.mmaps).map(|ap| self.best_beam_snr(ap)))
            .collect()
    }

    pub fn csv_header(mmaps: usize, beams: usize) -> Vec<String> {
        let mut h = vec!["slot".to_string(), "pos_x".into(), "pos_y".into(), "lb_snr".into()];
        for ap in 1..=mmaps {
            for b in 0..beams {
                h.push(format!("snr_ap{ap}_b{b}"));
            }
        }
        h
    }

    pub fn csv_record(&self) -> Vec<String> {
        let mut r = vec![
            self.slot.to_string(),
            self.position[0].to_string(),
            self.position[1].to_string(),
            self.lb_snr_db.to_string(),
        ];
        r.extend(self.mm_snr_db.iter().map(|v| v.to_string()));
        r
    }
}

fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Alignment phase: per-beam SNR for every access point, LB SNR, position,
/// and the selected serving beam of each access point.
pub fn align_and_measure(scene: &Scene, radio: &RadioParams) -> MeasurementVector {
    let user = scene.user().position;
    let n = scene.mmap_count();
    let m = scene.beam_count();
    let mut mm = Vec::with_capacity(n * m);
    let mut best = Vec::with_capacity(n);
    for ap in 1..=n {
        let snrs = snr_per_beam(ap, user, scene, radio);
        best.push(argmax_lowest(&snrs));
        mm.extend(snrs);
    }
    MeasurementVector {
        mmaps: n,
        beams: m,
        mm_snr_db: mm,
        lb_snr_db: lb_snr(user, scene, radio),
        position: [user.x, user.y],
        slot: scene.elapsed_slots(),
        best_beams: best,
    }
}

/// Binary success matrix of one scheduling window. Row 0 is the LB-BS,
/// rows 1..=N the access points; columns are slots 1..=K stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelRealization {
    links: usize,
    slots: usize,
    success: Vec<bool>,
    /// Serving beam of each access point fixed at alignment.
    pub best_beams: Vec<usize>,
}

impl ChannelRealization {
    pub fn new(links: usize, slots: usize, success: Vec<bool>, best_beams: Vec<usize>) -> Result<Self> {
        if links == 0 || slots == 0 {
            return Err(Error::InvalidConfig("channel needs at least one link and one slot".into()));
        }
        if success.len() != links * slots {
            return Err(Error::DimensionMismatch { expected: links * slots, got: success.len() });
        }
        Ok(Self { links, slots, success, best_beams })
    }

    /// Builds from rows of 0/1 values, LB-BS first.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let links = rows.len();
        let slots = rows.first().map_or(0, |r| r.as_ref().len());
        let mut success = Vec::with_capacity(links * slots);
        for r in rows {
            let r = r.as_ref();
            if r.len() != slots {
                return Err(Error::DimensionMismatch { expected: slots, got: r.len() });
            }
            for &v in r {
                match v {
                    0 => success.push(false),
                    1 => success.push(true),
                    _ => return Err(Error::Malformed(format!("channel entry {v} is not binary"))),
                }
            }
        }
        Self::new(links, slots, success, Vec::new())
    }

    pub fn all(links: usize, slots: usize, value: bool) -> Self {
        Self { links, slots, success: vec![value; links * slots], best_beams: Vec::new() }
    }

    pub fn links(&self) -> usize {
        self.links
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Success of link `i` in slot `k` (0-based slot).
    pub fn get(&self, i: usize, k: usize) -> bool {
        self.success[i * self.slots + k]
    }

    pub fn set(&mut self, i: usize, k: usize, value: bool) {
        self.success[i * self.slots + k] = value;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.success[i * self.slots..(i + 1) * self.slots]
    }

    /// Writes one CSV line per link (LB-BS first), one 0/1 column per slot.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for i in 0..self.links {
            w.write_record(self.row(i).iter().map(|&b| if b { "1" } else { "0" }))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<u8>().map_err(|_| Error::Malformed(format!("bad channel entry {f:?}"))))
                .collect::<Result<Vec<u8>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }
}

/// True iff the serving beam of `ap` delivers SNR >= gamma at the user's
/// current position.
fn mm_link_up(scene: &Scene, ap: usize, beam: usize, radio: &RadioParams, gamma: f64) -> bool {
    let rays = trace_rays(ap, scene.user().position, scene, radio);
    beam_snr_from_rays(ap, beam, &rays, scene, radio) >= gamma
}

/// Genie channel for the next `window` slots: aligns at the current state,
/// then advances slot by slot and thresholds the serving-beam SNR at `gamma`.
/// On return the scene has moved `window` slots forward.
pub fn realize_channel(
    scene: &mut Scene,
    window: usize,
    slot_duration: f64,
    radio: &RadioParams,
    gamma: f64,
) -> Result<ChannelRealization> {
    let best = align_and_measure(scene, radio).best_beams;
    realize_channel_with_beams(scene, &best, window, slot_duration, radio, gamma)
}

/// As [`realize_channel`] with serving beams already fixed by a measurement.
pub fn realize_channel_with_beams(
    scene: &mut Scene,
    best_beams: &[usize],
    window: usize,
    slot_duration: f64,
    radio: &RadioParams,
    gamma: f64,
) -> Result<ChannelRealization> {
    if window == 0 {
        return Err(Error::InvalidConfig("window must be at least one slot".into()));
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidConfig("SNR threshold must be finite".into()));
    }
    let n = scene.mmap_count();
    if best_beams.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: best_beams.len() });
    }
    let mut g = ChannelRealization::all(n + 1, window, false);
    g.best_beams = best_beams.to_vec();
    for k in 0..window {
        scene.advance_in_place(slot_duration)?;
        scene.tick_slot();
        let user = scene.user().position;
        g.set(0, k, lb_snr(user, scene, radio) >= gamma);
        for ap in 1..=n {
            g.set(ap, k, mm_link_up(scene, ap, best_beams[ap - 1], radio, gamma));
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::codebook::BeamCodebook;
    use crate::geom::radio::free_space_loss_db;
    use crate::geom::scene::{AccessPointSite, Area, MobileUser, MovingObstacle, ObstacleClass, UserClass};

    fn open_scene(user: Point3, speed: f64) -> Scene {
        Scene::from_parts(
            Area { min: [0.0, 0.0], max: [200.0, 200.0] },
            vec![
                AccessPointSite { position: Point3::new(50.0, 50.0, 10.0), boresight_deg: 0.0, codebook: 0 },
                AccessPointSite { position: Point3::new(150.0, 50.0, 10.0), boresight_deg: 180.0, codebook: 0 },
                AccessPointSite { position: Point3::new(100.0, 10.0, 10.0), boresight_deg: 90.0, codebook: 0 },
            ],
            vec![BeamCodebook::default()],
            Point3::new(100.0, 100.0, 10.0),
            vec![],
            vec![],
            MobileUser { class: UserClass::Pedestrian, position: user, heading: [1.0, 0.0], speed },
            0,
        )
        .unwrap()
    }

    #[test]
    fn aligned_beam_beats_others_by_codebook_contrast() {
        let scene = open_scene(Point3::new(100.0, 50.0, 1.5), 0.0);
        let radio = RadioParams::default();
        let snr = snr_per_beam(1, scene.user().position, &scene, &radio);
        assert_eq!(snr.len(), 19);
        let best = argmax_lowest(&snr);
        assert_eq!(best, 9);
        for (m, &s) in snr.iter().enumerate() {
            if m != best {
                assert!(snr[best] - s >= 28.0 - 1e-9, "beam {m}");
            }
        }
        // single ray: difference to the neighbour equals the gain contrast
        assert!((snr[9] - snr[10] - 28.0).abs() < 1e-9);
        // absolute level: tx + peak - FSPL - noise
        let d = Point3::new(50.0, 50.0, 10.0).distance(scene.user().position);
        let expected = 24.0 + 18.0 - free_space_loss_db(28e9, d) + 80.0;
        assert!((snr[9] - expected).abs() < 1e-9);
    }

    #[test]
    fn blocked_link_reads_floor_everywhere() {
        let mut scene = open_scene(Point3::new(100.0, 50.0, 1.5), 0.0);
        let mut bus = MovingObstacle::of_class(ObstacleClass::LargeVehicle, [98.0, 50.0], 0.0);
        bus.speed = 0.0;
        scene.add_mover(bus).unwrap();
        let radio = RadioParams::default();
        let snr = snr_per_beam(1, scene.user().position, &scene, &radio);
        assert!(snr.iter().all(|&s| s == -40.0));
    }

    #[test]
    fn lb_reference_and_doubling() {
        let scene = open_scene(Point3::new(100.0, 100.0, 9.0), 0.0);
        let radio = RadioParams::default();
        let at_1m = lb_snr(Point3::new(100.0, 100.0, 9.0), &scene, &radio);
        let expected = 46.0 - free_space_loss_db(2e9, 1.0) + 80.0;
        assert!((at_1m - expected).abs() < 1e-9);
        let d10 = lb_snr(Point3::new(110.0, 100.0, 10.0), &scene, &radio);
        let d20 = lb_snr(Point3::new(120.0, 100.0, 10.0), &scene, &radio);
        assert!((d10 - d20 - 35.0 * 2f64.log10()).abs() < 1e-9);
        assert_eq!(d10, lb_snr(Point3::new(110.0, 100.0, 10.0), &scene, &radio));
    }

    #[test]
    fn measurement_layout_and_fully_blocked_tie_break() {
        let mut scene = open_scene(Point3::new(100.0, 50.0, 1.5), 0.0);
        let radio = RadioParams::default();
        let m = align_and_measure(&scene, &radio);
        assert_eq!(m.mm_snr_db.len(), 57);
        // surround the user by tall buildings: every link fully blocked
        scene.add_building(crate::geom::scene::Building { min: [95.0, 45.0], max: [99.0, 55.0], height: 30.0 });
        scene.add_building(crate::geom::scene::Building { min: [101.0, 45.0], max: [105.0, 55.0], height: 30.0 });
        scene.add_building(crate::geom::scene::Building { min: [95.0, 40.0], max: [105.0, 49.0], height: 30.0 });
        let m = align_and_measure(&scene, &radio);
        assert!(m.mm_snr_db.iter().all(|&s| s == -40.0));
        assert_eq!(m.best_beams, vec![0, 0, 0]);
    }

    #[test]
    fn best_beam_of_second_ap_points_at_user() {
        let scene = open_scene(Point3::new(100.0, 80.0, 1.5), 0.0);
        let m = align_and_measure(&scene, &RadioParams::default());
        // AP2 at (150,50) facing 180 deg; user bearing is atan2(30,-50) = 149.04 deg,
        // i.e. -30.96 deg relative to boresight -> beam covering [-35, -25) = beam 6
        assert_eq!(m.best_beams[1], 6);
    }

    #[test]
    fn strong_static_links_give_all_ones() {
        let mut scene = open_scene(Point3::new(100.0, 50.0, 1.5), 0.0);
        let g = realize_channel(&mut scene, 5, 0.001, &RadioParams::default(), 10.0).unwrap();
        assert_eq!((g.links(), g.slots()), (4, 5));
        assert!((0..4).all(|i| g.row(i).iter().all(|&b| b)));
        assert_eq!(scene.elapsed_slots(), 5);
    }

    #[test]
    fn parked_bus_zeroes_one_row() {
        let mut scene = open_scene(Point3::new(100.0, 50.0, 1.5), 0.0);
        let mut bus = MovingObstacle::of_class(ObstacleClass::LargeVehicle, [95.0, 50.0], 0.0);
        bus.speed = 0.0;
        scene.add_mover(bus).unwrap();
        let g = realize_channel(&mut scene, 10, 0.001, &RadioParams::default(), 10.0).unwrap();
        assert!(g.row(1).iter().all(|&b| !b));
        for i in [0, 2, 3] {
            assert!(g.row(i).iter().all(|&b| b), "row {i}");
        }
    }

    #[test]
    fn pedestrian_crossing_produces_zero_run_of_crossing_time() {
        // pedestrian walks along +y across AP1's LOS right next to the user
        let user = Point3::new(100.0, 50.0, 1.5);
        let mut scene = open_scene(user, 0.0);
        let mut ped = MovingObstacle::of_class(ObstacleClass::Pedestrian, [99.8, 49.0], std::f64::consts::FRAC_PI_2);
        ped.heading = [0.0, 1.0];
        scene.add_mover(ped.clone()).unwrap();
        let slot = 0.01;
        let window = 300;
        let g = realize_channel(&mut scene, window, slot, &RadioParams::default(), 10.0).unwrap();
        let zeros: Vec<usize> = (0..window).filter(|&k| !g.get(1, k)).collect();
        assert!(!zeros.is_empty());
        assert_eq!(zeros.last().unwrap() - zeros[0] + 1, zeros.len(), "zero run must be contiguous");
        // LOS is (nearly) parallel to x at y=50; the segment is below 1.75 m for
        // x in [97.06, 100]; at x = 99.8 the height is 1.52 m, so the blocking span
        // in y is the 0.5 m footprint length plus the line's own y-extent (zero).
        let crossing_time = ped.length / ped.speed;
        let expected = crossing_time / slot;
        assert!((zeros.len() as f64 - expected).abs() <= 1.0, "{} vs {expected}", zeros.len());
    }

    #[test]
    fn channel_csv_roundtrip() {
        let g = ChannelRealization::from_rows(&[vec![1u8, 0, 1], vec![0, 0, 1]]).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1,0,1\n0,0,1\n");
        assert_eq!(ChannelRealization::read_csv(&buf[..]).unwrap(), g);
        assert!(ChannelRealization::from_rows(&[vec![2u8]]).is_err());
    }
}
