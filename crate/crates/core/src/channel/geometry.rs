//! Room geometry and Lambertian DC gains of the direct and first-order
//! reflected paths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Office room with a ceiling-mounted, downward-facing LED and an upward
/// facing photodiode. The room spans `[-w/2, w/2] x [-d/2, d/2] x [0, h]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoomGeometry {
    pub room: [f64; 3],
    pub tx_height: f64,
    pub tx_xy: [f64; 2],
    pub rx_xy: [f64; 2],
    /// Height of the receiver plane (desk level).
    pub rx_height: f64,
    pub half_power_angle_deg: f64,
    pub fov_half_deg: f64,
    pub detector_area: f64,
    pub concentrator_index: f64,
    pub filter_gain_db: f64,
    pub concentrator_gain_db: f64,
    pub wall_reflectivity: f64,
    pub tx_power: f64,
    /// Edge length of the square wall patches.
    pub patch_size: f64,
    /// Symbol period used to bin path delays.
    pub symbol_period: f64,
    /// Half-width of the uniform receiver position jitter per run.
    pub jitter: f64,
}

impl Default for RoomGeometry {
    fn default() -> Self {
        Self {
            room: [5.0, 5.0, 3.0],
            tx_height: 1.8,
            tx_xy: [0.0, 0.0],
            rx_xy: [0.0, 0.0],
            rx_height: 0.85,
            half_power_angle_deg: 30.0,
            fov_half_deg: 60.0,
            detector_area: 7.8e-7,
            concentrator_index: 1.46,
            filter_gain_db: 1.0,
            concentrator_gain_db: 1.0,
            wall_reflectivity: 0.7,
            tx_power: 20.0,
            patch_size: 0.1,
            symbol_period: 1.0 / 625e6,
            jitter: 0.05,
        }
    }
}

/// One propagation path: DC gain and length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Path {
    pub gain: f64,
    pub length: f64,
}

impl RoomGeometry {
    pub fn validate(&self) -> Result<()> {
        let inside = |v: f64, half: f64| v.abs() <= half;
        if self.room.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Config("room dimensions must be positive".into()));
        }
        if !(inside(self.rx_xy[0], self.room[0] / 2.0) && inside(self.rx_xy[1], self.room[1] / 2.0))
            || !(inside(self.tx_xy[0], self.room[0] / 2.0) && inside(self.tx_xy[1], self.room[1] / 2.0))
        {
            return Err(Error::Config("transmitter and receiver must lie inside the room".into()));
        }
        if !(0.0 < self.rx_height && self.rx_height < self.tx_height && self.tx_height < self.room[2]) {
            return Err(Error::Config("need 0 < receiver height < transmitter height < ceiling".into()));
        }
        for a in [self.half_power_angle_deg, self.fov_half_deg] {
            if !(a > 0.0 && a < 90.0) {
                return Err(Error::Config(format!("angle {a} deg outside (0, 90)")));
            }
        }
        if !(self.patch_size > 0.0 && self.symbol_period > 0.0 && self.jitter >= 0.0) {
            return Err(Error::Config("patch size and symbol period must be positive".into()));
        }
        Ok(())
    }

    /// `m = -ln 2 / ln cos(half-power angle)`.
    pub fn lambertian_order(&self) -> f64 {
        -(2f64.ln()) / self.half_power_angle_deg.to_radians().cos().ln()
    }

    fn filter_gain(&self) -> f64 {
        10f64.powf(self.filter_gain_db / 10.0)
    }

    /// `n² / sin²(FOV)` scaled by the concentrator gain, 0 outside the FOV.
    pub fn concentrator_gain(&self, incidence: f64) -> f64 {
        let fov = self.fov_half_deg.to_radians();
        if incidence > fov {
            return 0.0;
        }
        10f64.powf(self.concentrator_gain_db / 10.0) * self.concentrator_index.powi(2) / fov.sin().powi(2)
    }

    fn tx_pos(&self) -> [f64; 3] {
        [self.tx_xy[0], self.tx_xy[1], self.tx_height]
    }

    fn rx_pos(&self) -> [f64; 3] {
        [self.rx_xy[0], self.rx_xy[1], self.rx_height]
    }

    /// Receiver-side factor `T_f g(ψ) cos ψ` for light arriving from `from`.
    fn receiver_factor(&self, from: [f64; 3]) -> f64 {
        let r = self.rx_pos();
        let d = dist(from, r);
        let cos_psi = (from[2] - r[2]) / d;
        if cos_psi <= 0.0 {
            return 0.0;
        }
        self.filter_gain() * self.concentrator_gain(cos_psi.clamp(-1.0, 1.0).acos()) * cos_psi
    }

    /// Radiant intensity factor `(m+1)/(2π) cos^m φ` toward `to`.
    fn emission(&self, to: [f64; 3]) -> f64 {
        let t = self.tx_pos();
        let cos_phi = (t[2] - to[2]) / dist(t, to);
        if cos_phi <= 0.0 {
            return 0.0;
        }
        let m = self.lambertian_order();
        (m + 1.0) / (2.0 * std::f64::consts::PI) * cos_phi.powf(m)
    }

    /// Direct-path gain `(m+1)A/(2πd²) cos^m φ T_f g(ψ) cos ψ`.
    pub fn direct_path(&self) -> Path {
        let (t, r) = (self.tx_pos(), self.rx_pos());
        let d = dist(t, r);
        Path { gain: self.emission(r) * self.detector_area / (d * d) * self.receiver_factor(t), length: d }
    }

    /// First-order reflections off the four walls, one path per patch centre.
    pub fn reflected_paths(&self) -> Vec<Path> {
        let [w, dp, h] = self.room;
        let s = self.patch_size;
        let nz = (h / s).round().max(1.0) as usize;
        let mut out = Vec::new();
        // Each wall: a fixed coordinate, its inward normal and its horizontal extent.
        let walls: [(usize, f64, f64, f64); 4] = [
            (0, -w / 2.0, 1.0, dp),
            (0, w / 2.0, -1.0, dp),
            (1, -dp / 2.0, 1.0, w),
            (1, dp / 2.0, -1.0, w),
        ];
        for (axis, fixed, normal, extent) in walls {
            let nu = (extent / s).round().max(1.0) as usize;
            let (du, dz) = (extent / nu as f64, h / nz as f64);
            for iu in 0..nu {
                let u = -extent / 2.0 + (iu as f64 + 0.5) * du;
                for iz in 0..nz {
                    let z = (iz as f64 + 0.5) * dz;
                    let p = if axis == 0 { [fixed, u, z] } else { [u, fixed, z] };
                    if let Some(path) = self.patch_path(p, axis, normal, du * dz) {
                        out.push(path);
                    }
                }
            }
        }
        out
    }

    /// Gain of the path LED -> wall element at `p` (area `da`) -> detector.
    /// The wall re-emits as a first-order Lambertian source.
    fn patch_path(&self, p: [f64; 3], axis: usize, normal: f64, da: f64) -> Option<Path> {
        let (t, r) = (self.tx_pos(), self.rx_pos());
        let (d1, d2) = (dist(t, p), dist(p, r));
        let cos_in = normal * (t[axis] - p[axis]) / d1;
        let cos_out = normal * (r[axis] - p[axis]) / d2;
        if cos_in <= 0.0 || cos_out <= 0.0 {
            return None;
        }
        let rx = self.receiver_factor(p);
        let em = self.emission(p);
        if rx == 0.0 || em == 0.0 {
            return None;
        }
        let gain = em / (d1 * d1) * self.wall_reflectivity * da * cos_in * cos_out / std::f64::consts::PI
            * self.detector_area
            / (d2 * d2)
            * rx;
        Some(Path { gain, length: d1 + d2 })
    }
}

pub(crate) fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
