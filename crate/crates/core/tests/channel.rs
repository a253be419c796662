//! Room-model bookkeeping against a brute-force surface integral.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use ucp_ofdm::channel::{
    apply_wander, bin_paths, realize_channel, std_dev, ChannelKind, RoomGeometry, WanderConfig,
};

/// Reflected power collected from the four walls, integrated on a fine grid
/// straight from the point-source formulas.
fn integrate_walls(rx: [f64; 2], step: f64) -> f64 {
    use std::f64::consts::PI;
    let tx = [0.0, 0.0, 1.8];
    let r = [rx[0], rx[1], 0.85];
    let m = -(2f64.ln()) / (30f64.to_radians().cos()).ln();
    let fov = 60f64.to_radians();
    let conc = 10f64.powf(0.1) * 1.46f64.powi(2) / fov.sin().powi(2);
    let tf = 10f64.powf(0.1);
    let area = 7.8e-7;
    let mut total = 0.0;
    let n_u = (5.0 / step) as usize;
    let n_z = (3.0 / step) as usize;
    // (point on wall, inward unit normal)
    let mut walls: Vec<Box<dyn Fn(f64, f64) -> ([f64; 3], [f64; 3])>> = Vec::new();
    walls.push(Box::new(|u, z| ([-2.5, u, z], [1.0, 0.0, 0.0])));
    walls.push(Box::new(|u, z| ([2.5, u, z], [-1.0, 0.0, 0.0])));
    walls.push(Box::new(|u, z| ([u, -2.5, z], [0.0, 1.0, 0.0])));
    walls.push(Box::new(|u, z| ([u, 2.5, z], [0.0, -1.0, 0.0])));
    for wall in &walls {
        for iu in 0..n_u {
            for iz in 0..n_z {
                let (p, nrm) = wall(-2.5 + (iu as f64 + 0.5) * step, (iz as f64 + 0.5) * step);
                let v1 = [p[0] - tx[0], p[1] - tx[1], p[2] - tx[2]];
                let v2 = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
                let d1 = (v1[0] * v1[0] + v1[1] * v1[1] + v1[2] * v1[2]).sqrt();
                let d2 = (v2[0] * v2[0] + v2[1] * v2[1] + v2[2] * v2[2]).sqrt();
                let cos_phi = -v1[2] / d1;
                let cos_alpha = -(v1[0] * nrm[0] + v1[1] * nrm[1]) / d1;
                let cos_beta = (v2[0] * nrm[0] + v2[1] * nrm[1]) / d2;
                let cos_psi = -v2[2] / d2;
                if cos_phi <= 0.0 || cos_alpha <= 0.0 || cos_beta <= 0.0 || cos_psi <= 0.0 {
                    continue;
                }
                if cos_psi.acos() > fov {
                    continue;
                }
                total += (m + 1.0) * area / (2.0 * PI * PI * d1 * d1 * d2 * d2)
                    * 0.7
                    * step
                    * step
                    * cos_phi.powf(m)
                    * cos_alpha
                    * cos_beta
                    * tf
                    * conc
                    * cos_psi;
            }
        }
    }
    total
}

#[test]
fn reflected_power_matches_surface_integral() {
    // Below the LED the walls it lights lie outside the receiver FOV.
    let centre = RoomGeometry::default();
    assert!(centre.reflected_paths().is_empty());
    assert_eq!(integrate_walls([0.0, 0.0], 0.02), 0.0);
    for rx in [[1.5, 1.5], [-1.6, 0.7], [2.0, -0.3]] {
        let g = RoomGeometry { rx_xy: rx, ..Default::default() };
        // Same grid: the two implementations agree to rounding.
        for step in [0.1, 0.02] {
            let fine = RoomGeometry { patch_size: step, ..g.clone() };
            let model: f64 = fine.reflected_paths().iter().map(|p| p.gain).sum();
            let oracle = integrate_walls(rx, step);
            assert!(model > 0.0);
            assert!((model / oracle - 1.0).abs() < 1e-9, "rx {rx:?}: model {model:e} vs oracle {oracle:e}");
        }
        // The default patches stay within a third of the converged integral.
        let coarse: f64 = g.reflected_paths().iter().map(|p| p.gain).sum();
        let converged = integrate_walls(rx, 0.005);
        assert!((coarse / converged - 1.0).abs() < 0.35, "rx {rx:?}: {coarse:e} vs {converged:e}");
    }
}

#[test]
fn binning_loses_no_power() {
    for rx in [[0.0, 0.0], [1.5, 1.5], [0.9, -1.2]] {
        let g = RoomGeometry { rx_xy: rx, ..Default::default() };
        let taps = bin_paths(&g);
        let collected = g.direct_path().gain + g.reflected_paths().iter().map(|p| p.gain).sum::<f64>();
        let total: f64 = taps.iter().sum();
        assert!(taps.iter().all(|&t| t >= 0.0));
        assert!((total / (collected * g.tx_power) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn jittered_realizations_differ_and_fit_the_prefix() {
    let g = RoomGeometry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for kind in [ChannelKind::Dlos, ChannelKind::Ndlos] {
        let a = realize_channel(&g, kind, 16, &mut rng).unwrap();
        let b = realize_channel(&g, kind, 16, &mut rng).unwrap();
        assert_ne!(a.taps, b.taps);
        assert!(a.taps.len() <= 17 && a.taps.iter().all(|t| t.is_finite()));
        let delay_spread = (a.taps.len() - 1) as f64 * g.symbol_period;
        assert!(delay_spread <= 30e-9);
    }
}

#[test]
fn wander_rms_tracks_signal_std() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let span = 272 * 8;
    let x: Vec<f64> = (0..45 * span)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            0.2 * z
        })
        .collect();
    let w = WanderConfig { rms: std_dev(&x), ..Default::default() };
    let y = apply_wander(&x, &w, span);
    let added: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
    let rms = (added.iter().map(|v| v * v).sum::<f64>() / added.len() as f64).sqrt();
    assert!((rms / std_dev(&x) - 1.0).abs() < 0.01);
}
