//! Invariants of synthesised precoders, checked against dense oracles.

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ucp_ofdm::numerics::{
    centered_to_natural, project_unitary, ComplexMatrix, Direction, UnitaryFft,
};
use ucp_ofdm::precoder::{masked_conj_dft, pattern_matrix, Precoder, SpectralMask};

fn cached(slot: &'static OnceLock<Precoder>, n: usize, nm: usize, ne: usize) -> &'static Precoder {
    slot.get_or_init(|| Precoder::synthesize(&SpectralMask::build(n, nm, ne).unwrap()).unwrap())
}

fn fig3() -> &'static Precoder {
    static P: OnceLock<Precoder> = OnceLock::new();
    cached(&P, 32, 2, 3)
}

fn wifi() -> &'static Precoder {
    static P: OnceLock<Precoder> = OnceLock::new();
    cached(&P, 64, 0, 5)
}

fn z2() -> &'static Precoder {
    static P: OnceLock<Precoder> = OnceLock::new();
    cached(&P, 256, 0, 0)
}

fn n16() -> &'static Precoder {
    static P: OnceLock<Precoder> = OnceLock::new();
    cached(&P, 16, 1, 1)
}

fn all() -> [&'static Precoder; 4] {
    [n16(), fig3(), wifi(), z2()]
}

/// Active input positions in the documented order, used to build patterned vectors.
fn patterned(mask: &SpectralMask, values: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; mask.n_total()];
    let active: Vec<usize> = (0..mask.n_total()).filter(|&p| mask.position_active(p)).collect();
    for (&p, &v) in active.iter().zip(values) {
        x[p] = v;
    }
    x
}

#[test]
fn synthesis_invariants_hold_for_every_mask() {
    for pre in all() {
        let mask = pre.mask();
        let d = pre.diagnostics();
        assert!(d.unitarity < 1e-10, "N={}: unitarity {:e}", mask.n_total(), d.unitarity);
        assert!(d.orthogonality < 1e-10, "N={}: orthogonality {:e}", mask.n_total(), d.orthogonality);
        assert!(d.realness < 1e-10, "N={}: realness {:e}", mask.n_total(), d.realness);
        assert_eq!(pre.rank(), 2 * mask.z_null(), "N={}: rank of E", mask.n_total());
        // ‖P - I‖_F² equals the sum of squared singular values of E.
        let s2: f64 = pre.sigma_r().iter().map(|s| s * s).sum();
        assert!((d.distance_from_identity.powi(2) - s2).abs() < 1e-9);
    }
}

#[test]
fn pattern_zeros_are_exact() {
    for pre in all() {
        let pm = pattern_matrix(pre.mask());
        let n = pre.n();
        for i in 0..n {
            for j in 0..n {
                if pm[(i, j)] == 0.0 {
                    assert_eq!(pre.w()[(i, j)], Complex64::new(0.0, 0.0), "W({i},{j}) must be exactly zero");
                }
            }
        }
    }
}

#[test]
fn rows_are_hermitian_mirrors() {
    for pre in all() {
        let n = pre.n();
        let half = n as i64 / 2;
        for k in 1..half {
            let (a, b) = ((k + half) as usize, (half - k) as usize);
            for q in 0..n {
                let diff = (pre.w()[(a, q)] - pre.w()[(b, q)].conj()).norm();
                assert!(diff < 1e-10, "N={n}: W[{k}, {q}] is not the conjugate of W[-{k}, {q}]");
            }
        }
    }
}

#[test]
fn z2_distance_and_spectrum_of_e() {
    let pre = z2();
    let d = pre.diagnostics().distance_from_identity;
    assert!((d - 7.5f64.sqrt()).abs() < 1e-9, "‖P - I‖_F = {d}");
    assert_eq!(pre.p().det_sign().unwrap(), 1);
}

#[test]
fn synthesized_w_beats_random_patterned_unitaries() {
    for (pre, trials) in [(fig3(), 1000), (n16(), 1000), (wifi(), 100)] {
        let mask = pre.mask();
        let a = masked_conj_dft(mask);
        let pm = pattern_matrix(mask).to_complex();
        let best = pre.w().sub(&a).unwrap().frobenius_norm();
        let n = mask.n_total();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for t in 0..trials {
            let scale = [0.05, 0.3, 1.0][t % 3];
            let x = ComplexMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * scale
            });
            let q = project_unitary(&a.add(&x.hadamard(&pm).unwrap()).unwrap()).unwrap();
            let dist = q.sub(&a).unwrap().frobenius_norm();
            assert!(best <= dist + 1e-9, "N={n} trial {t}: random patterned unitary is closer ({dist} < {best})");
        }
    }
}

#[test]
fn transpose_preserves_white_noise_covariance() {
    let pre = fig3();
    let n = pre.n();
    let draws = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cov = vec![0.0; n * n];
    for _ in 0..draws {
        let w: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y = pre.decode_fast(&w).unwrap();
        for i in 0..n {
            for j in i..n {
                cov[i * n + j] += y[i] * y[j];
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let c = cov[i * n + j] / draws as f64;
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((c - target).abs());
        }
    }
    assert!(worst < 0.05, "covariance deviates by {worst}");
}

#[test]
fn patterned_input_gives_patterned_output() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for pre in all() {
        let mask = pre.mask();
        let n = mask.n_total();
        let vals: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let x: Vec<Complex64> =
            (0..n).map(|p| if mask.position_active(p) { vals[p] } else { Complex64::new(0.0, 0.0) }).collect();
        let y = pre.w().mul_vec(&x).unwrap();
        for p in (0..n).filter(|&p| !mask.position_active(p)) {
            assert!(y[p].norm() < 1e-12, "N={n}: output position {p} leaked {:e}", y[p].norm());
        }
    }
}

#[test]
fn encoded_spectrum_is_null_at_null_bins() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for pre in all() {
        let mask = pre.mask();
        let fft = UnitaryFft::new(mask.n_total()).unwrap();
        let vals: Vec<f64> = (0..mask.m_active()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = pre.encode_fast(&patterned(mask, &vals)).unwrap();
        let spec = fft.forward_real(&s).unwrap();
        for k in mask.null_set() {
            let v = spec[centered_to_natural(k, mask.n_total())].norm();
            assert!(v < 1e-9, "N={}: bin {k} carries {v:e}", mask.n_total());
        }
    }
}

#[test]
fn op_counts_for_z2() {
    let c = z2().op_count();
    assert_eq!(c.encode_macs, 4 * 256 * 2);
    assert_eq!(c.per_pass_macs, 4 * 256);
    assert_eq!(c.storage_reals, 8 * 256);
}

#[test]
fn dense_p_equals_f_times_w() {
    let pre = fig3();
    let n = pre.n();
    let f = ComplexMatrix::from_fn(n, n, |t, p| {
        let k = p as f64 - (n / 2) as f64;
        Complex64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * std::f64::consts::PI * k * t as f64 / n as f64)
    });
    let fw = f.matmul(pre.w()).unwrap();
    assert!(fw.max_imag() < 1e-10);
    assert!(fw.re().sub(pre.p()).unwrap().max_abs() < 1e-12);
    // The same column through the FFT path.
    let fft = UnitaryFft::new(n).unwrap();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for p in 0..n {
        buf[centered_to_natural(p as i64 - n as i64 / 2, n)] = pre.w()[(p, 3)];
    }
    fft.process(&mut buf, Direction::Inverse).unwrap();
    for t in 0..n {
        assert!((buf[t].re - pre.p()[(t, 3)]).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_path_round_trip(seed in any::<u64>(), which in 0usize..4) {
        let pre = all()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..pre.n()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y = pre.encode_fast(&x).unwrap();
        let dense = pre.encode_dense(&x).unwrap();
        for (a, b) in y.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let back = pre.decode_fast(&y).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let dense_t = pre.decode_dense(&x).unwrap();
        let fast_t = pre.decode_fast(&x).unwrap();
        for (a, b) in dense_t.iter().zip(&fast_t) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn fft_round_trip_and_norm(log_n in 3u32..=10, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let fft = UnitaryFft::new(n).unwrap();
        let mut y = x.clone();
        fft.process(&mut y, Direction::Inverse).unwrap();
        let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let ny: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!(((nx - ny) / nx).abs() < 1e-12);
        fft.process(&mut y, Direction::Forward).unwrap();
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}
