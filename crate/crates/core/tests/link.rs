use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ucp_ofdm::channel::{convolve, ChannelKind};
use ucp_ofdm::frontend::Shaper;
use ucp_ofdm::link::{
    ber_crossing_db, receive, run_campaign, transmit, Campaign, ClipTargets, LinkConfig, SchemeSetup,
};
use ucp_ofdm::precoder::{Precoder, SpectralMask};
use ucp_ofdm::waveforms::Scheme;

fn precoder() -> Arc<Precoder> {
    Arc::new(Precoder::synthesize(&SpectralMask::build(256, 0, 0).unwrap()).unwrap())
}

fn all_schemes() -> LinkConfig {
    LinkConfig { schemes: Scheme::ALL.to_vec(), ..LinkConfig::default() }
}

#[test]
fn unclipped_noiseless_packets_are_error_free() {
    let cfg = all_schemes();
    let mask = SpectralMask::build(256, 0, 0).unwrap();
    let shaper = Shaper::new(cfg.shaping).unwrap();
    let pre = precoder();
    for &s in &cfg.schemes {
        let mut setup = SchemeSetup::new(s, &cfg, &mask, Some(pre.clone()), &shaper).unwrap();
        // Far below the clipping level.
        setup.gain = 0.01;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tx = transmit(&setup, &shaper, &cfg.frontend, 4, &mut rng).unwrap();
        assert_eq!(tx.clipped, 0, "{s}");
        for taps in [vec![1.0], vec![3e-3, 0.0, 1e-3]] {
            let rx = convolve(&tx.ac(), &taps, 8);
            let stats = receive(&setup, &shaper, &rx, &tx).unwrap();
            assert_eq!(stats.errors, 0, "{s} over {taps:?}");
            assert_eq!(stats.bits, 4 * setup.modem.bits_per_block() as u64);
            assert!(stats.error_energy / stats.symbol_energy < 1e-4, "{s}");
        }
    }
}

#[test]
fn single_noiseless_run_has_no_errors() {
    let mut targets = ClipTargets::default();
    for s in Scheme::ALL {
        targets.set(s, 1e-6);
    }
    let cfg = LinkConfig { runs: 1, pn_db: vec![-300.0], clip_targets: targets, ..all_schemes() };
    let report = run_campaign(&cfg).unwrap();
    assert_eq!(report.rows.len(), 5);
    for r in &report.rows {
        assert_eq!(r.errors, 0, "{}", r.scheme);
        assert_eq!(r.ber, 0.0);
    }
}

#[test]
fn same_seed_gives_identical_reports_across_thread_counts() {
    let base = LinkConfig { runs: 3, pn_db: vec![-26.0, -22.0], channel: ChannelKind::Dlos, ..LinkConfig::default() };
    let pre = precoder();
    let one = Campaign::prepare(&LinkConfig { threads: 1, ..base.clone() }, Some(pre.clone())).unwrap().run().unwrap();
    let again = Campaign::prepare(&LinkConfig { threads: 1, ..base.clone() }, Some(pre.clone())).unwrap().run().unwrap();
    let many = Campaign::prepare(&LinkConfig { threads: 3, ..base.clone() }, Some(pre)).unwrap().run().unwrap();
    assert_eq!(one.rows, again.rows);
    assert_eq!(one.rows, many.rows);
    assert_eq!(one.csv_body(), many.csv_body());
}

#[test]
fn schemes_share_the_channel_of_a_run() {
    let cfg = LinkConfig { channel: ChannelKind::Ndlos, ..LinkConfig::default() };
    let campaign = Campaign::prepare(&cfg, Some(precoder())).unwrap();
    assert_eq!(campaign.channel(4).unwrap().taps, campaign.channel(4).unwrap().taps);
    assert_ne!(campaign.channel(4).unwrap().taps, campaign.channel(5).unwrap().taps);
}

#[test]
fn ucp_beats_dco_near_minus_20_db() {
    let cfg = LinkConfig { runs: 4, pn_db: vec![-23.0, -21.0], schemes: vec![Scheme::Ucp, Scheme::Dco], ..LinkConfig::default() };
    let report = Campaign::prepare(&cfg, Some(precoder())).unwrap().run().unwrap();
    for pn in [-23.0, -21.0] {
        let ber = |s| report.rows.iter().find(|r| r.scheme == s && r.pn_db == pn).unwrap().ber;
        assert!(ber(Scheme::Ucp) <= ber(Scheme::Dco), "at {pn} dB");
    }
}

#[test]
fn ber_grows_with_noise() {
    let cfg = LinkConfig { runs: 2, pn_db: vec![-30.0, -25.0, -20.0, -15.0], schemes: vec![Scheme::Ucp], ..LinkConfig::default() };
    let report = Campaign::prepare(&cfg, Some(precoder())).unwrap().run().unwrap();
    let curve = report.curve(Scheme::Ucp);
    assert!(curve.windows(2).all(|w| w[1].1 >= w[0].1), "{curve:?}");
    let x = ber_crossing_db(&curve, 1e-3).unwrap();
    assert!(x > -30.0 && x < -15.0);
}

#[test]
fn receive_ops_follow_the_counting_rules() {
    let cfg = LinkConfig { runs: 1, pn_db: vec![-30.0], schemes: vec![Scheme::Ucp, Scheme::Dco], ..LinkConfig::default() };
    let report = Campaign::prepare(&cfg, Some(precoder())).unwrap().run().unwrap();
    let (n, z, m) = (256u64, 2u64, 254u64);
    let ucp = report.summary(Scheme::Ucp).unwrap().rx_ops_per_block;
    assert_eq!(ucp.fft, 2 * n * 8);
    assert_eq!(ucp.equalizer, 2 * m);
    assert_eq!(ucp.decode_macs, 4 * n * z);
    assert_eq!(ucp.total_multiplies(), 2 * n * 8 + 4 * n * z + 2 * m);
    let dco = report.summary(Scheme::Dco).unwrap().rx_ops_per_block;
    assert_eq!(dco.fft, n * 8);
    assert_eq!(dco.decode_macs, 0);
}

#[test]
fn achieved_clipping_tracks_the_target() {
    let cfg = LinkConfig { runs: 2, pn_db: vec![-30.0], ..LinkConfig::default() };
    let report = Campaign::prepare(&cfg, Some(precoder())).unwrap().run().unwrap();
    for s in &report.schemes {
        let ratio = s.achieved_clip_prob / s.clip_target;
        assert!((0.5..2.0).contains(&ratio), "{}: {} vs {}", s.scheme, s.achieved_clip_prob, s.clip_target);
    }
}

#[test]
fn invalid_configs_are_config_errors() {
    let bad = [
        LinkConfig { schemes: vec![], ..LinkConfig::default() },
        LinkConfig { runs: 0, ..LinkConfig::default() },
        LinkConfig { pn_db: vec![f64::NAN], ..LinkConfig::default() },
        LinkConfig { cp: 1, channel: ChannelKind::Ndlos, ..LinkConfig::default() },
    ];
    for cfg in bad {
        let err = Campaign::prepare(&cfg, None).and_then(|c| c.run()).unwrap_err();
        assert!(err.is_config(), "{err}");
    }
}
