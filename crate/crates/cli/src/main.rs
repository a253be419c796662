//! `ucp`: precoder synthesis and the PAPR, wander, BER and clip-sweep experiments.

mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ucp_ofdm::channel::ChannelKind;
use ucp_ofdm::experiments::{run_ber, run_clip_sweep, run_papr, run_wander};
use ucp_ofdm::link::{ber_crossing_db, horizontal_gap_db, LinkReport, SchemeSummary, CSV_COLUMNS, CSV_VERSION};
use ucp_ofdm::precoder::cache;
use ucp_ofdm::precoder::{Precoder, SpectralMask};
use ucp_ofdm::waveforms::Scheme;
use ucp_ofdm::Error;

use crate::config::ExperimentConfig;
use crate::output::{echo, gnuplot, Output};

/// Runs used by `--full`.
const FULL_RUNS: usize = 1000;
const TARGET_BER: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "ucp", version, about = "UCP-OFDM precoder synthesis and link experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the precoder for a mask and write it to the cache directory.
    Synthesize(SynthArgs),
    /// PAPR CCDF of the shaped signal of each scheme.
    Papr(Common),
    /// Baseline-wander experiment, BB against UCP-OFDM.
    Wander(Common),
    /// BER against noise power for each scheme and channel.
    Ber(Common),
    /// BER against target clip probability at a fixed noise power.
    ClipSweep(Common),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 0, conflicts_with = "mask_file")]
    n_middle: usize,
    #[arg(long, default_value_t = 0, conflicts_with = "mask_file")]
    n_edge: usize,
    /// File of N whitespace-separated 0/1 flags, bin -N/2 first.
    #[arg(long)]
    mask_file: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated schemes (ucp, dco, aco, u-ofdm, bb).
    #[arg(long, value_delimiter = ',', value_parser = parse_scheme)]
    scheme: Vec<Scheme>,
    /// Comma-separated channels (awgn, dlos, ndlos).
    #[arg(long, value_delimiter = ',', value_parser = parse_channel)]
    channel: Vec<ChannelKind>,
    /// Full-scale Monte Carlo (1000 runs) unless --runs is given.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for cached precoders.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Also write gnuplot scripts next to the CSV files.
    #[arg(long)]
    gnuplot: bool,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.link.seed = seed;
        }
        if self.full {
            cfg.link.runs = FULL_RUNS;
        }
        if let Some(runs) = self.runs {
            cfg.link.runs = runs;
            cfg.sweep.runs = runs;
        }
        if !self.scheme.is_empty() {
            cfg.link.schemes = self.scheme.clone();
            cfg.papr.schemes = self.scheme.clone();
        }
        if let Some(&ch) = self.channel.first() {
            cfg.link.channel = ch;
        }
        if let Some(t) = self.threads {
            cfg.link.threads = t;
        }
        cfg.link.validate()?;
        Ok(cfg)
    }

    fn precoder(&self, cfg: &ExperimentConfig) -> Result<Arc<Precoder>, Error> {
        let mask = SpectralMask::build(cfg.link.n, cfg.link.n_middle, cfg.link.n_edge)?;
        Ok(Arc::new(cache::load_or_synthesize(&mask, self.cache_dir.as_deref())?))
    }
}

fn read_mask_file(path: &Path) -> Result<SpectralMask, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let flags = text
        .split_whitespace()
        .map(|t| match t {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(Error::Config(format!("mask file entry '{other}' is not 0 or 1"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = flags.len();
    let half = n as i64 / 2;
    let active: Vec<i64> = flags.iter().enumerate().filter(|(_, &a)| a).map(|(p, _)| p as i64 - half).collect();
    SpectralMask::from_active_set(n, &active)
}

#[derive(Serialize)]
struct SynthSummary {
    n: usize,
    m: usize,
    z: usize,
    rank: usize,
    unitarity_residual: f64,
    realness_residual: f64,
    distance_from_identity: f64,
    fast_path_multiplies: u64,
    storage_reals: u64,
    cache_file: PathBuf,
}

fn synthesize(args: &SynthArgs) -> Result<(), Error> {
    let mask = match &args.mask_file {
        Some(p) => read_mask_file(p)?,
        None => SpectralMask::build(args.n, args.n_middle, args.n_edge)?,
    };
    let pre = Precoder::synthesize(&mask)?;
    fs::create_dir_all(&args.out)?;
    let path = args.out.join(cache::cache_file_name(&mask));
    cache::save(&pre, &path)?;
    let d = pre.diagnostics();
    let ops = pre.op_count();
    let summary = SynthSummary {
        n: mask.n_total(),
        m: mask.m_active(),
        z: mask.z_null(),
        rank: pre.rank(),
        unitarity_residual: d.unitarity,
        realness_residual: d.realness,
        distance_from_identity: d.distance_from_identity,
        fast_path_multiplies: ops.encode_macs,
        storage_reals: ops.storage_reals,
        cache_file: path,
    };
    println!("N = {}", summary.n);
    println!("M = {}", summary.m);
    println!("Z = {}", summary.z);
    println!("r = {}", summary.rank);
    println!("unitarity residual = {:e}", summary.unitarity_residual);
    println!("realness residual = {:e}", summary.realness_residual);
    println!("||P - I||_F = {:.6}", summary.distance_from_identity);
    println!("fast path multiplies = {}", summary.fast_path_multiplies);
    println!("storage reals = {}", summary.storage_reals);
    println!("cache = {}", summary.cache_file.display());
    Ok(())
}

fn papr(args: &Common) -> Result<Output, Error> {
    let cfg = args.resolve()?;
    let pre = cfg.papr.schemes.contains(&Scheme::Ucp).then(|| args.precoder(&cfg)).transpose()?;
    let report = run_papr(&cfg.link, &cfg.papr, pre)?;
    let mut out = Output::new(&args.out)?;
    let mut body = String::from("scheme,papr_db,ccdf\n");
    for c in &report.curves {
        for (x, p) in report.grid_db.iter().zip(&c.ccdf) {
            body.push_str(&format!("{},{},{:e}\n", c.scheme, x, p));
        }
    }
    let header = [("seed", cfg.link.seed.to_string()), ("link", echo(&cfg.link)), ("papr", echo(&cfg.papr))];
    out.csv("papr_ccdf.csv", "papr", &header, &body)?;
    #[derive(Serialize)]
    struct Row {
        scheme: Scheme,
        papr_at_1e3_db: f64,
        bias: f64,
        windows: usize,
    }
    let rows: Vec<Row> = report
        .curves
        .iter()
        .map(|c| Row { scheme: c.scheme, papr_at_1e3_db: c.papr_at_1e3_db, bias: c.bias, windows: c.values_db.len() })
        .collect();
    for r in &rows {
        println!("{:>7}  PAPR at CCDF 1e-3: {:.2} dB", r.scheme.name(), r.papr_at_1e3_db);
    }
    out.json("papr_summary.json", &serde_json::json!({ "config": cfg, "schemes": rows }))?;
    if args.gnuplot {
        let names: Vec<String> = report.curves.iter().map(|c| c.scheme.to_string()).collect();
        out.write("papr_ccdf.gp", &gnuplot("papr_ccdf.csv", &names, 2, 3, "PAPR (dB)", "CCDF", true))?;
    }
    Ok(out)
}

fn wander(args: &Common) -> Result<Output, Error> {
    let cfg = args.resolve()?;
    let report = run_wander(&cfg.link, &cfg.wander, Some(args.precoder(&cfg)?))?;
    let mut out = Output::new(&args.out)?;
    let header = [
        ("seed", cfg.link.seed.to_string()),
        ("pn_db", cfg.wander.pn_db.to_string()),
        ("link", echo(&cfg.link)),
        ("wander", echo(&cfg.wander)),
    ];
    let mut wave = String::from("scheme,sample,value\n");
    let mut cons = String::from("scheme,re,im\n");
    for t in &report.traces {
        for (i, v) in t.waveform.iter().enumerate() {
            wave.push_str(&format!("{},{},{}\n", t.scheme, i, v));
        }
        for z in &t.constellation {
            cons.push_str(&format!("{},{},{}\n", t.scheme, z.re, z.im));
        }
        println!(
            "{:>7}  EVM {:.2} dB, symbol errors {}, bit errors {}",
            t.scheme.name(),
            t.evm_db,
            t.symbol_errors,
            t.bit_errors
        );
    }
    out.csv("wander_waveform.csv", "wander-waveform", &header, &wave)?;
    out.csv("wander_constellation.csv", "wander-constellation", &header, &cons)?;
    #[derive(Serialize)]
    struct Row {
        scheme: Scheme,
        evm_db: f64,
        symbol_errors: usize,
        bit_errors: usize,
        wander_rms: f64,
    }
    let rows: Vec<Row> = report
        .traces
        .iter()
        .map(|t| Row {
            scheme: t.scheme,
            evm_db: t.evm_db,
            symbol_errors: t.symbol_errors,
            bit_errors: t.bit_errors,
            wander_rms: t.wander_rms,
        })
        .collect();
    out.json("wander_summary.json", &serde_json::json!({ "config": cfg, "schemes": rows }))?;
    Ok(out)
}

#[derive(Serialize)]
struct ChannelSummary {
    channel: ChannelKind,
    schemes: Vec<SchemeSummary>,
    /// Noise power at which each scheme reaches the target BER.
    crossings_db: Vec<(Scheme, Option<f64>)>,
    /// Margin of UCP-OFDM over each other scheme at the target BER.
    ucp_gap_db: Vec<(Scheme, Option<f64>)>,
}

fn channel_summary(r: &LinkReport) -> ChannelSummary {
    let schemes: Vec<Scheme> = r.schemes.iter().map(|s| s.scheme).collect();
    let has_ucp = schemes.contains(&Scheme::Ucp);
    ChannelSummary {
        channel: r.config.channel,
        schemes: r.schemes.clone(),
        crossings_db: schemes.iter().map(|&s| (s, ber_crossing_db(&r.curve(s), TARGET_BER))).collect(),
        ucp_gap_db: schemes
            .iter()
            .filter(|&&s| has_ucp && s != Scheme::Ucp)
            .map(|&s| (s, horizontal_gap_db(r, Scheme::Ucp, s, TARGET_BER)))
            .collect(),
    }
}

fn ber(args: &Common) -> Result<Output, Error> {
    let cfg = args.resolve()?;
    let channels = if args.channel.is_empty() { ChannelKind::ALL.to_vec() } else { args.channel.clone() };
    let pre = cfg.link.schemes.contains(&Scheme::Ucp).then(|| args.precoder(&cfg)).transpose()?;
    let reports = run_ber(&cfg.link, &channels, pre)?;
    let mut out = Output::new(&args.out)?;
    let mut body = String::from(CSV_COLUMNS);
    body.push('\n');
    for r in &reports {
        body.extend(r.csv_body().lines().skip(1).map(|l| format!("{l}\n")));
    }
    let header = [
        ("seed", cfg.link.seed.to_string()),
        ("runs", cfg.link.runs.to_string()),
        ("channels", channels.iter().map(|c| c.name()).collect::<Vec<_>>().join(",")),
        ("link", echo(&cfg.link)),
    ];
    out.csv("ber.csv", "ber", &header, &body)?;
    let summaries: Vec<ChannelSummary> = reports.iter().map(channel_summary).collect();
    for s in &summaries {
        for (scheme, x) in &s.crossings_db {
            match x {
                Some(x) => println!("{:>6} {:>7}  BER 1e-3 at P_N = {x:.2} dB", s.channel.name(), scheme.name()),
                None => println!("{:>6} {:>7}  BER 1e-3 not reached", s.channel.name(), scheme.name()),
            }
        }
    }
    out.json(
        "ber_summary.json",
        &serde_json::json!({ "csv_version": CSV_VERSION, "target_ber": TARGET_BER, "config": cfg, "channels": summaries }),
    )?;
    if args.gnuplot {
        let names: Vec<String> = cfg.link.schemes.iter().map(|s| s.to_string()).collect();
        out.write("ber.gp", &gnuplot("ber.csv", &names, 3, 4, "P_N (dB)", "BER", true))?;
    }
    Ok(out)
}

fn clip_sweep(args: &Common) -> Result<Output, Error> {
    let cfg = args.resolve()?;
    let pre = cfg.link.schemes.contains(&Scheme::Ucp).then(|| args.precoder(&cfg)).transpose()?;
    let report = run_clip_sweep(&cfg.link, &cfg.sweep, pre)?;
    let mut out = Output::new(&args.out)?;
    let mut body = String::from("scheme,target,achieved,ber,bits\n");
    for c in &report.curves {
        for p in &c.points {
            body.push_str(&format!("{},{:e},{:e},{:e},{}\n", c.scheme, p.target, p.achieved, p.ber, p.bits));
        }
        println!("{:>7}  best clip target {:.3e} (BER {:.3e})", c.scheme.name(), c.best.target, c.best.ber);
    }
    let header = [
        ("seed", cfg.link.seed.to_string()),
        ("pn_db", report.pn_db.to_string()),
        ("link", echo(&cfg.link)),
        ("sweep", echo(&cfg.sweep)),
    ];
    out.csv("clip_sweep.csv", "clip-sweep", &header, &body)?;
    out.json("clip_sweep_summary.json", &serde_json::json!({ "config": cfg, "report": report }))?;
    Ok(out)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let out = match &cli.command {
        Command::Synthesize(a) => return synthesize(a),
        Command::Papr(a) => papr(a)?,
        Command::Wander(a) => wander(a)?,
        Command::Ber(a) => ber(a)?,
        Command::ClipSweep(a) => clip_sweep(a)?,
    };
    for p in out.written() {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
