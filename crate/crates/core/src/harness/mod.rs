//! Memory experiments: configuration, Monte Carlo loops, statistics and CSV
//! output.
//!
//! Every shot draws from its own ChaCha8 stream keyed by (seed, instance,
//! layer count, rate) and the shot counter, so results do not depend on how
//! shots are spread over worker threads.

mod config;
mod stats;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::code::{build_code, CodeError, CssCode};
use crate::decoder::{DecodeError, Decoder};
use crate::foliation::{foliate, ClusterState, ResourceCounts};
use crate::homology::Distance;
use crate::lattice::LatticeError;
use crate::pauli_sim::{FaultCatalog, MeasurementNoise, Sampler, SimError};
use crate::PauliType;

pub use config::{default_rates, parse_channel, ConfigError, ExperimentConfig, LatticeSpec};
pub use stats::{
    curves_from_records, estimate_threshold, pair_crossing, wilson_interval, Curve, PairCrossing,
    ThresholdError, ThresholdEstimate,
};

/// CSV columns, in order.
pub const CSV_COLUMNS: [&str; 15] = [
    "instance", "n", "k", "d_Z", "d_X", "layers", "channel", "p", "shots", "failures", "rate",
    "ci_low", "ci_high", "seed", "n_f_audit",
];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("code construction: {0}")]
    Code(#[from] CodeError),
    #[error("audit: {0}")]
    Audit(String),
    #[error("fault enumeration: {0}")]
    Sim(#[from] SimError),
    #[error("decode: {0}")]
    Decode(#[from] DecodeError),
    #[error("output: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// 1 config or I/O, 2 invariant (including an invalid lattice) or
    /// audit, 3 decode.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(ConfigError::Lattice {
                source: LatticeError::Invariant { .. },
                ..
            }) => 2,
            Self::Config(_) | Self::Io(_) | Self::Csv(_) => 1,
            Self::Code(_) | Self::Audit(_) | Self::Sim(_) => 2,
            Self::Decode(_) => 3,
        }
    }
}

/// One (instance, layers, channel, rate) point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub instance: String,
    pub n: usize,
    pub k: usize,
    pub d_z: Distance,
    pub d_x: Distance,
    pub layers: usize,
    pub channel: PauliType,
    pub p: f64,
    pub shots: u64,
    /// Shots where any logical flipped.
    pub failures: u64,
    /// Failures per opposite logical.
    pub logical_failures: Vec<u64>,
    pub seed: u64,
    pub n_f_audit: u64,
    pub wall_time: Duration,
}

impl ExperimentRecord {
    pub fn rate(&self) -> f64 {
        self.failures as f64 / self.shots as f64
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.failures, self.shots)
    }

    pub fn csv_row(&self) -> [String; 15] {
        let (lo, hi) = self.interval();
        [
            self.instance.clone(),
            self.n.to_string(),
            self.k.to_string(),
            self.d_z.to_string(),
            self.d_x.to_string(),
            self.layers.to_string(),
            self.channel.to_string(),
            self.p.to_string(),
            self.shots.to_string(),
            self.failures.to_string(),
            self.rate().to_string(),
            lo.to_string(),
            hi.to_string(),
            self.seed.to_string(),
            self.n_f_audit.to_string(),
        ]
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// RNG key of one point.
pub fn point_key(seed: u64, instance: usize, layers: usize, rate: usize) -> u64 {
    let mut k = splitmix64(seed);
    for part in [instance, layers, rate] {
        k = splitmix64(k ^ part as u64);
    }
    k
}

/// The RNG of shot `shot` at a point.
pub fn shot_rng(key: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(shot);
    rng
}

/// Checks the built cluster against the closed-form counts.
pub fn audit(state: &ClusterState, catalog: &FaultCatalog) -> Result<ResourceCounts, HarnessError> {
    let lat = state.lattice();
    let expected = ResourceCounts::from_formulas(lat.p(), lat.q(), lat.num_edges(), state.z())
        .map_err(|e| HarnessError::Audit(e.to_string()))?;
    let built = state.counts();
    if built != expected || catalog.locations() != expected.fault_locations {
        return Err(HarnessError::Audit(format!(
            "{}: built cz {} qubits {} locations {}, expected {expected:?}",
            lat.display_name(),
            built.cz,
            built.qubits,
            catalog.locations()
        )));
    }
    Ok(expected)
}

#[derive(Debug, Clone, Default)]
struct Tally {
    failures: Vec<u64>,
    flags: Vec<Vec<u64>>,
}

impl Tally {
    fn empty(channels: usize, k: usize) -> Self {
        Self {
            failures: vec![0; channels],
            flags: vec![vec![0; k]; channels],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.failures.iter_mut().zip(&other.failures) {
            *a += b;
        }
        for (fa, fb) in self.flags.iter_mut().zip(&other.flags) {
            for (a, b) in fa.iter_mut().zip(fb) {
                *a += b;
            }
        }
        self
    }
}

/// A prepared (instance, layers) pair, reused across rates.
pub struct PreparedInstance {
    pub state: ClusterState,
    pub catalog: FaultCatalog,
    pub counts: ResourceCounts,
}

impl PreparedInstance {
    pub fn new(code: &CssCode, layers: usize, noise: MeasurementNoise) -> Result<Self, HarnessError> {
        let state = foliate(code, layers / 2);
        let catalog = FaultCatalog::build(&state, noise)?;
        let counts = audit(&state, &catalog)?;
        Ok(Self {
            state,
            catalog,
            counts,
        })
    }

    /// Runs `shots` shots at rate `p`; returns per-channel failures and
    /// per-logical flag counts.
    pub fn simulate(
        &self,
        p: f64,
        channels: &[PauliType],
        shots: u64,
        key: u64,
    ) -> Result<(Vec<u64>, Vec<Vec<u64>>), HarnessError> {
        let dem = self.catalog.dem(p)?;
        let decoders: Vec<Decoder> = channels
            .iter()
            .map(|&ch| Decoder::new(&self.state, &dem, ch))
            .collect::<Result<_, _>>()?;
        let sampler = Sampler::new(&self.state, self.catalog.noise());
        let k = self.state.code().k();
        let tally = (0..shots)
            .into_par_iter()
            .map(|shot| -> Result<Tally, DecodeError> {
                let mut rng = shot_rng(key, shot);
                let outcome = sampler.sample(p, &mut rng);
                let mut t = Tally::empty(channels.len(), k);
                for (i, dec) in decoders.iter().enumerate() {
                    let v = dec.run(&outcome)?;
                    t.failures[i] += v.failed as u64;
                    for (c, f) in t.flags[i].iter_mut().zip(&v.flags) {
                        *c += *f as u64;
                    }
                }
                Ok(t)
            })
            .try_reduce(|| Tally::empty(channels.len(), k), |a, b| Ok(a.merge(b)))?;
        Ok((tally.failures, tally.flags))
    }
}

/// Runs the experiment, handing each record to `sink` as soon as its point
/// finishes. Order: instance, layers, rate, channel as listed in the config.
pub fn run_memory_with<F>(cfg: &ExperimentConfig, mut sink: F) -> Result<Vec<ExperimentRecord>, HarnessError>
where
    F: FnMut(&ExperimentRecord) -> Result<(), HarnessError>,
{
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Io(io::Error::other(e)))?;
    let mut out = Vec::new();
    for (ii, spec) in cfg.lattices.iter().enumerate() {
        let lattice = spec.load()?;
        let code = build_code(&lattice)?;
        for (li, &layers) in cfg.layers.iter().enumerate() {
            let prepared = pool.install(|| PreparedInstance::new(&code, layers, cfg.noise))?;
            for (ri, &p) in cfg.rates.iter().enumerate() {
                let start = Instant::now();
                let key = point_key(cfg.seed, ii, li, ri);
                let (failures, flags) =
                    pool.install(|| prepared.simulate(p, &cfg.channels, cfg.shots, key))?;
                let wall_time = start.elapsed();
                for (ci, &channel) in cfg.channels.iter().enumerate() {
                    let rec = ExperimentRecord {
                        instance: lattice.display_name(),
                        n: code.n(),
                        k: code.k(),
                        d_z: code.d_z(),
                        d_x: code.d_x(),
                        layers,
                        channel,
                        p,
                        shots: cfg.shots,
                        failures: failures[ci],
                        logical_failures: flags[ci].clone(),
                        seed: cfg.seed,
                        n_f_audit: prepared.counts.fault_locations,
                        wall_time,
                    };
                    sink(&rec)?;
                    out.push(rec);
                }
            }
        }
    }
    Ok(out)
}

pub fn run_memory(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, HarnessError> {
    run_memory_with(cfg, |_| Ok(()))
}

/// Path of the metadata sidecar for a CSV path.
pub fn meta_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn write_meta<W: Write>(mut w: W, cfg: &ExperimentConfig, records: &[ExperimentRecord]) -> io::Result<()> {
    writeln!(w, "# run metadata")?;
    writeln!(w, "version {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "seed {}", cfg.seed)?;
    writeln!(w, "shots {}", cfg.shots)?;
    let noise = match cfg.noise {
        MeasurementNoise::OutcomeFlip => "outcome-flip",
        MeasurementNoise::PauliX => "pauli-x",
    };
    writeln!(w, "noise {noise}")?;
    writeln!(w, "failure any-logical")?;
    for r in records {
        write!(
            w,
            "point {} layers {} channel {} p {} failures {} logical",
            r.instance, r.layers, r.channel, r.p, r.failures
        )?;
        for c in &r.logical_failures {
            write!(w, " {c}")?;
        }
        writeln!(w, " wall_ms {}", r.wall_time.as_millis())?;
    }
    Ok(())
}

/// Runs the experiment writing CSV rows to `csv_path` as they complete and
/// the metadata sidecar at the end. Rows already written stay on disk if a
/// later point fails.
pub fn run_to_csv(cfg: &ExperimentConfig, csv_path: &Path) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let mut writer = csv::Writer::from_writer(File::create(csv_path)?);
    writer.write_record(CSV_COLUMNS)?;
    writer.flush()?;
    let records = run_memory_with(cfg, |rec| {
        writer.write_record(rec.csv_row())?;
        writer.flush()?;
        Ok(())
    })?;
    drop(writer);
    write_meta(File::create(meta_path(csv_path))?, cfg, &records)?;
    Ok(records)
}

/// Reads harness CSV rows back into curves for one channel (and, if given,
/// one layer count).
pub fn curves_from_csv<R: io::Read>(
    reader: R,
    channel: PauliType,
    layers: Option<usize>,
) -> Result<Vec<Curve>, HarnessError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(HarnessError::Io(io::Error::new(
            io::ErrorKind::InvalidData,
            "unexpected CSV columns",
        )));
    }
    let bad = |what: &str| HarnessError::Io(io::Error::new(io::ErrorKind::InvalidData, format!("bad {what}")));
    let mut by_name: std::collections::BTreeMap<(usize, String), Vec<(f64, f64)>> = Default::default();
    for row in rdr.records() {
        let row = row?;
        let ch = parse_channel(&row[6]).map_err(|_| bad("channel"))?;
        let l: usize = row[5].parse().map_err(|_| bad("layers"))?;
        if ch != channel || layers.is_some_and(|x| x != l) {
            continue;
        }
        let n: usize = row[1].parse().map_err(|_| bad("n"))?;
        let p: f64 = row[7].parse().map_err(|_| bad("p"))?;
        let rate: f64 = row[10].parse().map_err(|_| bad("rate"))?;
        by_name.entry((n, row[0].to_string())).or_default().push((p, rate));
    }
    Ok(by_name
        .into_iter()
        .map(|((size, name), mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Curve { name, size, points }
        })
        .collect())
}
