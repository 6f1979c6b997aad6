use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hypercluster::code::build_code;
use hypercluster::decoder::Decoder;
use hypercluster::foliation::{export_manifest, foliate, ClusterState};
use hypercluster::gf2::BitChain;
use hypercluster::harness::{
    curves_from_csv, estimate_threshold, parse_channel, point_key, run_to_csv, shot_rng, ExperimentConfig,
    HarnessError, LatticeSpec,
};
use hypercluster::lattice::{generate_torus, parse_lattice, validate, write_lattice, Lattice};
use hypercluster::pauli_sim::{parse_dem, write_dem, FaultCatalog, MeasurementNoise, Sampler};
use hypercluster::PauliType;

#[derive(Parser)]
#[command(name = "hypercluster", version, about = "Foliated cluster-state memory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Noise {
    OutcomeFlip,
    PauliX,
}

impl From<Noise> for MeasurementNoise {
    fn from(n: Noise) -> Self {
        match n {
            Noise::OutcomeFlip => MeasurementNoise::OutcomeFlip,
            Noise::PauliX => MeasurementNoise::PauliX,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the combinatorial invariants of a lattice file.
    ValidateLattice { lattice: String },
    /// Build the CSS code and print [[n, k, d_Z, d_X]] and the rate.
    BuildCode {
        lattice: String,
        /// Write stabilizers and logicals here.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Write the cluster-state manifest (qubits, CZ schedule, detectors).
    ExportCluster {
        lattice: String,
        /// Number of layers 2z.
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate single faults and write the detector error model at rate p.
    EnumerateFaults {
        lattice: String,
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "outcome-flip")]
        noise: Noise,
    },
    /// Sample shots and write them in the text format `decode` reads.
    SampleShots {
        lattice: String,
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "outcome-flip")]
        noise: Noise,
    },
    /// Decode shots against a detector error model.
    Decode {
        #[arg(long)]
        dem: PathBuf,
        #[arg(long)]
        shots: PathBuf,
    },
    /// Run a memory experiment from a config file and write CSV.
    RunMemory {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `workers` from the config.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Pairwise threshold crossings from a results CSV.
    Threshold {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "Z")]
        channel: String,
        #[arg(long)]
        layers: Option<usize>,
    },
    /// Write an L×L square torus lattice file.
    GenTorus {
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(spec: &str) -> Result<Lattice> {
    let spec = LatticeSpec::parse(spec).map_err(|e| anyhow!(e))?;
    Ok(spec.load()?)
}

fn cluster(spec: &str, layers: usize) -> Result<ClusterState> {
    if layers < 2 || !layers.is_multiple_of(2) {
        bail!("--layers must be an even number >= 2");
    }
    let code = build_code(&load(spec)?)?;
    Ok(foliate(&code, layers / 2))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_rate(p: f64) -> Result<()> {
    if !(0.0..0.5).contains(&p) {
        bail!("rate {p} is outside [0, 0.5)");
    }
    Ok(())
}

/// One shot line: `shot <i> <channel> defects <ids...> actual <slots...>`.
fn shot_line(i: u64, channel: PauliType, defects: &[usize], actual: &BitChain) -> String {
    let mut s = format!("shot {i} {channel} defects");
    for d in defects {
        let _ = write!(s, " {d}");
    }
    s.push_str(" actual");
    for a in actual.ones() {
        let _ = write!(s, " {a}");
    }
    s
}

struct ShotLine {
    index: u64,
    channel: PauliType,
    defects: Vec<usize>,
    actual: Vec<usize>,
}

fn parse_shot_line(line: &str) -> Result<ShotLine> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let a = toks.iter().position(|&t| t == "actual").ok_or_else(|| anyhow!("missing `actual`"))?;
    if toks.len() < 4 || toks[0] != "shot" || toks[3] != "defects" {
        bail!("expected `shot <i> <channel> defects ... actual ...`");
    }
    let nums = |ts: &[&str]| -> Result<Vec<usize>> {
        ts.iter().map(|t| t.parse().with_context(|| format!("bad id `{t}`"))).collect()
    };
    Ok(ShotLine {
        index: toks[1].parse()?,
        channel: parse_channel(toks[2]).map_err(|e| anyhow!(e))?,
        defects: nums(&toks[4..a])?,
        actual: nums(&toks[a + 1..])?,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::ValidateLattice { lattice } => {
            let data = if let Some(l) = lattice.strip_prefix("torus:") {
                generate_torus(l.parse()?).into_data()
            } else {
                let text = fs::read_to_string(&lattice).with_context(|| format!("reading {lattice}"))?;
                parse_lattice(&text)?
            };
            let report = validate(&data);
            print!("{report}");
            return Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            });
        }
        Command::BuildCode { lattice, manifest } => {
            let code = build_code(&load(&lattice)?)?;
            println!("{} {code}", code.lattice().display_name());
            let r = code.rate();
            println!("rate {}/{} = {:.4}", r.numer(), r.denom(), *r.numer() as f64 / *r.denom() as f64);
            if let Some(path) = manifest {
                emit(Some(&path), &code.manifest())?;
            }
        }
        Command::ExportCluster { lattice, layers, out } => {
            let state = cluster(&lattice, layers)?;
            emit(out.as_deref(), &export_manifest(&state))?;
        }
        Command::EnumerateFaults {
            lattice,
            layers,
            p,
            out,
            noise,
        } => {
            check_rate(p)?;
            let state = cluster(&lattice, layers)?;
            let mut catalog = FaultCatalog::build(&state, noise.into())?;
            catalog.set_source(&lattice);
            let dem = catalog.dem(p)?;
            fs::write(&out, write_dem(&dem)).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "locations {} mechanisms Z {} X {}",
                catalog.locations(),
                dem.mechanisms(PauliType::Z).len(),
                dem.mechanisms(PauliType::X).len()
            );
        }
        Command::SampleShots {
            lattice,
            layers,
            p,
            count,
            seed,
            out,
            noise,
        } => {
            check_rate(p)?;
            let state = cluster(&lattice, layers)?;
            let sampler = Sampler::new(&state, noise.into());
            let key = point_key(seed, 0, 0, 0);
            let mut text = String::new();
            for i in 0..count {
                let shot = sampler.sample(p, &mut shot_rng(key, i));
                for ch in [PauliType::Z, PauliType::X] {
                    text.push_str(&shot_line(i, ch, shot.syndrome_of(ch), shot.actual_of(ch)));
                    text.push('\n');
                }
            }
            emit(Some(&out), &text)?;
        }
        Command::Decode { dem, shots } => {
            let text = fs::read_to_string(&dem).with_context(|| format!("reading {}", dem.display()))?;
            let model = parse_dem(&text).map_err(|e| anyhow!("{}: line {}: {}", dem.display(), e.line, e.message))?;
            let source = model
                .header
                .source
                .clone()
                .ok_or_else(|| anyhow!("DEM has no `source` line naming its lattice"))?;
            let state = cluster(&source, model.header.layers)?;
            let decoders = [
                Decoder::new(&state, &model, PauliType::Z),
                Decoder::new(&state, &model, PauliType::X),
            ];
            let shots_text =
                fs::read_to_string(&shots).with_context(|| format!("reading {}", shots.display()))?;
            let (mut total, mut failed) = (0u64, 0u64);
            for (n, line) in shots_text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let s = parse_shot_line(line).with_context(|| format!("shots line {}", n + 1))?;
                let dec = match &decoders[usize::from(s.channel == PauliType::X)] {
                    Ok(d) => d,
                    Err(e) => return decode_failure(e),
                };
                let actual = BitChain::from_indices(state.num_slots(), s.actual.iter().copied());
                let verdict = match dec.decode(&s.defects).and_then(|d| dec.judge(&actual, &d.correction)) {
                    Ok(v) => v,
                    Err(e) => return decode_failure(&e),
                };
                let flags: Vec<&str> = verdict.flags.iter().map(|&f| if f { "1" } else { "0" }).collect();
                println!(
                    "shot {} {} {} flags {}",
                    s.index,
                    s.channel,
                    if verdict.failed { "fail" } else { "ok" },
                    flags.join("")
                );
                total += 1;
                failed += verdict.failed as u64;
            }
            println!("decoded {total} failed {failed}");
        }
        Command::RunMemory { config, out, workers } => {
            let text = match fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: reading {}: {e}", config.display());
                    return Ok(ExitCode::from(1));
                }
            };
            let mut cfg = match ExperimentConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => return harness_failure(HarnessError::Config(e)),
            };
            let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
            cfg.resolve_paths(&base);
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let Some(out) = out.or_else(|| cfg.out.as_ref().map(|o| base.join(o))) else {
                eprintln!("error: no output path (use --out or `out =` in the config)");
                return Ok(ExitCode::from(1));
            };
            match run_to_csv(&cfg, &out) {
                Ok(records) => {
                    for r in &records {
                        eprintln!(
                            "{} layers {} {} p {} failures {}/{}",
                            r.instance, r.layers, r.channel, r.p, r.failures, r.shots
                        );
                    }
                }
                Err(e) => return harness_failure(e),
            }
        }
        Command::Threshold { csv, channel, layers } => {
            let ch = parse_channel(&channel).map_err(|e| anyhow!(e))?;
            let file = fs::File::open(&csv).with_context(|| format!("reading {}", csv.display()))?;
            let curves = curves_from_csv(file, ch, layers)?;
            let est = estimate_threshold(&curves)?;
            for pair in est.pairs() {
                match pair.crossing {
                    Some(c) => println!("{} vs {}: {c:.6}", pair.smaller, pair.larger),
                    None => println!("{} vs {}: no crossing in range", pair.smaller, pair.larger),
                }
            }
            println!("{ch} {est}");
        }
        Command::GenTorus { size, out } => {
            if size < 2 {
                bail!("torus size must be at least 2");
            }
            emit(out.as_deref(), &write_lattice(generate_torus(size).data()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn decode_failure(e: &hypercluster::decoder::DecodeError) -> Result<ExitCode> {
    eprintln!("error: decode: {e}");
    Ok(ExitCode::from(3))
}

fn harness_failure(e: HarnessError) -> Result<ExitCode> {
    eprintln!("error: {e}");
    Ok(ExitCode::from(e.exit_code() as u8))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
