//! Single-fault enumeration and the detector error model.
//!
//! The catalog records, for every distinct defect set, how many CZ Pauli
//! faults and how many measurement faults produce it. It does not depend on
//! the physical rate, so one catalog serves every rate of an experiment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{
    cancel_pairs, channel_index, fault_locations, FaultLocation, FaultPropagator,
    MeasurementNoise, CHANNELS,
};
use crate::foliation::ClusterState;
use crate::PauliType;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("fault `{location}` flips {count} {check}-type detectors in one connected piece and cannot be split into edges")]
    Undecomposable {
        location: String,
        check: PauliType,
        count: usize,
    },
    #[error("physical rate {0} outside [0, 1/2)")]
    BadRate(f64),
}

/// Faults with one common defect set in one channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mechanism {
    /// Ascending detector indices; one or two entries.
    pub defects: Vec<usize>,
    /// Footprint of the first fault found with this defect set.
    pub footprint: Vec<usize>,
    pub n_cz: u64,
    pub n_meas: u64,
}

/// Odd-parity combination of `n_cz` CZ Pauli faults at `p/15` each and
/// `n_meas` measurement faults at `p` each.
pub fn mechanism_probability(p: f64, n_cz: u64, n_meas: u64) -> f64 {
    let even = (1.0 - 2.0 * p / 15.0).powf(n_cz as f64) * (1.0 - 2.0 * p).powf(n_meas as f64);
    (1.0 - even) / 2.0
}

#[derive(Debug, Clone)]
pub struct FaultCatalog {
    instance: String,
    source: Option<String>,
    pq: (usize, usize),
    edges: usize,
    layers: usize,
    noise: MeasurementNoise,
    locations: u64,
    /// Indexed by channel.
    n_detectors: [usize; 2],
    num_slots: usize,
    mechanisms: [Vec<Mechanism>; 2],
    /// Contributions that flip no detector of the channel but do touch it.
    silent: [(u64, u64); 2],
    slot_counts: [Vec<(u64, u64)>; 2],
}

/// One piece of a decomposed fault in one channel.
struct Piece {
    channel: usize,
    defects: Vec<usize>,
    footprint: Vec<usize>,
}

impl FaultCatalog {
    /// Simulates every single fault once and groups the results.
    pub fn build(state: &ClusterState, noise: MeasurementNoise) -> Result<Self, SimError> {
        let prop = FaultPropagator::new(state, noise);
        let locations: Vec<FaultLocation> = fault_locations(state).collect();
        let pieces: Vec<Result<Vec<Piece>, SimError>> = locations
            .par_iter()
            .map(|&loc| pieces_of(&prop, loc))
            .collect();

        let num_slots = state.num_slots();
        let mut groups: [BTreeMap<Vec<usize>, Mechanism>; 2] = [BTreeMap::new(), BTreeMap::new()];
        let mut silent = [(0, 0); 2];
        let mut slot_counts = [vec![(0, 0); num_slots], vec![(0, 0); num_slots]];
        for (loc, result) in locations.iter().zip(pieces) {
            let is_cz = matches!(loc, FaultLocation::AfterCz { .. });
            for piece in result? {
                let bump = |c: &mut (u64, u64)| {
                    if is_cz {
                        c.0 += 1;
                    } else {
                        c.1 += 1;
                    }
                };
                for &s in &piece.footprint {
                    bump(&mut slot_counts[piece.channel][s]);
                }
                if piece.defects.is_empty() {
                    bump(&mut silent[piece.channel]);
                    continue;
                }
                let m = groups[piece.channel]
                    .entry(piece.defects.clone())
                    .or_insert_with(|| Mechanism {
                        defects: piece.defects,
                        footprint: piece.footprint,
                        n_cz: 0,
                        n_meas: 0,
                    });
                if is_cz {
                    m.n_cz += 1;
                } else {
                    m.n_meas += 1;
                }
            }
        }
        let [gz, gx] = groups;
        let lat = state.lattice();
        Ok(Self {
            instance: lat.display_name(),
            source: None,
            pq: (lat.p(), lat.q()),
            edges: lat.num_edges(),
            layers: state.layers(),
            noise,
            locations: locations.len() as u64,
            n_detectors: CHANNELS.map(|c| state.channel_detectors(c).len()),
            num_slots,
            mechanisms: [gz.into_values().collect(), gx.into_values().collect()],
            silent,
            slot_counts,
        })
    }

    /// Records where the lattice came from, for offline decoding.
    pub fn set_source(&mut self, source: impl Into<String>) {
        self.source = Some(source.into());
    }

    /// Number of fault locations visited, N_F.
    pub fn locations(&self) -> u64 {
        self.locations
    }

    pub fn mechanisms(&self, channel: PauliType) -> &[Mechanism] {
        &self.mechanisms[channel_index(channel)]
    }

    /// `(n_cz, n_meas)` of faults invisible to the channel's detectors but
    /// flipping at least one of its qubits.
    pub fn silent(&self, channel: PauliType) -> (u64, u64) {
        self.silent[channel_index(channel)]
    }

    pub fn num_detectors(&self, channel: PauliType) -> usize {
        self.n_detectors[channel_index(channel)]
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    pub fn noise(&self) -> MeasurementNoise {
        self.noise
    }

    /// Detector error model at physical rate `p`.
    pub fn dem(&self, p: f64) -> Result<DetectorErrorModel, SimError> {
        if !(0.0..0.5).contains(&p) {
            return Err(SimError::BadRate(p));
        }
        let mechanisms = [0, 1].map(|ci| {
            self.mechanisms[ci]
                .iter()
                .map(|m| DemMechanism {
                    defects: m.defects.clone(),
                    probability: mechanism_probability(p, m.n_cz, m.n_meas),
                    footprint: m.footprint.clone(),
                })
                .collect()
        });
        let slot_probability = [0, 1].map(|ci| {
            self.slot_counts[ci]
                .iter()
                .map(|&(c, m)| mechanism_probability(p, c, m))
                .collect()
        });
        Ok(DetectorErrorModel {
            header: DemHeader {
                instance: self.instance.clone(),
                source: self.source.clone(),
                pq: self.pq,
                edges: self.edges,
                layers: self.layers,
                rate: p,
                detectors: self.n_detectors,
                slots: self.num_slots,
                locations: self.locations,
            },
            mechanisms,
            slot_probability,
        })
    }
}

/// Splits the effect of one fault into per-channel edges of the decoding
/// graphs. A channel seeing more than two defects is split into connected
/// pieces (qubits joined when they share a detector); each piece must then
/// have at most two defects.
fn pieces_of(prop: &FaultPropagator<'_>, loc: FaultLocation) -> Result<Vec<Piece>, SimError> {
    let state = prop.state();
    let flips = prop.flips(loc);
    let mut out = Vec::new();
    for channel in CHANNELS {
        let ci = channel_index(channel);
        let qs: Vec<usize> = flips
            .iter()
            .copied()
            .filter(|&q| state.qubit(q).kind.channel() == channel)
            .collect();
        if qs.is_empty() {
            continue;
        }
        let whole = piece_of(prop, ci, &qs);
        if whole.defects.len() <= 2 {
            out.push(whole);
            continue;
        }
        for component in components(prop, &qs) {
            let piece = piece_of(prop, ci, &component);
            if piece.defects.len() > 2 {
                return Err(SimError::Undecomposable {
                    location: loc.to_string(),
                    check: channel.other(),
                    count: piece.defects.len(),
                });
            }
            out.push(piece);
        }
    }
    Ok(out)
}

fn piece_of(prop: &FaultPropagator<'_>, channel: usize, qubits: &[usize]) -> Piece {
    let mut defects = Vec::new();
    let mut footprint = Vec::new();
    for &q in qubits {
        defects.extend_from_slice(prop.detectors_of(q));
        if let Some((_, s)) = prop.state().slot(q) {
            footprint.push(s);
        }
    }
    cancel_pairs(&mut defects);
    cancel_pairs(&mut footprint);
    Piece {
        channel,
        defects,
        footprint,
    }
}

fn components(prop: &FaultPropagator<'_>, qubits: &[usize]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..qubits.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..qubits.len() {
        for j in i + 1..qubits.len() {
            let shared = prop
                .detectors_of(qubits[i])
                .iter()
                .any(|d| prop.detectors_of(qubits[j]).contains(d));
            if shared {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..qubits.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(qubits[i]);
    }
    groups.into_values().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemHeader {
    pub instance: String,
    /// Lattice file path or `torus:L`.
    pub source: Option<String>,
    pub pq: (usize, usize),
    pub edges: usize,
    pub layers: usize,
    pub rate: f64,
    /// Detector counts indexed by channel.
    pub detectors: [usize; 2],
    pub slots: usize,
    pub locations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemMechanism {
    pub defects: Vec<usize>,
    pub probability: f64,
    pub footprint: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorErrorModel {
    pub header: DemHeader,
    /// Indexed by channel (`Z`, then `X`).
    pub mechanisms: [Vec<DemMechanism>; 2],
    /// Effective flip probability P_d of every data slot, by channel.
    pub slot_probability: [Vec<f64>; 2],
}

impl DetectorErrorModel {
    pub fn mechanisms(&self, channel: PauliType) -> &[DemMechanism] {
        &self.mechanisms[channel_index(channel)]
    }

    pub fn num_detectors(&self, channel: PauliType) -> usize {
        self.header.detectors[channel_index(channel)]
    }

    pub fn slot_probabilities(&self, channel: PauliType) -> &[f64] {
        &self.slot_probability[channel_index(channel)]
    }

    /// `W = −ln P_d` per slot.
    pub fn slot_weights(&self, channel: PauliType) -> Vec<f64> {
        self.slot_probabilities(channel).iter().map(|p| -p.ln()).collect()
    }
}

/// Line-oriented DEM text. Mechanism lines name the detector type (X-type
/// detectors decode the Z channel):
///
/// ```text
/// mech <X|Z> <defect ids...> prob <P> footprint <slot ids...>
/// pd <X|Z> <slot> <P_d>
/// ```
pub fn write_dem(dem: &DetectorErrorModel) -> String {
    let h = &dem.header;
    let mut out = String::new();
    let _ = writeln!(out, "# detector error model");
    let _ = writeln!(out, "instance {}", h.instance);
    if let Some(s) = &h.source {
        let _ = writeln!(out, "source {s}");
    }
    let _ = writeln!(out, "lattice {} {} {}", h.pq.0, h.pq.1, h.edges);
    let _ = writeln!(out, "layers {}", h.layers);
    let _ = writeln!(out, "rate {}", h.rate);
    let _ = writeln!(
        out,
        "detectors X {} Z {}",
        h.detectors[channel_index(PauliType::Z)],
        h.detectors[channel_index(PauliType::X)]
    );
    let _ = writeln!(out, "slots {}", h.slots);
    let _ = writeln!(out, "locations {}", h.locations);
    let _ = writeln!(out, "decomposition connected-components");
    for channel in CHANNELS {
        let check = channel.other();
        for m in dem.mechanisms(channel) {
            let _ = write!(out, "mech {check}");
            for d in &m.defects {
                let _ = write!(out, " {d}");
            }
            let _ = write!(out, " prob {} footprint", m.probability);
            for s in &m.footprint {
                let _ = write!(out, " {s}");
            }
            out.push('\n');
        }
    }
    for channel in CHANNELS {
        for (s, p) in dem.slot_probabilities(channel).iter().enumerate() {
            let _ = writeln!(out, "pd {} {s} {p}", channel.other());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("dem line {line}: {message}")]
pub struct DemParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse_dem(text: &str) -> Result<DetectorErrorModel, DemParseError> {
    let mut instance = None;
    let mut source = None;
    let mut lattice = None;
    let mut layers = None;
    let mut rate = None;
    let mut detectors = None;
    let mut slots = None;
    let mut locations = None;
    let mut mechanisms = [Vec::new(), Vec::new()];
    let mut pd: [Vec<(usize, f64)>; 2] = [Vec::new(), Vec::new()];

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| DemParseError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| err(format!("bad integer `{t}`")));
        let float = |t: &str| t.parse::<f64>().map_err(|_| err(format!("bad number `{t}`")));
        let check = |t: &str| match t {
            "X" => Ok(channel_index(PauliType::Z)),
            "Z" => Ok(channel_index(PauliType::X)),
            _ => Err(err(format!("bad detector type `{t}`"))),
        };
        let arity = |n: usize| {
            if toks.len() == n {
                Ok(())
            } else {
                Err(err(format!("`{}` expects {} fields", toks[0], n - 1)))
            }
        };
        match toks[0] {
            "instance" => instance = Some(toks[1..].join(" ")),
            "source" => source = Some(toks[1..].join(" ")),
            "lattice" => {
                arity(4)?;
                lattice = Some((num(toks[1])?, num(toks[2])?, num(toks[3])?));
            }
            "layers" => {
                arity(2)?;
                layers = Some(num(toks[1])?);
            }
            "rate" => {
                arity(2)?;
                rate = Some(float(toks[1])?);
            }
            "detectors" => {
                arity(5)?;
                if toks[1] != "X" || toks[3] != "Z" {
                    return Err(err("expected `detectors X <n> Z <n>`".into()));
                }
                detectors = Some([num(toks[2])?, num(toks[4])?]);
            }
            "slots" => {
                arity(2)?;
                slots = Some(num(toks[1])?);
            }
            "locations" => {
                arity(2)?;
                locations = Some(num(toks[1])? as u64);
            }
            "decomposition" => {}
            "mech" => {
                let ci = check(toks.get(1).copied().unwrap_or(""))?;
                let prob_at = toks
                    .iter()
                    .position(|&t| t == "prob")
                    .ok_or_else(|| err("missing `prob`".into()))?;
                if toks.get(prob_at + 2) != Some(&"footprint") {
                    return Err(err("expected `prob <P> footprint ...`".into()));
                }
                let defects = toks[2..prob_at].iter().map(|t| num(t)).collect::<Result<Vec<_>, _>>()?;
                if defects.is_empty() || defects.len() > 2 {
                    return Err(err(format!("mechanism with {} defects", defects.len())));
                }
                let probability = float(toks[prob_at + 1])?;
                let footprint = toks[prob_at + 3..]
                    .iter()
                    .map(|t| num(t))
                    .collect::<Result<Vec<_>, _>>()?;
                mechanisms[ci].push(DemMechanism {
                    defects,
                    probability,
                    footprint,
                });
            }
            "pd" => {
                arity(4)?;
                pd[check(toks[1])?].push((num(toks[2])?, float(toks[3])?));
            }
            other => return Err(err(format!("unknown record `{other}`"))),
        }
    }
    let missing = |what: &str| DemParseError {
        line: 0,
        message: format!("missing `{what}` header"),
    };
    let [dx, dz] = detectors.ok_or_else(|| missing("detectors"))?;
    let slots = slots.ok_or_else(|| missing("slots"))?;
    let (p, q, edges) = lattice.ok_or_else(|| missing("lattice"))?;
    let slot_probability = pd.map(|entries| {
        let mut v = vec![0.0; slots];
        for (s, p) in entries {
            if s < slots {
                v[s] = p;
            }
        }
        v
    });
    Ok(DetectorErrorModel {
        header: DemHeader {
            instance: instance.ok_or_else(|| missing("instance"))?,
            source,
            pq: (p, q),
            edges,
            layers: layers.ok_or_else(|| missing("layers"))?,
            rate: rate.ok_or_else(|| missing("rate"))?,
            detectors: [dx, dz],
            slots,
            locations: locations.ok_or_else(|| missing("locations"))?,
        },
        mechanisms,
        slot_probability,
    })
}
