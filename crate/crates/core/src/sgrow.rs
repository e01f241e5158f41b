//! The sGrow streaming growth model.
//!
//! Each time step adds a batch of isolated edges between brand-new vertices
//! that share the current timestamp, then, per edge, either deletes it, leaves
//! it alone, or grows a burst of records around it. Bursts are anchored on a
//! preferential random walk through a sliding-window computational graph:
//!
//! 1. the walk vertex is joined to the new edge's far endpoint,
//! 2. with probability `rho` it is also joined to a uniformly chosen vertex,
//!    timestamped with the older of the two birth times,
//! 3. with probability `rho` each of its existing links is copied onto the new
//!    edge's near endpoint, timestamped with the neighbor's birth time.
//!
//! Steps 2 and 3 emit records that carry timestamps from the past, so the
//! output is out of order in timestamp while staying ordered by arrival.

use std::collections::BTreeMap;

use indexmap::IndexSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Partition};
use crate::sampling::sps;
use crate::stream::{Sgr, StreamLog, VertexId, MAX_WEIGHT, MIN_WEIGHT};

/// How the sliding window's beginning border advances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlideMode {
    /// Border advances by `beta` every step; expired edges are dropped every
    /// `beta` steps.
    #[default]
    Literal,
    /// Border advances by `beta` once every `beta` steps, together with the
    /// drop of expired edges.
    Textual,
}

impl std::str::FromStr for SlideMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(SlideMode::Literal),
            "textual" => Ok(SlideMode::Textual),
            other => Err(Error::Config(format!("unknown slide mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SGrowConfig {
    /// Connection probability for the random-vertex and copy steps.
    pub rho: f64,
    /// Exclusive upper bound on the number of new edges per step.
    #[serde(rename = "M", alias = "max_batch")]
    pub max_batch: u32,
    /// Slide parameter.
    pub beta: u64,
    pub l_min: u32,
    pub l_max: u32,
    /// Whether burst addition copies the walk vertices' links.
    pub copy_step: bool,
    /// Stream length to stop at.
    pub target: usize,
    pub seed: u64,
    pub slide_mode: SlideMode,
}

impl Default for SGrowConfig {
    fn default() -> Self {
        SGrowConfig {
            rho: 0.3,
            max_batch: 50,
            beta: 5,
            l_min: 1,
            l_max: 2,
            copy_step: true,
            target: 1_000_000,
            seed: 0,
            slide_mode: SlideMode::Literal,
        }
    }
}

impl SGrowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if self.max_batch < 1 {
            return Err(Error::Config("M must be at least 1".into()));
        }
        if self.beta < 1 {
            return Err(Error::Config("beta must be at least 1".into()));
        }
        if self.l_min < 1 || self.l_min > self.l_max {
            return Err(Error::Config(format!(
                "walk length range [{}, {}] must satisfy 1 <= l_min <= l_max",
                self.l_min, self.l_max
            )));
        }
        if self.target < 1 {
            return Err(Error::Config("target must be at least 1".into()));
        }
        Ok(())
    }

    /// Parameter rows used to mimic the burstiness of the reference datasets.
    /// `target` and `seed` are left at their defaults.
    pub fn preset(name: &str) -> Option<SGrowConfig> {
        let (rho, max_batch, l_min, l_max, copy_step) = match name.to_ascii_lowercase().as_str() {
            "s-ciao" | "ciao" => (0.3, 100, 2, 3, true),
            "s-epinions" | "epinions" => (0.2, 300, 3, 6, true),
            "s-wikilens" | "wikilens" => (0.4, 100, 1, 3, false),
            "s-ml100k" | "ml100k" => (0.3, 100, 1, 3, false),
            "s-ml1m" | "ml1m" => (0.3, 10, 1, 2, true),
            "s-amazon" | "amazon" => (0.3, 50, 1, 2, true),
            "s-yahoo" | "yahoo" => (0.3, 50, 2, 3, true),
            _ => return None,
        };
        Some(SGrowConfig {
            rho,
            max_batch,
            beta: 5,
            l_min,
            l_max,
            copy_step,
            ..SGrowConfig::default()
        })
    }
}

/// `|(w - 5)(w - 4)(w - 3)| / 2`: low final weights open a timestamp gap.
pub fn timestamp_gap(w: u8) -> Result<u64> {
    if !(MIN_WEIGHT..=MAX_WEIGHT).contains(&w) {
        return Err(Error::Domain(format!("weight {w} outside 1..=5")));
    }
    let w = i64::from(w);
    Ok(((w - 5) * (w - 4) * (w - 3)).unsigned_abs() / 2)
}

pub type WalkSet = IndexSet<VertexId, FxBuildHasher>;

/// Distinct vertices visited by a preferential random walk, per partition,
/// in first-visit order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Walk {
    pub i: WalkSet,
    pub j: WalkSet,
    pub hops: u32,
}

impl Walk {
    pub fn in_partition(&self, p: Partition) -> &WalkSet {
        match p {
            Partition::I => &self.i,
            Partition::J => &self.j,
        }
    }
}

/// Walks up to `hops` steps from `starter`, each step moving to a
/// strength-preferentially chosen neighbor. Revisits consume a hop without
/// growing the sets; a vertex without neighbors ends the walk early.
pub fn prw<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    starter: VertexId,
    starter_partition: Partition,
    hops: u32,
    rng: &mut R,
) -> Result<Walk> {
    if !g.contains_vertex(starter_partition, starter) {
        return Err(Error::Domain(format!(
            "walk starter {starter:?} ({starter_partition:?}) is not in the graph"
        )));
    }
    let mut walk = Walk::default();
    let (mut cur, mut side) = (starter, starter_partition);
    let mut candidates: Vec<(VertexId, u64)> = Vec::new();
    while walk.hops < hops {
        let other = side.other();
        candidates.clear();
        candidates.extend(g.neighbors(side, cur).map(|n| (n, g.strength(other, n))));
        if candidates.is_empty() {
            break;
        }
        let next = sps(&candidates, rng)?;
        match other {
            Partition::I => walk.i.insert(next),
            Partition::J => walk.j.insert(next),
        };
        cur = next;
        side = other;
        walk.hops += 1;
    }
    Ok(walk)
}

/// Orients a pair given as (vertex of `p`, vertex of the other partition).
fn oriented(p: Partition, a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    match p {
        Partition::I => (a, b),
        Partition::J => (b, a),
    }
}

/// sGrow generator state: the windowed computational graph plus the output
/// stream.
#[derive(Debug, Clone)]
pub struct Generator {
    config: SGrowConfig,
    graph: BipartiteGraph,
    stream: StreamLog,
    tau: u64,
    t: u64,
    window_begin: u64,
    rng: ChaCha8Rng,
    // edge timestamps at insertion, for window expiry; stale entries are
    // re-checked against the live edge on pop
    expiry: BTreeMap<u64, Vec<(VertexId, VertexId)>>,
    // records of the step in progress; `None` marks a deleted record
    pending: Vec<Option<Sgr>>,
}

impl Generator {
    /// Seeds the computational graph and the stream with `g0`.
    pub fn new(g0: &StreamLog, config: SGrowConfig) -> Result<Self> {
        config.validate()?;
        if g0.is_empty() {
            return Err(Error::Domain("initial graph must contain at least one record".into()));
        }
        if let Some(bad) = g0.iter().find(|r| !r.has_valid_weight()) {
            return Err(Error::Domain(format!(
                "initial record {bad:?} has a weight outside 1..=5"
            )));
        }
        let mut gen = Generator {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            graph: BipartiteGraph::new(),
            stream: g0.clone(),
            tau: g0.iter().map(|r| r.timestamp).max().unwrap_or(0) + 1,
            t: 0,
            window_begin: g0.iter().map(|r| r.timestamp).min().unwrap_or(0),
            expiry: BTreeMap::new(),
            pending: Vec::new(),
        };
        for r in g0 {
            gen.insert(*r);
        }
        Ok(gen)
    }

    pub fn config(&self) -> &SGrowConfig {
        &self.config
    }

    /// Swaps parameters mid-stream; the random source carries on.
    pub fn set_config(&mut self, config: SGrowConfig) -> Result<()> {
        config.validate()?;
        self.config = config;
        Ok(())
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn stream(&self) -> &StreamLog {
        &self.stream
    }

    pub fn into_stream(self) -> StreamLog {
        self.stream
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn window_begin(&self) -> u64 {
        self.window_begin
    }

    fn insert(&mut self, r: Sgr) {
        self.graph.apply_add(&r);
        self.expiry.entry(r.timestamp).or_default().push((r.i, r.j));
    }

    fn emit(&mut self, r: Sgr) -> u8 {
        self.insert(r);
        self.pending.push(Some(r));
        r.weight
    }

    fn weight(&mut self) -> u8 {
        self.rng.random_range(MIN_WEIGHT..=MAX_WEIGHT)
    }

    fn birth(&self, p: Partition, v: VertexId) -> u64 {
        self.graph.vertex(p, v).expect("vertex in graph").birth_timestamp
    }

    /// Grows a burst around the new edge `(v_i, v_j)` from the walk vertices
    /// of partition `p`. Returns the weight of the last record emitted.
    fn add_burst(&mut self, v_i: VertexId, v_j: VertexId, walk: &WalkSet, p: Partition) -> Option<u8> {
        let other = p.other();
        // new-edge endpoint in the walk's partition, and the one opposite
        let (near, far) = match p {
            Partition::I => (v_i, v_j),
            Partition::J => (v_j, v_i),
        };
        let mut last = None;
        for &u in walk {
            let existing: Vec<VertexId> = self.graph.neighbors(p, u).collect();

            let (i, j) = oriented(p, u, far);
            let w = self.weight();
            let ts = self.birth(other, far);
            last = Some(self.emit(Sgr::new(i, j, w, ts)));

            if self.rng.random_bool(self.config.rho) {
                let z = self
                    .graph
                    .sample_uniform(other, &mut self.rng)
                    .expect("far endpoint keeps the partition nonempty");
                let w = self.weight();
                let ts = self.birth(p, u).min(self.birth(other, z));
                let (i, j) = oriented(p, u, z);
                last = Some(self.emit(Sgr::new(i, j, w, ts)));
            }

            if self.config.copy_step {
                for n in existing {
                    if self.rng.random_bool(self.config.rho) {
                        let w = self.weight();
                        let ts = self.birth(other, n);
                        let (i, j) = oriented(p, near, n);
                        last = Some(self.emit(Sgr::new(i, j, w, ts)));
                    }
                }
            }
        }
        last
    }

    fn expire(&mut self) {
        let border = self.window_begin;
        let mut orphans: Vec<(Partition, VertexId)> = Vec::new();
        while let Some(entry) = self.expiry.first_entry() {
            if *entry.key() >= border {
                break;
            }
            for (i, j) in entry.remove() {
                let stale = self.graph.edge(i, j).is_some_and(|e| e.timestamp < border);
                if stale {
                    self.graph.apply_remove(i, j);
                    orphans.push((Partition::I, i));
                    orphans.push((Partition::J, j));
                }
            }
        }
        for (p, v) in orphans {
            if self.graph.contains_vertex(p, v) && self.graph.degree(p, v) == 0 {
                self.graph.remove_vertex(p, v);
            }
        }
    }

    /// Runs one time step and returns the records it emitted, which have
    /// also been appended to the stream.
    pub fn step(&mut self) -> Result<Vec<Sgr>> {
        if self.graph.edge_count() == 0 {
            return Err(Error::Starved);
        }
        self.t += 1;
        self.pending.clear();

        let batch_tau = self.tau;
        let m = self.rng.random_range(0..self.config.max_batch) as usize;
        let mut fresh = Vec::with_capacity(m);
        for _ in 0..m {
            let v_i = self.graph.id_bound(Partition::I);
            let v_j = self.graph.id_bound(Partition::J);
            let w = self.weight();
            fresh.push((v_i, v_j, self.pending.len()));
            self.emit(Sgr::new(v_i, v_j, w, batch_tau));
        }

        for &(v_i, v_j, slot) in &fresh {
            match self.rng.random_range(-1i8..=5) {
                -1 => {
                    self.graph.apply_remove(v_i, v_j);
                    self.pending[slot] = None;
                }
                0 => {}
                _ => {
                    let start = self
                        .graph
                        .sample_by_strength(Partition::J, &mut self.rng)
                        .ok_or(Error::Starved)?;
                    let hops = self.rng.random_range(self.config.l_min..=self.config.l_max);
                    let walk = prw(&self.graph, start, Partition::J, hops, &mut self.rng)?;
                    let a = self.add_burst(v_i, v_j, &walk.i, Partition::I);
                    let b = self.add_burst(v_i, v_j, &walk.j, Partition::J);
                    if let Some(w) = b.or(a) {
                        self.tau += timestamp_gap(w)?;
                    }
                }
            }
        }

        for &(v_i, v_j, _) in &fresh {
            for (p, v) in [(Partition::I, v_i), (Partition::J, v_j)] {
                if self.graph.contains_vertex(p, v) && self.graph.degree(p, v) < 2 {
                    self.graph.remove_vertex(p, v);
                }
            }
        }

        self.tau += 1;
        let beta = self.config.beta;
        match self.config.slide_mode {
            SlideMode::Literal => {
                self.window_begin += beta;
                if self.t >= beta {
                    self.expire();
                    self.t = 0;
                }
            }
            SlideMode::Textual => {
                if self.t >= beta {
                    self.window_begin += beta;
                    self.expire();
                    self.t = 0;
                }
            }
        }

        let emitted: Vec<Sgr> = self.pending.drain(..).flatten().collect();
        self.stream.extend(emitted.iter().copied());
        Ok(emitted)
    }

    /// Steps until the stream holds at least `target` records.
    pub fn run_until(&mut self, target: usize) -> Result<()> {
        while self.stream.len() < target {
            self.step()?;
        }
        Ok(())
    }
}

/// Generates a stream of exactly `config.target` records starting with `g0`.
/// A target no larger than `g0` returns `g0` unchanged.
pub fn generate(g0: &StreamLog, config: SGrowConfig) -> Result<StreamLog> {
    let target = config.target;
    let mut gen = Generator::new(g0, config)?;
    if target <= g0.len() {
        return Ok(g0.clone());
    }
    gen.run_until(target)?;
    let mut stream = gen.into_stream();
    stream.truncate(target);
    Ok(stream)
}
