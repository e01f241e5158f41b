//! Streaming graph records, arrival-ordered streams, bursts and
//! burst-based snapshots.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Dense per-partition vertex identifier.
pub type VertexId = u32;

pub const MIN_WEIGHT: u8 = 1;
pub const MAX_WEIGHT: u8 = 5;

/// One streaming graph record: a weighted, timestamped i-j edge arrival.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sgr {
    pub i: VertexId,
    pub j: VertexId,
    /// Rating on the 1..=5 scale.
    pub weight: u8,
    pub timestamp: u64,
}

impl Sgr {
    pub fn new(i: VertexId, j: VertexId, weight: u8, timestamp: u64) -> Self {
        Sgr {
            i,
            j,
            weight,
            timestamp,
        }
    }

    pub fn has_valid_weight(&self) -> bool {
        (MIN_WEIGHT..=MAX_WEIGHT).contains(&self.weight)
    }
}

/// Arrival-ordered sequence of records. Timestamps need not be monotone.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreamLog {
    records: Vec<Sgr>,
}

impl StreamLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        StreamLog {
            records: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, sgr: Sgr) {
        self.records.push(sgr);
    }

    /// Deletes the record at `pos`, keeping the arrival order of the rest.
    pub fn remove(&mut self, pos: usize) -> Sgr {
        self.records.remove(pos)
    }

    pub fn extend<I: IntoIterator<Item = Sgr>>(&mut self, it: I) {
        self.records.extend(it);
    }

    pub fn truncate(&mut self, len: usize) {
        self.records.truncate(len);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[Sgr] {
        &self.records
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sgr> {
        self.records.iter()
    }

    pub fn into_records(self) -> Vec<Sgr> {
        self.records
    }

    /// Renumbers both partitions densely in order of first appearance.
    pub fn relabel_dense(&self) -> StreamLog {
        use rustc_hash::FxHashMap;
        let mut ids: [FxHashMap<VertexId, VertexId>; 2] = Default::default();
        let mut next = |side: usize, v: VertexId| {
            let n = ids[side].len() as VertexId;
            *ids[side].entry(v).or_insert(n)
        };
        self.records
            .iter()
            .map(|r| Sgr::new(next(0, r.i), next(1, r.j), r.weight, r.timestamp))
            .collect()
    }

    /// First `n` records in arrival order.
    pub fn take_prefix(&self, n: usize) -> Result<StreamLog> {
        if n == 0 || n > self.len() {
            return Err(Error::range("prefix length", n as u64, format!("1..={}", self.len())));
        }
        Ok(StreamLog::from(self.records[..n].to_vec()))
    }
}

impl From<Vec<Sgr>> for StreamLog {
    fn from(records: Vec<Sgr>) -> Self {
        StreamLog { records }
    }
}

impl FromIterator<Sgr> for StreamLog {
    fn from_iter<I: IntoIterator<Item = Sgr>>(iter: I) -> Self {
        StreamLog {
            records: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a StreamLog {
    type Item = &'a Sgr;
    type IntoIter = std::slice::Iter<'a, Sgr>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}

/// A maximal run of consecutive records sharing one timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Burst {
    pub timestamp: u64,
    pub start: usize,
    pub len: usize,
}

impl Burst {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// Splits a stream into bursts in arrival order.
///
/// A record whose timestamp differs from its predecessor always opens a new
/// burst, so an out-of-order record that repeats an earlier timestamp forms
/// its own burst rather than joining the earlier one.
pub fn segment_bursts(records: &[Sgr]) -> Vec<Burst> {
    let mut bursts: Vec<Burst> = Vec::new();
    for (pos, r) in records.iter().enumerate() {
        match bursts.last_mut() {
            Some(b) if b.timestamp == r.timestamp => b.len += 1,
            _ => bursts.push(Burst {
                timestamp: r.timestamp,
                start: pos,
                len: 1,
            }),
        }
    }
    bursts
}

/// `k` equally spaced burst counts `floor(total * t / k)` for `t = 1..=k`.
pub fn sample_timeline(total_bursts: usize, k: usize) -> Result<Vec<usize>> {
    if total_bursts == 0 {
        return Err(Error::range("total bursts", 0, ">= 1"));
    }
    if k == 0 || k > total_bursts {
        return Err(Error::range("snapshot count", k as u64, format!("1..={total_bursts}")));
    }
    Ok((1..=k)
        .map(|t| ((total_bursts as u128 * t as u128) / k as u128) as usize)
        .collect())
}

/// The graph formed by the stream prefix covering the first `n_bursts` bursts.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub n_bursts: usize,
    pub edges: Vec<Sgr>,
    pub graph: BipartiteGraph,
}

impl Snapshot {
    /// Builds a snapshot directly from a list of records, treating the whole
    /// list as the prefix.
    pub fn from_records(records: &[Sgr]) -> Self {
        let mut graph = BipartiteGraph::new();
        for r in records {
            graph.apply_add(r);
        }
        Snapshot {
            n_bursts: segment_bursts(records).len(),
            edges: records.to_vec(),
            graph,
        }
    }
}

/// Number of leading records covered by the first `n_bursts` bursts.
pub fn prefix_len(bursts: &[Burst], n_bursts: usize) -> Result<usize> {
    if n_bursts == 0 || n_bursts > bursts.len() {
        return Err(Error::range(
            "burst count",
            n_bursts as u64,
            format!("1..={}", bursts.len()),
        ));
    }
    Ok(bursts[n_bursts - 1].end())
}

/// Replays `records` into a single growing graph and calls `visit` with the
/// graph at each requested burst count (ascending), avoiding one rebuild
/// per snapshot.
pub fn fold_snapshots<F>(records: &[Sgr], bursts: &[Burst], points: &[usize], mut visit: F) -> Result<()>
where
    F: FnMut(usize, &[Sgr], &BipartiteGraph),
{
    let mut graph = BipartiteGraph::new();
    let mut done = 0;
    for &n_bursts in points {
        let len = prefix_len(bursts, n_bursts)?;
        if len < done {
            return Err(Error::Domain("snapshot points must be ascending".into()));
        }
        for r in &records[done..len] {
            graph.apply_add(r);
        }
        done = len;
        visit(n_bursts, &records[..len], &graph);
    }
    Ok(())
}

pub fn snapshot_at(stream: &StreamLog, n_bursts: usize) -> Result<Snapshot> {
    let bursts = segment_bursts(stream.records());
    let len = prefix_len(&bursts, n_bursts)?;
    let mut snap = Snapshot::from_records(&stream.records()[..len]);
    snap.n_bursts = n_bursts;
    Ok(snap)
}
