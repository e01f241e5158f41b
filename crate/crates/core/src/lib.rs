//! Generation and analysis of weighted bipartite streaming graphs.
//!
//! The crate has two halves. The generators ([`sgrow`] and the
//! [`baselines`]) emit arrival-ordered streams of weighted, timestamped
//! bipartite edge records. The analytics ([`butterfly`], [`metrics`],
//! [`report`]) cut a stream into burst-based prefix snapshots and measure
//! butterfly densification and strength mixing over them.

pub mod baselines;
pub mod butterfly;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod report;
pub mod sampling;
pub mod sgrow;
pub mod stream;

pub use error::{Error, Result};
pub use graph::{BipartiteGraph, EdgeAttr, Partition, VertexState};
pub use stream::{sample_timeline, segment_bursts, snapshot_at, Burst, Sgr, Snapshot, StreamLog, VertexId};
