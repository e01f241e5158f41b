//! Simple weighted bipartite graph with per-vertex strengths.
//!
//! Vertices live in dense per-partition slot vectors. Neighbor sets are
//! insertion-ordered so that every traversal, and therefore every seeded
//! generator run, is reproducible.

use indexmap::IndexSet;
use rand::Rng;
use rustc_hash::{FxBuildHasher, FxHashMap};

use crate::sampling::FenwickTree;
use crate::stream::{Sgr, VertexId};

type NeighborSet = IndexSet<VertexId, FxBuildHasher>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Partition {
    I,
    J,
}

impl Partition {
    pub fn other(self) -> Partition {
        match self {
            Partition::I => Partition::J,
            Partition::J => Partition::I,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexState {
    pub id: VertexId,
    pub partition: Partition,
    pub strength: u64,
    pub birth_timestamp: u64,
}

/// Attributes of a deduplicated edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeAttr {
    /// Sum of the weights of every record that arrived on this pair.
    pub weight: u64,
    /// Newest timestamp seen on this pair.
    pub timestamp: u64,
}

#[derive(Debug, Clone)]
struct Vertex {
    state: VertexState,
    neighbors: NeighborSet,
}

#[derive(Debug, Clone, Default)]
struct Side {
    slots: Vec<Option<Vertex>>,
    live: NeighborSet,
    strengths: FenwickTree,
}

impl Side {
    fn get(&self, id: VertexId) -> Option<&Vertex> {
        self.slots.get(id as usize).and_then(Option::as_ref)
    }

    fn get_mut(&mut self, id: VertexId) -> Option<&mut Vertex> {
        self.slots.get_mut(id as usize).and_then(Option::as_mut)
    }

    fn ensure(&mut self, id: VertexId, partition: Partition, birth: u64) -> &mut Vertex {
        let idx = id as usize;
        if self.slots.len() <= idx {
            self.slots.resize_with(idx + 1, || None);
        }
        if self.slots[idx].is_none() {
            self.live.insert(id);
        }
        self.slots[idx].get_or_insert_with(|| Vertex {
            state: VertexState {
                id,
                partition,
                strength: 0,
                birth_timestamp: birth,
            },
            neighbors: NeighborSet::default(),
        })
    }

    fn add_strength(&mut self, id: VertexId, w: u64) {
        let v = self.get_mut(id).expect("vertex exists");
        v.state.strength += w;
        let s = v.state.strength;
        self.strengths.set(id as usize, s);
    }

    fn sub_strength(&mut self, id: VertexId, w: u64) {
        let v = self.get_mut(id).expect("vertex exists");
        v.state.strength -= w;
        let s = v.state.strength;
        self.strengths.set(id as usize, s);
    }
}

#[derive(Debug, Clone, Default)]
pub struct BipartiteGraph {
    i_side: Side,
    j_side: Side,
    edges: FxHashMap<(VertexId, VertexId), EdgeAttr>,
}

impl BipartiteGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn side(&self, p: Partition) -> &Side {
        match p {
            Partition::I => &self.i_side,
            Partition::J => &self.j_side,
        }
    }

    fn side_mut(&mut self, p: Partition) -> &mut Side {
        match p {
            Partition::I => &mut self.i_side,
            Partition::J => &mut self.j_side,
        }
    }

    /// Adds a record. Returns `true` if the pair was not adjacent before.
    ///
    /// Unknown endpoints are created with the record's timestamp as birth
    /// time. A repeated pair keeps one adjacency entry; its accumulated weight
    /// grows and its timestamp becomes the newer of the two.
    pub fn apply_add(&mut self, sgr: &Sgr) -> bool {
        debug_assert!(sgr.has_valid_weight(), "weight {} outside 1..=5", sgr.weight);
        let w = u64::from(sgr.weight);
        let fresh = {
            let vi = self.i_side.ensure(sgr.i, Partition::I, sgr.timestamp);
            vi.neighbors.insert(sgr.j)
        };
        self.j_side
            .ensure(sgr.j, Partition::J, sgr.timestamp)
            .neighbors
            .insert(sgr.i);
        self.i_side.add_strength(sgr.i, w);
        self.j_side.add_strength(sgr.j, w);
        self.edges
            .entry((sgr.i, sgr.j))
            .and_modify(|e| {
                e.weight += w;
                e.timestamp = e.timestamp.max(sgr.timestamp);
            })
            .or_insert(EdgeAttr {
                weight: w,
                timestamp: sgr.timestamp,
            });
        fresh
    }

    /// Deletes the edge `(i, j)` and subtracts its accumulated weight from
    /// both endpoints. Endpoints stay in the graph even when left isolated.
    ///
    /// Removing an absent edge is a logged no-op returning `None`.
    pub fn apply_remove(&mut self, i: VertexId, j: VertexId) -> Option<EdgeAttr> {
        let Some(attr) = self.edges.remove(&(i, j)) else {
            log::warn!("ignoring removal of absent edge ({i}, {j})");
            return None;
        };
        if let Some(v) = self.i_side.get_mut(i) {
            v.neighbors.swap_remove(&j);
        }
        if let Some(v) = self.j_side.get_mut(j) {
            v.neighbors.swap_remove(&i);
        }
        self.i_side.sub_strength(i, attr.weight);
        self.j_side.sub_strength(j, attr.weight);
        Some(attr)
    }

    /// Removes a vertex together with all of its edges. Returns the number of
    /// edges dropped, or `None` if the vertex was absent.
    pub fn remove_vertex(&mut self, p: Partition, id: VertexId) -> Option<usize> {
        let nbrs: Vec<VertexId> = self.side(p).get(id)?.neighbors.iter().copied().collect();
        for &n in &nbrs {
            match p {
                Partition::I => self.apply_remove(id, n),
                Partition::J => self.apply_remove(n, id),
            };
        }
        let side = self.side_mut(p);
        side.slots[id as usize] = None;
        side.live.swap_remove(&id);
        side.strengths.set(id as usize, 0);
        Some(nbrs.len())
    }

    pub fn contains_vertex(&self, p: Partition, id: VertexId) -> bool {
        self.side(p).get(id).is_some()
    }

    pub fn vertex(&self, p: Partition, id: VertexId) -> Option<&VertexState> {
        self.side(p).get(id).map(|v| &v.state)
    }

    /// Strength of a vertex, zero when absent.
    pub fn strength(&self, p: Partition, id: VertexId) -> u64 {
        self.side(p).get(id).map_or(0, |v| v.state.strength)
    }

    pub fn degree(&self, p: Partition, id: VertexId) -> usize {
        self.side(p).get(id).map_or(0, |v| v.neighbors.len())
    }

    /// Neighbors (in the opposite partition) of vertex `id` of partition `p`.
    pub fn neighbors(&self, p: Partition, id: VertexId) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.side(p)
            .get(id)
            .map(|v| v.neighbors.as_slice())
            .unwrap_or_default()
            .iter()
            .copied()
    }

    pub fn edge(&self, i: VertexId, j: VertexId) -> Option<&EdgeAttr> {
        self.edges.get(&(i, j))
    }

    pub fn contains_edge(&self, i: VertexId, j: VertexId) -> bool {
        self.edges.contains_key(&(i, j))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self, p: Partition) -> usize {
        self.side(p).live.len()
    }

    /// Live vertex ids of a partition, in order of creation modulo removals.
    pub fn vertex_ids(&self, p: Partition) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.side(p).live.iter().copied()
    }

    pub fn vertices(&self, p: Partition) -> impl Iterator<Item = &VertexState> + '_ {
        self.side(p).slots.iter().flatten().map(|v| &v.state)
    }

    /// One past the largest id ever allocated in the partition.
    pub fn id_bound(&self, p: Partition) -> VertexId {
        self.side(p).slots.len() as VertexId
    }

    /// All edges, grouped by i-vertex in slot order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, &EdgeAttr)> + '_ {
        self.i_side.slots.iter().flatten().flat_map(move |v| {
            let i = v.state.id;
            v.neighbors.iter().map(move |&j| (i, j, &self.edges[&(i, j)]))
        })
    }

    pub fn total_strength(&self, p: Partition) -> u64 {
        self.side(p).strengths.total()
    }

    /// Draws a vertex of `p` with probability proportional to its strength,
    /// falling back to a uniform draw when all strengths are zero.
    pub fn sample_by_strength<R: Rng + ?Sized>(&self, p: Partition, rng: &mut R) -> Option<VertexId> {
        let side = self.side(p);
        match side.strengths.sample(rng) {
            Some(idx) => Some(idx as VertexId),
            None => self.sample_uniform(p, rng),
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, p: Partition, rng: &mut R) -> Option<VertexId> {
        let live = &self.side(p).live;
        if live.is_empty() {
            return None;
        }
        live.get_index(rng.random_range(0..live.len())).copied()
    }

    /// Verifies adjacency symmetry and recomputes every strength from the
    /// edge attributes.
    pub fn check_consistency(&self) -> Result<(), String> {
        let mut adj = 0usize;
        for v in self.i_side.slots.iter().flatten() {
            let i = v.state.id;
            let mut s = 0;
            for &j in &v.neighbors {
                let e = self
                    .edges
                    .get(&(i, j))
                    .ok_or(format!("({i},{j}) adjacent without attrs"))?;
                let back = self.j_side.get(j).ok_or(format!("j-vertex {j} missing"))?;
                if !back.neighbors.contains(&i) {
                    return Err(format!("({i},{j}) missing from iNeighbors[{j}]"));
                }
                s += e.weight;
                adj += 1;
            }
            if s != v.state.strength {
                return Err(format!("S_i({i}) = {} but edges sum to {s}", v.state.strength));
            }
        }
        for v in self.j_side.slots.iter().flatten() {
            let j = v.state.id;
            let s: u64 = v
                .neighbors
                .iter()
                .map(|&i| self.edges.get(&(i, j)).map_or(0, |e| e.weight))
                .sum();
            if s != v.state.strength {
                return Err(format!("S_j({j}) = {} but edges sum to {s}", v.state.strength));
            }
        }
        if adj != self.edges.len() {
            return Err(format!("{} edge attrs but {adj} adjacency entries", self.edges.len()));
        }
        let total: u64 = self.edges.values().map(|e| e.weight).sum();
        if self.total_strength(Partition::I) != total || self.total_strength(Partition::J) != total {
            return Err("partition strength totals disagree with edge weights".into());
        }
        Ok(())
    }
}
