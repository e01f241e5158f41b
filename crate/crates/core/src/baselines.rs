//! Baseline stream generators: a one-level Forest Fire variant and
//! strength-preferential attachment (SPA).
//!
//! Both grow a directed graph over one id space. Each directed edge becomes a
//! record with the source as i-vertex and the destination as j-vertex, so a
//! vertex id may appear in both partitions.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::FenwickTree;
use crate::stream::{Sgr, StreamLog, VertexId, MAX_WEIGHT, MIN_WEIGHT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FFConfig {
    /// Forward burning probability.
    pub p: f64,
    /// Backward burning probability.
    pub p_b: f64,
    pub n_steps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SPAConfig {
    /// Edges per new vertex.
    pub m: usize,
    pub n_steps: usize,
    pub seed: u64,
}

impl FFConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("p_b", self.p_b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be positive".into()));
        }
        Ok(())
    }
}

impl SPAConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be positive".into()));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Number of links to burn: geometric with mean `p / (1 - p)`, unbounded
/// when `p = 1`.
fn burn_count<R: Rng + ?Sized>(p: f64, rng: &mut R) -> usize {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return usize::MAX;
    }
    let g = Geometric::new(1.0 - p).expect("success probability in (0, 1)");
    usize::try_from(g.sample(rng)).unwrap_or(usize::MAX)
}

/// Up to `count` distinct members of `pool`, uniformly without replacement,
/// in draw order.
fn pick<R: Rng + ?Sized>(pool: &[VertexId], count: usize, rng: &mut R) -> Vec<VertexId> {
    let k = count.min(pool.len());
    if k == pool.len() {
        return pool.to_vec();
    }
    index::sample(rng, pool.len(), k).into_iter().map(|x| pool[x]).collect()
}

fn weight<R: Rng + ?Sized>(rng: &mut R) -> u8 {
    rng.random_range(MIN_WEIGHT..=MAX_WEIGHT)
}

/// Forest Fire with one level of burning. Seeded with the edge `0 -> 1` at
/// timestamp 0; step `s` adds vertex `s + 1` at timestamp `s`.
pub fn ff_generate(config: &FFConfig) -> Result<StreamLog> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_steps + 2;
    let mut out_adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut in_adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut stream = StreamLog::with_capacity(config.n_steps * 2);

    stream.push(Sgr::new(0, 1, weight(&mut rng), 0));
    out_adj[0].push(1);
    in_adj[1].push(0);

    let mut targets: Vec<VertexId> = Vec::new();
    for step in 1..=config.n_steps {
        let v = (step + 1) as VertexId;
        let ambassador = rng.random_range(0..v);
        let n_out = burn_count(config.p, &mut rng);
        let n_in = burn_count(config.p_b, &mut rng);
        targets.clear();
        targets.push(ambassador);
        for x in pick(&out_adj[ambassador as usize], n_out, &mut rng) {
            if !targets.contains(&x) {
                targets.push(x);
            }
        }
        for y in pick(&in_adj[ambassador as usize], n_in, &mut rng) {
            if !targets.contains(&y) {
                targets.push(y);
            }
        }
        for &t in &targets {
            stream.push(Sgr::new(v, t, weight(&mut rng), step as u64));
            out_adj[v as usize].push(t);
            in_adj[t as usize].push(v);
        }
    }
    Ok(stream)
}

/// Strength-preferential attachment. Seeded with `m` disjoint unit-weight
/// edges `2k -> 2k + 1` at timestamp 0; step `s` adds a vertex linking to `m`
/// distinct existing vertices at timestamp `s`.
pub fn spa_generate(config: &SPAConfig) -> Result<StreamLog> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let m = config.m;
    let mut strengths = FenwickTree::new();
    let mut stream = StreamLog::with_capacity(m * (config.n_steps + 1));
    for k in 0..m {
        let (a, b) = (2 * k, 2 * k + 1);
        stream.push(Sgr::new(a as VertexId, b as VertexId, 1, 0));
        strengths.set(a, 1);
        strengths.set(b, 1);
    }

    let mut chosen: Vec<(usize, u64)> = Vec::with_capacity(m);
    for step in 1..=config.n_steps {
        let v = 2 * m + step - 1;
        chosen.clear();
        // every existing vertex has positive strength and v > m of them
        // exist, so m distinct draws always succeed
        for _ in 0..m {
            let u = strengths.sample(&mut rng).expect("positive total strength");
            chosen.push((u, strengths.get(u)));
            strengths.set(u, 0);
        }
        let mut added = 0;
        for &(u, s) in &chosen {
            let w = weight(&mut rng);
            stream.push(Sgr::new(v as VertexId, u as VertexId, w, step as u64));
            strengths.set(u, s + u64::from(w));
            added += u64::from(w);
        }
        strengths.set(v, added);
    }
    Ok(stream)
}
